#include "qpatch/train.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "qpatch/binio.hpp"
#include "qpatch/errors.hpp"
#include "qpatch/rng.hpp"

namespace qpatch::qml {

namespace {

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_step(std::vector<double>& p, const std::vector<double>& g,
               AdamState& state, double lr, int t) {
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
        state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * g[i];
        state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * g[i] * g[i];
        p[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + kAdamEps);
    }
}

void sgd_step(std::vector<double>& p, const std::vector<double>& g, double lr) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
}

void validate(const Classifier& model, std::span<const Sample> dataset,
              const TrainConfig& config) {
    if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw ConfigError("learning_rate must be a positive finite value");
    }
    if (dataset.empty()) throw UsageError("training set is empty");
    for (const Sample& s : dataset) {
        if (s.label < 0 || s.label >= model.spec().n_classes) {
            throw UsageError("training label " + std::to_string(s.label) +
                             " outside 0.." + std::to_string(model.spec().n_classes - 1));
        }
    }
}

}  // namespace

double lipschitz_bound(const Classifier& model, const ClassifierParams& params) {
    if (static_cast<int>(params.w.size()) != model.spec().feature_dim) {
        throw UsageError("encoding weights length does not match feature_dim");
    }
    double bound = 0.0;
    for (const circuits::GateSpec& op : model.circuit().ops()) {
        const int n_angles = qsim::angle_count(op.kind);
        for (int a = 0; a < n_angles; ++a) {
            const circuits::ParamSlot& slot = op.params[static_cast<std::size_t>(a)];
            if (slot.kind != circuits::ParamSlot::Kind::Feature) continue;
            if (slot.index >= params.w.size()) continue;  // zero-padded slot
            // 2 * |M| * |d angle / d x_j| * |H|, |M| = 1, |H| = 1/2
            bound += 2.0 *
                     std::abs(std::numbers::pi * slot.value * params.w[slot.index]) *
                     0.5;
        }
    }
    return bound;
}

TrainResult train(const Classifier& model, std::span<const Sample> dataset,
                  const TrainConfig& config) {
    return train_from(model, dataset, config, model.init_params(config.seed));
}

TrainResult train_from(const Classifier& model, std::span<const Sample> dataset,
                       const TrainConfig& config, ClassifierParams initial) {
    validate(model, dataset, config);

    TrainResult result;
    result.params = std::move(initial);
    result.history.reserve(static_cast<std::size_t>(config.epochs));

    rng::Engine shuffle_gen(config.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    AdamState theta_state(result.params.theta.size());
    AdamState w_state(result.params.w.size());
    const bool train_w = model.spec().encoding_trainable;
    const bool adam = config.optimizer == TrainConfig::Optimizer::Adam;
    int step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng::shuffle(shuffle_gen, order);

        double loss_sum = 0.0;
        int correct = 0;
        const std::size_t batch = static_cast<std::size_t>(config.batch_size);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            std::vector<Sample> minibatch(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                minibatch[i - start] = dataset[order[i]];
            }

            const BatchEval eval =
                model.batch_gradient(result.params, minibatch, config.threads);
            if (!std::isfinite(eval.loss)) {
                throw TrainingError("non-finite loss", epoch);
            }
            loss_sum += eval.loss * static_cast<double>(minibatch.size());
            correct += eval.correct;

            ++step;
            if (adam) {
                adam_step(result.params.theta, eval.grad.theta, theta_state,
                          config.learning_rate, step);
                if (train_w) {
                    adam_step(result.params.w, eval.grad.w, w_state,
                              config.learning_rate, step);
                }
            } else {
                sgd_step(result.params.theta, eval.grad.theta, config.learning_rate);
                if (train_w) sgd_step(result.params.w, eval.grad.w, config.learning_rate);
            }
        }

        EpochStats stats;
        stats.loss = loss_sum / static_cast<double>(dataset.size());
        stats.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
        stats.lipschitz = lipschitz_bound(model, result.params);
        if (!std::isfinite(stats.lipschitz)) {
            throw TrainingError("parameters diverged", epoch);
        }
        result.history.push_back(stats);
    }
    return result;
}

namespace {

constexpr char kCkptMagic[4] = {'Q', 'P', 'C', 'K'};
constexpr std::uint16_t kCkptVersion = 1;

double wrap_angle(double t) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(t, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open checkpoint for writing: " + path);

    out.write(kCkptMagic, 4);
    binio::put_u16(out, kCkptVersion);
    binio::put_u32(out, static_cast<std::uint32_t>(ckpt.spec.n_qubits));
    binio::put_u32(out, static_cast<std::uint32_t>(ckpt.spec.n_blocks));
    binio::put_u32(out, static_cast<std::uint32_t>(ckpt.spec.n_classes));
    binio::put_u32(out, static_cast<std::uint32_t>(ckpt.spec.feature_dim));
    out.put(ckpt.spec.encoding_trainable ? '\1' : '\0');
    binio::put_u32(out, static_cast<std::uint32_t>(ckpt.spec.readout_qubits.size()));
    for (int q : ckpt.spec.readout_qubits) {
        binio::put_u32(out, static_cast<std::uint32_t>(q));
    }
    binio::put_u64(out, ckpt.params.theta.size());
    for (double t : ckpt.params.theta) binio::put_f64(out, wrap_angle(t));
    binio::put_u64(out, ckpt.params.w.size());
    for (double v : ckpt.params.w) binio::put_f64(out, v);
    binio::put_u64(out, ckpt.train_seed);
    if (!out) throw FormatError("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint: " + path);

    char magic[4];
    in.read(magic, 4);
    binio::need(in, "checkpoint magic");
    if (std::memcmp(magic, kCkptMagic, 4) != 0) {
        throw FormatError("not a QPCK checkpoint: " + path);
    }
    const std::uint16_t version = binio::get_u16(in, "checkpoint version");
    if (version != kCkptVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }

    Checkpoint ckpt;
    ckpt.spec.n_qubits = static_cast<int>(binio::get_u32(in, "n_qubits"));
    ckpt.spec.n_blocks = static_cast<int>(binio::get_u32(in, "n_blocks"));
    ckpt.spec.n_classes = static_cast<int>(binio::get_u32(in, "n_classes"));
    ckpt.spec.feature_dim = static_cast<int>(binio::get_u32(in, "feature_dim"));
    int flag = in.get();
    binio::need(in, "encoding_trainable flag");
    ckpt.spec.encoding_trainable = flag != 0;
    const std::uint32_t n_readouts = binio::get_u32(in, "readout count");
    for (std::uint32_t i = 0; i < n_readouts; ++i) {
        ckpt.spec.readout_qubits.push_back(
            static_cast<int>(binio::get_u32(in, "readout qubit")));
    }
    const std::uint64_t n_theta = binio::get_u64(in, "theta count");
    ckpt.params.theta.reserve(n_theta);
    for (std::uint64_t i = 0; i < n_theta; ++i) {
        ckpt.params.theta.push_back(binio::get_f64(in, "theta"));
    }
    const std::uint64_t n_w = binio::get_u64(in, "weight count");
    ckpt.params.w.reserve(n_w);
    for (std::uint64_t i = 0; i < n_w; ++i) {
        ckpt.params.w.push_back(binio::get_f64(in, "weight"));
    }
    ckpt.train_seed = binio::get_u64(in, "train seed");
    return ckpt;
}

}  // namespace qpatch::qml
