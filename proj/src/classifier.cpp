#include "qpatch/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpatch/errors.hpp"
#include "qpatch/gradients.hpp"
#include "qpatch/parallel.hpp"
#include "qpatch/rng.hpp"

namespace qpatch::qml {

namespace {

constexpr double kProbFloor = 1e-12;

circuits::CircuitIR build_classifier_circuit(const ClassifierSpec& spec) {
    circuits::CircuitIR circuit(spec.n_qubits);
    const int n = spec.n_qubits;
    for (int b = 0; b < spec.n_blocks; ++b) {
        for (int q = 0; q < n; ++q) {
            circuits::GateSpec op;
            op.kind = qsim::GateKind::RY;
            op.target = q;
            op.params[0] = circuits::ParamSlot::feature(
                static_cast<std::uint32_t>(b * n + q), 1.0);
            circuit.push(op);
        }
        circuit.append(circuits::strongly_entangling_block(
            n, 3u * static_cast<std::uint32_t>(n) * static_cast<std::uint32_t>(b)));
    }
    return circuit;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> probs(logits.size());
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

double cross_entropy(std::span<const double> probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
        throw UsageError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(probs.size()) + " classes");
    }
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbFloor));
}

Classifier::Classifier(ClassifierSpec spec)
    : spec_(std::move(spec)), circuit_(1), embed_circuit_(1) {
    if (spec_.n_qubits < 1 || spec_.n_qubits > 8) {
        throw ConfigError("classifier qubit count " + std::to_string(spec_.n_qubits) +
                          " outside supported range 1..8");
    }
    if (spec_.feature_dim < 1) {
        throw ConfigError("classifier needs feature_dim >= 1");
    }
    if (spec_.n_blocks == 0) {
        spec_.n_blocks = (spec_.feature_dim + spec_.n_qubits - 1) / spec_.n_qubits;
    }
    if (spec_.n_blocks < 1 ||
        spec_.n_blocks * spec_.n_qubits < spec_.feature_dim) {
        throw ConfigError("feature length " + std::to_string(spec_.feature_dim) +
                          " exceeds capacity " +
                          std::to_string(spec_.n_blocks * spec_.n_qubits));
    }
    if (spec_.n_classes < 1 || spec_.n_classes > spec_.n_qubits) {
        throw ConfigError("n_classes must lie in 1..n_qubits, got " +
                          std::to_string(spec_.n_classes));
    }
    if (spec_.readout_qubits.empty()) {
        for (int c = 0; c < spec_.n_classes; ++c) readouts_.push_back(c);
    } else {
        readouts_ = spec_.readout_qubits;
        if (static_cast<int>(readouts_.size()) != spec_.n_classes) {
            throw ConfigError("readout qubit list must have one entry per class");
        }
        std::vector<int> sorted = readouts_;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() < 0 || sorted.back() >= spec_.n_qubits ||
            std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("readout qubits must be distinct and on-register");
        }
    }
    circuit_ = build_classifier_circuit(spec_);
    std::vector<double> unit(static_cast<std::size_t>(spec_.n_qubits), 1.0);
    embed_circuit_ = circuits::angle_embedding(spec_.n_qubits, unit);
}

ClassifierParams Classifier::init_params(std::uint64_t seed) const {
    ClassifierParams params;
    rng::Engine gen(seed);
    params.theta.resize(circuit_.trainable_slots());
    for (double& t : params.theta) t = rng::range_double(gen, -0.1, 0.1);
    params.w.assign(static_cast<std::size_t>(spec_.feature_dim), 1.0);
    return params;
}

void Classifier::check_features(const ClassifierParams& params,
                                std::span<const double> features) const {
    if (static_cast<int>(features.size()) != spec_.feature_dim) {
        throw ConfigError("expected " + std::to_string(spec_.feature_dim) +
                          " features, got " + std::to_string(features.size()));
    }
    if (params.theta.size() != circuit_.trainable_slots()) {
        throw UsageError("theta has " + std::to_string(params.theta.size()) +
                         " entries, circuit needs " +
                         std::to_string(circuit_.trainable_slots()));
    }
    if (static_cast<int>(params.w.size()) != spec_.feature_dim) {
        throw UsageError("encoding weights length does not match feature_dim");
    }
}

std::vector<double> Classifier::effective_features(
    const ClassifierParams& params, std::span<const double> features) const {
    check_features(params, features);
    std::vector<double> effective(static_cast<std::size_t>(padded_dim()), 0.0);
    for (int j = 0; j < spec_.feature_dim; ++j) {
        effective[static_cast<std::size_t>(j)] =
            params.w[static_cast<std::size_t>(j)] * features[static_cast<std::size_t>(j)];
    }
    return effective;
}

std::vector<double> Classifier::logits(const ClassifierParams& params,
                                       std::span<const double> features) const {
    const auto effective = effective_features(params, features);
    const qsim::StateVector state = circuits::execute(
        circuit_, effective, params.theta, qsim::StateVector(spec_.n_qubits));
    std::vector<double> vals(readouts_.size());
    for (std::size_t q = 0; q < readouts_.size(); ++q) {
        vals[q] = state.expectation_z(readouts_[q]);
    }
    return vals;
}

std::vector<double> Classifier::probabilities(const ClassifierParams& params,
                                              std::span<const double> features) const {
    return softmax(logits(params, features));
}

int Classifier::predict(const ClassifierParams& params,
                        std::span<const double> features) const {
    const auto scores = logits(params, features);
    return static_cast<int>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
}

double Classifier::loss(const ClassifierParams& params,
                        std::span<const Sample> batch) const {
    if (batch.empty()) throw UsageError("loss over an empty batch");
    double total = 0.0;
    for (const Sample& s : batch) {
        total += cross_entropy(probabilities(params, s.features), s.label);
    }
    return total / static_cast<double>(batch.size());
}

struct Classifier::SampleEval {
    Gradient grad;
    std::vector<double> d_features;
    double loss = 0.0;
    bool correct = false;
};

Classifier::SampleEval Classifier::eval_sample(const ClassifierParams& params,
                                               std::span<const double> features,
                                               int label) const {
    const auto effective = effective_features(params, features);
    const CircuitGradients cg =
        circuit_gradients(circuit_, effective, params.theta, readouts_,
                          qsim::StateVector(spec_.n_qubits));

    const auto probs = softmax(cg.values);
    SampleEval eval;
    eval.loss = cross_entropy(probs, label);
    eval.correct =
        static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                         probs.begin()) == label;

    // d loss / d logit_q for softmax cross-entropy.
    std::vector<double> d_logit(probs.size());
    for (std::size_t q = 0; q < probs.size(); ++q) {
        d_logit[q] = probs[q] - (static_cast<int>(q) == label ? 1.0 : 0.0);
    }

    eval.grad.theta.assign(params.theta.size(), 0.0);
    for (std::size_t k = 0; k < params.theta.size(); ++k) {
        for (std::size_t q = 0; q < d_logit.size(); ++q) {
            eval.grad.theta[k] += d_logit[q] * cg.wrt_trainable[q][k];
        }
    }

    // The circuit sees w_j * x_j, so the effective-feature derivative splits
    // into the weight and input directions by one extra chain factor.
    std::vector<double> d_effective(static_cast<std::size_t>(padded_dim()), 0.0);
    for (std::size_t j = 0; j < d_effective.size(); ++j) {
        for (std::size_t q = 0; q < d_logit.size(); ++q) {
            d_effective[j] += d_logit[q] * cg.wrt_feature[q][j];
        }
    }
    eval.grad.w.assign(params.w.size(), 0.0);
    eval.d_features.assign(features.size(), 0.0);
    for (int j = 0; j < spec_.feature_dim; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        if (spec_.encoding_trainable) {
            eval.grad.w[idx] = d_effective[idx] * features[idx];
        }
        eval.d_features[idx] = d_effective[idx] * params.w[idx];
    }
    return eval;
}

BatchEval Classifier::batch_gradient(const ClassifierParams& params,
                                     std::span<const Sample> batch,
                                     unsigned threads) const {
    if (batch.empty()) throw UsageError("gradient over an empty batch");
    std::vector<SampleEval> evals(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) {
        evals[i] = eval_sample(params, batch[i].features, batch[i].label);
    });

    BatchEval out;
    out.grad.theta.assign(params.theta.size(), 0.0);
    out.grad.w.assign(params.w.size(), 0.0);
    for (const SampleEval& e : evals) {  // fixed order keeps sums bit-stable
        for (std::size_t k = 0; k < out.grad.theta.size(); ++k) {
            out.grad.theta[k] += e.grad.theta[k];
        }
        for (std::size_t j = 0; j < out.grad.w.size(); ++j) {
            out.grad.w[j] += e.grad.w[j];
        }
        out.loss += e.loss;
        out.correct += e.correct ? 1 : 0;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : out.grad.theta) g *= inv;
    for (double& g : out.grad.w) g *= inv;
    out.loss *= inv;
    return out;
}

std::vector<double> Classifier::feature_gradient(const ClassifierParams& params,
                                                 std::span<const double> features,
                                                 int label) const {
    return eval_sample(params, features, label).d_features;
}

qsim::StateVector Classifier::embedding_state(const ClassifierParams& params,
                                              std::span<const double> features) const {
    const auto effective = effective_features(params, features);
    return circuits::execute(embed_circuit_, effective, {},
                             qsim::StateVector(spec_.n_qubits));
}

}  // namespace qpatch::qml
