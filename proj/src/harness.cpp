#include "qpatch/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qpatch/dataset.hpp"
#include "qpatch/errors.hpp"
#include "qpatch/parallel.hpp"
#include "qpatch/rng.hpp"

namespace fs = std::filesystem;

namespace qpatch::harness {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type from = 0;
    while (true) {
        const auto at = s.find(sep, from);
        if (at == std::string::npos) {
            parts.push_back(s.substr(from));
            return parts;
        }
        parts.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ConfigError("config key " + key + ": not an integer: '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size() ||
        value.front() == '-') {
        throw ConfigError("config key " + key + ": not a u64: '" + value + "'");
    }
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ConfigError("config key " + key + ": not a number: '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigError("config key " + key + ": expected 0/1/true/false, got '" +
                      value + "'");
}

std::vector<double> parse_epsilon_list(const std::string& value) {
    std::vector<double> grid;
    for (const std::string& part : split(value, ',')) {
        const std::string token = trim(part);
        if (token.empty()) {
            throw ConfigError("epsilon list has an empty entry: '" + value + "'");
        }
        grid.push_back(parse_double("epsilon", token));
    }
    return grid;
}

}  // namespace

void apply_key(ExperimentConfig& c, const std::string& key,
               const std::string& value) {
    if (key == "dataset") c.dataset = value;
    else if (key == "train_images") c.train_images = value;
    else if (key == "train_labels") c.train_labels = value;
    else if (key == "test_images") c.test_images = value;
    else if (key == "test_labels") c.test_labels = value;
    else if (key == "cifar_batch") c.cifar_batch = value;
    else if (key == "data_seed") c.data_seed = parse_u64(key, value);
    else if (key == "train_count") c.train_count = static_cast<int>(parse_int(key, value));
    else if (key == "test_count") c.test_count = static_cast<int>(parse_int(key, value));
    else if (key == "class_a") c.class_a = static_cast<int>(parse_int(key, value));
    else if (key == "class_b") c.class_b = static_cast<int>(parse_int(key, value));
    else if (key == "downsample") c.downsample = static_cast<int>(parse_int(key, value));
    else if (key == "n_qubits") c.n_qubits = static_cast<int>(parse_int(key, value));
    else if (key == "n_classes") c.n_classes = static_cast<int>(parse_int(key, value));
    else if (key == "encoding_trainable") c.encoding_trainable = parse_bool(key, value);
    else if (key == "epochs") c.epochs = static_cast<int>(parse_int(key, value));
    else if (key == "batch_size") c.batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "learning_rate") c.learning_rate = parse_double(key, value);
    else if (key == "optimizer") c.optimizer = value;
    else if (key == "train_seed") c.train_seed = parse_u64(key, value);
    else if (key == "threads") c.threads = static_cast<unsigned>(parse_u64(key, value));
    else if (key == "rqc_seed") c.rqc_seed = parse_u64(key, value);
    else if (key == "rqc_depth") c.rqc_depth = static_cast<int>(parse_int(key, value));
    else if (key == "include_original") c.include_original = parse_bool(key, value);
    else if (key == "epsilon") c.epsilon = parse_epsilon_list(value);
    else if (key == "scenario") c.scenario = value;
    else if (key == "arm") c.arm = value;
    else if (key == "out") c.out = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        }
        apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void validate(const ExperimentConfig& c) {
    if (c.dataset != "plus-minus" && c.dataset != "digits" && c.dataset != "idx" &&
        c.dataset != "cifar") {
        throw ConfigError("dataset must be plus-minus|digits|idx|cifar, got '" +
                          c.dataset + "'");
    }
    if (c.dataset == "idx" &&
        (c.train_images.empty() || c.train_labels.empty() || c.test_images.empty() ||
         c.test_labels.empty())) {
        throw ConfigError("dataset=idx needs train_images/train_labels/"
                          "test_images/test_labels paths");
    }
    if (c.dataset == "cifar" && c.cifar_batch.empty()) {
        throw ConfigError("dataset=cifar needs a cifar_batch path");
    }
    if (c.train_count < 1 || c.test_count < 1) {
        throw ConfigError("train_count and test_count must be >= 1");
    }
    if ((c.class_a < 0) != (c.class_b < 0)) {
        throw ConfigError("class_a and class_b must be set together");
    }
    if (c.class_a >= 0 && c.class_a == c.class_b) {
        throw ConfigError("class_a and class_b must differ");
    }
    if (c.downsample < 1) throw ConfigError("downsample must be >= 1");
    if (c.optimizer != "adam" && c.optimizer != "sgd") {
        throw ConfigError("optimizer must be adam|sgd, got '" + c.optimizer + "'");
    }
    if (c.rqc_depth < 0) throw ConfigError("rqc_depth must be >= 0");
    if (c.epsilon.empty()) throw ConfigError("epsilon grid is empty");
    for (double e : c.epsilon) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw ConfigError("epsilon values must be finite and >= 0");
        }
    }
    if (c.scenario != "whitebox" && c.scenario != "transfer") {
        throw ConfigError("scenario must be whitebox|transfer, got '" + c.scenario + "'");
    }
    if (c.arm != "baseline" && c.arm != "rqc" && c.arm != "both") {
        throw ConfigError("arm must be baseline|rqc|both, got '" + c.arm + "'");
    }
    if (c.out.empty()) throw ConfigError("out directory must not be empty");
}

namespace {

constexpr int kFormatQpch = 1;
constexpr int kFormatQpck = 1;
constexpr int kFormatQpir = 1;

std::string echo_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "# resolved experiment configuration\n";
    out << "format.qpch=" << kFormatQpch << "\n";
    out << "format.qpck=" << kFormatQpck << "\n";
    out << "format.qpir=" << kFormatQpir << "\n";
    out << "dataset=" << c.dataset << "\n";
    out << "train_images=" << c.train_images << "\n";
    out << "train_labels=" << c.train_labels << "\n";
    out << "test_images=" << c.test_images << "\n";
    out << "test_labels=" << c.test_labels << "\n";
    out << "cifar_batch=" << c.cifar_batch << "\n";
    out << "data_seed=" << c.data_seed << "\n";
    out << "train_count=" << c.train_count << "\n";
    out << "test_count=" << c.test_count << "\n";
    out << "class_a=" << c.class_a << "\n";
    out << "class_b=" << c.class_b << "\n";
    out << "downsample=" << c.downsample << "\n";
    out << "n_qubits=" << c.n_qubits << "\n";
    out << "n_classes=" << c.n_classes << "\n";
    out << "encoding_trainable=" << (c.encoding_trainable ? 1 : 0) << "\n";
    out << "epochs=" << c.epochs << "\n";
    out << "batch_size=" << c.batch_size << "\n";
    out << "learning_rate=" << fmt_g(c.learning_rate) << "\n";
    out << "optimizer=" << c.optimizer << "\n";
    out << "train_seed=" << c.train_seed << "\n";
    out << "threads=" << c.threads << "\n";
    out << "rqc_seed=" << c.rqc_seed << "\n";
    out << "rqc_depth=" << c.rqc_depth << "\n";
    out << "include_original=" << (c.include_original ? 1 : 0) << "\n";
    out << "epsilon=";
    for (std::size_t i = 0; i < c.epsilon.size(); ++i) {
        if (i) out << ',';
        out << fmt_g(c.epsilon[i]);
    }
    out << "\n";
    out << "scenario=" << c.scenario << "\n";
    out << "arm=" << c.arm << "\n";
    out << "out=" << c.out << "\n";
    return out.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw FormatError("short write: " + path.string());
}

fs::path prepare_run_dir(const ExperimentConfig& config) {
    const fs::path dir(config.out);
    fs::create_directories(dir);
    write_text_file(dir / "resolved_config.txt", echo_config(config));
    return dir;
}

data::LabeledDataset shuffled(const data::LabeledDataset& ds, rng::Engine& gen) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::shuffle(gen, order);
    data::LabeledDataset out = ds;
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.images[i] = ds.images[order[i]];
        out.labels[i] = ds.labels[order[i]];
    }
    return out;
}

adv::EvalCase make_case(const ImageTensor& image, int label, int factor) {
    adv::EvalCase ec;
    ec.image = to_luminance(image);
    if (factor > 1) ec.image = data::downsample(ec.image, factor);
    ec.label = label;
    return ec;
}

std::vector<std::string> selected_arms(const std::string& arm) {
    if (arm == "both") return {"baseline", "rqc"};
    return {arm};
}

}  // namespace

ResolvedData resolve_dataset(const ExperimentConfig& config) {
    validate(config);
    const int need = config.train_count + config.test_count;
    const bool filter = config.class_a >= 0;
    rng::Engine gen(config.data_seed);
    ResolvedData rd;

    if (config.dataset == "idx") {
        data::LabeledDataset tr = data::load_idx(config.train_images, config.train_labels);
        data::LabeledDataset te = data::load_idx(config.test_images, config.test_labels);
        if (filter) {
            tr = data::subset_binary(tr, config.class_a, config.class_b,
                                     (config.train_count + 1) / 2);
            te = data::subset_binary(te, config.class_a, config.class_b,
                                     (config.test_count + 1) / 2);
        }
        tr = shuffled(tr, gen);
        te = shuffled(te, gen);
        if (static_cast<int>(tr.size()) < config.train_count ||
            static_cast<int>(te.size()) < config.test_count) {
            throw ConfigError("idx dataset too small for requested counts");
        }
        for (int i = 0; i < config.train_count; ++i) {
            rd.train.push_back(make_case(tr.images[i], tr.labels[i], config.downsample));
        }
        for (int i = 0; i < config.test_count; ++i) {
            rd.test.push_back(make_case(te.images[i], te.labels[i], config.downsample));
        }
        return rd;
    }

    data::LabeledDataset pool;
    if (config.dataset == "plus-minus") {
        const int pool_n = filter ? 4 * ((need + 1) / 2) : need;
        pool = data::gen_plus_minus(pool_n, config.data_seed);
    } else if (config.dataset == "digits") {
        const int pool_n = filter ? 2 * ((need + 1) / 2) : need;
        pool = data::gen_synth_digits(pool_n, config.data_seed);
    } else {  // cifar
        pool = data::load_cifar(config.cifar_batch);
    }
    if (filter) {
        pool = data::subset_binary(pool, config.class_a, config.class_b,
                                   (need + 1) / 2);
    }
    pool = shuffled(pool, gen);
    if (static_cast<int>(pool.size()) < need) {
        throw ConfigError("dataset yields " + std::to_string(pool.size()) +
                          " samples, need " + std::to_string(need));
    }
    for (int i = 0; i < config.train_count; ++i) {
        rd.train.push_back(make_case(pool.images[i], pool.labels[i], config.downsample));
    }
    for (int i = 0; i < need - config.train_count; ++i) {
        const int j = config.train_count + i;
        rd.test.push_back(make_case(pool.images[j], pool.labels[j], config.downsample));
    }
    return rd;
}

namespace {

circuits::RqcSpec rqc_of(const ExperimentConfig& config) {
    return circuits::RqcSpec{config.rqc_seed, quanv::kPatchQubits, config.rqc_depth};
}

fs::path cache_path(const ExperimentConfig& config) {
    return fs::path(config.out) / "quanv_cache.qpch";
}

std::vector<quanv::ChannelStack> compute_stacks(const ExperimentConfig& config,
                                                const ResolvedData& rd) {
    const circuits::RqcSpec rqc = rqc_of(config);
    std::vector<const adv::EvalCase*> cases;
    for (const auto& c : rd.train) cases.push_back(&c);
    for (const auto& c : rd.test) cases.push_back(&c);
    std::vector<quanv::ChannelStack> stacks(cases.size());
    parallel_for(cases.size(), config.threads, [&](std::size_t i) {
        stacks[i] = quanv::quanv_transform(cases[i]->image, rqc);
    });
    return stacks;
}

// Cache stacks for the run, in train-then-test order, matching the config.
std::vector<quanv::ChannelStack> load_stacks(const ExperimentConfig& config,
                                             const ResolvedData& rd) {
    const fs::path path = cache_path(config);
    if (!fs::exists(path)) {
        throw UsageError("quanv cache missing at " + path.string() +
                         "; run preprocess first");
    }
    std::vector<quanv::ChannelStack> stacks = quanv::read_cache(path);
    if (stacks.size() != rd.train.size() + rd.test.size()) {
        throw ConfigError("quanv cache holds " + std::to_string(stacks.size()) +
                          " stacks, dataset resolves to " +
                          std::to_string(rd.train.size() + rd.test.size()));
    }
    if (!stacks.empty() && (stacks.front().rqc_seed != config.rqc_seed ||
                            stacks.front().rqc_depth != config.rqc_depth)) {
        throw ConfigError("quanv cache was built with different rqc settings");
    }
    if (!stacks.empty() && !rd.train.empty()) {
        const ImageTensor& img = rd.train.front().image;
        if (stacks.front().original.height != (img.height + 1) / 2 ||
            stacks.front().original.width != (img.width + 1) / 2) {
            throw ConfigError("quanv cache grid does not match the resolved images");
        }
    }
    return stacks;
}

std::vector<qml::Sample> raw_samples(std::span<const adv::EvalCase> cases) {
    std::vector<qml::Sample> samples;
    samples.reserve(cases.size());
    for (const adv::EvalCase& c : cases) {
        samples.push_back({c.image.values, c.label});
    }
    return samples;
}

std::vector<qml::Sample> cached_samples(std::span<const quanv::ChannelStack> stacks,
                                        std::span<const adv::EvalCase> cases,
                                        bool include_original) {
    std::vector<qml::Sample> samples;
    samples.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        samples.push_back({quanv::flatten_features(stacks[i], include_original),
                           cases[i].label});
    }
    return samples;
}

struct TrainedArm {
    qml::Classifier model;
    qml::TrainResult result;
};

TrainedArm train_arm(const ExperimentConfig& config, const ResolvedData& rd,
                     const std::string& arm) {
    std::vector<qml::Sample> samples;
    if (arm == "baseline") {
        samples = raw_samples(rd.train);
    } else {
        const auto stacks = load_stacks(config, rd);
        samples = cached_samples(
            std::span(stacks).first(rd.train.size()), rd.train,
            config.include_original);
    }

    qml::ClassifierSpec spec;
    spec.n_qubits = config.n_qubits;
    spec.n_classes = config.n_classes;
    spec.feature_dim = static_cast<int>(samples.front().features.size());
    spec.encoding_trainable = config.encoding_trainable;
    qml::Classifier model(spec);

    qml::TrainConfig tc;
    tc.epochs = config.epochs;
    tc.batch_size = config.batch_size;
    tc.learning_rate = config.learning_rate;
    tc.seed = config.train_seed;
    tc.optimizer = config.optimizer == "adam" ? qml::TrainConfig::Optimizer::Adam
                                              : qml::TrainConfig::Optimizer::Sgd;
    tc.threads = config.threads;

    qml::TrainResult result = qml::train(model, samples, tc);
    return {std::move(model), std::move(result)};
}

std::string history_csv(const std::vector<qml::EpochStats>& history) {
    std::ostringstream out;
    out << "epoch,loss,accuracy,lipschitz\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        out << (e + 1) << ',' << fmt_g(history[e].loss) << ','
            << fmt_g(history[e].accuracy) << ',' << fmt_g(history[e].lipschitz)
            << "\n";
    }
    return out.str();
}

adv::Pipeline make_pipeline(const ExperimentConfig& config, const std::string& arm,
                            const qml::Checkpoint& ckpt) {
    qml::Classifier model(ckpt.spec);
    if (arm == "baseline") {
        return adv::Pipeline(std::move(model), ckpt.params);
    }
    return adv::Pipeline(rqc_of(config), config.include_original, std::move(model),
                         ckpt.params);
}

qml::Checkpoint load_arm_checkpoint(const ExperimentConfig& config,
                                    const std::string& arm) {
    const fs::path path = fs::path(config.out) / ("checkpoint_" + arm + ".qpck");
    if (!fs::exists(path)) {
        throw UsageError("missing checkpoint " + path.string() + "; run train first");
    }
    return qml::load_checkpoint(path.string());
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) throw FormatError("cannot reopen cache for comparison");
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

}  // namespace

void cmd_preprocess(const ExperimentConfig& config) {
    const ResolvedData rd = resolve_dataset(config);
    const fs::path dir = prepare_run_dir(config);
    const auto stacks = compute_stacks(config, rd);

    const fs::path cache = cache_path(config);
    const fs::path tmp = cache.string() + ".tmp";
    quanv::write_cache(tmp, stacks);
    if (fs::exists(cache)) {
        const bool match = same_bytes(cache, tmp);
        fs::remove(tmp);
        if (!match) {
            throw FormatError("existing cache " + cache.string() +
                              " does not match this configuration");
        }
    } else {
        fs::rename(tmp, cache);
    }
    (void)dir;
}

void cmd_train(const ExperimentConfig& config) {
    const ResolvedData rd = resolve_dataset(config);
    const fs::path dir = prepare_run_dir(config);

    for (const std::string& arm : selected_arms(config.arm)) {
        const TrainedArm trained = train_arm(config, rd, arm);
        qml::Checkpoint ckpt;
        ckpt.spec = trained.model.spec();
        ckpt.params = trained.result.params;
        ckpt.train_seed = config.train_seed;
        qml::save_checkpoint((dir / ("checkpoint_" + arm + ".qpck")).string(), ckpt);
        write_text_file(dir / ("history_" + arm + ".csv"),
                        history_csv(trained.result.history));
    }
}

void cmd_attack_eval(const ExperimentConfig& config) {
    const ResolvedData rd = resolve_dataset(config);
    const fs::path dir = prepare_run_dir(config);

    const std::vector<std::string> arms = selected_arms(config.arm);
    const bool needs_baseline =
        config.scenario == "transfer" ||
        std::find(arms.begin(), arms.end(), "baseline") != arms.end();

    std::vector<adv::Pipeline> pipelines;
    std::vector<std::string> pipeline_arm;
    const adv::Pipeline* baseline_pipe = nullptr;
    if (needs_baseline) {
        pipelines.push_back(
            make_pipeline(config, "baseline", load_arm_checkpoint(config, "baseline")));
        pipeline_arm.push_back("baseline");
    }
    if (std::find(arms.begin(), arms.end(), "rqc") != arms.end()) {
        pipelines.push_back(
            make_pipeline(config, "rqc", load_arm_checkpoint(config, "rqc")));
        pipeline_arm.push_back("rqc");
    }
    for (std::size_t i = 0; i < pipelines.size(); ++i) {
        if (pipeline_arm[i] == "baseline") baseline_pipe = &pipelines[i];
    }

    std::ostringstream csv;
    csv << "arm,scenario,epsilon,clean_accuracy,adversarial_accuracy,"
           "attack_success_rate,lipschitz_bound,average_fidelity,"
           "train_seed,rqc_seed,data_seed,n_test\n";
    for (const std::string& arm : arms) {
        const adv::Pipeline* victim = nullptr;
        for (std::size_t i = 0; i < pipelines.size(); ++i) {
            if (pipeline_arm[i] == arm) victim = &pipelines[i];
        }
        // Baseline rows are always whitebox; transfer mints on the baseline
        // and evaluates on the rqc arm.
        const bool transfer = arm == "rqc" && config.scenario == "transfer";
        const adv::Pipeline* attacker = transfer ? baseline_pipe : victim;
        const std::string scenario = transfer ? "transfer" : "whitebox";
        for (double eps : config.epsilon) {
            const adv::RobustnessReport rep = adv::evaluate_robustness(
                *victim, *attacker, rd.test, eps, config.threads);
            csv << arm << ',' << scenario << ',' << fmt_g(eps) << ','
                << fmt_g(rep.clean_accuracy) << ',' << fmt_g(rep.adversarial_accuracy)
                << ',' << fmt_g(rep.attack_success_rate) << ','
                << fmt_g(rep.lipschitz_bound) << ',' << fmt_g(rep.average_fidelity)
                << ',' << config.train_seed << ',' << config.rqc_seed << ','
                << config.data_seed << ',' << rep.n_test << "\n";
        }
    }
    write_text_file(dir / "report.csv", csv.str());
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::string& expect_header) {
    std::ifstream in(path);
    if (!in) throw UsageError("missing file " + path.string() + "; run the producing command first");
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    if (trim(line) != expect_header) {
        throw FormatError(path.string() + ": unexpected header '" + line + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split(trim(line), ','));
        if (rows.back().size() != split(expect_header, ',').size()) {
            throw FormatError(path.string() + ": malformed row '" + line + "'");
        }
    }
    return rows;
}

}  // namespace

void cmd_ablate(const ExperimentConfig& config) {
    const ResolvedData rd = resolve_dataset(config);
    const fs::path dir = prepare_run_dir(config);

    // Lipschitz trajectory per arm, straight from the training histories.
    std::ostringstream lips;
    for (const std::string& arm : {std::string("baseline"), std::string("rqc")}) {
        const auto rows = read_csv(dir / ("history_" + arm + ".csv"),
                                   "epoch,loss,accuracy,lipschitz");
        lips << "# arm=" << arm << "\n";
        for (const auto& row : rows) {
            lips << row[0] << ' ' << row[3] << "\n";
        }
    }
    write_text_file(dir / "ablate_lipschitz.txt", lips.str());

    // Fidelity-vs-epsilon at epoch-1 parameters: retrain one epoch per arm
    // and sweep the attack budget on the test split.
    ExperimentConfig one = config;
    one.epochs = 1;
    std::ostringstream fid;
    for (const std::string& arm : {std::string("baseline"), std::string("rqc")}) {
        const TrainedArm trained = train_arm(one, rd, arm);
        qml::Checkpoint ckpt;
        ckpt.spec = trained.model.spec();
        ckpt.params = trained.result.params;
        const adv::Pipeline pipe = make_pipeline(config, arm, ckpt);
        fid << "# arm=" << arm << "\n";
        for (double eps : config.epsilon) {
            const auto advs = adv::fgsm_batch(pipe, rd.test, eps, config.threads);
            const double f = adv::average_fidelity(pipe, rd.test, advs, config.threads);
            fid << fmt_g(eps) << ' ' << fmt_g(f) << "\n";
        }
    }
    write_text_file(dir / "ablate_fidelity.txt", fid.str());
}

void cmd_report(const ExperimentConfig& config, std::ostream& echo) {
    validate(config);
    const fs::path dir(config.out);
    const auto rows = read_csv(
        dir / "report.csv",
        "arm,scenario,epsilon,clean_accuracy,adversarial_accuracy,"
        "attack_success_rate,lipschitz_bound,average_fidelity,"
        "train_seed,rqc_seed,data_seed,n_test");

    // Group rows by (scenario, epsilon) in first-seen order so both arms of
    // one setting share a block even though report.csv is arm-major.
    std::vector<std::string> keys;
    for (const auto& row : rows) {
        const std::string key = "scenario=" + row[1] + " epsilon=" + row[2];
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }

    std::ostringstream out;
    char buf[160];
    bool first = true;
    for (const std::string& key : keys) {
        if (!first) out << "\n";
        first = false;
        out << "== " << key << " ==\n";
        std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %10s %11s %14s\n",
                      "arm", "clean AA (%)", "adv AA (%)", "ASR (%)",
                      "Lipschitz", "avg fidelity");
        out << buf;
        for (const auto& row : rows) {
            if ("scenario=" + row[1] + " epsilon=" + row[2] != key) continue;
            std::snprintf(buf, sizeof(buf), "%-10s %14.2f %14.2f %10.2f %11.4f %14.4f\n",
                          row[0].c_str(), 100.0 * std::strtod(row[3].c_str(), nullptr),
                          100.0 * std::strtod(row[4].c_str(), nullptr),
                          100.0 * std::strtod(row[5].c_str(), nullptr),
                          std::strtod(row[6].c_str(), nullptr),
                          std::strtod(row[7].c_str(), nullptr));
            out << buf;
        }
    }
    write_text_file(dir / "report.txt", out.str());
    echo << out.str();
}

}  // namespace qpatch::harness
