#ifndef QPATCH_HARNESS_HPP
#define QPATCH_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpatch/adversarial.hpp"

namespace qpatch::harness {

// Flat key=value experiment description. File values override the defaults
// below; command-line flags override the file.
struct ExperimentConfig {
    // data
    std::string dataset = "plus-minus";  // plus-minus | digits | idx | cifar
    std::string train_images;            // idx pixel / label paths
    std::string train_labels;
    std::string test_images;
    std::string test_labels;
    std::string cifar_batch;
    std::uint64_t data_seed = 1;
    int train_count = 200;
    int test_count = 100;
    int class_a = -1;  // -1 = keep all classes
    int class_b = -1;
    int downsample = 1;

    // classifier
    int n_qubits = 4;
    int n_classes = 2;
    bool encoding_trainable = true;

    // training
    int epochs = 50;
    int batch_size = 16;
    double learning_rate = 0.01;
    std::string optimizer = "adam";  // adam | sgd
    std::uint64_t train_seed = 7;
    unsigned threads = 0;  // 0 = hardware concurrency

    // quanvolution front end
    std::uint64_t rqc_seed = 11;
    int rqc_depth = 4;
    bool include_original = true;

    // attack
    std::vector<double> epsilon{0.1};
    std::string scenario = "whitebox";  // whitebox | transfer
    std::string arm = "both";           // baseline | rqc | both

    std::string out = "runs/default";
};

// Applies one key=value pair; unknown keys or unparsable values raise
// ConfigError.
void apply_key(ExperimentConfig& config, const std::string& key,
               const std::string& value);

// Reads a flat key=value file ('#' starts a comment) on top of defaults.
ExperimentConfig parse_config_file(const std::string& path);

// Cross-field checks shared by every command.
void validate(const ExperimentConfig& config);

struct ResolvedData {
    std::vector<adv::EvalCase> train;
    std::vector<adv::EvalCase> test;
};

// Deterministic dataset pipeline: load or generate, optional binary class
// subset, seeded shuffle, split, downsample.
ResolvedData resolve_dataset(const ExperimentConfig& config);

void cmd_preprocess(const ExperimentConfig& config);
void cmd_train(const ExperimentConfig& config);
void cmd_attack_eval(const ExperimentConfig& config);
void cmd_ablate(const ExperimentConfig& config);
void cmd_report(const ExperimentConfig& config, std::ostream& echo);

// Full CLI: subcommands preprocess/train/attack-eval/ablate/report with
// --config/--seed/--arm/--epsilon/--scenario/--out flags. Returns the
// process exit code (0 ok, 2 usage/config, 3 format, 4 training, 1 other).
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace qpatch::harness

#endif  // QPATCH_HARNESS_HPP
