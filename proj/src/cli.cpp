#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "qpatch/errors.hpp"
#include "qpatch/harness.hpp"

namespace qpatch::harness {

namespace {

void add_common_flags(CLI::App* sub, std::string& config_path, std::string& seed,
                      std::string& arm, std::string& epsilon, std::string& scenario,
                      std::string& out_dir) {
    sub->add_option("--config", config_path, "experiment config file (key=value)");
    sub->add_option("--seed", seed, "override train_seed");
    sub->add_option("--arm", arm, "baseline|rqc|both");
    sub->add_option("--epsilon", epsilon, "comma-separated attack budgets");
    sub->add_option("--scenario", scenario, "whitebox|transfer");
    sub->add_option("--out", out_dir, "run directory");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"quantum robustness workbench: quanvolution defense vs FGSM"};
    app.name("qpatch");
    app.require_subcommand(1);

    std::string config_path, seed, arm, epsilon, scenario, out_dir;
    for (const char* name : {"preprocess", "train", "attack-eval", "ablate", "report"}) {
        add_common_flags(app.add_subcommand(name), config_path, seed, arm, epsilon,
                         scenario, out_dir);
    }
    app.get_subcommand("preprocess")->description("build the quanvolution cache");
    app.get_subcommand("train")->description("train the selected arms");
    app.get_subcommand("attack-eval")->description("run FGSM and emit report.csv");
    app.get_subcommand("ablate")->description("emit lipschitz/fidelity plot data");
    app.get_subcommand("report")->description("render report.csv as a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        ExperimentConfig config;
        if (!config_path.empty()) config = parse_config_file(config_path);
        CLI::App* sub = app.get_subcommands().front();
        if (sub->count("--seed")) apply_key(config, "train_seed", seed);
        if (sub->count("--arm")) apply_key(config, "arm", arm);
        if (sub->count("--epsilon")) apply_key(config, "epsilon", epsilon);
        if (sub->count("--scenario")) apply_key(config, "scenario", scenario);
        if (sub->count("--out")) apply_key(config, "out", out_dir);

        const std::string& name = sub->get_name();
        if (name == "preprocess") cmd_preprocess(config);
        else if (name == "train") cmd_train(config);
        else if (name == "attack-eval") cmd_attack_eval(config);
        else if (name == "ablate") cmd_ablate(config);
        else cmd_report(config, out);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return 3;
    } catch (const TrainingError& e) {
        err << "training error at epoch " << e.epoch << ": " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qpatch::harness
