#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qpatch/errors.hpp"
#include "qpatch/train.hpp"

using namespace qpatch;
using qml::Checkpoint;
using qml::Classifier;
using qml::ClassifierParams;
using qml::ClassifierSpec;
using qml::Sample;
using qml::TrainConfig;
using qml::TrainResult;

namespace fs = std::filesystem;

namespace {

ClassifierSpec toy_spec() {
    ClassifierSpec spec;
    spec.n_qubits = 2;
    spec.n_classes = 2;
    spec.feature_dim = 2;
    return spec;
}

// Two tight clusters at opposite corners of the unit square.
std::vector<Sample> separable_toy(int n) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        const double base = label == 0 ? 0.1 : 0.9;
        out.push_back(Sample{{base + jitter(gen), base + jitter(gen)}, label});
    }
    return out;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("qpatch_train_" + name);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("training is bit-deterministic in the seed") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(12);
    TrainConfig config;
    config.epochs = 4;
    config.batch_size = 5;
    config.seed = 42;

    const TrainResult a = qml::train(model, ds, config);
    const TrainResult b = qml::train(model, ds, config);
    CHECK(a.params.theta == b.params.theta);
    CHECK(a.params.w == b.params.w);
    REQUIRE(a.history.size() == 4);
    for (std::size_t e = 0; e < 4; ++e) {
        CHECK(a.history[e].loss == b.history[e].loss);
        CHECK(a.history[e].accuracy == b.history[e].accuracy);
        CHECK(a.history[e].lipschitz == b.history[e].lipschitz);
    }

    config.seed = 43;
    const TrainResult c = qml::train(model, ds, config);
    CHECK(a.params.theta != c.params.theta);
}

TEST_CASE("the separable toy problem is learned") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(20);
    TrainConfig config;
    config.epochs = 40;
    config.batch_size = 4;
    config.learning_rate = 0.05;
    config.seed = 7;

    const TrainResult result = qml::train(model, ds, config);
    REQUIRE(result.history.size() == 40);
    CHECK(result.history.back().loss < result.history.front().loss);
    CHECK(result.history.back().accuracy >= 0.9);
    for (const qml::EpochStats& stats : result.history) {
        CHECK(stats.accuracy >= 0.0);
        CHECK(stats.accuracy <= 1.0);
        CHECK(stats.loss >= 0.0);
        CHECK(stats.lipschitz > 0.0);
        CHECK(std::isfinite(stats.lipschitz));
    }
}

TEST_CASE("SGD also makes progress and differs from Adam") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(16);
    TrainConfig config;
    config.epochs = 15;
    config.batch_size = 4;
    config.learning_rate = 0.2;
    config.seed = 3;
    config.optimizer = TrainConfig::Optimizer::Sgd;
    const TrainResult sgd = qml::train(model, ds, config);
    CHECK(sgd.history.back().loss < sgd.history.front().loss);

    config.optimizer = TrainConfig::Optimizer::Adam;
    config.learning_rate = 0.05;
    const TrainResult adam = qml::train(model, ds, config);
    CHECK(adam.params.theta != sgd.params.theta);
}

TEST_CASE("frozen encoding weights stay at their initial values") {
    ClassifierSpec spec = toy_spec();
    spec.encoding_trainable = false;
    const Classifier model(spec);
    const std::vector<Sample> ds = separable_toy(8);
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 4;
    config.seed = 11;

    const TrainResult result = qml::train(model, ds, config);
    CHECK(result.params.w == std::vector<double>{1.0, 1.0});
    // theta still moves
    CHECK(result.params.theta != model.init_params(11).theta);
}

TEST_CASE("train_from resumes from explicit parameters") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(8);
    TrainConfig config;
    config.epochs = 1;
    config.batch_size = 8;
    config.seed = 0;

    ClassifierParams start = model.init_params(123);
    start.w = {0.7, 1.3};
    const TrainResult result = qml::train_from(model, ds, config, start);
    REQUIRE(result.history.size() == 1);
    CHECK(result.params.w != start.w);  // one Adam step moved them
}

TEST_CASE("config and dataset validation") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(8);
    TrainConfig config;

    TrainConfig bad = config;
    bad.epochs = 0;
    CHECK_THROWS_AS(qml::train(model, ds, bad), ConfigError);
    bad = config;
    bad.batch_size = 0;
    CHECK_THROWS_AS(qml::train(model, ds, bad), ConfigError);
    bad = config;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(qml::train(model, ds, bad), ConfigError);
    bad.learning_rate = -0.5;
    CHECK_THROWS_AS(qml::train(model, ds, bad), ConfigError);
    bad.learning_rate = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(qml::train(model, ds, bad), ConfigError);

    CHECK_THROWS_AS(qml::train(model, std::vector<Sample>{}, config), UsageError);

    std::vector<Sample> mislabeled = ds;
    mislabeled[3].label = 5;
    CHECK_THROWS_AS(qml::train(model, mislabeled, config), UsageError);
}

TEST_CASE("a corrupt sample aborts with the failing epoch index") {
    const Classifier model(toy_spec());
    std::vector<Sample> ds = separable_toy(8);
    ds[2].features[0] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 8;

    try {
        qml::train(model, ds, config);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch == 0);
        CHECK(std::string(e.what()).find("loss") != std::string::npos);
    }
}

TEST_CASE("diverged encoding weights abort with TrainingError") {
    const Classifier model(toy_spec());
    const std::vector<Sample> ds = separable_toy(8);
    TrainConfig config;
    config.epochs = 2;
    config.batch_size = 8;

    ClassifierParams start = model.init_params(0);
    start.w = {1e308, 1e308};  // lipschitz bound overflows
    try {
        qml::train_from(model, ds, config, start);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch == 0);
    }
}

TEST_CASE("lipschitz bound closed forms") {
    SUBCASE("single qubit, single feature, unit weight is exactly pi") {
        ClassifierSpec spec;
        spec.n_qubits = 1;
        spec.n_classes = 1;
        spec.feature_dim = 1;
        const Classifier model(spec);
        ClassifierParams params = model.init_params(0);
        CHECK(qml::lipschitz_bound(model, params) == std::numbers::pi);

        params.w = {0.0};
        CHECK(qml::lipschitz_bound(model, params) == 0.0);

        params.w = {-2.0};
        CHECK(qml::lipschitz_bound(model, params) ==
              doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
    }
    SUBCASE("every encoding occurrence contributes, padded slots do not") {
        ClassifierSpec spec;
        spec.n_qubits = 2;
        spec.n_classes = 2;
        spec.feature_dim = 3;  // two blocks, one padded slot
        const Classifier model(spec);
        const ClassifierParams params = model.init_params(0);  // w = 1
        CHECK(qml::lipschitz_bound(model, params) ==
              doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-15));
    }
    SUBCASE("weight length is validated") {
        const Classifier model(toy_spec());
        ClassifierParams params = model.init_params(0);
        params.w.pop_back();
        CHECK_THROWS_AS(qml::lipschitz_bound(model, params), UsageError);
    }
}

TEST_CASE("checkpoints round-trip bit-exactly for in-range angles") {
    Checkpoint ckpt;
    ckpt.spec = toy_spec();
    ckpt.spec.readout_qubits = {1, 0};
    ckpt.params.theta = {0.0, 1.5, 3.14, 6.28, 0.001, 2.0};
    ckpt.params.w = {0.25, -1.75};
    ckpt.train_seed = 20260815;

    const fs::path path = temp_file("roundtrip.qpck");
    qml::save_checkpoint(path.string(), ckpt);
    const Checkpoint loaded = qml::load_checkpoint(path.string());

    CHECK(loaded.spec.n_qubits == 2);
    CHECK(loaded.spec.n_blocks == ckpt.spec.n_blocks);
    CHECK(loaded.spec.n_classes == 2);
    CHECK(loaded.spec.feature_dim == 2);
    CHECK(loaded.spec.encoding_trainable == true);
    CHECK(loaded.spec.readout_qubits == std::vector<int>{1, 0});
    CHECK(loaded.params.theta == ckpt.params.theta);
    CHECK(loaded.params.w == ckpt.params.w);
    CHECK(loaded.train_seed == 20260815);

    SUBCASE("writes are byte-deterministic") {
        const fs::path again = temp_file("roundtrip2.qpck");
        qml::save_checkpoint(again.string(), ckpt);
        CHECK(slurp(path) == slurp(again));
        fs::remove(again);
    }
    fs::remove(path);
}

TEST_CASE("out-of-range angles are stored wrapped into [0, 2pi)") {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Checkpoint ckpt;
    ckpt.spec = toy_spec();
    ckpt.params.theta = {-0.5, 7.0, -13.2, 100.0, 0.0, 1.0};
    ckpt.params.w = {1.0, 1.0};

    const fs::path path = temp_file("wrap.qpck");
    qml::save_checkpoint(path.string(), ckpt);
    const Checkpoint loaded = qml::load_checkpoint(path.string());
    REQUIRE(loaded.params.theta.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        double expect = std::fmod(ckpt.params.theta[i], two_pi);
        if (expect < 0.0) expect += two_pi;
        CHECK(loaded.params.theta[i] == expect);
        CHECK(loaded.params.theta[i] >= 0.0);
        CHECK(loaded.params.theta[i] < two_pi);
    }

    // Wrapping only changes rotations by full turns: class scores survive.
    const Classifier model(toy_spec());
    const std::vector<double> x{0.3, 0.6};
    const std::vector<double> before = model.probabilities(ckpt.params, x);
    const std::vector<double> after = model.probabilities(loaded.params, x);
    for (std::size_t c = 0; c < before.size(); ++c) {
        CHECK(before[c] == doctest::Approx(after[c]).epsilon(1e-12));
    }
    fs::remove(path);
}

TEST_CASE("checkpoint loader rejects damaged files") {
    Checkpoint ckpt;
    ckpt.spec = toy_spec();
    ckpt.params.theta = std::vector<double>(6, 1.0);
    ckpt.params.w = {1.0, 1.0};
    const fs::path path = temp_file("damage.qpck");
    qml::save_checkpoint(path.string(), ckpt);
    const std::string good = slurp(path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(qml::load_checkpoint(temp_file("absent.qpck").string()),
                        FormatError);
    }
    SUBCASE("bad magic") {
        std::string bytes = good;
        bytes[0] = 'Z';
        spit(path, bytes);
        CHECK_THROWS_AS(qml::load_checkpoint(path.string()), FormatError);
    }
    SUBCASE("unsupported version") {
        std::string bytes = good;
        bytes[4] = 9;
        spit(path, bytes);
        CHECK_THROWS_AS(qml::load_checkpoint(path.string()), FormatError);
    }
    SUBCASE("truncated tail") {
        spit(path, good.substr(0, good.size() - 4));
        CHECK_THROWS_AS(qml::load_checkpoint(path.string()), FormatError);
    }
    SUBCASE("truncated header") {
        spit(path, good.substr(0, 9));
        CHECK_THROWS_AS(qml::load_checkpoint(path.string()), FormatError);
    }
    fs::remove(path);
}
