#ifndef QPATCH_TRAIN_HPP
#define QPATCH_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qpatch/classifier.hpp"

namespace qpatch::qml {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 16;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    enum class Optimizer { Sgd, Adam } optimizer = Optimizer::Adam;
    unsigned threads = 1;  // 0 = hardware concurrency
};

struct EpochStats {
    double loss = 0.0;      // mean pre-update batch loss
    double accuracy = 0.0;  // pre-update argmax accuracy
    double lipschitz = 0.0; // bound after the epoch's updates
};

struct TrainResult {
    ClassifierParams params;
    std::vector<EpochStats> history;
};

// Deterministic minibatch training: theta ~ U[-0.1, 0.1) and the per-epoch
// shuffles all derive from config.seed. A non-finite loss aborts with
// TrainingError carrying the epoch index.
TrainResult train(const Classifier& model,
                  std::span<const Sample> dataset,
                  const TrainConfig& config);

TrainResult train_from(const Classifier& model,
                       std::span<const Sample> dataset,
                       const TrainConfig& config,
                       ClassifierParams initial);

// Certified sensitivity of the class scores to the inputs:
// 2 * |M| * sum over encoding occurrences of |pi * scale * w_j| * |H|,
// with |M| = 1 for Z readouts and |H| = 1/2 for rotation generators.
// Bounds |score(x) - score(x')| by L * |x - x'|_2.
double lipschitz_bound(const Classifier& model, const ClassifierParams& params);

// Binary checkpoint (magic QPCK, version 1, little-endian). Stores the
// classifier shape,
// theta wrapped into [0, 2pi), the encoding weights, and the training seed.
struct Checkpoint {
    ClassifierSpec spec;
    ClassifierParams params;
    std::uint64_t train_seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace qpatch::qml

#endif  // QPATCH_TRAIN_HPP
