#ifndef QPATCH_CLASSIFIER_HPP
#define QPATCH_CLASSIFIER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qpatch/circuit.hpp"

namespace qpatch::qml {

// Data-reuploading variational classifier: features are angle-embedded in
// blocks of n_qubits, each block followed by a strongly entangling layer.
// Class scores are Z-expectations of the readout qubits.
struct ClassifierSpec {
    int n_qubits = 4;
    int n_classes = 2;
    int feature_dim = 0;
    int n_blocks = 0;                 // 0 = ceil(feature_dim / n_qubits)
    bool encoding_trainable = true;   // learn per-feature input weights
    std::vector<int> readout_qubits;  // empty = qubits 0..n_classes-1
};

struct ClassifierParams {
    std::vector<double> theta;  // 3 * n_qubits * n_blocks rotation angles
    std::vector<double> w;      // feature_dim encoding weights
};

struct Sample {
    std::vector<double> features;  // values in [0, 1]
    int label = 0;
};

struct Gradient {
    std::vector<double> theta;
    std::vector<double> w;
};

struct BatchEval {
    Gradient grad;     // mean over the batch
    double loss = 0;   // mean cross-entropy, pre-update
    int correct = 0;   // argmax hits
};

class Classifier {
public:
    explicit Classifier(ClassifierSpec spec);

    const ClassifierSpec& spec() const { return spec_; }
    const circuits::CircuitIR& circuit() const { return circuit_; }
    const std::vector<int>& readouts() const { return readouts_; }
    int padded_dim() const { return spec_.n_qubits * spec_.n_blocks; }

    // theta ~ U[-0.1, 0.1) from `seed`, w = 1.
    ClassifierParams init_params(std::uint64_t seed) const;

    std::vector<double> logits(const ClassifierParams& params,
                               std::span<const double> features) const;
    std::vector<double> probabilities(const ClassifierParams& params,
                                      std::span<const double> features) const;
    int predict(const ClassifierParams& params,
                std::span<const double> features) const;

    double loss(const ClassifierParams& params,
                std::span<const Sample> batch) const;

    // Exact parameter-shift gradient of the mean cross-entropy. Samples are
    // differentiated independently (optionally across `threads` workers) and
    // reduced in batch order, so results do not depend on the thread count.
    BatchEval batch_gradient(const ClassifierParams& params,
                             std::span<const Sample> batch,
                             unsigned threads = 1) const;

    // dJ/dx for one labeled input, used to mint adversarial examples.
    std::vector<double> feature_gradient(const ClassifierParams& params,
                                         std::span<const double> features,
                                         int label) const;

    // State after the first embedding layer only (no entangler), used for
    // fidelity measurements between legitimate and perturbed inputs.
    qsim::StateVector embedding_state(const ClassifierParams& params,
                                      std::span<const double> features) const;

private:
    struct SampleEval;
    SampleEval eval_sample(const ClassifierParams& params,
                           std::span<const double> features, int label) const;
    std::vector<double> effective_features(const ClassifierParams& params,
                                           std::span<const double> features) const;
    void check_features(const ClassifierParams& params,
                        std::span<const double> features) const;

    ClassifierSpec spec_;
    std::vector<int> readouts_;
    circuits::CircuitIR circuit_;
    circuits::CircuitIR embed_circuit_;  // first block embedding only
};

std::vector<double> softmax(std::span<const double> logits);

// Cross-entropy of one sample; probabilities are clamped at 1e-12.
double cross_entropy(std::span<const double> probs, int label);

}  // namespace qpatch::qml

#endif  // QPATCH_CLASSIFIER_HPP
