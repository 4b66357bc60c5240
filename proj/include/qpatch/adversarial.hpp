#ifndef QPATCH_ADVERSARIAL_HPP
#define QPATCH_ADVERSARIAL_HPP

#include <optional>
#include <span>
#include <vector>

#include "qpatch/classifier.hpp"
#include "qpatch/image.hpp"
#include "qpatch/quanvolution.hpp"
#include "qpatch/train.hpp"

namespace qpatch::adv {

// A full image classifier under attack: optional quanvolution front end
// feeding the variational model. Gradients with respect to raw pixels run
// through both stages, so FGSM sees the same function the victim evaluates.
class Pipeline {
public:
    // Raw-pixel pipeline.
    Pipeline(qml::Classifier model, qml::ClassifierParams params);
    // Quanvolution pipeline.
    Pipeline(const circuits::RqcSpec& rqc, bool include_original,
             qml::Classifier model, qml::ClassifierParams params);

    const qml::Classifier& model() const { return model_; }
    const qml::ClassifierParams& params() const { return params_; }
    bool has_quanv() const { return rqc_.has_value(); }

    std::vector<double> features(const ImageTensor& image) const;
    std::vector<double> probabilities(const ImageTensor& image) const;
    int predict(const ImageTensor& image) const;

    // dJ/d(pixel) of the cross-entropy at `label`; padded pixels of the
    // quanvolution grid receive no contribution.
    ImageTensor input_gradient(const ImageTensor& image, int label) const;

    // First-block embedding state of the classifier inputs, the reference
    // point for fidelity between legitimate and perturbed samples.
    qsim::StateVector embedding_state(const ImageTensor& image) const;

private:
    std::optional<circuits::RqcSpec> rqc_;
    bool include_original_ = true;
    circuits::CircuitIR patch_circuit_;  // embedding + RQC, 4 qubits
    qml::Classifier model_;
    qml::ClassifierParams params_;
};

struct EvalCase {
    ImageTensor image;  // single channel, values in [0,1]
    int label = 0;
};

// x' = clip_[0,1](x + epsilon * sign(dJ/dx)), sign(0) = 0.
ImageTensor fgsm(const Pipeline& attacker, const ImageTensor& image, int label,
                 double epsilon);

std::vector<ImageTensor> fgsm_batch(const Pipeline& attacker,
                                    std::span<const EvalCase> cases,
                                    double epsilon, unsigned threads = 1);

// Joint clean/adversarial outcome counts; the four cells partition the set.
struct PairedCounts {
    int n = 0;
    int clean_ok_adv_ok = 0;
    int clean_ok_adv_bad = 0;
    int clean_bad_adv_ok = 0;
    int clean_bad_adv_bad = 0;

    int clean_correct() const { return clean_ok_adv_ok + clean_ok_adv_bad; }
    int adv_correct() const { return clean_ok_adv_ok + clean_bad_adv_ok; }
};

PairedCounts paired_counts(const Pipeline& victim, std::span<const EvalCase> cases,
                           std::span<const ImageTensor> adversarial,
                           unsigned threads = 1);

double clean_accuracy(const PairedCounts& counts);
double adversarial_accuracy(const PairedCounts& counts);

// Fraction of clean-correct samples the attack flips. Throws UsageError when
// nothing was classified correctly to begin with.
double attack_success_rate(const PairedCounts& counts);

double lipschitz_bound(const Pipeline& pipeline);

// Mean squared overlap between the embedding states of each legitimate
// sample and its adversarial counterpart.
double average_fidelity(const Pipeline& victim, std::span<const EvalCase> cases,
                        std::span<const ImageTensor> adversarial,
                        unsigned threads = 1);

struct RobustnessReport {
    double epsilon = 0.0;
    double clean_accuracy = 0.0;
    double adversarial_accuracy = 0.0;
    double attack_success_rate = 0.0;
    double lipschitz_bound = 0.0;
    double average_fidelity = 0.0;
    int n_test = 0;
};

// Mints FGSM samples on `attacker` and scores them on `victim`. Passing the
// same pipeline twice is the whitebox setting; distinct pipelines give the
// transfer setting.
RobustnessReport evaluate_robustness(const Pipeline& victim,
                                     const Pipeline& attacker,
                                     std::span<const EvalCase> cases,
                                     double epsilon, unsigned threads = 1);

}  // namespace qpatch::adv

#endif  // QPATCH_ADVERSARIAL_HPP
