#include "qpatch/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpatch/errors.hpp"
#include "qpatch/gradients.hpp"
#include "qpatch/parallel.hpp"

namespace qpatch::adv {

namespace {

circuits::CircuitIR make_patch_circuit(const circuits::RqcSpec& rqc) {
    const double unit[quanv::kPatchQubits] = {1.0, 1.0, 1.0, 1.0};
    circuits::CircuitIR circuit =
        circuits::angle_embedding(quanv::kPatchQubits, unit);
    circuit.append(circuits::build_rqc(rqc));
    return circuit;
}

// Placeholder for the raw-pixel pipeline; never executed.
circuits::CircuitIR empty_patch_circuit() {
    return circuits::CircuitIR(quanv::kPatchQubits);
}

}  // namespace

Pipeline::Pipeline(qml::Classifier model, qml::ClassifierParams params)
    : patch_circuit_(empty_patch_circuit()),
      model_(std::move(model)),
      params_(std::move(params)) {}

Pipeline::Pipeline(const circuits::RqcSpec& rqc, bool include_original,
                   qml::Classifier model, qml::ClassifierParams params)
    : rqc_(rqc),
      include_original_(include_original),
      patch_circuit_(make_patch_circuit(rqc)),
      model_(std::move(model)),
      params_(std::move(params)) {}

std::vector<double> Pipeline::features(const ImageTensor& image) const {
    const ImageTensor lum = to_luminance(image);
    if (!rqc_) return lum.values;
    const quanv::ChannelStack stack = quanv::quanv_transform(lum, *rqc_);
    return quanv::flatten_features(stack, include_original_);
}

std::vector<double> Pipeline::probabilities(const ImageTensor& image) const {
    return model_.probabilities(params_, features(image));
}

int Pipeline::predict(const ImageTensor& image) const {
    return model_.predict(params_, features(image));
}

qsim::StateVector Pipeline::embedding_state(const ImageTensor& image) const {
    return model_.embedding_state(params_, features(image));
}

ImageTensor Pipeline::input_gradient(const ImageTensor& image, int label) const {
    const ImageTensor lum = to_luminance(image);
    const std::vector<double> feats = features(lum);
    const std::vector<double> d_feat =
        model_.feature_gradient(params_, feats, label);

    ImageTensor grad(lum.height, lum.width, 1);
    if (!rqc_) {
        grad.values = d_feat;
        return grad;
    }

    const int out_w = (lum.width + 1) / 2;
    const int out_h = (lum.height + 1) / 2;
    const std::size_t plane =
        static_cast<std::size_t>(out_h) * static_cast<std::size_t>(out_w);
    const std::size_t quantum_base = include_original_ ? plane : 0;

    const std::vector<quanv::Patch> patches = quanv::extract_patches(lum);
    static constexpr int kReadouts[quanv::kPatchQubits] = {0, 1, 2, 3};
    const qsim::StateVector ground(quanv::kPatchQubits);

    for (const quanv::Patch& patch : patches) {
        const std::size_t cell = static_cast<std::size_t>(patch.row) *
                                     static_cast<std::size_t>(out_w) +
                                 static_cast<std::size_t>(patch.col);
        // d z_q / d pixel_k for the four qubits of this window.
        const qml::CircuitGradients cg = qml::circuit_gradients(
            patch_circuit_, patch.pixels, {}, kReadouts, ground);

        for (int k = 0; k < 4; ++k) {
            const int y = 2 * patch.row + k / 2;
            const int x = 2 * patch.col + k % 2;
            if (y >= lum.height || x >= lum.width) continue;  // padding
            double d = 0.0;
            if (include_original_) {
                d += d_feat[cell] * 0.25;  // mean pool
            }
            for (int q = 0; q < quanv::kPatchQubits; ++q) {
                const std::size_t fi =
                    quantum_base + static_cast<std::size_t>(q) * plane + cell;
                // feature = (z + 1) / 2
                d += d_feat[fi] * 0.5 *
                     cg.wrt_feature[static_cast<std::size_t>(q)]
                                   [static_cast<std::size_t>(k)];
            }
            grad.at(0, y, x) = d;
        }
    }
    return grad;
}

ImageTensor fgsm(const Pipeline& attacker, const ImageTensor& image, int label,
                 double epsilon) {
    if (epsilon < 0.0 || !std::isfinite(epsilon)) {
        throw UsageError("fgsm: epsilon must be finite and >= 0");
    }
    const ImageTensor lum = to_luminance(image);
    const ImageTensor grad = attacker.input_gradient(lum, label);
    ImageTensor adv = lum;
    for (std::size_t i = 0; i < adv.values.size(); ++i) {
        const double g = grad.values[i];
        const double sign = (g > 0.0) ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
        adv.values[i] = std::clamp(adv.values[i] + epsilon * sign, 0.0, 1.0);
    }
    return adv;
}

std::vector<ImageTensor> fgsm_batch(const Pipeline& attacker,
                                    std::span<const EvalCase> cases,
                                    double epsilon, unsigned threads) {
    std::vector<ImageTensor> out(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        out[i] = fgsm(attacker, cases[i].image, cases[i].label, epsilon);
    });
    return out;
}

PairedCounts paired_counts(const Pipeline& victim, std::span<const EvalCase> cases,
                           std::span<const ImageTensor> adversarial,
                           unsigned threads) {
    if (cases.size() != adversarial.size()) {
        throw UsageError("paired_counts: case/adversarial size mismatch");
    }
    std::vector<std::pair<bool, bool>> hits(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        hits[i] = {victim.predict(cases[i].image) == cases[i].label,
                   victim.predict(adversarial[i]) == cases[i].label};
    });
    PairedCounts counts;
    counts.n = static_cast<int>(cases.size());
    for (const auto& [clean_ok, adv_ok] : hits) {
        if (clean_ok && adv_ok) ++counts.clean_ok_adv_ok;
        else if (clean_ok) ++counts.clean_ok_adv_bad;
        else if (adv_ok) ++counts.clean_bad_adv_ok;
        else ++counts.clean_bad_adv_bad;
    }
    return counts;
}

double clean_accuracy(const PairedCounts& counts) {
    if (counts.n == 0) throw UsageError("accuracy over an empty test set");
    return static_cast<double>(counts.clean_correct()) / counts.n;
}

double adversarial_accuracy(const PairedCounts& counts) {
    if (counts.n == 0) throw UsageError("accuracy over an empty test set");
    return static_cast<double>(counts.adv_correct()) / counts.n;
}

double attack_success_rate(const PairedCounts& counts) {
    const int base = counts.clean_correct();
    if (base == 0) {
        throw UsageError("attack_success_rate: no cleanly-correct samples");
    }
    return static_cast<double>(counts.clean_ok_adv_bad) / base;
}

double lipschitz_bound(const Pipeline& pipeline) {
    return qml::lipschitz_bound(pipeline.model(), pipeline.params());
}

double average_fidelity(const Pipeline& victim, std::span<const EvalCase> cases,
                        std::span<const ImageTensor> adversarial,
                        unsigned threads) {
    if (cases.size() != adversarial.size()) {
        throw UsageError("average_fidelity: case/adversarial size mismatch");
    }
    if (cases.empty()) throw UsageError("average_fidelity: empty test set");
    std::vector<double> overlaps(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        overlaps[i] = qsim::fidelity(victim.embedding_state(cases[i].image),
                                     victim.embedding_state(adversarial[i]));
    });
    double total = 0.0;
    for (double f : overlaps) total += f;
    return total / static_cast<double>(cases.size());
}

RobustnessReport evaluate_robustness(const Pipeline& victim,
                                     const Pipeline& attacker,
                                     std::span<const EvalCase> cases,
                                     double epsilon, unsigned threads) {
    const std::vector<ImageTensor> adversarial =
        fgsm_batch(attacker, cases, epsilon, threads);
    const PairedCounts counts = paired_counts(victim, cases, adversarial, threads);

    RobustnessReport report;
    report.epsilon = epsilon;
    report.n_test = counts.n;
    report.clean_accuracy = clean_accuracy(counts);
    report.adversarial_accuracy = adversarial_accuracy(counts);
    report.attack_success_rate = attack_success_rate(counts);
    report.lipschitz_bound = lipschitz_bound(victim);
    report.average_fidelity = average_fidelity(victim, cases, adversarial, threads);
    return report;
}

}  // namespace qpatch::adv
