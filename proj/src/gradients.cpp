#include "qpatch/gradients.hpp"

#include <cmath>
#include <numbers>

#include "qpatch/errors.hpp"

namespace qpatch::qml {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::vector<double> readout_values(const qsim::StateVector& state,
                                   std::span<const int> readouts) {
    std::vector<double> vals(readouts.size());
    for (std::size_t q = 0; q < readouts.size(); ++q)
        vals[q] = state.expectation_z(readouts[q]);
    return vals;
}

}  // namespace

CircuitGradients circuit_gradients(const circuits::CircuitIR& circuit,
                                   std::span<const double> features,
                                   std::span<const double> trainables,
                                   std::span<const int> readout_qubits,
                                   const qsim::StateVector& initial) {
    const auto& ops = circuit.ops();
    const std::size_t n_ops = ops.size();
    const std::size_t n_read = readout_qubits.size();

    // Materialize every gate once; shifted evaluations reuse these with one
    // angle nudged.
    std::vector<qsim::Gate> gates;
    gates.reserve(n_ops);
    for (const auto& op : ops)
        gates.push_back(circuits::materialize(op, features, trainables));

    // Prefix cache: states_[i] is the state before op i.
    std::vector<qsim::StateVector> prefix;
    prefix.reserve(n_ops + 1);
    prefix.push_back(initial);
    for (std::size_t i = 0; i < n_ops; ++i) {
        qsim::StateVector next = prefix.back();
        next.apply(gates[i]);
        prefix.push_back(std::move(next));
    }

    CircuitGradients out;
    out.values = readout_values(prefix.back(), readout_qubits);
    out.wrt_trainable.assign(n_read,
                             std::vector<double>(circuit.trainable_slots(), 0.0));
    out.wrt_feature.assign(n_read,
                           std::vector<double>(circuit.feature_slots(), 0.0));

    auto shifted_values = [&](std::size_t op_index, int angle_pos,
                              double delta) {
        qsim::StateVector state = prefix[op_index];
        qsim::Gate shifted = gates[op_index];
        shifted.angles[angle_pos] += delta;
        state.apply(shifted);
        for (std::size_t k = op_index + 1; k < n_ops; ++k)
            state.apply(gates[k]);
        return readout_values(state, readout_qubits);
    };

    for (std::size_t i = 0; i < n_ops; ++i) {
        const int n_angles = qsim::angle_count(ops[i].kind);
        for (int a = 0; a < n_angles; ++a) {
            const auto& slot = ops[i].params[a];
            if (slot.kind == circuits::ParamSlot::Kind::Constant) continue;

            const auto plus = shifted_values(i, a, kHalfPi);
            const auto minus = shifted_values(i, a, -kHalfPi);
            for (std::size_t q = 0; q < n_read; ++q) {
                const double d_angle = 0.5 * (plus[q] - minus[q]);
                if (slot.kind == circuits::ParamSlot::Kind::Trainable) {
                    out.wrt_trainable[q][slot.index] += d_angle;
                } else {
                    // angle = pi * scale * features[index]
                    out.wrt_feature[q][slot.index] +=
                        d_angle * std::numbers::pi * slot.value;
                }
            }
        }
    }
    return out;
}

}  // namespace qpatch::qml
