#ifndef QPATCH_GRADIENTS_HPP
#define QPATCH_GRADIENTS_HPP

#include <span>
#include <vector>

#include "qpatch/circuit.hpp"

namespace qpatch::qml {

// Z-expectations of a circuit at one evaluation point together with their
// exact derivatives, obtained by the two-point parameter-shift rule
// g(a +/- pi/2) applied to every non-constant angle occurrence.
struct CircuitGradients {
    std::vector<double> values;                      // <Z_q> per readout qubit
    std::vector<std::vector<double>> wrt_trainable;  // [readout][trainable slot]
    std::vector<std::vector<double>> wrt_feature;    // [readout][feature slot]
};

// Derivatives are with respect to the raw trainable values and the feature
// vector entries (the pi * scale factor of feature angles is folded in).
// Intermediate states are cached so each shifted evaluation replays only
// the circuit suffix.
CircuitGradients circuit_gradients(const circuits::CircuitIR& circuit,
                                   std::span<const double> features,
                                   std::span<const double> trainables,
                                   std::span<const int> readout_qubits,
                                   const qsim::StateVector& initial);

}  // namespace qpatch::qml

#endif  // QPATCH_GRADIENTS_HPP
