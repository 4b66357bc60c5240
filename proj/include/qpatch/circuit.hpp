#ifndef QPATCH_CIRCUIT_HPP
#define QPATCH_CIRCUIT_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qpatch/statevector.hpp"

namespace qpatch::circuits {

// One angle binding of a gate. Feature slots resolve to pi * scale * x[index]
// so that inputs in [0,1] sweep half the Bloch great circle; trainable slots
// resolve to the raw parameter value.
struct ParamSlot {
    enum class Kind { Constant, Feature, Trainable };
    Kind kind = Kind::Constant;
    double value = 0.0;       // Constant: the angle; Feature: the scale
    std::uint32_t index = 0;  // Feature / Trainable slot index

    static ParamSlot constant(double angle) { return {Kind::Constant, angle, 0}; }
    static ParamSlot feature(std::uint32_t idx, double scale) {
        return {Kind::Feature, scale, idx};
    }
    static ParamSlot trainable(std::uint32_t idx) { return {Kind::Trainable, 0.0, idx}; }
};

struct GateSpec {
    qsim::GateKind kind = qsim::GateKind::X;
    int target = 0;
    int control = -1;
    std::array<ParamSlot, 3> params{};  // first angle_count(kind) entries used
};

// Ordered gate list with parameter slots. Immutable once built up; qubit
// indices are validated on push.
class CircuitIR {
public:
    explicit CircuitIR(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const std::vector<GateSpec>& ops() const { return ops_; }

    void push(const GateSpec& op);
    void append(const CircuitIR& other);  // concatenation, same register width

    // Declared slot bounds (max referenced index + 1).
    std::uint32_t feature_slots() const { return feature_slots_; }
    std::uint32_t trainable_slots() const { return trainable_slots_; }

    // How many gates reference each slot index.
    std::vector<int> feature_usage() const;
    std::vector<int> trainable_usage() const;

private:
    int n_qubits_;
    std::vector<GateSpec> ops_;
    std::uint32_t feature_slots_ = 0;
    std::uint32_t trainable_slots_ = 0;
};

// RY(pi * w_j * x_j) on qubit j for j < n_qubits; one weight per qubit.
CircuitIR angle_embedding(int n_qubits, std::span<const double> weights);

// Per-qubit trainable ZYZ rotations followed by a CNOT ring
// q -> (q+1) mod n. Consumes 3*n_qubits trainable slots starting at
// trainable_offset; a single-qubit register gets the rotation only.
CircuitIR strongly_entangling_block(int n_qubits, std::uint32_t trainable_offset);

// Seeded random circuit: per layer one rotation per qubit with kind drawn
// from {RX, RY, RZ} and angle from [0, 2pi), then one CNOT on a random
// ordered pair. Identical spec always yields an identical circuit.
struct RqcSpec {
    std::uint64_t seed = 0;
    int n_qubits = 4;
    int depth = 4;
};

CircuitIR build_rqc(const RqcSpec& spec);

// Resolves every slot and applies the gates in order to a copy of
// `initial`. Throws UsageError when a slot index is not covered.
qsim::StateVector execute(const CircuitIR& circuit,
                          std::span<const double> features,
                          std::span<const double> trainables,
                          const qsim::StateVector& initial);

// Same as execute, with `delta` added to the resolved angle of the single
// occurrence at (op_index, angle_pos). Used by parameter-shift rules.
struct AngleShift {
    std::size_t op_index = 0;
    int angle_pos = 0;
    double delta = 0.0;
};

qsim::StateVector execute_shifted(const CircuitIR& circuit,
                                  std::span<const double> features,
                                  std::span<const double> trainables,
                                  const qsim::StateVector& initial,
                                  const AngleShift& shift);

// Resolved angle of one op occurrence (no shift applied).
double resolve_angle(const ParamSlot& slot,
                     std::span<const double> features,
                     std::span<const double> trainables);

// Resolves every slot of one op into a concrete gate.
qsim::Gate materialize(const GateSpec& op,
                       std::span<const double> features,
                       std::span<const double> trainables);

// Line-oriented text form, one gate per line under a
// "QPIR v1 n_qubits=<n>" header. Round-trips exactly.
std::string to_qpir(const CircuitIR& circuit);
CircuitIR from_qpir(const std::string& text);

}  // namespace qpatch::circuits

#endif  // QPATCH_CIRCUIT_HPP
