#ifndef QPATCH_STATEVECTOR_HPP
#define QPATCH_STATEVECTOR_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qpatch::qsim {

using cdouble = std::complex<double>;

constexpr int kMinQubits = 1;
constexpr int kMaxQubits = 12;

enum class GateKind {
    X, Y, Z, H, S, T,       // fixed single-qubit gates
    RX, RY, RZ,             // one-angle rotations, exp(-i a sigma / 2)
    Rot,                    // three-angle ZYZ: RZ(a2) * RY(a1) * RZ(a0)
    CNOT, CZ, SWAP          // two-qubit gates
};

// Number of angle parameters the gate kind takes (0, 1 or 3).
int angle_count(GateKind kind);
bool is_two_qubit(GateKind kind);
const char* gate_name(GateKind kind);

// A concrete gate instance. For two-qubit gates `control` is the first
// qubit (the control for CNOT) and `target` the second.
struct Gate {
    GateKind kind = GateKind::X;
    int target = 0;
    int control = -1;
    std::array<double, 3> angles{0.0, 0.0, 0.0};

    static Gate x(int q) { return {GateKind::X, q, -1, {}}; }
    static Gate y(int q) { return {GateKind::Y, q, -1, {}}; }
    static Gate z(int q) { return {GateKind::Z, q, -1, {}}; }
    static Gate h(int q) { return {GateKind::H, q, -1, {}}; }
    static Gate s(int q) { return {GateKind::S, q, -1, {}}; }
    static Gate t(int q) { return {GateKind::T, q, -1, {}}; }
    static Gate rx(int q, double a) { return {GateKind::RX, q, -1, {a, 0, 0}}; }
    static Gate ry(int q, double a) { return {GateKind::RY, q, -1, {a, 0, 0}}; }
    static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, {a, 0, 0}}; }
    static Gate rot(int q, double a0, double a1, double a2) {
        return {GateKind::Rot, q, -1, {a0, a1, a2}};
    }
    static Gate cnot(int c, int t) { return {GateKind::CNOT, t, c, {}}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, b, a, {}}; }
    static Gate swap(int a, int b) { return {GateKind::SWAP, b, a, {}}; }
};

// 2x2 unitary of a single-qubit gate, row-major.
std::array<cdouble, 4> gate_matrix(const Gate& gate);

// Dense amplitude vector over 2^n basis states, little-endian: qubit 0 is
// the least significant bit of the basis index.
class StateVector {
public:
    explicit StateVector(int n_qubits);  // prepares |0...0>

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const cdouble> amplitudes() const { return amps_; }
    cdouble& amp(std::size_t i) { return amps_[i]; }
    const cdouble& amp(std::size_t i) const { return amps_[i]; }

    // In-place gate application; validates qubit indices.
    void apply(const Gate& gate);

    // <Z_qubit>, the +/-1-weighted probability sum over the qubit's bit.
    double expectation_z(int qubit) const;

    double norm_squared() const;

private:
    int n_qubits_;
    std::vector<cdouble> amps_;
};

StateVector init_state(int n_qubits);

// Value-returning form of StateVector::apply.
StateVector apply_gate(const StateVector& state, const Gate& gate);

// |<a|b>|^2 / (<a|a><b|b>) for equally sized registers; exactly 1 when both
// arguments are the same state.
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace qpatch::qsim

#endif  // QPATCH_STATEVECTOR_HPP
