#include "qpatch/statevector.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qpatch/errors.hpp"

namespace qpatch::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit(int qubit, int n_qubits, const char* what) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw UsageError(std::string(what) + " index " + std::to_string(qubit) +
                         " out of range for " + std::to_string(n_qubits) + " qubits");
    }
}

}  // namespace

int angle_count(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
            return 1;
        case GateKind::Rot:
            return 3;
        default:
            return 0;
    }
}

bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CZ || kind == GateKind::SWAP;
}

const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::T: return "T";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::Rot: return "ROT";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::SWAP: return "SWAP";
    }
    return "?";
}

std::array<cdouble, 4> gate_matrix(const Gate& gate) {
    const cdouble i(0.0, 1.0);
    switch (gate.kind) {
        case GateKind::X:
            return {cdouble(0), cdouble(1), cdouble(1), cdouble(0)};
        case GateKind::Y:
            return {cdouble(0), -i, i, cdouble(0)};
        case GateKind::Z:
            return {cdouble(1), cdouble(0), cdouble(0), cdouble(-1)};
        case GateKind::H:
            return {cdouble(kInvSqrt2), cdouble(kInvSqrt2),
                    cdouble(kInvSqrt2), cdouble(-kInvSqrt2)};
        case GateKind::S:
            return {cdouble(1), cdouble(0), cdouble(0), i};
        case GateKind::T:
            return {cdouble(1), cdouble(0), cdouble(0),
                    cdouble(kInvSqrt2, kInvSqrt2)};
        case GateKind::RX: {
            const double h = 0.5 * gate.angles[0];
            return {cdouble(std::cos(h)), -i * std::sin(h),
                    -i * std::sin(h), cdouble(std::cos(h))};
        }
        case GateKind::RY: {
            const double h = 0.5 * gate.angles[0];
            return {cdouble(std::cos(h)), cdouble(-std::sin(h)),
                    cdouble(std::sin(h)), cdouble(std::cos(h))};
        }
        case GateKind::RZ: {
            const double h = 0.5 * gate.angles[0];
            return {std::exp(-i * h), cdouble(0), cdouble(0), std::exp(i * h)};
        }
        case GateKind::Rot: {
            // RZ(a2) * RY(a1) * RZ(a0), applied to the state in that order.
            const double hz0 = 0.5 * gate.angles[0];
            const double hy = 0.5 * gate.angles[1];
            const double hz2 = 0.5 * gate.angles[2];
            const cdouble em0 = std::exp(-i * hz0), ep0 = std::exp(i * hz0);
            const cdouble em2 = std::exp(-i * hz2), ep2 = std::exp(i * hz2);
            const double c = std::cos(hy), s = std::sin(hy);
            return {em2 * c * em0, em2 * -s * ep0,
                    ep2 * s * em0, ep2 * c * ep0};
        }
        default:
            throw UsageError(std::string("gate_matrix: ") + gate_name(gate.kind) +
                             " is not a single-qubit gate");
    }
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < kMinQubits || n_qubits > kMaxQubits) {
        throw ConfigError("qubit count " + std::to_string(n_qubits) +
                          " outside supported range [" + std::to_string(kMinQubits) +
                          ", " + std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << n_qubits, cdouble(0.0));
    amps_[0] = cdouble(1.0);
}

void StateVector::apply(const Gate& gate) {
    const std::size_t dim = amps_.size();
    if (is_two_qubit(gate.kind)) {
        check_qubit(gate.control, n_qubits_, "control/first qubit");
        check_qubit(gate.target, n_qubits_, "target/second qubit");
        if (gate.control == gate.target) {
            throw UsageError("two-qubit gate needs distinct qubits");
        }
        const std::size_t cbit = std::size_t{1} << gate.control;
        const std::size_t tbit = std::size_t{1} << gate.target;
        switch (gate.kind) {
            case GateKind::CNOT:
                for (std::size_t idx = 0; idx < dim; ++idx) {
                    if ((idx & cbit) && !(idx & tbit)) {
                        std::swap(amps_[idx], amps_[idx | tbit]);
                    }
                }
                return;
            case GateKind::CZ:
                for (std::size_t idx = 0; idx < dim; ++idx) {
                    if ((idx & cbit) && (idx & tbit)) amps_[idx] = -amps_[idx];
                }
                return;
            case GateKind::SWAP:
                for (std::size_t idx = 0; idx < dim; ++idx) {
                    if ((idx & cbit) && !(idx & tbit)) {
                        std::swap(amps_[idx], amps_[(idx & ~cbit) | tbit]);
                    }
                }
                return;
            default:
                break;
        }
    }
    check_qubit(gate.target, n_qubits_, "target qubit");
    const auto u = gate_matrix(gate);
    const std::size_t tbit = std::size_t{1} << gate.target;
    for (std::size_t idx = 0; idx < dim; ++idx) {
        if (idx & tbit) continue;
        const cdouble a0 = amps_[idx];
        const cdouble a1 = amps_[idx | tbit];
        amps_[idx] = u[0] * a0 + u[1] * a1;
        amps_[idx | tbit] = u[2] * a0 + u[3] * a1;
    }
}

double StateVector::expectation_z(int qubit) const {
    check_qubit(qubit, n_qubits_, "qubit");
    const std::size_t bit = std::size_t{1} << qubit;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < amps_.size(); ++idx) {
        const double p = std::norm(amps_[idx]);
        acc += (idx & bit) ? -p : p;
    }
    return acc;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const cdouble& a : amps_) acc += std::norm(a);
    return acc;
}

StateVector init_state(int n_qubits) {
    return StateVector(n_qubits);
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
    StateVector out = state;
    out.apply(gate);
    return out;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw UsageError("fidelity: register sizes differ (" +
                         std::to_string(a.n_qubits()) + " vs " +
                         std::to_string(b.n_qubits()) + ")");
    }
    cdouble overlap(0.0);
    const auto av = a.amplitudes();
    const auto bv = b.amplitudes();
    for (std::size_t idx = 0; idx < av.size(); ++idx) {
        overlap += std::conj(av[idx]) * bv[idx];
    }
    // Normalizing keeps F(psi, psi) at exactly 1 even though simulated
    // states carry rounding of a few ulp in their norms.
    return std::norm(overlap) / (a.norm_squared() * b.norm_squared());
}

}  // namespace qpatch::qsim
