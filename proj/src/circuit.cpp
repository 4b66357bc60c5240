#include "qpatch/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "qpatch/errors.hpp"
#include "qpatch/rng.hpp"

namespace qpatch::circuits {

namespace {

constexpr double kPi = 3.14159265358979323846;

double resolved(const ParamSlot& slot,
                std::span<const double> features,
                std::span<const double> trainables,
                std::size_t op_index) {
    switch (slot.kind) {
        case ParamSlot::Kind::Constant:
            return slot.value;
        case ParamSlot::Kind::Feature:
            if (slot.index >= features.size()) {
                throw UsageError("unresolved feature slot " + std::to_string(slot.index) +
                                 " at op " + std::to_string(op_index));
            }
            return kPi * slot.value * features[slot.index];
        case ParamSlot::Kind::Trainable:
            if (slot.index >= trainables.size()) {
                throw UsageError("unresolved trainable slot " + std::to_string(slot.index) +
                                 " at op " + std::to_string(op_index));
            }
            return trainables[slot.index];
    }
    return 0.0;
}

qsim::Gate materialize(const GateSpec& op,
                       std::span<const double> features,
                       std::span<const double> trainables,
                       std::size_t op_index,
                       const AngleShift* shift) {
    qsim::Gate gate;
    gate.kind = op.kind;
    gate.target = op.target;
    gate.control = op.control;
    const int n_angles = qsim::angle_count(op.kind);
    for (int a = 0; a < n_angles; ++a) {
        double angle = resolved(op.params[static_cast<std::size_t>(a)], features,
                                trainables, op_index);
        if (shift != nullptr && shift->op_index == op_index && shift->angle_pos == a) {
            angle += shift->delta;
        }
        gate.angles[static_cast<std::size_t>(a)] = angle;
    }
    return gate;
}

}  // namespace

CircuitIR::CircuitIR(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < qsim::kMinQubits || n_qubits > qsim::kMaxQubits) {
        throw ConfigError("circuit qubit count " + std::to_string(n_qubits) +
                          " outside supported range");
    }
}

void CircuitIR::push(const GateSpec& op) {
    auto in_range = [this](int q) { return q >= 0 && q < n_qubits_; };
    if (!in_range(op.target)) {
        throw UsageError("gate target " + std::to_string(op.target) + " out of range");
    }
    if (qsim::is_two_qubit(op.kind)) {
        if (!in_range(op.control)) {
            throw UsageError("gate control " + std::to_string(op.control) + " out of range");
        }
        if (op.control == op.target) {
            throw UsageError("two-qubit gate needs distinct qubits");
        }
    }
    const int n_angles = qsim::angle_count(op.kind);
    for (int a = 0; a < n_angles; ++a) {
        const ParamSlot& slot = op.params[static_cast<std::size_t>(a)];
        if (slot.kind == ParamSlot::Kind::Feature && slot.index + 1 > feature_slots_) {
            feature_slots_ = slot.index + 1;
        }
        if (slot.kind == ParamSlot::Kind::Trainable && slot.index + 1 > trainable_slots_) {
            trainable_slots_ = slot.index + 1;
        }
    }
    ops_.push_back(op);
}

void CircuitIR::append(const CircuitIR& other) {
    if (other.n_qubits_ != n_qubits_) {
        throw UsageError("cannot append a circuit with a different register width");
    }
    for (const GateSpec& op : other.ops_) push(op);
}

std::vector<int> CircuitIR::feature_usage() const {
    std::vector<int> usage(feature_slots_, 0);
    for (const GateSpec& op : ops_) {
        const int n_angles = qsim::angle_count(op.kind);
        for (int a = 0; a < n_angles; ++a) {
            const ParamSlot& slot = op.params[static_cast<std::size_t>(a)];
            if (slot.kind == ParamSlot::Kind::Feature) ++usage[slot.index];
        }
    }
    return usage;
}

std::vector<int> CircuitIR::trainable_usage() const {
    std::vector<int> usage(trainable_slots_, 0);
    for (const GateSpec& op : ops_) {
        const int n_angles = qsim::angle_count(op.kind);
        for (int a = 0; a < n_angles; ++a) {
            const ParamSlot& slot = op.params[static_cast<std::size_t>(a)];
            if (slot.kind == ParamSlot::Kind::Trainable) ++usage[slot.index];
        }
    }
    return usage;
}

CircuitIR angle_embedding(int n_qubits, std::span<const double> weights) {
    if (static_cast<int>(weights.size()) != n_qubits) {
        throw ConfigError("angle_embedding: got " + std::to_string(weights.size()) +
                          " weights for " + std::to_string(n_qubits) + " qubits");
    }
    CircuitIR circuit(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        GateSpec op;
        op.kind = qsim::GateKind::RY;
        op.target = q;
        op.params[0] = ParamSlot::feature(static_cast<std::uint32_t>(q),
                                          weights[static_cast<std::size_t>(q)]);
        circuit.push(op);
    }
    return circuit;
}

CircuitIR strongly_entangling_block(int n_qubits, std::uint32_t trainable_offset) {
    CircuitIR circuit(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        GateSpec op;
        op.kind = qsim::GateKind::Rot;
        op.target = q;
        const std::uint32_t base = trainable_offset + 3u * static_cast<std::uint32_t>(q);
        op.params[0] = ParamSlot::trainable(base);
        op.params[1] = ParamSlot::trainable(base + 1);
        op.params[2] = ParamSlot::trainable(base + 2);
        circuit.push(op);
    }
    if (n_qubits >= 2) {
        for (int q = 0; q < n_qubits; ++q) {
            GateSpec op;
            op.kind = qsim::GateKind::CNOT;
            op.control = q;
            op.target = (q + 1) % n_qubits;
            circuit.push(op);
        }
    }
    return circuit;
}

CircuitIR build_rqc(const RqcSpec& spec) {
    if (spec.depth < 0) {
        throw ConfigError("rqc depth must be >= 0");
    }
    CircuitIR circuit(spec.n_qubits);
    rng::Engine gen(spec.seed);
    const int n = spec.n_qubits;
    for (int layer = 0; layer < spec.depth; ++layer) {
        // Draw order is fixed: rotation kinds qubit-ascending, then angles,
        // then the entangler pair.
        std::vector<qsim::GateKind> kinds(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) {
            switch (rng::bounded(gen, 3)) {
                case 0: kinds[static_cast<std::size_t>(q)] = qsim::GateKind::RX; break;
                case 1: kinds[static_cast<std::size_t>(q)] = qsim::GateKind::RY; break;
                default: kinds[static_cast<std::size_t>(q)] = qsim::GateKind::RZ; break;
            }
        }
        std::vector<double> angles(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) {
            angles[static_cast<std::size_t>(q)] = rng::range_double(gen, 0.0, 2.0 * kPi);
        }
        for (int q = 0; q < n; ++q) {
            GateSpec op;
            op.kind = kinds[static_cast<std::size_t>(q)];
            op.target = q;
            op.params[0] = ParamSlot::constant(angles[static_cast<std::size_t>(q)]);
            circuit.push(op);
        }
        if (n >= 2) {
            const std::uint64_t pair = rng::bounded(
                gen, static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1));
            const int control = static_cast<int>(pair / static_cast<std::uint64_t>(n - 1));
            int target = static_cast<int>(pair % static_cast<std::uint64_t>(n - 1));
            if (target >= control) ++target;
            GateSpec op;
            op.kind = qsim::GateKind::CNOT;
            op.control = control;
            op.target = target;
            circuit.push(op);
        }
    }
    return circuit;
}

double resolve_angle(const ParamSlot& slot,
                     std::span<const double> features,
                     std::span<const double> trainables) {
    return resolved(slot, features, trainables, 0);
}

qsim::Gate materialize(const GateSpec& op,
                       std::span<const double> features,
                       std::span<const double> trainables) {
    return materialize(op, features, trainables, 0, nullptr);
}

qsim::StateVector execute(const CircuitIR& circuit,
                          std::span<const double> features,
                          std::span<const double> trainables,
                          const qsim::StateVector& initial) {
    return execute_shifted(circuit, features, trainables, initial,
                           AngleShift{static_cast<std::size_t>(-1), 0, 0.0});
}

qsim::StateVector execute_shifted(const CircuitIR& circuit,
                                  std::span<const double> features,
                                  std::span<const double> trainables,
                                  const qsim::StateVector& initial,
                                  const AngleShift& shift) {
    if (initial.n_qubits() != circuit.n_qubits()) {
        throw UsageError("initial state register width does not match circuit");
    }
    qsim::StateVector state = initial;
    const auto& ops = circuit.ops();
    for (std::size_t idx = 0; idx < ops.size(); ++idx) {
        state.apply(materialize(ops[idx], features, trainables, idx, &shift));
    }
    return state;
}

std::string to_qpir(const CircuitIR& circuit) {
    std::ostringstream out;
    out << "QPIR v1 n_qubits=" << circuit.n_qubits() << "\n";
    char buf[64];
    for (const GateSpec& op : circuit.ops()) {
        out << qsim::gate_name(op.kind);
        if (qsim::is_two_qubit(op.kind)) {
            out << ' ' << op.control << ' ' << op.target;
        } else {
            out << ' ' << op.target;
        }
        const int n_angles = qsim::angle_count(op.kind);
        for (int a = 0; a < n_angles; ++a) {
            const ParamSlot& slot = op.params[static_cast<std::size_t>(a)];
            switch (slot.kind) {
                case ParamSlot::Kind::Constant:
                    std::snprintf(buf, sizeof(buf), "%.17g", slot.value);
                    out << " c:" << buf;
                    break;
                case ParamSlot::Kind::Feature:
                    std::snprintf(buf, sizeof(buf), "%.17g", slot.value);
                    out << " f:" << slot.index << ':' << buf;
                    break;
                case ParamSlot::Kind::Trainable:
                    out << " t:" << slot.index;
                    break;
            }
        }
        out << '\n';
    }
    return out.str();
}

namespace {

qsim::GateKind kind_from_name(const std::string& name) {
    for (qsim::GateKind kind : {qsim::GateKind::X, qsim::GateKind::Y, qsim::GateKind::Z,
                                qsim::GateKind::H, qsim::GateKind::S, qsim::GateKind::T,
                                qsim::GateKind::RX, qsim::GateKind::RY, qsim::GateKind::RZ,
                                qsim::GateKind::Rot, qsim::GateKind::CNOT,
                                qsim::GateKind::CZ, qsim::GateKind::SWAP}) {
        if (name == qsim::gate_name(kind)) return kind;
    }
    throw FormatError("qpir: unknown gate kind '" + name + "'");
}

ParamSlot slot_from_token(const std::string& token) {
    if (token.size() < 3 || token[1] != ':') {
        throw FormatError("qpir: malformed slot token '" + token + "'");
    }
    const std::string body = token.substr(2);
    char* end = nullptr;
    if (token[0] == 'c') {
        const double value = std::strtod(body.c_str(), &end);
        if (end == body.c_str() || *end != '\0') {
            throw FormatError("qpir: bad constant '" + token + "'");
        }
        return ParamSlot::constant(value);
    }
    if (token[0] == 't') {
        const unsigned long idx = std::strtoul(body.c_str(), &end, 10);
        if (end == body.c_str() || *end != '\0') {
            throw FormatError("qpir: bad trainable slot '" + token + "'");
        }
        return ParamSlot::trainable(static_cast<std::uint32_t>(idx));
    }
    if (token[0] == 'f') {
        const auto colon = body.find(':');
        if (colon == std::string::npos) {
            throw FormatError("qpir: feature slot needs index and scale: '" + token + "'");
        }
        const std::string idx_str = body.substr(0, colon);
        const std::string scale_str = body.substr(colon + 1);
        const unsigned long idx = std::strtoul(idx_str.c_str(), &end, 10);
        if (end == idx_str.c_str() || *end != '\0') {
            throw FormatError("qpir: bad feature index '" + token + "'");
        }
        const double scale = std::strtod(scale_str.c_str(), &end);
        if (end == scale_str.c_str() || *end != '\0') {
            throw FormatError("qpir: bad feature scale '" + token + "'");
        }
        return ParamSlot::feature(static_cast<std::uint32_t>(idx), scale);
    }
    throw FormatError("qpir: unknown slot tag in '" + token + "'");
}

}  // namespace

CircuitIR from_qpir(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError("qpir: empty input");
    }
    int n_qubits = 0;
    if (std::sscanf(header.c_str(), "QPIR v1 n_qubits=%d", &n_qubits) != 1) {
        throw FormatError("qpir: bad header '" + header + "'");
    }
    CircuitIR circuit(n_qubits);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string name;
        fields >> name;
        GateSpec op;
        op.kind = kind_from_name(name);
        if (qsim::is_two_qubit(op.kind)) {
            if (!(fields >> op.control >> op.target)) {
                throw FormatError("qpir: two qubit indices expected: '" + line + "'");
            }
        } else {
            if (!(fields >> op.target)) {
                throw FormatError("qpir: qubit index expected: '" + line + "'");
            }
        }
        const int n_angles = qsim::angle_count(op.kind);
        for (int a = 0; a < n_angles; ++a) {
            std::string token;
            if (!(fields >> token)) {
                throw FormatError("qpir: missing slot token on '" + line + "'");
            }
            op.params[static_cast<std::size_t>(a)] = slot_from_token(token);
        }
        std::string extra;
        if (fields >> extra) {
            throw FormatError("qpir: trailing token '" + extra + "' on '" + line + "'");
        }
        circuit.push(op);
    }
    return circuit;
}

}  // namespace qpatch::circuits
