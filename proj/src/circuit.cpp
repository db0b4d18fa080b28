// Copyright 2026 The tecsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tecsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace tecsim {

namespace {

struct KindInfo {
    GateKind kind;
    std::string_view name;
    int arity;
    bool unitary;
};

constexpr KindInfo kKinds[] = {
    {GateKind::H, "H", 1, true},           {GateKind::X, "X", 1, true},
    {GateKind::Y, "Y", 1, true},           {GateKind::Z, "Z", 1, true},
    {GateKind::S, "S", 1, true},           {GateKind::T, "T", 1, true},
    {GateKind::Ry, "Ry", 1, true},         {GateKind::Cnot, "CNOT", 2, true},
    {GateKind::Cz, "CZ", 2, true},         {GateKind::Swap, "SWAP", 2, true},
    {GateKind::Toffoli, "Toffoli", 3, true}, {GateKind::Measure, "Measure", 1, false},
    {GateKind::Reset, "Reset", 1, false},  {GateKind::Marker, "Marker", -1, false},
};

const KindInfo& info(GateKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw std::logic_error("unknown GateKind");
}

}  // namespace

std::string_view kind_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> kind_from_name(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) return k.kind;
    }
    return std::nullopt;
}

int kind_arity(GateKind kind) { return info(kind).arity; }
bool kind_is_unitary(GateKind kind) { return info(kind).unitary; }

bool GateOp::touches(int qubit) const {
    return std::find(qubits.begin(), qubits.end(), qubit) != qubits.end();
}

GateOp make_gate(GateKind kind, std::vector<int> qubits) {
    GateOp op;
    op.kind = kind;
    op.qubits = std::move(qubits);
    return op;
}

GateOp make_ry(double theta, int qubit) {
    GateOp op = make_gate(GateKind::Ry, {qubit});
    op.theta = theta;
    return op;
}

GateOp make_measure(int qubit, int cbit) {
    GateOp op = make_gate(GateKind::Measure, {qubit});
    op.cbit = cbit;
    return op;
}

GateOp make_marker(std::string label, std::vector<int> qubits) {
    GateOp op = make_gate(GateKind::Marker, std::move(qubits));
    op.label = std::move(label);
    return op;
}

Circuit::Circuit(int num_qubits, int num_cbits)
    : num_qubits_(num_qubits), num_cbits_(num_cbits) {
    if (num_qubits < 1) throw std::invalid_argument("Circuit: num_qubits must be >= 1");
    if (num_cbits < 0) throw std::invalid_argument("Circuit: num_cbits must be >= 0");
}

Circuit& Circuit::append(GateOp op) {
    const int arity = kind_arity(op.kind);
    if (arity >= 0 && static_cast<int>(op.qubits.size()) != arity) {
        throw std::invalid_argument(std::string(kind_name(op.kind)) + ": expected " +
                                    std::to_string(arity) + " qubits, got " +
                                    std::to_string(op.qubits.size()));
    }
    if (op.kind == GateKind::Marker && op.qubits.empty()) {
        throw std::invalid_argument("Marker: qubit list must be non-empty");
    }
    std::set<int> seen;
    for (int q : op.qubits) {
        if (q < 0 || q >= num_qubits_) {
            throw std::invalid_argument(std::string(kind_name(op.kind)) + ": qubit " +
                                        std::to_string(q) + " out of range");
        }
        if (!seen.insert(q).second) {
            throw std::invalid_argument(std::string(kind_name(op.kind)) +
                                        ": duplicate qubit " + std::to_string(q));
        }
    }
    if (op.kind == GateKind::Ry && !std::isfinite(op.theta)) {
        throw std::invalid_argument("Ry: theta must be finite");
    }
    if (op.kind == GateKind::Measure) {
        if (op.cbit < 0 || op.cbit >= num_cbits_) {
            throw std::invalid_argument("Measure: cbit " + std::to_string(op.cbit) +
                                        " out of range");
        }
        for (const auto& prev : ops_) {
            if (prev.kind == GateKind::Measure && prev.cbit == op.cbit) {
                throw std::invalid_argument("Measure: cbit " + std::to_string(op.cbit) +
                                            " already written (single-assignment)");
            }
        }
    }
    if (op.kind == GateKind::Marker) {
        if (find_marker(op.label)) {
            throw std::invalid_argument("Marker: duplicate label '" + op.label + "'");
        }
    }
    ops_.push_back(std::move(op));
    return *this;
}

Circuit& Circuit::append_fragment(const Circuit& fragment, std::span<const int> qubit_map,
                                  int cbit_offset) {
    if (qubit_map.size() != static_cast<size_t>(fragment.num_qubits())) {
        throw std::invalid_argument("append_fragment: qubit_map size mismatch");
    }
    for (const GateOp& op : fragment.ops()) {
        GateOp mapped = op;
        for (auto& q : mapped.qubits) q = qubit_map[q];
        if (mapped.kind == GateKind::Measure) mapped.cbit += cbit_offset;
        append(std::move(mapped));
    }
    return *this;
}

std::optional<size_t> Circuit::find_marker(std::string_view label) const {
    for (size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].kind == GateKind::Marker && ops_[i].label == label) return i;
    }
    return std::nullopt;
}

bool Circuit::has_measurement() const {
    return std::any_of(ops_.begin(), ops_.end(),
                       [](const GateOp& op) { return op.kind == GateKind::Measure; });
}

bool Circuit::has_reset() const {
    return std::any_of(ops_.begin(), ops_.end(),
                       [](const GateOp& op) { return op.kind == GateKind::Reset; });
}

bool Circuit::same_ops(const Circuit& other) const {
    if (num_qubits_ != other.num_qubits_ || num_cbits_ != other.num_cbits_ ||
        ops_.size() != other.ops_.size()) {
        return false;
    }
    for (size_t i = 0; i < ops_.size(); ++i) {
        const GateOp& a = ops_[i];
        const GateOp& b = other.ops_[i];
        if (a.kind != b.kind || a.qubits != b.qubits || a.cbit != b.cbit ||
            a.label != b.label) {
            return false;
        }
        if (a.kind == GateKind::Ry && a.theta != b.theta) return false;
    }
    return true;
}

namespace {

void apply_unitary_op(StateVector& state, const GateOp& op) {
    switch (op.kind) {
        case GateKind::H: state.apply_gate1(gates::h(), op.qubits[0]); break;
        case GateKind::X: state.apply_x(op.qubits[0]); break;
        case GateKind::Y: state.apply_gate1(gates::y(), op.qubits[0]); break;
        case GateKind::Z: state.apply_z(op.qubits[0]); break;
        case GateKind::S: state.apply_phase(op.qubits[0], Amplitude(0, 1)); break;
        case GateKind::T:
            state.apply_phase(op.qubits[0], Amplitude(0.7071067811865475244008443621,
                                                      0.7071067811865475244008443621));
            break;
        case GateKind::Ry: state.apply_gate1(gates::ry(op.theta), op.qubits[0]); break;
        case GateKind::Cnot: state.apply_cnot(op.qubits[0], op.qubits[1]); break;
        case GateKind::Cz: state.apply_cz(op.qubits[0], op.qubits[1]); break;
        case GateKind::Swap: state.apply_swap(op.qubits[0], op.qubits[1]); break;
        case GateKind::Toffoli:
            state.apply_toffoli(op.qubits[0], op.qubits[1], op.qubits[2]);
            break;
        case GateKind::Marker: break;  // identity unless replaced by channels::inject
        default:
            throw std::logic_error("apply_unitary_op: non-unitary op");
    }
}

}  // namespace

void apply_ops(StateVector& state, const Circuit& circuit) {
    if (state.num_qubits() != circuit.num_qubits()) {
        throw std::invalid_argument("apply_ops: state/circuit qubit count mismatch");
    }
    for (const GateOp& op : circuit.ops()) {
        if (op.kind == GateKind::Measure || op.kind == GateKind::Reset) {
            throw std::invalid_argument("apply_ops: circuit contains non-unitary ops");
        }
        apply_unitary_op(state, op);
    }
}

SimResult simulate(const Circuit& circuit, uint64_t shots, uint64_t seed,
                   double readout_flip_p) {
    if (circuit.num_qubits() > kMaxQubits) {
        throw std::out_of_range("simulate: circuit exceeds " + std::to_string(kMaxQubits) +
                                " qubits");
    }
    SimResult result;
    if (shots == 0) {
        if (circuit.has_measurement() || circuit.has_reset()) {
            throw std::invalid_argument(
                "simulate: shots == 0 (statevector mode) requires a Measure/Reset-free "
                "circuit; use trajectory mode");
        }
        StateVector state = StateVector::zero_state(circuit.num_qubits());
        apply_ops(state, circuit);
        result.final_state = std::move(state);
        return result;
    }

    const RandomSource root(seed);
    const bool pure = !circuit.has_measurement() && !circuit.has_reset();
    if (pure) {
        StateVector state = StateVector::zero_state(circuit.num_qubits());
        apply_ops(state, circuit);
        result.final_state = std::move(state);
        return result;
    }

    // Terminal-measurement fast path: enumerate the exact pre-measurement
    // mixture once (Reset ops fork branches), then sample per shot. Applies
    // when all Measure ops form a suffix over distinct qubits.
    {
        size_t first_measure = circuit.ops().size();
        bool eligible = true;
        std::set<int> measured;
        for (size_t i = 0; i < circuit.ops().size() && eligible; ++i) {
            const GateOp& op = circuit.ops()[i];
            if (op.kind == GateKind::Measure) {
                if (first_measure == circuit.ops().size()) first_measure = i;
                if (!measured.insert(op.qubits[0]).second) eligible = false;
            } else if (first_measure != circuit.ops().size()) {
                eligible = false;  // non-measurement op after a measurement
            }
        }
        if (eligible) {
            Circuit prefix(circuit.num_qubits(), circuit.num_cbits());
            std::vector<int> qubits;
            std::vector<int> cbit_of;
            for (const GateOp& op : circuit.ops()) {
                if (op.kind == GateKind::Measure) {
                    qubits.push_back(op.qubits[0]);
                    cbit_of.push_back(op.cbit);
                } else {
                    prefix.append(op);
                }
            }
            const std::vector<ExactBranch> branches = run_exact_branches(prefix);
            std::vector<double> cdf;
            std::vector<size_t> branch_of;
            std::vector<std::vector<double>> outcome_cdfs;
            double acc = 0.0;
            for (size_t b = 0; b < branches.size(); ++b) {
                acc += branches[b].probability;
                cdf.push_back(acc);
                std::vector<double> probs =
                    branches[b].state.marginal_probabilities(qubits);
                double pacc = 0.0;
                for (double& p : probs) {
                    pacc += p;
                    p = pacc;
                }
                outcome_cdfs.push_back(std::move(probs));
            }
            for (uint64_t shot = 0; shot < shots; ++shot) {
                RandomSource rng = root.substream(shot);
                const double ub = rng.uniform() * acc;
                const size_t b = std::min<size_t>(
                    std::lower_bound(cdf.begin(), cdf.end(), ub) - cdf.begin(),
                    branches.size() - 1);
                const std::vector<double>& ocdf = outcome_cdfs[b];
                const double uo = rng.uniform() * ocdf.back();
                const size_t idx = std::min<size_t>(
                    std::lower_bound(ocdf.begin(), ocdf.end(), uo) - ocdf.begin(),
                    ocdf.size() - 1);
                std::vector<uint8_t> cbits(circuit.num_cbits(), 0);
                for (size_t k = 0; k < qubits.size(); ++k) {
                    int bit = static_cast<int>((idx >> k) & 1);
                    if (readout_flip_p > 0.0 && rng.uniform() < readout_flip_p) bit ^= 1;
                    cbits[cbit_of[k]] = static_cast<uint8_t>(bit);
                }
                std::vector<int> bits(cbits.begin(), cbits.end());
                ++result.counts[bits_to_key(bits)];
                result.cbit_records.push_back(std::move(cbits));
            }
            return result;
        }
    }

    for (uint64_t shot = 0; shot < shots; ++shot) {
        RandomSource rng = root.substream(shot);
        StateVector state = StateVector::zero_state(circuit.num_qubits());
        std::vector<uint8_t> cbits(circuit.num_cbits(), 0);
        for (const GateOp& op : circuit.ops()) {
            if (op.kind == GateKind::Measure) {
                int bit = state.measure_z(op.qubits[0], rng);
                if (readout_flip_p > 0.0 && rng.uniform() < readout_flip_p) bit ^= 1;
                cbits[op.cbit] = static_cast<uint8_t>(bit);
            } else if (op.kind == GateKind::Reset) {
                state.reset_qubit(op.qubits[0], rng);
            } else {
                apply_unitary_op(state, op);
            }
        }
        std::vector<int> bits(cbits.begin(), cbits.end());
        ++result.counts[bits_to_key(bits)];
        result.cbit_records.push_back(std::move(cbits));
    }
    return result;
}

std::vector<ExactBranch> run_exact_branches(const Circuit& circuit) {
    struct Work {
        double probability;
        StateVector state;
        size_t next_op;
    };
    std::vector<Work> pending;
    pending.push_back({1.0, StateVector::zero_state(circuit.num_qubits()), 0});
    std::vector<ExactBranch> done;
    const auto& ops = circuit.ops();
    while (!pending.empty()) {
        Work w = std::move(pending.back());
        pending.pop_back();
        size_t i = w.next_op;
        bool forked = false;
        for (; i < ops.size(); ++i) {
            const GateOp& op = ops[i];
            if (op.kind == GateKind::Measure) {
                throw std::invalid_argument(
                    "run_exact_branches: circuit contains Measure ops; strip terminal "
                    "measurements first");
            }
            if (op.kind == GateKind::Reset) {
                const int q = op.qubits[0];
                StateVector zero_branch = w.state;
                const double p0 = zero_branch.project_z(q, 0);
                if (p0 > 1e-12) {
                    pending.push_back({w.probability * p0, std::move(zero_branch), i + 1});
                }
                const double p1 = w.state.project_z(q, 1);
                if (p1 > 1e-12) {
                    w.state.apply_x(q);
                    pending.push_back({w.probability * p1, std::move(w.state), i + 1});
                }
                forked = true;
                break;
            }
            apply_unitary_op(w.state, op);
        }
        if (!forked) done.push_back({w.probability, std::move(w.state)});
    }
    return done;
}

Unitary unitary_of(const Circuit& circuit) {
    if (circuit.num_qubits() > 10) {
        throw std::invalid_argument("unitary_of: supported for <= 10 qubits");
    }
    if (circuit.has_measurement() || circuit.has_reset()) {
        throw std::invalid_argument("unitary_of: circuit contains Measure/Reset");
    }
    const int n = circuit.num_qubits();
    const int dim = 1 << n;
    Unitary u = Unitary::identity(dim);
    for (int col = 0; col < dim; ++col) {
        StateVector state(n);
        std::vector<Amplitude> amps(dim, 0.0);
        amps[col] = 1.0;
        state = StateVector::from_amplitudes(n, std::move(amps));
        apply_ops(state, circuit);
        for (int row = 0; row < dim; ++row) u.at(row, col) = state.amp(row);
    }
    return u;
}

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw std::invalid_argument("circuit schema: " + where + ": " + what);
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) schema_error(where, "unknown field '" + key + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) schema_error(where, "missing field '" + key + "'");
    }
}

}  // namespace

std::string serialize(const Circuit& circuit) {
    json doc;
    doc["version"] = 1;
    doc["num_qubits"] = circuit.num_qubits();
    doc["num_cbits"] = circuit.num_cbits();
    json ops = json::array();
    for (const GateOp& op : circuit.ops()) {
        json jop;
        jop["kind"] = std::string(kind_name(op.kind));
        if (op.kind == GateKind::Ry) jop["theta"] = op.theta;
        jop["qubits"] = op.qubits;
        if (op.kind == GateKind::Measure) jop["cbit"] = op.cbit;
        if (op.kind == GateKind::Marker) jop["label"] = op.label;
        ops.push_back(std::move(jop));
    }
    doc["ops"] = std::move(ops);
    doc["metadata"] = circuit.metadata();
    return doc.dump(2);
}

Circuit deserialize(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("circuit schema: malformed JSON: ") +
                                    err.what());
    }
    if (!doc.is_object()) schema_error("document", "expected an object");
    require_keys(doc, "document", {"version", "num_qubits", "num_cbits", "ops", "metadata"},
                 {"version", "num_qubits", "num_cbits", "ops"});
    if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1) {
        schema_error("version", "expected integer 1");
    }
    if (!doc["num_qubits"].is_number_integer() || !doc["num_cbits"].is_number_integer()) {
        schema_error("num_qubits/num_cbits", "expected integers");
    }
    Circuit circuit(doc["num_qubits"].get<int>(), doc["num_cbits"].get<int>());
    if (!doc["ops"].is_array()) schema_error("ops", "expected an array");
    size_t index = 0;
    for (const json& jop : doc["ops"]) {
        const std::string where = "ops[" + std::to_string(index++) + "]";
        if (!jop.is_object()) schema_error(where, "expected an object");
        require_keys(jop, where, {"kind", "qubits", "theta", "cbit", "label"},
                     {"kind", "qubits"});
        if (!jop["kind"].is_string()) schema_error(where, "field 'kind' must be a string");
        const auto kind = kind_from_name(jop["kind"].get<std::string>());
        if (!kind) {
            schema_error(where, "unknown kind '" + jop["kind"].get<std::string>() + "'");
        }
        if (!jop["qubits"].is_array()) schema_error(where, "field 'qubits' must be an array");
        std::vector<int> qubits;
        for (const json& q : jop["qubits"]) {
            if (!q.is_number_integer()) schema_error(where, "qubit indices must be integers");
            qubits.push_back(q.get<int>());
        }
        if (jop.contains("theta") && *kind != GateKind::Ry) {
            schema_error(where, "field 'theta' only valid for Ry");
        }
        if (jop.contains("cbit") && *kind != GateKind::Measure) {
            schema_error(where, "field 'cbit' only valid for Measure");
        }
        if (jop.contains("label") && *kind != GateKind::Marker) {
            schema_error(where, "field 'label' only valid for Marker");
        }
        GateOp op = make_gate(*kind, std::move(qubits));
        if (*kind == GateKind::Ry) {
            if (!jop.contains("theta") || !jop["theta"].is_number()) {
                schema_error(where, "Ry requires numeric field 'theta'");
            }
            op.theta = jop["theta"].get<double>();
        }
        if (*kind == GateKind::Measure) {
            if (!jop.contains("cbit") || !jop["cbit"].is_number_integer()) {
                schema_error(where, "Measure requires integer field 'cbit'");
            }
            op.cbit = jop["cbit"].get<int>();
        }
        if (*kind == GateKind::Marker) {
            if (!jop.contains("label") || !jop["label"].is_string()) {
                schema_error(where, "Marker requires string field 'label'");
            }
            op.label = jop["label"].get<std::string>();
        }
        try {
            circuit.append(std::move(op));
        } catch (const std::invalid_argument& err) {
            schema_error(where, err.what());
        }
    }
    if (doc.contains("metadata")) {
        if (!doc["metadata"].is_object()) schema_error("metadata", "expected an object");
        for (const auto& [key, value] : doc["metadata"].items()) {
            if (!value.is_string()) schema_error("metadata", "values must be strings");
            circuit.metadata()[key] = value.get<std::string>();
        }
    }
    return circuit;
}

}  // namespace tecsim
