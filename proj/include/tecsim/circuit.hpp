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

#ifndef TECSIM_CIRCUIT_HPP
#define TECSIM_CIRCUIT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tecsim/qsim.hpp"

namespace tecsim {

enum class GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Ry,
    Cnot,
    Cz,
    Swap,
    Toffoli,
    Measure,
    Reset,
    Marker,
};

std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_name(std::string_view name);

/// Number of qubit operands for a kind (Marker is variadic: returns -1).
int kind_arity(GateKind kind);
bool kind_is_unitary(GateKind kind);

struct GateOp {
    GateKind kind;
    std::vector<int> qubits;
    double theta = 0.0;       // Ry only
    int cbit = -1;            // Measure only
    std::string label;        // Marker only

    bool touches(int qubit) const;
};

GateOp make_gate(GateKind kind, std::vector<int> qubits);
GateOp make_ry(double theta, int qubit);
GateOp make_measure(int qubit, int cbit);
GateOp make_marker(std::string label, std::vector<int> qubits);

/// Ordered gate program over qubit and classical-bit registers. Ops are
/// validated on append; instances are immutable once shared.
class Circuit {
  public:
    Circuit(int num_qubits, int num_cbits = 0);

    int num_qubits() const { return num_qubits_; }
    int num_cbits() const { return num_cbits_; }
    const std::vector<GateOp>& ops() const { return ops_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }
    std::map<std::string, std::string>& metadata() { return metadata_; }

    /// Validates arity, index ranges, marker-label uniqueness and
    /// cbit single-assignment; throws std::invalid_argument on violation.
    Circuit& append(GateOp op);

    // Fluent builder shorthands.
    Circuit& h(int q) { return append(make_gate(GateKind::H, {q})); }
    Circuit& x(int q) { return append(make_gate(GateKind::X, {q})); }
    Circuit& y(int q) { return append(make_gate(GateKind::Y, {q})); }
    Circuit& z(int q) { return append(make_gate(GateKind::Z, {q})); }
    Circuit& s(int q) { return append(make_gate(GateKind::S, {q})); }
    Circuit& t(int q) { return append(make_gate(GateKind::T, {q})); }
    Circuit& ry(double theta, int q) { return append(make_ry(theta, q)); }
    Circuit& cnot(int c, int t) { return append(make_gate(GateKind::Cnot, {c, t})); }
    Circuit& cz(int a, int b) { return append(make_gate(GateKind::Cz, {a, b})); }
    Circuit& swap(int a, int b) { return append(make_gate(GateKind::Swap, {a, b})); }
    Circuit& toffoli(int c1, int c2, int t) {
        return append(make_gate(GateKind::Toffoli, {c1, c2, t}));
    }
    Circuit& measure(int q, int cbit) { return append(make_measure(q, cbit)); }
    Circuit& reset(int q) { return append(make_gate(GateKind::Reset, {q})); }
    Circuit& marker(std::string label, std::vector<int> qubits) {
        return append(make_marker(std::move(label), std::move(qubits)));
    }

    /// Appends `fragment`'s ops with its qubit i mapped to qubit_map[i]
    /// (cbits mapped by cbit_offset).
    Circuit& append_fragment(const Circuit& fragment, std::span<const int> qubit_map,
                             int cbit_offset = 0);

    /// Index of the marker with the given label, if present.
    std::optional<size_t> find_marker(std::string_view label) const;

    bool has_measurement() const;
    bool has_reset() const;

    /// Structural equality (metadata excluded).
    bool same_ops(const Circuit& other) const;

  private:
    int num_qubits_;
    int num_cbits_;
    std::vector<GateOp> ops_;
    std::map<std::string, std::string> metadata_;
};

struct SimResult {
    /// Exact final state; present when the circuit has no Measure ops.
    std::optional<StateVector> final_state;
    /// Histogram over cbit strings (cbit 0 printed leftmost).
    std::map<std::string, uint64_t> counts;
    /// Per-shot cbit values, indexed [shot][cbit]; empty when shots == 0.
    std::vector<std::vector<uint8_t>> cbit_records;
};

/// Runs the circuit. shots == 0 requires a Measure/Reset-free circuit and
/// returns the exact final state. shots > 0 simulates independent
/// trajectories with per-shot RNG substreams (bit-identical regardless of
/// scheduling); measurement outcomes are flipped with probability
/// `readout_flip_p` at sampling time. Circuits whose measurements form a
/// terminal suffix are sampled from the exact final distribution instead of
/// re-running the trajectory per shot.
SimResult simulate(const Circuit& circuit, uint64_t shots, uint64_t seed,
                   double readout_flip_p = 0.0);

struct ExactBranch {
    double probability;
    StateVector state;
};

/// Exact evaluation of a measurement-free circuit; Reset ops fork branches.
std::vector<ExactBranch> run_exact_branches(const Circuit& circuit);

/// Applies all unitary ops (markers skipped) to `state` in program order.
void apply_ops(StateVector& state, const Circuit& circuit);

/// Product of gate embeddings in op order. Requires <= 10 qubits and no
/// Measure/Reset ops.
Unitary unitary_of(const Circuit& circuit);

/// Versioned JSON circuit format (see README); bit-exact round trip.
std::string serialize(const Circuit& circuit);
Circuit deserialize(const std::string& text);

}  // namespace tecsim

#endif
