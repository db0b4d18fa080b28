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

#ifndef TECSIM_LAYOUT_HPP
#define TECSIM_LAYOUT_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tecsim/circuit.hpp"

namespace tecsim::maps {

/// Directed two-qubit connectivity of a device, with optional per-qubit
/// annotations (e.g. frequencies; informational only).
struct CouplingMap {
    int num_qubits = 0;
    std::set<std::pair<int, int>> edges;  // (control, target)
    std::map<int, std::map<std::string, double>> annotations;

    void validate() const;
    bool has_edge(int control, int target) const;
    bool adjacent(int a, int b) const;  // either direction
};

/// The 14-qubit Melbourne processor connectivity: Q1->[Q0,Q2],
/// Q2->Q3, Q4->Q10, Q5->[Q9,Q6,Q4], Q6->Q8, Q7->Q8, Q9->[Q8,Q10],
/// Q11->[Q12,Q10,Q3], Q12->Q2, Q13->[Q12,Q1]. Annotated with the published
/// qubit frequencies.
CouplingMap melbourne_map();

std::string coupling_map_to_json(const CouplingMap& map);
CouplingMap coupling_map_from_json(const std::string& text);

enum class DirectionPolicy { Strict, AllowReversed };

struct Violation {
    size_t op_index;
    std::string reason;
};

/// Checks every multi-qubit gate against the map. Strict requires CNOTs to
/// match a directed edge; AllowReversed accepts undirected adjacency.
/// Symmetric gates (CZ/SWAP) need adjacency under either policy; Toffolis
/// always violate ("requires decomposition").
std::vector<Violation> validate(const Circuit& circuit, const CouplingMap& map,
                                DirectionPolicy policy);

struct RoutedCircuit {
    Circuit circuit;
    std::vector<int> initial_layout;  // logical -> physical
    std::vector<int> final_layout;    // logical -> physical
    int swaps_inserted = 0;
};

/// Deterministic greedy router: when a gate's operands are not adjacent, the
/// lower-indexed operand walks along a BFS shortest path (neighbors explored
/// in ascending index) until the pair is adjacent. CNOTs against the edge
/// direction are realized by Hadamard conjugation, so routed circuits
/// validate under Strict as well.
RoutedCircuit route(const Circuit& circuit, const CouplingMap& map);

/// Replaces each Toffoli with the standard CNOT + H/T network. T-dagger is
/// spelled Z,S,T (the gate set carries no adjoints); 21 ops per Toffoli.
Circuit decompose_toffoli(const Circuit& circuit);

}  // namespace tecsim::maps

#endif
