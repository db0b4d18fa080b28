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

#include "tecsim/layout.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <json.hpp>

namespace tecsim::maps {

void CouplingMap::validate() const {
    if (num_qubits < 1) throw std::invalid_argument("CouplingMap: num_qubits must be >= 1");
    for (const auto& [c, t] : edges) {
        if (c < 0 || c >= num_qubits || t < 0 || t >= num_qubits) {
            throw std::invalid_argument("CouplingMap: edge endpoint out of range");
        }
        if (c == t) throw std::invalid_argument("CouplingMap: self-loop");
    }
    for (const auto& [q, _] : annotations) {
        if (q < 0 || q >= num_qubits) {
            throw std::invalid_argument("CouplingMap: annotation qubit out of range");
        }
    }
}

bool CouplingMap::has_edge(int control, int target) const {
    return edges.count({control, target}) > 0;
}

bool CouplingMap::adjacent(int a, int b) const {
    return has_edge(a, b) || has_edge(b, a);
}

CouplingMap melbourne_map() {
    CouplingMap map;
    map.num_qubits = 14;
    map.edges = {{1, 0},  {1, 2},   {2, 3},   {4, 10}, {5, 9},  {5, 6},
                 {5, 4},  {6, 8},   {7, 8},   {9, 8},  {9, 10}, {11, 12},
                 {11, 10}, {11, 3}, {12, 2},  {13, 12}, {13, 1}};
    const double freqs[14] = {5.1000, 5.2384, 5.0328, 4.8961, 5.0262, 5.0670, 4.9237,
                              4.9744, 4.7381, 4.9633, 4.9450, 5.0046, 4.7598, 4.9685};
    for (int q = 0; q < 14; ++q) map.annotations[q]["freq_ghz"] = freqs[q];
    return map;
}

std::string coupling_map_to_json(const CouplingMap& map) {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["num_qubits"] = map.num_qubits;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [c, t] : map.edges) edges.push_back({c, t});
    doc["edges"] = std::move(edges);
    nlohmann::json ann = nlohmann::json::object();
    for (const auto& [q, kv] : map.annotations) ann[std::to_string(q)] = kv;
    doc["annotations"] = std::move(ann);
    return doc.dump(2);
}

CouplingMap coupling_map_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.contains("version") || doc["version"].get<int>() != 1) {
        throw std::invalid_argument("coupling map: expected version 1");
    }
    CouplingMap map;
    map.num_qubits = doc.at("num_qubits").get<int>();
    for (const auto& e : doc.at("edges")) {
        map.edges.insert({e[0].get<int>(), e[1].get<int>()});
    }
    if (doc.contains("annotations")) {
        for (const auto& [key, kv] : doc["annotations"].items()) {
            for (const auto& [name, value] : kv.items()) {
                map.annotations[std::stoi(key)][name] = value.get<double>();
            }
        }
    }
    map.validate();
    return map;
}

std::vector<Violation> validate(const Circuit& circuit, const CouplingMap& map,
                                DirectionPolicy policy) {
    map.validate();
    if (circuit.num_qubits() > map.num_qubits) {
        throw std::invalid_argument("validate: circuit uses more qubits than the map");
    }
    std::vector<Violation> violations;
    const auto& ops = circuit.ops();
    for (size_t i = 0; i < ops.size(); ++i) {
        const GateOp& op = ops[i];
        switch (op.kind) {
            case GateKind::Cnot: {
                const int c = op.qubits[0], t = op.qubits[1];
                const bool ok = policy == DirectionPolicy::Strict ? map.has_edge(c, t)
                                                                  : map.adjacent(c, t);
                if (!ok) {
                    violations.push_back({i, "CNOT(" + std::to_string(c) + "," +
                                                 std::to_string(t) + ") not on the map"});
                }
                break;
            }
            case GateKind::Cz:
            case GateKind::Swap: {
                if (!map.adjacent(op.qubits[0], op.qubits[1])) {
                    violations.push_back(
                        {i, std::string(kind_name(op.kind)) + "(" +
                                std::to_string(op.qubits[0]) + "," +
                                std::to_string(op.qubits[1]) + ") not adjacent"});
                }
                break;
            }
            case GateKind::Toffoli:
                violations.push_back({i, "Toffoli requires decomposition"});
                break;
            default: break;
        }
    }
    return violations;
}

namespace {

/// BFS shortest path with neighbors explored in ascending index; empty if
/// unreachable.
std::vector<int> bfs_path(const CouplingMap& map, int from, int to) {
    std::vector<std::vector<int>> adj(map.num_qubits);
    for (const auto& [c, t] : map.edges) {
        adj[c].push_back(t);
        adj[t].push_back(c);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::vector<int> prev(map.num_qubits, -1);
    std::deque<int> queue{from};
    std::vector<bool> seen(map.num_qubits, false);
    seen[from] = true;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        if (v == to) break;
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    if (!seen[to]) return {};
    std::vector<int> path{to};
    while (path.back() != from) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

void emit_cnot(Circuit& out, const CouplingMap& map, int c, int t) {
    if (map.has_edge(c, t)) {
        out.cnot(c, t);
    } else {
        // reversed edge: CNOT(c,t) = (H x H) CNOT(t,c) (H x H)
        out.h(c).h(t).cnot(t, c).h(c).h(t);
    }
}

void emit_swap(Circuit& out, const CouplingMap& map, int a, int b) {
    // three alternating CNOTs on whichever direction the map provides
    if (map.has_edge(a, b)) {
        out.cnot(a, b);
        emit_cnot(out, map, b, a);
        out.cnot(a, b);
    } else {
        out.cnot(b, a);
        emit_cnot(out, map, a, b);
        out.cnot(b, a);
    }
}

}  // namespace

RoutedCircuit route(const Circuit& circuit, const CouplingMap& map) {
    map.validate();
    if (circuit.num_qubits() > map.num_qubits) {
        throw std::invalid_argument("route: circuit uses more qubits than the map");
    }
    for (size_t i = 0; i < circuit.ops().size(); ++i) {
        if (circuit.ops()[i].kind == GateKind::Toffoli) {
            throw std::invalid_argument("route: decompose Toffolis first (op " +
                                        std::to_string(i) + ")");
        }
    }
    // trivial identity layout; logical qubit q starts at physical q
    std::vector<int> phys_of(circuit.num_qubits());
    for (int q = 0; q < circuit.num_qubits(); ++q) phys_of[q] = q;

    RoutedCircuit routed{Circuit(map.num_qubits, circuit.num_cbits()), phys_of, {}, 0};
    routed.circuit.metadata() = circuit.metadata();

    for (const GateOp& op : circuit.ops()) {
        if (op.qubits.size() < 2 || op.kind == GateKind::Marker) {
            GateOp mapped = op;
            for (auto& q : mapped.qubits) q = phys_of[q];
            routed.circuit.append(std::move(mapped));
            continue;
        }
        const int la = op.qubits[0], lb = op.qubits[1];
        if (!map.adjacent(phys_of[la], phys_of[lb])) {
            // move the lower-indexed operand along the shortest path until adjacent
            const int mover = std::min(la, lb);
            const int anchor = mover == la ? lb : la;
            const std::vector<int> path = bfs_path(map, phys_of[mover], phys_of[anchor]);
            if (path.empty()) {
                throw std::runtime_error("route: operands are in disconnected components");
            }
            for (size_t step = 1; step + 1 < path.size(); ++step) {
                const int from = path[step - 1], to = path[step];
                emit_swap(routed.circuit, map, from, to);
                ++routed.swaps_inserted;
                for (auto& p : phys_of) {
                    if (p == from) p = to;
                    else if (p == to) p = from;
                }
            }
        }
        const int pa = phys_of[la], pb = phys_of[lb];
        switch (op.kind) {
            case GateKind::Cnot: emit_cnot(routed.circuit, map, pa, pb); break;
            case GateKind::Cz: routed.circuit.cz(pa, pb); break;
            case GateKind::Swap: {
                emit_swap(routed.circuit, map, pa, pb);
                break;
            }
            default: throw std::logic_error("route: unexpected multi-qubit kind");
        }
    }
    routed.final_layout = phys_of;
    return routed;
}

Circuit decompose_toffoli(const Circuit& circuit) {
    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.metadata() = circuit.metadata();
    const auto tdg = [&out](int q) { out.z(q).s(q).t(q); };
    for (const GateOp& op : circuit.ops()) {
        if (op.kind != GateKind::Toffoli) {
            out.append(op);
            continue;
        }
        const int a = op.qubits[0], b = op.qubits[1], c = op.qubits[2];
        out.h(c);
        out.cnot(b, c);
        tdg(c);
        out.cnot(a, c);
        out.t(c);
        out.cnot(b, c);
        tdg(c);
        out.cnot(a, c);
        out.t(b);
        out.t(c);
        out.h(c);
        out.cnot(a, b);
        out.t(a);
        tdg(b);
        out.cnot(a, b);
    }
    return out;
}

}  // namespace tecsim::maps
