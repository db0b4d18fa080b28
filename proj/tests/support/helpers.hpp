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

#ifndef TECSIM_TESTS_HELPERS_HPP
#define TECSIM_TESTS_HELPERS_HPP

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tecsim/circuit.hpp"
#include "tecsim/layout.hpp"

namespace tecsim::testing {

inline std::string source_path(const std::string& relative) {
    return std::string(TECSIM_SOURCE_DIR) + "/" + relative;
}

inline StateVector load_golden(const std::string& relative, int num_qubits) {
    std::ifstream file(source_path(relative));
    if (!file) throw std::runtime_error("cannot open golden file " + relative);
    std::ostringstream buf;
    buf << file.rdbuf();
    const nlohmann::json doc = nlohmann::json::parse(buf.str());
    std::vector<Amplitude> amps;
    for (const auto& pair : doc) {
        amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return StateVector::from_amplitudes(num_qubits, std::move(amps));
}

/// Uniformly random unitary circuit (no measurement/reset).
inline Circuit random_circuit(RandomSource& rng, int num_qubits, int depth) {
    Circuit c(num_qubits);
    for (int d = 0; d < depth; ++d) {
        const uint64_t pick = rng.next_u64() % (num_qubits >= 3 ? 11 : 10);
        const auto q1 = [&] { return static_cast<int>(rng.next_u64() % num_qubits); };
        const auto q2_distinct = [&](int a) {
            int b = q1();
            while (b == a) b = q1();
            return b;
        };
        switch (pick) {
            case 0: c.h(q1()); break;
            case 1: c.x(q1()); break;
            case 2: c.y(q1()); break;
            case 3: c.z(q1()); break;
            case 4: c.s(q1()); break;
            case 5: c.t(q1()); break;
            case 6: c.ry(rng.uniform() * 2 * std::numbers::pi, q1()); break;
            case 7: {
                if (num_qubits < 2) { c.h(q1()); break; }
                const int a = q1();
                c.cnot(a, q2_distinct(a));
                break;
            }
            case 8: {
                if (num_qubits < 2) { c.x(q1()); break; }
                const int a = q1();
                c.cz(a, q2_distinct(a));
                break;
            }
            case 9: {
                if (num_qubits < 2) { c.z(q1()); break; }
                const int a = q1();
                c.swap(a, q2_distinct(a));
                break;
            }
            case 10: {
                const int a = q1();
                const int b = q2_distinct(a);
                int t = q1();
                while (t == a || t == b) t = q1();
                c.toffoli(a, b, t);
                break;
            }
        }
    }
    return c;
}

/// Random connected coupling map: random spanning tree plus extra edges,
/// random directions.
inline maps::CouplingMap random_connected_map(RandomSource& rng, int num_qubits) {
    maps::CouplingMap map;
    map.num_qubits = num_qubits;
    for (int v = 1; v < num_qubits; ++v) {
        const int u = static_cast<int>(rng.next_u64() % v);
        if (rng.next_u64() % 2) map.edges.insert({u, v});
        else map.edges.insert({v, u});
    }
    const int extra = static_cast<int>(rng.next_u64() % (num_qubits + 1));
    for (int k = 0; k < extra; ++k) {
        const int a = static_cast<int>(rng.next_u64() % num_qubits);
        int b = static_cast<int>(rng.next_u64() % num_qubits);
        if (a == b) continue;
        if (!map.adjacent(a, b)) map.edges.insert({a, b});
    }
    return map;
}

/// Max amplitude deviation between the routed and original circuit over all
/// computational-basis inputs of the logical register. Unused physical qubits
/// must end in |0>.
inline double routing_deviation(const Circuit& original, const maps::RoutedCircuit& routed,
                                const maps::CouplingMap& map) {
    const int n = original.num_qubits();
    double worst = 0.0;
    for (size_t input = 0; input < (size_t{1} << n); ++input) {
        StateVector logical = StateVector::zero_state(n);
        StateVector physical = StateVector::zero_state(map.num_qubits);
        for (int q = 0; q < n; ++q) {
            if ((input >> q) & 1) {
                logical.apply_x(q);
                physical.apply_x(routed.initial_layout[q]);
            }
        }
        apply_ops(logical, original);
        apply_ops(physical, routed.circuit);
        size_t layout_mask = 0;
        for (int q = 0; q < n; ++q) layout_mask |= size_t{1} << routed.final_layout[q];
        for (size_t i = 0; i < physical.dim(); ++i) {
            const Amplitude amp = physical.amp(i);
            if (std::abs(amp) <= 1e-12) continue;
            // bits outside the final layout must be zero
            if ((i & ~layout_mask) != 0) return 1.0;  // stray amplitude
            size_t logical_idx = 0;
            for (int q = 0; q < n; ++q) {
                if ((i >> routed.final_layout[q]) & 1) logical_idx |= size_t{1} << q;
            }
            worst = std::max(worst, std::abs(amp - logical.amp(logical_idx)));
        }
        // also catch amplitudes the routed run lost entirely
        for (size_t j = 0; j < logical.dim(); ++j) {
            size_t phys_idx = 0;
            for (int q = 0; q < n; ++q) {
                if ((j >> q) & 1) phys_idx |= size_t{1} << routed.final_layout[q];
            }
            worst = std::max(worst, std::abs(physical.amp(phys_idx) - logical.amp(j)));
        }
    }
    return worst;
}

inline bool within_3sigma_binomial(uint64_t count, uint64_t shots, double p) {
    const double mean = static_cast<double>(shots) * p;
    const double sigma = std::sqrt(static_cast<double>(shots) * p * (1.0 - p));
    return std::abs(static_cast<double>(count) - mean) <= 3.0 * sigma;
}

}  // namespace tecsim::testing

#endif
