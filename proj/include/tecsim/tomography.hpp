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

#ifndef TECSIM_TOMOGRAPHY_HPP
#define TECSIM_TOMOGRAPHY_HPP

#include <map>
#include <string>
#include <vector>

#include "tecsim/circuit.hpp"

namespace tecsim::tomo {

/// Full Pauli-basis measurement schedule: all 3^n settings in lexicographic
/// order (X < Y < Z). Capped at 3 qubits.
struct TomographySchedule {
    int num_qubits;
    std::vector<std::string> settings;
};

TomographySchedule schedule_full(int num_qubits);

/// Measurement-basis rotation: X -> H, Y -> S-dagger then H, Z -> identity.
Circuit rotation_fragment(const std::string& setting);

/// Counts for one measurement setting. Values are real so the infinite-shot
/// limit can be fed analytically as probabilities.
struct BasisCounts {
    std::string setting;
    std::map<std::string, double> histogram;
};

struct ReconstructionReport {
    DensityMatrix rho;
    double fidelity_to_target = 0.0;
    double shots_per_setting = 0.0;
    bool physicality_corrected = false;
};

/// Linear-inversion estimate rho = (1/2^n) sum_P <P> P with identity-padded
/// expectations derived from marginals (I positions padded with Z), projected
/// to PSD by eigenvalue clipping with trace renormalization.
ReconstructionReport reconstruct(std::span<const BasisCounts> counts,
                                 const StateVector& target);

/// Exact single-setting counts for a pure state (probabilities, not samples).
BasisCounts exact_counts(const StateVector& state, const std::string& setting);

/// Sampled counts for one setting at the given shots.
BasisCounts sampled_counts(const StateVector& state, const std::string& setting,
                           uint64_t shots, uint64_t seed);

/// Report JSON: {"version":1,"n":..,"real":[[..]],"imag":[[..]],
/// "fidelity":..,"shots_per_setting":..,"physicality_corrected":..}.
std::string report_to_json(const ReconstructionReport& report);
ReconstructionReport report_from_json(const std::string& text);

}  // namespace tecsim::tomo

#endif
