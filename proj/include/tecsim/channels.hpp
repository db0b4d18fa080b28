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

#ifndef TECSIM_CHANNELS_HPP
#define TECSIM_CHANNELS_HPP

#include <optional>
#include <set>
#include <string>

#include "tecsim/circuit.hpp"

namespace tecsim::channels {

enum class ErrorKind { None, BitFlip, PhaseFlip, BitPhaseFlip, Erasure };
enum class ErasureMode { GateRemoval, ResetAndFlag };

std::string_view error_kind_name(ErrorKind kind);
std::optional<ErrorKind> error_kind_from_name(std::string_view name);
std::string_view erasure_mode_name(ErasureMode mode);
std::optional<ErasureMode> erasure_mode_from_name(std::string_view name);

/// Which error to realize, on which block qubit, at which channel marker.
struct ErrorSpec {
    ErrorKind kind = ErrorKind::None;
    int qubit = 0;
    std::string marker = "ε";  // error-channel box label
    ErasureMode erasure_mode = ErasureMode::GateRemoval;
};

/// Location information returned by erase(): erasures are located errors.
struct ErasureFlagHint {
    std::set<int> erased;
};

/// Inserts the operational error right after the named marker. BitFlip -> X,
/// PhaseFlip -> Z, BitPhaseFlip -> Y, None -> unchanged. Erasure is handled
/// by erase(). Purely insertive: removing the inserted op restores the input.
Circuit inject(const Circuit& circuit, const ErrorSpec& spec);

/// Simulates erasing `qubit` at the marker. GateRemoval deletes every op
/// before the marker that touches the qubit (the erased qubit stays |0>);
/// ResetAndFlag inserts Reset at the marker. Both report the known location.
std::pair<Circuit, ErasureFlagHint> erase(const Circuit& circuit, int qubit,
                                          ErasureMode mode,
                                          std::string_view marker = "ε");

/// Gate-located depolarizing noise plus readout flips.
struct NoiseModel {
    double p1 = 0.0;         // after each 1-qubit gate
    double p2 = 0.0;         // after each 2/3-qubit gate
    double p_readout = 0.0;  // flip probability per measured bit

    void validate() const;
    bool is_trivial() const { return p1 == 0.0 && p2 == 0.0 && p_readout == 0.0; }
};

/// One sampled noise trajectory: after each gate, with the configured
/// probability, a uniformly chosen non-identity Pauli is inserted on each
/// touched qubit. Readout flips are applied at sampling time, not here.
Circuit apply_noise(const Circuit& circuit, const NoiseModel& model, RandomSource& rng);

/// Trajectory runner: per shot, samples a noise trajectory and simulates it
/// with readout flips. Deterministic in (circuit, model, shots, seed).
SimResult run_noisy(const Circuit& circuit, const NoiseModel& model, uint64_t shots,
                    uint64_t seed);

}  // namespace tecsim::channels

#endif
