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

#ifndef TECSIM_CLI_RUNNER_HPP
#define TECSIM_CLI_RUNNER_HPP

#include <optional>
#include <string>

#include "tecsim/channels.hpp"
#include "tecsim/tec.hpp"
#include "tecsim/tomography.hpp"

namespace tecsim::cli {

struct ExperimentConfig {
    tec::Pipeline pipeline = tec::Pipeline::BitFlip;
    /// nullopt expands to the "all-single" sweep for the pipeline.
    std::optional<channels::ErrorSpec> error;
    uint64_t shots = 0;  // 0 = exact statevector mode
    uint64_t seed = 1;
    std::optional<channels::NoiseModel> noise;
    int trajectories = 1000;  // Monte-Carlo size when noise is set and shots == 0
    bool tomography = false;
    bool route_melbourne = false;
    tec::Decoding decoding = tec::Decoding::Coherent;
    bool include_qnd = false;
    bool device_faithful = false;
    tec::PrepMode prep = tec::PrepMode::Rotation;
    std::string output = "tecsim_out.json";
    std::string format = "json";  // "json" or "csv"
    std::optional<std::string> plot_output;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

struct CaseResult {
    channels::ErrorSpec spec;
    std::optional<tec::DecodeResult> exact;
    std::optional<double> mean_noisy_fidelity;
    std::map<std::string, uint64_t> histogram;
    std::map<std::string, uint64_t> decoded_counts;
    std::optional<tomo::ReconstructionReport> tomography;
    std::optional<int> routing_swaps;
    std::optional<size_t> routing_violations;
};

struct RunOutput {
    std::vector<CaseResult> cases;
    std::string rendered;       // contents written to config.output
    std::string plot_rendered;  // contents written to config.plot_output, if any
};

/// Expands the config into cases, runs them (in parallel, capped by
/// TECSIM_THREADS), renders, and writes the output file(s). Deterministic:
/// same config + seed gives byte-identical files.
RunOutput run_experiment(const ExperimentConfig& config);

/// Density-matrix bar data: experimental vs ideal, one row per entry.
/// Header: row,col,real_exp,imag_exp,real_ideal,imag_ideal
std::string emit_plot_data(const tomo::ReconstructionReport& report,
                           const DensityMatrix& ideal);

}  // namespace tecsim::cli

#endif
