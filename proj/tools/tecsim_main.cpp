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

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tecsim/cli_runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tecsim - teleportation-based error correction experiments"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "run a batch experiment");
    std::string config_path;
    std::string pipeline, error_kind, erasure_mode, decoding, prep, out_path, format,
        plot_out;
    int error_qubit = -1;
    int64_t shots = -1, seed = -1, trajectories = -1;
    double noise_p1 = -1, noise_p2 = -1, noise_readout = -1;
    bool tomography = false, route = false, qnd = false, device_faithful = false;

    run->add_option("--config", config_path, "experiment config JSON file");
    run->add_option("--pipeline", pipeline, "bitflip | phaseflip | erasure");
    run->add_option("--error-kind", error_kind,
                    "None | BitFlip | PhaseFlip | Erasure | all-single");
    run->add_option("--error-qubit", error_qubit, "block qubit the error acts on");
    run->add_option("--erasure-mode", erasure_mode, "GateRemoval | ResetAndFlag");
    run->add_option("--shots", shots, "0 = exact statevector mode");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--noise-p1", noise_p1, "depolarizing probability after 1q gates");
    run->add_option("--noise-p2", noise_p2, "depolarizing probability after 2q/3q gates");
    run->add_option("--noise-readout", noise_readout, "readout flip probability");
    run->add_option("--trajectories", trajectories,
                    "Monte-Carlo trajectories (noise + shots=0)");
    run->add_flag("--tomography", tomography, "reconstruct the decoded qubit");
    run->add_flag("--route", route, "route onto the Melbourne map and report");
    run->add_option("--decoding", decoding, "coherent | pauli-frame");
    run->add_flag("--qnd", qnd, "include the QND detection block (erasure)");
    run->add_flag("--device-faithful", device_faithful, "14-qubit erasure register");
    run->add_option("--prep", prep, "rotation | ths-sequence");
    run->add_option("--out", out_path, "output file path");
    run->add_option("--format", format, "json | csv");
    run->add_option("--plot-out", plot_out, "density-matrix bar CSV (needs tomography)");

    CLI11_PARSE(app, argc, argv);

    try {
        tecsim::cli::ExperimentConfig config;
        if (!config_path.empty()) {
            config = tecsim::cli::config_from_json(read_file(config_path));
        }
        if (!pipeline.empty()) {
            const auto p = tecsim::tec::pipeline_from_name(pipeline);
            if (!p) throw std::invalid_argument("unknown pipeline '" + pipeline + "'");
            config.pipeline = *p;
        }
        if (!error_kind.empty()) {
            if (error_kind == "all-single") {
                config.error.reset();
            } else {
                const auto kind = tecsim::channels::error_kind_from_name(error_kind);
                if (!kind) throw std::invalid_argument("unknown error kind " + error_kind);
                tecsim::channels::ErrorSpec spec =
                    config.error.value_or(tecsim::channels::ErrorSpec{});
                spec.kind = *kind;
                config.error = spec;
            }
        }
        if (error_qubit >= 0) {
            tecsim::channels::ErrorSpec spec =
                config.error.value_or(tecsim::channels::ErrorSpec{});
            spec.qubit = error_qubit;
            config.error = spec;
        }
        if (!erasure_mode.empty()) {
            const auto mode = tecsim::channels::erasure_mode_from_name(erasure_mode);
            if (!mode) throw std::invalid_argument("unknown erasure mode " + erasure_mode);
            tecsim::channels::ErrorSpec spec =
                config.error.value_or(tecsim::channels::ErrorSpec{});
            spec.erasure_mode = *mode;
            config.error = spec;
        }
        if (shots >= 0) config.shots = static_cast<uint64_t>(shots);
        if (seed >= 0) config.seed = static_cast<uint64_t>(seed);
        if (noise_p1 >= 0 || noise_p2 >= 0 || noise_readout >= 0) {
            tecsim::channels::NoiseModel model =
                config.noise.value_or(tecsim::channels::NoiseModel{});
            if (noise_p1 >= 0) model.p1 = noise_p1;
            if (noise_p2 >= 0) model.p2 = noise_p2;
            if (noise_readout >= 0) model.p_readout = noise_readout;
            model.validate();
            config.noise = model;
        }
        if (trajectories > 0) config.trajectories = static_cast<int>(trajectories);
        if (tomography) config.tomography = true;
        if (route) config.route_melbourne = true;
        if (!decoding.empty()) {
            if (decoding == "coherent") config.decoding = tecsim::tec::Decoding::Coherent;
            else if (decoding == "pauli-frame")
                config.decoding = tecsim::tec::Decoding::PauliFrame;
            else throw std::invalid_argument("decoding must be coherent or pauli-frame");
        }
        if (qnd) config.include_qnd = true;
        if (device_faithful) config.device_faithful = true;
        if (!prep.empty()) {
            if (prep == "rotation") config.prep = tecsim::tec::PrepMode::Rotation;
            else if (prep == "ths-sequence")
                config.prep = tecsim::tec::PrepMode::ThsSequence;
            else throw std::invalid_argument("prep must be rotation or ths-sequence");
        }
        if (!out_path.empty()) config.output = out_path;
        if (!format.empty()) config.format = format;
        if (!plot_out.empty()) config.plot_output = plot_out;

        const auto start = std::chrono::steady_clock::now();
        const tecsim::cli::RunOutput output = tecsim::cli::run_experiment(config);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        std::cerr << "tecsim: " << output.cases.size() << " case(s) -> " << config.output
                  << " (" << elapsed << " ms)\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "tecsim: error: " << err.what() << "\n";
        return 1;
    }
}
