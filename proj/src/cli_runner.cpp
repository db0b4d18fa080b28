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

#include "tecsim/cli_runner.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tecsim/layout.hpp"

namespace tecsim::cli {

namespace {

using nlohmann::json;

json error_to_json(const channels::ErrorSpec& spec) {
    json j;
    j["kind"] = std::string(channels::error_kind_name(spec.kind));
    j["qubit"] = spec.qubit;
    if (spec.kind == channels::ErrorKind::Erasure) {
        j["erasure_mode"] = std::string(channels::erasure_mode_name(spec.erasure_mode));
    }
    return j;
}

channels::ErrorSpec error_from_json(const json& j) {
    channels::ErrorSpec spec;
    const auto kind = channels::error_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) {
        throw std::invalid_argument("config: unknown error kind '" +
                                    j.at("kind").get<std::string>() + "'");
    }
    spec.kind = *kind;
    if (j.contains("qubit")) spec.qubit = j["qubit"].get<int>();
    if (j.contains("erasure_mode")) {
        const auto mode =
            channels::erasure_mode_from_name(j["erasure_mode"].get<std::string>());
        if (!mode) throw std::invalid_argument("config: unknown erasure_mode");
        spec.erasure_mode = *mode;
    }
    return spec;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + err.what());
    }
    ExperimentConfig config;
    const auto pipeline = tec::pipeline_from_name(doc.at("pipeline").get<std::string>());
    if (!pipeline) {
        throw std::invalid_argument("config: unknown pipeline '" +
                                    doc.at("pipeline").get<std::string>() + "'");
    }
    config.pipeline = *pipeline;
    if (doc.contains("error")) {
        if (doc["error"].is_string()) {
            if (doc["error"].get<std::string>() != "all-single") {
                throw std::invalid_argument("config: error must be an object or \"all-single\"");
            }
        } else {
            config.error = error_from_json(doc["error"]);
        }
    }
    if (doc.contains("shots")) config.shots = doc["shots"].get<uint64_t>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<uint64_t>();
    if (doc.contains("noise")) {
        channels::NoiseModel model;
        model.p1 = doc["noise"].value("p1", 0.0);
        model.p2 = doc["noise"].value("p2", 0.0);
        model.p_readout = doc["noise"].value("p_readout", 0.0);
        model.validate();
        config.noise = model;
    }
    if (doc.contains("trajectories")) config.trajectories = doc["trajectories"].get<int>();
    if (doc.contains("tomography")) config.tomography = doc["tomography"].get<bool>();
    if (doc.contains("route")) config.route_melbourne = doc["route"].get<bool>();
    if (doc.contains("decoding")) {
        const std::string d = doc["decoding"].get<std::string>();
        if (d == "coherent") config.decoding = tec::Decoding::Coherent;
        else if (d == "pauli-frame") config.decoding = tec::Decoding::PauliFrame;
        else throw std::invalid_argument("config: decoding must be coherent or pauli-frame");
    }
    if (doc.contains("qnd")) config.include_qnd = doc["qnd"].get<bool>();
    if (doc.contains("device_faithful")) {
        config.device_faithful = doc["device_faithful"].get<bool>();
    }
    if (doc.contains("prep")) {
        const std::string p = doc["prep"].get<std::string>();
        if (p == "rotation") config.prep = tec::PrepMode::Rotation;
        else if (p == "ths-sequence") config.prep = tec::PrepMode::ThsSequence;
        else throw std::invalid_argument("config: prep must be rotation or ths-sequence");
    }
    if (doc.contains("output")) config.output = doc["output"].get<std::string>();
    if (doc.contains("format")) config.format = doc["format"].get<std::string>();
    if (config.format != "json" && config.format != "csv") {
        throw std::invalid_argument("config: format must be json or csv");
    }
    if (doc.contains("plot_output")) {
        config.plot_output = doc["plot_output"].get<std::string>();
    }
    return config;
}

std::string config_to_json(const ExperimentConfig& config) {
    json doc;
    doc["pipeline"] = std::string(tec::pipeline_name(config.pipeline));
    if (config.error) {
        doc["error"] = error_to_json(*config.error);
    } else {
        doc["error"] = "all-single";
    }
    doc["shots"] = config.shots;
    doc["seed"] = config.seed;
    if (config.noise) {
        doc["noise"] = {{"p1", config.noise->p1},
                        {"p2", config.noise->p2},
                        {"p_readout", config.noise->p_readout}};
        doc["trajectories"] = config.trajectories;
    }
    doc["tomography"] = config.tomography;
    doc["route"] = config.route_melbourne;
    doc["decoding"] =
        config.decoding == tec::Decoding::Coherent ? "coherent" : "pauli-frame";
    doc["qnd"] = config.include_qnd;
    doc["device_faithful"] = config.device_faithful;
    doc["prep"] = config.prep == tec::PrepMode::Rotation ? "rotation" : "ths-sequence";
    doc["output"] = config.output;
    doc["format"] = config.format;
    if (config.plot_output) doc["plot_output"] = *config.plot_output;
    return doc.dump(2);
}

namespace {

std::vector<channels::ErrorSpec> expand_cases(const ExperimentConfig& config) {
    if (config.error) return {*config.error};
    std::vector<channels::ErrorSpec> cases;
    if (config.pipeline == tec::Pipeline::Erasure) {
        for (int q = 0; q < 4; ++q) {
            channels::ErrorSpec spec;
            spec.kind = channels::ErrorKind::Erasure;
            spec.qubit = q;
            cases.push_back(spec);
        }
    } else {
        cases.push_back({});
        const channels::ErrorKind kind = config.pipeline == tec::Pipeline::BitFlip
                                             ? channels::ErrorKind::BitFlip
                                             : channels::ErrorKind::PhaseFlip;
        for (int q = 0; q < 3; ++q) {
            channels::ErrorSpec spec;
            spec.kind = kind;
            spec.qubit = q;
            cases.push_back(spec);
        }
    }
    return cases;
}

tec::TecOptions options_for(const ExperimentConfig& config, bool terminal_measurement) {
    tec::TecOptions opts;
    opts.prep = config.prep;
    opts.decoding = config.decoding;
    opts.include_qnd = config.include_qnd;
    opts.device_faithful = config.device_faithful;
    opts.terminal_measurement = terminal_measurement;
    return opts;
}

CaseResult run_case(const ExperimentConfig& config, const channels::ErrorSpec& spec,
                    uint64_t case_seed) {
    CaseResult result;
    result.spec = spec;
    const tec::MessageParams params = tec::MessageParams::defaults();

    const Circuit exact_circuit =
        tec::build_pipeline(config.pipeline, spec, options_for(config, false));

    if (config.noise && config.shots == 0) {
        if (config.decoding != tec::Decoding::Coherent) {
            throw std::invalid_argument("noise Monte-Carlo requires coherent decoding");
        }
        result.mean_noisy_fidelity = tec::noisy_mean_fidelity(
            exact_circuit, params, *config.noise, config.trajectories, case_seed);
        result.exact = tec::evaluate_exact(exact_circuit, params);
    } else if (config.shots == 0) {
        result.exact = tec::evaluate_exact(exact_circuit, params);
    } else {
        const Circuit measured_circuit =
            tec::build_pipeline(config.pipeline, spec, options_for(config, true));
        const SimResult sim =
            config.noise
                ? channels::run_noisy(measured_circuit, *config.noise, config.shots,
                                      case_seed)
                : simulate(measured_circuit, config.shots, case_seed);
        result.histogram = sim.counts;
        for (const auto& record : sim.cbit_records) {
            const int logical = tec::decode_bits(measured_circuit, record);
            ++result.decoded_counts[logical == 0 ? "0" : "1"];
        }
        if (!config.noise) result.exact = tec::evaluate_exact(exact_circuit, params);
    }

    if (config.tomography) {
        if (config.decoding != tec::Decoding::Coherent) {
            throw std::invalid_argument("tomography requires coherent decoding");
        }
        const uint64_t shots = config.shots > 0 ? config.shots : 8192;
        std::vector<tomo::BasisCounts> counts;
        int setting_index = 0;
        for (char basis : {'X', 'Y', 'Z'}) {
            const auto hist = tec::sample_logical_basis(
                exact_circuit, basis,
                shots, RandomSource(case_seed).substream(1000 + setting_index++).seed());
            tomo::BasisCounts bc{std::string(1, basis), {}};
            for (const auto& [key, v] : hist) bc.histogram[key] = static_cast<double>(v);
            counts.push_back(std::move(bc));
        }
        result.tomography = tomo::reconstruct(counts, params.state());
    }

    if (config.route_melbourne) {
        const maps::CouplingMap melbourne = maps::melbourne_map();
        Circuit routable =
            tec::build_pipeline(config.pipeline, spec, options_for(config, false));
        if (routable.num_qubits() > melbourne.num_qubits) {
            throw std::invalid_argument(
                "case '" + std::string(channels::error_kind_name(spec.kind)) + " q" +
                std::to_string(spec.qubit) + "': " + std::to_string(routable.num_qubits()) +
                " qubits exceed the 14-qubit Melbourne map (use device_faithful)");
        }
        const maps::RoutedCircuit routed =
            maps::route(maps::decompose_toffoli(routable), melbourne);
        result.routing_swaps = routed.swaps_inserted;
        result.routing_violations =
            maps::validate(routed.circuit, melbourne, maps::DirectionPolicy::AllowReversed)
                .size();
    }
    return result;
}

std::string format_double(double v) {
    json j = v;
    return j.dump();
}

json case_to_json(const CaseResult& c) {
    json j;
    j["error"] = error_to_json(c.spec);
    if (c.exact) {
        j["fidelity"] = c.exact->fidelity ? json(*c.exact->fidelity) : json(nullptr);
        j["p_logical0"] = c.exact->p_logical0;
        if (c.exact->syndrome) {
            j["syndrome"] = {c.exact->syndrome->a1, c.exact->syndrome->a2};
        }
        if (c.exact->syndrome_probs) {
            j["syndrome_probs"] = {(*c.exact->syndrome_probs)[0],
                                   (*c.exact->syndrome_probs)[1]};
        }
        if (c.exact->flag.erased) {
            j["flag"] = {*c.exact->flag.erased};
        } else {
            j["flag"] = json::array();
        }
        if (c.exact->fidelity) j["bloch"] = c.exact->bloch;
    }
    if (c.mean_noisy_fidelity) j["mean_noisy_fidelity"] = *c.mean_noisy_fidelity;
    if (!c.histogram.empty()) j["histogram"] = c.histogram;
    if (!c.decoded_counts.empty()) j["decoded_counts"] = c.decoded_counts;
    if (c.tomography) j["tomography"] = json::parse(tomo::report_to_json(*c.tomography));
    if (c.routing_swaps) {
        j["routing"] = {{"swaps_inserted", *c.routing_swaps},
                        {"violations", static_cast<uint64_t>(*c.routing_violations)}};
    }
    return j;
}

std::string render_csv(const std::vector<CaseResult>& cases) {
    std::ostringstream out;
    out << "case,error_kind,error_qubit,erasure_mode,fidelity,p_logical0,"
           "syndrome_a1,syndrome_a2,flag,decoded0,decoded1,mean_noisy_fidelity,"
           "routing_swaps\n";
    for (size_t i = 0; i < cases.size(); ++i) {
        const CaseResult& c = cases[i];
        out << i << ',' << channels::error_kind_name(c.spec.kind) << ','
            << (c.spec.kind == channels::ErrorKind::None ? "" : std::to_string(c.spec.qubit))
            << ','
            << (c.spec.kind == channels::ErrorKind::Erasure
                    ? std::string(channels::erasure_mode_name(c.spec.erasure_mode))
                    : "")
            << ',';
        if (c.exact && c.exact->fidelity) out << format_double(*c.exact->fidelity);
        out << ',';
        if (c.exact) out << format_double(c.exact->p_logical0);
        out << ',';
        if (c.exact && c.exact->syndrome) {
            out << c.exact->syndrome->a1 << ',' << c.exact->syndrome->a2;
        } else {
            out << ',';
        }
        out << ',';
        if (c.exact && c.exact->flag.erased) out << *c.exact->flag.erased;
        out << ',';
        if (c.decoded_counts.count("0")) out << c.decoded_counts.at("0");
        out << ',';
        if (c.decoded_counts.count("1")) out << c.decoded_counts.at("1");
        out << ',';
        if (c.mean_noisy_fidelity) out << format_double(*c.mean_noisy_fidelity);
        out << ',';
        if (c.routing_swaps) out << *c.routing_swaps;
        out << '\n';
    }
    return out.str();
}

int thread_cap() {
    if (const char* env = std::getenv("TECSIM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::string emit_plot_data(const tomo::ReconstructionReport& report,
                           const DensityMatrix& ideal) {
    if (report.rho.num_qubits() != ideal.num_qubits()) {
        throw std::invalid_argument("emit_plot_data: dimension mismatch");
    }
    const int n = report.rho.num_qubits();
    const int dim = report.rho.dim();
    std::ostringstream out;
    out << "row,col,real_exp,imag_exp,real_ideal,imag_ideal\n";
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            std::string rl(n, '0'), cl(n, '0');
            for (int b = 0; b < n; ++b) {
                if ((r >> b) & 1) rl[b] = '1';
                if ((c >> b) & 1) cl[b] = '1';
            }
            out << rl << ',' << cl << ',' << format_double(report.rho.at(r, c).real())
                << ',' << format_double(report.rho.at(r, c).imag()) << ','
                << format_double(ideal.at(r, c).real()) << ','
                << format_double(ideal.at(r, c).imag()) << '\n';
        }
    }
    return out.str();
}

RunOutput run_experiment(const ExperimentConfig& config) {
    const std::vector<channels::ErrorSpec> specs = expand_cases(config);
    const RandomSource root(config.seed);

    RunOutput output;
    output.cases.resize(specs.size());
    const int cap = thread_cap();
    size_t next = 0;
    while (next < specs.size()) {
        const size_t batch = std::min<size_t>(cap, specs.size() - next);
        std::vector<std::future<CaseResult>> futures;
        for (size_t k = 0; k < batch; ++k) {
            const size_t index = next + k;
            futures.push_back(std::async(std::launch::async, [&, index] {
                return run_case(config, specs[index], root.substream(index).seed());
            }));
        }
        for (size_t k = 0; k < batch; ++k) output.cases[next + k] = futures[k].get();
        next += batch;
    }

    if (config.format == "json") {
        json doc;
        doc["version"] = 1;
        doc["config"] = json::parse(config_to_json(config));
        json cases = json::array();
        for (const CaseResult& c : output.cases) cases.push_back(case_to_json(c));
        doc["cases"] = std::move(cases);
        output.rendered = doc.dump(2) + "\n";
    } else {
        output.rendered = render_csv(output.cases);
    }
    {
        std::ofstream file(config.output, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write output file " + config.output);
        file << output.rendered;
    }
    if (config.plot_output) {
        const auto with_tomo =
            std::find_if(output.cases.begin(), output.cases.end(),
                         [](const CaseResult& c) { return c.tomography.has_value(); });
        if (with_tomo == output.cases.end()) {
            throw std::invalid_argument("plot output requested but tomography was not run");
        }
        output.plot_rendered = emit_plot_data(
            *with_tomo->tomography, pure_density(tec::MessageParams::defaults().state()));
        std::ofstream file(*config.plot_output, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot write plot file " + *config.plot_output);
        }
        file << output.plot_rendered;
    }
    return output;
}

}  // namespace tecsim::cli
