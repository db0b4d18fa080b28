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

#include "tecsim/channels.hpp"

#include <stdexcept>

namespace tecsim::channels {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::None: return "None";
        case ErrorKind::BitFlip: return "BitFlip";
        case ErrorKind::PhaseFlip: return "PhaseFlip";
        case ErrorKind::BitPhaseFlip: return "BitPhaseFlip";
        case ErrorKind::Erasure: return "Erasure";
    }
    throw std::logic_error("unknown ErrorKind");
}

std::optional<ErrorKind> error_kind_from_name(std::string_view name) {
    for (ErrorKind k : {ErrorKind::None, ErrorKind::BitFlip, ErrorKind::PhaseFlip,
                        ErrorKind::BitPhaseFlip, ErrorKind::Erasure}) {
        if (error_kind_name(k) == name) return k;
    }
    return std::nullopt;
}

std::string_view erasure_mode_name(ErasureMode mode) {
    return mode == ErasureMode::GateRemoval ? "GateRemoval" : "ResetAndFlag";
}

std::optional<ErasureMode> erasure_mode_from_name(std::string_view name) {
    if (name == "GateRemoval") return ErasureMode::GateRemoval;
    if (name == "ResetAndFlag") return ErasureMode::ResetAndFlag;
    return std::nullopt;
}

namespace {

size_t marker_index_or_throw(const Circuit& circuit, std::string_view marker) {
    const auto idx = circuit.find_marker(marker);
    if (!idx) {
        throw std::invalid_argument("channels: no marker '" + std::string(marker) +
                                    "' in circuit");
    }
    return *idx;
}

void check_marker_block(const Circuit& circuit, size_t marker_idx, int qubit) {
    const GateOp& m = circuit.ops()[marker_idx];
    if (!m.touches(qubit)) {
        throw std::invalid_argument("channels: qubit " + std::to_string(qubit) +
                                    " is outside the marker's block");
    }
}

Circuit copy_with_insert(const Circuit& circuit, size_t after_index, const GateOp& inserted) {
    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.metadata() = circuit.metadata();
    for (size_t i = 0; i < circuit.ops().size(); ++i) {
        out.append(circuit.ops()[i]);
        if (i == after_index) out.append(inserted);
    }
    return out;
}

}  // namespace

Circuit inject(const Circuit& circuit, const ErrorSpec& spec) {
    if (spec.kind == ErrorKind::None) return circuit;
    if (spec.kind == ErrorKind::Erasure) {
        return erase(circuit, spec.qubit, spec.erasure_mode, spec.marker).first;
    }
    const size_t idx = marker_index_or_throw(circuit, spec.marker);
    check_marker_block(circuit, idx, spec.qubit);
    GateKind kind;
    switch (spec.kind) {
        case ErrorKind::BitFlip: kind = GateKind::X; break;
        case ErrorKind::PhaseFlip: kind = GateKind::Z; break;
        case ErrorKind::BitPhaseFlip: kind = GateKind::Y; break;  // Y = iXZ
        default: throw std::logic_error("inject: unreachable");
    }
    return copy_with_insert(circuit, idx, make_gate(kind, {spec.qubit}));
}

std::pair<Circuit, ErasureFlagHint> erase(const Circuit& circuit, int qubit,
                                          ErasureMode mode, std::string_view marker) {
    const size_t idx = marker_index_or_throw(circuit, marker);
    check_marker_block(circuit, idx, qubit);
    if (circuit.metadata().count("erased")) {
        throw std::invalid_argument("channels: circuit already has an erasure "
                                    "(single-erasure code)");
    }
    ErasureFlagHint hint;
    hint.erased.insert(qubit);

    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.metadata() = circuit.metadata();
    out.metadata()["erased"] = std::to_string(qubit);
    if (mode == ErasureMode::GateRemoval) {
        for (size_t i = 0; i < circuit.ops().size(); ++i) {
            const GateOp& op = circuit.ops()[i];
            if (i < idx && op.kind != GateKind::Marker && op.touches(qubit)) continue;
            out.append(op);
        }
    } else {
        out = copy_with_insert(circuit, idx, make_gate(GateKind::Reset, {qubit}));
        out.metadata()["erased"] = std::to_string(qubit);
    }
    return {std::move(out), std::move(hint)};
}

void NoiseModel::validate() const {
    for (double p : {p1, p2, p_readout}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("NoiseModel: probabilities must be in [0, 1]");
        }
    }
}

Circuit apply_noise(const Circuit& circuit, const NoiseModel& model, RandomSource& rng) {
    model.validate();
    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.metadata() = circuit.metadata();
    for (const GateOp& op : circuit.ops()) {
        out.append(op);
        if (!kind_is_unitary(op.kind) || op.kind == GateKind::Marker) continue;
        const double p = op.qubits.size() == 1 ? model.p1 : model.p2;
        if (p <= 0.0) continue;
        for (int q : op.qubits) {
            if (rng.uniform() >= p) continue;
            const uint64_t pick = rng.next_u64() % 3;
            const GateKind pauli =
                pick == 0 ? GateKind::X : pick == 1 ? GateKind::Y : GateKind::Z;
            out.append(make_gate(pauli, {q}));
        }
    }
    return out;
}

SimResult run_noisy(const Circuit& circuit, const NoiseModel& model, uint64_t shots,
                    uint64_t seed) {
    model.validate();
    if (shots < 1) throw std::invalid_argument("run_noisy: shots must be >= 1");
    if (!circuit.has_measurement()) {
        throw std::invalid_argument("run_noisy: circuit has no Measure ops");
    }
    const RandomSource root(seed);
    SimResult result;
    for (uint64_t shot = 0; shot < shots; ++shot) {
        RandomSource noise_rng = root.substream(2 * shot);
        const Circuit trajectory = apply_noise(circuit, model, noise_rng);
        SimResult one = simulate(trajectory, 1, root.substream(2 * shot + 1).seed(),
                                 model.p_readout);
        for (const auto& [key, count] : one.counts) result.counts[key] += count;
        result.cbit_records.push_back(std::move(one.cbit_records[0]));
    }
    return result;
}

}  // namespace tecsim::channels
