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

#include "tecsim/tec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tecsim::tec {

namespace {

constexpr const char* kMetaPipeline = "tec.pipeline";
constexpr const char* kMetaDecoding = "tec.decoding";
constexpr const char* kMetaQnd = "tec.qnd";
constexpr const char* kMetaDeviceFaithful = "tec.device_faithful";

std::vector<int> identity_map(int n) {
    std::vector<int> map(n);
    for (int i = 0; i < n; ++i) map[i] = i;
    return map;
}

void append_all(Circuit& dst, const Circuit& fragment) {
    dst.append_fragment(fragment, identity_map(fragment.num_qubits()));
}

std::vector<int> support_of(const std::string& letters) {
    std::vector<int> out;
    for (size_t i = 0; i < letters.size(); ++i) {
        if (letters[i] != 'I') out.push_back(static_cast<int>(i));
    }
    return out;
}

/// Rotation turning the letter's eigenbasis into the Z basis.
void apply_basis_rotation(StateVector& st, char letter, int qubit) {
    switch (letter) {
        case 'I':
        case 'Z': break;
        case 'X': st.apply_gate1(gates::h(), qubit); break;
        case 'Y':
            st.apply_z(qubit);
            st.apply_phase(qubit, Amplitude(0, 1));
            st.apply_gate1(gates::h(), qubit);
            break;
        default: throw std::invalid_argument("invalid Pauli letter");
    }
}

}  // namespace

MessageParams MessageParams::defaults() {
    return {std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8)};
}

void MessageParams::validate() const {
    if (std::abs(alpha * alpha + beta * beta - 1.0) > kExactTol) {
        throw std::invalid_argument("MessageParams: alpha^2 + beta^2 must equal 1");
    }
}

StateVector MessageParams::state() const {
    validate();
    return StateVector::from_amplitudes(1, {alpha, beta});
}

int BlockLayout::num_qubits() const {
    return static_cast<int>(message.size() + bell_first.size() + bell_second.size() +
                            ancilla.size());
}

BlockLayout BlockLayout::bitflip() {
    return {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10}};
}

BlockLayout BlockLayout::erasure(bool device_faithful) {
    BlockLayout layout{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}, {12, 13, 14, 15}};
    if (device_faithful) layout.ancilla = {12, 13};
    return layout;
}

PauliFrame PauliFrame::zero(size_t n) {
    PauliFrame f;
    f.x_mask.assign(n, 0);
    f.z_mask.assign(n, 0);
    return f;
}

PauliFrame PauliFrame::compose(const PauliFrame& other) const {
    if (x_mask.size() != other.x_mask.size()) {
        throw std::invalid_argument("PauliFrame::compose: size mismatch");
    }
    PauliFrame out = *this;
    for (size_t i = 0; i < x_mask.size(); ++i) {
        out.x_mask[i] ^= other.x_mask[i];
        out.z_mask[i] ^= other.z_mask[i];
    }
    return out;
}

std::vector<uint8_t> PauliFrame::apply_to_bits(std::span<const uint8_t> z_basis_bits) const {
    if (z_basis_bits.size() != x_mask.size()) {
        throw std::invalid_argument("PauliFrame::apply_to_bits: size mismatch");
    }
    std::vector<uint8_t> out(z_basis_bits.begin(), z_basis_bits.end());
    for (size_t i = 0; i < out.size(); ++i) out[i] ^= x_mask[i];
    return out;
}

namespace {

/// Single-letter product with the phase as a power of i.
void mul_letter(char a, char b, int& quarter, char& out) {
    if (a == 'I') { out = b; return; }
    if (b == 'I') { out = a; return; }
    if (a == b) { out = 'I'; return; }
    // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
    static constexpr char kNext[3] = {'X', 'Y', 'Z'};
    const auto idx = [](char c) { return c == 'X' ? 0 : c == 'Y' ? 1 : 2; };
    const int ia = idx(a), ib = idx(b);
    if ((ia + 1) % 3 == ib) {
        quarter = (quarter + 1) & 3;
        out = kNext[(ia + 2) % 3];
    } else {
        quarter = (quarter + 3) & 3;
        out = kNext[(ib + 2) % 3];
    }
}

PauliString pauli_mul_phase(const PauliString& a, const PauliString& b, int extra_quarter) {
    if (a.letters.size() != b.letters.size()) {
        throw std::invalid_argument("pauli_mul: length mismatch");
    }
    int quarter = extra_quarter;
    std::string letters(a.letters.size(), 'I');
    for (size_t i = 0; i < letters.size(); ++i) {
        mul_letter(a.letters[i], b.letters[i], quarter, letters[i]);
    }
    int sign = a.sign * b.sign;
    if (quarter == 2) sign = -sign;
    else if (quarter != 0) throw std::invalid_argument("pauli_mul: product is not Hermitian");
    return {sign, std::move(letters)};
}

}  // namespace

PauliString pauli_mul(const PauliString& a, const PauliString& b) {
    return pauli_mul_phase(a, b, 0);
}

bool pauli_anticommutes(const PauliString& a, const PauliString& b) {
    if (a.letters.size() != b.letters.size()) {
        throw std::invalid_argument("pauli_anticommutes: length mismatch");
    }
    int clashes = 0;
    for (size_t i = 0; i < a.letters.size(); ++i) {
        const char x = a.letters[i], y = b.letters[i];
        if (x != 'I' && y != 'I' && x != y) ++clashes;
    }
    return clashes % 2 == 1;
}

double pauli_expect_at(const StateVector& state, const PauliString& p, int offset) {
    std::string padded(state.num_qubits(), 'I');
    if (offset < 0 || offset + p.letters.size() > padded.size()) {
        throw std::out_of_range("pauli_expect_at: string does not fit the register");
    }
    std::copy(p.letters.begin(), p.letters.end(), padded.begin() + offset);
    return p.sign * state.pauli_expectation(padded);
}

LogicalReps select_logical_representatives(const ErasureFlag& flag) {
    if (flag.erased && (*flag.erased < 0 || *flag.erased > 3)) {
        throw std::invalid_argument("select_logical_representatives: position must be 0..3");
    }
    LogicalReps reps;
    const int e = flag.erased.value_or(-1);
    // "if the first or third qubit is lost, we measure X_L = IZIZ; if the
    // second or fourth, X_L = ZIZI" (positions here are 0-based).
    reps.x_rep = {1, (e == 1 || e == 3) ? "ZIZI" : "IZIZ"};
    reps.z_rep = {1, (e == 2 || e == 3) ? "XXII" : "IIXX"};
    reps.y_rep = pauli_mul_phase(reps.x_rep, reps.z_rep, 1);  // i * X_L * Z_L
    reps.message_pair = (e == 0 || e == 1) ? std::array<int, 2>{2, 3}
                                           : std::array<int, 2>{0, 1};
    reps.bell_pair = (e == 1 || e == 3) ? std::array<int, 2>{0, 2}
                                        : std::array<int, 2>{1, 3};
    return reps;
}

Circuit prepare_message(const MessageParams& params, PrepMode mode) {
    params.validate();
    Circuit c(1);
    if (mode == PrepMode::Rotation) {
        c.ry(2.0 * std::atan2(params.beta, params.alpha), 0);
    } else {
        // the T, H, S recipe, kept for replication runs
        c.t(0).h(0).s(0);
    }
    return c;
}

Circuit encode_repetition3() {
    Circuit c(3);
    c.cnot(0, 1).cnot(0, 2);
    return c;
}

Circuit prepare_logical_bell_3() {
    Circuit c(6);
    c.h(0);
    for (int t = 1; t < 6; ++t) c.cnot(0, t);
    return c;
}

Circuit syndrome_extract(const BlockLayout& layout) {
    Circuit c(layout.num_qubits());
    const auto& q = layout.bell_first;
    const auto& a = layout.ancilla;
    c.cnot(q[0], a[0]).cnot(q[1], a[0]);  // Z1 Z2
    c.cnot(q[0], a[1]).cnot(q[2], a[1]);  // Z1 Z3
    return c;
}

Circuit coherent_correct(const BlockLayout& layout) {
    Circuit c(layout.num_qubits());
    const auto& q = layout.bell_first;
    const auto& a = layout.ancilla;
    c.cnot(a[0], q[1]);
    c.cnot(a[1], q[2]);
    c.toffoli(a[0], a[1], q[0]);
    c.toffoli(a[0], a[1], q[1]);
    c.toffoli(a[0], a[1], q[2]);
    return c;
}

Circuit teleport_conditionals_3(const BlockLayout& layout) {
    Circuit c(layout.num_qubits());
    for (int i = 0; i < 3; ++i) c.cnot(layout.bell_first[i], layout.bell_second[i]);
    for (int i = 0; i < 3; ++i) c.h(layout.message[i]);
    for (int i = 0; i < 3; ++i) c.cz(layout.message[i], layout.bell_second[i]);
    return c;
}

Circuit encode_parity4() {
    Circuit c(4);
    c.cnot(0, 1).cnot(0, 2).cnot(0, 3).cnot(0, 1).cnot(2, 3);
    c.h(0).h(2);
    c.cnot(0, 1).cnot(2, 3);
    return c;
}

namespace {

Circuit permute_fragment(const Circuit& fragment, const std::vector<int>& perm) {
    Circuit out(fragment.num_qubits(), fragment.num_cbits());
    out.append_fragment(fragment, perm);
    return out;
}

}  // namespace

ParityEncoder parity_encoder_variant(std::optional<int> attach_last) {
    const Circuit base = encode_parity4();
    if (!attach_last || *attach_last == 1 || *attach_last == 3) {
        return {base, 0};
    }
    if (*attach_last == 0) {
        return {permute_fragment(base, {1, 0, 2, 3}), 1};
    }
    if (*attach_last == 2) {
        return {permute_fragment(base, {0, 1, 3, 2}), 0};
    }
    throw std::invalid_argument("parity_encoder_variant: position must be 0..3");
}

Circuit prepare_logical_bell_erasure() {
    Circuit c(8);
    c.h(0).cnot(0, 4);
    const Circuit enc = encode_parity4();
    c.append_fragment(enc, std::vector<int>{0, 1, 2, 3});
    c.append_fragment(enc, std::vector<int>{4, 5, 6, 7});
    return c;
}

Circuit qnd_detect(const BlockLayout& layout) {
    Circuit c(layout.num_qubits());
    for (size_t i = 0; i < layout.ancilla.size(); ++i) {
        c.cnot(layout.message[i], layout.ancilla[i]);
    }
    return c;
}

ErasureFlag extract_erasure_flag(std::span<const double> ancilla_one_probs,
                                 std::optional<int> hint, double tol) {
    std::vector<int> candidates;
    for (size_t i = 0; i < ancilla_one_probs.size(); ++i) {
        if (ancilla_one_probs[i] < tol) candidates.push_back(static_cast<int>(i));
    }
    if (hint) return {hint};
    if (candidates.empty()) return {};
    if (candidates.size() == 1) return {candidates[0]};
    throw std::invalid_argument(
        "extract_erasure_flag: ambiguous silent-ancilla signature; a location hint "
        "is required (erasures are located errors)");
}

std::string_view pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::BitFlip: return "bitflip";
        case Pipeline::PhaseFlip: return "phaseflip";
        case Pipeline::Erasure: return "erasure";
    }
    throw std::logic_error("unknown Pipeline");
}

std::optional<Pipeline> pipeline_from_name(std::string_view name) {
    for (Pipeline p : {Pipeline::BitFlip, Pipeline::PhaseFlip, Pipeline::Erasure}) {
        if (pipeline_name(p) == name) return p;
    }
    return std::nullopt;
}

namespace {

Circuit build_repetition_pipeline(const channels::ErrorSpec& spec, const TecOptions& opts,
                                  bool phase_basis) {
    opts.params.validate();
    const channels::ErrorKind allowed =
        phase_basis ? channels::ErrorKind::PhaseFlip : channels::ErrorKind::BitFlip;
    if (spec.kind != channels::ErrorKind::None && spec.kind != allowed) {
        throw std::invalid_argument(std::string("build_") +
                                    (phase_basis ? "phaseflip" : "bitflip") +
                                    "_tec_circuit: unsupported error kind");
    }
    if (spec.kind != channels::ErrorKind::None && (spec.qubit < 0 || spec.qubit > 2)) {
        throw std::invalid_argument("ErrorSpec: block qubit must be 0..2");
    }
    const BlockLayout layout = BlockLayout::bitflip();
    const bool coherent = opts.decoding == Decoding::Coherent;
    const int num_cbits = opts.terminal_measurement ? (coherent ? 5 : 11) : 0;
    Circuit c(layout.num_qubits(), num_cbits);

    c.append_fragment(prepare_message(opts.params, opts.prep),
                      std::vector<int>{layout.message[0]});
    c.append_fragment(encode_repetition3(), layout.message);
    if (phase_basis) {
        for (int q : layout.message) c.h(q);
    }
    c.marker(spec.marker, layout.message);
    if (phase_basis) {
        for (int q : layout.message) c.h(q);
    }
    {
        std::vector<int> bell_map = layout.bell_first;
        bell_map.insert(bell_map.end(), layout.bell_second.begin(), layout.bell_second.end());
        c.append_fragment(prepare_logical_bell_3(), bell_map);
    }
    for (int i = 0; i < 3; ++i) c.cnot(layout.message[i], layout.bell_first[i]);
    append_all(c, syndrome_extract(layout));
    append_all(c, coherent_correct(layout));
    if (coherent) {
        append_all(c, teleport_conditionals_3(layout));
    } else {
        for (int q : layout.message) c.h(q);
    }
    if (opts.terminal_measurement) {
        for (int i = 0; i < 3; ++i) c.measure(layout.bell_second[i], i);
        c.measure(layout.ancilla[0], 3).measure(layout.ancilla[1], 4);
        if (!coherent) {
            for (int i = 0; i < 3; ++i) c.measure(layout.message[i], 5 + i);
            for (int i = 0; i < 3; ++i) c.measure(layout.bell_first[i], 8 + i);
        }
    }
    c.metadata()[kMetaPipeline] = phase_basis ? "phaseflip" : "bitflip";
    c.metadata()[kMetaDecoding] = coherent ? "coherent" : "pauli-frame";
    return channels::inject(c, spec);
}

}  // namespace

Circuit build_bitflip_tec_circuit(const channels::ErrorSpec& spec, const TecOptions& opts) {
    return build_repetition_pipeline(spec, opts, false);
}

Circuit build_phaseflip_tec_circuit(const channels::ErrorSpec& spec, const TecOptions& opts) {
    return build_repetition_pipeline(spec, opts, true);
}

Circuit build_erasure_tec_circuit(const channels::ErrorSpec& spec, const TecOptions& opts) {
    opts.params.validate();
    if (spec.kind != channels::ErrorKind::None && spec.kind != channels::ErrorKind::Erasure) {
        throw std::invalid_argument("build_erasure_tec_circuit: unsupported error kind");
    }
    const bool erasing = spec.kind == channels::ErrorKind::Erasure;
    if (erasing && (spec.qubit < 0 || spec.qubit > 3)) {
        throw std::invalid_argument("ErrorSpec: block qubit must be 0..3");
    }
    const BlockLayout layout = BlockLayout::erasure(opts.device_faithful);
    const ErasureFlag flag = erasing ? ErasureFlag{spec.qubit} : ErasureFlag{};
    const LogicalReps reps = select_logical_representatives(flag);
    const bool coherent = opts.decoding == Decoding::Coherent;
    const int anc_cbits = opts.include_qnd ? static_cast<int>(layout.ancilla.size()) : 0;
    const int num_cbits =
        opts.terminal_measurement ? (coherent ? 2 : 6) + anc_cbits : 0;
    Circuit c(layout.num_qubits(), num_cbits);

    const bool removal = erasing && spec.erasure_mode == channels::ErasureMode::GateRemoval;
    const ParityEncoder enc =
        parity_encoder_variant(removal ? std::optional<int>(spec.qubit) : std::nullopt);
    c.append_fragment(prepare_message(opts.params, opts.prep),
                      std::vector<int>{layout.message[enc.input_qubit]});
    c.append_fragment(enc.fragment, layout.message);
    c.marker(spec.marker, layout.message);
    if (opts.include_qnd) append_all(c, qnd_detect(layout));
    {
        std::vector<int> bell_map = layout.bell_first;
        bell_map.insert(bell_map.end(), layout.bell_second.begin(), layout.bell_second.end());
        c.append_fragment(prepare_logical_bell_erasure(), bell_map);
    }
    for (int i = 0; i < 4; ++i) c.cnot(layout.message[i], layout.bell_first[i]);

    const std::vector<int> xsup = support_of(reps.x_rep.letters);
    const std::vector<int> zsup = support_of(reps.z_rep.letters);
    if (coherent) {
        // Conditional X_L^(Z_L of message): Z_L is read in the X basis of the
        // intact message pair, X_L applied as CZ onto its Z-type support.
        for (int q : reps.message_pair) c.h(layout.message[q]);
        for (int m : reps.message_pair) {
            for (int t : xsup) c.cz(layout.message[m], layout.bell_second[t]);
        }
        // Conditional Z_L^(X_L of bell_first): X_L read in the Z basis of the
        // chosen bell pair, Z_L applied as CNOT onto its X-type support.
        for (int b : reps.bell_pair) {
            for (int t : zsup) c.cnot(layout.bell_first[b], layout.bell_second[t]);
        }
    } else {
        for (int q : reps.message_pair) c.h(layout.message[q]);
    }
    if (opts.terminal_measurement) {
        for (int t : zsup) c.h(layout.bell_second[t]);
        c.measure(layout.bell_second[zsup[0]], 0);
        c.measure(layout.bell_second[zsup[1]], 1);
        if (!coherent) {
            c.measure(layout.message[reps.message_pair[0]], 2);
            c.measure(layout.message[reps.message_pair[1]], 3);
            c.measure(layout.bell_first[reps.bell_pair[0]], 4);
            c.measure(layout.bell_first[reps.bell_pair[1]], 5);
        }
        const int base = coherent ? 2 : 6;
        if (opts.include_qnd) {
            for (size_t i = 0; i < layout.ancilla.size(); ++i) {
                c.measure(layout.ancilla[i], base + static_cast<int>(i));
            }
        }
    }
    c.metadata()[kMetaPipeline] = "erasure";
    c.metadata()[kMetaDecoding] = coherent ? "coherent" : "pauli-frame";
    c.metadata()[kMetaQnd] = opts.include_qnd ? "1" : "0";
    c.metadata()[kMetaDeviceFaithful] = opts.device_faithful ? "1" : "0";
    if (erasing) {
        return channels::erase(c, spec.qubit, spec.erasure_mode, spec.marker).first;
    }
    return c;
}

Circuit build_pipeline(Pipeline pipeline, const channels::ErrorSpec& spec,
                       const TecOptions& opts) {
    switch (pipeline) {
        case Pipeline::BitFlip: return build_bitflip_tec_circuit(spec, opts);
        case Pipeline::PhaseFlip: return build_phaseflip_tec_circuit(spec, opts);
        case Pipeline::Erasure: return build_erasure_tec_circuit(spec, opts);
    }
    throw std::logic_error("unknown Pipeline");
}

std::vector<ExactBranch> run_exact(const Circuit& circuit) {
    return run_exact_branches(circuit);
}

namespace {

struct PipelineMeta {
    Pipeline pipeline;
    Decoding decoding;
    std::optional<int> erased;
    bool include_qnd = false;
    bool device_faithful = false;
};

PipelineMeta read_meta(const Circuit& circuit) {
    const auto& meta = circuit.metadata();
    const auto it = meta.find(kMetaPipeline);
    if (it == meta.end()) {
        throw std::invalid_argument("decode: circuit was not built by a tec pipeline "
                                    "builder (missing metadata)");
    }
    PipelineMeta out{};
    const auto p = pipeline_from_name(it->second);
    if (!p) throw std::invalid_argument("decode: unknown pipeline '" + it->second + "'");
    out.pipeline = *p;
    out.decoding = meta.count(kMetaDecoding) && meta.at(kMetaDecoding) == "pauli-frame"
                       ? Decoding::PauliFrame
                       : Decoding::Coherent;
    if (meta.count("erased")) out.erased = std::stoi(meta.at("erased"));
    out.include_qnd = meta.count(kMetaQnd) && meta.at(kMetaQnd) == "1";
    out.device_faithful =
        meta.count(kMetaDeviceFaithful) && meta.at(kMetaDeviceFaithful) == "1";
    return out;
}

int majority3(int a, int b, int c) { return (a + b + c) >= 2 ? 1 : 0; }

std::array<double, 3> ideal_bloch(const MessageParams& params) {
    return {2 * params.alpha * params.beta, 0.0,
            params.alpha * params.alpha - params.beta * params.beta};
}

DecodeResult decode_repetition_exact(const std::vector<ExactBranch>& branches,
                                     const PipelineMeta& meta, const MessageParams& params) {
    const BlockLayout layout = BlockLayout::bitflip();
    DecodeResult result;
    double pa1 = 0.0, pa2 = 0.0;
    for (const auto& [p, state] : branches) {
        pa1 += p * (1.0 - state.prob_zero(layout.ancilla[0]));
        pa2 += p * (1.0 - state.prob_zero(layout.ancilla[1]));
    }
    result.syndrome_probs = {pa1, pa2};
    const auto near = [](double v, double t) { return std::abs(v - t) < 1e-9; };
    if ((near(pa1, 0) || near(pa1, 1)) && (near(pa2, 0) || near(pa2, 1))) {
        result.syndrome = SyndromeRecord{near(pa1, 1) ? 1 : 0, near(pa2, 1) ? 1 : 0};
    }

    if (meta.decoding == Decoding::Coherent) {
        double p0 = 0.0;
        DensityMatrix rho = DensityMatrix::zeros(1);
        for (const auto& [p, state] : branches) {
            const auto marg = state.marginal_probabilities(layout.bell_second);
            for (size_t pat = 0; pat < marg.size(); ++pat) {
                const int logical =
                    majority3(pat & 1, (pat >> 1) & 1, (pat >> 2) & 1);
                if (logical == 0) p0 += p * marg[pat];
            }
            StateVector decoded = state;
            decoded.apply_cnot(layout.bell_second[0], layout.bell_second[2]);
            decoded.apply_cnot(layout.bell_second[0], layout.bell_second[1]);
            const std::vector<int> keep{layout.bell_second[0]};
            rho.add_scaled(partial_trace(decoded, keep), p);
        }
        result.p_logical0 = p0;
        result.fidelity = fidelity_pure(rho, params.state());
        result.bloch = {2 * rho.at(1, 0).real(), 2 * rho.at(1, 0).imag(),
                        rho.at(0, 0).real() - rho.at(1, 1).real()};
    } else {
        double p0 = 0.0;
        std::vector<int> qs = layout.bell_second;
        qs.push_back(layout.bell_first[0]);
        for (const auto& [p, state] : branches) {
            const auto marg = state.marginal_probabilities(qs);
            for (size_t pat = 0; pat < marg.size(); ++pat) {
                const int u = (pat >> 3) & 1;
                const int logical =
                    majority3(pat & 1, (pat >> 1) & 1, (pat >> 2) & 1) ^ u;
                if (logical == 0) p0 += p * marg[pat];
            }
        }
        result.p_logical0 = p0;
    }
    return result;
}

DecodeResult decode_erasure_exact(const std::vector<ExactBranch>& branches,
                                  const PipelineMeta& meta, const MessageParams& params) {
    const BlockLayout layout = BlockLayout::erasure(meta.device_faithful);
    const ErasureFlag flag{meta.erased};
    const LogicalReps reps = select_logical_representatives(flag);
    const int out0 = layout.bell_second[0];
    DecodeResult result;
    result.flag = flag;

    if (meta.include_qnd) {
        std::vector<double> anc_probs(layout.ancilla.size(), 0.0);
        for (const auto& [p, state] : branches) {
            for (size_t i = 0; i < layout.ancilla.size(); ++i) {
                anc_probs[i] += p * (1.0 - state.prob_zero(layout.ancilla[i]));
            }
        }
        result.flag = extract_erasure_flag(anc_probs, meta.erased);
    }

    const std::vector<int> zsup = support_of(reps.z_rep.letters);
    if (meta.decoding == Decoding::Coherent) {
        std::array<double, 3> bloch{0, 0, 0};
        double p0 = 0.0;
        for (const auto& [p, state] : branches) {
            bloch[0] += p * pauli_expect_at(state, reps.x_rep, out0);
            bloch[1] += p * pauli_expect_at(state, reps.y_rep, out0);
            bloch[2] += p * pauli_expect_at(state, reps.z_rep, out0);
            StateVector rotated = state;
            for (int t : zsup) rotated.apply_gate1(gates::h(), layout.bell_second[t]);
            const std::vector<int> qs{layout.bell_second[zsup[0]],
                                      layout.bell_second[zsup[1]]};
            const auto marg = rotated.marginal_probabilities(qs);
            p0 += p * (marg[0] + marg[3]);  // even parity
        }
        result.bloch = bloch;
        result.p_logical0 = p0;
        const auto ideal = ideal_bloch(params);
        result.fidelity = std::clamp(
            0.5 * (1.0 + bloch[0] * ideal[0] + bloch[1] * ideal[1] + bloch[2] * ideal[2]),
            0.0, 1.0);
    } else {
        double p0 = 0.0;
        const std::vector<int> qs{
            layout.bell_second[zsup[0]], layout.bell_second[zsup[1]],
            layout.message[reps.message_pair[0]], layout.message[reps.message_pair[1]]};
        for (const auto& [p, state] : branches) {
            StateVector rotated = state;
            for (int t : zsup) rotated.apply_gate1(gates::h(), layout.bell_second[t]);
            const auto marg = rotated.marginal_probabilities(qs);
            for (size_t pat = 0; pat < marg.size(); ++pat) {
                const int z_parity = (pat & 1) ^ ((pat >> 1) & 1);
                const int a = ((pat >> 2) & 1) ^ ((pat >> 3) & 1);
                if ((z_parity ^ a) == 0) p0 += p * marg[pat];
            }
        }
        result.p_logical0 = p0;
    }
    return result;
}

}  // namespace

DecodeResult evaluate_exact(const Circuit& pipeline_circuit, const MessageParams& params) {
    const PipelineMeta meta = read_meta(pipeline_circuit);
    const auto branches = run_exact(pipeline_circuit);
    if (meta.pipeline == Pipeline::Erasure) {
        return decode_erasure_exact(branches, meta, params);
    }
    return decode_repetition_exact(branches, meta, params);
}

int decode_bits(const Circuit& pipeline_circuit, std::span<const uint8_t> cbits) {
    const PipelineMeta meta = read_meta(pipeline_circuit);
    if (cbits.size() != static_cast<size_t>(pipeline_circuit.num_cbits())) {
        throw std::invalid_argument("decode_bits: cbit record size mismatch");
    }
    if (meta.pipeline == Pipeline::Erasure) {
        int logical = cbits[0] ^ cbits[1];
        if (meta.decoding == Decoding::PauliFrame) logical ^= cbits[2] ^ cbits[3];
        return logical;
    }
    int logical = majority3(cbits[0], cbits[1], cbits[2]);
    if (meta.decoding == Decoding::PauliFrame) logical ^= cbits[8];
    return logical;
}

double logical_basis_p0_exact(const Circuit& pipeline_circuit, char basis) {
    const PipelineMeta meta = read_meta(pipeline_circuit);
    if (meta.decoding != Decoding::Coherent) {
        throw std::invalid_argument("logical_basis_p0_exact: coherent decoding required");
    }
    const auto branches = run_exact(pipeline_circuit);
    double p0 = 0.0;
    if (meta.pipeline == Pipeline::Erasure) {
        const BlockLayout layout = BlockLayout::erasure(meta.device_faithful);
        const LogicalReps reps = select_logical_representatives({meta.erased});
        const PauliString& rep = basis == 'X'   ? reps.x_rep
                                 : basis == 'Y' ? reps.y_rep
                                 : basis == 'Z' ? reps.z_rep
                                                : throw std::invalid_argument(
                                                      "basis must be X, Y or Z");
        const std::vector<int> sup = support_of(rep.letters);
        for (const auto& [p, state] : branches) {
            StateVector rotated = state;
            std::vector<int> qs;
            for (int pos : sup) {
                apply_basis_rotation(rotated, rep.letters[pos], layout.bell_second[pos]);
                qs.push_back(layout.bell_second[pos]);
            }
            const auto marg = rotated.marginal_probabilities(qs);
            double even = 0.0;
            for (size_t pat = 0; pat < marg.size(); ++pat) {
                if (std::popcount(pat) % 2 == 0) even += marg[pat];
            }
            p0 += p * (rep.sign < 0 ? 1.0 - even : even);
        }
        return p0;
    }
    const BlockLayout layout = BlockLayout::bitflip();
    for (const auto& [p, state] : branches) {
        StateVector decoded = state;
        decoded.apply_cnot(layout.bell_second[0], layout.bell_second[2]);
        decoded.apply_cnot(layout.bell_second[0], layout.bell_second[1]);
        if (basis == 'X' || basis == 'Y') {
            apply_basis_rotation(decoded, basis, layout.bell_second[0]);
        } else if (basis != 'Z') {
            throw std::invalid_argument("basis must be X, Y or Z");
        }
        p0 += p * decoded.prob_zero(layout.bell_second[0]);
    }
    return p0;
}

std::map<std::string, uint64_t> sample_logical_basis(const Circuit& pipeline_circuit,
                                                     char basis, uint64_t shots,
                                                     uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample_logical_basis: shots must be >= 1");
    const double p0 = logical_basis_p0_exact(pipeline_circuit, basis);
    const RandomSource root(seed);
    std::map<std::string, uint64_t> counts;
    for (uint64_t shot = 0; shot < shots; ++shot) {
        RandomSource sub = root.substream(shot);
        ++counts[sub.uniform() < p0 ? "0" : "1"];
    }
    return counts;
}

std::vector<uint8_t> apply_pauli_frame(const PauliFrame& frame,
                                       std::span<const uint8_t> measured_bits) {
    return frame.apply_to_bits(measured_bits);
}

double noisy_mean_fidelity(const Circuit& pipeline_circuit, const MessageParams& params,
                           const channels::NoiseModel& model, int trajectories,
                           uint64_t seed) {
    if (trajectories < 1) {
        throw std::invalid_argument("noisy_mean_fidelity: trajectories must be >= 1");
    }
    const RandomSource root(seed);
    double acc = 0.0;
    for (int t = 0; t < trajectories; ++t) {
        RandomSource rng = root.substream(static_cast<uint64_t>(t));
        const Circuit trajectory = channels::apply_noise(pipeline_circuit, model, rng);
        const DecodeResult r = evaluate_exact(trajectory, params);
        if (!r.fidelity) {
            throw std::logic_error("noisy_mean_fidelity: fidelity unavailable");
        }
        acc += *r.fidelity;
    }
    return acc / trajectories;
}

}  // namespace tecsim::tec
