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

#ifndef TECSIM_TEC_HPP
#define TECSIM_TEC_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tecsim/channels.hpp"
#include "tecsim/circuit.hpp"

namespace tecsim::tec {

/// Message amplitudes alpha|0> + beta|1>. Defaults to alpha = cos(pi/8),
/// beta = sin(pi/8) exactly (the rounded 0.92/0.38 pair is not normalized).
struct MessageParams {
    double alpha;
    double beta;

    static MessageParams defaults();
    void validate() const;
    StateVector state() const;  // the ideal 1-qubit message
};

enum class PrepMode { Rotation, ThsSequence };

/// Physical qubit roles for a pipeline register.
struct BlockLayout {
    std::vector<int> message;
    std::vector<int> bell_first;
    std::vector<int> bell_second;
    std::vector<int> ancilla;

    int num_qubits() const;

    /// 11 qubits: message 0-2, bell halves 3-5 / 6-8, syndrome ancillas 9-10.
    static BlockLayout bitflip();
    /// 16 qubits: message 0-3, bell halves 4-7 / 8-11, QND ancillas 12-15.
    /// The device-faithful variant drops the last two QND ancillas (14 qubits).
    static BlockLayout erasure(bool device_faithful = false);
};

/// Stabilizer outcomes (Z1Z2, Z1Z3) of the bit-flip code.
struct SyndromeRecord {
    int a1 = 0;
    int a2 = 0;
    bool operator==(const SyndromeRecord&) const = default;
};

/// Known erased location (at most one for this code).
struct ErasureFlag {
    std::optional<int> erased;
    bool operator==(const ErasureFlag&) const = default;
};

/// Classical record of pending X/Z corrections on an output block.
struct PauliFrame {
    std::vector<uint8_t> x_mask;
    std::vector<uint8_t> z_mask;

    static PauliFrame zero(size_t n);
    PauliFrame compose(const PauliFrame& other) const;  // XOR of masks
    /// x_mask flips measured Z-basis bits; z_mask leaves them unchanged.
    std::vector<uint8_t> apply_to_bits(std::span<const uint8_t> z_basis_bits) const;
};

/// Signed Pauli string (sign in {+1, -1}; letters over {I,X,Y,Z}).
struct PauliString {
    int sign = 1;
    std::string letters;

    bool operator==(const PauliString&) const = default;
};

/// Product a*b with the phase folded into the sign; throws if the product
/// carries a residual factor of i (non-Hermitian product).
PauliString pauli_mul(const PauliString& a, const PauliString& b);

bool pauli_anticommutes(const PauliString& a, const PauliString& b);

/// Signed expectation of `p` embedded at `offset` in an n-qubit register.
double pauli_expect_at(const StateVector& state, const PauliString& p, int offset);

/// Logical operator representatives of the 4-qubit parity/redundancy code,
/// chosen so their support avoids the erased position.
/// X_L in {IZIZ, ZIZI}; Z_L in {IIXX, XXII}; Y_L = i X_L Z_L.
struct LogicalReps {
    PauliString x_rep;
    PauliString z_rep;
    PauliString y_rep;
    /// The two message-block qubits whose X-basis parity reads Z_L, and the
    /// two bell_first qubits whose Z-basis parity reads X_L (both avoid the
    /// erased position).
    std::array<int, 2> message_pair;
    std::array<int, 2> bell_pair;
};

LogicalReps select_logical_representatives(const ErasureFlag& flag);

// ---- circuit fragments -----------------------------------------------------

/// Message preparation. Rotation mode uses Ry and reproduces the exact
/// cos(pi/8)|0> + sin(pi/8)|1>; ThsSequence replays the T, H, S recipe
/// (which prepares (|0> + i|1>)/sqrt(2); kept for replication, not asserted
/// equal to the rotation).
Circuit prepare_message(const MessageParams& params, PrepMode mode);

/// alpha|0> + beta|1> -> alpha|000> + beta|111> (CNOT 0->1, 0->2).
Circuit encode_repetition3();

/// Six fresh qubits -> (|000000> + |111111>)/sqrt(2).
Circuit prepare_logical_bell_3();

/// Four CNOTs probing Z1Z2 and Z1Z3 of bell_first onto the two ancillas.
Circuit syndrome_extract(const BlockLayout& layout);

/// Correction network: CNOT(a1 -> q2), CNOT(a2 -> q3), then Toffolis onto
/// q1, q2, q3, undoing any single X error on bell_first.
Circuit coherent_correct(const BlockLayout& layout);

/// Teleportation conditionals: transversal CNOT bell_first -> bell_second
/// (Z side) and H + CZ message -> bell_second (X side).
Circuit teleport_conditionals_3(const BlockLayout& layout);

/// Parity/redundancy encoder: alpha|0> + beta|1> enters at block qubit 0 and
/// becomes (alpha/2)(|00>+|11>)(|00>+|11>) + (beta/2)(|00>-|11>)(|00>-|11>).)
Circuit encode_parity4();

/// Equivalent preparation of the same code state with intra-pair roles swapped
/// so that `attach_last` can be detached by gate removal; Phi+/- symmetry makes
/// every variant prepare the identical state. The message enters at
/// `input_qubit` (1 when attach_last == 0, else 0).
struct ParityEncoder {
    Circuit fragment;
    int input_qubit;
};
ParityEncoder parity_encoder_variant(std::optional<int> attach_last);

/// Eight fresh qubits -> the two-block logical Bell state
/// (|0L 0L> + |1L 1L>)/sqrt(2), built as H(root), CNOT(root -> root'), then
/// the parity encoder on each half.
Circuit prepare_logical_bell_erasure();

/// QND presence probes: CNOT from each message qubit onto its ancilla.
/// Copies computational values, so it demolishes logical phase coherence;
/// used for detection runs, not on the decode path (see README).
Circuit qnd_detect(const BlockLayout& layout);

/// Maps per-ancilla P(1) marginals plus the channel's location hint to a flag.
/// A silent ancilla (P(1) < tol) marks its qubit as an erasure candidate;
/// ambiguity is resolved by the hint (erasures are located errors).
ErasureFlag extract_erasure_flag(std::span<const double> ancilla_one_probs,
                                 std::optional<int> hint, double tol = 1e-9);

// ---- pipelines ---------------------------------------------------------------

enum class Pipeline { BitFlip, PhaseFlip, Erasure };
enum class Decoding { Coherent, PauliFrame };

std::string_view pipeline_name(Pipeline p);
std::optional<Pipeline> pipeline_from_name(std::string_view name);

struct TecOptions {
    MessageParams params = MessageParams::defaults();
    PrepMode prep = PrepMode::Rotation;
    Decoding decoding = Decoding::Coherent;
    /// Include the QND probe block in the erasure pipeline. Off by default:
    /// the value-copying probes cap decoded fidelity at 0.75.
    bool include_qnd = false;
    /// 14-qubit erasure register (two QND ancillas dropped), as run on the device.
    bool device_faithful = false;
    bool terminal_measurement = true;
};

/// Full bit-flip TEC pipeline: preparation, encoding, error channel,
/// logical Bell, syndrome extraction + correction, conditionals, readout.
/// spec.kind must be None or BitFlip.
Circuit build_bitflip_tec_circuit(const channels::ErrorSpec& spec,
                                  const TecOptions& opts = {});

/// Bit-flip pipeline with Hadamards before and after the error box.
/// spec.kind must be None or PhaseFlip.
Circuit build_phaseflip_tec_circuit(const channels::ErrorSpec& spec,
                                    const TecOptions& opts = {});

/// Full erasure TEC pipeline: preparation, encoding, error channel,
/// optional QND probes, logical Bell, logical CNOT, conditionals, readout.
/// spec.kind must be None or Erasure.
Circuit build_erasure_tec_circuit(const channels::ErrorSpec& spec,
                                  const TecOptions& opts = {});

Circuit build_pipeline(Pipeline pipeline, const channels::ErrorSpec& spec,
                       const TecOptions& opts = {});

// ---- decoding ----------------------------------------------------------------

using tecsim::ExactBranch;

/// Exact evaluation of a measurement-free circuit; Reset ops fork branches.
std::vector<ExactBranch> run_exact(const Circuit& circuit);

struct DecodeResult {
    std::optional<double> fidelity;    // computed in coherent decoding mode
    double p_logical0 = 0.0;
    std::array<double, 3> bloch{0, 0, 0};  // erasure pipeline only
    std::optional<SyndromeRecord> syndrome;
    std::optional<std::array<double, 2>> syndrome_probs;
    ErasureFlag flag;
};

/// Exact decode of a pipeline circuit built with terminal_measurement = false.
/// Reads the pipeline/decoding/erasure stamps from circuit metadata.
DecodeResult evaluate_exact(const Circuit& pipeline_circuit, const MessageParams& params);

/// Decoded logical bit from one shot's cbit record (see README for cbit maps).
int decode_bits(const Circuit& pipeline_circuit, std::span<const uint8_t> cbits);

/// Exact P(0) of measuring the decoded logical qubit in basis 'X', 'Y' or 'Z'.
double logical_basis_p0_exact(const Circuit& pipeline_circuit, char basis);

/// Samples the decoded logical qubit in the given basis (counts over "0"/"1").
std::map<std::string, uint64_t> sample_logical_basis(const Circuit& pipeline_circuit,
                                                     char basis, uint64_t shots,
                                                     uint64_t seed);

/// Classical post-processing equivalent of the coherent conditionals.
std::vector<uint8_t> apply_pauli_frame(const PauliFrame& frame,
                                       std::span<const uint8_t> measured_bits);

/// Mean exact decoded fidelity over depolarizing-noise trajectories.
double noisy_mean_fidelity(const Circuit& pipeline_circuit, const MessageParams& params,
                           const channels::NoiseModel& model, int trajectories,
                           uint64_t seed);

}  // namespace tecsim::tec

#endif
