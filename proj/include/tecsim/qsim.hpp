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

#ifndef TECSIM_QSIM_HPP
#define TECSIM_QSIM_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tecsim {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 24;
inline constexpr double kExactTol = 1e-10;

/// Counter-based deterministic generator (splitmix64). Identical seeds give
/// identical sequences on every platform; substreams are derived from
/// (seed, index) so parallel consumers stay reproducible.
class RandomSource {
  public:
    explicit RandomSource(uint64_t seed) : seed_(seed) {}

    uint64_t next_u64() { return mix(seed_ + (++counter_) * kGamma); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Independent stream for shot/case `index`, unaffected by this object's counter.
    RandomSource substream(uint64_t index) const {
        return RandomSource(mix(seed_ ^ mix(index + kGamma)));
    }

    uint64_t seed() const { return seed_; }

  private:
    static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
    uint64_t counter_ = 0;
};

/// Dense k-qubit operator, row-major, dim = 2^k.
struct Unitary {
    int dim = 0;
    std::vector<Amplitude> entries;

    Unitary() = default;
    Unitary(int d, std::vector<Amplitude> e);

    Amplitude& at(int r, int c) { return entries[static_cast<size_t>(r) * dim + c]; }
    const Amplitude& at(int r, int c) const { return entries[static_cast<size_t>(r) * dim + c]; }

    /// Max-norm deviation of U†U from the identity.
    double unitarity_defect() const;
    bool is_unitary(double tol = kExactTol) const { return unitarity_defect() < tol; }

    static Unitary identity(int dim);
};

class DensityMatrix;

/// Dense state vector over n qubits. Amplitude index is little-endian:
/// qubit 0 is the least significant bit. Ket notation prints qubit 0 leftmost.
class StateVector {
  public:
    explicit StateVector(int num_qubits);

    static StateVector zero_state(int num_qubits);
    static StateVector from_amplitudes(int num_qubits, std::vector<Amplitude> amps);

    int num_qubits() const { return num_qubits_; }
    size_t dim() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude amp(size_t basis_index) const { return amps_[basis_index]; }

    double norm() const;

    /// Applies `gate` to the given target qubits (targets[0] is the least
    /// significant index of the gate's basis). Validates targets and unitarity.
    void apply_unitary(const Unitary& gate, std::span<const int> targets);

    // Fast paths for the built-in gate set; no per-call validation beyond ranges.
    void apply_gate1(const Unitary& gate, int qubit);
    void apply_x(int qubit);
    void apply_z(int qubit);
    void apply_phase(int qubit, Amplitude phase);  // diag(1, phase)
    void apply_cnot(int control, int target);
    void apply_cz(int a, int b);
    void apply_swap(int a, int b);
    void apply_toffoli(int c1, int c2, int target);

    /// Probability that `qubit` reads 0 in the computational basis.
    double prob_zero(int qubit) const;

    /// Born-rule measurement; collapses and renormalizes this state.
    int measure_z(int qubit, RandomSource& rng);

    /// Collapse to the given outcome (used for exact branch enumeration).
    /// Returns the branch probability; state is renormalized unless p ~ 0.
    double project_z(int qubit, int outcome);

    void reset_qubit(int qubit, RandomSource& rng);

    /// <psi|P|psi> for P a Pauli string over {I,X,Y,Z}; string index = qubit.
    double pauli_expectation(std::string_view pauli_string) const;

    /// Marginal distribution over the listed qubits (bit i of the outcome index
    /// corresponds to qubits[i]).
    std::vector<double> marginal_probabilities(std::span<const int> qubits) const;

    void check_qubit(int qubit) const;

  private:
    int num_qubits_;
    std::vector<Amplitude> amps_;
};

/// Histogram over little-endian bitstrings rendered as text ("01...", index 0
/// printed leftmost).
std::string bits_to_key(std::span<const int> bits);

/// Samples `shots` outcomes of measuring `qubits` jointly. Substream-per-shot:
/// the histogram is identical no matter how shots are scheduled.
std::vector<std::pair<std::string, uint64_t>> sample_counts(const StateVector& state,
                                                            std::span<const int> qubits,
                                                            uint64_t shots, RandomSource& rng);

class DensityMatrix {
  public:
    DensityMatrix(int num_qubits, std::vector<Amplitude> entries);

    static DensityMatrix zeros(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    int dim() const { return 1 << num_qubits_; }
    Amplitude& at(int r, int c) { return entries_[static_cast<size_t>(r) * dim() + c]; }
    const Amplitude& at(int r, int c) const {
        return entries_[static_cast<size_t>(r) * dim() + c];
    }
    std::span<const Amplitude> entries() const { return entries_; }

    double trace_real() const;
    double hermiticity_defect() const;

    void add_scaled(const DensityMatrix& other, double weight);

  private:
    int num_qubits_;
    std::vector<Amplitude> entries_;
};

DensityMatrix pure_density(const StateVector& state);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep);

/// <psi|rho|psi>, clamped to [0, 1]. Equals squared Uhlmann fidelity for pure targets.
double fidelity_pure(const DensityMatrix& rho, const StateVector& psi);

namespace gates {

const Unitary& h();
const Unitary& x();
const Unitary& y();
const Unitary& z();
const Unitary& s();
const Unitary& t();
Unitary ry(double theta);
const Unitary& cnot();
const Unitary& cz();
const Unitary& swap();
const Unitary& toffoli();

}  // namespace gates

}  // namespace tecsim

#endif
