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

#include "tecsim/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tecsim {

namespace {

constexpr double kSqrt1_2 = 0.7071067811865475244008443621;

void check_finite(const std::vector<Amplitude>& v) {
    for (const auto& a : v) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("amplitude is not finite");
        }
    }
}

}  // namespace

Unitary::Unitary(int d, std::vector<Amplitude> e) : dim(d), entries(std::move(e)) {
    if (dim < 1 || entries.size() != static_cast<size_t>(dim) * dim) {
        throw std::invalid_argument("Unitary: entries must be dim x dim");
    }
}

double Unitary::unitarity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            Amplitude acc = 0.0;
            for (int k = 0; k < dim; ++k) {
                acc += std::conj(at(k, r)) * at(k, c);
            }
            if (r == c) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

Unitary Unitary::identity(int dim) {
    std::vector<Amplitude> e(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) e[static_cast<size_t>(i) * dim + i] = 1.0;
    return Unitary(dim, std::move(e));
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::out_of_range("StateVector: num_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(num_qubits));
    }
    amps_.assign(size_t{1} << num_qubits, 0.0);
}

StateVector StateVector::zero_state(int num_qubits) {
    StateVector st(num_qubits);
    st.amps_[0] = 1.0;
    return st;
}

StateVector StateVector::from_amplitudes(int num_qubits, std::vector<Amplitude> amps) {
    StateVector st(num_qubits);
    if (amps.size() != st.amps_.size()) {
        throw std::invalid_argument("from_amplitudes: expected 2^n amplitudes");
    }
    check_finite(amps);
    st.amps_ = std::move(amps);
    return st;
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return std::sqrt(acc);
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(num_qubits_) +
                                " qubits");
    }
}

void StateVector::apply_unitary(const Unitary& gate, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    if (k < 1 || gate.dim != (1 << k)) {
        throw std::invalid_argument("apply_unitary: gate dim does not match target count");
    }
    for (int i = 0; i < k; ++i) {
        check_qubit(targets[i]);
        for (int j = i + 1; j < k; ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("apply_unitary: duplicate target qubit " +
                                            std::to_string(targets[i]));
            }
        }
    }
    if (!gate.is_unitary()) {
        throw std::invalid_argument("apply_unitary: matrix is not unitary within 1e-10");
    }

    const size_t dim = amps_.size();
    const int gdim = gate.dim;
    uint64_t tmask = 0;
    for (int q : targets) tmask |= uint64_t{1} << q;

    std::vector<Amplitude> scratch(gdim);
    for (size_t base = 0; base < dim; ++base) {
        if (base & tmask) continue;
        for (int r = 0; r < gdim; ++r) {
            size_t idx = base;
            for (int b = 0; b < k; ++b) {
                if ((r >> b) & 1) idx |= uint64_t{1} << targets[b];
            }
            scratch[r] = amps_[idx];
        }
        for (int r = 0; r < gdim; ++r) {
            Amplitude acc = 0.0;
            for (int c = 0; c < gdim; ++c) acc += gate.at(r, c) * scratch[c];
            size_t idx = base;
            for (int b = 0; b < k; ++b) {
                if ((r >> b) & 1) idx |= uint64_t{1} << targets[b];
            }
            amps_[idx] = acc;
        }
    }
}

void StateVector::apply_gate1(const Unitary& gate, int qubit) {
    check_qubit(qubit);
    const size_t mask = size_t{1} << qubit;
    const Amplitude m00 = gate.at(0, 0), m01 = gate.at(0, 1);
    const Amplitude m10 = gate.at(1, 0), m11 = gate.at(1, 1);
    const size_t dim = amps_.size();
    for (size_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[i | mask];
        amps_[i] = m00 * a0 + m01 * a1;
        amps_[i | mask] = m10 * a0 + m11 * a1;
    }
}

void StateVector::apply_x(int qubit) {
    check_qubit(qubit);
    const size_t mask = size_t{1} << qubit;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if (!(i & mask)) std::swap(amps_[i], amps_[i | mask]);
    }
}

void StateVector::apply_z(int qubit) { apply_phase(qubit, -1.0); }

void StateVector::apply_phase(int qubit, Amplitude phase) {
    check_qubit(qubit);
    const size_t mask = size_t{1} << qubit;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) amps_[i] *= phase;
    }
}

void StateVector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw std::invalid_argument("CNOT: control equals target");
    const size_t cm = size_t{1} << control, tm = size_t{1} << target;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
    }
}

void StateVector::apply_cz(int a, int b) {
    check_qubit(a);
    check_qubit(b);
    if (a == b) throw std::invalid_argument("CZ: duplicate qubit");
    const size_t am = size_t{1} << a, bm = size_t{1} << b;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if ((i & am) && (i & bm)) amps_[i] = -amps_[i];
    }
}

void StateVector::apply_swap(int a, int b) {
    check_qubit(a);
    check_qubit(b);
    if (a == b) throw std::invalid_argument("SWAP: duplicate qubit");
    const size_t am = size_t{1} << a, bm = size_t{1} << b;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if ((i & am) && !(i & bm)) std::swap(amps_[i], amps_[(i ^ am) | bm]);
    }
}

void StateVector::apply_toffoli(int c1, int c2, int target) {
    check_qubit(c1);
    check_qubit(c2);
    check_qubit(target);
    if (c1 == c2 || c1 == target || c2 == target) {
        throw std::invalid_argument("Toffoli: duplicate qubit");
    }
    const size_t m1 = size_t{1} << c1, m2 = size_t{1} << c2, tm = size_t{1} << target;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if ((i & m1) && (i & m2) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
    }
}

double StateVector::prob_zero(int qubit) const {
    check_qubit(qubit);
    const size_t mask = size_t{1} << qubit;
    double acc = 0.0;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if (!(i & mask)) acc += std::norm(amps_[i]);
    }
    return acc;
}

int StateVector::measure_z(int qubit, RandomSource& rng) {
    const double p0 = prob_zero(qubit);
    int outcome;
    if (p0 < 1e-12) {
        outcome = 1;  // never select a zero-norm branch
    } else if (1.0 - p0 < 1e-12) {
        outcome = 0;
    } else {
        outcome = rng.uniform() < p0 ? 0 : 1;
    }
    project_z(qubit, outcome);
    return outcome;
}

double StateVector::project_z(int qubit, int outcome) {
    check_qubit(qubit);
    const size_t mask = size_t{1} << qubit;
    double p = 0.0;
    for (size_t i = 0; i < amps_.size(); ++i) {
        const bool hit = ((i & mask) != 0) == (outcome != 0);
        if (hit) {
            p += std::norm(amps_[i]);
        } else {
            amps_[i] = 0.0;
        }
    }
    if (p > 1e-300) {
        const double inv = 1.0 / std::sqrt(p);
        for (auto& a : amps_) a *= inv;
    }
    return p;
}

void StateVector::reset_qubit(int qubit, RandomSource& rng) {
    const int outcome = measure_z(qubit, rng);
    if (outcome == 1) apply_x(qubit);
}

double StateVector::pauli_expectation(std::string_view pauli_string) const {
    if (pauli_string.size() != static_cast<size_t>(num_qubits_)) {
        throw std::invalid_argument("pauli_expectation: string length must equal num_qubits");
    }
    size_t xmask = 0;
    size_t zmask = 0;
    int y_count = 0;
    for (int q = 0; q < num_qubits_; ++q) {
        switch (pauli_string[q]) {
            case 'I': break;
            case 'X': xmask |= size_t{1} << q; break;
            case 'Y':
                xmask |= size_t{1} << q;
                zmask |= size_t{1} << q;
                ++y_count;
                break;
            case 'Z': zmask |= size_t{1} << q; break;
            default:
                throw std::invalid_argument(std::string("pauli_expectation: invalid character '") +
                                            pauli_string[q] + "'");
        }
    }
    // P|i> = i^{#Y} * (-1)^{popcount(i & zmask)} |i ^ xmask>
    static const Amplitude kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Amplitude yphase = kIPow[y_count & 3];
    Amplitude acc = 0.0;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if (amps_[i] == Amplitude{}) continue;
        const int sign = (std::popcount(i & zmask) & 1) ? -1 : 1;
        acc += std::conj(amps_[i ^ xmask]) * (yphase * static_cast<double>(sign)) * amps_[i];
    }
    if (std::abs(acc.imag()) > 1e-9) {
        throw std::runtime_error("pauli_expectation: non-real expectation (norm bug?)");
    }
    return acc.real();
}

std::vector<double> StateVector::marginal_probabilities(std::span<const int> qubits) const {
    for (int q : qubits) check_qubit(q);
    std::vector<double> probs(size_t{1} << qubits.size(), 0.0);
    for (size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        if (p == 0.0) continue;
        size_t key = 0;
        for (size_t b = 0; b < qubits.size(); ++b) {
            if ((i >> qubits[b]) & 1) key |= size_t{1} << b;
        }
        probs[key] += p;
    }
    return probs;
}

std::string bits_to_key(std::span<const int> bits) {
    std::string s(bits.size(), '0');
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s[i] = '1';
    }
    return s;
}

std::vector<std::pair<std::string, uint64_t>> sample_counts(const StateVector& state,
                                                            std::span<const int> qubits,
                                                            uint64_t shots, RandomSource& rng) {
    if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
    const std::vector<double> probs = state.marginal_probabilities(qubits);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::map<std::string, uint64_t> hist;
    for (uint64_t shot = 0; shot < shots; ++shot) {
        RandomSource sub = rng.substream(shot);
        const double u = sub.uniform() * acc;
        const size_t idx =
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        const size_t outcome = std::min(idx, probs.size() - 1);
        std::vector<int> bits(qubits.size());
        for (size_t b = 0; b < qubits.size(); ++b) bits[b] = (outcome >> b) & 1;
        ++hist[bits_to_key(bits)];
    }
    return {hist.begin(), hist.end()};
}

DensityMatrix::DensityMatrix(int num_qubits, std::vector<Amplitude> entries)
    : num_qubits_(num_qubits), entries_(std::move(entries)) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::out_of_range("DensityMatrix: num_qubits out of range");
    }
    const size_t d = size_t{1} << num_qubits;
    if (entries_.size() != d * d) {
        throw std::invalid_argument("DensityMatrix: expected 2^n x 2^n entries");
    }
}

DensityMatrix DensityMatrix::zeros(int num_qubits) {
    const size_t d = size_t{1} << num_qubits;
    return DensityMatrix(num_qubits, std::vector<Amplitude>(d * d, 0.0));
}

double DensityMatrix::trace_real() const {
    double acc = 0.0;
    for (int i = 0; i < dim(); ++i) acc += at(i, i).real();
    return acc;
}

double DensityMatrix::hermiticity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim(); ++r) {
        for (int c = r; c < dim(); ++c) {
            worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
        }
    }
    return worst;
}

void DensityMatrix::add_scaled(const DensityMatrix& other, double weight) {
    if (other.num_qubits_ != num_qubits_) {
        throw std::invalid_argument("add_scaled: dimension mismatch");
    }
    for (size_t i = 0; i < entries_.size(); ++i) entries_[i] += weight * other.entries_[i];
}

DensityMatrix pure_density(const StateVector& state) {
    const int n = state.num_qubits();
    DensityMatrix rho = DensityMatrix::zeros(n);
    const auto amps = state.amplitudes();
    for (int r = 0; r < rho.dim(); ++r) {
        for (int c = 0; c < rho.dim(); ++c) {
            rho.at(r, c) = amps[r] * std::conj(amps[c]);
        }
    }
    return rho;
}

namespace {

std::vector<int> complement_qubits(int n, std::span<const int> keep) {
    std::vector<bool> kept(n, false);
    for (int q : keep) {
        if (q < 0 || q >= n) throw std::out_of_range("partial_trace: keep index out of range");
        if (kept[q]) throw std::invalid_argument("partial_trace: duplicate keep index");
        kept[q] = true;
    }
    std::vector<int> other;
    for (int q = 0; q < n; ++q) {
        if (!kept[q]) other.push_back(q);
    }
    return other;
}

}  // namespace

DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep) {
    const int n = state.num_qubits();
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep list must be non-empty");
    const std::vector<int> other = complement_qubits(n, keep);
    const int k = static_cast<int>(keep.size());
    DensityMatrix rho = DensityMatrix::zeros(k);
    const auto amps = state.amplitudes();
    const size_t osz = size_t{1} << other.size();
    for (size_t r = 0; r < (size_t{1} << k); ++r) {
        for (size_t c = 0; c < (size_t{1} << k); ++c) {
            Amplitude acc = 0.0;
            for (size_t o = 0; o < osz; ++o) {
                size_t i = 0, j = 0;
                for (int b = 0; b < k; ++b) {
                    if ((r >> b) & 1) i |= size_t{1} << keep[b];
                    if ((c >> b) & 1) j |= size_t{1} << keep[b];
                }
                for (size_t b = 0; b < other.size(); ++b) {
                    if ((o >> b) & 1) {
                        i |= size_t{1} << other[b];
                        j |= size_t{1} << other[b];
                    }
                }
                acc += amps[i] * std::conj(amps[j]);
            }
            rho.at(static_cast<int>(r), static_cast<int>(c)) = acc;
        }
    }
    return rho;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.num_qubits();
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep list must be non-empty");
    const std::vector<int> other = complement_qubits(n, keep);
    const int k = static_cast<int>(keep.size());
    DensityMatrix out = DensityMatrix::zeros(k);
    const size_t osz = size_t{1} << other.size();
    for (size_t r = 0; r < (size_t{1} << k); ++r) {
        for (size_t c = 0; c < (size_t{1} << k); ++c) {
            Amplitude acc = 0.0;
            for (size_t o = 0; o < osz; ++o) {
                size_t i = 0, j = 0;
                for (int b = 0; b < k; ++b) {
                    if ((r >> b) & 1) i |= size_t{1} << keep[b];
                    if ((c >> b) & 1) j |= size_t{1} << keep[b];
                }
                for (size_t b = 0; b < other.size(); ++b) {
                    if ((o >> b) & 1) {
                        i |= size_t{1} << other[b];
                        j |= size_t{1} << other[b];
                    }
                }
                acc += rho.at(static_cast<int>(i), static_cast<int>(j));
            }
            out.at(static_cast<int>(r), static_cast<int>(c)) = acc;
        }
    }
    return out;
}

double fidelity_pure(const DensityMatrix& rho, const StateVector& psi) {
    if (rho.num_qubits() != psi.num_qubits()) {
        throw std::invalid_argument("fidelity_pure: dimension mismatch");
    }
    const auto amps = psi.amplitudes();
    Amplitude acc = 0.0;
    for (int r = 0; r < rho.dim(); ++r) {
        for (int c = 0; c < rho.dim(); ++c) {
            acc += std::conj(amps[r]) * rho.at(r, c) * amps[c];
        }
    }
    return std::clamp(acc.real(), 0.0, 1.0);
}

namespace gates {

namespace {

Unitary make2(Amplitude a, Amplitude b, Amplitude c, Amplitude d) {
    return Unitary(2, {a, b, c, d});
}

}  // namespace

const Unitary& h() {
    static const Unitary u = make2(kSqrt1_2, kSqrt1_2, kSqrt1_2, -kSqrt1_2);
    return u;
}

const Unitary& x() {
    static const Unitary u = make2(0, 1, 1, 0);
    return u;
}

const Unitary& y() {
    static const Unitary u = make2(0, Amplitude(0, -1), Amplitude(0, 1), 0);
    return u;
}

const Unitary& z() {
    static const Unitary u = make2(1, 0, 0, -1);
    return u;
}

const Unitary& s() {
    static const Unitary u = make2(1, 0, 0, Amplitude(0, 1));
    return u;
}

const Unitary& t() {
    static const Unitary u = make2(1, 0, 0, Amplitude(kSqrt1_2, kSqrt1_2));
    return u;
}

Unitary ry(double theta) {
    const double c = std::cos(theta / 2), s_ = std::sin(theta / 2);
    return make2(c, -s_, s_, c);
}

namespace {

Unitary perm4(int p0, int p1, int p2, int p3) {
    std::vector<Amplitude> e(16, 0.0);
    const int p[4] = {p0, p1, p2, p3};
    for (int c = 0; c < 4; ++c) e[static_cast<size_t>(p[c]) * 4 + c] = 1.0;
    return Unitary(4, std::move(e));
}

}  // namespace

const Unitary& cnot() {
    // basis order |control, target> little-endian: control = bit 0
    static const Unitary u = perm4(0, 3, 2, 1);
    return u;
}

const Unitary& cz() {
    static const Unitary u = [] {
        Unitary v = Unitary::identity(4);
        v.at(3, 3) = -1.0;
        return v;
    }();
    return u;
}

const Unitary& swap() {
    static const Unitary u = perm4(0, 2, 1, 3);
    return u;
}

const Unitary& toffoli() {
    static const Unitary u = [] {
        Unitary v = Unitary::identity(8);
        v.at(3, 3) = 0.0;
        v.at(7, 7) = 0.0;
        v.at(3, 7) = 1.0;
        v.at(7, 3) = 1.0;
        return v;
    }();
    return u;
}

}  // namespace gates

}  // namespace tecsim
