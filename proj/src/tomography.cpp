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

#include "tecsim/tomography.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <json.hpp>

namespace tecsim::tomo {

namespace {

constexpr char kAxes[3] = {'X', 'Y', 'Z'};

void check_setting(const std::string& setting, int num_qubits) {
    if (setting.size() != static_cast<size_t>(num_qubits)) {
        throw std::invalid_argument("tomography: setting length mismatch");
    }
    for (char c : setting) {
        if (c != 'X' && c != 'Y' && c != 'Z') {
            throw std::invalid_argument("tomography: invalid setting character");
        }
    }
}

StateVector rotated(const StateVector& state, const std::string& setting) {
    StateVector out = state;
    for (int q = 0; q < state.num_qubits(); ++q) {
        switch (setting[q]) {
            case 'X': out.apply_gate1(gates::h(), q); break;
            case 'Y':
                out.apply_z(q);
                out.apply_phase(q, Amplitude(0, 1));
                out.apply_gate1(gates::h(), q);
                break;
            default: break;
        }
    }
    return out;
}

}  // namespace

TomographySchedule schedule_full(int num_qubits) {
    if (num_qubits < 1 || num_qubits > 3) {
        throw std::out_of_range("schedule_full: full tomography capped at 3 qubits");
    }
    TomographySchedule sched{num_qubits, {}};
    int total = 1;
    for (int i = 0; i < num_qubits; ++i) total *= 3;
    for (int idx = 0; idx < total; ++idx) {
        std::string s(num_qubits, 'X');
        int rem = idx;
        for (int q = num_qubits - 1; q >= 0; --q) {
            s[q] = kAxes[rem % 3];
            rem /= 3;
        }
        sched.settings.push_back(std::move(s));
    }
    return sched;
}

Circuit rotation_fragment(const std::string& setting) {
    Circuit c(static_cast<int>(setting.size()));
    check_setting(setting, c.num_qubits());
    for (int q = 0; q < c.num_qubits(); ++q) {
        switch (setting[q]) {
            case 'X': c.h(q); break;
            case 'Y': c.z(q).s(q).h(q); break;
            default: break;
        }
    }
    return c;
}

BasisCounts exact_counts(const StateVector& state, const std::string& setting) {
    check_setting(setting, state.num_qubits());
    const StateVector rot = rotated(state, setting);
    std::vector<int> qubits(state.num_qubits());
    for (int q = 0; q < state.num_qubits(); ++q) qubits[q] = q;
    const auto marg = rot.marginal_probabilities(qubits);
    BasisCounts out{setting, {}};
    for (size_t pat = 0; pat < marg.size(); ++pat) {
        std::vector<int> bits(qubits.size());
        for (size_t b = 0; b < qubits.size(); ++b) bits[b] = (pat >> b) & 1;
        out.histogram[bits_to_key(bits)] = marg[pat];
    }
    return out;
}

BasisCounts sampled_counts(const StateVector& state, const std::string& setting,
                           uint64_t shots, uint64_t seed) {
    check_setting(setting, state.num_qubits());
    const StateVector rot = rotated(state, setting);
    std::vector<int> qubits(state.num_qubits());
    for (int q = 0; q < state.num_qubits(); ++q) qubits[q] = q;
    RandomSource rng(seed);
    BasisCounts out{setting, {}};
    for (const auto& [key, count] : sample_counts(rot, qubits, shots, rng)) {
        out.histogram[key] = static_cast<double>(count);
    }
    return out;
}

ReconstructionReport reconstruct(std::span<const BasisCounts> counts,
                                 const StateVector& target) {
    const int n = target.num_qubits();
    if (n > 3) throw std::out_of_range("reconstruct: capped at 3 qubits");
    const TomographySchedule sched = schedule_full(n);
    if (counts.size() != sched.settings.size()) {
        throw std::invalid_argument("reconstruct: expected " +
                                    std::to_string(sched.settings.size()) + " settings");
    }
    std::map<std::string, const BasisCounts*> by_setting;
    double shots = -1.0;
    for (const auto& bc : counts) {
        check_setting(bc.setting, n);
        if (!by_setting.emplace(bc.setting, &bc).second) {
            throw std::invalid_argument("reconstruct: duplicate setting " + bc.setting);
        }
        double total = 0.0;
        for (const auto& [key, v] : bc.histogram) {
            if (key.size() != static_cast<size_t>(n)) {
                throw std::invalid_argument("reconstruct: bitstring length mismatch");
            }
            if (v < 0) throw std::invalid_argument("reconstruct: negative count");
            total += v;
        }
        if (shots < 0) {
            shots = total;
        } else if (std::abs(total - shots) > 1e-9 * std::max(1.0, shots)) {
            throw std::invalid_argument("reconstruct: inconsistent shot counts");
        }
    }
    for (const auto& s : sched.settings) {
        if (!by_setting.count(s)) {
            throw std::invalid_argument("reconstruct: missing setting " + s);
        }
    }
    if (shots <= 0) throw std::invalid_argument("reconstruct: empty histograms");

    const int dim = 1 << n;
    // <P> for every Pauli string; I positions read from the Z-padded setting.
    const int num_pauli = dim * dim;  // 4^n strings
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    static const Eigen::Matrix2cd kI = Eigen::Matrix2cd::Identity();
    static const Eigen::Matrix2cd kX = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    static const Eigen::Matrix2cd kY =
        (Eigen::Matrix2cd() << 0, Amplitude(0, -1), Amplitude(0, 1), 0).finished();
    static const Eigen::Matrix2cd kZ = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    for (int code = 0; code < num_pauli; ++code) {
        std::string pstr(n, 'I');
        int rem = code;
        for (int q = 0; q < n; ++q) {
            pstr[q] = "IXYZ"[rem & 3];
            rem >>= 2;
        }
        std::string setting = pstr;
        size_t support_mask = 0;
        for (int q = 0; q < n; ++q) {
            if (setting[q] == 'I') {
                setting[q] = 'Z';
            } else {
                support_mask |= size_t{1} << q;
            }
        }
        const BasisCounts& bc = *by_setting.at(setting);
        double expectation = 0.0;
        for (const auto& [key, v] : bc.histogram) {
            size_t ones = 0;
            for (int q = 0; q < n; ++q) {
                if (key[q] == '1' && (support_mask >> q) & 1) ++ones;
            }
            expectation += (ones % 2 ? -1.0 : 1.0) * v;
        }
        expectation /= shots;
        // sigma_{P} as a dense matrix; qubit 0 is the least significant factor.
        Eigen::MatrixXcd op = Eigen::MatrixXcd::Ones(1, 1);
        for (int q = 0; q < n; ++q) {
            const Eigen::Matrix2cd& f = pstr[q] == 'I'   ? kI
                                        : pstr[q] == 'X' ? kX
                                        : pstr[q] == 'Y' ? kY
                                                         : kZ;
            op = Eigen::kroneckerProduct(f, op).eval();
        }
        rho += expectation * op;
    }
    rho /= static_cast<double>(dim);

    // Physicality projection: clip negative eigenvalues, renormalize the trace.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        (rho + rho.adjoint().eval()) / 2.0);
    Eigen::VectorXd evals = solver.eigenvalues();
    bool corrected = false;
    for (int i = 0; i < evals.size(); ++i) {
        if (evals[i] < 0.0) {
            if (evals[i] < -1e-9) corrected = true;
            evals[i] = 0.0;
        }
    }
    const double total = evals.sum();
    if (total <= 0.0) throw std::runtime_error("reconstruct: degenerate estimate");
    evals /= total;
    Eigen::MatrixXcd projected =
        solver.eigenvectors() * evals.asDiagonal() * solver.eigenvectors().adjoint();

    std::vector<Amplitude> entries(static_cast<size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) entries[static_cast<size_t>(r) * dim + c] = projected(r, c);
    }
    ReconstructionReport report{DensityMatrix(n, std::move(entries)), 0.0, shots, corrected};
    report.fidelity_to_target = fidelity_pure(report.rho, target);
    return report;
}

std::string report_to_json(const ReconstructionReport& report) {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["n"] = report.rho.num_qubits();
    const int dim = report.rho.dim();
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int r = 0; r < dim; ++r) {
        nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
        for (int c = 0; c < dim; ++c) {
            re_row.push_back(report.rho.at(r, c).real());
            im_row.push_back(report.rho.at(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    doc["real"] = std::move(re);
    doc["imag"] = std::move(im);
    doc["fidelity"] = std::clamp(report.fidelity_to_target, 0.0, 1.0);
    doc["shots_per_setting"] = report.shots_per_setting;
    doc["physicality_corrected"] = report.physicality_corrected;
    return doc.dump(2);
}

ReconstructionReport report_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.contains("version") || doc["version"].get<int>() != 1) {
        throw std::invalid_argument("tomography report: expected version 1");
    }
    const int n = doc.at("n").get<int>();
    const int dim = 1 << n;
    std::vector<Amplitude> entries(static_cast<size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            entries[static_cast<size_t>(r) * dim + c] =
                Amplitude(doc.at("real")[r][c].get<double>(),
                          doc.at("imag")[r][c].get<double>());
        }
    }
    ReconstructionReport report{DensityMatrix(n, std::move(entries)),
                                doc.at("fidelity").get<double>(),
                                doc.at("shots_per_setting").get<double>(),
                                doc.at("physicality_corrected").get<bool>()};
    return report;
}

}  // namespace tecsim::tomo
