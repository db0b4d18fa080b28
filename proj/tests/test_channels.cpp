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

#include <doctest.h>

#include "support/helpers.hpp"
#include "tecsim/channels.hpp"
#include "tecsim/tec.hpp"

using namespace tecsim;
using channels::ErasureMode;
using channels::ErrorKind;
using channels::ErrorSpec;

namespace {

Circuit bitflip_circuit() {
    return tec::build_bitflip_tec_circuit({}, {});
}

Circuit erasure_circuit(const ErrorSpec& spec = {}) {
    tec::TecOptions opts;
    opts.terminal_measurement = false;
    return tec::build_erasure_tec_circuit(spec, opts);
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("inject inserts the Pauli right after the marker") {
    const Circuit base = bitflip_circuit();
    ErrorSpec spec;
    spec.kind = ErrorKind::BitFlip;
    spec.qubit = 1;
    const Circuit injected = channels::inject(base, spec);
    REQUIRE(injected.ops().size() == base.ops().size() + 1);
    const size_t marker = *injected.find_marker("ε");
    CHECK(injected.ops()[marker + 1].kind == GateKind::X);
    CHECK(injected.ops()[marker + 1].qubits == std::vector<int>{1});

    // purely insertive: removing the inserted op restores the input
    Circuit stripped(injected.num_qubits(), injected.num_cbits());
    for (size_t i = 0; i < injected.ops().size(); ++i) {
        if (i != marker + 1) stripped.append(injected.ops()[i]);
    }
    CHECK(stripped.same_ops(base));

    ErrorSpec none;
    CHECK(channels::inject(base, none).same_ops(base));

    ErrorSpec phase;
    phase.kind = ErrorKind::PhaseFlip;
    phase.qubit = 2;
    CHECK(channels::inject(base, phase).ops()[marker + 1].kind == GateKind::Z);

    ErrorSpec both;
    both.kind = ErrorKind::BitPhaseFlip;  // Y = iXZ
    both.qubit = 0;
    CHECK(channels::inject(base, both).ops()[marker + 1].kind == GateKind::Y);
}

TEST_CASE("inject errors") {
    const Circuit base = bitflip_circuit();
    ErrorSpec bad_marker;
    bad_marker.kind = ErrorKind::BitFlip;
    bad_marker.marker = "nope";
    CHECK_THROWS_AS(channels::inject(base, bad_marker), std::invalid_argument);

    ErrorSpec outside;
    outside.kind = ErrorKind::BitFlip;
    outside.qubit = 7;  // not in the marker's block {0,1,2}
    CHECK_THROWS_AS(channels::inject(base, outside), std::invalid_argument);
}

TEST_CASE("inject then simulate flips both ancillas for a qubit-0 error") {
    ErrorSpec spec;
    spec.kind = ErrorKind::BitFlip;
    spec.qubit = 0;
    tec::TecOptions opts;
    opts.terminal_measurement = false;
    const Circuit c = tec::build_bitflip_tec_circuit(spec, opts);
    const auto r = tec::evaluate_exact(c, tec::MessageParams::defaults());
    REQUIRE(r.syndrome.has_value());
    CHECK(r.syndrome->a1 == 1);
    CHECK(r.syndrome->a2 == 1);
}

TEST_CASE("erase: gate removal") {
    const Circuit base = erasure_circuit();
    const auto [erased, hint] = channels::erase(base, 2, ErasureMode::GateRemoval);
    CHECK(hint.erased == std::set<int>{2});
    CHECK(erased.metadata().at("erased") == "2");
    const size_t marker = *erased.find_marker("ε");
    for (size_t i = 0; i < marker; ++i) {
        CHECK_FALSE(erased.ops()[i].touches(2));
    }
    // ops after the marker are untouched
    const size_t base_marker = *base.find_marker("ε");
    REQUIRE(base.ops().size() - base_marker == erased.ops().size() - marker);
    for (size_t i = 0; i < base.ops().size() - base_marker; ++i) {
        CHECK(base.ops()[base_marker + i].kind == erased.ops()[marker + i].kind);
        CHECK(base.ops()[base_marker + i].qubits == erased.ops()[marker + i].qubits);
    }
}

TEST_CASE("erase: reset-and-flag inserts Reset at the marker") {
    const Circuit base = erasure_circuit();
    const auto [erased, hint] = channels::erase(base, 0, ErasureMode::ResetAndFlag);
    CHECK(hint.erased == std::set<int>{0});
    const size_t marker = *erased.find_marker("ε");
    CHECK(erased.ops()[marker + 1].kind == GateKind::Reset);
    CHECK(erased.ops()[marker + 1].qubits == std::vector<int>{0});
}

TEST_CASE("erase twice is rejected (single-erasure code)") {
    const Circuit base = erasure_circuit();
    const auto [once, hint] = channels::erase(base, 1, ErasureMode::GateRemoval);
    CHECK_THROWS_AS(channels::erase(once, 2, ErasureMode::GateRemoval),
                    std::invalid_argument);
    CHECK_THROWS_AS(channels::erase(base, 9, ErasureMode::GateRemoval),
                    std::invalid_argument);
}

TEST_CASE("modified circuits still validate for every error kind and legal qubit") {
    const Circuit bf = bitflip_circuit();
    for (ErrorKind kind : {ErrorKind::BitFlip, ErrorKind::PhaseFlip, ErrorKind::BitPhaseFlip}) {
        for (int q = 0; q < 3; ++q) {
            ErrorSpec spec;
            spec.kind = kind;
            spec.qubit = q;
            const Circuit injected = channels::inject(bf, spec);
            CHECK(deserialize(serialize(injected)).same_ops(injected));
        }
    }
    const Circuit er = erasure_circuit();
    for (ErasureMode mode : {ErasureMode::GateRemoval, ErasureMode::ResetAndFlag}) {
        for (int q = 0; q < 4; ++q) {
            const auto [modified, hint] = channels::erase(er, q, mode);
            CHECK(deserialize(serialize(modified)).same_ops(modified));
        }
    }
}

TEST_CASE("apply_noise basics") {
    channels::NoiseModel off;
    Circuit single(1);
    single.x(0);
    RandomSource rng(3);
    CHECK(channels::apply_noise(single, off, rng).same_ops(single));

    channels::NoiseModel certain;
    certain.p1 = 1.0;
    RandomSource rng2(3);
    const Circuit noisy = channels::apply_noise(single, certain, rng2);
    REQUIRE(noisy.ops().size() == 2);
    CHECK(noisy.ops()[0].kind == GateKind::X);
    const GateKind inserted = noisy.ops()[1].kind;
    CHECK((inserted == GateKind::X || inserted == GateKind::Y || inserted == GateKind::Z));

    channels::NoiseModel bad;
    bad.p1 = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("mean fidelity is non-increasing in p2 on the bit-flip pipeline") {
    tec::TecOptions opts;
    opts.terminal_measurement = false;
    const Circuit pipeline = tec::build_bitflip_tec_circuit({}, opts);
    const tec::MessageParams params = tec::MessageParams::defaults();
    double previous = 2.0;
    for (double p2 : {0.0, 0.001, 0.005, 0.01}) {
        channels::NoiseModel model;
        model.p2 = p2;
        const double mean =
            tec::noisy_mean_fidelity(pipeline, params, model, 1000, 1234);
        CHECK(mean <= previous + 1e-12);
        previous = mean;
    }
    // p2 = 0 must be exactly noiseless
    channels::NoiseModel none;
    CHECK(tec::noisy_mean_fidelity(pipeline, params, none, 10, 1) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("run_noisy is deterministic and respects readout flips") {
    Circuit c(1, 1);
    c.x(0).measure(0, 0);
    channels::NoiseModel model;
    model.p_readout = 0.25;
    const SimResult a = channels::run_noisy(c, model, 4096, 5);
    const SimResult b = channels::run_noisy(c, model, 4096, 5);
    CHECK(a.counts == b.counts);
    // outcome 1 flipped with p = 0.25 => expect ~25% zeros
    const uint64_t zeros = a.counts.count("0") ? a.counts.at("0") : 0;
    CHECK(testing::within_3sigma_binomial(zeros, 4096, 0.25));
}

}  // TEST_SUITE
