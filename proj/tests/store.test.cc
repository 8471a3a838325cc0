// Copyright 2026 The relq Authors
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

#include "relq/store.h"

#include <gtest/gtest.h>

#include "relq/adversary.h"
#include "relq/errors.h"
#include "relq/register.h"

using namespace relq;

namespace {

struct Recorder : LifecycleSink {
    std::vector<LifecycleEntry> entries;
    void on_lifecycle(const LifecycleEntry &e) override {
        entries.push_back(e);
    }
};

}  // namespace

TEST(register, apply_on_one_wire_matches_kron) {
    Rng rng(1);
    int d = 3;
    auto a = PureState::haar(d, rng);
    auto b = PureState::haar(d, rng);
    Register r = Register::from_state(7, a);
    r.append(Register::from_state(9, b));
    Unitary u = Unitary::haar(d, rng);
    r.apply(9, u.mat());
    Vector expected = kron(a.amps(), u.mat() * b.amps());
    auto amps = r.amplitudes();
    for (int i = 0; i < d * d; i++) {
        EXPECT_NEAR(std::abs(amps[i] - expected[i]), 0.0, 1e-12);
    }
}

TEST(register, joint_apply_respects_wire_order) {
    Rng rng(2);
    int d = 2;
    auto a = PureState::haar(d, rng);
    auto b = PureState::haar(d, rng);
    auto c = PureState::haar(d, rng);
    Register r = Register::from_state(0, a);
    r.append(Register::from_state(1, b));
    r.append(Register::from_state(2, c));
    Unitary u = Unitary::haar(d * d, rng);
    std::vector<WireLabel> wires{2, 0};
    r.apply(wires, u.mat());
    // Expected: (u acting on (c, a)) with b untouched, reordered into (a, b, c).
    Vector ca = u.mat() * kron(c.amps(), a.amps());
    auto amps = r.amplitudes();
    for (int ia = 0; ia < d; ia++) {
        for (int ib = 0; ib < d; ib++) {
            for (int ic = 0; ic < d; ic++) {
                Complex want = ca[ic * d + ia] * b[ib];
                EXPECT_NEAR(std::abs(amps[(ia * d + ib) * d + ic] - want), 0.0, 1e-12);
            }
        }
    }
}

TEST(register, expand_with_cloner_isometry) {
    Rng rng(3);
    int d = 3;
    ClonerChannel cloner(d);
    auto psi = PureState::haar(d, rng);
    Register r = Register::from_state(0, psi);
    std::vector<WireLabel> extra{1, 2};
    r.expand(0, cloner.isometry(), extra);
    ASSERT_EQ(r.wires(), 3u);
    std::vector<WireLabel> clones{0, 1};
    Matrix joint = r.reduced(clones);
    Matrix expected = cloner.apply(DensityMatrix::from_pure(psi));
    EXPECT_TRUE(joint.isApprox(expected, 1e-10));
}

TEST(register, measure_projector_statistics) {
    Rng rng(4);
    auto zero = PureState::basis(2, 0);
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    int pass = 0;
    int n = 20000;
    for (int k = 0; k < n; k++) {
        Register r = Register::from_state(0, PureState(plus));
        EXPECT_NEAR(r.overlap_probability(0, zero), 0.5, 1e-12);
        bool ok = r.measure_projector(0, zero, rng);
        pass += ok;
        EXPECT_EQ(r.wires(), ok ? 0u : 1u);
        if (!ok) {
            EXPECT_NEAR(r.overlap_probability(0, zero), 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(pass, n / 2.0, 3 * std::sqrt(n * 0.25));
}

TEST(store, linear_handles) {
    Recorder rec;
    QuditStore store(2, &rec);
    Rng rng(5);
    QuditId a = store.create(PureState::basis(2, 0), "t");
    EXPECT_TRUE(store.live(a));
    EXPECT_TRUE(store.test(a, PureState::basis(2, 0), rng));
    EXPECT_FALSE(store.live(a));
    EXPECT_THROW(store.test(a, PureState::basis(2, 0), rng), LinearityError);
    EXPECT_THROW(store.apply(a, Matrix::Identity(2, 2)), LinearityError);
    EXPECT_THROW(store.discard(a, "t"), LinearityError);
    EXPECT_THROW(store.reduced(a), LinearityError);
    EXPECT_EQ(store.created(), 1u);
    EXPECT_EQ(store.consumed(), 1u);
    ASSERT_EQ(rec.entries.size(), 2u);
    EXPECT_EQ(rec.entries[0].op, LifecycleOp::Create);
    EXPECT_EQ(rec.entries[1].op, LifecycleOp::Consume);
    EXPECT_EQ(store.live_registers(), 0u);
}

TEST(store, maximally_mixed_and_bell_pairs) {
    QuditStore store(3);
    QuditId m = store.create_maximally_mixed("t");
    EXPECT_LT(trace_distance(store.reduced(m), DensityMatrix::maximally_mixed(3)), 1e-12);
    auto [a, b] = store.create_bell_pair("t");
    EXPECT_LT(trace_distance(store.reduced(a), DensityMatrix::maximally_mixed(3)), 1e-12);
    std::vector<QuditId> both{a, b};
    Matrix joint = store.reduced(both);
    Vector phi = bell_state(3).amps();
    EXPECT_TRUE(joint.isApprox(phi * phi.adjoint(), 1e-12));
    // Spanning two registers gives the product.
    std::vector<QuditId> cross{m, a};
    EXPECT_TRUE(store.reduced(cross).isApprox(kron(Matrix::Identity(3, 3) / 3.0, Matrix::Identity(3, 3) / 3.0), 1e-12));
}

TEST(store, teleport_through_store) {
    Rng rng(6);
    for (int d : {2, 3, 4}) {
        QuditStore store(d);
        for (int trial = 0; trial < 10; trial++) {
            auto psi = PureState::haar(d, rng);
            QuditId q = store.create(psi, "t");
            auto [near, far] = store.create_bell_pair("t");
            WeylIndex w = store.bell_measure(q, near, rng);
            EXPECT_FALSE(store.live(q));
            EXPECT_FALSE(store.live(near));
            store.apply(far, weyl_matrix(d, w).adjoint());
            EXPECT_NEAR(fidelity(store.reduced(far), psi), 1.0, 1e-10);
            store.discard(far, "t");
        }
        EXPECT_EQ(store.live_registers(), 0u);
    }
}

TEST(store, expand_consumes_input_and_yields_fresh_handles) {
    Rng rng(7);
    QuditStore store(2);
    ClonerChannel cloner(2);
    auto psi = PureState::haar(2, rng);
    QuditId q = store.create(psi, "t");
    auto out = store.expand(q, cloner.isometry(), 2, 1, "clone");
    ASSERT_EQ(out.size(), 2u);
    EXPECT_FALSE(store.live(q));
    EXPECT_NE(out[0], q);
    EXPECT_NE(out[1], q);
    for (auto c : out) {
        EXPECT_NEAR(fidelity(store.reduced(c), psi), 5.0 / 6.0, 1e-10);
    }
    EXPECT_THROW(store.expand(q, cloner.isometry(), 2, 1, "again"), LinearityError);
}

TEST(store, joint_operation_merges_registers) {
    Rng rng(8);
    QuditStore store(2);
    QuditId a = store.create(PureState::basis(2, 0), "t");
    QuditId b = store.create(PureState::basis(2, 0), "t");
    EXPECT_EQ(store.live_registers(), 2u);
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    store.apply(a, h);
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    std::vector<QuditId> ab{a, b};
    store.apply(ab, cnot);
    EXPECT_EQ(store.live_registers(), 1u);
    Vector phi = bell_state(2).amps();
    EXPECT_TRUE(store.reduced(ab).isApprox(phi * phi.adjoint(), 1e-12));
    std::vector<QuditId> dup{a, a};
    EXPECT_THROW(store.apply(dup, cnot), ArgumentError);
}
