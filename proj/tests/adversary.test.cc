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

#include "relq/adversary.h"

#include <gtest/gtest.h>

#include <cmath>

#include "relq/errors.h"
#include "relq/stats.h"

using namespace relq;

namespace {

// SWAP on C^d (x) C^d, built entry by entry.
Matrix swap_matrix(int d) {
    Matrix s = Matrix::Zero(d * d, d * d);
    for (int a = 0; a < d; a++) {
        for (int b = 0; b < d; b++) {
            s(b * d + a, a * d + b) = 1.0;
        }
    }
    return s;
}

// Fidelity of each clone from the isometry route: contract V|psi> with itself by hand.
std::pair<double, double> isometry_fidelities(const ClonerChannel &c, const PureState &psi) {
    int d = c.dim();
    Vector out = c.isometry() * psi.amps();
    double f[2] = {0.0, 0.0};
    for (int which = 0; which < 2; which++) {
        Complex total = 0.0;
        for (int other = 0; other < d; other++) {
            for (int e = 0; e < d; e++) {
                Complex amp = 0.0;
                for (int a = 0; a < d; a++) {
                    int idx = which == 0 ? (a * d + other) * d + e : (other * d + a) * d + e;
                    amp += std::conj(psi[a]) * out[idx];
                }
                total += std::norm(amp);
            }
        }
        f[which] = total.real();
    }
    return {f[0], f[1]};
}

struct Harness {
    QuditStore store;
    Rng rng;
    GeometryConfig geometry = GeometryConfig::canonical();

    Harness(int d, std::uint64_t seed) : store(d), rng(seed) {
    }

    StrategyPlan run(Strategy &s, std::span<const QuditId> inputs, int branches = 2) {
        StrategyContext ctx{store, rng, geometry, store.dim(), branches, static_cast<int>(inputs.size())};
        return s.act(ctx, inputs);
    }

    // Exact probability that Bob's test at `branch`, round `r`, passes.
    double pass_probability(const StrategyPlan &plan, int branch, int r, const PureState &psi) {
        const auto &b = plan.branches[branch];
        if (!b.states[r]) {
            return 0.0;
        }
        QuditId q = *b.states[r];
        store.apply(q, weyl_matrix(store.dim(), b.keys[r].value()).adjoint());
        return fidelity(store.reduced(q), psi);
    }
};

}  // namespace

TEST(adversary, symmetric_projector_is_projector) {
    for (int d = 2; d <= 5; d++) {
        Matrix p = symmetric_projector(d);
        Matrix expected = (Matrix::Identity(d * d, d * d) + swap_matrix(d)) / 2.0;
        EXPECT_TRUE(p.isApprox(expected, 1e-12));
        EXPECT_NEAR(p.trace().real(), d * (d + 1) / 2.0, 1e-12);
    }
}

TEST(adversary, cloner_channel_properties) {
    Rng rng(41);
    for (int d = 2; d <= 5; d++) {
        ClonerChannel c(d);
        Matrix v = c.isometry();
        EXPECT_TRUE((v.adjoint() * v).isApprox(Matrix::Identity(d, d), 1e-12));
        Matrix swap = swap_matrix(d);
        for (int k = 0; k < 5; k++) {
            DensityMatrix rho = DensityMatrix::from_pure(PureState::haar(d, rng));
            Matrix out = c.apply(rho);
            EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
            // Output lives on the symmetric subspace.
            EXPECT_TRUE((swap * out).isApprox(out, 1e-12));
            EXPECT_TRUE(c.marginal(rho, 0).mat().isApprox(c.marginal(rho, 1).mat(), 1e-12));
        }
    }
}

TEST(adversary, cloner_marginal_fidelity_closed_form) {
    Rng rng(42);
    for (int d = 2; d <= 10; d++) {
        ClonerChannel c(d);
        double closed = 0.5 + 1.0 / (d + 1);
        EXPECT_NEAR(ClonerChannel::optimal_fidelity(d), closed, 1e-15);
        for (int k = 0; k < 5; k++) {
            auto psi = PureState::haar(d, rng);
            DensityMatrix rho = DensityMatrix::from_pure(psi);
            EXPECT_NEAR(fidelity(c.marginal(rho, 0), psi), closed, 1e-10);
            EXPECT_NEAR(fidelity(c.marginal(rho, 1), psi), closed, 1e-10);
            auto [f1, f2] = isometry_fidelities(c, psi);
            EXPECT_NEAR(f1, closed, 1e-10);
            EXPECT_NEAR(f2, closed, 1e-10);
        }
    }
    EXPECT_NEAR(2 * ClonerChannel::optimal_fidelity(2), 5.0 / 3.0, 1e-15);
    EXPECT_NEAR(2 * ClonerChannel::optimal_fidelity(3), 1.5, 1e-15);
}

TEST(adversary, cloner_large_dimension_via_isometry) {
    Rng rng(43);
    int d = 50;
    ClonerChannel c(d);
    auto psi = PureState::haar(d, rng);
    auto [f1, f2] = isometry_fidelities(c, psi);
    EXPECT_NEAR(f1 + f2, 1.0 + 2.0 / 51.0, 1e-10);
}

TEST(adversary, honest_plan_shape_and_fidelities) {
    for (int d : {2, 3}) {
        Harness h(d, 44);
        auto psi = PureState::haar(d, h.rng);
        std::vector<QuditId> in;
        for (int r = 0; r < 4; r++) {
            in.push_back(h.store.create(psi, "t"));
        }
        auto s = strategy_honest(1);
        auto plan = h.run(*s, in);
        ASSERT_EQ(plan.branches.size(), 2u);
        EXPECT_TRUE(plan.extra.empty());
        for (int r = 0; r < 4; r++) {
            EXPECT_NEAR(h.pass_probability(plan, 1, r, psi), 1.0, 1e-10);
            EXPECT_NEAR(h.pass_probability(plan, 0, r, psi), 1.0 / d, 1e-10);
        }
    }
}

TEST(adversary, honest_without_dummies_leaves_other_branch_empty) {
    Harness h(2, 45);
    std::vector<QuditId> in{h.store.create(PureState::basis(2, 0), "t")};
    auto s = strategy_honest(0, false);
    auto plan = h.run(*s, in);
    EXPECT_TRUE(plan.branches[0].states[0]);
    EXPECT_FALSE(plan.branches[1].states[0]);
    EXPECT_FALSE(plan.branches[1].keys[0]);
}

TEST(adversary, cloner_strategy_saturates_bound) {
    for (int d : {2, 3}) {
        Harness h(d, 46);
        std::vector<PureState> psis;
        std::vector<QuditId> in;
        for (int r = 0; r < 5; r++) {
            psis.push_back(PureState::haar(d, h.rng));
            in.push_back(h.store.create(psis.back(), "t"));
        }
        auto s = strategy_cloner();
        auto plan = h.run(*s, in);
        for (int r = 0; r < 5; r++) {
            double p1 = h.pass_probability(plan, 0, r, psis[r]);
            double p2 = h.pass_probability(plan, 1, r, psis[r]);
            EXPECT_NEAR(p1, 0.5 + 1.0 / (d + 1), 1e-10);
            EXPECT_NEAR(p1 + p2, 1.0 + 2.0 / (d + 1), 1e-10);
        }
    }
}

TEST(adversary, split_routes_fraction) {
    Harness h(2, 47);
    auto psi = PureState::basis(2, 1);
    std::vector<QuditId> in;
    for (int r = 0; r < 10; r++) {
        in.push_back(h.store.create(psi, "t"));
    }
    auto s = strategy_split(0.3);
    auto plan = h.run(*s, in);
    int first = 0;
    int second = 0;
    for (int r = 0; r < 10; r++) {
        bool a = plan.branches[0].states[r].has_value();
        bool b = plan.branches[1].states[r].has_value();
        EXPECT_NE(a, b);
        first += a;
        second += b;
        int branch = a ? 0 : 1;
        EXPECT_NEAR(h.pass_probability(plan, branch, r, psi), 1.0, 1e-10);
    }
    EXPECT_EQ(first, 3);
    EXPECT_EQ(second, 7);
}

TEST(adversary, two_branch_strategies_reject_more_branches) {
    Harness h(2, 48);
    h.geometry = GeometryConfig::radial(3);
    std::vector<QuditId> in{h.store.create(PureState::basis(2, 0), "t")};
    auto cloner = strategy_cloner();
    EXPECT_THROW(h.run(*cloner, in, 3), UnsupportedStrategyError);
    StrategySpec spec;
    spec.name = "postselect";
    EXPECT_THROW(make_strategy(spec, 3), UnsupportedStrategyError);
    spec.name = "honest";
    spec.branch = 2;
    EXPECT_NO_THROW(make_strategy(spec, 3));
    spec.branch = 3;
    EXPECT_THROW(make_strategy(spec, 3), ArgumentError);
    spec.name = "nonesuch";
    EXPECT_THROW(make_strategy(spec, 2), ArgumentError);
}

TEST(adversary, postselect_identity_is_honest) {
    for (int d : {2, 3}) {
        Harness h(d, 49);
        auto s = strategy_teleport_postselect(2, CollectiveOp::Identity);
        for (int k = 0; k < 20; k++) {
            auto psi = PureState::haar(d, h.rng);
            std::vector<QuditId> in{h.store.create(psi, "t")};
            auto plan = h.run(*s, in);
            EXPECT_NEAR(h.pass_probability(plan, 0, 0, psi), 1.0, 1e-10);
            EXPECT_NEAR(h.pass_probability(plan, 1, 0, psi), 1.0 / d, 1e-10);
        }
    }
}

TEST(adversary, postselect_cloner_conditioning_changes_nothing) {
    Harness h(2, 50);
    // Require the first decoy clone to fail and the second to pass.
    auto s = strategy_teleport_postselect(3, CollectiveOp::Cloner, {false, true, true, true});
    for (int k = 0; k < 20; k++) {
        auto psi = PureState::haar(2, h.rng);
        std::vector<QuditId> in{h.store.create(psi, "t")};
        auto plan = h.run(*s, in);
        double p1 = h.pass_probability(plan, 0, 0, psi);
        double p2 = h.pass_probability(plan, 1, 0, psi);
        EXPECT_NEAR(p1 + p2, 5.0 / 3.0, 1e-10);
    }
}

TEST(adversary, postselect_collective_respects_bound) {
    Harness h(2, 51);
    for (auto pattern : {std::vector<bool>{true, true}, std::vector<bool>{true, false}}) {
        auto s = strategy_teleport_postselect(2, CollectiveOp::RandomCollective, pattern);
        MeanAccumulator sum;
        for (int k = 0; k < 2000; k++) {
            auto psi = PureState::haar(2, h.rng);
            std::vector<QuditId> in{h.store.create(psi, "t")};
            auto plan = h.run(*s, in);
            sum.add(h.pass_probability(plan, 0, 0, psi) + h.pass_probability(plan, 1, 0, psi));
        }
        EXPECT_LE(sum.mean, 5.0 / 3.0 + 5 * sum.standard_error());
    }
}

TEST(adversary, postselect_budget_exhausted) {
    Harness h(2, 52);
    // With the identity map the first decoy output is the decoy itself, so it never fails.
    auto s = strategy_teleport_postselect(2, CollectiveOp::Identity, {false, true});
    std::vector<QuditId> in{h.store.create(PureState::basis(2, 0), "t")};
    EXPECT_THROW(h.run(*s, in), SamplingBudgetError);
    auto bad = strategy_teleport_postselect(2, CollectiveOp::Identity, {true});
    std::vector<QuditId> again{h.store.create(PureState::basis(2, 0), "t")};
    EXPECT_THROW(h.run(*bad, again), ArgumentError);
    EXPECT_THROW(strategy_teleport_postselect(5, CollectiveOp::Identity), ArgumentError);
}

TEST(adversary, miswired_adds_same_time_message) {
    Harness h(2, 53);
    std::vector<QuditId> in{h.store.create(PureState::basis(2, 0), "t")};
    auto s = strategy_miswired(0);
    auto plan = h.run(*s, in);
    ASSERT_EQ(plan.extra.size(), 1u);
    EXPECT_EQ(plan.extra[0].emit.t, plan.extra[0].deliver.t);
    EXPECT_EQ(classify(plan.extra[0].emit, plan.extra[0].deliver).kind, CausalKind::Spacelike);
}

TEST(adversary, collective_op_names) {
    for (auto op : {CollectiveOp::Cloner, CollectiveOp::Identity, CollectiveOp::RandomCollective}) {
        EXPECT_EQ(parse_collective_op(to_string(op)), op);
    }
    EXPECT_THROW(parse_collective_op("magic"), ArgumentError);
}
