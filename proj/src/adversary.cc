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

#include <cmath>

#include "relq/errors.h"

namespace relq {

Matrix symmetric_projector(int dim) {
    int d2 = dim * dim;
    Matrix p = Matrix::Zero(d2, d2);
    for (int j = 0; j < dim; j++) {
        for (int m = 0; m < dim; m++) {
            p(j * dim + m, j * dim + m) += 0.5;
            p(m * dim + j, j * dim + m) += 0.5;
        }
    }
    return p;
}

ClonerChannel::ClonerChannel(int dim) : dim_(dim) {
    if (dim < 2) {
        throw ArgumentError("dimension must be at least 2");
    }
    sym_ = symmetric_projector(dim);
    int d = dim;
    double norm = std::sqrt(2.0 / (d + 1));
    isometry_ = Matrix::Zero(d * d * d, d);
    for (int j = 0; j < d; j++) {
        for (int m = 0; m < d; m++) {
            // P_sym |j, m> = (|j, m> + |m, j>) / 2, tensored with |m> on the environment.
            isometry_((j * d + m) * d + m, j) += 0.5 * norm;
            isometry_((m * d + j) * d + m, j) += 0.5 * norm;
        }
    }
}

Matrix ClonerChannel::apply(const DensityMatrix &rho) const {
    if (rho.dim() != dim_) {
        throw ArgumentError("cloner dimension mismatch");
    }
    Matrix id = Matrix::Identity(dim_, dim_);
    return (2.0 / (dim_ + 1)) * sym_ * kron(rho.mat(), id) * sym_;
}

DensityMatrix ClonerChannel::marginal(const DensityMatrix &rho, int which) const {
    Matrix out = partial_trace(apply(rho), dim_, dim_, which);
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

double ClonerChannel::optimal_fidelity(int dim) {
    return 0.5 + 1.0 / (dim + 1);
}

std::string to_string(CollectiveOp op) {
    switch (op) {
        case CollectiveOp::Cloner:
            return "cloner";
        case CollectiveOp::Identity:
            return "identity";
        case CollectiveOp::RandomCollective:
            return "random_collective";
    }
    return "unknown";
}

CollectiveOp parse_collective_op(const std::string &name) {
    if (name == "cloner") {
        return CollectiveOp::Cloner;
    }
    if (name == "identity") {
        return CollectiveOp::Identity;
    }
    if (name == "random_collective" || name == "random") {
        return CollectiveOp::RandomCollective;
    }
    throw ArgumentError("unknown collective operation '" + name + "'");
}

namespace {

StrategyPlan empty_plan(const StrategyContext &ctx) {
    StrategyPlan plan;
    plan.branches.resize(ctx.branches);
    for (auto &b : plan.branches) {
        b.states.assign(ctx.rounds, std::nullopt);
        b.keys.assign(ctx.rounds, std::nullopt);
    }
    return plan;
}

/// Applies a fresh random Weyl operator and routes the qudit with its key.
void route_randomized(StrategyContext &ctx, StrategyPlan &plan, int branch, int round, QuditId q) {
    WeylIndex i = WeylIndex::random(ctx.dim, ctx.rng);
    ctx.store.apply(q, weyl_matrix(ctx.dim, i));
    plan.branches[branch].states[round] = q;
    plan.branches[branch].keys[round] = i;
}

void route_dummy(StrategyContext &ctx, StrategyPlan &plan, int branch, int round) {
    plan.branches[branch].states[round] = ctx.store.create_maximally_mixed("alice.dummy");
    plan.branches[branch].keys[round] = WeylIndex::random(ctx.dim, ctx.rng);
}

void require_two_branches(const StrategyContext &ctx, const char *name) {
    if (ctx.branches != 2) {
        throw UnsupportedStrategyError(std::string(name) + " is implemented for two branches only");
    }
}

class HonestStrategy : public Strategy {
   public:
    HonestStrategy(int branch, bool dummies) : branch_(branch), dummies_(dummies) {
    }

    std::string name() const override {
        return "honest";
    }

    StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) override {
        if (branch_ < 0 || branch_ >= ctx.branches) {
            throw ArgumentError("honest strategy branch out of range");
        }
        StrategyPlan plan = empty_plan(ctx);
        for (int k = 0; k < ctx.rounds; k++) {
            route_randomized(ctx, plan, branch_, k, received[k]);
            if (!dummies_) {
                continue;
            }
            for (int j = 0; j < ctx.branches; j++) {
                if (j != branch_) {
                    route_dummy(ctx, plan, j, k);
                }
            }
        }
        return plan;
    }

   private:
    int branch_;
    bool dummies_;
};

class ClonerStrategy : public Strategy {
   public:
    std::string name() const override {
        return "cloner";
    }

    StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) override {
        require_two_branches(ctx, "cloner");
        if (!cloner_ || cloner_->dim() != ctx.dim) {
            cloner_.emplace(ctx.dim);
        }
        StrategyPlan plan = empty_plan(ctx);
        for (int k = 0; k < ctx.rounds; k++) {
            auto clones = ctx.store.expand(received[k], cloner_->isometry(), 2, 1, "alice.clone");
            route_randomized(ctx, plan, 0, k, clones[0]);
            route_randomized(ctx, plan, 1, k, clones[1]);
        }
        return plan;
    }

   private:
    std::optional<ClonerChannel> cloner_;
};

class SplitStrategy : public Strategy {
   public:
    explicit SplitStrategy(double fraction) : fraction_(fraction) {
    }

    std::string name() const override {
        return "split";
    }

    StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) override {
        StrategyPlan plan = empty_plan(ctx);
        int first = static_cast<int>(std::ceil(fraction_ * ctx.rounds - 1e-9));
        for (int k = 0; k < ctx.rounds; k++) {
            int branch = k < first ? 0 : 1 + (k - first) % (ctx.branches - 1);
            route_randomized(ctx, plan, branch, k, received[k]);
        }
        return plan;
    }

   private:
    double fraction_;
};

class TeleportPostselectStrategy : public Strategy {
   public:
    TeleportPostselectStrategy(int k, CollectiveOp op, std::vector<bool> pattern)
        : k_(k), op_(op), pattern_(std::move(pattern)) {
    }

    std::string name() const override {
        return "postselect";
    }

    StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) override {
        require_two_branches(ctx, "postselect");
        prepare(ctx);
        StrategyPlan plan = empty_plan(ctx);
        for (int r = 0; r < ctx.rounds; r++) {
            auto [first, second] = attack_one(ctx, received[r]);
            route_randomized(ctx, plan, 0, r, first);
            route_randomized(ctx, plan, 1, r, second);
        }
        return plan;
    }

    std::size_t attempts() const {
        return attempts_;
    }

   private:
    void prepare(StrategyContext &ctx) {
        if (pattern_.empty()) {
            pattern_.assign(2 * (k_ - 1), true);
        }
        if (static_cast<int>(pattern_.size()) != 2 * (k_ - 1)) {
            throw ArgumentError("postselection pattern needs two results per decoy");
        }
        if (!cloner_ || cloner_->dim() != ctx.dim) {
            cloner_.emplace(ctx.dim);
        }
        if (op_ == CollectiveOp::RandomCollective && collective_.size() == 0) {
            int wires = 2 * k_;
            collective_ = Unitary::haar(static_cast<int>(std::pow(ctx.dim, wires)), ctx.rng).mat();
        }
    }

    /// Maps the k inputs to k (branch 1, branch 2) output pairs.
    std::vector<std::pair<QuditId, QuditId>> collective(StrategyContext &ctx, const std::vector<QuditId> &inputs) {
        std::vector<std::pair<QuditId, QuditId>> out;
        switch (op_) {
            case CollectiveOp::Cloner:
                for (auto q : inputs) {
                    auto c = ctx.store.expand(q, cloner_->isometry(), 2, 1, "alice.clone");
                    out.emplace_back(c[0], c[1]);
                }
                break;
            case CollectiveOp::Identity:
                for (auto q : inputs) {
                    out.emplace_back(q, ctx.store.create_maximally_mixed("alice.dummy"));
                }
                break;
            case CollectiveOp::RandomCollective: {
                std::vector<QuditId> wires;
                for (auto q : inputs) {
                    wires.push_back(q);
                    wires.push_back(ctx.store.create(PureState::basis(ctx.dim, 0), "alice.ancilla"));
                }
                ctx.store.apply(wires, collective_);
                for (std::size_t m = 0; m < inputs.size(); m++) {
                    out.emplace_back(wires[2 * m], wires[2 * m + 1]);
                }
                break;
            }
        }
        return out;
    }

    std::pair<QuditId, QuditId> attack_one(StrategyContext &ctx, QuditId real) {
        auto &store = ctx.store;
        const auto budget = static_cast<std::size_t>(std::ceil(10.0 / kPostselectFloor));
        for (std::size_t attempt = 0; attempt < budget; attempt++) {
            attempts_++;
            std::vector<PureState> decoys;
            std::vector<QuditId> inputs;
            for (int m = 0; m + 1 < k_; m++) {
                decoys.push_back(PureState::haar(ctx.dim, ctx.rng));
                inputs.push_back(store.create(decoys.back(), "alice.decoy"));
            }
            auto [e1, e2] = store.create_bell_pair("alice.bell_pair");
            inputs.push_back(e1);
            auto outputs = collective(ctx, inputs);

            bool matched = true;
            for (int m = 0; m + 1 < k_; m++) {
                bool r1 = store.test(outputs[m].first, decoys[m], ctx.rng, "alice.decoy_test");
                bool r2 = store.test(outputs[m].second, decoys[m], ctx.rng, "alice.decoy_test");
                matched = matched && r1 == pattern_[2 * m] && r2 == pattern_[2 * m + 1];
            }
            auto [first, second] = outputs.back();
            if (!matched) {
                store.discard(first, "alice.postselect_reject");
                store.discard(second, "alice.postselect_reject");
                store.discard(e2, "alice.postselect_reject");
                continue;
            }
            WeylIndex w = store.bell_measure(real, e2, ctx.rng);
            Matrix correction = weyl_matrix(ctx.dim, w).adjoint();
            store.apply(first, correction);
            store.apply(second, correction);
            return {first, second};
        }
        throw SamplingBudgetError("postselection acceptance below " + std::to_string(kPostselectFloor));
    }

    int k_;
    CollectiveOp op_;
    std::vector<bool> pattern_;
    std::optional<ClonerChannel> cloner_;
    Matrix collective_;
    std::size_t attempts_ = 0;
};

class MiswiredStrategy : public HonestStrategy {
   public:
    explicit MiswiredStrategy(int branch) : HonestStrategy(branch, true) {
    }

    std::string name() const override {
        return "miswired";
    }

    StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) override {
        StrategyPlan plan = HonestStrategy::act(ctx, received);
        const auto &b = ctx.geometry.branches;
        ExtraMessage leak{b[0].q, b[1].q, {}};
        leak.deliver.t = leak.emit.t;
        for (const auto &key : plan.branches[0].keys) {
            leak.keys.push_back(key.value_or(WeylIndex{}));
        }
        plan.extra.push_back(std::move(leak));
        return plan;
    }
};

}  // namespace

std::unique_ptr<Strategy> strategy_honest(int branch, bool dummies) {
    if (branch < 0) {
        throw ArgumentError("branch index must be non-negative");
    }
    return std::make_unique<HonestStrategy>(branch, dummies);
}

std::unique_ptr<Strategy> strategy_cloner() {
    return std::make_unique<ClonerStrategy>();
}

std::unique_ptr<Strategy> strategy_split(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw ArgumentError("split fraction must lie in [0, 1]");
    }
    return std::make_unique<SplitStrategy>(fraction);
}

std::unique_ptr<Strategy> strategy_teleport_postselect(int k, CollectiveOp op, std::vector<bool> pattern) {
    if (k < 1 || k > 4) {
        throw ArgumentError("postselection block size must lie in [1, 4]");
    }
    return std::make_unique<TeleportPostselectStrategy>(k, op, std::move(pattern));
}

std::unique_ptr<Strategy> strategy_miswired(int branch) {
    return std::make_unique<MiswiredStrategy>(branch);
}

std::unique_ptr<Strategy> make_strategy(const StrategySpec &spec, int branches) {
    bool two_only = spec.name == "cloner" || spec.name == "postselect" || spec.name == "miswired";
    if (two_only && branches != 2) {
        throw UnsupportedStrategyError(spec.name + " is implemented for two branches only");
    }
    if (spec.name == "honest") {
        if (spec.branch >= branches) {
            throw ArgumentError("honest strategy branch out of range");
        }
        return strategy_honest(spec.branch, spec.dummies);
    }
    if (spec.name == "cloner") {
        return strategy_cloner();
    }
    if (spec.name == "split") {
        return strategy_split(spec.fraction);
    }
    if (spec.name == "postselect") {
        return strategy_teleport_postselect(spec.k, spec.op, spec.pattern);
    }
    if (spec.name == "miswired") {
        return strategy_miswired(spec.branch);
    }
    throw ArgumentError("unknown strategy '" + spec.name + "'");
}

}  // namespace relq
