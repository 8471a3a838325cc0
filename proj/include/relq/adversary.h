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

#ifndef RELQ_ADVERSARY_H
#define RELQ_ADVERSARY_H

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relq/spacetime.h"
#include "relq/store.h"

namespace relq {

/// Optimal symmetric 1 -> 2 cloner: rho -> (2/(d+1)) P_sym (rho (x) I) P_sym.
class ClonerChannel {
   public:
    explicit ClonerChannel(int dim);

    int dim() const {
        return dim_;
    }
    /// d^2 x d^2 output state of the two clones.
    Matrix apply(const DensityMatrix &rho) const;
    /// Reduced state of clone `which` (0 or 1).
    DensityMatrix marginal(const DensityMatrix &rho, int which) const;
    /// Stinespring isometry C^d -> C^d (x) C^d (x) C^d; outputs ordered (clone 1, clone 2, environment).
    const Matrix &isometry() const {
        return isometry_;
    }
    /// 1/2 + 1/(d+1).
    static double optimal_fidelity(int dim);

   private:
    int dim_;
    Matrix sym_;
    Matrix isometry_;
};

/// Projector onto the symmetric subspace of C^d (x) C^d.
Matrix symmetric_projector(int dim);

/// What Alice hands back on one branch. Slot k belongs to round k; keys are the classical
/// data she will deliver at Q_j.
struct BranchOutput {
    std::vector<std::optional<QuditId>> states;
    std::vector<std::optional<WeylIndex>> keys;
};

/// A classical transmission the strategy asks for outside the normal protocol legs.
struct ExtraMessage {
    Event emit;
    Event deliver;
    std::vector<WeylIndex> keys;
};

struct StrategyPlan {
    std::vector<BranchOutput> branches;
    std::vector<ExtraMessage> extra;
};

struct StrategyContext {
    QuditStore &store;
    Rng &rng;
    const GeometryConfig &geometry;
    int dim;
    int branches;
    int rounds;
};

/// One instance per run; strategies may keep per-run memory.
class Strategy {
   public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    /// Called once at P with Alice's received qudits (one per round).
    virtual StrategyPlan act(StrategyContext &ctx, std::span<const QuditId> received) = 0;
};

enum class CollectiveOp { Cloner, Identity, RandomCollective };

std::string to_string(CollectiveOp op);
CollectiveOp parse_collective_op(const std::string &name);

/// Rejection-sampling floor for teleport-postselect; below it the strategy gives up.
inline constexpr double kPostselectFloor = 1e-4;

struct StrategySpec {
    std::string name = "honest";
    int branch = 0;
    double fraction = 0.5;
    bool dummies = true;
    int k = 2;
    CollectiveOp op = CollectiveOp::Cloner;
    /// Required decoy results, two per decoy (branch 1 then branch 2). Empty means all pass.
    std::vector<bool> pattern;
};

std::unique_ptr<Strategy> strategy_honest(int branch, bool dummies = true);
std::unique_ptr<Strategy> strategy_cloner();
std::unique_ptr<Strategy> strategy_split(double fraction);
std::unique_ptr<Strategy> strategy_teleport_postselect(int k, CollectiveOp op, std::vector<bool> pattern = {});
/// Honest at `branch`, but additionally tries to signal from Q_1 to Q_2 at the time of Q_1.
/// Exists only to exercise the causality audit.
std::unique_ptr<Strategy> strategy_miswired(int branch);

/// Builds the strategy described by `spec` and checks it against the branch count.
/// Throws UnsupportedStrategyError or ArgumentError.
std::unique_ptr<Strategy> make_strategy(const StrategySpec &spec, int branches);

}  // namespace relq

#endif
