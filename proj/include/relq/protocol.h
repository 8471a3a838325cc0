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

#ifndef RELQ_PROTOCOL_H
#define RELQ_PROTOCOL_H

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relq/adversary.h"
#include "relq/channels.h"
#include "relq/spacetime.h"
#include "relq/stats.h"
#include "relq/transcript.h"

namespace relq {

enum class VerifyMode : std::uint8_t {
    /// Alice carries the state to Q_j and hands it over there.
    Direct,
    /// Bob carries the randomized state from P'_j to Q_j and tests there.
    B1,
    /// Bob stores the randomized state at P'_j; the keys travel back from Q_j.
    B2,
    /// Bob guesses the keys at P'_j and keeps the rounds where he guessed right.
    B3,
};

std::string to_string(VerifyMode m);
VerifyMode parse_verify_mode(const std::string &s);

enum class ThresholdConvention : std::uint8_t {
    /// Accept iff N_i >= (N/2)(1 + 2/(d+1) + eps).
    Methods,
    /// Accept iff N_i > (N/2)(1 + 1/(d+1) + eps).
    Body,
    /// Accept iff N_i >= (1 - lambda) N for a tolerated loss lambda.
    AllowedLoss,
};

std::string to_string(ThresholdConvention c);
ThresholdConvention parse_threshold_convention(const std::string &s);

struct ProtocolConfig {
    int d = 2;
    int n = 1;
    GeometryConfig geometry = GeometryConfig::canonical();
    /// Alice's quantum leg from P to her destination lab (Q_j, or P'_j in B1/B2/B3).
    ChannelSpec alice_quantum{ChannelKind::PhysicallySecure, 1.0, 0.0, {}};
    /// Alice's classical leg carrying the keys to Q_j.
    ChannelSpec alice_classical{ChannelKind::ClassicalSecure, 1.0, 0.0, {}};
    /// Bob's own transport: carrying states in B1, sending keys back in B2.
    ChannelSpec bob_transport{ChannelKind::PhysicallySecure, 1.0, 0.0, {}};
    VerifyMode mode = VerifyMode::Direct;
    double epsilon = 0.1;
    /// B3 multiplicity; N must equal M d^2.
    int m = 0;
    ThresholdConvention threshold = ThresholdConvention::Methods;
    /// Tolerated loss for ThresholdConvention::AllowedLoss.
    double allowed_loss = 0.0;
    /// B2: states stored longer than this are lost.
    double storage_lifetime = std::numeric_limits<double>::infinity();
    /// Constant c in the pairwise bound p_1 + p_2 <= 1 + c. Defaults to 2/(d+1); required
    /// explicitly when there are more than two branches.
    std::optional<double> multi_site_bound;
    /// Bob measures everything he holds against his own records as soon as he receives it.
    bool bob_probe = false;
    std::uint64_t seed = 0;

    int branches() const {
        return static_cast<int>(geometry.branches.size());
    }
    /// The constant c above.
    double bound_constant() const;
    /// Throws ConfigError describing the first problem found.
    void validate() const;
};

struct SiteTally {
    std::uint32_t passes = 0;
    /// Rounds the verdict is based on: N, or the matched count in B3.
    std::uint32_t considered = 0;
    std::uint32_t matched = 0;
    std::uint32_t delivered = 0;
    double threshold = 0.0;
    Verdict verdict = Verdict::Reject;
    /// Per-round pass indicator D_{j,k}.
    std::vector<std::uint8_t> d;
};

struct TestTally {
    int dim = 2;
    int rounds = 0;
    /// Increment bound 1 + c of the martingale.
    double increment_bound = 0.0;
    std::vector<SiteTally> sites;

    /// Z_k = sum_{j<=k} sum_sites D_{site,j} - k (1 + c).
    MartingaleTrace trace() const;
};

struct RunMetrics {
    /// Largest lateness of a verification event relative to the nominal Q_j.
    double max_delay = 0.0;
    /// Smallest |dx| - |dt| over pairs of reveal events; negative means the unveils are not spacelike.
    double min_reveal_separation = std::numeric_limits<double>::infinity();
    /// B1/B2 lossless runs where every chosen-site state survived verification intact.
    bool token_returnable = false;
};

struct RunResult {
    Transcript transcript;
    TestTally tally;
    RunMetrics metrics;
    bool aborted = false;
};

/// Runs one protocol instance. Dispatches on config.mode.
RunResult run_protocol(const ProtocolConfig &config, Strategy &strategy, Rng &rng);

/// Mode-checked entry points.
RunResult run_direct(const ProtocolConfig &config, Strategy &strategy, Rng &rng);
RunResult run_extended(const ProtocolConfig &config, Strategy &strategy, Rng &rng);
RunResult run_b3(const ProtocolConfig &config, Strategy &strategy, Rng &rng);

/// Threshold on the pass count when `considered` rounds count toward the verdict.
double acceptance_threshold(const ProtocolConfig &config, std::uint32_t considered);
bool clears_threshold(const ProtocolConfig &config, std::uint32_t passes, std::uint32_t considered);
/// Verdict per site from a complete tally.
std::vector<Verdict> redundant_verdict(const TestTally &tally, const ProtocolConfig &config);

/// 1 + 2/(d+1).
double cloning_bound(int d);
/// exp(-N eps^2 / (2 (1 + 2/(d+1))^2)).
double azuma_bound(double n, int d, double epsilon);
/// 1/2 - 1/(d+1).
double loss_tolerance(int d);

}  // namespace relq

#endif
