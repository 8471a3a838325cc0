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

#ifndef RELQ_MONTECARLO_H
#define RELQ_MONTECARLO_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relq/adversary.h"
#include "relq/protocol.h"
#include "relq/stats.h"
#include "relq/transcript.h"

namespace relq {

struct SimulationOptions {
    std::uint64_t trials = 1;
    int workers = 1;
    double confidence = 0.95;
    /// Offset added to the run index when deriving per-run streams.
    std::uint64_t first_run = 0;
    bool keep_traces = false;
    bool keep_views = false;
    bool keep_runs = false;
    bool keep_first_transcript = false;
};

/// Compact outcome of one run.
struct RunRecord {
    std::vector<std::uint32_t> passes;
    std::vector<std::uint32_t> considered;
    std::vector<std::uint32_t> matched;
    std::vector<Verdict> verdicts;
    bool aborted = false;
    bool token_returnable = false;
    double max_delay = 0.0;
    double min_reveal_separation = 0.0;
};

struct SiteSummary {
    std::uint64_t accepts = 0;
    std::uint64_t rejects = 0;
    std::uint64_t inconclusive = 0;
    std::uint64_t passes = 0;
    std::uint64_t considered = 0;
    std::uint64_t matched = 0;
    /// P(accept at this site) over runs.
    McEstimate accept;
    /// Per-round pass probability, pooled over all rounds of all runs.
    McEstimate pass_rate;
    McEstimate inconclusive_rate;
};

struct SimulationSummary {
    std::uint64_t trials = 0;
    std::vector<SiteSummary> sites;
    /// Per run: sum over sites of passes / considered.
    MeanAccumulator pass_sum;
    /// Per run: number of accepting sites.
    MeanAccumulator accept_sum;
    AuditReport audit;
    std::uint64_t aborted = 0;
    std::uint64_t token_returnable = 0;
    double max_delay = 0.0;
    double min_reveal_separation = 0.0;
    std::vector<MartingaleTrace> traces;
    std::vector<std::string> views;
    std::vector<RunRecord> runs;
    std::optional<Transcript> first_transcript;
};

/// Runs `options.trials` independent protocol instances. Run r uses Rng(config.seed, first_run + r)
/// and a fresh strategy, and every transcript is audited in memory. Results do not depend on
/// the worker count.
SimulationSummary simulate(const ProtocolConfig &config, const StrategySpec &strategy,
                           const SimulationOptions &options);

}  // namespace relq

#endif
