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

#include "relq/montecarlo.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "relq/errors.h"

namespace relq {

namespace {

struct Slot {
    RunRecord record;
    AuditReport audit;
    std::optional<MartingaleTrace> trace;
    std::string view;
};

}  // namespace

SimulationSummary simulate(const ProtocolConfig &config, const StrategySpec &strategy,
                           const SimulationOptions &options) {
    if (options.trials < 1) {
        throw ArgumentError("trials must be at least 1");
    }
    config.validate();
    // Fail fast on an unsupported strategy before spawning workers.
    make_strategy(strategy, config.branches());

    const std::uint64_t trials = options.trials;
    std::vector<Slot> slots(trials);
    std::optional<Transcript> first;
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!failed.load()) {
            std::uint64_t r = next.fetch_add(1);
            if (r >= trials) {
                return;
            }
            try {
                auto s = make_strategy(strategy, config.branches());
                Rng rng(config.seed, options.first_run + r);
                RunResult result = run_protocol(config, *s, rng);
                Slot &slot = slots[r];
                slot.audit = audit(result.transcript);
                RunRecord &rec = slot.record;
                for (const auto &site : result.tally.sites) {
                    rec.passes.push_back(site.passes);
                    rec.considered.push_back(site.considered);
                    rec.matched.push_back(site.matched);
                    rec.verdicts.push_back(site.verdict);
                }
                rec.aborted = result.aborted;
                rec.token_returnable = result.metrics.token_returnable;
                rec.max_delay = result.metrics.max_delay;
                rec.min_reveal_separation = result.metrics.min_reveal_separation;
                if (options.keep_traces) {
                    slot.trace = result.tally.trace();
                }
                if (options.keep_views) {
                    slot.view = adversary_view(result.transcript);
                }
                if (r == 0 && options.keep_first_transcript) {
                    first.emplace(std::move(result.transcript));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(std::min<std::uint64_t>(trials, 256))));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; w++) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    // Aggregate in run order so floating-point sums do not depend on scheduling.
    SimulationSummary out;
    out.trials = trials;
    const int nb = config.branches();
    out.sites.resize(nb);
    out.max_delay = -std::numeric_limits<double>::infinity();
    out.min_reveal_separation = std::numeric_limits<double>::infinity();
    for (auto &slot : slots) {
        const RunRecord &rec = slot.record;
        double pass_sum = 0.0;
        double accept_sum = 0.0;
        for (int j = 0; j < nb; j++) {
            SiteSummary &s = out.sites[j];
            s.passes += rec.passes[j];
            s.considered += rec.considered[j];
            s.matched += rec.matched[j];
            switch (rec.verdicts[j]) {
                case Verdict::Accept:
                    s.accepts++;
                    accept_sum += 1.0;
                    break;
                case Verdict::Reject:
                    s.rejects++;
                    break;
                case Verdict::Inconclusive:
                    s.inconclusive++;
                    break;
            }
            if (rec.considered[j] > 0) {
                pass_sum += static_cast<double>(rec.passes[j]) / rec.considered[j];
            }
        }
        out.pass_sum.add(pass_sum);
        out.accept_sum.add(accept_sum);
        out.audit.merge(slot.audit);
        out.aborted += rec.aborted;
        out.token_returnable += rec.token_returnable;
        out.max_delay = std::max(out.max_delay, rec.max_delay);
        out.min_reveal_separation = std::min(out.min_reveal_separation, rec.min_reveal_separation);
        if (slot.trace) {
            out.traces.push_back(std::move(*slot.trace));
        }
        if (options.keep_views) {
            out.views.push_back(std::move(slot.view));
        }
        if (options.keep_runs) {
            out.runs.push_back(rec);
        }
    }
    for (auto &s : out.sites) {
        s.accept = McEstimate::from_counts(s.accepts, trials, options.confidence);
        s.inconclusive_rate = McEstimate::from_counts(s.inconclusive, trials, options.confidence);
        s.pass_rate = McEstimate::from_counts(s.passes, s.considered, options.confidence);
    }
    out.first_transcript = std::move(first);
    return out;
}

}  // namespace relq
