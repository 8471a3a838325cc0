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

// Acceptance gate: runs each end-to-end criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is non-zero if any criterion fails.

#include <sys/wait.h>

#include <unistd.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relq/adversary.h"
#include "relq/errors.h"
#include "relq/experiment.h"
#include "relq/montecarlo.h"
#include "relq/protocol.h"
#include "relq/qudit.h"
#include "relq/stats.h"

using namespace relq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string &what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

int g_workers = 1;
AuditReport g_audit;
std::uint64_t g_runs = 0;

SimulationSummary sim(const ProtocolConfig &c, const StrategySpec &s, std::uint64_t trials,
                      SimulationOptions opt = {}) {
    opt.trials = trials;
    opt.workers = g_workers;
    SimulationSummary out = simulate(c, s, opt);
    g_audit.merge(out.audit);
    g_runs += out.trials;
    return out;
}

ProtocolConfig base(int d, int n, std::uint64_t seed) {
    ProtocolConfig c;
    c.d = d;
    c.n = n;
    c.seed = seed;
    return c;
}

StrategySpec named(const std::string &name) {
    StrategySpec s;
    s.name = name;
    return s;
}

struct ZooEntry {
    std::string label;
    StrategySpec spec;
};

std::vector<ZooEntry> zoo() {
    std::vector<ZooEntry> out;
    out.push_back({"honest", named("honest")});
    for (double f : {0.3, 0.5, 0.7}) {
        StrategySpec s = named("split");
        s.fraction = f;
        out.push_back({fmt("split%.1f", f), s});
    }
    out.push_back({"cloner", named("cloner")});
    StrategySpec ps = named("postselect");
    ps.k = 2;
    ps.op = CollectiveOp::Cloner;
    out.push_back({"postselect_cloner", ps});
    ps.op = CollectiveOp::RandomCollective;
    out.push_back({"postselect_collective", ps});
    return out;
}

// 1: exact marginals of the cloner, plus Monte Carlo of the cloner strategy with one qudit.
Outcome cloning_saturation() {
    Outcome o;
    Rng rng(101);
    double worst = 0.0;
    for (int d = 2; d <= 10; d++) {
        ClonerChannel cloner(d);
        for (int k = 0; k < 3; k++) {
            auto psi = PureState::haar(d, rng);
            auto rho = DensityMatrix::from_pure(psi);
            double sum = fidelity(cloner.marginal(rho, 0), psi) + fidelity(cloner.marginal(rho, 1), psi);
            worst = std::max(worst, std::abs(sum - (1.0 + 2.0 / (d + 1))));
        }
    }
    o.require(worst < 1e-10, fmt("exact |p1+p2-(1+2/(d+1))| = %.2e over d=2..10", worst));
    if (worst < 1e-10) {
        o.note(fmt("exact deviation %.1e", worst));
    }
    for (int d : {2, 3}) {
        auto s = sim(base(d, 1, 1000 + d), named("cloner"), 100000);
        double bound = 1.0 + 2.0 / (d + 1);
        double dev = std::abs(s.pass_sum.mean - bound);
        double sigma = s.pass_sum.standard_error();
        o.require(dev <= 5 * sigma, fmt("d=%d MC p1+p2 %.4f vs %.4f (5 sigma %.4f)", d, s.pass_sum.mean, bound,
                                        5 * sigma));
        o.note(fmt("d=%d MC p1+p2=%.4f (bound %.4f, sigma %.4f)", d, s.pass_sum.mean, bound, sigma));
        for (int j = 0; j < 2; j++) {
            const auto &p = s.sites[j].pass_rate;
            o.require(std::abs(p.point - (0.5 + 1.0 / (d + 1))) <= 5 * p.half_width(),
                      fmt("d=%d site %d pass %.4f", d, j + 1, p.point));
        }
    }
    return o;
}

// 2: single-qudit pass probabilities over the zoo never exceed the cloning bound.
Outcome zoo_bound() {
    Outcome o;
    double worst = -1e9;
    std::string worst_label;
    for (int d : {2, 3}) {
        double bound = 1.0 + 2.0 / (d + 1);
        for (const auto &z : zoo()) {
            // Split needs several rounds for the fraction to mean anything; rates are per round.
            int n = z.spec.name == "split" ? 10 : 1;
            auto s = sim(base(d, n, 2000 + d), z.spec, 100000);
            double sum = s.pass_sum.mean;
            double sigma = s.pass_sum.standard_error();
            o.require(sum <= bound + 5 * sigma, fmt("d=%d %s p1+p2 %.4f > %.4f + 5*%.4f", d, z.label.c_str(), sum,
                                                    bound, sigma));
            if (sum - bound > worst) {
                worst = sum - bound;
                worst_label = fmt("d=%d %s", d, z.label.c_str());
            }
        }
    }
    o.note(fmt("max (p1+p2 - bound) = %+.4f at %s", worst, worst_label.c_str()));
    return o;
}

// 3: N-round protocol, every zoo strategy, accept probabilities summed over sites.
Outcome redundant_soundness() {
    Outcome o;
    double azuma = azuma_bound(1000, 2, 0.1);
    o.require(std::abs(azuma - std::exp(-1.8)) < 1e-12, "azuma bound value");
    double limit = 1.0 + azuma;
    double worst = 0.0;
    std::string worst_label;
    for (const auto &z : zoo()) {
        auto s = sim(base(2, 1000, 3000), z.spec, 10000);
        double sum = s.accept_sum.mean;
        double sigma = s.accept_sum.standard_error();
        o.require(sum <= limit + 5 * sigma, fmt("%s P1+P2 %.4f > %.4f + 5*%.4f", z.label.c_str(), sum, limit, sigma));
        if (sum >= worst) {
            worst = sum;
            worst_label = z.label;
        }
    }
    o.note(fmt("max P1+P2 = %.4f (%s), limit 1 + %.4f", worst, worst_label.c_str(), azuma));
    return o;
}

// 4: honest Alice at d=3 below and above the tolerable loss.
Outcome loss_tolerance_check() {
    Outcome o;
    o.require(std::abs(relq::loss_tolerance(3) - 0.25) < 1e-15, "loss tolerance at d=3");
    for (double loss : {0.2, 0.3}) {
        auto c = base(3, 2000, 4000);
        c.epsilon = 0.02;
        c.alice_quantum.loss.loss_prob = loss;
        StrategySpec s = named("honest");
        auto r = sim(c, s, 2000);
        const auto &a = r.sites[0].accept;
        if (loss < 0.25) {
            o.require(a.ci_low >= 0.99, fmt("loss %.2f accept %.4f [%.4f, %.4f] < 0.99", loss, a.point, a.ci_low,
                                            a.ci_high));
        } else {
            o.require(a.ci_high <= 0.01, fmt("loss %.2f accept %.4f [%.4f, %.4f] > 0.01", loss, a.point, a.ci_low,
                                             a.ci_high));
        }
        o.note(fmt("loss %.2f: accept %.4f [%.4f, %.4f]", loss, a.point, a.ci_low, a.ci_high));
    }
    return o;
}

// 5: split succeeds at both sites when Bob tolerates more than half the states missing.
Outcome split_permissive() {
    Outcome o;
    auto c = base(2, 1000, 5000);
    c.threshold = ThresholdConvention::AllowedLoss;
    c.allowed_loss = 0.55;
    StrategySpec s = named("split");
    s.fraction = 0.5;
    SimulationOptions opt;
    opt.keep_runs = true;
    auto r = sim(c, s, 500, opt);
    std::uint64_t both = 0;
    for (const auto &run : r.runs) {
        both += run.verdicts[0] == Verdict::Accept && run.verdicts[1] == Verdict::Accept;
    }
    auto est = McEstimate::from_counts(both, r.trials);
    o.require(est.ci_low >= 0.99, fmt("accept at both sites %.4f [%.4f, %.4f]", est.point, est.ci_low, est.ci_high));
    o.note(fmt("accept at both sites %.4f [%.4f, %.4f]", est.point, est.ci_low, est.ci_high));
    return o;
}

std::map<std::string, std::size_t> g_categories;

std::vector<std::uint64_t> histogram(const std::vector<std::string> &views) {
    std::vector<std::uint64_t> counts(g_categories.size());
    for (const auto &v : views) {
        counts[g_categories.at(v)]++;
    }
    return counts;
}

// 6: exact twirl, then the pre-reveal adversary view for j=1 versus j=2.
Outcome hiding() {
    Outcome o;
    Rng rng(601);
    double worst = 0.0;
    for (int d = 2; d <= 7; d++) {
        for (int k = 0; k < 20; k++) {
            auto rho = DensityMatrix::from_pure(PureState::haar(d, rng));
            worst = std::max(worst, trace_distance(weyl_twirl(rho), DensityMatrix::maximally_mixed(d)));
        }
    }
    o.require(worst < 1e-10, fmt("twirl distance %.2e", worst));
    o.note(fmt("twirl distance %.1e", worst));
    for (auto mode : {VerifyMode::B1, VerifyMode::B2}) {
        auto c = base(2, 2, 6000);
        c.mode = mode;
        c.alice_quantum.kind = ChannelKind::RandomizedTransmission;
        c.bob_probe = true;
        SimulationOptions opt;
        opt.keep_views = true;
        StrategySpec s = named("honest");
        s.branch = 0;
        auto first = sim(c, s, 10000, opt);
        s.branch = 1;
        opt.first_run = 10000;
        auto second = sim(c, s, 10000, opt);
        g_categories.clear();
        for (const auto *v : {&first.views, &second.views}) {
            for (const auto &x : *v) {
                g_categories.emplace(x, g_categories.size());
            }
        }
        double p = homogeneity_test(histogram(first.views), histogram(second.views));
        o.require(p >= 0.001, fmt("%s view homogeneity p = %.3g", to_string(mode).c_str(), p));
        o.note(fmt("%s: %zu view classes, p = %.3f", to_string(mode).c_str(), g_categories.size(), p));
    }
    return o;
}

// 7: Direct against B1 and B2 with common random numbers, per strategy and site.
Outcome extension_equivalence() {
    Outcome o;
    double worst = 0.0;
    int exact = 0;
    int compared = 0;
    for (const auto &z : zoo()) {
        auto c = base(2, 10, 7000);
        SimulationOptions opt;
        opt.keep_runs = true;
        auto direct = sim(c, z.spec, 10000, opt);
        for (auto mode : {VerifyMode::B1, VerifyMode::B2}) {
            c.mode = mode;
            auto ext = sim(c, z.spec, 10000, opt);
            for (int j = 0; j < 2; j++) {
                MeanAccumulator diff;
                for (std::size_t r = 0; r < direct.runs.size(); r++) {
                    diff.add((static_cast<double>(direct.runs[r].passes[j]) - ext.runs[r].passes[j]) / c.n);
                }
                double se = diff.standard_error();
                compared++;
                exact += diff.mean == 0.0 && se == 0.0;
                o.require(std::abs(diff.mean) <= 3 * se,
                          fmt("%s %s site %d diff %.4f (3 sigma %.4f)", z.label.c_str(), to_string(mode).c_str(),
                              j + 1, diff.mean, 3 * se));
                if (se > 0) {
                    worst = std::max(worst, std::abs(diff.mean) / se);
                }
            }
        }
    }
    o.note(fmt("%d comparisons, %d identical run by run, max |diff|/sigma = %.2f", compared, exact, worst));
    return o;
}

// 8: B3 with M=300: matched-round tail, inconclusive and accept rates.
Outcome b3_statistics() {
    Outcome o;
    double tail = 1.0 - binomial_tail(1200, 200, 0.25);
    o.require(tail <= 1e-4, fmt("P(matched < 200) = %.3g", tail));
    auto c = base(2, 1200, 8000);
    c.mode = VerifyMode::B3;
    c.m = 300;
    auto r = sim(c, named("honest"), 2000);
    std::uint64_t inconclusive = 0;
    for (const auto &s : r.sites) {
        inconclusive += s.inconclusive;
    }
    double rate = static_cast<double>(inconclusive) / (2.0 * r.trials);
    o.require(rate <= 1e-4, fmt("inconclusive rate %.2e", rate));
    const auto &a = r.sites[0].accept;
    o.require(a.point >= 0.99, fmt("accept %.4f", a.point));
    o.note(fmt("P(matched < 2M/3) = %.2e, MC inconclusive %.1e, accept %.4f [%.4f, %.4f]", tail, rate, a.point,
               a.ci_low, a.ci_high));
    return o;
}

int run_cli(const std::string &args) {
    std::string cmd = std::string(RELQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9: audit totals over everything above, then the miswired strategy through the CLI.
Outcome causality_audit() {
    Outcome o;
    o.require(g_audit.causality_violations == 0 && g_audit.linearity_violations == 0,
              fmt("%llu causality, %llu linearity violations", (unsigned long long)g_audit.causality_violations,
                  (unsigned long long)g_audit.linearity_violations));
    o.require(g_audit.taint_violations == 0, "taint violations");
    o.note(fmt("%llu transcripts audited clean", (unsigned long long)g_runs));
    auto dir = std::filesystem::temp_directory_path() / fmt("relq_acceptance_%d", static_cast<int>(getpid()));
    std::filesystem::create_directories(dir);
    std::string spec = std::string(RELQ_SPECS_DIR) + "/miswired.ini";
    std::string transcript = (dir / "miswired.jsonl").string();
    int run_status = run_cli("run " + spec + " -o " + (dir / "miswired.json").string() + " --transcript " + transcript);
    int audit_status = run_cli("audit " + transcript);
    o.require(audit_status == 4, fmt("miswired audit exit %d", audit_status));
    o.note(fmt("miswired: run exit %d, audit exit %d", run_status, audit_status));
    std::filesystem::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    unsigned hw = std::thread::hardware_concurrency();
    g_workers = workers_from_env(hw == 0 ? 1 : static_cast<int>(hw));
    std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"cloning bound saturation", cloning_saturation},
        {"no strategy beats the bound", zoo_bound},
        {"redundant protocol soundness", redundant_soundness},
        {"loss tolerance", loss_tolerance_check},
        {"split at permissive threshold", split_permissive},
        {"randomization hiding", hiding},
        {"extension equivalence", extension_equivalence},
        {"B3 matched-round statistics", b3_statistics},
        {"causality audit", causality_audit},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); i++) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("criterion %zu %s: %s (%.1fs) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
