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

#include "relq/protocol.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "relq/errors.h"

namespace relq {

std::string to_string(VerifyMode m) {
    switch (m) {
        case VerifyMode::Direct:
            return "direct";
        case VerifyMode::B1:
            return "b1";
        case VerifyMode::B2:
            return "b2";
        case VerifyMode::B3:
            return "b3";
    }
    return "unknown";
}

VerifyMode parse_verify_mode(const std::string &s) {
    for (auto m : {VerifyMode::Direct, VerifyMode::B1, VerifyMode::B2, VerifyMode::B3}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ArgumentError("unknown verification mode '" + s + "'");
}

std::string to_string(ThresholdConvention c) {
    switch (c) {
        case ThresholdConvention::Methods:
            return "methods";
        case ThresholdConvention::Body:
            return "body";
        case ThresholdConvention::AllowedLoss:
            return "allowed_loss";
    }
    return "unknown";
}

ThresholdConvention parse_threshold_convention(const std::string &s) {
    for (auto c : {ThresholdConvention::Methods, ThresholdConvention::Body, ThresholdConvention::AllowedLoss}) {
        if (to_string(c) == s) {
            return c;
        }
    }
    throw ArgumentError("unknown threshold convention '" + s + "'");
}

double ProtocolConfig::bound_constant() const {
    return multi_site_bound.value_or(2.0 / (d + 1));
}

void ProtocolConfig::validate() const {
    if (d < 2 || d > 64) {
        throw ConfigError("d must lie in [2, 64]");
    }
    if (n < 1) {
        throw ConfigError("N must be at least 1");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("epsilon must be positive");
    }
    ValidationReport report = validate_geometry(geometry);
    if (!report.ok()) {
        throw ConfigError("invalid geometry:\n" + report.describe());
    }
    try {
        alice_quantum.validate();
        alice_classical.validate();
        bob_transport.validate();
    } catch (const ArgumentError &e) {
        throw ConfigError(e.what());
    }
    if (!is_quantum(alice_quantum.kind)) {
        throw ConfigError("alice quantum leg must use a quantum channel kind");
    }
    if (is_quantum(alice_classical.kind)) {
        throw ConfigError("alice classical leg must use a classical channel kind");
    }
    if (mode == VerifyMode::B3) {
        if (m < 1 || static_cast<long long>(n) != static_cast<long long>(m) * d * d) {
            throw ConfigError("B3 mode requires N = M d^2 with M >= 1");
        }
    }
    if (threshold == ThresholdConvention::AllowedLoss && !(allowed_loss >= 0.0 && allowed_loss < 1.0)) {
        throw ConfigError("allowed_loss must lie in [0, 1)");
    }
    if (!(storage_lifetime > 0.0)) {
        throw ConfigError("storage lifetime must be positive");
    }
    if (branches() > 2 && !multi_site_bound) {
        throw ConfigError("more than two branches need an explicit multi_site_bound");
    }
    if (multi_site_bound && !(*multi_site_bound > 0.0)) {
        throw ConfigError("multi_site_bound must be positive");
    }
}

MartingaleTrace TestTally::trace() const {
    std::vector<std::uint8_t> passes(rounds, 0);
    for (const auto &s : sites) {
        for (int k = 0; k < rounds; k++) {
            passes[k] += s.d[k];
        }
    }
    return MartingaleTrace::from_passes(passes, increment_bound);
}

double cloning_bound(int d) {
    return 1.0 + 2.0 / (d + 1);
}

double azuma_bound(double n, int d, double epsilon) {
    return azuma_tail(n, epsilon, cloning_bound(d));
}

double loss_tolerance(int d) {
    if (d < 2) {
        throw ArgumentError("dimension must be at least 2");
    }
    return 0.5 - 1.0 / (d + 1);
}

double acceptance_threshold(const ProtocolConfig &config, std::uint32_t considered) {
    double n = static_cast<double>(considered);
    double c = config.bound_constant();
    switch (config.threshold) {
        case ThresholdConvention::Methods:
            return 0.5 * n * (1.0 + c + config.epsilon);
        case ThresholdConvention::Body:
            return 0.5 * n * (1.0 + 0.5 * c + config.epsilon);
        case ThresholdConvention::AllowedLoss:
            return (1.0 - config.allowed_loss) * n;
    }
    return n;
}

bool clears_threshold(const ProtocolConfig &config, std::uint32_t passes, std::uint32_t considered) {
    double t = acceptance_threshold(config, considered);
    double p = static_cast<double>(passes);
    // Guard the >= comparisons against rounding when the threshold is an integer in exact arithmetic.
    if (config.threshold == ThresholdConvention::Body) {
        return p > t + 1e-9;
    }
    return p >= t - 1e-9;
}

std::vector<Verdict> redundant_verdict(const TestTally &tally, const ProtocolConfig &config) {
    std::vector<Verdict> out;
    for (const auto &s : tally.sites) {
        if (config.mode == VerifyMode::B3 && 3 * static_cast<long long>(s.matched) < 2LL * config.m) {
            out.push_back(Verdict::Inconclusive);
            continue;
        }
        out.push_back(clears_threshold(config, s.passes, s.considered) ? Verdict::Accept : Verdict::Reject);
    }
    return out;
}

namespace {

class EventQueue {
   public:
    void schedule(double t, std::function<void()> fn) {
        queue_.push({t, order_++, std::move(fn)});
    }
    void run() {
        while (!queue_.empty()) {
            auto item = queue_.top();
            queue_.pop();
            if (item.t < now_) {
                throw StateError("event queue went backwards in time");
            }
            now_ = item.t;
            item.fn();
        }
    }

   private:
    struct Item {
        double t;
        std::uint64_t order;
        std::function<void()> fn;
        bool operator>(const Item &o) const {
            return t != o.t ? t > o.t : order > o.order;
        }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
    std::uint64_t order_ = 0;
    double now_ = -std::numeric_limits<double>::infinity();
};

struct BranchState {
    std::vector<std::optional<QuditId>> held;
    std::vector<std::optional<WeylIndex>> keys;
    std::vector<WeylIndex> channel_keys;
    std::vector<int> guesses;
    std::vector<std::uint8_t> guess_pass;
    Event arrival;
    Event reveal;
    Event verified_at;
    bool verified = false;
};

Event later(const Event &a, const Event &b) {
    return b.t > a.t ? b : a;
}

class Engine {
   public:
    Engine(const ProtocolConfig &cfg, Strategy &strategy, Rng &rng)
        : cfg_(cfg),
          strategy_(strategy),
          tol_(cfg.geometry.linear_tolerance()),
          bob_rng_(rng.split(1)),
          alice_rng_(rng.split(2)),
          channel_rng_(rng.split(3)),
          guess_rng_(rng.split(4)),
          result_{Transcript(cfg.d, tol_, strategy.name()), {}, {}, false},
          store_(cfg.d, &result_.transcript) {
        for (int j = 0; j < cfg.branches(); j++) {
            measure_rng_.push_back(rng.split(16 + static_cast<std::uint64_t>(j)));
        }
    }

    RunResult run() {
        const int nb = cfg_.branches();
        branches_.resize(nb);
        auto &tally = result_.tally;
        tally.dim = cfg_.d;
        tally.rounds = cfg_.n;
        tally.increment_bound = 1.0 + cfg_.bound_constant();
        tally.sites.resize(nb);
        for (auto &s : tally.sites) {
            s.d.assign(cfg_.n, 0);
        }
        try {
            start();
            queue_.run();
        } catch (const CausalityError &e) {
            result_.transcript.add_abort(e.what());
            result_.aborted = true;
        }
        finish();
        return std::move(result_);
    }

   private:
    const Event &p() const {
        return cfg_.geometry.p;
    }
    const Branch &branch(int j) const {
        return cfg_.geometry.branches[j];
    }
    bool extended() const {
        return cfg_.mode != VerifyMode::Direct;
    }

    void start() {
        const int n = cfg_.n;
        psi_.reserve(n);
        std::vector<QuditId> handed;
        handed.reserve(n);
        for (int k = 0; k < n; k++) {
            psi_.push_back(PureState::haar(cfg_.d, bob_rng_));
            handed.push_back(store_.create(psi_.back(), "bob.prepare"));
        }
        Message handover = make_message(ChannelKind::PhysicallySecure, Party::Bob, Party::Alice, -1, "handover.p", p(),
                                        p(), 1.0, tol_);
        handover.qudits.assign(handed.begin(), handed.end());
        std::uint64_t seq = result_.transcript.add_message(std::move(handover));
        for (auto id : handed) {
            result_.transcript.add_input(id, seq);
        }

        StrategyContext ctx{store_, alice_rng_, cfg_.geometry, cfg_.d, cfg_.branches(), n};
        StrategyPlan plan = strategy_.act(ctx, handed);
        if (static_cast<int>(plan.branches.size()) != cfg_.branches()) {
            throw StateError("strategy returned the wrong number of branches");
        }
        for (const auto &b : plan.branches) {
            if (static_cast<int>(b.states.size()) != n || static_cast<int>(b.keys.size()) != n) {
                throw StateError("strategy returned the wrong number of rounds");
            }
        }
        for (const auto &x : plan.extra) {
            send_extra(x);
        }
        for (int j = 0; j < cfg_.branches(); j++) {
            branches_[j].keys = std::move(plan.branches[j].keys);
            send_quantum(j, plan.branches[j].states);
        }
    }

    void send_extra(const ExtraMessage &x) {
        try {
            Message m = make_message(ChannelKind::ClassicalSecure, Party::Alice, Party::Alice, -1, "classical.extra",
                                     x.emit, x.deliver, 1.0, tol_);
            m.keys = x.keys;
            result_.transcript.add_message(std::move(m));
        } catch (const CausalityError &) {
            Message m;
            m.channel = ChannelKind::ClassicalSecure;
            m.label = "classical.extra";
            m.emit = x.emit;
            m.deliver = x.deliver;
            m.keys = x.keys;
            result_.transcript.add_message(std::move(m), false);
            throw;
        }
    }

    Event destination(int j) const {
        return extended() ? branch(j).p_prime : branch(j).q;
    }

    void send_quantum(int j, const std::vector<std::optional<QuditId>> &states) {
        const ChannelSpec &q = cfg_.alice_quantum;
        const ChannelSpec &c = cfg_.alice_classical;
        BranchState &b = branches_[j];
        switch (q.kind) {
            case ChannelKind::PhysicallySecure: {
                b.arrival = earliest_arrival(p(), destination(j), q.speed, q.latency);
                SecureRegion region;
                region.add({p(), b.arrival});
                Message m = send_s1(store_, states, p(), b.arrival, q, region, tol_, channel_rng_, Party::Alice,
                                    Party::Alice, j);
                b.held = m.qudits;
                result_.transcript.add_message(std::move(m));
                break;
            }
            case ChannelKind::TeleportPredistributed: {
                b.arrival = earliest_arrival(p(), destination(j), c.speed, c.latency);
                std::vector<EntangledResource> resources;
                resources.reserve(states.size());
                for (std::size_t k = 0; k < states.size(); k++) {
                    resources.push_back(states[k] ? EntangledResource::distribute(store_) : EntangledResource());
                }
                TeleportResult r = send_s2_teleport(store_, states, resources, p(), b.arrival, q, c, tol_,
                                                    channel_rng_, Party::Alice, Party::Alice, j);
                b.held = std::move(r.received);
                result_.transcript.add_message(std::move(r.classical));
                break;
            }
            case ChannelKind::RandomizedTransmission: {
                b.arrival = earliest_arrival(p(), destination(j), std::min(q.speed, c.speed),
                                             std::max(q.latency, c.latency));
                RandomizedResult r = send_s3_randomized(store_, states, p(), b.arrival, q, c, tol_, channel_rng_,
                                                        Party::Alice, Party::Alice, j);
                b.held = r.quantum.qudits;
                b.channel_keys = r.classical.keys;
                result_.transcript.add_message(std::move(r.quantum));
                result_.transcript.add_message(std::move(r.classical));
                break;
            }
            default:
                throw ConfigError("alice quantum leg must use a quantum channel kind");
        }
        if (extended()) {
            queue_.schedule(b.arrival.t, [this, j] { arrive_extended(j); });
        } else {
            b.reveal = earliest_arrival(p(), branch(j).q, c.speed, c.latency);
            send_keys(j, p(), b.reveal);
            Event handover = later(b.arrival, b.reveal);
            queue_.schedule(handover.t, [this, j, handover] { arrive_direct(j, handover); });
        }
    }

    void send_keys(int j, const Event &from, const Event &to) {
        const ChannelSpec &c = cfg_.alice_classical;
        Message m = make_message(c.kind, Party::Alice, Party::Alice, j, "classical.keys", from, to, c.speed, tol_);
        for (const auto &k : branches_[j].keys) {
            if (k) {
                m.keys.push_back(*k);
            }
        }
        result_.transcript.add_message(std::move(m));
    }

    void reveal(int j, const Event &at) {
        Message m = make_message(ChannelKind::ClassicalSecure, Party::Alice, Party::Bob, j, kRevealLabel, at, at, 1.0,
                                 tol_);
        for (const auto &k : branches_[j].keys) {
            if (k) {
                m.keys.push_back(*k);
            }
        }
        result_.transcript.add_message(std::move(m));
    }

    void hand_to_bob(int j, const Event &at) {
        BranchState &b = branches_[j];
        if (!b.channel_keys.empty()) {
            derandomize(store_, b.held, b.channel_keys);
            b.channel_keys.clear();
        }
        Message m = make_message(ChannelKind::PhysicallySecure, Party::Alice, Party::Bob, j, "handover.q", at, at,
                                 1.0, tol_);
        m.qudits = b.held;
        result_.transcript.add_message(std::move(m));
    }

    void arrive_direct(int j, const Event &at) {
        hand_to_bob(j, at);
        reveal(j, at);
        verify(j, at);
    }

    void arrive_extended(int j) {
        BranchState &b = branches_[j];
        hand_to_bob(j, b.arrival);
        if (cfg_.bob_probe) {
            probe(j);
        }
        if (cfg_.mode == VerifyMode::B3) {
            guess(j);
        }
        const ChannelSpec &c = cfg_.alice_classical;
        b.reveal = earliest_arrival(b.arrival, branch(j).q, c.speed, c.latency);
        send_keys(j, b.arrival, b.reveal);
        queue_.schedule(b.reveal.t, [this, j] { arrive_keys(j); });

        if (cfg_.mode == VerifyMode::B1) {
            const ChannelSpec &t = cfg_.bob_transport;
            Event at_q = earliest_arrival(b.arrival, branch(j).q, t.speed, t.latency);
            if (at_q.t > branch(j).q.t + tol_) {
                throw SchedulingError("B1: Bob cannot carry the state from " + b.arrival.to_string() + " to Q_" +
                                      std::to_string(j + 1) + " at speed " + std::to_string(t.speed));
            }
            SecureRegion bob_region;
            bob_region.add({b.arrival, at_q});
            Message m = send_s1(store_, b.held, b.arrival, at_q, t, bob_region, tol_, channel_rng_, Party::Bob,
                                Party::Bob, j);
            b.held = m.qudits;
            result_.transcript.add_message(std::move(m));
            b.verified_at = at_q;
        }
    }

    void probe(int j) {
        BranchState &b = branches_[j];
        for (int k = 0; k < cfg_.n; k++) {
            bool outcome = false;
            std::optional<QuditId> q = b.held[k];
            if (q) {
                outcome = store_.test(*q, psi_[k], measure_rng_[j], "bob.probe");
                b.held[k] = std::nullopt;
            }
            result_.transcript.add_measurement(MeasurementKind::Probe, Party::Bob, j, k, q, b.arrival, -1, outcome);
        }
    }

    void guess(int j) {
        BranchState &b = branches_[j];
        b.guesses.resize(cfg_.n);
        b.guess_pass.assign(cfg_.n, 0);
        int d = cfg_.d;
        for (int k = 0; k < cfg_.n; k++) {
            WeylIndex g = WeylIndex::random(d, guess_rng_);
            b.guesses[k] = g.flat(d);
            bool outcome = false;
            std::optional<QuditId> q = b.held[k];
            if (q) {
                PureState target(weyl_matrix(d, g) * psi_[k].amps());
                outcome = store_.test(*q, target, measure_rng_[j], "bob.guess_test");
                b.held[k] = std::nullopt;
            }
            b.guess_pass[k] = outcome;
            result_.transcript.add_measurement(MeasurementKind::Guess, Party::Bob, j, k, q, b.arrival, b.guesses[k],
                                               outcome);
        }
    }

    void arrive_keys(int j) {
        BranchState &b = branches_[j];
        reveal(j, b.reveal);
        switch (cfg_.mode) {
            case VerifyMode::B1: {
                Event at = later(b.verified_at, b.reveal);
                queue_.schedule(at.t, [this, j, at] { verify(j, at); });
                break;
            }
            case VerifyMode::B2: {
                const ChannelSpec &t = cfg_.bob_transport;
                Event back = earliest_arrival(b.reveal, b.arrival, t.speed, t.latency);
                Message m = make_message(ChannelKind::ClassicalSecure, Party::Bob, Party::Bob, j, "classical.keys_back",
                                         b.reveal, back, t.speed, tol_);
                for (const auto &k : b.keys) {
                    if (k) {
                        m.keys.push_back(*k);
                    }
                }
                result_.transcript.add_message(std::move(m));
                queue_.schedule(back.t, [this, j, back] { verify_stored(j, back); });
                break;
            }
            case VerifyMode::B3:
                match(j);
                break;
            case VerifyMode::Direct:
                break;
        }
    }

    void verify_stored(int j, const Event &at) {
        BranchState &b = branches_[j];
        if (at.t - b.arrival.t > cfg_.storage_lifetime) {
            for (auto &q : b.held) {
                if (q) {
                    store_.discard(*q, "bob.storage_decay");
                    q = std::nullopt;
                }
            }
        }
        verify(j, at);
    }

    void verify(int j, const Event &at) {
        BranchState &b = branches_[j];
        SiteTally &site = result_.tally.sites[j];
        int d = cfg_.d;
        for (int k = 0; k < cfg_.n; k++) {
            std::optional<QuditId> q = b.held[k];
            const auto &key = b.keys[k];
            bool outcome = false;
            if (q) {
                site.delivered++;
                if (key) {
                    PureState target(weyl_matrix(d, *key) * psi_[k].amps());
                    outcome = store_.test(*q, target, measure_rng_[j], "bob.verify");
                } else {
                    store_.discard(*q, "bob.unverifiable");
                }
                b.held[k] = std::nullopt;
            }
            site.d[k] = outcome;
            site.passes += outcome;
            result_.transcript.add_measurement(MeasurementKind::Verify, Party::Bob, j, k, q, at, -1, outcome);
        }
        site.considered = cfg_.n;
        b.verified_at = at;
        b.verified = true;
    }

    void match(int j) {
        BranchState &b = branches_[j];
        SiteTally &site = result_.tally.sites[j];
        int d = cfg_.d;
        for (int k = 0; k < cfg_.n; k++) {
            const auto &key = b.keys[k];
            bool matched = key && key->flat(d) == b.guesses[k];
            site.matched += matched;
            bool pass = matched && b.guess_pass[k];
            site.d[k] = pass;
            site.passes += pass;
        }
        site.considered = site.matched;
        b.verified_at = b.reveal;
        b.verified = true;
    }

    void finish() {
        auto &tally = result_.tally;
        const int nb = cfg_.branches();
        if (result_.aborted) {
            for (int j = 0; j < nb; j++) {
                auto &s = tally.sites[j];
                s = SiteTally{};
                s.d.assign(cfg_.n, 0);
                s.considered = cfg_.n;
                s.threshold = acceptance_threshold(cfg_, s.considered);
                s.verdict = Verdict::Reject;
                result_.transcript.add_verdict(j, Verdict::Reject, 0, s.considered, s.threshold, branch(j).q);
            }
            return;
        }
        auto verdicts = redundant_verdict(tally, cfg_);
        for (int j = 0; j < nb; j++) {
            auto &s = tally.sites[j];
            s.threshold = acceptance_threshold(cfg_, s.considered);
            s.verdict = verdicts[j];
            const BranchState &b = branches_[j];
            result_.transcript.add_verdict(j, s.verdict, s.passes, s.considered, s.threshold,
                                           b.verified ? b.verified_at : branch(j).q);
        }
        auto &m = result_.metrics;
        for (int j = 0; j < nb; j++) {
            m.max_delay = std::max(m.max_delay, branches_[j].reveal.t - branch(j).q.t);
            for (int k = j + 1; k < nb; k++) {
                const Event &a = branches_[j].reveal;
                const Event &c = branches_[k].reveal;
                m.min_reveal_separation = std::min(m.min_reveal_separation, a.spatial_distance(c) - std::abs(a.t - c.t));
            }
        }
        bool lossless = cfg_.alice_quantum.loss.lossless() && cfg_.bob_transport.loss.lossless();
        bool storage_ok = cfg_.mode != VerifyMode::B2 || std::isinf(cfg_.storage_lifetime);
        bool intact = std::any_of(tally.sites.begin(), tally.sites.end(),
                                  [&](const SiteTally &s) { return s.passes == static_cast<std::uint32_t>(cfg_.n); });
        m.token_returnable = (cfg_.mode == VerifyMode::B1 || cfg_.mode == VerifyMode::B2) && lossless && storage_ok &&
                             !cfg_.bob_probe && intact;
    }

    const ProtocolConfig &cfg_;
    Strategy &strategy_;
    double tol_;
    Rng bob_rng_;
    Rng alice_rng_;
    Rng channel_rng_;
    Rng guess_rng_;
    std::vector<Rng> measure_rng_;
    RunResult result_;
    QuditStore store_;
    EventQueue queue_;
    std::vector<PureState> psi_;
    std::vector<BranchState> branches_;
};

}  // namespace

RunResult run_protocol(const ProtocolConfig &config, Strategy &strategy, Rng &rng) {
    config.validate();
    return Engine(config, strategy, rng).run();
}

RunResult run_direct(const ProtocolConfig &config, Strategy &strategy, Rng &rng) {
    if (config.mode != VerifyMode::Direct) {
        throw ConfigError("run_direct needs verification mode direct");
    }
    return run_protocol(config, strategy, rng);
}

RunResult run_extended(const ProtocolConfig &config, Strategy &strategy, Rng &rng) {
    if (config.mode != VerifyMode::B1 && config.mode != VerifyMode::B2) {
        throw ConfigError("run_extended needs verification mode b1 or b2");
    }
    return run_protocol(config, strategy, rng);
}

RunResult run_b3(const ProtocolConfig &config, Strategy &strategy, Rng &rng) {
    if (config.mode != VerifyMode::B3) {
        throw ConfigError("run_b3 needs verification mode b3");
    }
    return run_protocol(config, strategy, rng);
}

}  // namespace relq
