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

#include "relq/transcript.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <tuple>

#include "relq/errors.h"

namespace relq {

using nlohmann::json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Accept:
            return "accept";
        case Verdict::Reject:
            return "reject";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

std::string to_string(MeasurementKind k) {
    switch (k) {
        case MeasurementKind::Verify:
            return "verify";
        case MeasurementKind::Probe:
            return "probe";
        case MeasurementKind::Guess:
            return "guess";
    }
    return "unknown";
}

Transcript::Transcript(int dim, double tolerance, std::string strategy)
    : dim_(dim), tolerance_(tolerance), strategy_(std::move(strategy)) {
}

void Transcript::on_lifecycle(const LifecycleEntry &entry) {
    lifecycle_.push_back({next_seq_++, entry.id, entry.op, entry.reason});
}

std::uint64_t Transcript::add_message(Message m, bool accepted) {
    std::uint64_t seq = next_seq_++;
    messages_.push_back({seq, std::move(m), accepted});
    return seq;
}

void Transcript::add_measurement(MeasurementKind kind, Party who, int site, std::uint32_t round,
                                 std::optional<QuditId> qudit, const Event &at, int guess, bool outcome) {
    measurements_.push_back({next_seq_++, kind, who, site, round, qudit, at, guess, outcome});
}

void Transcript::add_input(QuditId id, std::uint64_t message_seq) {
    inputs_.push_back({next_seq_++, id, message_seq});
}

void Transcript::add_abort(std::string reason) {
    aborts_.push_back({next_seq_++, std::move(reason)});
}

void Transcript::add_verdict(int site, Verdict v, std::uint32_t passes, std::uint32_t considered, double threshold,
                             const Event &at) {
    verdicts_.push_back({next_seq_++, site, v, passes, considered, threshold, at});
}

std::string_view Transcript::intern(std::string s) {
    strings_.push_back(std::move(s));
    return strings_.back();
}

void AuditReport::merge(const AuditReport &other) {
    causality_violations += other.causality_violations;
    linearity_violations += other.linearity_violations;
    taint_violations += other.taint_violations;
    for (const auto &d : other.details) {
        if (details.size() >= 20) {
            break;
        }
        details.push_back(d);
    }
}

namespace {

json event_json(const Event &e) {
    json x = json::array();
    for (int i = 0; i < e.spatial_dim; i++) {
        x.push_back(e.x[i]);
    }
    return {{"t", e.t}, {"x", x}};
}

Event event_from(const json &j) {
    const auto &x = j.at("x");
    if (x.size() == 1) {
        return Event::at(j.at("t").get<double>(), x[0].get<double>());
    }
    if (x.size() == 3) {
        return Event::at(j.at("t").get<double>(), x[0].get<double>(), x[1].get<double>(), x[2].get<double>());
    }
    throw ArgumentError("event must have 1 or 3 spatial coordinates");
}

std::string digest(const Message &m, int dim) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; i++) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (const auto &q : m.qudits) {
        mix(q ? *q : 0xffffffffull);
    }
    for (const auto &k : m.keys) {
        mix(static_cast<std::uint64_t>(k.flat(dim)));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Party party_from(const std::string &s) {
    if (s == "alice") {
        return Party::Alice;
    }
    if (s == "bob") {
        return Party::Bob;
    }
    throw ArgumentError("unknown party '" + s + "'");
}

Verdict verdict_from(const std::string &s) {
    for (auto v : {Verdict::Accept, Verdict::Reject, Verdict::Inconclusive}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw ArgumentError("unknown verdict '" + s + "'");
}

MeasurementKind measurement_from(const std::string &s) {
    for (auto k : {MeasurementKind::Verify, MeasurementKind::Probe, MeasurementKind::Guess}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ArgumentError("unknown measurement kind '" + s + "'");
}

}  // namespace

void Transcript::write_jsonl(std::ostream &out) const {
    out << json{{"kind", "header"}, {"schema", 1}, {"dim", dim_}, {"tolerance", tolerance_}, {"strategy", strategy_}}
               .dump()
        << "\n";
    // (seq, table, index)
    std::vector<std::tuple<std::uint64_t, int, std::size_t>> order;
    order.reserve(next_seq_);
    for (std::size_t i = 0; i < lifecycle_.size(); i++) order.emplace_back(lifecycle_[i].seq, 0, i);
    for (std::size_t i = 0; i < messages_.size(); i++) order.emplace_back(messages_[i].seq, 1, i);
    for (std::size_t i = 0; i < measurements_.size(); i++) order.emplace_back(measurements_[i].seq, 2, i);
    for (std::size_t i = 0; i < inputs_.size(); i++) order.emplace_back(inputs_[i].seq, 3, i);
    for (std::size_t i = 0; i < aborts_.size(); i++) order.emplace_back(aborts_[i].seq, 4, i);
    for (std::size_t i = 0; i < verdicts_.size(); i++) order.emplace_back(verdicts_[i].seq, 5, i);
    std::sort(order.begin(), order.end());

    for (const auto &[seq, table, i] : order) {
        json j;
        j["seq"] = seq;
        switch (table) {
            case 0: {
                const auto &r = lifecycle_[i];
                j["kind"] = "lifecycle";
                j["id"] = r.id;
                j["op"] = r.op == LifecycleOp::Create ? "create" : "consume";
                j["reason"] = r.reason;
                break;
            }
            case 1: {
                const auto &r = messages_[i];
                const Message &m = r.message;
                j["kind"] = "message";
                j["label"] = m.label;
                j["channel"] = to_string(m.channel);
                j["sender"] = to_string(m.sender);
                j["receiver"] = to_string(m.receiver);
                j["branch"] = m.branch;
                j["emit"] = event_json(m.emit);
                j["deliver"] = event_json(m.deliver);
                j["speed"] = m.speed;
                j["visible"] = m.visible_to_adversary;
                j["accepted"] = r.accepted;
                json q = json::array();
                for (const auto &s : m.qudits) {
                    q.push_back(s ? json(*s) : json(nullptr));
                }
                j["qudits"] = q;
                json k = json::array();
                for (const auto &key : m.keys) {
                    k.push_back(key.flat(dim_));
                }
                j["keys"] = k;
                j["digest"] = digest(m, dim_);
                break;
            }
            case 2: {
                const auto &r = measurements_[i];
                j["kind"] = "measurement";
                j["type"] = to_string(r.kind);
                j["who"] = to_string(r.who);
                j["site"] = r.site;
                j["round"] = r.round;
                j["qudit"] = r.qudit ? json(*r.qudit) : json(nullptr);
                j["at"] = event_json(r.at);
                j["guess"] = r.guess;
                j["outcome"] = r.outcome;
                break;
            }
            case 3: {
                const auto &r = inputs_[i];
                j["kind"] = "input";
                j["id"] = r.id;
                j["message"] = r.message_seq;
                break;
            }
            case 4:
                j["kind"] = "abort";
                j["reason"] = aborts_[i].reason;
                break;
            case 5: {
                const auto &r = verdicts_[i];
                j["kind"] = "verdict";
                j["site"] = r.site;
                j["verdict"] = to_string(r.verdict);
                j["passes"] = r.passes;
                j["considered"] = r.considered;
                j["threshold"] = r.threshold;
                j["at"] = event_json(r.at);
                break;
            }
        }
        out << j.dump() << "\n";
    }
}

Transcript Transcript::read_jsonl(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Transcript> t;
    try {
        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) {
                continue;
            }
            json j = json::parse(line);
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "header") {
                if (t) {
                    throw ArgumentError("duplicate header");
                }
                t.emplace(j.at("dim").get<int>(), j.at("tolerance").get<double>(), j.at("strategy").get<std::string>());
                continue;
            }
            if (!t) {
                throw ArgumentError("missing header line");
            }
            std::uint64_t seq = j.at("seq").get<std::uint64_t>();
            if (seq < t->next_seq_) {
                throw ArgumentError("sequence numbers must increase");
            }
            t->next_seq_ = seq;
            if (kind == "lifecycle") {
                std::string op = j.at("op").get<std::string>();
                if (op != "create" && op != "consume") {
                    throw ArgumentError("unknown lifecycle op '" + op + "'");
                }
                t->lifecycle_.push_back({seq, j.at("id").get<QuditId>(),
                                         op == "create" ? LifecycleOp::Create : LifecycleOp::Consume,
                                         t->intern(j.at("reason").get<std::string>())});
            } else if (kind == "message") {
                Message m;
                m.label = t->intern(j.at("label").get<std::string>());
                m.channel = parse_channel_kind(j.at("channel").get<std::string>());
                m.sender = party_from(j.at("sender").get<std::string>());
                m.receiver = party_from(j.at("receiver").get<std::string>());
                m.branch = j.at("branch").get<int>();
                m.emit = event_from(j.at("emit"));
                m.deliver = event_from(j.at("deliver"));
                m.speed = j.at("speed").get<double>();
                m.visible_to_adversary = j.at("visible").get<bool>();
                for (const auto &q : j.at("qudits")) {
                    m.qudits.push_back(q.is_null() ? std::nullopt : std::optional<QuditId>(q.get<QuditId>()));
                }
                for (const auto &k : j.at("keys")) {
                    m.keys.push_back(WeylIndex::from_flat(t->dim_, k.get<int>()));
                }
                t->messages_.push_back({seq, std::move(m), j.at("accepted").get<bool>()});
            } else if (kind == "measurement") {
                const auto &q = j.at("qudit");
                t->measurements_.push_back(
                    {seq, measurement_from(j.at("type").get<std::string>()), party_from(j.at("who").get<std::string>()),
                     j.at("site").get<int>(), j.at("round").get<std::uint32_t>(),
                     q.is_null() ? std::nullopt : std::optional<QuditId>(q.get<QuditId>()), event_from(j.at("at")),
                     j.at("guess").get<int>(), j.at("outcome").get<bool>()});
            } else if (kind == "input") {
                t->inputs_.push_back({seq, j.at("id").get<QuditId>(), j.at("message").get<std::uint64_t>()});
            } else if (kind == "abort") {
                t->aborts_.push_back({seq, j.at("reason").get<std::string>()});
            } else if (kind == "verdict") {
                t->verdicts_.push_back({seq, j.at("site").get<int>(), verdict_from(j.at("verdict").get<std::string>()),
                                        j.at("passes").get<std::uint32_t>(), j.at("considered").get<std::uint32_t>(),
                                        j.at("threshold").get<double>(), event_from(j.at("at"))});
            } else {
                throw ArgumentError("unknown record kind '" + kind + "'");
            }
            t->next_seq_ = seq + 1;
        }
    } catch (const json::exception &e) {
        throw ArgumentError("transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ArgumentError &e) {
        throw ArgumentError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!t) {
        throw ArgumentError("empty transcript");
    }
    return std::move(*t);
}

AuditReport audit(const Transcript &t) {
    AuditReport report;
    auto note = [&](std::string s) {
        if (report.details.size() < 20) {
            report.details.push_back(std::move(s));
        }
    };

    for (const auto &r : t.messages()) {
        const Message &m = r.message;
        bool ok = r.accepted;
        if (ok) {
            try {
                ok = causal_reachable(m.emit, m.deliver, m.speed, t.tolerance());
            } catch (const ArgumentError &) {
                ok = false;
            }
        }
        if (!ok) {
            report.causality_violations++;
            note("causality: message " + std::to_string(r.seq) + " (" + std::string(m.label) + ") from " +
                 m.emit.to_string() + " to " + m.deliver.to_string() + (r.accepted ? "" : " was refused"));
        }
    }
    for (const auto &a : t.aborts()) {
        note("abort at " + std::to_string(a.seq) + ": " + a.reason);
    }

    struct Life {
        std::uint32_t creates = 0;
        std::uint32_t consumes = 0;
        std::uint64_t create_seq = 0;
        std::uint64_t consume_seq = UINT64_MAX;
    };
    std::vector<Life> life;
    auto at = [&](QuditId id) -> Life & {
        if (id >= life.size()) {
            life.resize(static_cast<std::size_t>(id) + 1);
        }
        return life[id];
    };
    for (const auto &r : t.lifecycle()) {
        Life &l = at(r.id);
        if (r.op == LifecycleOp::Create) {
            if (l.creates++ == 0) {
                l.create_seq = r.seq;
            }
        } else {
            if (l.consumes++ == 0) {
                l.consume_seq = r.seq;
            }
        }
    }
    for (std::size_t id = 0; id < life.size(); id++) {
        const Life &l = life[id];
        if (l.creates == 0 && l.consumes == 0) {
            continue;
        }
        if (l.creates != 1 || l.consumes > 1 || (l.consumes == 1 && l.consume_seq < l.create_seq)) {
            report.linearity_violations++;
            note("linearity: qudit " + std::to_string(id) + " created " + std::to_string(l.creates) +
                 " times, consumed " + std::to_string(l.consumes) + " times");
        }
    }
    auto carried_ok = [&](QuditId id, std::uint64_t seq) {
        if (id >= life.size() || life[id].creates != 1) {
            return false;
        }
        return life[id].create_seq < seq && life[id].consume_seq > seq;
    };
    for (const auto &r : t.messages()) {
        if (!r.accepted) {
            continue;
        }
        for (const auto &q : r.message.qudits) {
            if (q && !carried_ok(*q, r.seq)) {
                report.linearity_violations++;
                note("linearity: message " + std::to_string(r.seq) + " carries qudit " + std::to_string(*q) +
                     " outside its lifetime");
            }
        }
    }
    for (const auto &m : t.measurements()) {
        if (m.qudit && (*m.qudit >= life.size() || life[*m.qudit].creates != 1 ||
                        life[*m.qudit].create_seq > m.seq)) {
            report.linearity_violations++;
            note("linearity: measurement " + std::to_string(m.seq) + " on qudit that was never created");
        }
    }

    const auto &msgs = t.messages();
    for (const auto &in : t.inputs()) {
        auto it = std::lower_bound(msgs.begin(), msgs.end(), in.message_seq,
                                   [](const MessageRecord &r, std::uint64_t s) { return r.seq < s; });
        bool ok = it != msgs.end() && it->seq == in.message_seq && it->accepted &&
                  (it->message.receiver == Party::Alice || it->message.visible_to_adversary) &&
                  std::find(it->message.qudits.begin(), it->message.qudits.end(), std::optional<QuditId>(in.id)) !=
                      it->message.qudits.end();
        if (!ok) {
            report.taint_violations++;
            note("taint: strategy input " + std::to_string(in.id) + " has no admissible source");
        }
    }
    return report;
}

namespace {

std::string fmt_event(const Event &e) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(%.9g,%.9g,%.9g,%.9g)", e.t, e.x[0], e.x[1], e.x[2]);
    return buf;
}

}  // namespace

std::string adversary_view(const Transcript &t) {
    std::vector<Event> reveals;
    for (const auto &r : t.messages()) {
        if (r.accepted && r.message.label == kRevealLabel) {
            reveals.push_back(r.message.deliver);
        }
    }
    auto after_reveal = [&](const Event &e) {
        return std::any_of(reveals.begin(), reveals.end(),
                           [&](const Event &r) { return causal_reachable(r, e, 1.0, t.tolerance()); });
    };
    std::string view;
    for (const auto &r : t.messages()) {
        const Message &m = r.message;
        if (!r.accepted || after_reveal(m.emit)) {
            continue;
        }
        view += std::string(m.label) + "|" + std::to_string(m.branch) + "|" + fmt_event(m.emit) + "|" +
                fmt_event(m.deliver) + "|" + std::to_string(m.qudits.size()) + "|" + std::to_string(m.keys.size());
        if (m.receiver == Party::Bob || m.visible_to_adversary) {
            view += "|";
            for (const auto &q : m.qudits) {
                view += q ? '1' : '0';
            }
        }
        if (m.visible_to_adversary) {
            for (const auto &k : m.keys) {
                view += "," + std::to_string(k.flat(t.dim()));
            }
        }
        view += "\n";
    }
    for (const auto &m : t.measurements()) {
        if (m.who != Party::Bob || m.kind == MeasurementKind::Verify || after_reveal(m.at)) {
            continue;
        }
        view += to_string(m.kind) + "|" + std::to_string(m.site) + "|" + std::to_string(m.round) + "|" +
                std::to_string(m.guess) + "|" + (m.outcome ? "1" : "0") + "\n";
    }
    return view;
}

}  // namespace relq
