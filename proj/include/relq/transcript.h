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

#ifndef RELQ_TRANSCRIPT_H
#define RELQ_TRANSCRIPT_H

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relq/channels.h"
#include "relq/store.h"

namespace relq {

/// Label of the message by which Alice hands her classical keys to Bob at Q_j (the unveil).
inline constexpr std::string_view kRevealLabel = "reveal.keys";

enum class Verdict : std::uint8_t { Accept, Reject, Inconclusive };

std::string to_string(Verdict v);

enum class MeasurementKind : std::uint8_t {
    /// Bob's final test at a site.
    Verify,
    /// Bob measuring something he holds before the reveal (hiding experiments).
    Probe,
    /// Bob's guessed-key test at P'_j (B3).
    Guess,
};

std::string to_string(MeasurementKind k);

struct LifecycleRecord {
    std::uint64_t seq;
    QuditId id;
    LifecycleOp op;
    std::string_view reason;
};

struct MessageRecord {
    std::uint64_t seq;
    Message message;
    /// False when the channel layer refused to schedule the message.
    bool accepted;
};

struct MeasurementRecord {
    std::uint64_t seq;
    MeasurementKind kind;
    Party who;
    int site;
    std::uint32_t round;
    std::optional<QuditId> qudit;
    Event at;
    int guess;  // flat Weyl index, or -1
    bool outcome;
};

/// A qudit handed to the strategy, and the message it arrived on.
struct StrategyInputRecord {
    std::uint64_t seq;
    QuditId id;
    std::uint64_t message_seq;
};

struct AbortRecord {
    std::uint64_t seq;
    std::string reason;
};

struct VerdictRecord {
    std::uint64_t seq;
    int site;
    Verdict verdict;
    std::uint32_t passes;
    std::uint32_t considered;
    double threshold;
    Event at;
};

/// Causally ordered log of one run. Every record shares one sequence counter.
class Transcript : public LifecycleSink {
   public:
    Transcript(int dim, double tolerance, std::string strategy);

    void on_lifecycle(const LifecycleEntry &entry) override;
    std::uint64_t add_message(Message m, bool accepted = true);
    void add_measurement(MeasurementKind kind, Party who, int site, std::uint32_t round,
                         std::optional<QuditId> qudit, const Event &at, int guess, bool outcome);
    void add_input(QuditId id, std::uint64_t message_seq);
    void add_abort(std::string reason);
    void add_verdict(int site, Verdict v, std::uint32_t passes, std::uint32_t considered, double threshold,
                     const Event &at);

    int dim() const {
        return dim_;
    }
    double tolerance() const {
        return tolerance_;
    }
    const std::string &strategy() const {
        return strategy_;
    }
    const std::vector<LifecycleRecord> &lifecycle() const {
        return lifecycle_;
    }
    const std::vector<MessageRecord> &messages() const {
        return messages_;
    }
    const std::vector<MeasurementRecord> &measurements() const {
        return measurements_;
    }
    const std::vector<StrategyInputRecord> &inputs() const {
        return inputs_;
    }
    const std::vector<AbortRecord> &aborts() const {
        return aborts_;
    }
    const std::vector<VerdictRecord> &verdicts() const {
        return verdicts_;
    }
    std::uint64_t size() const {
        return next_seq_;
    }

    /// One JSON object per line, in sequence order, preceded by a header line.
    void write_jsonl(std::ostream &out) const;
    /// Throws ArgumentError on malformed input, citing the line number.
    static Transcript read_jsonl(std::istream &in);

   private:
    std::string_view intern(std::string s);

    int dim_;
    double tolerance_;
    std::string strategy_;
    std::uint64_t next_seq_ = 0;
    std::vector<LifecycleRecord> lifecycle_;
    std::vector<MessageRecord> messages_;
    std::vector<MeasurementRecord> measurements_;
    std::vector<StrategyInputRecord> inputs_;
    std::vector<AbortRecord> aborts_;
    std::vector<VerdictRecord> verdicts_;
    std::deque<std::string> strings_;
};

struct AuditReport {
    std::uint64_t causality_violations = 0;
    std::uint64_t linearity_violations = 0;
    std::uint64_t taint_violations = 0;
    /// First few violations, human readable.
    std::vector<std::string> details;

    bool ok() const {
        return causality_violations == 0 && linearity_violations == 0 && taint_violations == 0;
    }
    void merge(const AuditReport &other);
};

/// Re-checks every message against its causality predicate, every qudit handle for linear use
/// (created once, consumed at most once, never carried after consumption), and every strategy
/// input for provenance (delivered to Alice or visible to her).
AuditReport audit(const Transcript &t);

/// Canonical string of everything Bob can see outside the causal future of the reveal events
/// (deliveries of classical keys to Bob): metadata of every message, content of messages he
/// receives or that are visible, and his own probe and guess outcomes.
std::string adversary_view(const Transcript &t);

}  // namespace relq

#endif
