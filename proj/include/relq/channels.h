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

#ifndef RELQ_CHANNELS_H
#define RELQ_CHANNELS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relq/spacetime.h"
#include "relq/store.h"

namespace relq {

enum class ChannelKind : std::uint8_t {
    PhysicallySecure,
    TeleportPredistributed,
    RandomizedTransmission,
    ClassicalSecure,
    ClassicalPublic,
};

std::string to_string(ChannelKind kind);
/// Accepts the names printed by to_string plus the short forms s1, s2, s3, secure, public.
ChannelKind parse_channel_kind(std::string_view name);
bool is_quantum(ChannelKind kind);
/// Whether the other party can observe what travels on the channel (timing is always visible).
bool content_visible(ChannelKind kind);

/// Independent per-qudit loss and depolarization.
struct LossModel {
    double loss_prob = 0.0;
    double depolarize_prob = 0.0;

    void validate() const;
    bool lossless() const {
        return loss_prob == 0.0 && depolarize_prob == 0.0;
    }
};

struct ChannelSpec {
    ChannelKind kind = ChannelKind::PhysicallySecure;
    double speed = 1.0;
    double latency = 0.0;
    LossModel loss;

    void validate() const;
};

enum class Party : std::uint8_t { Alice, Bob };

std::string to_string(Party p);

/// One transmission. Quantum and classical payloads are batched: slot k belongs to round k.
struct Message {
    ChannelKind channel = ChannelKind::PhysicallySecure;
    Party sender = Party::Alice;
    Party receiver = Party::Alice;
    int branch = -1;
    std::string_view label;  // always a string literal
    Event emit;
    Event deliver;
    double speed = 1.0;
    bool visible_to_adversary = false;
    std::vector<std::optional<QuditId>> qudits;
    std::vector<WeylIndex> keys;
};

/// Builds a message and checks that `deliver` is causally reachable from `emit` at the
/// channel speed. Throws CausalityError otherwise.
Message make_message(ChannelKind kind, Party sender, Party receiver, int branch, std::string_view label,
                     const Event &emit, const Event &deliver, double speed, double tolerance);

/// With probability loss_prob the qudit is discarded and nothing is returned; otherwise with
/// probability depolarize_prob it is replaced by a fresh maximally mixed qudit.
std::optional<QuditId> apply_loss(QuditStore &store, QuditId id, const LossModel &model, Rng &rng);

/// Physically secure transport inside the sender's secure region. Lost qudits become empty slots.
/// Throws GeometryError if the path leaves `region`.
Message send_s1(QuditStore &store, std::span<const std::optional<QuditId>> states, const Event &from,
                const Event &to, const ChannelSpec &spec, const SecureRegion &region, double tolerance,
                Rng &rng, Party sender = Party::Alice, Party receiver = Party::Alice, int branch = -1);

/// Half of a maximally entangled pair held at each end of a teleportation link. Single use.
class EntangledResource {
   public:
    EntangledResource() = default;
    static EntangledResource distribute(QuditStore &store);

    bool available() const {
        return available_;
    }
    QuditId near() const {
        return near_;
    }
    QuditId far() const {
        return far_;
    }
    /// Marks the resource used and returns (near, far). Throws StateError if already used.
    std::pair<QuditId, QuditId> take();

   private:
    QuditId near_ = 0;
    QuditId far_ = 0;
    bool available_ = false;
};

struct TeleportResult {
    /// Classical message carrying one Weyl outcome per slot.
    Message classical;
    /// The received qudits after correction, one per slot.
    std::vector<std::optional<QuditId>> received;
};

/// Teleports every present slot through its own resource. The classical leg uses `classical`,
/// which may be public. Loss of `quantum.loss` applies to the materialized state.
TeleportResult send_s2_teleport(QuditStore &store, std::span<const std::optional<QuditId>> states,
                                std::span<EntangledResource> resources, const Event &from, const Event &to,
                                const ChannelSpec &quantum, const ChannelSpec &classical, double tolerance,
                                Rng &rng, Party sender = Party::Alice, Party receiver = Party::Alice,
                                int branch = -1);

struct RandomizedResult {
    /// Carries U_i|psi> for a fresh uniform i per slot; visible to the adversary.
    Message quantum;
    /// Carries the i's on a secure classical channel.
    Message classical;
};

RandomizedResult send_s3_randomized(QuditStore &store, std::span<const std::optional<QuditId>> states,
                                    const Event &from, const Event &to, const ChannelSpec &quantum,
                                    const ChannelSpec &classical, double tolerance, Rng &rng,
                                    Party sender = Party::Alice, Party receiver = Party::Alice, int branch = -1);

/// Applies U_i^dagger slot by slot. Slots with no qudit are skipped.
void derandomize(QuditStore &store, std::span<const std::optional<QuditId>> qudits, std::span<const WeylIndex> keys);

}  // namespace relq

#endif
