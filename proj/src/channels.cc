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

#include "relq/channels.h"

#include <cmath>
#include <stdexcept>

#include "relq/errors.h"

namespace relq {

std::string to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::PhysicallySecure:
            return "physically_secure";
        case ChannelKind::TeleportPredistributed:
            return "teleport";
        case ChannelKind::RandomizedTransmission:
            return "randomized";
        case ChannelKind::ClassicalSecure:
            return "classical_secure";
        case ChannelKind::ClassicalPublic:
            return "classical_public";
    }
    return "unknown";
}

ChannelKind parse_channel_kind(std::string_view name) {
    if (name == "physically_secure" || name == "s1") {
        return ChannelKind::PhysicallySecure;
    }
    if (name == "teleport" || name == "s2") {
        return ChannelKind::TeleportPredistributed;
    }
    if (name == "randomized" || name == "s3") {
        return ChannelKind::RandomizedTransmission;
    }
    if (name == "classical_secure" || name == "secure") {
        return ChannelKind::ClassicalSecure;
    }
    if (name == "classical_public" || name == "public") {
        return ChannelKind::ClassicalPublic;
    }
    throw ArgumentError("unknown channel kind '" + std::string(name) + "'");
}

bool is_quantum(ChannelKind kind) {
    return kind == ChannelKind::PhysicallySecure || kind == ChannelKind::TeleportPredistributed ||
           kind == ChannelKind::RandomizedTransmission;
}

bool content_visible(ChannelKind kind) {
    return kind == ChannelKind::RandomizedTransmission || kind == ChannelKind::ClassicalPublic;
}

std::string to_string(Party p) {
    return p == Party::Alice ? "alice" : "bob";
}

void LossModel::validate() const {
    if (!(loss_prob >= 0.0 && loss_prob < 1.0)) {
        throw ArgumentError("loss_prob must lie in [0, 1)");
    }
    if (!(depolarize_prob >= 0.0 && depolarize_prob <= 1.0)) {
        throw ArgumentError("depolarize_prob must lie in [0, 1]");
    }
}

void ChannelSpec::validate() const {
    if (!(speed > 0.0 && speed <= 1.0)) {
        throw ArgumentError("channel speed must lie in (0, 1]");
    }
    if (!(latency >= 0.0) || !std::isfinite(latency)) {
        throw ArgumentError("channel latency must be finite and non-negative");
    }
    loss.validate();
}

Message make_message(ChannelKind kind, Party sender, Party receiver, int branch, std::string_view label,
                     const Event &emit, const Event &deliver, double speed, double tolerance) {
    if (!causal_reachable(emit, deliver, speed, tolerance)) {
        throw CausalityError(std::string(label) + ": delivery at " + deliver.to_string() +
                             " is outside the causal future of " + emit.to_string());
    }
    Message m;
    m.channel = kind;
    m.sender = sender;
    m.receiver = receiver;
    m.branch = branch;
    m.label = label;
    m.emit = emit;
    m.deliver = deliver;
    m.speed = speed;
    m.visible_to_adversary = content_visible(kind);
    return m;
}

std::optional<QuditId> apply_loss(QuditStore &store, QuditId id, const LossModel &model, Rng &rng) {
    if (model.loss_prob > 0.0 && rng.bernoulli(model.loss_prob)) {
        store.discard(id, "channel.loss");
        return std::nullopt;
    }
    if (model.depolarize_prob > 0.0 && rng.bernoulli(model.depolarize_prob)) {
        store.discard(id, "channel.depolarize");
        return store.create_maximally_mixed("channel.depolarize");
    }
    return id;
}

Message send_s1(QuditStore &store, std::span<const std::optional<QuditId>> states, const Event &from,
                const Event &to, const ChannelSpec &spec, const SecureRegion &region, double tolerance, Rng &rng,
                Party sender, Party receiver, int branch) {
    if (!region.contains_path(from, to, tolerance)) {
        throw GeometryError("secure transmission from " + from.to_string() + " to " + to.to_string() +
                            " leaves the sender's secure region");
    }
    Message m = make_message(ChannelKind::PhysicallySecure, sender, receiver, branch, "quantum.s1", from, to,
                             spec.speed, tolerance);
    m.qudits.reserve(states.size());
    for (const auto &s : states) {
        m.qudits.push_back(s ? apply_loss(store, *s, spec.loss, rng) : std::nullopt);
    }
    return m;
}

EntangledResource EntangledResource::distribute(QuditStore &store) {
    EntangledResource r;
    auto [a, b] = store.create_bell_pair("resource.bell_pair");
    r.near_ = a;
    r.far_ = b;
    r.available_ = true;
    return r;
}

std::pair<QuditId, QuditId> EntangledResource::take() {
    if (!available_) {
        throw StateError("teleportation resource missing or already consumed");
    }
    available_ = false;
    return {near_, far_};
}

TeleportResult send_s2_teleport(QuditStore &store, std::span<const std::optional<QuditId>> states,
                                std::span<EntangledResource> resources, const Event &from, const Event &to,
                                const ChannelSpec &quantum, const ChannelSpec &classical, double tolerance, Rng &rng,
                                Party sender, Party receiver, int branch) {
    if (resources.size() < states.size()) {
        throw StateError("teleportation needs one resource per qudit");
    }
    if (is_quantum(classical.kind)) {
        throw ArgumentError("teleportation outcomes need a classical channel");
    }
    TeleportResult out{make_message(classical.kind, sender, receiver, branch, "classical.s2_outcomes", from, to,
                                    classical.speed, tolerance),
                       {}};
    out.received.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); k++) {
        if (!states[k]) {
            out.classical.keys.push_back({});
            out.received.push_back(std::nullopt);
            continue;
        }
        auto [near, far] = resources[k].take();
        WeylIndex outcome = store.bell_measure(*states[k], near, rng);
        out.classical.keys.push_back(outcome);
        store.apply(far, weyl_matrix(store.dim(), outcome).adjoint());
        out.received.push_back(apply_loss(store, far, quantum.loss, rng));
    }
    return out;
}

RandomizedResult send_s3_randomized(QuditStore &store, std::span<const std::optional<QuditId>> states,
                                    const Event &from, const Event &to, const ChannelSpec &quantum,
                                    const ChannelSpec &classical, double tolerance, Rng &rng, Party sender,
                                    Party receiver, int branch) {
    RandomizedResult out{
        make_message(ChannelKind::RandomizedTransmission, sender, receiver, branch, "quantum.s3", from, to,
                     quantum.speed, tolerance),
        make_message(ChannelKind::ClassicalSecure, sender, receiver, branch, "classical.s3_keys", from, to,
                     classical.speed, tolerance),
    };
    int d = store.dim();
    out.quantum.qudits.reserve(states.size());
    out.classical.keys.reserve(states.size());
    for (const auto &s : states) {
        WeylIndex i = WeylIndex::random(d, rng);
        out.classical.keys.push_back(i);
        if (!s) {
            out.quantum.qudits.push_back(std::nullopt);
            continue;
        }
        store.apply(*s, weyl_matrix(d, i));
        out.quantum.qudits.push_back(apply_loss(store, *s, quantum.loss, rng));
    }
    return out;
}

void derandomize(QuditStore &store, std::span<const std::optional<QuditId>> qudits, std::span<const WeylIndex> keys) {
    if (keys.size() < qudits.size()) {
        throw ArgumentError("missing derandomization keys");
    }
    for (std::size_t k = 0; k < qudits.size(); k++) {
        if (qudits[k]) {
            store.apply(*qudits[k], weyl_matrix(store.dim(), keys[k]).adjoint());
        }
    }
}

}  // namespace relq
