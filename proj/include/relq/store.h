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

#ifndef RELQ_STORE_H
#define RELQ_STORE_H

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "relq/register.h"

namespace relq {

using QuditId = std::uint32_t;

enum class LifecycleOp : std::uint8_t { Create, Consume };

struct LifecycleEntry {
    QuditId id;
    LifecycleOp op;
    std::string_view reason;  // always a string literal
};

class LifecycleSink {
   public:
    virtual ~LifecycleSink() = default;
    virtual void on_lifecycle(const LifecycleEntry &entry) = 0;
};

/// Owns every quantum system in one simulation run. Callers hold QuditId handles; each
/// handle is created once and consumed at most once, and a second consumption or any use
/// after consumption throws LinearityError.
///
/// Systems that were never jointly operated on live in separate registers; registers are
/// merged lazily when a joint operation spans them.
class QuditStore {
   public:
    explicit QuditStore(int dim, LifecycleSink *sink = nullptr);

    int dim() const {
        return dim_;
    }

    QuditId create(const PureState &psi, std::string_view reason);
    /// I/d, purified with an environment wire that no handle refers to.
    QuditId create_maximally_mixed(std::string_view reason);
    std::pair<QuditId, QuditId> create_bell_pair(std::string_view reason);

    void apply(QuditId id, const Matrix &u);
    void apply(std::span<const QuditId> ids, const Matrix &u);

    /// Consumes `id` and returns `outputs` fresh handles produced by the isometry
    /// C^d -> (C^d)^(outputs + environment). Environment outputs get no handle.
    std::vector<QuditId> expand(QuditId id, const Matrix &isometry, int outputs, int environment,
                                std::string_view reason);

    /// Projective test against |psi>; consumes the handle.
    bool test(QuditId id, const PureState &psi, Rng &rng, std::string_view reason = "test");
    /// Teleportation-basis measurement; consumes both handles.
    WeylIndex bell_measure(QuditId first, QuditId second, Rng &rng);
    /// Traces the system out; consumes the handle.
    void discard(QuditId id, std::string_view reason);

    DensityMatrix reduced(QuditId id) const;
    Matrix reduced(std::span<const QuditId> ids) const;

    bool live(QuditId id) const;
    std::size_t created() const {
        return created_;
    }
    std::size_t consumed() const {
        return consumed_;
    }
    std::size_t live_registers() const;

   private:
    enum class Status : std::uint8_t { Live, Consumed, Environment };
    struct Slot {
        std::uint32_t reg;
        Status status;
    };

    QuditId new_label(std::uint32_t reg, Status status);
    std::uint32_t new_register(Register r);
    void require_live(QuditId id) const;
    void consume(QuditId id, std::string_view reason);
    std::uint32_t merge(std::span<const QuditId> ids);
    void release_if_dead(std::uint32_t reg);

    int dim_;
    LifecycleSink *sink_;
    std::vector<Slot> slots_;
    std::vector<std::optional<Register>> registers_;
    std::vector<std::uint32_t> live_count_;
    std::vector<std::uint32_t> free_registers_;
    std::size_t created_ = 0;
    std::size_t consumed_ = 0;
};

}  // namespace relq

#endif
