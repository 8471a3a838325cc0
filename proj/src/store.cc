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

#include "relq/store.h"

#include <algorithm>
#include <string>

#include "relq/errors.h"

namespace relq {

QuditStore::QuditStore(int dim, LifecycleSink *sink) : dim_(dim), sink_(sink) {
    if (dim < 2) {
        throw ArgumentError("store dimension must be >= 2");
    }
}

QuditId QuditStore::new_label(std::uint32_t reg, Status status) {
    QuditId id = static_cast<QuditId>(slots_.size());
    slots_.push_back({reg, status});
    if (status == Status::Live) {
        live_count_[reg]++;
    }
    return id;
}

std::uint32_t QuditStore::new_register(Register r) {
    if (!free_registers_.empty()) {
        std::uint32_t reg = free_registers_.back();
        free_registers_.pop_back();
        registers_[reg] = std::move(r);
        live_count_[reg] = 0;
        return reg;
    }
    registers_.push_back(std::move(r));
    live_count_.push_back(0);
    return static_cast<std::uint32_t>(registers_.size() - 1);
}

void QuditStore::require_live(QuditId id) const {
    if (id >= slots_.size() || slots_[id].status == Status::Environment) {
        throw ArgumentError("unknown qudit handle " + std::to_string(id));
    }
    if (slots_[id].status != Status::Live) {
        throw LinearityError("qudit " + std::to_string(id) + " used after consumption");
    }
}

void QuditStore::consume(QuditId id, std::string_view reason) {
    require_live(id);
    slots_[id].status = Status::Consumed;
    live_count_[slots_[id].reg]--;
    consumed_++;
    if (sink_ != nullptr) {
        sink_->on_lifecycle({id, LifecycleOp::Consume, reason});
    }
}

void QuditStore::release_if_dead(std::uint32_t reg) {
    if (live_count_[reg] == 0 && registers_[reg].has_value()) {
        for (auto label : registers_[reg]->labels()) {
            slots_[label].reg = UINT32_MAX;
        }
        registers_[reg].reset();
        free_registers_.push_back(reg);
    }
}

QuditId QuditStore::create(const PureState &psi, std::string_view reason) {
    if (psi.dim() != dim_) {
        throw ArgumentError("state dimension does not match store");
    }
    std::uint32_t reg = new_register(Register(dim_));
    QuditId id = new_label(reg, Status::Live);
    registers_[reg] = Register::from_state(id, psi);
    created_++;
    if (sink_ != nullptr) {
        sink_->on_lifecycle({id, LifecycleOp::Create, reason});
    }
    return id;
}

QuditId QuditStore::create_maximally_mixed(std::string_view reason) {
    std::uint32_t reg = new_register(Register(dim_));
    QuditId id = new_label(reg, Status::Live);
    QuditId env = new_label(reg, Status::Environment);
    registers_[reg] = Register::bell_pair(dim_, id, env);
    created_++;
    if (sink_ != nullptr) {
        sink_->on_lifecycle({id, LifecycleOp::Create, reason});
    }
    return id;
}

std::pair<QuditId, QuditId> QuditStore::create_bell_pair(std::string_view reason) {
    std::uint32_t reg = new_register(Register(dim_));
    QuditId a = new_label(reg, Status::Live);
    QuditId b = new_label(reg, Status::Live);
    registers_[reg] = Register::bell_pair(dim_, a, b);
    created_ += 2;
    if (sink_ != nullptr) {
        sink_->on_lifecycle({a, LifecycleOp::Create, reason});
        sink_->on_lifecycle({b, LifecycleOp::Create, reason});
    }
    return {a, b};
}

std::uint32_t QuditStore::merge(std::span<const QuditId> ids) {
    for (auto id : ids) {
        require_live(id);
    }
    std::uint32_t target = slots_[ids[0]].reg;
    for (auto id : ids.subspan(1)) {
        std::uint32_t reg = slots_[id].reg;
        if (reg == target) {
            continue;
        }
        registers_[target]->append(*registers_[reg]);
        for (auto label : registers_[reg]->labels()) {
            slots_[label].reg = target;
        }
        live_count_[target] += live_count_[reg];
        live_count_[reg] = 0;
        registers_[reg].reset();
        free_registers_.push_back(reg);
    }
    return target;
}

void QuditStore::apply(QuditId id, const Matrix &u) {
    require_live(id);
    registers_[slots_[id].reg]->apply(id, u);
}

void QuditStore::apply(std::span<const QuditId> ids, const Matrix &u) {
    if (ids.empty()) {
        throw ArgumentError("apply needs at least one qudit");
    }
    std::uint32_t reg = merge(ids);
    registers_[reg]->apply(std::span<const WireLabel>(ids.data(), ids.size()), u);
}

std::vector<QuditId> QuditStore::expand(QuditId id, const Matrix &isometry, int outputs, int environment,
                                        std::string_view reason) {
    if (outputs < 1 || environment < 0) {
        throw ArgumentError("expand needs at least one output");
    }
    require_live(id);
    std::uint32_t reg = slots_[id].reg;
    std::vector<QuditId> fresh;
    fresh.push_back(new_label(reg, Status::Live));
    std::vector<WireLabel> extra;
    for (int k = 1; k < outputs; k++) {
        QuditId out = new_label(reg, Status::Live);
        fresh.push_back(out);
        extra.push_back(out);
    }
    for (int k = 0; k < environment; k++) {
        extra.push_back(new_label(reg, Status::Environment));
    }
    registers_[reg]->expand(id, isometry, extra);
    registers_[reg]->relabel(id, fresh[0]);
    consume(id, reason);
    created_ += fresh.size();
    if (sink_ != nullptr) {
        for (auto out : fresh) {
            sink_->on_lifecycle({out, LifecycleOp::Create, reason});
        }
    }
    return fresh;
}

bool QuditStore::test(QuditId id, const PureState &psi, Rng &rng, std::string_view reason) {
    require_live(id);
    std::uint32_t reg = slots_[id].reg;
    bool pass = registers_[reg]->measure_projector(id, psi, rng);
    consume(id, reason);
    release_if_dead(reg);
    return pass;
}

WeylIndex QuditStore::bell_measure(QuditId first, QuditId second, Rng &rng) {
    if (first == second) {
        throw ArgumentError("Bell measurement needs two distinct qudits");
    }
    QuditId ids[] = {first, second};
    std::uint32_t reg = merge(ids);
    WeylIndex out = registers_[reg]->bell_measure(first, second, rng);
    consume(first, "bell_measure");
    consume(second, "bell_measure");
    release_if_dead(reg);
    return out;
}

void QuditStore::discard(QuditId id, std::string_view reason) {
    require_live(id);
    std::uint32_t reg = slots_[id].reg;
    consume(id, reason);
    release_if_dead(reg);
}

DensityMatrix QuditStore::reduced(QuditId id) const {
    require_live(id);
    return registers_[slots_[id].reg]->reduced(id);
}

Matrix QuditStore::reduced(std::span<const QuditId> ids) const {
    for (auto id : ids) {
        require_live(id);
    }
    std::vector<std::uint32_t> regs;
    for (auto id : ids) {
        if (std::find(regs.begin(), regs.end(), slots_[id].reg) == regs.end()) {
            regs.push_back(slots_[id].reg);
        }
    }
    if (regs.size() == 1) {
        return registers_[regs[0]]->reduced(std::span<const WireLabel>(ids.data(), ids.size()));
    }
    // Independent registers: reduce their tensor product.
    Register joint = *registers_[regs[0]];
    for (std::size_t k = 1; k < regs.size(); k++) {
        joint.append(*registers_[regs[k]]);
    }
    return joint.reduced(std::span<const WireLabel>(ids.data(), ids.size()));
}

bool QuditStore::live(QuditId id) const {
    return id < slots_.size() && slots_[id].status == Status::Live;
}

std::size_t QuditStore::live_registers() const {
    return registers_.size() - free_registers_.size();
}

}  // namespace relq
