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

#ifndef RELQ_REGISTER_H
#define RELQ_REGISTER_H

#include <cstdint>
#include <span>
#include <vector>

#include "relq/qudit.h"

namespace relq {

using WireLabel = std::uint32_t;

/// Pure state of several qudits of a common dimension. Each wire carries an opaque label;
/// amplitudes are row-major with the first wire most significant.
///
/// Mixed states are represented by purification: an environment wire is just a wire
/// nobody measures.
class Register {
   public:
    explicit Register(int dim);

    static Register from_state(WireLabel label, const PureState &psi);
    /// Two wires in the state (1/sqrt d) sum_j |j>|j>.
    static Register bell_pair(int dim, WireLabel first, WireLabel second);

    int dim() const {
        return dim_;
    }
    std::size_t wires() const {
        return labels_.size();
    }
    const std::vector<WireLabel> &labels() const {
        return labels_;
    }
    std::span<const Complex> amplitudes() const {
        return amps_;
    }
    bool has(WireLabel label) const;
    std::size_t position(WireLabel label) const;

    void relabel(WireLabel from, WireLabel to);

    /// Tensor product; the other register's wires are appended.
    void append(const Register &other);

    void apply(WireLabel wire, const Matrix &u);
    /// `u` acts on the listed wires, first label most significant.
    void apply(std::span<const WireLabel> wires, const Matrix &u);

    /// Replaces `wire` by the outputs of an isometry C^d -> (C^d)^(1 + extra.size()).
    /// The first output keeps the original label; the remaining outputs take `extra`.
    void expand(WireLabel wire, const Matrix &isometry, std::span<const WireLabel> extra);

    /// Probability of the outcome |target><target| on `wire`.
    double overlap_probability(WireLabel wire, const PureState &target) const;

    /// Measures {|target><target|, I - |target><target|} on `wire`. On the first outcome the
    /// wire factors out and is removed; on the second it stays (collapsed, unreferenced).
    bool measure_projector(WireLabel wire, const PureState &target, Rng &rng);

    /// Teleportation-basis measurement of two wires (see bell_basis_state). Both wires are removed.
    WeylIndex bell_measure(WireLabel first, WireLabel second, Rng &rng);

    DensityMatrix reduced(WireLabel wire) const;
    Matrix reduced(std::span<const WireLabel> wires) const;

   private:
    std::size_t stride(std::size_t pos) const;
    /// Flat indices whose digits at `positions` are all zero, ascending.
    std::vector<std::size_t> bases(std::span<const std::size_t> positions) const;
    /// Offsets of every digit assignment at `positions`, first position most significant.
    std::vector<std::size_t> offsets(std::span<const std::size_t> positions) const;

    int dim_;
    std::vector<WireLabel> labels_;
    std::vector<Complex> amps_;
};

}  // namespace relq

#endif
