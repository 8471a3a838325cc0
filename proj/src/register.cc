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

#include "relq/register.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relq/errors.h"

namespace relq {

Register::Register(int dim) : dim_(dim), amps_{Complex(1.0)} {
    if (dim < 2) {
        throw ArgumentError("register dimension must be >= 2");
    }
}

Register Register::from_state(WireLabel label, const PureState &psi) {
    Register r(psi.dim());
    r.labels_ = {label};
    r.amps_.assign(psi.amps().data(), psi.amps().data() + psi.dim());
    return r;
}

Register Register::bell_pair(int dim, WireLabel first, WireLabel second) {
    Register r(dim);
    r.labels_ = {first, second};
    r.amps_.assign(static_cast<std::size_t>(dim) * dim, Complex(0.0));
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int j = 0; j < dim; j++) {
        r.amps_[static_cast<std::size_t>(j) * dim + j] = norm;
    }
    return r;
}

bool Register::has(WireLabel label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t Register::position(WireLabel label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw ArgumentError("wire " + std::to_string(label) + " not in register");
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Register::stride(std::size_t pos) const {
    std::size_t s = 1;
    for (std::size_t k = pos + 1; k < labels_.size(); k++) {
        s *= static_cast<std::size_t>(dim_);
    }
    return s;
}

std::vector<std::size_t> Register::bases(std::span<const std::size_t> positions) const {
    std::size_t block = 1;
    for (std::size_t k = 0; k < positions.size(); k++) {
        block *= static_cast<std::size_t>(dim_);
    }
    std::vector<std::size_t> strides;
    for (auto p : positions) {
        strides.push_back(stride(p));
    }
    std::vector<std::size_t> out;
    out.reserve(amps_.size() / block);
    for (std::size_t idx = 0; idx < amps_.size(); idx++) {
        bool zero = true;
        for (auto s : strides) {
            if ((idx / s) % static_cast<std::size_t>(dim_) != 0) {
                zero = false;
                break;
            }
        }
        if (zero) {
            out.push_back(idx);
        }
    }
    return out;
}

std::vector<std::size_t> Register::offsets(std::span<const std::size_t> positions) const {
    std::vector<std::size_t> out{0};
    for (auto p : positions) {
        std::size_t s = stride(p);
        std::vector<std::size_t> next;
        next.reserve(out.size() * dim_);
        for (auto o : out) {
            for (int j = 0; j < dim_; j++) {
                next.push_back(o + static_cast<std::size_t>(j) * s);
            }
        }
        out = std::move(next);
    }
    return out;
}

void Register::relabel(WireLabel from, WireLabel to) {
    if (has(to)) {
        throw ArgumentError("relabel target already present");
    }
    labels_[position(from)] = to;
}

void Register::append(const Register &other) {
    if (other.dim_ != dim_) {
        throw ArgumentError("cannot tensor registers of different dimension");
    }
    std::vector<Complex> out(amps_.size() * other.amps_.size());
    for (std::size_t i = 0; i < amps_.size(); i++) {
        for (std::size_t j = 0; j < other.amps_.size(); j++) {
            out[i * other.amps_.size() + j] = amps_[i] * other.amps_[j];
        }
    }
    amps_ = std::move(out);
    labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

void Register::apply(WireLabel wire, const Matrix &u) {
    if (u.rows() != dim_ || u.cols() != dim_) {
        throw ArgumentError("single-wire operator has wrong shape");
    }
    std::size_t s = stride(position(wire));
    std::size_t d = static_cast<std::size_t>(dim_);
    std::size_t block = s * d;
    std::vector<Complex> in(d);
    for (std::size_t b0 = 0; b0 < amps_.size(); b0 += block) {
        for (std::size_t off = 0; off < s; off++) {
            std::size_t base = b0 + off;
            for (std::size_t j = 0; j < d; j++) {
                in[j] = amps_[base + j * s];
            }
            for (std::size_t r = 0; r < d; r++) {
                Complex acc = 0.0;
                for (std::size_t j = 0; j < d; j++) {
                    acc += u(r, j) * in[j];
                }
                amps_[base + r * s] = acc;
            }
        }
    }
}

void Register::apply(std::span<const WireLabel> wires, const Matrix &u) {
    if (wires.size() == 1) {
        apply(wires[0], u);
        return;
    }
    std::vector<std::size_t> positions;
    for (auto w : wires) {
        positions.push_back(position(w));
    }
    std::vector<std::size_t> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ArgumentError("repeated wire in multi-wire operator");
    }
    auto offs = offsets(positions);
    if (u.rows() != static_cast<Eigen::Index>(offs.size()) || u.cols() != u.rows()) {
        throw ArgumentError("multi-wire operator has wrong shape");
    }
    Vector in(offs.size());
    for (auto base : bases(positions)) {
        for (std::size_t j = 0; j < offs.size(); j++) {
            in[j] = amps_[base + offs[j]];
        }
        Vector out = u * in;
        for (std::size_t j = 0; j < offs.size(); j++) {
            amps_[base + offs[j]] = out[j];
        }
    }
}

void Register::expand(WireLabel wire, const Matrix &isometry, std::span<const WireLabel> extra) {
    std::size_t d = static_cast<std::size_t>(dim_);
    std::size_t tail = 1;
    for (std::size_t k = 0; k < extra.size(); k++) {
        tail *= d;
    }
    if (isometry.cols() != dim_ || static_cast<std::size_t>(isometry.rows()) != d * tail) {
        throw ArgumentError("isometry has wrong shape for expand");
    }
    for (auto e : extra) {
        if (has(e)) {
            throw ArgumentError("expand: output label already present");
        }
    }
    std::size_t s = stride(position(wire));
    std::size_t block = s * d;
    std::vector<Complex> out(amps_.size() * tail, Complex(0.0));
    std::vector<Complex> in(d);
    for (std::size_t b0 = 0; b0 < amps_.size(); b0 += block) {
        for (std::size_t off = 0; off < s; off++) {
            std::size_t base = b0 + off;
            for (std::size_t j = 0; j < d; j++) {
                in[j] = amps_[base + j * s];
            }
            for (std::size_t o = 0; o < d * tail; o++) {
                Complex acc = 0.0;
                for (std::size_t j = 0; j < d; j++) {
                    acc += isometry(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j)) * in[j];
                }
                std::size_t first = o / tail;
                std::size_t rest = o % tail;
                out[(base + first * s) * tail + rest] = acc;
            }
        }
    }
    amps_ = std::move(out);
    labels_.insert(labels_.end(), extra.begin(), extra.end());
}

double Register::overlap_probability(WireLabel wire, const PureState &target) const {
    if (target.dim() != dim_) {
        throw ArgumentError("projector dimension mismatch");
    }
    std::size_t s = stride(position(wire));
    std::size_t d = static_cast<std::size_t>(dim_);
    std::size_t block = s * d;
    double p = 0.0;
    for (std::size_t b0 = 0; b0 < amps_.size(); b0 += block) {
        for (std::size_t off = 0; off < s; off++) {
            Complex c = 0.0;
            for (std::size_t j = 0; j < d; j++) {
                c += std::conj(target[static_cast<int>(j)]) * amps_[b0 + off + j * s];
            }
            p += std::norm(c);
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

bool Register::measure_projector(WireLabel wire, const PureState &target, Rng &rng) {
    if (target.dim() != dim_) {
        throw ArgumentError("projector dimension mismatch");
    }
    std::size_t pos = position(wire);
    std::size_t s = stride(pos);
    std::size_t d = static_cast<std::size_t>(dim_);
    std::size_t block = s * d;
    std::vector<Complex> contracted(amps_.size() / d);
    double p = 0.0;
    std::size_t k = 0;
    for (std::size_t b0 = 0; b0 < amps_.size(); b0 += block) {
        for (std::size_t off = 0; off < s; off++, k++) {
            Complex c = 0.0;
            for (std::size_t j = 0; j < d; j++) {
                c += std::conj(target[static_cast<int>(j)]) * amps_[b0 + off + j * s];
            }
            contracted[k] = c;
            p += std::norm(c);
        }
    }
    bool pass = rng.uniform() < p;
    if (pass) {
        double scale = 1.0 / std::sqrt(p);
        for (auto &c : contracted) {
            c *= scale;
        }
        amps_ = std::move(contracted);
        labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(pos));
        return true;
    }
    k = 0;
    double norm = 0.0;
    for (std::size_t b0 = 0; b0 < amps_.size(); b0 += block) {
        for (std::size_t off = 0; off < s; off++, k++) {
            for (std::size_t j = 0; j < d; j++) {
                Complex &a = amps_[b0 + off + j * s];
                a -= contracted[k] * target[static_cast<int>(j)];
                norm += std::norm(a);
            }
        }
    }
    double scale = 1.0 / std::sqrt(norm);
    for (auto &a : amps_) {
        a *= scale;
    }
    return false;
}

WeylIndex Register::bell_measure(WireLabel first, WireLabel second, Rng &rng) {
    std::size_t p1 = position(first);
    std::size_t p2 = position(second);
    if (p1 == p2) {
        throw ArgumentError("Bell measurement needs two distinct wires");
    }
    std::size_t s1 = stride(p1);
    std::size_t s2 = stride(p2);
    std::size_t d = static_cast<std::size_t>(dim_);
    std::size_t positions[] = {p1, p2};
    auto base_list = bases(positions);
    double norm = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<Complex> phase(d);
    auto contract = [&](std::size_t a, std::size_t b, std::size_t base) {
        Complex c = 0.0;
        for (std::size_t j = 0; j < d; j++) {
            c += phase[(b * j) % d] * amps_[base + j * s1 + ((j + a) % d) * s2];
        }
        return c * norm;
    };
    for (std::size_t m = 0; m < d; m++) {
        double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(d);
        phase[m] = Complex(std::cos(angle), std::sin(angle));
    }

    std::vector<double> probs(d * d, 0.0);
    for (std::size_t a = 0; a < d; a++) {
        for (std::size_t b = 0; b < d; b++) {
            double p = 0.0;
            for (auto base : base_list) {
                p += std::norm(contract(a, b, base));
            }
            probs[a * d + b] = p;
        }
    }
    double u = rng.uniform();
    std::size_t outcome = probs.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); i++) {
        cumulative += probs[i];
        if (u < cumulative) {
            outcome = i;
            break;
        }
    }
    while (probs[outcome] <= 0.0 && outcome > 0) {
        outcome--;
    }
    std::size_t a = outcome / d;
    std::size_t b = outcome % d;
    double scale = 1.0 / std::sqrt(probs[outcome]);
    std::vector<Complex> out(base_list.size());
    for (std::size_t k = 0; k < base_list.size(); k++) {
        out[k] = contract(a, b, base_list[k]) * scale;
    }
    amps_ = std::move(out);
    std::size_t hi = std::max(p1, p2);
    std::size_t lo = std::min(p1, p2);
    labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(hi));
    labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(lo));
    return {static_cast<int>(a), static_cast<int>(b)};
}

DensityMatrix Register::reduced(WireLabel wire) const {
    WireLabel w[] = {wire};
    return DensityMatrix(reduced(std::span<const WireLabel>(w)));
}

Matrix Register::reduced(std::span<const WireLabel> wires) const {
    std::vector<std::size_t> positions;
    for (auto w : wires) {
        positions.push_back(position(w));
    }
    auto offs = offsets(positions);
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(offs.size()), static_cast<Eigen::Index>(offs.size()));
    for (auto base : bases(positions)) {
        for (std::size_t i = 0; i < offs.size(); i++) {
            for (std::size_t j = 0; j < offs.size(); j++) {
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    amps_[base + offs[i]] * std::conj(amps_[base + offs[j]]);
            }
        }
    }
    return (rho + rho.adjoint()) / 2.0;
}

}  // namespace relq
