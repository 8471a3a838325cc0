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

#include "relq/spacetime.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relq/errors.h"

namespace relq {

namespace {

void require_same_dim(const Event &a, const Event &b) {
    if (a.spatial_dim != b.spatial_dim) {
        throw ArgumentError("events have different spatial dimension");
    }
}

double squared_interval(const Event &from, const Event &to) {
    double dt = to.t - from.t;
    double dx = from.spatial_distance(to);
    return dt * dt - dx * dx;
}

Event scaled(const Event &e, const Event &origin, double scale) {
    Event out = e;
    out.t = (e.t - origin.t) / scale;
    for (int i = 0; i < 3; i++) {
        out.x[i] = (e.x[i] - origin.x[i]) / scale;
    }
    return out;
}

}  // namespace

Event Event::at(double t, double x) {
    Event e;
    e.t = t;
    e.x = {x, 0.0, 0.0};
    e.spatial_dim = 1;
    return e;
}

Event Event::at(double t, double x, double y, double z) {
    Event e;
    e.t = t;
    e.x = {x, y, z};
    e.spatial_dim = 3;
    return e;
}

double Event::spatial_distance(const Event &other) const {
    require_same_dim(*this, other);
    double sum = 0.0;
    for (int i = 0; i < spatial_dim; i++) {
        double d = other.x[i] - x[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

bool Event::finite() const {
    if (!std::isfinite(t)) {
        return false;
    }
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

std::string Event::to_string() const {
    std::ostringstream out;
    out << "(" << t;
    for (int i = 0; i < spatial_dim; i++) {
        out << ", " << x[i];
    }
    out << ")";
    return out.str();
}

std::string IntervalKind::to_string() const {
    std::string k = kind == CausalKind::Timelike ? "timelike" : kind == CausalKind::Lightlike ? "lightlike" : "spacelike";
    if (orientation == Orientation::Future) {
        k += "(future)";
    } else if (orientation == Orientation::Past) {
        k += "(past)";
    }
    return k;
}

IntervalKind classify(const Event &from, const Event &to, double tolerance) {
    require_same_dim(from, to);
    double s = squared_interval(from, to);
    double dt = to.t - from.t;
    Orientation sign = dt > 0 ? Orientation::Future : dt < 0 ? Orientation::Past : Orientation::None;
    if (std::abs(s) <= tolerance) {
        return {CausalKind::Lightlike, sign};
    }
    if (s > 0) {
        return {CausalKind::Timelike, sign};
    }
    return {CausalKind::Spacelike, Orientation::None};
}

bool causal_reachable(const Event &from, const Event &to, double speed_limit, double tolerance) {
    if (!(speed_limit > 0.0 && speed_limit <= 1.0)) {
        throw ArgumentError("speed limit must lie in (0, 1]");
    }
    double dt = to.t - from.t;
    return dt >= 0.0 && dt >= from.spatial_distance(to) / speed_limit - tolerance;
}

Event earliest_arrival(const Event &from, const Event &destination, double speed_limit, double latency) {
    if (!(speed_limit > 0.0 && speed_limit <= 1.0)) {
        throw ArgumentError("speed limit must lie in (0, 1]");
    }
    if (latency < 0.0) {
        throw ArgumentError("latency must be non-negative");
    }
    Event out = destination;
    out.t = std::max(destination.t, from.t + latency + from.spatial_distance(destination) / speed_limit);
    return out;
}

double GeometryConfig::scale() const {
    double s = 0.0;
    auto visit = [&](const Event &e) {
        s = std::max(s, std::abs(e.t - p.t));
        for (int i = 0; i < 3; i++) {
            s = std::max(s, std::abs(e.x[i] - p.x[i]));
        }
    };
    for (const auto &b : branches) {
        visit(b.p_prime);
        visit(b.q);
    }
    return s > 0.0 && std::isfinite(s) ? s : 1.0;
}

GeometryConfig GeometryConfig::canonical() {
    GeometryConfig g;
    g.p = Event::at(0.0, 0.0);
    g.branches = {
        {Event::at(1.0, -1.0), Event::at(10.0, -10.0)},
        {Event::at(1.0, 1.0), Event::at(10.0, 10.0)},
    };
    g.spatial_dim = 1;
    return g;
}

GeometryConfig GeometryConfig::radial(int branches, double near, double far) {
    if (branches < 2) {
        throw ArgumentError("radial geometry needs at least two branches");
    }
    GeometryConfig g;
    g.p = Event::at(0.0, 0.0, 0.0, 0.0);
    g.spatial_dim = 3;
    // Fibonacci-sphere directions; any two are distinct so equal-time events are spacelike.
    double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < branches; j++) {
        double z = branches == 2 ? (j == 0 ? 1.0 : -1.0) : 1.0 - 2.0 * (j + 0.5) / branches;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * j;
        double ux = r * std::cos(phi);
        double uy = r * std::sin(phi);
        g.branches.push_back({Event::at(near, near * ux, near * uy, near * z), Event::at(far, far * ux, far * uy, far * z)});
    }
    return g;
}

std::string to_string(Predicate p) {
    switch (p) {
        case Predicate::TooFewBranches:
            return "too_few_branches";
        case Predicate::DimensionMismatch:
            return "dimension_mismatch";
        case Predicate::NonFinite:
            return "non_finite_coordinate";
        case Predicate::BranchNotLightlike:
            return "branch_not_lightlike_collinear";
        case Predicate::PrimeNotSpacelike:
            return "p_prime_pair_not_spacelike";
        case Predicate::TargetNotSpacelike:
            return "q_pair_not_spacelike";
        case Predicate::TargetNotInFuture:
            return "q_not_in_future_of_p";
    }
    return "unknown";
}

bool ValidationReport::has(Predicate p) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation &v) { return v.predicate == p; });
}

std::string ValidationReport::describe() const {
    if (ok()) {
        return "geometry ok";
    }
    std::ostringstream out;
    for (const auto &v : violations) {
        out << to_string(v.predicate);
        if (v.first >= 0) {
            out << " [branch " << v.first + 1;
            if (v.second >= 0) {
                out << ", branch " << v.second + 1;
            }
            out << "]";
        }
        if (!v.detail.empty()) {
            out << ": " << v.detail;
        }
        out << "\n";
    }
    return out.str();
}

ValidationReport validate_geometry(const GeometryConfig &g) {
    ValidationReport report;
    int n = static_cast<int>(g.branches.size());
    if (n < 2) {
        report.violations.push_back({Predicate::TooFewBranches, -1, -1, "need at least 2 branches, got " + std::to_string(n)});
    }
    std::vector<const Event *> all{&g.p};
    for (const auto &b : g.branches) {
        all.push_back(&b.p_prime);
        all.push_back(&b.q);
    }
    for (const auto *e : all) {
        if (e->spatial_dim != g.spatial_dim) {
            report.violations.push_back({Predicate::DimensionMismatch, -1, -1, "event " + e->to_string()});
            return report;
        }
        if (!e->finite()) {
            report.violations.push_back({Predicate::NonFinite, -1, -1, "event " + e->to_string()});
            return report;
        }
    }

    double scale = g.scale();
    double tol = g.tolerance;
    Event p = scaled(g.p, g.p, scale);
    auto norm = [&](const Event &e) { return scaled(e, g.p, scale); };

    for (int j = 0; j < n; j++) {
        Event pp = norm(g.branches[j].p_prime);
        Event q = norm(g.branches[j].q);
        IntervalKind to_prime = classify(p, pp, tol);
        IntervalKind prime_to_q = classify(pp, q, tol);
        IntervalKind to_q = classify(p, q, tol);
        bool lightlike = to_prime.kind == CausalKind::Lightlike && to_prime.orientation != Orientation::Past &&
                         prime_to_q.kind == CausalKind::Lightlike && prime_to_q.orientation != Orientation::Past &&
                         to_q.kind == CausalKind::Lightlike && to_q.orientation == Orientation::Future;
        if (!lightlike) {
            report.violations.push_back({Predicate::BranchNotLightlike, j, -1,
                                         "P->P' " + to_prime.to_string() + ", P'->Q " + prime_to_q.to_string() +
                                             ", P->Q " + to_q.to_string()});
        }
        if (!to_q.causal_future() || to_q.orientation != Orientation::Future) {
            report.violations.push_back({Predicate::TargetNotInFuture, j, -1, "P->Q " + to_q.to_string()});
        }
    }
    for (int j = 0; j < n; j++) {
        for (int k = j + 1; k < n; k++) {
            IntervalKind primes = classify(norm(g.branches[j].p_prime), norm(g.branches[k].p_prime), tol);
            if (primes.kind != CausalKind::Spacelike) {
                report.violations.push_back({Predicate::PrimeNotSpacelike, j, k, primes.to_string()});
            }
            IntervalKind targets = classify(norm(g.branches[j].q), norm(g.branches[k].q), tol);
            if (targets.kind != CausalKind::Spacelike) {
                report.violations.push_back({Predicate::TargetNotSpacelike, j, k, targets.to_string()});
            }
        }
    }
    return report;
}

bool SecureRegion::contains_path(const Event &from, const Event &to, double tolerance) const {
    auto on_segment = [&](const Segment &s, const Event &e) {
        std::array<double, 4> v{s.to.t - s.from.t, s.to.x[0] - s.from.x[0], s.to.x[1] - s.from.x[1], s.to.x[2] - s.from.x[2]};
        std::array<double, 4> w{e.t - s.from.t, e.x[0] - s.from.x[0], e.x[1] - s.from.x[1], e.x[2] - s.from.x[2]};
        double vv = 0.0;
        double wv = 0.0;
        for (int i = 0; i < 4; i++) {
            vv += v[i] * v[i];
            wv += w[i] * v[i];
        }
        double lambda = vv > 0.0 ? wv / vv : 0.0;
        if (lambda < -tolerance || lambda > 1.0 + tolerance) {
            return false;
        }
        double off = 0.0;
        for (int i = 0; i < 4; i++) {
            double r = w[i] - lambda * v[i];
            off += r * r;
        }
        return std::sqrt(off) <= tolerance * std::max(1.0, std::sqrt(vv));
    };
    return std::any_of(segments_.begin(), segments_.end(),
                       [&](const Segment &s) { return on_segment(s, from) && on_segment(s, to); });
}

}  // namespace relq
