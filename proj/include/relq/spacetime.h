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

#ifndef RELQ_SPACETIME_H
#define RELQ_SPACETIME_H

#include <array>
#include <string>
#include <vector>

namespace relq {

/// Default tolerance on squared intervals, in normalized units (c = 1).
inline constexpr double kGeometryTolerance = 1e-9;

/// A point of Minkowski space in units where c = 1, with 1 or 3 spatial dimensions.
struct Event {
    double t = 0.0;
    std::array<double, 3> x{};
    int spatial_dim = 1;

    static Event at(double t, double x);
    static Event at(double t, double x, double y, double z);

    double spatial_distance(const Event &other) const;
    bool finite() const;
    std::string to_string() const;

    bool operator==(const Event &) const = default;
};

enum class CausalKind { Timelike, Lightlike, Spacelike };
enum class Orientation { Future, Past, None };

struct IntervalKind {
    CausalKind kind;
    Orientation orientation;

    bool causal_future() const {
        return kind != CausalKind::Spacelike && orientation != Orientation::Past;
    }
    std::string to_string() const;
    bool operator==(const IntervalKind &) const = default;
};

/// Lightlike when |dt^2 - |dx|^2| <= tolerance, otherwise by the sign of the interval.
/// The orientation is the sign of dt for causal kinds; coincident events have none.
IntervalKind classify(const Event &from, const Event &to, double tolerance = kGeometryTolerance);

/// True iff dt >= 0 and dt >= |dx| / speed_limit - tolerance.
bool causal_reachable(const Event &from, const Event &to, double speed_limit = 1.0,
                      double tolerance = kGeometryTolerance);

/// Earliest event at `destination`'s location, no earlier than `destination` itself, that a
/// signal leaving `from` at `speed_limit` after a fixed `latency` can reach.
Event earliest_arrival(const Event &from, const Event &destination, double speed_limit, double latency);

struct Branch {
    Event p_prime;
    Event q;
};

/// P plus one (P'_j, Q_j) pair per branch.
struct GeometryConfig {
    Event p;
    std::vector<Branch> branches;
    int spatial_dim = 1;
    double tolerance = kGeometryTolerance;

    /// Largest coordinate offset from P; classification inside validate_geometry uses
    /// coordinates divided by this, so the tolerance is dimensionless.
    double scale() const;
    /// Tolerance to use with raw (unnormalized) coordinates in linear predicates.
    double linear_tolerance() const {
        return tolerance * scale();
    }

    /// The canonical 1+1 layout: P at the origin, P'_j one unit out along each light ray,
    /// Q_j ten units out.
    static GeometryConfig canonical();
    /// `n` branches in 3+1 along the vertices of a regular simplex-like spread of directions.
    static GeometryConfig radial(int branches, double near = 1.0, double far = 10.0);
};

enum class Predicate {
    TooFewBranches,
    DimensionMismatch,
    NonFinite,
    BranchNotLightlike,
    PrimeNotSpacelike,
    TargetNotSpacelike,
    TargetNotInFuture,
};

std::string to_string(Predicate p);

struct Violation {
    Predicate predicate;
    int first = -1;
    int second = -1;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const {
        return violations.empty();
    }
    bool has(Predicate p) const;
    std::string describe() const;
};

/// Checks every geometric precondition independently and lists each one that fails.
ValidationReport validate_geometry(const GeometryConfig &g);

/// A straight spacetime segment inside some party's laboratory.
struct Segment {
    Event from;
    Event to;
};

/// Union of straight segments; a transmission is inside the region when both of its
/// endpoints lie on one segment.
class SecureRegion {
   public:
    void add(Segment s) {
        segments_.push_back(s);
    }
    bool contains_path(const Event &from, const Event &to, double tolerance) const;
    bool empty() const {
        return segments_.empty();
    }

   private:
    std::vector<Segment> segments_;
};

}  // namespace relq

#endif
