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

#ifndef RELQ_STATS_H
#define RELQ_STATS_H

#include <cstdint>
#include <span>
#include <vector>

namespace relq {

/// Bernoulli proportion with a Wilson score interval.
struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double confidence = 0.95;

    static McEstimate from_counts(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);
    double half_width() const {
        return 0.5 * (ci_high - ci_low);
    }
    /// Pools the counts of two estimates at the same confidence.
    static McEstimate merge(const McEstimate &a, const McEstimate &b);
};

/// Streaming mean and variance (Welford), mergeable across workers.
struct MeanAccumulator {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const MeanAccumulator &other);
    double variance() const;
    /// Standard error of the mean.
    double standard_error() const;
};

/// Two-sided standard normal quantile for the given confidence.
double normal_quantile(double confidence);

/// exp(-N eps^2 / (2 c^2)).
double azuma_tail(double n, double epsilon, double c);

/// P(Bin(n, p) >= k), summed in log space. Throws ArgumentError unless 0 <= k <= n + 1.
double binomial_tail(std::int64_t n, std::int64_t k, double p);

/// Chi-square goodness of fit against the uniform distribution; returns the p-value.
/// Throws ArgumentError if there are fewer than 2 categories or fewer than 5 samples per category.
double uniformity_test(std::span<const std::uint64_t> counts);

/// Chi-square test that two samples over the same categories come from one distribution.
/// Categories with pooled expected count below 5 are merged. Returns the p-value.
double homogeneity_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Z_0 = 0, Z_1, ..., Z_N with increments bounded by c.
struct MartingaleTrace {
    std::vector<double> z;
    double c = 0.0;

    /// Z_k = sum_{j<=k} passes_j - k c, where passes_j is the number of sites passed in round j.
    static MartingaleTrace from_passes(std::span<const std::uint8_t> passes, double c);
    bool bounded_increments(double tolerance = 1e-12) const;
};

struct SupermartingaleBin {
    int k_group = 0;
    int sign = 0;  // sign of Z_{k-1}
    std::uint64_t count = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SupermartingaleReport {
    std::vector<SupermartingaleBin> bins;
    double max_mean = 0.0;
    double max_ci_low = 0.0;
    bool violation = false;
};

/// Estimates the mean increment Z_k - Z_{k-1} conditioned on coarse features of the history
/// (position group of k, sign of Z_{k-1}) and flags a violation only when some bin's lower
/// confidence bound is positive. Bins use a Bonferroni-adjusted level. Requires >= 1000 traces.
SupermartingaleReport supermartingale_check(std::span<const MartingaleTrace> traces, double confidence = 0.999,
                                            int k_groups = 8);

}  // namespace relq

#endif
