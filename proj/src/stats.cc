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

#include "relq/stats.h"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "relq/errors.h"

namespace relq {

double normal_quantile(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ArgumentError("confidence must lie in (0, 1)");
    }
    boost::math::normal n;
    return boost::math::quantile(n, 0.5 + 0.5 * confidence);
}

McEstimate McEstimate::from_counts(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (successes > trials) {
        throw ArgumentError("more successes than trials");
    }
    McEstimate e;
    e.trials = trials;
    e.successes = successes;
    e.confidence = confidence;
    if (trials == 0) {
        return e;
    }
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z = normal_quantile(confidence);
    double z2n = z * z / n;
    double center = (p + 0.5 * z2n) / (1.0 + z2n);
    double hw = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n));
    e.point = p;
    e.ci_low = std::clamp(center - hw, 0.0, p);
    e.ci_high = std::clamp(center + hw, p, 1.0);
    return e;
}

McEstimate McEstimate::merge(const McEstimate &a, const McEstimate &b) {
    if (a.confidence != b.confidence) {
        throw ArgumentError("cannot merge estimates at different confidence levels");
    }
    return from_counts(a.successes + b.successes, a.trials + b.trials, a.confidence);
}

void MeanAccumulator::add(double x) {
    count++;
    double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void MeanAccumulator::merge(const MeanAccumulator &other) {
    if (other.count == 0) {
        return;
    }
    if (count == 0) {
        *this = other;
        return;
    }
    double n1 = static_cast<double>(count);
    double n2 = static_cast<double>(other.count);
    double delta = other.mean - mean;
    double n = n1 + n2;
    mean += delta * n2 / n;
    m2 += other.m2 + delta * delta * n1 * n2 / n;
    count += other.count;
}

double MeanAccumulator::variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double MeanAccumulator::standard_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

double azuma_tail(double n, double epsilon, double c) {
    if (!(n >= 1.0) || !(epsilon >= 0.0) || !(c > 0.0)) {
        throw ArgumentError("azuma_tail needs N >= 1, eps >= 0, c > 0");
    }
    return std::exp(-n * epsilon * epsilon / (2.0 * c * c));
}

double binomial_tail(std::int64_t n, std::int64_t k, double p) {
    if (n < 0 || k < 0 || k > n + 1 || !(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("binomial_tail needs 0 <= k <= n + 1 and p in [0, 1]");
    }
    if (k == 0) {
        return 1.0;
    }
    if (k > n || p == 0.0) {
        return 0.0;
    }
    if (p == 1.0) {
        return 1.0;
    }
    double lp = std::log(p);
    double lq = std::log1p(-p);
    double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    auto log_term = [&](std::int64_t j) {
        double jj = static_cast<double>(j);
        return lgn - std::lgamma(jj + 1.0) - std::lgamma(static_cast<double>(n - j) + 1.0) + jj * lp +
               static_cast<double>(n - j) * lq;
    };
    double top = -INFINITY;
    for (std::int64_t j = k; j <= n; j++) {
        top = std::max(top, log_term(j));
    }
    double sum = 0.0;
    for (std::int64_t j = k; j <= n; j++) {
        sum += std::exp(log_term(j) - top);
    }
    return std::min(1.0, std::exp(top + std::log(sum)));
}

namespace {

double chi_square_sf(double statistic, double dof) {
    if (statistic <= 0.0) {
        return 1.0;
    }
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

double uniformity_test(std::span<const std::uint64_t> counts) {
    std::size_t m = counts.size();
    if (m < 2) {
        throw ArgumentError("uniformity test needs at least two categories");
    }
    double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total < 5.0 * static_cast<double>(m)) {
        throw ArgumentError("uniformity test undersampled: need at least 5 samples per category");
    }
    double expected = total / static_cast<double>(m);
    double stat = 0.0;
    for (auto c : counts) {
        double r = static_cast<double>(c) - expected;
        stat += r * r / expected;
    }
    return chi_square_sf(stat, static_cast<double>(m - 1));
}

double homogeneity_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) {
        throw ArgumentError("homogeneity test needs matching categories");
    }
    double na = std::accumulate(a.begin(), a.end(), 0.0);
    double nb = std::accumulate(b.begin(), b.end(), 0.0);
    if (na == 0.0 || nb == 0.0) {
        throw ArgumentError("homogeneity test needs two non-empty samples");
    }
    double total = na + nb;
    // Merge sparse categories so every kept cell has pooled expectation >= 5.
    std::vector<std::pair<double, double>> cells;
    std::pair<double, double> rest{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); i++) {
        double pooled = static_cast<double>(a[i] + b[i]);
        if (std::min(na, nb) * pooled / total >= 5.0) {
            cells.emplace_back(static_cast<double>(a[i]), static_cast<double>(b[i]));
        } else {
            rest.first += static_cast<double>(a[i]);
            rest.second += static_cast<double>(b[i]);
        }
    }
    if (rest.first + rest.second > 0.0) {
        cells.push_back(rest);
    }
    if (cells.size() < 2) {
        return 1.0;
    }
    double stat = 0.0;
    for (auto [x, y] : cells) {
        double col = x + y;
        double ea = na * col / total;
        double eb = nb * col / total;
        stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    return chi_square_sf(stat, static_cast<double>(cells.size() - 1));
}

MartingaleTrace MartingaleTrace::from_passes(std::span<const std::uint8_t> passes, double c) {
    MartingaleTrace t;
    t.c = c;
    t.z.reserve(passes.size() + 1);
    t.z.push_back(0.0);
    double acc = 0.0;
    for (auto p : passes) {
        acc += static_cast<double>(p) - c;
        t.z.push_back(acc);
    }
    return t;
}

bool MartingaleTrace::bounded_increments(double tolerance) const {
    for (std::size_t k = 1; k < z.size(); k++) {
        if (std::abs(z[k] - z[k - 1]) > c + tolerance) {
            return false;
        }
    }
    return true;
}

SupermartingaleReport supermartingale_check(std::span<const MartingaleTrace> traces, double confidence,
                                            int k_groups) {
    if (traces.size() < 1000) {
        throw ArgumentError("supermartingale check needs at least 1000 traces");
    }
    if (k_groups < 1) {
        throw ArgumentError("k_groups must be positive");
    }
    std::size_t len = traces.front().z.size();
    if (len < 2) {
        throw ArgumentError("traces must contain at least one increment");
    }
    std::map<std::pair<int, int>, MeanAccumulator> acc;
    for (const auto &t : traces) {
        if (t.z.size() != len) {
            throw ArgumentError("traces must have equal length");
        }
        for (std::size_t k = 1; k < len; k++) {
            int group = static_cast<int>((k - 1) * static_cast<std::size_t>(k_groups) / (len - 1));
            double prev = t.z[k - 1];
            int sign = prev > 1e-12 ? 1 : prev < -1e-12 ? -1 : 0;
            acc[{group, sign}].add(t.z[k] - t.z[k - 1]);
        }
    }
    SupermartingaleReport report;
    double per_bin = 1.0 - (1.0 - confidence) / static_cast<double>(acc.size());
    double z = normal_quantile(per_bin);
    report.max_mean = -INFINITY;
    report.max_ci_low = -INFINITY;
    for (const auto &[key, a] : acc) {
        if (a.count < 30) {
            continue;
        }
        SupermartingaleBin bin;
        bin.k_group = key.first;
        bin.sign = key.second;
        bin.count = a.count;
        bin.mean = a.mean;
        double hw = z * a.standard_error();
        bin.ci_low = a.mean - hw;
        bin.ci_high = a.mean + hw;
        report.max_mean = std::max(report.max_mean, bin.mean);
        report.max_ci_low = std::max(report.max_ci_low, bin.ci_low);
        report.violation = report.violation || bin.ci_low > 0.0;
        report.bins.push_back(bin);
    }
    return report;
}

}  // namespace relq
