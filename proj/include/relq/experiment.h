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

#ifndef RELQ_EXPERIMENT_H
#define RELQ_EXPERIMENT_H

#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "relq/adversary.h"
#include "relq/montecarlo.h"
#include "relq/protocol.h"

namespace relq {

inline constexpr int kResultsSchemaVersion = 1;
/// Speed of light in m/s, used when a spec gives coordinates in SI units.
inline constexpr double kSpeedOfLight = 299792458.0;

struct ExperimentSpec {
    ProtocolConfig protocol;
    StrategySpec strategy;
    std::uint64_t trials = 1000;
    double confidence = 0.95;
    int workers = 1;
    std::string output;
    std::string transcript;
};

/// Reads the INI-style spec. Throws ConfigError with the offending line or `section.key`.
boost::property_tree::ptree read_spec_tree(std::istream &in);
boost::property_tree::ptree read_spec_file(const std::string &path);
/// Builds and validates an ExperimentSpec. Throws ConfigError.
ExperimentSpec parse_spec(const boost::property_tree::ptree &tree);

/// Worker count from RELQ_WORKERS if set, else `fallback`.
int workers_from_env(int fallback);

/// The resolved spec, as echoed into results.
nlohmann::json spec_to_json(const ExperimentSpec &spec);

struct ExperimentOutcome {
    nlohmann::json results;
    SimulationSummary summary;
};

/// Runs the experiment and builds the results document. `wall_time_seconds` is the only
/// field that differs between reruns of the same spec.
ExperimentOutcome run_experiment(const ExperimentSpec &spec, bool keep_transcript = false);

/// Names accepted as sweep axes, in `section.key` form.
std::vector<std::string> sweep_axes();

/// Reruns the spec once per value with `axis` overridden and returns CSV text with one row
/// per (value, site). Throws ArgumentError for an unknown axis.
std::string sweep(const boost::property_tree::ptree &tree, const std::string &axis, const std::vector<double> &values,
                  int workers_override = 0);

}  // namespace relq

#endif
