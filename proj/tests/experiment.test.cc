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

#include "relq/experiment.h"

#include <gtest/gtest.h>

#include <sstream>

#include "relq/errors.h"

using namespace relq;

namespace {

const char *kBase = R"(
[experiment]
seed = 7
trials = 40

[protocol]
d = 2
n = 100
epsilon = 0.1

[strategy]
name = honest
branch = 2
)";

boost::property_tree::ptree tree_of(const std::string &text) {
    std::istringstream in(text);
    return read_spec_tree(in);
}

ExperimentSpec spec_of(const std::string &text) {
    return parse_spec(tree_of(text));
}

void expect_config_error(const std::string &text, const std::string &needle) {
    try {
        spec_of(text);
        ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(experiment, defaults_and_canonical_geometry) {
    auto s = spec_of(kBase);
    EXPECT_EQ(s.protocol.seed, 7u);
    EXPECT_EQ(s.trials, 40u);
    EXPECT_EQ(s.protocol.n, 100);
    EXPECT_EQ(s.protocol.mode, VerifyMode::Direct);
    EXPECT_EQ(s.protocol.threshold, ThresholdConvention::Methods);
    EXPECT_EQ(s.strategy.name, "honest");
    EXPECT_EQ(s.strategy.branch, 1);
    EXPECT_EQ(s.protocol.geometry.branches.size(), 2u);
    EXPECT_EQ(s.protocol.geometry.branches[1].q, Event::at(10, 10));
}

TEST(experiment, bundled_specs_parse) {
    for (const char *name : {"honest_d2.ini", "cloner_bound.ini", "split_permissive.ini", "b3_honest.ini",
                             "miswired.ini", "loss_sweep.ini", "hiding_b2.ini", "three_sites.ini"}) {
        EXPECT_NO_THROW(parse_spec(read_spec_file(std::string(RELQ_SPECS_DIR) + "/" + name))) << name;
    }
    EXPECT_THROW(parse_spec(read_spec_file(std::string(RELQ_SPECS_DIR) + "/bad_geometry.ini")), ConfigError);
}

TEST(experiment, schema_errors) {
    expect_config_error("[protocol]\nd = 2\n", "experiment.seed");
    expect_config_error(std::string(kBase) + "[protocol]\nfoo = 1\n", "");
    expect_config_error(std::string(kBase) + "[mystery]\nx = 1\n", "mystery");
    expect_config_error("[experiment]\nseed = 1\nbogus = 2\n", "experiment.bogus");
    expect_config_error("[experiment]\nseed = abc\n", "experiment.seed");
    expect_config_error("[experiment]\nseed = 1\n[protocol]\nmode = b9\n", "protocol.mode");
    expect_config_error("[experiment]\nseed = 1\n[quantum]\nkind = pigeon\n", "quantum.kind");
    expect_config_error("[experiment]\nseed = 1\n[strategy]\nname = honest\nbranch = 3\n", "branch");
    expect_config_error("[experiment]\nseed = 1\n[geometry]\np = 0, 0\n[branch1]\np_prime = 1, -1\nq = 10, -10\n"
                        "[branch3]\np_prime = 1, 1\nq = 10, 10\n",
                        "branch");
    expect_config_error("[experiment]\nseed = 1\n[geometry]\np = 0, 0\n[branch1]\np_prime = 1, -1\nq = 10, -10\n"
                        "[branch2]\np_prime = 1, 1\nq = 10, 5\n",
                        "branch_not_lightlike");
}

TEST(experiment, ini_syntax_error_cites_line) {
    try {
        tree_of("[experiment]\nseed = 1\n[broken\n");
        ADD_FAILURE();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(experiment, si_units_convert_to_light_seconds) {
    std::string text = R"(
[experiment]
seed = 1
[geometry]
units = si
p = 0, 0
[branch1]
p_prime = 1, -299792458
q = 10, -2997924580
[branch2]
p_prime = 1, 299792458
q = 10, 2997924580
)";
    auto s = spec_of(text);
    EXPECT_NEAR(s.protocol.geometry.branches[0].q.x[0], -10.0, 1e-12);
    EXPECT_TRUE(validate_geometry(s.protocol.geometry).ok());
}

TEST(experiment, b3_defaults_rounds_from_multiplicity) {
    auto s = spec_of("[experiment]\nseed = 1\n[protocol]\nd = 3\nmode = b3\nm = 10\n");
    EXPECT_EQ(s.protocol.n, 90);
}

TEST(experiment, results_are_deterministic) {
    auto s = spec_of(kBase);
    auto a = run_experiment(s).results;
    s.workers = 3;
    auto b = run_experiment(s).results;
    a.erase("wall_time_seconds");
    b.erase("wall_time_seconds");
    a["spec"]["experiment"].erase("workers");
    b["spec"]["experiment"].erase("workers");
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(a["schema_version"], kResultsSchemaVersion);
    EXPECT_EQ(a["sites"].size(), 2u);
    EXPECT_EQ(a["sites"][1]["accept"]["point"], 1.0);
    EXPECT_TRUE(a["audit"]["ok"].get<bool>());
    EXPECT_NEAR(a["bounds"]["cloning_bound"].get<double>(), 5.0 / 3.0, 1e-12);
}

TEST(experiment, spec_echo_round_trips_key_fields) {
    auto s = spec_of(kBase);
    auto j = spec_to_json(s);
    EXPECT_EQ(j["protocol"]["n"], 100);
    EXPECT_EQ(j["strategy"]["name"], "honest");
    EXPECT_EQ(j["strategy"]["branch"], 2);
}

TEST(experiment, sweep_csv) {
    auto tree = tree_of(kBase);
    std::string csv = sweep(tree, "quantum.loss_prob", {0.0, 0.5});
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("axis,value,site,accept", 0), 0u);
    while (std::getline(in, line)) {
        rows++;
    }
    EXPECT_EQ(rows, 4);
    EXPECT_THROW(sweep(tree, "protocol.colour", {1.0}), ArgumentError);
    EXPECT_THROW(sweep(tree, "protocol.n", {}), ArgumentError);
}

TEST(experiment, workers_from_environment) {
    setenv("RELQ_WORKERS", "3", 1);
    EXPECT_EQ(workers_from_env(1), 3);
    setenv("RELQ_WORKERS", "zero", 1);
    EXPECT_THROW(workers_from_env(1), ConfigError);
    unsetenv("RELQ_WORKERS");
    EXPECT_EQ(workers_from_env(2), 2);
}
