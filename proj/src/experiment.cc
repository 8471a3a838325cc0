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

#include <boost/property_tree/ini_parser.hpp>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "relq/errors.h"

namespace relq {

using boost::property_tree::ptree;
using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>> &fixed_sections() {
    static const std::map<std::string, std::set<std::string>> sections = {
        {"experiment", {"seed", "trials", "confidence", "workers", "output", "transcript"}},
        {"protocol",
         {"d", "n", "epsilon", "mode", "m", "threshold", "allowed_loss", "storage_lifetime", "multi_site_bound",
          "bob_probe"}},
        {"quantum", {"kind", "speed", "latency", "loss_prob", "depolarize_prob"}},
        {"classical", {"kind", "speed", "latency", "loss_prob", "depolarize_prob"}},
        {"bob", {"kind", "speed", "latency", "loss_prob", "depolarize_prob"}},
        {"geometry", {"units", "spatial_dim", "tolerance", "p"}},
        {"strategy", {"name", "branch", "fraction", "dummies", "k", "op", "pattern"}},
    };
    return sections;
}

const std::set<std::string> kBranchKeys = {"p_prime", "q"};

/// Returns the branch number for a section named branchN, or 0.
int branch_section(const std::string &name) {
    if (name.rfind("branch", 0) != 0 || name.size() == 6) {
        return 0;
    }
    int n = 0;
    for (std::size_t i = 6; i < name.size(); i++) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
            return 0;
        }
        n = n * 10 + (name[i] - '0');
        if (n > 1000) {
            return 0;
        }
    }
    return n;
}

template <typename T>
T get_value(const ptree &tree, const std::string &path, T fallback) {
    auto node = tree.get_child_optional(ptree::path_type(path, '.'));
    if (!node) {
        return fallback;
    }
    std::string raw = node->get_value<std::string>();
    auto v = node->get_value_optional<T>();
    if (!v) {
        throw ConfigError(path + ": cannot parse '" + raw + "'");
    }
    return *v;
}

bool get_bool(const ptree &tree, const std::string &path, bool fallback) {
    std::string raw = get_value<std::string>(tree, path, fallback ? "true" : "false");
    if (raw == "true" || raw == "1" || raw == "yes") {
        return true;
    }
    if (raw == "false" || raw == "0" || raw == "no") {
        return false;
    }
    throw ConfigError(path + ": expected a boolean, got '" + raw + "'");
}

std::vector<double> parse_numbers(const std::string &path, const std::string &raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::exception &) {
            throw ConfigError(path + ": cannot parse '" + item + "' as a number");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
            used++;
        }
        if (used != item.size()) {
            throw ConfigError(path + ": cannot parse '" + item + "' as a number");
        }
    }
    return out;
}

Event parse_event(const ptree &tree, const std::string &path, bool si) {
    auto raw = tree.get_optional<std::string>(ptree::path_type(path, '.'));
    if (!raw) {
        throw ConfigError(path + ": missing");
    }
    auto v = parse_numbers(path, *raw);
    double scale = si ? 1.0 / kSpeedOfLight : 1.0;
    if (v.size() == 2) {
        return Event::at(v[0], v[1] * scale);
    }
    if (v.size() == 4) {
        return Event::at(v[0], v[1] * scale, v[2] * scale, v[3] * scale);
    }
    throw ConfigError(path + ": expected 't, x' or 't, x, y, z'");
}

ChannelSpec parse_channel(const ptree &tree, const std::string &section, ChannelSpec spec) {
    auto kind = tree.get_optional<std::string>(ptree::path_type(section + ".kind", '.'));
    if (kind) {
        try {
            spec.kind = parse_channel_kind(*kind);
        } catch (const ArgumentError &e) {
            throw ConfigError(section + ".kind: " + e.what());
        }
    }
    spec.speed = get_value<double>(tree, section + ".speed", spec.speed);
    spec.latency = get_value<double>(tree, section + ".latency", spec.latency);
    spec.loss.loss_prob = get_value<double>(tree, section + ".loss_prob", spec.loss.loss_prob);
    spec.loss.depolarize_prob = get_value<double>(tree, section + ".depolarize_prob", spec.loss.depolarize_prob);
    try {
        spec.validate();
    } catch (const ArgumentError &e) {
        throw ConfigError(section + ": " + e.what());
    }
    return spec;
}

void check_schema(const ptree &tree) {
    for (const auto &[section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(section + ": key outside of any section");
        }
        const std::set<std::string> *keys = nullptr;
        auto it = fixed_sections().find(section);
        if (it != fixed_sections().end()) {
            keys = &it->second;
        } else if (branch_section(section) > 0) {
            keys = &kBranchKeys;
        } else {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto &[key, value] : body) {
            if (!keys->count(key)) {
                throw ConfigError(section + "." + key + ": unknown key");
            }
        }
    }
}

GeometryConfig parse_geometry(const ptree &tree) {
    if (!tree.get_child_optional("geometry")) {
        for (const auto &[section, body] : tree) {
            if (branch_section(section) > 0) {
                throw ConfigError("branch sections need a [geometry] section");
            }
        }
        return GeometryConfig::canonical();
    }
    std::string units = get_value<std::string>(tree, "geometry.units", "natural");
    if (units != "natural" && units != "si") {
        throw ConfigError("geometry.units: expected 'natural' or 'si'");
    }
    bool si = units == "si";
    GeometryConfig g;
    g.tolerance = get_value<double>(tree, "geometry.tolerance", g.tolerance);
    if (!(g.tolerance > 0.0)) {
        throw ConfigError("geometry.tolerance: must be positive");
    }
    g.p = parse_event(tree, "geometry.p", si);
    g.spatial_dim = get_value<int>(tree, "geometry.spatial_dim", g.p.spatial_dim);
    if (g.spatial_dim != 1 && g.spatial_dim != 3) {
        throw ConfigError("geometry.spatial_dim: must be 1 or 3");
    }
    std::map<int, Branch> branches;
    for (const auto &[section, body] : tree) {
        int b = branch_section(section);
        if (b > 0) {
            branches[b] = {parse_event(tree, section + ".p_prime", si), parse_event(tree, section + ".q", si)};
        }
    }
    int expected = 1;
    for (const auto &[index, branch] : branches) {
        if (index != expected++) {
            throw ConfigError("branch sections must be numbered 1, 2, ... without gaps");
        }
        g.branches.push_back(branch);
    }
    return g;
}

json estimate_json(const McEstimate &e) {
    return {{"trials", e.trials},     {"successes", e.successes}, {"point", e.point},
            {"ci_low", e.ci_low},     {"ci_high", e.ci_high},     {"confidence", e.confidence}};
}

json mean_json(const MeanAccumulator &m) {
    return {{"count", m.count}, {"mean", m.mean}, {"stderr", m.standard_error()}};
}

json channel_json(const ChannelSpec &c) {
    return {{"kind", to_string(c.kind)},
            {"speed", c.speed},
            {"latency", c.latency},
            {"loss_prob", c.loss.loss_prob},
            {"depolarize_prob", c.loss.depolarize_prob}};
}

json event_json(const Event &e) {
    json x = json::array();
    for (int i = 0; i < e.spatial_dim; i++) {
        x.push_back(e.x[i]);
    }
    return {{"t", e.t}, {"x", x}};
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

ptree read_spec_tree(std::istream &in) {
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

ptree read_spec_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open spec '" + path + "'");
    }
    try {
        return read_spec_tree(in);
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ExperimentSpec parse_spec(const ptree &tree) {
    check_schema(tree);
    ExperimentSpec spec;
    if (!tree.get_child_optional("experiment.seed")) {
        throw ConfigError("experiment.seed: missing (seeds are mandatory)");
    }
    auto &p = spec.protocol;
    p.seed = get_value<std::uint64_t>(tree, "experiment.seed", 0);
    long long trials = get_value<long long>(tree, "experiment.trials", 1000);
    if (trials < 1) {
        throw ConfigError("experiment.trials: must be at least 1");
    }
    spec.trials = static_cast<std::uint64_t>(trials);
    spec.confidence = get_value<double>(tree, "experiment.confidence", spec.confidence);
    if (!(spec.confidence > 0.0 && spec.confidence < 1.0)) {
        throw ConfigError("experiment.confidence: must lie in (0, 1)");
    }
    spec.workers = get_value<int>(tree, "experiment.workers", 1);
    if (spec.workers < 1) {
        throw ConfigError("experiment.workers: must be at least 1");
    }
    spec.output = get_value<std::string>(tree, "experiment.output", "");
    spec.transcript = get_value<std::string>(tree, "experiment.transcript", "");

    p.d = get_value<int>(tree, "protocol.d", p.d);
    p.m = get_value<int>(tree, "protocol.m", p.m);
    try {
        p.mode = parse_verify_mode(get_value<std::string>(tree, "protocol.mode", "direct"));
    } catch (const ArgumentError &e) {
        throw ConfigError(std::string("protocol.mode: ") + e.what());
    }
    try {
        p.threshold = parse_threshold_convention(get_value<std::string>(tree, "protocol.threshold", "methods"));
    } catch (const ArgumentError &e) {
        throw ConfigError(std::string("protocol.threshold: ") + e.what());
    }
    int default_n = p.mode == VerifyMode::B3 && p.m > 0 ? p.m * p.d * p.d : 1;
    p.n = get_value<int>(tree, "protocol.n", default_n);
    p.epsilon = get_value<double>(tree, "protocol.epsilon", p.epsilon);
    p.allowed_loss = get_value<double>(tree, "protocol.allowed_loss", p.allowed_loss);
    p.storage_lifetime = get_value<double>(tree, "protocol.storage_lifetime", p.storage_lifetime);
    if (tree.get_child_optional("protocol.multi_site_bound")) {
        p.multi_site_bound = get_value<double>(tree, "protocol.multi_site_bound", 0.0);
    }
    p.bob_probe = get_bool(tree, "protocol.bob_probe", false);
    p.alice_quantum = parse_channel(tree, "quantum", p.alice_quantum);
    p.alice_classical = parse_channel(tree, "classical", p.alice_classical);
    p.bob_transport = parse_channel(tree, "bob", p.bob_transport);
    p.geometry = parse_geometry(tree);

    auto &s = spec.strategy;
    s.name = get_value<std::string>(tree, "strategy.name", s.name);
    s.branch = get_value<int>(tree, "strategy.branch", 1) - 1;
    s.fraction = get_value<double>(tree, "strategy.fraction", s.fraction);
    s.dummies = get_bool(tree, "strategy.dummies", s.dummies);
    s.k = get_value<int>(tree, "strategy.k", s.k);
    try {
        s.op = parse_collective_op(get_value<std::string>(tree, "strategy.op", "cloner"));
    } catch (const ArgumentError &e) {
        throw ConfigError(std::string("strategy.op: ") + e.what());
    }
    if (auto raw = tree.get_optional<std::string>("strategy.pattern")) {
        for (double v : parse_numbers("strategy.pattern", *raw)) {
            if (v != 0.0 && v != 1.0) {
                throw ConfigError("strategy.pattern: entries must be 0 or 1");
            }
            s.pattern.push_back(v == 1.0);
        }
    }

    p.validate();
    try {
        make_strategy(s, p.branches());
    } catch (const ArgumentError &e) {
        throw ConfigError(std::string("strategy: ") + e.what());
    } catch (const UnsupportedStrategyError &e) {
        throw ConfigError(std::string("strategy: ") + e.what());
    }
    if (s.name == "postselect" && !s.pattern.empty() && static_cast<int>(s.pattern.size()) != 2 * (s.k - 1)) {
        throw ConfigError("strategy.pattern: needs two entries per decoy (2(k-1))");
    }
    return spec;
}

int workers_from_env(int fallback) {
    const char *env = std::getenv("RELQ_WORKERS");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    char *end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
        throw ConfigError("RELQ_WORKERS must be a positive integer");
    }
    return static_cast<int>(v);
}

json spec_to_json(const ExperimentSpec &spec) {
    const auto &p = spec.protocol;
    json branches = json::array();
    for (const auto &b : p.geometry.branches) {
        branches.push_back({{"p_prime", event_json(b.p_prime)}, {"q", event_json(b.q)}});
    }
    json pattern = json::array();
    for (bool b : spec.strategy.pattern) {
        pattern.push_back(b ? 1 : 0);
    }
    return {
        {"experiment",
         {{"seed", p.seed}, {"trials", spec.trials}, {"confidence", spec.confidence}, {"workers", spec.workers}}},
        {"protocol",
         {{"d", p.d},
          {"n", p.n},
          {"epsilon", p.epsilon},
          {"mode", to_string(p.mode)},
          {"m", p.m},
          {"threshold", to_string(p.threshold)},
          {"allowed_loss", p.allowed_loss},
          {"storage_lifetime", finite_or_null(p.storage_lifetime)},
          {"bound_constant", p.bound_constant()},
          {"bob_probe", p.bob_probe}}},
        {"quantum", channel_json(p.alice_quantum)},
        {"classical", channel_json(p.alice_classical)},
        {"bob", channel_json(p.bob_transport)},
        {"geometry",
         {{"units", "natural"},
          {"spatial_dim", p.geometry.spatial_dim},
          {"tolerance", p.geometry.tolerance},
          {"p", event_json(p.geometry.p)},
          {"branches", branches}}},
        {"strategy",
         {{"name", spec.strategy.name},
          {"branch", spec.strategy.branch + 1},
          {"fraction", spec.strategy.fraction},
          {"dummies", spec.strategy.dummies},
          {"k", spec.strategy.k},
          {"op", to_string(spec.strategy.op)},
          {"pattern", pattern}}},
    };
}

ExperimentOutcome run_experiment(const ExperimentSpec &spec, bool keep_transcript) {
    auto start = std::chrono::steady_clock::now();
    SimulationOptions options;
    options.trials = spec.trials;
    options.workers = spec.workers;
    options.confidence = spec.confidence;
    options.keep_first_transcript = keep_transcript;
    SimulationSummary summary = simulate(spec.protocol, spec.strategy, options);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto &p = spec.protocol;
    json sites = json::array();
    for (std::size_t j = 0; j < summary.sites.size(); j++) {
        const auto &s = summary.sites[j];
        sites.push_back({{"site", j + 1},
                         {"accept", estimate_json(s.accept)},
                         {"inconclusive", estimate_json(s.inconclusive_rate)},
                         {"pass_rate", estimate_json(s.pass_rate)},
                         {"passes", s.passes},
                         {"considered", s.considered},
                         {"matched", s.matched}});
    }
    json audit_doc = {{"ok", summary.audit.ok()},
                      {"causality_violations", summary.audit.causality_violations},
                      {"linearity_violations", summary.audit.linearity_violations},
                      {"taint_violations", summary.audit.taint_violations},
                      {"details", summary.audit.details}};
    json results = {
        {"schema_version", kResultsSchemaVersion},
        {"spec", spec_to_json(spec)},
        {"seed", p.seed},
        {"trials", spec.trials},
        {"sites", sites},
        {"sums", {{"pass_rate_sum", mean_json(summary.pass_sum)}, {"accept_sum", mean_json(summary.accept_sum)}}},
        {"bounds",
         {{"cloning_bound", 1.0 + p.bound_constant()},
          {"azuma", azuma_tail(p.n, p.epsilon, 1.0 + p.bound_constant())},
          {"loss_tolerance", loss_tolerance(p.d)},
          {"threshold", acceptance_threshold(p, static_cast<std::uint32_t>(p.n))}}},
        {"audit", audit_doc},
        {"metrics",
         {{"aborted_runs", summary.aborted},
          {"token_returnable_runs", summary.token_returnable},
          {"max_delay", finite_or_null(summary.max_delay)},
          {"min_reveal_separation", finite_or_null(summary.min_reveal_separation)}}},
        {"wall_time_seconds", wall},
    };
    return {std::move(results), std::move(summary)};
}

std::vector<std::string> sweep_axes() {
    return {"protocol.d",        "protocol.n",          "protocol.epsilon",        "protocol.m",
            "protocol.allowed_loss", "protocol.storage_lifetime", "protocol.multi_site_bound",
            "quantum.speed",     "quantum.latency",     "quantum.loss_prob",       "quantum.depolarize_prob",
            "classical.speed",   "classical.latency",   "bob.speed",               "bob.latency",
            "bob.loss_prob",     "bob.depolarize_prob", "strategy.fraction",       "strategy.k",
            "experiment.trials", "experiment.seed"};
}

std::string sweep(const ptree &tree, const std::string &axis, const std::vector<double> &values, int workers_override) {
    auto axes = sweep_axes();
    if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
        throw ArgumentError("unknown sweep axis '" + axis + "'");
    }
    if (values.empty()) {
        throw ArgumentError("sweep needs at least one value");
    }
    std::ostringstream csv;
    csv << "axis,value,site,accept,accept_low,accept_high,inconclusive,pass_rate,pass_low,pass_high,"
           "pass_rate_sum,pass_rate_sum_stderr\n";
    csv.precision(10);
    for (double v : values) {
        ptree t = tree;
        std::ostringstream text;
        text.precision(17);
        if (v == std::floor(v) && std::abs(v) < 1e15) {
            text << static_cast<long long>(v);
        } else {
            text << v;
        }
        t.put(ptree::path_type(axis, '.'), text.str());
        ExperimentSpec spec = parse_spec(t);
        if (workers_override > 0) {
            spec.workers = workers_override;
        }
        ExperimentOutcome out = run_experiment(spec);
        for (std::size_t j = 0; j < out.summary.sites.size(); j++) {
            const auto &s = out.summary.sites[j];
            csv << axis << "," << text.str() << "," << j + 1 << "," << s.accept.point << "," << s.accept.ci_low << ","
                << s.accept.ci_high << "," << s.inconclusive_rate.point << "," << s.pass_rate.point << ","
                << s.pass_rate.ci_low << "," << s.pass_rate.ci_high << "," << out.summary.pass_sum.mean << ","
                << out.summary.pass_sum.standard_error() << "\n";
        }
    }
    return csv.str();
}

}  // namespace relq
