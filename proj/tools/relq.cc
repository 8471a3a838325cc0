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

#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relq/errors.h"
#include "relq/experiment.h"
#include "relq/transcript.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitAudit = 4;

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

std::vector<double> parse_values(const std::string &raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
        } catch (const std::exception &) {
            throw relq::ArgumentError("--values: cannot parse '" + item + "'");
        }
    }
    return out;
}

void print_audit(const relq::AuditReport &a) {
    std::cerr << "causality violations: " << a.causality_violations << "\n"
              << "linearity violations: " << a.linearity_violations << "\n"
              << "taint violations: " << a.taint_violations << "\n";
    for (const auto &d : a.details) {
        std::cerr << "  " << d << "\n";
    }
}

int cmd_run(const std::string &spec_path, const std::string &output, const std::string &transcript, int workers) {
    relq::ExperimentSpec spec = relq::parse_spec(relq::read_spec_file(spec_path));
    spec.workers = workers > 0 ? workers : relq::workers_from_env(spec.workers);
    std::string out_path = output.empty() ? spec.output : output;
    std::string tr_path = transcript.empty() ? spec.transcript : transcript;
    relq::ExperimentOutcome out = relq::run_experiment(spec, !tr_path.empty());
    write_text(out_path, out.results.dump(2) + "\n");
    if (!tr_path.empty() && out.summary.first_transcript) {
        std::ofstream t(tr_path);
        if (!t) {
            throw std::runtime_error("cannot write '" + tr_path + "'");
        }
        out.summary.first_transcript->write_jsonl(t);
    }
    if (!out.summary.audit.ok()) {
        print_audit(out.summary.audit);
        return kExitAudit;
    }
    return kExitOk;
}

int cmd_sweep(const std::string &spec_path, const std::string &axis, const std::string &values,
              const std::string &output, int workers) {
    auto tree = relq::read_spec_file(spec_path);
    relq::parse_spec(tree);
    int w = workers > 0 ? workers : relq::workers_from_env(0);
    write_text(output, relq::sweep(tree, axis, parse_values(values), w));
    return kExitOk;
}

int cmd_validate(const std::string &spec_path) {
    relq::ExperimentSpec spec = relq::parse_spec(relq::read_spec_file(spec_path));
    std::cout << "ok: " << spec.protocol.branches() << " branches, d=" << spec.protocol.d
              << ", N=" << spec.protocol.n << ", mode " << relq::to_string(spec.protocol.mode) << ", strategy "
              << spec.strategy.name << "\n";
    return kExitOk;
}

int cmd_audit(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw relq::ConfigError("cannot open transcript '" + path + "'");
    }
    relq::Transcript t = relq::Transcript::read_jsonl(in);
    relq::AuditReport report = relq::audit(t);
    if (!report.ok()) {
        print_audit(report);
        return kExitAudit;
    }
    std::cout << "audit ok: " << t.messages().size() << " messages, " << t.lifecycle().size()
              << " lifecycle records\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"relq: simulator for relativistic transmission and verification of unknown qudits"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string output;
    std::string transcript;
    std::string axis;
    std::string values;
    std::string audit_path;
    int workers = 0;

    auto *run = app.add_subcommand("run", "Run a Monte Carlo experiment and write a results document");
    run->add_option("spec", spec_path, "Experiment spec (INI)")->required();
    run->add_option("-o,--output", output, "Results path (default: spec value, else stdout)");
    run->add_option("--transcript", transcript, "Write the transcript of run 0 as JSON lines");
    run->add_option("-j,--workers", workers, "Worker threads (overrides RELQ_WORKERS and the spec)");

    auto *sw = app.add_subcommand("sweep", "Rerun a spec over values of one parameter and write CSV");
    sw->add_option("spec", spec_path, "Experiment spec (INI)")->required();
    sw->add_option("--axis", axis, "Parameter as section.key")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();
    sw->add_option("-o,--output", output, "CSV path (default stdout)");
    sw->add_option("-j,--workers", workers, "Worker threads");

    auto *val = app.add_subcommand("validate", "Check a spec and its geometry without running it");
    val->add_option("spec", spec_path, "Experiment spec (INI)")->required();

    auto *aud = app.add_subcommand("audit", "Audit a transcript for causality and linearity violations");
    aud->add_option("transcript", audit_path, "Transcript (JSON lines)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(spec_path, output, transcript, workers);
        }
        if (*sw) {
            return cmd_sweep(spec_path, axis, values, output, workers);
        }
        if (*val) {
            return cmd_validate(spec_path);
        }
        return cmd_audit(audit_path);
    } catch (const relq::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const relq::ArgumentError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
