// Copyright 2026 The QOPS Authors
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

#ifndef QOPS_CLI_HPP
#define QOPS_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qops/bench.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/mutation.hpp"
#include "qops/noise.hpp"
#include "qops/qasm.hpp"
#include "qops/spec_store.hpp"
#include "qops/test_engine.hpp"

namespace qops::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": invalid JSON: " + e.what());
    }
}

// A noise model is a JSON file path or an inline JSON object. Combined
// {noise, mitigation} files are accepted as well.
inline NoiseModel load_noise(const std::string& arg) {
    nlohmann::json j;
    try {
        j = (!arg.empty() && arg.front() == '{') ? nlohmann::json::parse(arg) : read_json_file(arg);
        if (j.contains("noise")) j = j.at("noise");
        return noise_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid noise model: ") + e.what());
    }
}

// A mitigation is a method name or a JSON file path.
inline MitigationConfig load_mitigation(const std::string& arg) {
    if (!std::filesystem::is_regular_file(arg)) return MitigationConfig::parse(arg);
    nlohmann::json j = read_json_file(arg);
    try {
        if (j.contains("mitigation")) j = j.at("mitigation");
        return mitigation_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid mitigation config: ") + e.what());
    }
}

inline std::vector<GateKind> parse_pool(const std::string& s) {
    std::vector<GateKind> pool;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        const auto k = gate_kind_from_name(tok);
        if (!k) throw Error("unknown gate '" + tok + "' in pool");
        pool.push_back(*k);
    }
    if (pool.empty()) throw Error("gate pool is empty");
    return pool;
}

inline std::string pool_string(const std::vector<GateKind>& pool) {
    std::string s;
    for (GateKind k : pool) s += (s.empty() ? "" : ",") + std::string(gate_name(k));
    return s;
}

inline std::vector<std::size_t> parse_family_ids(const std::string& s, const std::vector<PauliFamily>& families) {
    if (s == "all") return all_family_ids(families);
    std::vector<std::size_t> ids;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw Error("invalid family id '" + tok + "'");
        ids.push_back(v);
    }
    return ids;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << text;
}

// Options shared by `test` and `bench`.
struct EstimationFlags {
    std::size_t budget = kDefaultBudget;
    double tau = kDefaultTau;
    std::string mode = "analytic";
    std::uint64_t seed = 42;
    std::uint64_t shots = kDefaultShots;
    std::string noise;
    std::string mitigation = "none";
    std::optional<double> se;
    std::size_t jobs = 1;

    void add_to(CLI::App* app) {
        app->add_option("--budget", budget, "tests per family")->capture_default_str();
        app->add_option("--tau", tau, "relative tolerance")->capture_default_str();
        app->add_option("--mode", mode, "analytic | shots | noisy")->capture_default_str();
        app->add_option("--seed", seed, "root seed")->capture_default_str();
        app->add_option("--shots", shots, "shots per family basis")->capture_default_str();
        app->add_option("--noise", noise, "noise model JSON file or inline object (noisy mode)");
        app->add_option("--mitigation", mitigation, "none | zne-linear | zne-cubic | zne-quartic | zne-richardson | cdr")
            ->capture_default_str();
        app->add_option("--se", se, "standard error added to thresholds in noisy mode");
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    }

    AssessConfig resolve() const {
        AssessConfig c;
        c.budget = budget;
        c.tau = tau;
        if (!(tau >= 0.0)) throw Error("--tau must be non-negative");
        if (budget == 0) throw Error("--budget must be positive");
        if (jobs == 0) throw Error("--jobs must be positive");
        c.jobs = jobs;
        c.estimation.mode = parse_mode(mode);
        c.estimation.seed = seed;
        c.estimation.shots = shots;
        if (c.estimation.mode != EstimationMode::Analytic && shots == 0) throw Error("--shots must be positive");
        if (c.estimation.mode == EstimationMode::Noisy) {
            if (!noise.empty()) c.estimation.noise = load_noise(noise);
            c.estimation.mitigation = load_mitigation(mitigation);
            c.estimation.mitigation.validate();
        } else if (!noise.empty() || mitigation != "none" || se) {
            throw Error("--noise, --mitigation and --se require --mode noisy");
        }
        if (se && !(*se >= 0.0)) throw Error("--se must be non-negative");
        return c;
    }
};

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"QOPS: quantum circuit testing with Pauli-string test cases", "qops"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::size_t part_n = 0;
    std::string part_out;
    auto* partition = app.add_subcommand("partition", "emit the commuting families for n qubits");
    partition->add_option("n", part_n, "number of qubits")->required();
    partition->add_option("-o,--output", part_out, "output file (default stdout)");

    std::string sg_qasm, sg_families = "all", sg_out;
    auto* specgen = app.add_subcommand("specgen", "record a compact program specification");
    specgen->add_option("qasm", sg_qasm, "reference circuit")->required();
    specgen->add_option("--families", sg_families, "all, or comma-separated family ids")->capture_default_str();
    specgen->add_option("-o,--output", sg_out, "output file (default stdout)");

    std::string t_qasm, t_spec, t_out;
    detail::EstimationFlags t_flags;
    auto* test = app.add_subcommand("test", "assess a circuit against a spec");
    test->add_option("qasm", t_qasm, "circuit under test")->required();
    test->add_option("--spec", t_spec, "spec JSON")->required();
    test->add_option("-o,--output", t_out, "report file (default stdout)");
    t_flags.add_to(test);

    std::string m_qasm, m_out, m_pool = detail::pool_string(default_gate_pool());
    auto* mutate = app.add_subcommand("mutate", "write every single-gate mutant");
    mutate->add_option("qasm", m_qasm, "base circuit")->required();
    mutate->add_option("-o,--output", m_out, "output directory")->required();
    mutate->add_option("--pool", m_pool, "comma-separated gate kinds")->capture_default_str();

    std::string b_dir, b_out, b_pool = detail::pool_string(default_gate_pool()), b_truth = "families", b_summary;
    std::size_t b_select = 0, b_se_runs = kDefaultSeRuns;
    detail::EstimationFlags b_flags;
    auto* bench = app.add_subcommand("bench", "mutation experiment over a directory of circuits");
    bench->add_option("--circuits", b_dir, "directory of .qasm base circuits")->required();
    bench->add_option("-o,--output", b_out, "results CSV (default stdout)");
    bench->add_option("--pool", b_pool, "comma-separated gate kinds")->capture_default_str();
    bench->add_option("--ground-truth", b_truth, "families | computational")->capture_default_str();
    bench->add_option("--select", b_select, "natural-break classes for representative selection (0 = off)");
    bench->add_option("--summary", b_summary, "metrics JSON file (default stderr)");
    bench->add_option("--se-runs", b_se_runs, "calibration runs when --se is absent")->capture_default_str();
    b_flags.add_to(bench);

    std::string c_qasm, c_noise, c_mitigation = "none", c_out;
    std::size_t c_runs = kDefaultSeRuns;
    std::uint64_t c_shots = kDefaultShots, c_seed = 42;
    auto* calibrate = app.add_subcommand("calibrate", "standard error of the mitigated estimator");
    calibrate->add_option("qasm", c_qasm, "non-faulty reference circuit")->required();
    calibrate->add_option("--noise", c_noise, "noise model JSON file or inline object")->required();
    calibrate->add_option("--mitigation", c_mitigation, "mitigation method")->capture_default_str();
    calibrate->add_option("--runs", c_runs, "repeated runs")->capture_default_str();
    calibrate->add_option("--shots", c_shots, "shots per run")->capture_default_str();
    calibrate->add_option("--seed", c_seed, "root seed")->capture_default_str();
    calibrate->add_option("-o,--output", c_out, "output file (default stdout)");

    try {
        std::vector<std::string> argv_store{"qops"};
        argv_store.insert(argv_store.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : argv_store) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "qops: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*partition) {
            const auto fams = partition_families(part_n);
            nlohmann::json j = families_to_json(part_n, fams);
            j["config"] = {{"command", "partition"}, {"n", part_n}};
            detail::emit(j.dump(2) + "\n", part_out, out);
            return kExitPass;
        }
        if (*specgen) {
            const Circuit ref = load_qasm(sg_qasm);
            const auto fams = partition_families(ref.num_qubits());
            const CompactSpec spec = generate_spec(ref, fams, detail::parse_family_ids(sg_families, fams));
            nlohmann::json j = spec_to_json(spec);
            j["config"] = {{"command", "specgen"}, {"qasm", sg_qasm}, {"families", sg_families}};
            detail::emit(j.dump(2) + "\n", sg_out, out);
            return kExitPass;
        }
        if (*test) {
            AssessConfig cfg = t_flags.resolve();
            const Circuit cut = load_qasm(t_qasm);
            const CompactSpec spec = load_spec(t_spec);
            if (cut.num_qubits() != spec.num_qubits) {
                throw Error("circuit has " + std::to_string(cut.num_qubits()) + " qubits but the spec describes " +
                            std::to_string(spec.num_qubits));
            }
            const auto fams = partition_families(spec.num_qubits);
            if (cfg.estimation.mode == EstimationMode::Noisy) {
                if (!t_flags.se) throw Error("noisy mode needs --se (see `qops calibrate`)");
                cfg.standard_error = *t_flags.se;
            }
            const AssessmentReport report = assess(cut, spec, fams, cfg);
            nlohmann::json j = report_to_json(report);
            j["config"]["command"] = "test";
            j["config"]["qasm"] = t_qasm;
            j["config"]["spec"] = t_spec;
            detail::emit(j.dump(2) + "\n", t_out, out);
            return report.failed == 0 ? kExitPass : kExitFailures;
        }
        if (*mutate) {
            const Circuit base = load_qasm(m_qasm);
            const auto pool = detail::parse_pool(m_pool);
            const auto mutants = generate_mutants(base, pool);
            std::filesystem::create_directories(m_out);
            nlohmann::json list = nlohmann::json::array();
            for (const auto& m : mutants) {
                const std::string file = m.circuit.name() + ".qasm";
                detail::emit(to_qasm(m.circuit), (std::filesystem::path(m_out) / file).string(), out);
                nlohmann::json jm{{"id", m.id}, {"operator", operator_name(m.op)}, {"position", m.position},
                                  {"file", file}};
                if (m.gate) jm["gate"] = gates_to_json({*m.gate})[0];
                list.push_back(jm);
            }
            const nlohmann::json manifest{
                {"config", {{"command", "mutate"}, {"qasm", m_qasm}, {"pool", detail::pool_string(pool)}}},
                {"base", base.name()},
                {"mutants", list}};
            detail::emit(manifest.dump(2) + "\n", (std::filesystem::path(m_out) / "manifest.json").string(), out);
            out << mutants.size() << " mutants written to " << m_out << "\n";
            return kExitPass;
        }
        if (*bench) {
            BenchConfig cfg;
            cfg.assess = b_flags.resolve();
            cfg.standard_error = b_flags.se;
            cfg.se_runs = b_se_runs;
            cfg.pool = detail::parse_pool(b_pool);
            cfg.ground_truth = parse_ground_truth_basis(b_truth);
            cfg.select_classes = b_select;
            const auto bases = load_circuit_dir(b_dir);
            const BenchResult result = run_bench(bases, cfg);
            std::ostringstream csv;
            write_bench_csv(csv, cfg, result);
            detail::emit(csv.str(), b_out, out);
            const std::string summary = bench_summary_to_json(cfg, result).dump(2) + "\n";
            if (b_summary.empty()) err << summary;
            else detail::emit(summary, b_summary, out);
            return kExitPass;
        }
        if (*calibrate) {
            const Circuit ref = load_qasm(c_qasm);
            const NoiseModel noise = detail::load_noise(c_noise);
            const MitigationConfig mit = detail::load_mitigation(c_mitigation);
            mit.validate();
            if (c_shots == 0) throw Error("--shots must be positive");
            const auto fams = partition_families(ref.num_qubits());
            std::vector<const PauliFamily*> ptrs;
            for (const auto& f : fams) ptrs.push_back(&f);
            const double se = calibrate_circuit_se(ref, ptrs, noise, mit, c_runs, c_shots, c_seed);
            const nlohmann::json j{{"config",
                                    {{"command", "calibrate"},
                                     {"qasm", c_qasm},
                                     {"noise", noise_to_json(noise)},
                                     {"mitigation", mitigation_to_json(mit)},
                                     {"runs", c_runs},
                                     {"shots", c_shots},
                                     {"seed", c_seed}}},
                                   {"standard_error", se}};
            detail::emit(j.dump(2) + "\n", c_out, out);
            return kExitPass;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "qops: " << msg << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace qops::cli

#endif  // QOPS_CLI_HPP
