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

#ifndef QOPS_BENCH_HPP
#define QOPS_BENCH_HPP

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/mutation.hpp"
#include "qops/qasm.hpp"
#include "qops/spec_store.hpp"
#include "qops/test_engine.hpp"

namespace qops {

inline constexpr std::size_t kDefaultSeRuns = 10;
inline constexpr std::size_t kDefaultSelectClasses = 10;

struct BenchConfig {
    AssessConfig assess;
    std::optional<double> standard_error;  // noisy mode: calibrated on each base circuit when absent
    std::size_t se_runs = kDefaultSeRuns;
    std::vector<GateKind> pool = default_gate_pool();
    GroundTruthBasis ground_truth = GroundTruthBasis::FamilyBases;
    std::size_t select_classes = 0;  // 0 disables representative selection
};

struct BenchRow {
    std::string circuit;
    std::size_t mutant_id = 0;
    MutationOperator op = MutationOperator::Add;
    double hellinger = 0.0;
    Label ground_truth = Label::Equivalent;
    bool predicted_faulty = false;
    std::size_t failed_tests = 0;
    std::size_t families_used = 0;
};

struct BenchSelection {
    std::string circuit;
    JenksResult jenks;
    std::vector<std::size_t> mutant_ids;  // faulty mutants the values belong to, in order
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::map<std::string, double> standard_errors;  // per base circuit, noisy mode only
    std::vector<BenchSelection> selections;
    MetricsSummary faulty_positive;
    MetricsSummary equivalent_positive;
};

/// Runs the mutation experiment for one base circuit and appends its rows.
inline void bench_circuit(const Circuit& base, const BenchConfig& cfg, BenchResult& result) {
    const auto families = partition_families(base.num_qubits());
    const CompactSpec spec = generate_spec(base, families, all_family_ids(families));
    AssessConfig acfg = cfg.assess;
    if (acfg.estimation.mode == EstimationMode::Noisy) {
        if (cfg.standard_error) {
            acfg.standard_error = *cfg.standard_error;
        } else {
            std::vector<const PauliFamily*> ptrs;
            for (const auto& f : families) ptrs.push_back(&f);
            acfg.standard_error =
                calibrate_circuit_se(base, ptrs, acfg.estimation.noise, acfg.estimation.mitigation, cfg.se_runs,
                                     acfg.estimation.shots, acfg.estimation.seed);
        }
        result.standard_errors[base.name()] = acfg.standard_error;
    }
    const PreparedAssessment prepared(spec, families, acfg);
    const auto mutants = generate_mutants(base, cfg.pool);
    const auto labels = label_mutants(base, mutants, cfg.ground_truth);

    std::vector<PreparedAssessment::Summary> summaries(mutants.size());
    parallel_for(mutants.size(), acfg.jobs,
                 [&](std::size_t i) { summaries[i] = prepared.summarize(mutants[i].circuit); });

    std::vector<double> faulty_values;
    std::vector<std::size_t> faulty_ids;
    for (std::size_t i = 0; i < mutants.size(); ++i) {
        result.rows.push_back({base.name(), mutants[i].id, mutants[i].op, labels[i].hellinger, labels[i].label,
                               summaries[i].failed > 0, summaries[i].failed, prepared.plans().size()});
        if (labels[i].label == Label::Faulty) {
            faulty_values.push_back(labels[i].hellinger);
            faulty_ids.push_back(mutants[i].id);
        }
    }
    if (cfg.select_classes > 0 && !faulty_values.empty()) {
        result.selections.push_back({base.name(), jenks_select(faulty_values, cfg.select_classes), faulty_ids});
    }
}

inline BenchResult run_bench(const std::vector<Circuit>& bases, const BenchConfig& cfg) {
    BenchResult result;
    for (const auto& b : bases) bench_circuit(b, cfg, result);
    std::vector<ScoredVerdict> scored;
    for (const auto& r : result.rows) scored.push_back({r.predicted_faulty, r.ground_truth == Label::Faulty});
    result.faulty_positive = score(scored, Label::Faulty);
    result.equivalent_positive = score(scored, Label::Equivalent);
    return result;
}

/// Every *.qasm file directly under `dir`, in filename order.
inline std::vector<Circuit> load_circuit_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("circuit directory not found: " + dir);
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".qasm") paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw Error("no .qasm files in " + dir);
    std::vector<Circuit> out;
    for (const auto& p : paths) out.push_back(load_qasm(p.string()));
    return out;
}

/// Config echo; `jobs` is left out because it never changes results.
inline nlohmann::json bench_config_to_json(const BenchConfig& cfg) {
    nlohmann::json j = assess_config_to_json(cfg.assess);
    j.erase("standard_error");
    if (cfg.assess.estimation.mode == EstimationMode::Noisy) {
        if (cfg.standard_error) j["standard_error"] = *cfg.standard_error;
        else j["se_runs"] = cfg.se_runs;
    }
    nlohmann::json pool = nlohmann::json::array();
    for (GateKind k : cfg.pool) pool.push_back(std::string(gate_name(k)));
    j["pool"] = pool;
    j["ground_truth"] = ground_truth_basis_name(cfg.ground_truth);
    if (cfg.select_classes) j["select_classes"] = cfg.select_classes;
    return j;
}

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_bench_csv(std::ostream& out, const BenchConfig& cfg, const BenchResult& r) {
    out << "# config: " << bench_config_to_json(cfg).dump() << '\n';
    out << "circuit,mutant_id,operator,hellinger,ground_truth,predicted,failed_tests,families_used\n";
    for (const auto& row : r.rows) {
        out << row.circuit << ',' << row.mutant_id << ',' << operator_name(row.op) << ',' << format_real(row.hellinger)
            << ',' << label_name(row.ground_truth) << ',' << (row.predicted_faulty ? "faulty" : "equivalent") << ','
            << row.failed_tests << ',' << row.families_used << '\n';
    }
}

inline nlohmann::json metrics_to_json(const MetricsSummary& m) {
    return {{"tp", m.tp},         {"fp", m.fp},         {"fn", m.fn}, {"tn", m.tn},
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json bench_summary_to_json(const BenchConfig& cfg, const BenchResult& r) {
    nlohmann::json sel = nlohmann::json::array();
    for (const auto& s : r.selections) {
        nlohmann::json reps = nlohmann::json::array();
        for (std::size_t c = 0; c < s.jenks.classes; ++c) {
            const std::size_t idx = s.jenks.representatives[c];
            reps.push_back({{"class", c}, {"upper_break", s.jenks.breaks[c]}, {"mutant_id", s.mutant_ids[idx]}});
        }
        sel.push_back({{"circuit", s.circuit}, {"classes", s.jenks.classes}, {"representatives", reps}});
    }
    nlohmann::json j{{"config", bench_config_to_json(cfg)},
                     {"mutants", r.rows.size()},
                     {"faulty_positive", metrics_to_json(r.faulty_positive)},
                     {"equivalent_positive", metrics_to_json(r.equivalent_positive)},
                     {"selections", sel}};
    if (!r.standard_errors.empty()) j["standard_errors"] = r.standard_errors;
    return j;
}

}  // namespace qops

#endif  // QOPS_BENCH_HPP
