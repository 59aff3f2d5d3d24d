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

#ifndef QOPS_TEST_ENGINE_HPP
#define QOPS_TEST_ENGINE_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/noise.hpp"
#include "qops/random.hpp"
#include "qops/spec_store.hpp"
#include "qops/statevector.hpp"
#include "qops/test_case.hpp"

namespace qops {

enum class EstimationMode { Analytic, Shots, Noisy };

inline std::string mode_name(EstimationMode m) {
    switch (m) {
        case EstimationMode::Analytic: return "analytic";
        case EstimationMode::Shots: return "shots";
        case EstimationMode::Noisy: return "noisy";
    }
    return "?";
}

inline EstimationMode parse_mode(const std::string& s) {
    if (s == "analytic") return EstimationMode::Analytic;
    if (s == "shots") return EstimationMode::Shots;
    if (s == "noisy") return EstimationMode::Noisy;
    throw Error("unknown estimation mode '" + s + "'");
}

inline constexpr std::uint64_t kDefaultShots = 10000;

/// How observed expectations are obtained from the circuit under test.
struct Estimation {
    EstimationMode mode = EstimationMode::Analytic;
    std::uint64_t shots = kDefaultShots;
    std::uint64_t seed = 42;
    NoiseModel noise;
    MitigationConfig mitigation;
};

/// Observed <T> on the circuit under test.
///
/// Analytic mode evaluates sum_i c_i <psi|P_i|psi> from amplitudes. Shot mode
/// measures once in the family basis and evaluates every term from those
/// counts. Noisy mode runs the trajectory simulator with the configured mitigation.
inline double observed_expectation(const Circuit& cut, const TestCase& test, const PauliFamily& family,
                                   const Estimation& est) {
    check_test_family(test, family);
    if (cut.num_qubits() != family.num_qubits) throw Error("observed_expectation: circuit and family widths differ");
    switch (est.mode) {
        case EstimationMode::Analytic: {
            const StateVector state = simulate(cut);
            double s = 0.0;
            for (const auto& t : test.terms) s += t.weight * expectation(state, t.pauli);
            return s;
        }
        case EstimationMode::Shots: {
            if (est.shots == 0) throw Error("shots must be at least 1");
            Rng rng(est.seed);
            const auto counts = sample_histogram(measure_probabilities(simulate(cut), family.diagonalizer), est.shots, rng);
            return combine(test, member_expectations(family, frequencies(counts)));
        }
        case EstimationMode::Noisy:
            return MitigatedEstimate(cut, family, est.noise, est.mitigation, est.shots, est.seed).evaluate(test);
    }
    return 0.0;
}

struct Verdict {
    TestCase test;
    double expected = 0.0;
    double observed = 0.0;
    double threshold = 0.0;
    bool passed = true;
};

struct FamilyVerdicts {
    std::size_t family_id = 0;
    std::vector<Verdict> verdicts;

    std::size_t failed() const {
        std::size_t k = 0;
        for (const auto& v : verdicts) k += !v.passed;
        return k;
    }
};

inline constexpr std::size_t kDefaultBudget = 1000;
inline constexpr double kDefaultTau = 0.01;

struct AssessConfig {
    std::size_t budget = kDefaultBudget;
    double tau = kDefaultTau;
    Estimation estimation;
    double standard_error = 0.0;  // added to the threshold in noisy mode
    std::size_t jobs = 1;          // worker threads; does not affect results
};

struct AssessmentReport {
    std::string circuit_name;
    AssessConfig config;
    std::vector<FamilyVerdicts> families;
    std::size_t generated = 0;
    std::size_t failed = 0;

    std::vector<std::size_t> failing_families() const {
        std::vector<std::size_t> ids;
        for (const auto& f : families) {
            if (f.failed()) ids.push_back(f.family_id);
        }
        return ids;
    }
};

/// Runs `fn(i)` for i in [0, count) on up to `jobs` threads. Exceptions are rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < std::min(jobs, count); ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

/// Verdict threshold for a test: tau * sum|c_i|, plus the calibrated standard error in noisy mode.
inline double verdict_threshold(const TestCase& test, const AssessConfig& cfg) {
    const double base = cfg.tau * test.scale();
    return cfg.estimation.mode == EstimationMode::Noisy ? base + cfg.standard_error : base;
}

/// Tests and oracle values for one spec, generated once and replayable against many circuits.
///
/// Family f draws its tests from the substream derive_seed(seed, f.id), so
/// results do not depend on `jobs` or on the order families are processed.
class PreparedAssessment {
  public:
    struct FamilyPlan {
        const PauliFamily* family;
        std::vector<TestCase> tests;
        std::vector<double> expected;   // oracle per test
        std::vector<double> threshold;  // per test
    };

    PreparedAssessment(const CompactSpec& spec, const std::vector<PauliFamily>& families, const AssessConfig& cfg)
        : num_qubits_(spec.num_qubits), cfg_(cfg) {
        if (cfg.tau < 0.0) throw Error("tau must be non-negative");
        if (cfg.estimation.mode == EstimationMode::Noisy) {
            cfg.estimation.noise.validate();
            cfg.estimation.mitigation.validate();
        }
        const auto applicable = applicable_families(spec, families);
        if (applicable.empty()) throw SpecError("spec has no applicable families");
        for (const auto& a : applicable) {
            FamilyPlan plan{a.family, generate_tests(*a.family, cfg.budget, derive_seed(cfg.estimation.seed, a.family->id)),
                            {}, {}};
            const auto member_values = member_expectations(*a.family, a.distribution.dense());
            for (const auto& t : plan.tests) {
                plan.expected.push_back(combine(t, member_values));
                plan.threshold.push_back(verdict_threshold(t, cfg));
            }
            plans_.push_back(std::move(plan));
        }
    }

    const std::vector<FamilyPlan>& plans() const { return plans_; }
    const AssessConfig& config() const { return cfg_; }

    /// Observed value of every test of plan `k` on `cut`.
    std::vector<double> observe(const Circuit& cut, const StateVector& state, std::size_t k) const {
        const FamilyPlan& plan = plans_[k];
        const PauliFamily& fam = *plan.family;
        const std::uint64_t obs_seed = derive_seed(derive_seed(cfg_.estimation.seed, 0x0B5E), fam.id);
        std::vector<double> out;
        out.reserve(plan.tests.size());
        switch (cfg_.estimation.mode) {
            case EstimationMode::Analytic: {
                const auto values = analytic_member_expectations(fam, state);
                for (const auto& t : plan.tests) out.push_back(combine(t, values));
                break;
            }
            case EstimationMode::Shots: {
                if (cfg_.estimation.shots == 0) throw Error("shots must be at least 1");
                Rng rng(obs_seed);
                const auto counts =
                    sample_histogram(measure_probabilities(state, fam.diagonalizer), cfg_.estimation.shots, rng);
                const auto values = member_expectations(fam, frequencies(counts));
                for (const auto& t : plan.tests) out.push_back(combine(t, values));
                break;
            }
            case EstimationMode::Noisy: {
                const MitigatedEstimate est(cut, fam, cfg_.estimation.noise, cfg_.estimation.mitigation,
                                            cfg_.estimation.shots, obs_seed);
                for (const auto& t : plan.tests) out.push_back(est.evaluate(t));
                break;
            }
        }
        return out;
    }

    AssessmentReport run(const Circuit& cut) const {
        check_width(cut);
        const StateVector state = simulate(cut);
        AssessmentReport report;
        report.circuit_name = cut.name();
        report.config = cfg_;
        report.families.resize(plans_.size());
        parallel_for(plans_.size(), cfg_.jobs, [&](std::size_t k) {
            const FamilyPlan& plan = plans_[k];
            const auto observed = observe(cut, state, k);
            FamilyVerdicts fv{plan.family->id, {}};
            fv.verdicts.reserve(plan.tests.size());
            for (std::size_t i = 0; i < plan.tests.size(); ++i) {
                Verdict v{plan.tests[i], plan.expected[i], observed[i], plan.threshold[i], true};
                v.passed = std::abs(v.expected - v.observed) <= v.threshold;
                fv.verdicts.push_back(std::move(v));
            }
            report.families[k] = std::move(fv);
        });
        for (const auto& f : report.families) {
            report.generated += f.verdicts.size();
            report.failed += f.failed();
        }
        return report;
    }

    struct Summary {
        std::size_t generated = 0;
        std::size_t failed = 0;
        double failed_expected_sum = 0.0;  // sum of oracle values over failed tests
    };

    /// Counts without materializing verdicts. Runs single-threaded.
    Summary summarize(const Circuit& cut) const {
        check_width(cut);
        const StateVector state = simulate(cut);
        Summary s;
        for (std::size_t k = 0; k < plans_.size(); ++k) {
            const auto observed = observe(cut, state, k);
            const FamilyPlan& plan = plans_[k];
            for (std::size_t i = 0; i < observed.size(); ++i) {
                ++s.generated;
                if (std::abs(plan.expected[i] - observed[i]) > plan.threshold[i]) {
                    ++s.failed;
                    s.failed_expected_sum += plan.expected[i];
                }
            }
        }
        return s;
    }

  private:
    void check_width(const Circuit& cut) const {
        if (cut.num_qubits() != num_qubits_) {
            throw Error("circuit has " + std::to_string(cut.num_qubits()) + " qubits but the spec describes " +
                        std::to_string(num_qubits_));
        }
    }

    std::size_t num_qubits_;
    AssessConfig cfg_;
    std::vector<FamilyPlan> plans_;
};

/// Generates `budget` tests per applicable family, computes oracle and observed
/// values, and records a verdict per test.
inline AssessmentReport assess(const Circuit& cut, const CompactSpec& spec, const std::vector<PauliFamily>& families,
                               const AssessConfig& cfg) {
    if (cut.num_qubits() != spec.num_qubits) {
        throw Error("circuit has " + std::to_string(cut.num_qubits()) + " qubits but the spec describes " +
                    std::to_string(spec.num_qubits));
    }
    return PreparedAssessment(spec, families, cfg).run(cut);
}

inline AssessmentReport assess(const Circuit& cut, const CompactSpec& spec, const AssessConfig& cfg) {
    return assess(cut, spec, partition_families(spec.num_qubits), cfg);
}

inline nlohmann::json assess_config_to_json(const AssessConfig& cfg) {
    nlohmann::json j{{"budget", cfg.budget},
                     {"tau", cfg.tau},
                     {"mode", mode_name(cfg.estimation.mode)},
                     {"seed", cfg.estimation.seed}};
    if (cfg.estimation.mode != EstimationMode::Analytic) j["shots"] = cfg.estimation.shots;
    if (cfg.estimation.mode == EstimationMode::Noisy) {
        j["noise"] = noise_to_json(cfg.estimation.noise);
        j["mitigation"] = mitigation_to_json(cfg.estimation.mitigation);
        j["standard_error"] = cfg.standard_error;
    }
    return j;
}

/// Report JSON: aggregate counts plus every failed test per family.
inline nlohmann::json report_to_json(const AssessmentReport& r) {
    nlohmann::json fams = nlohmann::json::array();
    for (const auto& f : r.families) {
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& v : f.verdicts) {
            if (v.passed) continue;
            auto jt = test_to_json(v.test);
            failures.push_back({{"terms", jt["terms"]},
                                {"expected", v.expected},
                                {"observed", v.observed},
                                {"threshold", v.threshold}});
        }
        fams.push_back({{"family_id", f.family_id},
                        {"generated", f.verdicts.size()},
                        {"failed", f.failed()},
                        {"failures", failures}});
    }
    return {{"circuit_name", r.circuit_name},
            {"config", assess_config_to_json(r.config)},
            {"generated", r.generated},
            {"failed", r.failed},
            {"failing_families", r.failing_families()},
            {"families", fams}};
}

}  // namespace qops

#endif  // QOPS_TEST_ENGINE_HPP
