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

#ifndef QOPS_NOISE_HPP
#define QOPS_NOISE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/random.hpp"
#include "qops/statevector.hpp"
#include "qops/test_case.hpp"

namespace qops {

/// Stochastic Pauli noise: after each gate a uniformly random non-identity Pauli
/// hits its targets with probability p1 (1-qubit gates) or p2 (2-qubit gates);
/// each measured bit flips with probability readout_flip.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    double readout_flip = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p1 >= 0.0 && p1 < 1.0)) throw Error("noise: p1 must be in [0,1)");
        if (!(p2 >= 0.0 && p2 < 1.0)) throw Error("noise: p2 must be in [0,1)");
        if (!(readout_flip >= 0.0 && readout_flip < 0.5)) throw Error("noise: readout_flip must be in [0,0.5)");
    }

    bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && readout_flip == 0.0; }
};

inline nlohmann::json noise_to_json(const NoiseModel& m) {
    return {{"p1", m.p1}, {"p2", m.p2}, {"readout_flip", m.readout_flip}, {"seed", m.seed}};
}

inline NoiseModel noise_from_json(const nlohmann::json& j) {
    NoiseModel m;
    m.p1 = j.value("p1", 0.0);
    m.p2 = j.value("p2", 0.0);
    m.readout_flip = j.value("readout_flip", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.validate();
    return m;
}

enum class ZneFit { Linear, Cubic, Quartic, Richardson };

inline std::string zne_fit_name(ZneFit f) {
    switch (f) {
        case ZneFit::Linear: return "linear";
        case ZneFit::Cubic: return "cubic";
        case ZneFit::Quartic: return "quartic";
        case ZneFit::Richardson: return "richardson";
    }
    return "?";
}

struct ZneConfig {
    ZneFit fit = ZneFit::Linear;
    std::vector<int> scale_factors{1, 3, 5};

    static ZneConfig defaults(ZneFit fit) {
        switch (fit) {
            case ZneFit::Cubic: return {fit, {1, 3, 5, 7}};
            case ZneFit::Quartic: return {fit, {1, 3, 5, 7, 9}};
            default: return {fit, {1, 3, 5}};
        }
    }

    std::size_t min_points() const {
        switch (fit) {
            case ZneFit::Linear: return 2;
            case ZneFit::Cubic: return 4;
            case ZneFit::Quartic: return 5;
            case ZneFit::Richardson: return 2;
        }
        return 2;
    }

    void validate() const {
        if (scale_factors.size() < min_points()) {
            throw Error("zne-" + zne_fit_name(fit) + " needs at least " + std::to_string(min_points()) +
                        " scale factors, got " + std::to_string(scale_factors.size()));
        }
        if (scale_factors.front() != 1) throw Error("zne: first scale factor must be 1");
        for (std::size_t i = 0; i < scale_factors.size(); ++i) {
            if (scale_factors[i] < 1 || scale_factors[i] % 2 == 0) throw Error("zne: scale factors must be odd and >= 1");
            if (i && scale_factors[i] <= scale_factors[i - 1]) throw Error("zne: scale factors must strictly increase");
        }
    }
};

struct CdrConfig {
    std::size_t training_size = 10;
    double substitution_fraction = 0.75;

    void validate() const {
        if (training_size < 2) throw Error("cdr: training_size must be at least 2");
        if (!(substitution_fraction >= 0.0 && substitution_fraction <= 1.0)) {
            throw Error("cdr: substitution_fraction must be in [0,1]");
        }
    }
};

enum class MitigationMethod { None, Zne, Cdr };

struct MitigationConfig {
    MitigationMethod method = MitigationMethod::None;
    ZneConfig zne;
    CdrConfig cdr;

    /// none | zne-linear | zne-cubic | zne-quartic | zne-richardson | cdr
    static MitigationConfig parse(const std::string& name) {
        MitigationConfig c;
        if (name == "none") return c;
        if (name == "cdr") {
            c.method = MitigationMethod::Cdr;
            return c;
        }
        static const std::map<std::string, ZneFit> kFits{{"zne-linear", ZneFit::Linear},
                                                         {"zne-cubic", ZneFit::Cubic},
                                                         {"zne-quartic", ZneFit::Quartic},
                                                         {"zne-richardson", ZneFit::Richardson}};
        const auto it = kFits.find(name);
        if (it == kFits.end()) throw Error("unknown mitigation method '" + name + "'");
        c.method = MitigationMethod::Zne;
        c.zne = ZneConfig::defaults(it->second);
        return c;
    }

    std::string name() const {
        switch (method) {
            case MitigationMethod::None: return "none";
            case MitigationMethod::Cdr: return "cdr";
            case MitigationMethod::Zne: return "zne-" + zne_fit_name(zne.fit);
        }
        return "?";
    }

    void validate() const {
        if (method == MitigationMethod::Zne) zne.validate();
        if (method == MitigationMethod::Cdr) cdr.validate();
    }
};

inline nlohmann::json mitigation_to_json(const MitigationConfig& m) {
    nlohmann::json j{{"method", m.name()}};
    if (m.method == MitigationMethod::Zne) j["scale_factors"] = m.zne.scale_factors;
    if (m.method == MitigationMethod::Cdr) {
        j["training_size"] = m.cdr.training_size;
        j["substitution_fraction"] = m.cdr.substitution_fraction;
    }
    return j;
}

inline MitigationConfig mitigation_from_json(const nlohmann::json& j) {
    auto m = MitigationConfig::parse(j.value("method", std::string("none")));
    if (m.method == MitigationMethod::Zne && j.contains("scale_factors")) {
        m.zne.scale_factors = j.at("scale_factors").get<std::vector<int>>();
    }
    if (m.method == MitigationMethod::Cdr) {
        m.cdr.training_size = j.value("training_size", m.cdr.training_size);
        m.cdr.substitution_fraction = j.value("substitution_fraction", m.cdr.substitution_fraction);
    }
    m.validate();
    return m;
}

namespace noise_detail {

inline void apply_pauli_code(StateVector& sv, std::size_t qubit, unsigned code) {
    static constexpr GateKind kPauli[4] = {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z};
    if (code) sv.apply(make_gate(kPauli[code], {qubit}));
}

inline constexpr std::size_t kTrajectoryCacheLimit = 4096;

}  // namespace noise_detail

/// Histogram of `shots` noisy executions of `cut` followed by a noiseless `basis_change`.
///
/// Outcome draws use Rng(seed) exactly as shot-mode sampling does; gate and
/// readout faults use separate substreams, so a zero model reproduces the
/// noiseless shot histogram bit for bit.
inline std::vector<std::uint64_t> noisy_histogram(const Circuit& cut, const Circuit& basis_change,
                                                  const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed) {
    noise.validate();
    if (shots == 0) throw Error("shots must be at least 1");
    const std::size_t n = cut.num_qubits();
    Rng outcome_rng(seed);
    Rng gate_rng(derive_seed(derive_seed(seed, noise.seed), 1));
    Rng readout_rng(derive_seed(derive_seed(seed, noise.seed), 2));

    const StateVector ideal = simulate(cut);
    const OutcomeSampler ideal_sampler(measure_probabilities(ideal, basis_change));
    std::map<std::vector<std::uint32_t>, OutcomeSampler> cache;

    std::vector<std::uint64_t> counts(std::size_t{1} << n, 0);
    std::vector<std::uint32_t> faults;
    const auto& gates = cut.gates();
    for (std::uint64_t s = 0; s < shots; ++s) {
        faults.clear();
        for (std::size_t g = 0; g < gates.size(); ++g) {
            const bool two = gate_arity(gates[g].kind) == 2;
            const double p = two ? noise.p2 : noise.p1;
            if (p > 0.0 && gate_rng.uniform() < p) {
                const auto code = static_cast<std::uint32_t>(1 + gate_rng.below(two ? 15 : 3));
                faults.push_back(static_cast<std::uint32_t>(g) * 16 + code);
            }
        }
        std::size_t idx;
        if (faults.empty()) {
            idx = ideal_sampler.draw(outcome_rng);
        } else {
            auto it = cache.find(faults);
            std::optional<OutcomeSampler> local;
            const OutcomeSampler* sampler;
            if (it != cache.end()) {
                sampler = &it->second;
            } else {
                StateVector sv(n);
                std::size_t next = 0;
                for (std::size_t g = 0; g < gates.size(); ++g) {
                    sv.apply(gates[g]);
                    while (next < faults.size() && faults[next] / 16 == g) {
                        const unsigned code = faults[next] % 16;
                        if (gate_arity(gates[g].kind) == 2) {
                            noise_detail::apply_pauli_code(sv, gates[g].targets[0], code / 4);
                            noise_detail::apply_pauli_code(sv, gates[g].targets[1], code % 4);
                        } else {
                            noise_detail::apply_pauli_code(sv, gates[g].targets[0], code);
                        }
                        ++next;
                    }
                }
                OutcomeSampler fresh(measure_probabilities(sv, basis_change));
                if (cache.size() < noise_detail::kTrajectoryCacheLimit) {
                    sampler = &cache.emplace(faults, std::move(fresh)).first->second;
                } else {
                    sampler = &local.emplace(std::move(fresh));
                }
            }
            idx = sampler->draw(outcome_rng);
        }
        if (noise.readout_flip > 0.0) {
            for (std::size_t q = 0; q < n; ++q) {
                if (readout_rng.uniform() < noise.readout_flip) idx ^= qubit_bit(n, q);
            }
        }
        ++counts[idx];
    }
    return counts;
}

/// Every member's expectation estimated from one noisy histogram in the family basis.
inline std::vector<double> noisy_member_expectations(const Circuit& cut, const PauliFamily& family,
                                                     const NoiseModel& noise, std::uint64_t shots,
                                                     std::uint64_t seed) {
    const auto counts = noisy_histogram(cut, family.diagonalizer, noise, shots, seed);
    return member_expectations(family, frequencies(counts));
}

inline double noisy_expectation(const Circuit& cut, const TestCase& test, const PauliFamily& family,
                                const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed) {
    check_test_family(test, family);
    return combine(test, noisy_member_expectations(cut, family, noise, shots, seed));
}

/// Global unitary folding: C (C^dagger C)^((scale-1)/2).
inline Circuit fold_circuit(const Circuit& cut, int scale) {
    if (scale < 1 || scale % 2 == 0) throw Error("fold_circuit: scale must be an odd integer >= 1");
    Circuit out = cut;
    const Circuit inv = cut.inverse();
    for (int k = 0; k < (scale - 1) / 2; ++k) {
        out.extend(inv);
        out.extend(cut);
    }
    return out;
}

/// Value at scale 0 of the fit through (scales, values).
///
/// Linear, Cubic and Quartic are least-squares polynomials of degree 1, 3, 4;
/// Richardson is the Lagrange interpolant through every point.
inline double extrapolate_to_zero(ZneFit fit, std::span<const double> scales, std::span<const double> values) {
    if (scales.size() != values.size()) throw Error("extrapolate_to_zero: size mismatch");
    const std::size_t m = scales.size();
    if (fit == ZneFit::Richardson) {
        if (m < 2) throw Error("zne-richardson needs at least 2 points");
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double l = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (k != i) l *= scales[k] / (scales[k] - scales[i]);
            }
            total += l * values[i];
        }
        return total;
    }
    const std::size_t degree = fit == ZneFit::Linear ? 1 : fit == ZneFit::Cubic ? 3 : 4;
    if (m < degree + 1) {
        throw Error("zne-" + zne_fit_name(fit) + " needs at least " + std::to_string(degree + 1) + " points, got " +
                    std::to_string(m));
    }
    Eigen::MatrixXd v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(degree + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        double pw = 1.0;
        for (std::size_t d = 0; d <= degree; ++d, pw *= scales[i]) {
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = pw;
        }
        y(static_cast<Eigen::Index>(i)) = values[i];
    }
    const Eigen::VectorXd coef = v.colPivHouseholderQr().solve(y);
    return coef(0);
}

struct CdrFit {
    double slope = 1.0;
    double intercept = 0.0;
    bool degenerate = false;
};

struct CdrResult {
    double value = 0.0;
    double unmitigated = 0.0;
    CdrFit fit;
};

namespace noise_detail {

inline constexpr double kAngleTolerance = 1e-12;

inline bool is_quarter_turn(double angle) {
    const double k = angle / (std::numbers::pi / 2);
    return std::abs(k - std::round(k)) < kAngleTolerance;
}

// Nearest multiple of pi/2; exact ties are broken at random.
inline double snap_angle(double angle, Rng& rng) {
    const double k = angle / (std::numbers::pi / 2);
    const double lo = std::floor(k), hi = std::ceil(k);
    double pick;
    if (std::abs((k - lo) - (hi - k)) < kAngleTolerance) {
        pick = rng.bernoulli(0.5) ? hi : lo;
    } else {
        pick = (k - lo) < (hi - k) ? lo : hi;
    }
    return pick * (std::numbers::pi / 2);
}

inline bool substitutable(const Gate& g) {
    if (g.kind == GateKind::T || g.kind == GateKind::Tdg) return true;
    return gate_param_count(g.kind) == 1 && !is_quarter_turn(g.params[0]);
}

}  // namespace noise_detail

/// Near-Clifford training circuits: each non-Clifford gate is snapped to the
/// nearest quarter-turn rotation with probability `substitution_fraction`.
/// A circuit without non-Clifford gates is its own (single) training circuit.
inline std::vector<Circuit> cdr_training_circuits(const Circuit& cut, const CdrConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < cut.size(); ++i) {
        if (noise_detail::substitutable(cut.gates()[i])) positions.push_back(i);
    }
    if (positions.empty()) return {cut};
    Rng rng(seed);
    std::vector<Circuit> out;
    for (std::size_t k = 0; k < cfg.training_size; ++k) {
        Circuit c = cut;
        for (std::size_t pos : positions) {
            if (!rng.bernoulli(cfg.substitution_fraction)) continue;
            const Gate& g = cut.gates()[pos];
            Gate r = g;
            if (g.kind == GateKind::T || g.kind == GateKind::Tdg) {
                r = make_gate(GateKind::RZ, g.targets,
                              {noise_detail::snap_angle((g.kind == GateKind::T ? 1 : -1) * std::numbers::pi / 4, rng)});
            } else {
                r.params[0] = noise_detail::snap_angle(g.params[0], rng);
            }
            c.replace(pos, r);
        }
        c.set_name(cut.name() + "_cdr" + std::to_string(k));
        out.push_back(std::move(c));
    }
    return out;
}

/// Least-squares line through (noisy, exact). One training point (a Clifford
/// circuit) gives the unit-slope line through it; zero spread in the noisy
/// values falls back to the identity map. Both cases set `degenerate`.
inline CdrFit fit_cdr(std::span<const double> noisy, std::span<const double> exact) {
    if (noisy.size() != exact.size() || noisy.empty()) throw Error("fit_cdr: bad training data");
    const std::size_t m = noisy.size();
    if (m == 1) return {1.0, exact[0] - noisy[0], true};
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += noisy[i];
        my += exact[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (noisy[i] - mx) * (noisy[i] - mx);
        sxy += (noisy[i] - mx) * (exact[i] - my);
    }
    if (sxx <= 1e-24) return {1.0, 0.0, true};
    const double slope = sxy / sxx;
    return {slope, my - slope * mx, false};
}

/// Estimator for one family: noisy data gathered once, any test of the family
/// evaluated (and mitigated) from it afterwards.
class MitigatedEstimate {
  public:
    MitigatedEstimate(const Circuit& cut, const PauliFamily& family, const NoiseModel& noise,
                      const MitigationConfig& mitigation, std::uint64_t shots, std::uint64_t seed)
        : family_(&family), mitigation_(mitigation) {
        mitigation.validate();
        switch (mitigation.method) {
            case MitigationMethod::None:
                values_.push_back(noisy_member_expectations(cut, family, noise, shots, seed));
                break;
            case MitigationMethod::Zne:
                for (std::size_t k = 0; k < mitigation.zne.scale_factors.size(); ++k) {
                    const Circuit folded = fold_circuit(cut, mitigation.zne.scale_factors[k]);
                    values_.push_back(noisy_member_expectations(folded, family, noise, shots, derive_seed(seed, k)));
                }
                break;
            case MitigationMethod::Cdr: {
                values_.push_back(noisy_member_expectations(cut, family, noise, shots, seed));
                const auto training = cdr_training_circuits(cut, mitigation.cdr, derive_seed(seed, 0xCD));
                for (std::size_t k = 0; k < training.size(); ++k) {
                    train_noisy_.push_back(
                        noisy_member_expectations(training[k], family, noise, shots, derive_seed(seed, 1000 + k)));
                    train_exact_.push_back(analytic_member_expectations(family, simulate(training[k])));
                }
                break;
            }
        }
    }

    double evaluate(const TestCase& test) const {
        check_test_family(test, *family_);
        switch (mitigation_.method) {
            case MitigationMethod::None: return combine(test, values_[0]);
            case MitigationMethod::Zne: {
                std::vector<double> scales, vals;
                for (std::size_t k = 0; k < values_.size(); ++k) {
                    scales.push_back(mitigation_.zne.scale_factors[k]);
                    vals.push_back(combine(test, values_[k]));
                }
                return extrapolate_to_zero(mitigation_.zne.fit, scales, vals);
            }
            case MitigationMethod::Cdr: return evaluate_cdr(test).value;
        }
        return 0.0;
    }

    CdrResult evaluate_cdr(const TestCase& test) const {
        if (mitigation_.method != MitigationMethod::Cdr) throw Error("evaluate_cdr: estimator is not CDR");
        std::vector<double> xs, ys;
        for (std::size_t k = 0; k < train_noisy_.size(); ++k) {
            xs.push_back(combine(test, train_noisy_[k]));
            ys.push_back(combine(test, train_exact_[k]));
        }
        CdrResult r;
        r.unmitigated = combine(test, values_[0]);
        r.fit = fit_cdr(xs, ys);
        r.value = r.fit.slope * r.unmitigated + r.fit.intercept;
        return r;
    }

    std::size_t training_size() const { return train_noisy_.size(); }

  private:
    const PauliFamily* family_;
    MitigationConfig mitigation_;
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<double>> train_noisy_;
    std::vector<std::vector<double>> train_exact_;
};

/// Zero-noise extrapolated expectation of `test`.
inline double zne_mitigate(const Circuit& cut, const TestCase& test, const PauliFamily& family,
                           const NoiseModel& noise, const ZneConfig& cfg, std::uint64_t shots, std::uint64_t seed) {
    MitigationConfig m;
    m.method = MitigationMethod::Zne;
    m.zne = cfg;
    return MitigatedEstimate(cut, family, noise, m, shots, seed).evaluate(test);
}

/// Clifford-data-regression corrected expectation of `test`.
inline CdrResult cdr_mitigate(const Circuit& cut, const TestCase& test, const PauliFamily& family,
                              const NoiseModel& noise, const CdrConfig& cfg, std::uint64_t shots, std::uint64_t seed) {
    MitigationConfig m;
    m.method = MitigationMethod::Cdr;
    m.cdr = cfg;
    return MitigatedEstimate(cut, family, noise, m, shots, seed).evaluate_cdr(test);
}

/// sigma / sqrt(n), sigma the sample standard deviation of `diffs`.
inline double standard_error(std::span<const double> diffs) {
    if (diffs.size() < 2) throw Error("standard_error: need at least 2 runs");
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(diffs.size() - 1));
    return sigma / std::sqrt(static_cast<double>(diffs.size()));
}

/// Standard error of `ideal - run(seed_k)` over `runs` seeded runs.
inline double calibrate_se(double ideal, const std::function<double(std::uint64_t)>& run, std::size_t runs,
                           std::uint64_t seed) {
    if (runs < 2) throw Error("calibrate_se: runs must be at least 2");
    std::vector<double> diffs;
    for (std::size_t k = 0; k < runs; ++k) diffs.push_back(ideal - run(derive_seed(seed, k)));
    return standard_error(diffs);
}

/// Standard error of the mitigated estimator of `test` on the non-faulty `reference`.
inline double calibrate_se(const Circuit& reference, const PauliFamily& family, const TestCase& test,
                           const NoiseModel& noise, const MitigationConfig& mitigation, std::size_t runs,
                           std::uint64_t shots, std::uint64_t seed) {
    const double ideal = combine(test, analytic_member_expectations(family, simulate(reference)));
    return calibrate_se(
        ideal,
        [&](std::uint64_t s) { return MitigatedEstimate(reference, family, noise, mitigation, shots, s).evaluate(test); },
        runs, seed);
}

/// Circuit-level standard error: the largest per-family value, each probed
/// with the family's first non-identity member at unit weight.
inline double calibrate_circuit_se(const Circuit& reference, const std::vector<const PauliFamily*>& families,
                                   const NoiseModel& noise, const MitigationConfig& mitigation, std::size_t runs,
                                   std::uint64_t shots, std::uint64_t seed) {
    double worst = 0.0;
    for (const PauliFamily* f : families) {
        const auto nonid = f->non_identity_indices();
        if (nonid.empty()) continue;
        const TestCase probe{f->id, {{f->members[nonid.front()], 1.0, nonid.front()}}};
        worst = std::max(worst, calibrate_se(reference, *f, probe, noise, mitigation, runs, shots,
                                             derive_seed(seed, f->id)));
    }
    return worst;
}

}  // namespace qops

#endif  // QOPS_NOISE_HPP
