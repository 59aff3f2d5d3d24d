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

#ifndef QOPS_MUTATION_HPP
#define QOPS_MUTATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/statevector.hpp"

namespace qops {

enum class MutationOperator { Add, Remove, Replace };

inline std::string operator_name(MutationOperator op) {
    switch (op) {
        case MutationOperator::Add: return "add";
        case MutationOperator::Remove: return "remove";
        case MutationOperator::Replace: return "replace";
    }
    return "?";
}

struct Mutant {
    std::size_t id = 0;
    std::string base;
    MutationOperator op = MutationOperator::Add;
    std::size_t position = 0;
    std::optional<Gate> gate;  // inserted or substituted gate
    Circuit circuit;
};

inline const std::vector<GateKind>& default_gate_pool() {
    static const std::vector<GateKind> pool{GateKind::X, GateKind::Y, GateKind::Z, GateKind::H,
                                            GateKind::S, GateKind::T, GateKind::CX};
    return pool;
}

/// Angle given to rotation kinds when they appear in a mutation pool.
inline constexpr double kMutationAngle = std::numbers::pi / 4;

namespace mutation_detail {

inline std::vector<std::vector<std::size_t>> placements(GateKind kind, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (gate_arity(kind) == 1) {
        for (std::size_t q = 0; q < n; ++q) out.push_back({q});
        return out;
    }
    const bool ordered = kind == GateKind::CX;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && (ordered || a < b)) out.push_back({a, b});
        }
    }
    return out;
}

inline Gate pool_gate(GateKind kind, std::vector<std::size_t> targets) {
    std::vector<double> params(gate_param_count(kind), kMutationAngle);
    return make_gate(kind, std::move(targets), std::move(params));
}

}  // namespace mutation_detail

/// Every single-gate mutant of `base`: all removals, all insertions of a pool
/// gate at every position and placement, and all same-arity substitutions
/// (keeping the original targets). Enumeration order is fixed.
inline std::vector<Mutant> generate_mutants(const Circuit& base, const std::vector<GateKind>& pool) {
    if (pool.empty()) throw Error("generate_mutants: gate pool is empty");
    std::vector<Mutant> out;
    auto push = [&](MutationOperator op, std::size_t pos, std::optional<Gate> g, Circuit c) {
        const std::size_t id = out.size();
        c.set_name(base.name() + "_m" + std::to_string(id));
        out.push_back({id, base.name(), op, pos, std::move(g), std::move(c)});
    };
    const auto& gates = base.gates();
    for (std::size_t pos = 0; pos < gates.size(); ++pos) {
        Circuit c = base;
        c.erase(pos);
        push(MutationOperator::Remove, pos, gates[pos], std::move(c));
    }
    for (std::size_t pos = 0; pos <= gates.size(); ++pos) {
        for (GateKind kind : pool) {
            for (auto& targets : mutation_detail::placements(kind, base.num_qubits())) {
                Gate g = mutation_detail::pool_gate(kind, std::move(targets));
                Circuit c = base;
                c.insert(pos, g);
                push(MutationOperator::Add, pos, std::move(g), std::move(c));
            }
        }
    }
    for (std::size_t pos = 0; pos < gates.size(); ++pos) {
        for (GateKind kind : pool) {
            if (gate_arity(kind) != gate_arity(gates[pos].kind)) continue;
            Gate g = mutation_detail::pool_gate(kind, gates[pos].targets);
            if (g == gates[pos]) continue;
            Circuit c = base;
            c.replace(pos, g);
            push(MutationOperator::Replace, pos, std::move(g), std::move(c));
        }
    }
    return out;
}

/// (1/sqrt 2) * sqrt(sum_i (sqrt p_i - sqrt q_i)^2) over the union of outcomes.
inline double hellinger(const OutcomeDistribution& p, const OutcomeDistribution& q) {
    if (p.num_qubits != q.num_qubits) throw Error("hellinger: distributions have different widths");
    double s = 0.0;
    auto a = p.probs.begin(), b = q.probs.begin();
    while (a != p.probs.end() || b != q.probs.end()) {
        double pa = 0.0, qb = 0.0;
        if (b == q.probs.end() || (a != p.probs.end() && a->first < b->first)) {
            pa = (a++)->second;
        } else if (a == p.probs.end() || b->first < a->first) {
            qb = (b++)->second;
        } else {
            pa = (a++)->second;
            qb = (b++)->second;
        }
        const double d = std::sqrt(std::max(pa, 0.0)) - std::sqrt(std::max(qb, 0.0));
        s += d * d;
    }
    return std::clamp(std::sqrt(s) / std::numbers::sqrt2, 0.0, 1.0);
}

inline constexpr double kEquivalenceTolerance = 1e-9;

/// Basis in which base and mutant outputs are compared.
///   Computational: the Z basis only.
///   FamilyBases: every family's diagonal basis (the Z basis included); the
///   reported distance is the largest one. Equal to zero iff the two states
///   agree up to global phase, so phase-flip faults count as faulty.
enum class GroundTruthBasis { Computational, FamilyBases };

inline std::string ground_truth_basis_name(GroundTruthBasis b) {
    return b == GroundTruthBasis::Computational ? "computational" : "families";
}

inline GroundTruthBasis parse_ground_truth_basis(const std::string& s) {
    if (s == "computational") return GroundTruthBasis::Computational;
    if (s == "families") return GroundTruthBasis::FamilyBases;
    throw Error("unknown ground-truth basis '" + s + "'");
}

enum class Label { Equivalent, Faulty };

inline std::string label_name(Label l) { return l == Label::Equivalent ? "equivalent" : "faulty"; }

struct GroundTruthLabel {
    std::size_t mutant_id = 0;
    double hellinger = 0.0;
    Label label = Label::Equivalent;
};

namespace mutation_detail {

inline std::vector<OutcomeDistribution> reference_outputs(const StateVector& state, GroundTruthBasis basis,
                                                          const std::vector<PauliFamily>& families) {
    if (basis == GroundTruthBasis::Computational) return {measure_distribution(state, Circuit(state.num_qubits()))};
    std::vector<OutcomeDistribution> out;
    for (const auto& f : families) out.push_back(measure_distribution(state, f.diagonalizer));
    return out;
}

}  // namespace mutation_detail

/// Ground-truth label of every mutant from analytic output distributions.
inline std::vector<GroundTruthLabel> label_mutants(const Circuit& base, const std::vector<Mutant>& mutants,
                                                   GroundTruthBasis basis = GroundTruthBasis::Computational) {
    std::vector<PauliFamily> families;
    if (basis == GroundTruthBasis::FamilyBases) families = partition_families(base.num_qubits());
    const auto ref = mutation_detail::reference_outputs(simulate(base), basis, families);
    std::vector<GroundTruthLabel> out;
    out.reserve(mutants.size());
    for (const auto& m : mutants) {
        const auto got = mutation_detail::reference_outputs(simulate(m.circuit), basis, families);
        double d = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) d = std::max(d, hellinger(ref[i], got[i]));
        out.push_back({m.id, d, d <= kEquivalenceTolerance ? Label::Equivalent : Label::Faulty});
    }
    return out;
}

struct JenksResult {
    std::size_t classes = 0;
    std::vector<double> breaks;               // upper bound of each class, ascending
    std::vector<std::size_t> class_of;        // per input value
    std::vector<std::size_t> representatives;  // per class: input index nearest the class mean
    double cost = 0.0;                        // total within-class sum of squared deviations
};

/// Exact Fisher-Jenks natural breaks by dynamic programming over the sorted values.
///
/// `classes` is clamped to [1, number of distinct values]. Ties between equally
/// good splits resolve to the earliest split point.
inline JenksResult jenks_select(const std::vector<double>& values, std::size_t classes) {
    JenksResult r;
    if (values.empty()) return r;
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = values[order[i]];
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < n; ++i) distinct += v[i] != v[i - 1];
    const std::size_t k = std::clamp<std::size_t>(classes, 1, distinct);

    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s1[i + 1] = s1[i] + v[i];
        s2[i + 1] = s2[i] + v[i] * v[i];
    }
    // SSD of v[i, j).
    auto ssd = [&](std::size_t i, std::size_t j) {
        const double cnt = static_cast<double>(j - i);
        const double sum = s1[j] - s1[i];
        return std::max(0.0, (s2[j] - s2[i]) - sum * sum / cnt);
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // best[c][j]: min cost of splitting v[0, j) into c classes; start[c][j]: first index of the last class.
    std::vector<std::vector<double>> best(k + 1, std::vector<double>(n + 1, kInf));
    std::vector<std::vector<std::size_t>> start(k + 1, std::vector<std::size_t>(n + 1, 0));
    best[0][0] = 0.0;
    for (std::size_t c = 1; c <= k; ++c) {
        for (std::size_t j = c; j <= n; ++j) {
            for (std::size_t i = c - 1; i < j; ++i) {
                if (best[c - 1][i] == kInf) continue;
                const double cand = best[c - 1][i] + ssd(i, j);
                if (cand < best[c][j]) {
                    best[c][j] = cand;
                    start[c][j] = i;
                }
            }
        }
    }
    std::vector<std::size_t> bounds(k + 1);
    bounds[k] = n;
    for (std::size_t c = k; c >= 1; --c) bounds[c - 1] = start[c][bounds[c]];

    r.classes = k;
    r.cost = best[k][n];
    r.class_of.assign(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t lo = bounds[c], hi = bounds[c + 1];
        r.breaks.push_back(v[hi - 1]);
        const double mean = (s1[hi] - s1[lo]) / static_cast<double>(hi - lo);
        std::size_t rep = order[lo];
        for (std::size_t i = lo; i < hi; ++i) {
            r.class_of[order[i]] = c;
            const double d = std::abs(v[i] - mean), dr = std::abs(values[rep] - mean);
            if (d < dr || (d == dr && order[i] < rep)) rep = order[i];
        }
        r.representatives.push_back(rep);
    }
    return r;
}

struct ScoredVerdict {
    bool predicted_faulty = false;
    bool truth_faulty = false;
};

struct MetricsSummary {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 1.0, recall = 1.0, f1 = 1.0;
};

/// Confusion counts and precision/recall/F1 with `positive` as the positive class.
/// Precision (recall) is 1 when no positives were predicted (exist).
inline MetricsSummary score(const std::vector<ScoredVerdict>& verdicts, Label positive = Label::Faulty) {
    MetricsSummary m;
    const bool pos_is_faulty = positive == Label::Faulty;
    for (const auto& v : verdicts) {
        const bool pred = v.predicted_faulty == pos_is_faulty;
        const bool truth = v.truth_faulty == pos_is_faulty;
        if (pred && truth) ++m.tp;
        else if (pred) ++m.fp;
        else if (truth) ++m.fn;
        else ++m.tn;
    }
    m.precision = (m.tp + m.fp) ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 1.0;
    m.recall = (m.tp + m.fn) ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 1.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

}  // namespace qops

#endif  // QOPS_MUTATION_HPP
