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

#ifndef QOPS_TEST_CASE_HPP
#define QOPS_TEST_CASE_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/pauli.hpp"
#include "qops/random.hpp"
#include "qops/statevector.hpp"

namespace qops {

/// Smallest allowed |weight| of a generated term.
inline constexpr double kWeightFloor = 0.05;

struct Term {
    PauliString pauli;
    double weight = 0.0;
    std::size_t member = 0;  // index into the owning family's members

    friend bool operator==(const Term&, const Term&) = default;
};

/// T = sum_i c_i P_i over distinct members of one family.
struct TestCase {
    std::size_t family_id = 0;
    std::vector<Term> terms;

    /// sum_i |c_i|; bounds |<T>| and scales the verdict threshold.
    double scale() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.weight);
        return s;
    }

    friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// Builds a test from (label, weight) pairs, resolving each label in `family`.
inline TestCase make_test(const PauliFamily& family, const std::vector<std::pair<std::string, double>>& terms) {
    TestCase t{family.id, {}};
    for (const auto& [label, w] : terms) {
        const auto p = PauliString::from_label(label);
        const auto idx = family.index_of(p);
        if (!idx) throw Error("make_test: " + label + " is not in family " + std::to_string(family.id));
        t.terms.push_back({p, w, *idx});
    }
    return t;
}

/// `budget` random tests over the family's non-identity members.
///
/// Subset size is uniform in [1, m]; the subset is uniform among those of that
/// size; weights are uniform on [-1, 1] conditioned on |c| >= kWeightFloor.
inline std::vector<TestCase> generate_tests(const PauliFamily& family, std::size_t budget, std::uint64_t seed) {
    if (budget == 0) throw Error("generate_tests: budget must be at least 1");
    auto pool = family.non_identity_indices();
    if (pool.empty()) throw Error("generate_tests: family " + std::to_string(family.id) + " has no non-identity member");
    Rng rng(seed);
    const std::size_t m = pool.size();
    std::vector<TestCase> out;
    out.reserve(budget);
    for (std::size_t b = 0; b < budget; ++b) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.below(m));
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(m - i)]);
        std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(chosen.begin(), chosen.end());
        TestCase t{family.id, {}};
        for (std::size_t idx : chosen) {
            double c;
            do {
                c = rng.uniform(-1.0, 1.0);
            } while (std::abs(c) < kWeightFloor);
            t.terms.push_back({family.members[idx], c, idx});
        }
        out.push_back(std::move(t));
    }
    return out;
}

inline void check_test_family(const TestCase& test, const PauliFamily& family) {
    if (test.family_id != family.id) {
        throw Error("test belongs to family " + std::to_string(test.family_id) + ", not " + std::to_string(family.id));
    }
    for (const auto& t : test.terms) {
        if (t.member >= family.members.size() || family.members[t.member] != t.pauli) {
            throw Error("test term " + t.pauli.label() + " is not member " + std::to_string(t.member) + " of family " +
                        std::to_string(family.id));
        }
    }
}

/// Oracle: sum_{i,j} c_i w_{i,j} M_j with M the spec distribution in the family's diagonal basis.
inline double expected_expectation(const TestCase& test, const OutcomeDistribution& spec_dist,
                                   const PauliFamily& family) {
    check_test_family(test, family);
    if (spec_dist.num_qubits != family.num_qubits) throw Error("expected_expectation: distribution width mismatch");
    const auto m = spec_dist.dense();
    double total = 0.0;
    for (const auto& t : test.terms) {
        const auto& w = family.eigenvalues[t.member];
        for (std::size_t j = 0; j < m.size(); ++j) total += t.weight * w[j] * m[j];
    }
    return total;
}

/// Per-member expectations sum_j w_{i,j} p_j from dense outcome probabilities.
inline std::vector<double> member_expectations(const PauliFamily& family, std::span<const double> probs) {
    std::vector<double> out(family.members.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& w = family.eigenvalues[i];
        double s = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j) s += w[j] * probs[j];
        out[i] = s;
    }
    return out;
}

/// Exact <psi|P|psi> for every member, computed without the diagonalizer.
inline std::vector<double> analytic_member_expectations(const PauliFamily& family, const StateVector& state) {
    std::vector<double> out;
    out.reserve(family.members.size());
    for (const auto& p : family.members) out.push_back(expectation(state, p));
    return out;
}

/// sum_i c_i v[member_i].
inline double combine(const TestCase& test, std::span<const double> member_values) {
    double s = 0.0;
    for (const auto& t : test.terms) s += t.weight * member_values[t.member];
    return s;
}

inline nlohmann::json test_to_json(const TestCase& t) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : t.terms) terms.push_back({{"pauli", term.pauli.label()}, {"weight", term.weight}});
    return {{"family_id", t.family_id}, {"terms", terms}};
}

}  // namespace qops

#endif  // QOPS_TEST_CASE_HPP
