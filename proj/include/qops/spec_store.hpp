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

#ifndef QOPS_SPEC_STORE_HPP
#define QOPS_SPEC_STORE_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/families.hpp"
#include "qops/pauli.hpp"
#include "qops/statevector.hpp"

namespace qops {

inline constexpr double kDistributionSumTolerance = 1e-9;

/// 64-bit FNV-1a of the canonical gate rendering, as 16 lowercase hex digits.
inline std::string basis_fingerprint(const Circuit& diagonalizer) {
    std::string canon;
    for (const auto& g : diagonalizer.gates()) {
        canon += gate_name(g.kind);
        for (auto t : g.targets) canon += " " + std::to_string(t);
        canon += ";";
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline bool is_fingerprint(const std::string& s) {
    return s.size() == 16 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
}

struct SpecEntry {
    std::size_t family_id = 0;
    PauliString representative;
    OutcomeDistribution distribution;  // in the family's diagonal basis
    std::string basis_fingerprint;

    friend bool operator==(const SpecEntry&, const SpecEntry&) = default;
};

/// Expected outcome distribution per covered family, one representative string each.
struct CompactSpec {
    std::string circuit_name;
    std::size_t num_qubits = 1;
    std::vector<SpecEntry> entries;

    const SpecEntry* find(std::size_t family_id) const {
        for (const auto& e : entries) {
            if (e.family_id == family_id) return &e;
        }
        return nullptr;
    }

    friend bool operator==(const CompactSpec&, const CompactSpec&) = default;
};

/// Family-level invariants that need no partition: unique ids, valid outcomes, unit mass.
inline void validate_spec_shape(const CompactSpec& spec) {
    std::set<std::size_t> seen;
    for (const auto& e : spec.entries) {
        const std::string where = "spec entry for family " + std::to_string(e.family_id);
        if (!seen.insert(e.family_id).second) throw SpecError(where + " appears more than once");
        if (e.representative.num_qubits() != spec.num_qubits) throw SpecError(where + ": representative width mismatch");
        if (e.distribution.num_qubits != spec.num_qubits) throw SpecError(where + ": distribution width mismatch");
        if (!is_fingerprint(e.basis_fingerprint)) {
            throw SpecError(where + ": malformed basis fingerprint '" + e.basis_fingerprint + "'");
        }
        for (const auto& [bits, p] : e.distribution.probs) {
            if (bits.size() != spec.num_qubits || bits.find_first_not_of("01") != std::string::npos) {
                throw SpecError(where + ": invalid outcome '" + bits + "'");
            }
            if (!(p >= 0.0 && p <= 1.0)) throw SpecError(where + ": probability out of [0,1] for " + bits);
        }
        if (std::abs(e.distribution.total() - 1.0) > kDistributionSumTolerance) {
            throw SpecError(where + ": probabilities sum to " + std::to_string(e.distribution.total()));
        }
    }
}

/// Checks representatives against the partition for spec.num_qubits.
inline void validate_spec_membership(const CompactSpec& spec, const std::vector<PauliFamily>& families) {
    for (const auto& e : spec.entries) {
        if (e.family_id >= families.size() || families[e.family_id].id != e.family_id) {
            throw SpecError("spec references unknown family " + std::to_string(e.family_id));
        }
        if (!families[e.family_id].contains(e.representative)) {
            throw SpecError("representative " + e.representative.label() + " is not a member of family " +
                            std::to_string(e.family_id));
        }
    }
}

/// Records the reference circuit's outcome distribution in each covered family's diagonal basis.
inline CompactSpec generate_spec(const Circuit& reference, const std::vector<PauliFamily>& families,
                                 const std::vector<std::size_t>& coverage) {
    if (coverage.empty()) throw SpecError("generate_spec: coverage must name at least one family");
    if (families.empty() || families.front().num_qubits != reference.num_qubits()) {
        throw SpecError("generate_spec: families do not match the circuit width");
    }
    const StateVector state = simulate(reference);
    CompactSpec spec{reference.name(), reference.num_qubits(), {}};
    std::set<std::size_t> seen;
    for (std::size_t id : coverage) {
        if (id >= families.size()) throw SpecError("generate_spec: unknown family id " + std::to_string(id));
        if (!seen.insert(id).second) continue;
        const auto& f = families[id];
        const auto nonid = f.non_identity_indices();
        spec.entries.push_back({f.id, f.members[nonid.empty() ? 0 : nonid.front()],
                                measure_distribution(state, f.diagonalizer), basis_fingerprint(f.diagonalizer)});
    }
    return spec;
}

inline std::vector<std::size_t> all_family_ids(const std::vector<PauliFamily>& families) {
    std::vector<std::size_t> ids;
    for (const auto& f : families) ids.push_back(f.id);
    return ids;
}

struct ApplicableFamily {
    const PauliFamily* family;
    OutcomeDistribution distribution;
};

/// Families that the spec covers, ordered by family id. A fingerprint mismatch
/// means the spec was produced under another diagonalizer and is fatal.
inline std::vector<ApplicableFamily> applicable_families(const CompactSpec& spec,
                                                         const std::vector<PauliFamily>& families) {
    if (!spec.entries.empty() && (families.empty() || families.front().num_qubits != spec.num_qubits)) {
        throw SpecError("spec width " + std::to_string(spec.num_qubits) + " does not match the families");
    }
    validate_spec_membership(spec, families);
    std::vector<ApplicableFamily> out;
    for (const auto& f : families) {
        const SpecEntry* e = spec.find(f.id);
        if (!e) continue;
        if (e->basis_fingerprint != basis_fingerprint(f.diagonalizer)) {
            throw SpecError("stale spec: basis fingerprint mismatch for family " + std::to_string(f.id));
        }
        out.push_back({&f, e->distribution});
    }
    return out;
}

inline nlohmann::json spec_to_json(const CompactSpec& spec) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : spec.entries) {
        nlohmann::json dist = nlohmann::json::object();
        for (const auto& [bits, p] : e.distribution.probs) dist[bits] = p;
        entries.push_back({{"family_id", e.family_id},
                           {"representative", e.representative.label()},
                           {"distribution", dist},
                           {"basis_fingerprint", e.basis_fingerprint}});
    }
    return {{"circuit_name", spec.circuit_name}, {"n", spec.num_qubits}, {"entries", entries}};
}

/// Parses and validates a spec. Representatives are checked against the partition when n allows it.
inline CompactSpec spec_from_json(const nlohmann::json& j) {
    CompactSpec spec;
    try {
        spec.circuit_name = j.at("circuit_name").get<std::string>();
        spec.num_qubits = j.at("n").get<std::size_t>();
        for (const auto& je : j.at("entries")) {
            SpecEntry e;
            e.family_id = je.at("family_id").get<std::size_t>();
            e.representative = PauliString::from_label(je.at("representative").get<std::string>());
            e.distribution.num_qubits = spec.num_qubits;
            for (const auto& [bits, p] : je.at("distribution").items()) e.distribution.probs[bits] = p.get<double>();
            if (!je.contains("basis_fingerprint")) {
                throw SpecError("spec entry for family " + std::to_string(e.family_id) + " has no basis_fingerprint");
            }
            e.basis_fingerprint = je.at("basis_fingerprint").get<std::string>();
            spec.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("spec schema violation: ") + e.what());
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw SpecError(std::string("spec schema violation: ") + e.what());
    }
    if (spec.num_qubits < 1) throw SpecError("spec schema violation: n must be positive");
    validate_spec_shape(spec);
    if (spec.num_qubits <= kMaxPartitionQubits) validate_spec_membership(spec, partition_families(spec.num_qubits));
    return spec;
}

inline void save_spec(const CompactSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << spec_to_json(spec).dump(2) << "\n";
}

inline CompactSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    return spec_from_json(j);
}

}  // namespace qops

#endif  // QOPS_SPEC_STORE_HPP
