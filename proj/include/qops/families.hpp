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

#ifndef QOPS_FAMILIES_HPP
#define QOPS_FAMILIES_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/pauli.hpp"

namespace qops {

/// +1/-1 per measurement outcome, indexed by basis index.
using EigenvalueVector = std::vector<std::int8_t>;

/// A mutually commuting set of Pauli strings with a shared measurement basis.
///
/// `diagonalizer` is a Clifford circuit U with U P U^dagger = +/- Z-type for
/// every member P; `eigenvalues[i]` gives the +/-1 weight of each outcome of
/// measuring U|psi> for members[i].
struct PauliFamily {
    std::size_t id = 0;
    std::size_t num_qubits = 1;
    std::vector<PauliString> members;
    Circuit diagonalizer;
    std::vector<EigenvalueVector> eigenvalues;

    std::optional<std::size_t> index_of(const PauliString& p) const {
        const auto it = index_.find(p.key());
        if (it == index_.end() || p.num_qubits() != num_qubits) return std::nullopt;
        return it->second;
    }

    bool contains(const PauliString& p) const { return index_of(p).has_value(); }

    /// Members other than the all-identity string, in member order.
    std::vector<std::size_t> non_identity_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (!members[i].is_identity()) out.push_back(i);
        }
        return out;
    }

    void rebuild_index() {
        index_.clear();
        for (std::size_t i = 0; i < members.size(); ++i) index_.emplace(members[i].key(), i);
    }

  private:
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

namespace families_detail {

// Primitive polynomials over GF(2) with the x^n term included, n = 1..8.
inline constexpr std::array<std::uint32_t, 9> kFieldPolynomial{0,     0b11,      0b111,      0b1011,     0b10011,
                                                               0b100101, 0b1000011, 0b10000011, 0b100011101};

/// Arithmetic in GF(2^n), elements as coefficient bitmasks over the polynomial basis.
class Gf2n {
  public:
    explicit Gf2n(std::size_t n) : n_(n), poly_(kFieldPolynomial.at(n)) {}

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t r = 0;
        while (b) {
            if (b & 1u) r ^= a;
            b >>= 1;
            a = times_x(a);
        }
        return r;
    }

    std::uint32_t times_x(std::uint32_t a) const {
        a <<= 1;
        if (a & (1u << n_)) a ^= poly_;
        return a;
    }

    std::uint32_t alpha_pow(std::size_t k) const {
        std::uint32_t v = 1;
        for (std::size_t i = 0; i < k; ++i) v = times_x(v);
        return v;
    }

    /// Absolute trace y + y^2 + ... + y^(2^(n-1)); always 0 or 1.
    bool trace(std::uint32_t y) const {
        std::uint32_t s = 0, t = y;
        for (std::size_t k = 0; k < n_; ++k) {
            s ^= t;
            t = mul(t, t);
        }
        return s == 1;
    }

  private:
    std::size_t n_;
    std::uint32_t poly_;
};

struct Row {
    std::uint32_t x, z;
};

/// Gate-by-gate builder that keeps a generator tableau (signs ignored) in sync.
class Synthesizer {
  public:
    Synthesizer(std::size_t n, std::vector<Row> rows) : circuit_(n, "diagonalizer"), rows_(std::move(rows)) {}

    void h(std::size_t q) {
        circuit_.append(GateKind::H, {q});
        for (auto& r : rows_) {
            const std::uint32_t b = 1u << q;
            const bool xb = r.x & b, zb = r.z & b;
            r.x = (r.x & ~b) | (zb ? b : 0);
            r.z = (r.z & ~b) | (xb ? b : 0);
        }
    }

    void sdg(std::size_t q) {
        circuit_.append(GateKind::Sdg, {q});
        for (auto& r : rows_) {
            if (r.x & (1u << q)) r.z ^= 1u << q;
        }
    }

    void cx(std::size_t c, std::size_t t) {
        circuit_.append(GateKind::CX, {c, t});
        for (auto& r : rows_) {
            if (r.x & (1u << c)) r.x ^= 1u << t;
            if (r.z & (1u << t)) r.z ^= 1u << c;
        }
    }

    void cz(std::size_t a, std::size_t b) {
        circuit_.append(GateKind::CZ, {a, b});
        for (auto& r : rows_) {
            const bool xa = r.x & (1u << a), xb = r.x & (1u << b);
            if (xb) r.z ^= 1u << a;
            if (xa) r.z ^= 1u << b;
        }
    }

    std::vector<Row>& rows() { return rows_; }
    Circuit take() { return std::move(circuit_); }

  private:
    Circuit circuit_;
    std::vector<Row> rows_;
};

/// Row-reduces rows[begin, end) on the bits selected by `get`, restricted to
/// the columns in `columns`. Returns the pivot column of each reduced row.
template <typename Get>
std::vector<std::size_t> reduce(std::vector<Row>& rows, std::size_t begin, std::size_t end,
                                const std::vector<std::size_t>& columns, Get get) {
    std::vector<std::size_t> pivots;
    std::size_t rank = begin;
    for (std::size_t col : columns) {
        std::size_t r = rank;
        while (r < end && !((get(rows[r]) >> col) & 1u)) ++r;
        if (r == end) continue;
        std::swap(rows[rank], rows[r]);
        for (std::size_t o = begin; o < end; ++o) {
            if (o != rank && ((get(rows[o]) >> col) & 1u)) {
                rows[o].x ^= rows[rank].x;
                rows[o].z ^= rows[rank].z;
            }
        }
        pivots.push_back(col);
        ++rank;
    }
    return pivots;
}

}  // namespace families_detail

/// Independent generators (over GF(2), signs ignored) of the group spanned by `members`.
inline std::vector<PauliString> independent_generators(const std::vector<PauliString>& members) {
    std::vector<PauliString> basis;
    std::vector<std::uint64_t> reduced;
    for (const auto& p : members) {
        std::uint64_t v = p.key();
        for (std::uint64_t b : reduced) v = std::min(v, v ^ b);
        if (v == 0) continue;
        // Keep `reduced` sorted descending so the min-trick performs elimination on leading bits.
        reduced.push_back(v);
        std::sort(reduced.begin(), reduced.end(), std::greater<>());
        basis.push_back(p);
    }
    return basis;
}

/// Synthesizes a Clifford circuit over {H, Sdg, CX, CZ} that maps every member to a +/- Z-type string.
///
/// Symplectic Gaussian elimination over the generator tableau: Hadamards make
/// the X block full rank, CX clears it to an identity on pivot columns, Sdg and
/// CZ clear the Z block, and a final layer of Hadamards swaps X for Z.
inline Circuit diagonalizer_for(const std::vector<PauliString>& members) {
    using namespace families_detail;
    if (members.empty()) throw Error("diagonalizer_for: empty member list");
    const std::size_t n = members.front().num_qubits();
    for (const auto& p : members) {
        if (p.num_qubits() != n) throw Error("diagonalizer_for: members have different widths");
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (!commutes(members[i], members[j])) {
                throw Error("diagonalizer_for: " + members[i].label() + " and " + members[j].label() +
                            " do not commute");
            }
        }
    }
    std::vector<Row> rows;
    for (const auto& g : independent_generators(members)) rows.push_back({g.x(), g.z()});
    const std::size_t k = rows.size();
    if (std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.x == 0; })) return Circuit(n, "diagonalizer");

    std::vector<std::size_t> all_cols(n);
    for (std::size_t q = 0; q < n; ++q) all_cols[q] = q;
    auto get_x = [](const Row& r) { return r.x; };
    auto get_z = [](const Row& r) { return r.z; };

    Synthesizer syn(n, rows);
    const auto x_pivots = reduce(syn.rows(), 0, k, all_cols, get_x);
    std::vector<std::size_t> free_cols;
    for (std::size_t q = 0; q < n; ++q) {
        if (std::find(x_pivots.begin(), x_pivots.end(), q) == x_pivots.end()) free_cols.push_back(q);
    }
    const auto z_pivots = reduce(syn.rows(), x_pivots.size(), k, free_cols, get_z);
    if (x_pivots.size() + z_pivots.size() != k) throw Error("diagonalizer_for: generator tableau is not isotropic");
    for (std::size_t q : z_pivots) syn.h(q);

    const auto pivots = reduce(syn.rows(), 0, k, all_cols, get_x);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t m = 0; m < n; ++m) {
            if (m != pivots[i] && ((syn.rows()[i].x >> m) & 1u)) syn.cx(pivots[i], m);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t p = pivots[i];
        if ((syn.rows()[i].z >> p) & 1u) syn.sdg(p);
        for (std::size_t m = 0; m < n; ++m) {
            if (m != p && ((syn.rows()[i].z >> m) & 1u)) syn.cz(p, m);
        }
    }
    for (std::size_t p : pivots) syn.h(p);
    for (const auto& r : syn.rows()) {
        if (r.x != 0) throw Error("diagonalizer_for: synthesis left an X component");
    }
    return syn.take();
}

/// Outcome weights of `p` when measured after `diag`: with U p U^dagger = s Z^z,
/// entry j is s * (-1)^popcount(z & j).
inline EigenvalueVector eigenvalue_vector(const PauliString& p, const Circuit& diag) {
    const auto c = conjugate(SignedPauli{p, false}, diag);
    if (!c.pauli.is_z_type()) {
        throw Error("eigenvalue_vector: " + p.label() + " is not diagonal in this basis (conjugates to " +
                    c.pauli.label() + ")");
    }
    const std::size_t n = p.num_qubits();
    const std::uint64_t zmask = basis_mask(n, c.pauli.z());
    EigenvalueVector ev(std::size_t{1} << n);
    for (std::size_t j = 0; j < ev.size(); ++j) {
        const bool odd = std::popcount(j & zmask) % 2;
        ev[j] = static_cast<std::int8_t>((odd != c.negative) ? -1 : 1);
    }
    return ev;
}

inline PauliFamily make_family(std::size_t id, std::vector<PauliString> members) {
    PauliFamily f;
    f.id = id;
    f.num_qubits = members.at(0).num_qubits();
    f.diagonalizer = diagonalizer_for(members);
    for (const auto& m : members) f.eigenvalues.push_back(eigenvalue_vector(m, f.diagonalizer));
    f.members = std::move(members);
    f.rebuild_index();
    return f;
}

inline constexpr std::size_t kMaxPartitionQubits = 8;

/// Partitions all 4^n Pauli strings into 2^n + 1 maximal commuting families.
///
/// Family 0 holds the Z-type strings (identity first). Family 1 + a, for each
/// field element a of GF(2^n), holds {(x, A_a x) : x != 0} where
/// A_a[i][j] = Tr(a * alpha^(i+j)) is symmetric and A_a - A_b is invertible for
/// a != b; this makes each class isotropic and the classes disjoint.
inline std::vector<PauliFamily> partition_families(std::size_t n) {
    if (n < 1 || n > kMaxPartitionQubits) {
        throw Error("partition_families: n must be in 1.." + std::to_string(kMaxPartitionQubits) + ", got " +
                    std::to_string(n));
    }
    const families_detail::Gf2n field(n);
    const std::uint32_t size = 1u << n;
    std::vector<PauliFamily> out;
    out.reserve(size + 1);

    std::vector<PauliString> z_members{PauliString::identity(n)};
    for (std::uint32_t z = 1; z < size; ++z) z_members.emplace_back(n, 0, z);
    out.push_back(make_family(0, std::move(z_members)));

    std::vector<std::uint32_t> alpha(2 * n);
    for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = field.alpha_pow(k);

    for (std::uint32_t a = 0; a < size; ++a) {
        // Column j of A_a as a qubit bitmask.
        std::vector<std::uint32_t> col(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (field.trace(field.mul(a, alpha[i + j]))) col[j] |= 1u << i;
            }
        }
        std::vector<PauliString> members;
        for (std::uint32_t x = 1; x < size; ++x) {
            std::uint32_t z = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if ((x >> j) & 1u) z ^= col[j];
            }
            members.emplace_back(n, x, z);
        }
        out.push_back(make_family(1 + a, std::move(members)));
    }
    return out;
}

inline nlohmann::json family_to_json(const PauliFamily& f) {
    nlohmann::json members = nlohmann::json::array();
    nlohmann::json evs = nlohmann::json::object();
    for (std::size_t i = 0; i < f.members.size(); ++i) {
        members.push_back(f.members[i].label());
        std::vector<int> v(f.eigenvalues[i].begin(), f.eigenvalues[i].end());
        evs[f.members[i].label()] = v;
    }
    return {{"id", f.id},
            {"members", members},
            {"diagonalizer", {{"gates", gates_to_json(f.diagonalizer.gates())}}},
            {"eigenvalues", evs}};
}

inline nlohmann::json families_to_json(std::size_t n, const std::vector<PauliFamily>& families) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : families) arr.push_back(family_to_json(f));
    return {{"n", n}, {"families", arr}};
}

/// Index of the family containing `p`, if any.
inline std::optional<std::size_t> family_of(const std::vector<PauliFamily>& families, const PauliString& p) {
    for (std::size_t i = 0; i < families.size(); ++i) {
        if (families[i].contains(p)) return i;
    }
    return std::nullopt;
}

}  // namespace qops

#endif  // QOPS_FAMILIES_HPP
