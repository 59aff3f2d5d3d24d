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

#ifndef QOPS_PAULI_HPP
#define QOPS_PAULI_HPP

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/statevector.hpp"

namespace qops {

inline constexpr std::size_t kMaxPauliQubits = 32;

/// n-qubit Pauli string in symplectic form. Bit q of `x`/`z` belongs to qubit q.
/// Per qubit: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1). Labels read qubit 0 first.
class PauliString {
  public:
    PauliString() = default;

    PauliString(std::size_t n, std::uint32_t x, std::uint32_t z) : n_(n), x_(x), z_(z) {
        if (n == 0 || n > kMaxPauliQubits) throw Error("Pauli string width must be in 1..32");
        const std::uint32_t mask = n == 32 ? ~0u : ((1u << n) - 1);
        if ((x & ~mask) || (z & ~mask)) throw Error("Pauli string bits exceed its width");
    }

    static PauliString identity(std::size_t n) { return PauliString(n, 0, 0); }

    static PauliString from_label(std::string_view label) {
        if (label.empty() || label.size() > kMaxPauliQubits) {
            throw Error("Pauli label length must be in 1..32: '" + std::string(label) + "'");
        }
        std::uint32_t x = 0, z = 0;
        for (std::size_t q = 0; q < label.size(); ++q) {
            const std::uint32_t b = 1u << q;
            switch (label[q]) {
                case 'I': break;
                case 'X': x |= b; break;
                case 'Y': x |= b; z |= b; break;
                case 'Z': z |= b; break;
                default: throw Error("invalid Pauli label '" + std::string(label) + "'");
            }
        }
        return PauliString(label.size(), x, z);
    }

    std::string label() const {
        std::string s(n_, 'I');
        for (std::size_t q = 0; q < n_; ++q) s[q] = letter(q);
        return s;
    }

    char letter(std::size_t q) const {
        const bool xb = (x_ >> q) & 1u, zb = (z_ >> q) & 1u;
        return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }

    std::size_t num_qubits() const { return n_; }
    std::uint32_t x() const { return x_; }
    std::uint32_t z() const { return z_; }
    bool is_identity() const { return x_ == 0 && z_ == 0; }
    bool is_z_type() const { return x_ == 0; }
    std::size_t weight() const { return static_cast<std::size_t>(std::popcount(x_ | z_)); }

    /// Packs (x, z) into one key; unique for fixed n.
    std::uint64_t key() const { return (std::uint64_t{x_} << 32) | z_; }

    friend bool operator==(const PauliString&, const PauliString&) = default;
    friend auto operator<=>(const PauliString&, const PauliString&) = default;

  private:
    std::size_t n_ = 1;
    std::uint32_t x_ = 0;
    std::uint32_t z_ = 0;
};

/// Symplectic inner product test: a and b commute iff a.x.b.z + a.z.b.x is even.
inline bool commutes(const PauliString& a, const PauliString& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error("commutes: Pauli strings have different lengths");
    return std::popcount((a.x() & b.z()) ^ (a.z() & b.x())) % 2 == 0;
}

/// A Pauli string with a +/-1 sign. Letters are literal (Y is Y, not XZ).
struct SignedPauli {
    PauliString pauli;
    bool negative = false;
};

namespace pauli_detail {

struct Bits {
    std::uint32_t x, z;
    bool neg;
};

inline bool get(std::uint32_t v, std::size_t q) { return (v >> q) & 1u; }
inline void put(std::uint32_t& v, std::size_t q, bool b) { v = b ? (v | (1u << q)) : (v & ~(1u << q)); }

inline void conj_h(Bits& p, std::size_t q) {
    const bool xb = get(p.x, q), zb = get(p.z, q);
    p.neg ^= xb && zb;
    put(p.x, q, zb);
    put(p.z, q, xb);
}

inline void conj_s(Bits& p, std::size_t q) {
    const bool xb = get(p.x, q), zb = get(p.z, q);
    p.neg ^= xb && zb;
    put(p.z, q, zb ^ xb);
}

inline void conj_cx(Bits& p, std::size_t c, std::size_t t) {
    const bool xc = get(p.x, c), zc = get(p.z, c), xt = get(p.x, t), zt = get(p.z, t);
    p.neg ^= xc && zt && (xt == zc);
    put(p.x, t, xt ^ xc);
    put(p.z, c, zc ^ zt);
}

}  // namespace pauli_detail

/// Returns g P g^dagger for a Clifford gate g (H, X, Y, Z, S, Sdg, CX, CZ, SWAP).
inline SignedPauli conjugate(const SignedPauli& p, const Gate& g) {
    using namespace pauli_detail;
    Bits b{p.pauli.x(), p.pauli.z(), p.negative};
    const std::size_t q = g.targets[0];
    switch (g.kind) {
        case GateKind::H: conj_h(b, q); break;
        case GateKind::S: conj_s(b, q); break;
        case GateKind::Sdg:
            conj_s(b, q);
            conj_s(b, q);
            conj_s(b, q);
            break;
        case GateKind::X: b.neg ^= get(b.z, q); break;
        case GateKind::Z: b.neg ^= get(b.x, q); break;
        case GateKind::Y: b.neg ^= get(b.x, q) ^ get(b.z, q); break;
        case GateKind::CX: conj_cx(b, g.targets[0], g.targets[1]); break;
        case GateKind::CZ:
            conj_h(b, g.targets[1]);
            conj_cx(b, g.targets[0], g.targets[1]);
            conj_h(b, g.targets[1]);
            break;
        case GateKind::SWAP: {
            const std::size_t a = g.targets[0], c = g.targets[1];
            const bool xa = get(b.x, a), za = get(b.z, a);
            put(b.x, a, get(b.x, c));
            put(b.z, a, get(b.z, c));
            put(b.x, c, xa);
            put(b.z, c, za);
            break;
        }
        default: throw Error("conjugate: gate " + std::string(gate_name(g.kind)) + " is not Clifford");
    }
    return {PauliString(p.pauli.num_qubits(), b.x, b.z), b.neg};
}

/// U P U^dagger where U is the unitary of `c` (first gate applied first).
inline SignedPauli conjugate(const SignedPauli& p, const Circuit& c) {
    if (c.num_qubits() != p.pauli.num_qubits()) throw Error("conjugate: circuit and Pauli widths differ");
    SignedPauli out = p;
    for (const auto& g : c.gates()) out = conjugate(out, g);
    return out;
}

/// Qubit bitmask (bit q = qubit q) converted to a basis-index mask.
inline std::uint64_t basis_mask(std::size_t num_qubits, std::uint32_t qubit_mask) {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < num_qubits; ++q) {
        if ((qubit_mask >> q) & 1u) m |= qubit_bit(num_qubits, q);
    }
    return m;
}

/// Exact <psi|P|psi> evaluated directly from the amplitudes.
inline double expectation(const StateVector& state, const PauliString& p) {
    if (state.num_qubits() != p.num_qubits()) throw Error("expectation: state and Pauli widths differ");
    const std::size_t n = p.num_qubits();
    const std::uint64_t flip = basis_mask(n, p.x());
    const std::uint64_t zmask = basis_mask(n, p.z());
    // P|j> = i^{#Y} (-1)^{|j & z|} |j ^ x>
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex yphase = kIPow[std::popcount(p.x() & p.z()) % 4];
    Complex acc{0.0, 0.0};
    const auto amps = state.amplitudes();
    for (std::size_t j = 0; j < amps.size(); ++j) {
        const double sign = std::popcount(j & zmask) % 2 ? -1.0 : 1.0;
        acc += std::conj(amps[j ^ flip]) * amps[j] * sign;
    }
    return (acc * yphase).real();
}

}  // namespace qops

#endif  // QOPS_PAULI_HPP
