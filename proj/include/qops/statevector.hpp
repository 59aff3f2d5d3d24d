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

#ifndef QOPS_STATEVECTOR_HPP
#define QOPS_STATEVECTOR_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <algorithm>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qops/circuit.hpp"
#include "qops/error.hpp"
#include "qops/random.hpp"

namespace qops {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxSimulatedQubits = 16;

// Bit order: qubit q occupies bit (n - 1 - q) of a basis index, so the binary
// rendering of an index reads qubit 0 first ("01" means qubit 0 = 0, qubit 1 = 1).

inline std::uint64_t qubit_bit(std::size_t num_qubits, std::size_t qubit) {
    return std::uint64_t{1} << (num_qubits - 1 - qubit);
}

inline std::string index_to_bitstring(std::uint64_t index, std::size_t num_qubits) {
    std::string s(num_qubits, '0');
    for (std::size_t q = 0; q < num_qubits; ++q) {
        if (index & qubit_bit(num_qubits, q)) s[q] = '1';
    }
    return s;
}

inline std::uint64_t bitstring_to_index(const std::string& bits) {
    std::uint64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw Error("invalid bitstring '" + bits + "'");
        idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return idx;
}

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits == 0 || num_qubits > kMaxSimulatedQubits) {
            throw Error("statevector simulation supports 1.." + std::to_string(kMaxSimulatedQubits) +
                        " qubits, got " + std::to_string(num_qubits));
        }
        amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
        amps_[0] = 1.0;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    void apply(const Gate& g) {
        using namespace std::complex_literals;
        const double r = 1.0 / std::numbers::sqrt2;
        switch (g.kind) {
            case GateKind::H: apply_1q(g.targets[0], r, r, r, -r); break;
            case GateKind::X: apply_1q(g.targets[0], 0, 1, 1, 0); break;
            case GateKind::Y: apply_1q(g.targets[0], 0, -1i, 1i, 0); break;
            case GateKind::Z: apply_phase(g.targets[0], -1.0); break;
            case GateKind::S: apply_phase(g.targets[0], 1i); break;
            case GateKind::Sdg: apply_phase(g.targets[0], -1i); break;
            case GateKind::T: apply_phase(g.targets[0], std::polar(1.0, std::numbers::pi / 4)); break;
            case GateKind::Tdg: apply_phase(g.targets[0], std::polar(1.0, -std::numbers::pi / 4)); break;
            case GateKind::RX: {
                const double c = std::cos(g.params[0] / 2), s = std::sin(g.params[0] / 2);
                apply_1q(g.targets[0], c, Complex(0, -s), Complex(0, -s), c);
                break;
            }
            case GateKind::RY: {
                const double c = std::cos(g.params[0] / 2), s = std::sin(g.params[0] / 2);
                apply_1q(g.targets[0], c, -s, s, c);
                break;
            }
            case GateKind::RZ:
                apply_1q(g.targets[0], std::polar(1.0, -g.params[0] / 2), 0, 0, std::polar(1.0, g.params[0] / 2));
                break;
            case GateKind::CX: {
                const auto c = bit(g.targets[0]), t = bit(g.targets[1]);
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if ((i & c) && !(i & t)) std::swap(amps_[i], amps_[i | t]);
                }
                break;
            }
            case GateKind::CZ: {
                const auto a = bit(g.targets[0]), b = bit(g.targets[1]);
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if ((i & a) && (i & b)) amps_[i] = -amps_[i];
                }
                break;
            }
            case GateKind::SWAP: {
                const auto a = bit(g.targets[0]), b = bit(g.targets[1]);
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if ((i & a) && !(i & b)) std::swap(amps_[i], amps_[(i & ~a) | b]);
                }
                break;
            }
        }
    }

    void apply(const Circuit& c) {
        check_width(c);
        for (const auto& g : c.gates()) apply(g);
    }

    void check_width(const Circuit& c) const {
        if (c.num_qubits() != num_qubits_) {
            throw Error("circuit acts on " + std::to_string(c.num_qubits()) + " qubits but state has " +
                        std::to_string(num_qubits_));
        }
    }

  private:
    std::size_t bit(std::size_t q) const { return static_cast<std::size_t>(qubit_bit(num_qubits_, q)); }

    // [[m00 m01] [m10 m11]] acting on one qubit.
    void apply_1q(std::size_t q, Complex m00, Complex m01, Complex m10, Complex m11) {
        const auto b = bit(q);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & b) continue;
            const Complex a0 = amps_[i], a1 = amps_[i | b];
            amps_[i] = m00 * a0 + m01 * a1;
            amps_[i | b] = m10 * a0 + m11 * a1;
        }
    }

    void apply_phase(std::size_t q, Complex phase) {
        const auto b = bit(q);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & b) amps_[i] *= phase;
        }
    }

    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

/// Exact statevector of `circuit` applied to |0...0>.
inline StateVector simulate(const Circuit& circuit) {
    StateVector sv(circuit.num_qubits());
    sv.apply(circuit);
    return sv;
}

/// Sparse map from n-bit outcome strings to probabilities. Absent keys are zero.
struct OutcomeDistribution {
    std::size_t num_qubits = 1;
    std::map<std::string, double> probs;

    double at(const std::string& bits) const {
        const auto it = probs.find(bits);
        return it == probs.end() ? 0.0 : it->second;
    }

    double total() const {
        double s = 0.0;
        for (const auto& [k, p] : probs) s += p;
        return s;
    }

    /// Dense vector indexed by basis index.
    std::vector<double> dense() const {
        std::vector<double> out(std::size_t{1} << num_qubits, 0.0);
        for (const auto& [k, p] : probs) out[bitstring_to_index(k)] = p;
        return out;
    }

    friend bool operator==(const OutcomeDistribution&, const OutcomeDistribution&) = default;
};

/// Probabilities at or below this are dropped from sparse storage.
inline constexpr double kProbabilityFloor = 1e-15;

inline OutcomeDistribution distribution_from_dense(std::span<const double> probs, std::size_t num_qubits) {
    OutcomeDistribution d{num_qubits, {}};
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > kProbabilityFloor) d.probs.emplace(index_to_bitstring(i, num_qubits), probs[i]);
    }
    return d;
}

inline std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> p(state.dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
    return p;
}

/// Dense outcome probabilities after rotating `state` by `basis_change`.
inline std::vector<double> measure_probabilities(const StateVector& state, const Circuit& basis_change) {
    StateVector rotated = state;
    rotated.apply(basis_change);
    return probabilities(rotated);
}

/// Outcome distribution of `state` measured in the basis defined by `basis_change`.
/// An empty basis change is a computational-basis (Z) measurement.
inline OutcomeDistribution measure_distribution(const StateVector& state, const Circuit& basis_change) {
    return distribution_from_dense(measure_probabilities(state, basis_change), state.num_qubits());
}

/// Inverse-CDF sampler over dense outcome probabilities; one uniform per draw.
class OutcomeSampler {
  public:
    explicit OutcomeSampler(std::span<const double> probs) : probs_(probs.begin(), probs.end()), cdf_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) cdf_[i] = (acc += probs_[i]);
    }

    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform() * cdf_.back();
        auto idx = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
        if (idx == cdf_.size()) {
            idx = cdf_.size() - 1;
            while (idx > 0 && probs_[idx] <= 0.0) --idx;
        }
        return idx;
    }

  private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

/// Histogram of `shots` draws from dense probabilities.
inline std::vector<std::uint64_t> sample_histogram(std::span<const double> probs, std::uint64_t shots, Rng& rng) {
    const OutcomeSampler sampler(probs);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) ++counts[sampler.draw(rng)];
    return counts;
}

inline std::vector<double> frequencies(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    std::vector<double> f(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return f;
}

/// Multinomial resampling of `dist` normalized to frequencies.
inline OutcomeDistribution sample_counts(const OutcomeDistribution& dist, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw Error("shots must be at least 1");
    Rng rng(seed);
    const auto dense = dist.dense();
    const auto counts = sample_histogram(dense, shots, rng);
    const auto freq = frequencies(counts);
    OutcomeDistribution out{dist.num_qubits, {}};
    for (std::size_t i = 0; i < freq.size(); ++i) {
        if (counts[i]) out.probs.emplace(index_to_bitstring(i, dist.num_qubits), freq[i]);
    }
    return out;
}

}  // namespace qops

#endif  // QOPS_STATEVECTOR_HPP
