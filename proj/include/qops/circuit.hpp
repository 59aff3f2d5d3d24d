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

#ifndef QOPS_CIRCUIT_HPP
#define QOPS_CIRCUIT_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qops/error.hpp"

namespace qops {

enum class GateKind { H, X, Y, Z, S, Sdg, T, Tdg, RX, RY, RZ, CX, CZ, SWAP };

inline constexpr std::array<GateKind, 14> kAllGateKinds{
    GateKind::H,  GateKind::X,  GateKind::Y,  GateKind::Z,  GateKind::S,  GateKind::Sdg, GateKind::T,
    GateKind::Tdg, GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CX, GateKind::CZ, GateKind::SWAP};

inline constexpr std::string_view gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "Sdg";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "Tdg";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::CX: return "CX";
        case GateKind::CZ: return "CZ";
        case GateKind::SWAP: return "SWAP";
    }
    return "?";
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    for (GateKind k : kAllGateKinds) {
        if (gate_name(k) == name) return k;
    }
    return std::nullopt;
}

inline constexpr std::size_t gate_arity(GateKind k) {
    return (k == GateKind::CX || k == GateKind::CZ || k == GateKind::SWAP) ? 2 : 1;
}

inline constexpr std::size_t gate_param_count(GateKind k) {
    return (k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ) ? 1 : 0;
}

/// True for gates in the Clifford group regardless of parameters (rotations excluded).
inline constexpr bool is_clifford_kind(GateKind k) {
    return !(k == GateKind::T || k == GateKind::Tdg || gate_param_count(k) == 1);
}

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<double> params;
    std::vector<std::size_t> targets;

    friend bool operator==(const Gate&, const Gate&) = default;
};

inline Gate make_gate(GateKind kind, std::vector<std::size_t> targets, std::vector<double> params = {}) {
    return Gate{kind, std::move(params), std::move(targets)};
}

/// Throws Error if `g` is malformed for an `num_qubits`-qubit register.
inline void validate_gate(const Gate& g, std::size_t num_qubits) {
    const std::string name(gate_name(g.kind));
    if (g.targets.size() != gate_arity(g.kind)) {
        throw Error("gate " + name + " expects " + std::to_string(gate_arity(g.kind)) + " target(s), got " +
                    std::to_string(g.targets.size()));
    }
    if (g.params.size() != gate_param_count(g.kind)) {
        throw Error("gate " + name + " expects " + std::to_string(gate_param_count(g.kind)) +
                    " parameter(s), got " + std::to_string(g.params.size()));
    }
    for (std::size_t t : g.targets) {
        if (t >= num_qubits) {
            throw Error("gate " + name + " targets qubit " + std::to_string(t) + " outside register of size " +
                        std::to_string(num_qubits));
        }
    }
    if (g.targets.size() == 2 && g.targets[0] == g.targets[1]) {
        throw Error("gate " + name + " has repeated target qubit " + std::to_string(g.targets[0]));
    }
}

/// Inverse gate. Rotations negate their angle; S/T swap with their adjoints.
inline Gate inverse(const Gate& g) {
    Gate out = g;
    switch (g.kind) {
        case GateKind::S: out.kind = GateKind::Sdg; break;
        case GateKind::Sdg: out.kind = GateKind::S; break;
        case GateKind::T: out.kind = GateKind::Tdg; break;
        case GateKind::Tdg: out.kind = GateKind::T; break;
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ: out.params[0] = -g.params[0]; break;
        default: break;
    }
    return out;
}

/// An ordered gate list over a fixed register. The first gate is applied first.
class Circuit {
  public:
    Circuit() = default;

    explicit Circuit(std::size_t num_qubits, std::string name = "circuit")
        : num_qubits_(num_qubits), name_(std::move(name)) {
        if (num_qubits == 0) throw Error("circuit must have at least one qubit");
    }

    Circuit(std::size_t num_qubits, std::vector<Gate> gates, std::string name = "circuit")
        : Circuit(num_qubits, std::move(name)) {
        for (auto& g : gates) append(std::move(g));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& append(Gate g) {
        validate_gate(g, num_qubits_);
        gates_.push_back(std::move(g));
        return *this;
    }

    Circuit& append(GateKind kind, std::vector<std::size_t> targets, std::vector<double> params = {}) {
        return append(make_gate(kind, std::move(targets), std::move(params)));
    }

    Circuit& extend(const Circuit& other) {
        if (other.num_qubits_ != num_qubits_) throw Error("cannot concatenate circuits of different width");
        for (const auto& g : other.gates_) gates_.push_back(g);
        return *this;
    }

    /// Inserts before position `pos` (pos == size() appends).
    Circuit& insert(std::size_t pos, Gate g) {
        validate_gate(g, num_qubits_);
        if (pos > gates_.size()) throw Error("insertion position out of range");
        gates_.insert(gates_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(g));
        return *this;
    }

    Circuit& erase(std::size_t pos) {
        if (pos >= gates_.size()) throw Error("erase position out of range");
        gates_.erase(gates_.begin() + static_cast<std::ptrdiff_t>(pos));
        return *this;
    }

    Circuit& replace(std::size_t pos, Gate g) {
        validate_gate(g, num_qubits_);
        if (pos >= gates_.size()) throw Error("replace position out of range");
        gates_[pos] = std::move(g);
        return *this;
    }

    Circuit inverse() const {
        Circuit out(num_qubits_, name_ + "_inv");
        for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(qops::inverse(*it));
        return out;
    }

    bool is_clifford() const {
        return std::all_of(gates_.begin(), gates_.end(), [](const Gate& g) { return is_clifford_kind(g.kind); });
    }

    /// Structural equality; the name is not compared.
    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.num_qubits_ == b.num_qubits_ && a.gates_ == b.gates_;
    }

  private:
    std::size_t num_qubits_ = 1;
    std::vector<Gate> gates_;
    std::string name_ = "circuit";
};

inline nlohmann::json gate_to_json(const Gate& g) {
    return {{"kind", std::string(gate_name(g.kind))}, {"params", g.params}, {"targets", g.targets}};
}

inline Gate gate_from_json(const nlohmann::json& j) {
    const auto name = j.at("kind").get<std::string>();
    const auto kind = gate_kind_from_name(name);
    if (!kind) throw Error("unknown gate kind '" + name + "'");
    Gate g{*kind, j.value("params", std::vector<double>{}), j.at("targets").get<std::vector<std::size_t>>()};
    return g;
}

inline nlohmann::json gates_to_json(const std::vector<Gate>& gates) {
    auto arr = nlohmann::json::array();
    for (const auto& g : gates) arr.push_back(gate_to_json(g));
    return arr;
}

inline nlohmann::json circuit_to_json(const Circuit& c) {
    return {{"name", c.name()}, {"num_qubits", c.num_qubits()}, {"gates", gates_to_json(c.gates())}};
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
    try {
        Circuit c(j.at("num_qubits").get<std::size_t>(), j.value("name", std::string("circuit")));
        for (const auto& g : j.at("gates")) c.append(gate_from_json(g));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed circuit JSON: ") + e.what());
    }
}

}  // namespace qops

#endif  // QOPS_CIRCUIT_HPP
