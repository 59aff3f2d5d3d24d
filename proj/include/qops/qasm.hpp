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

#ifndef QOPS_QASM_HPP
#define QOPS_QASM_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qops/circuit.hpp"
#include "qops/error.hpp"

namespace qops {

namespace qasm_detail {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            const std::size_t l0 = line, c0 = col;
            const auto close = src.find("*/", i + 2);
            if (close == std::string_view::npos) throw ParseError(l0, c0, "unterminated block comment");
            advance(close + 2 - i);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.type = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                                    std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            t.type = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
        } else if (c == '"') {
            const auto close = src.find('"', i + 1);
            if (close == std::string_view::npos) throw ParseError(line, col, "unterminated string literal");
            t.type = Tok::String;
            t.text = std::string(src.substr(i + 1, close - i - 1));
        } else if (src.substr(i, 2) == "->" || src.substr(i, 2) == "==") {
            t.type = Tok::Symbol;
            t.text = std::string(src.substr(i, 2));
        } else if (std::string_view(";,()[]{}+-*/^").find(c) != std::string_view::npos) {
            t.type = Tok::Symbol;
            t.text = std::string(1, c);
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        const std::size_t len = t.type == Tok::String ? t.text.size() + 2 : t.text.size();
        out.push_back(std::move(t));
        advance(len);
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

struct QubitRef {
    std::optional<std::size_t> index;  // nullopt: whole register
    std::size_t line, column;
};

class Parser {
  public:
    explicit Parser(std::string_view src, std::string name) : toks_(tokenize(src)), name_(std::move(name)) {}

    Circuit parse() {
        if (peek_ident("OPENQASM")) {
            next();
            expect_type(Tok::Number, "version number");
            expect_symbol(";");
        }
        while (peek().type != Tok::End) statement();
        if (!circuit_) throw ParseError(peek().line, peek().column, "no quantum register declared");
        return std::move(*circuit_);
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool peek_ident(std::string_view s) const { return peek().type == Tok::Ident && peek().text == s; }
    bool peek_symbol(std::string_view s) const { return peek().type == Tok::Symbol && peek().text == s; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.column, msg); }

    std::string describe(const Token& t) const {
        return t.type == Tok::End ? std::string("end of input") : "'" + t.text + "'";
    }

    const Token& expect_symbol(std::string_view s) {
        if (!peek_symbol(s)) fail(peek(), "expected '" + std::string(s) + "', found " + describe(peek()));
        return next();
    }

    const Token& expect_type(Tok type, const std::string& what) {
        if (peek().type != type) fail(peek(), "expected " + what + ", found " + describe(peek()));
        return next();
    }

    std::size_t parse_size() {
        const Token& t = expect_type(Tok::Number, "integer");
        if (t.text.find_first_not_of("0123456789") != std::string::npos) fail(t, "expected integer, found " + t.text);
        return std::stoul(t.text);
    }

    void statement() {
        const Token& head = peek();
        if (head.type != Tok::Ident) fail(head, "expected statement, found " + describe(head));
        const std::string kw = head.text;
        if (kw == "include") {
            next();
            expect_type(Tok::String, "file name");
            expect_symbol(";");
        } else if (kw == "qreg") {
            next();
            if (circuit_) fail(head, "only a single quantum register is supported");
            reg_ = expect_type(Tok::Ident, "register name").text;
            expect_symbol("[");
            const Token& size_tok = peek();
            const std::size_t n = parse_size();
            if (n == 0) fail(size_tok, "quantum register must have at least one qubit");
            expect_symbol("]");
            expect_symbol(";");
            circuit_.emplace(n, name_);
        } else if (kw == "creg") {
            next();
            expect_type(Tok::Ident, "register name");
            expect_symbol("[");
            parse_size();
            expect_symbol("]");
            expect_symbol(";");
        } else if (kw == "measure") {
            next();
            skip_to_semicolon();
        } else if (kw == "barrier") {
            next();
            skip_to_semicolon();
        } else if (kw == "gate" || kw == "opaque" || kw == "if" || kw == "reset") {
            fail(head, "unsupported statement '" + kw + "'");
        } else {
            gate_statement();
        }
    }

    void skip_to_semicolon() {
        while (!peek_symbol(";")) {
            if (peek().type == Tok::End) fail(peek(), "expected ';', found end of input");
            next();
        }
        next();
    }

    // Expressions: sums of products with unary minus, '^', pi, and a few functions.
    double expr() {
        double v = term();
        while (peek_symbol("+") || peek_symbol("-")) {
            const bool plus = next().text == "+";
            const double r = term();
            v = plus ? v + r : v - r;
        }
        return v;
    }

    double term() {
        double v = power();
        while (peek_symbol("*") || peek_symbol("/")) {
            const bool mul = next().text == "*";
            const double r = power();
            v = mul ? v * r : v / r;
        }
        return v;
    }

    double power() {
        const double base = unary();
        if (peek_symbol("^")) {
            next();
            return std::pow(base, power());
        }
        return base;
    }

    double unary() {
        if (peek_symbol("-")) {
            next();
            return -unary();
        }
        if (peek_symbol("+")) {
            next();
            return unary();
        }
        return primary();
    }

    double primary() {
        const Token& t = peek();
        if (t.type == Tok::Number) {
            next();
            return std::stod(t.text);
        }
        if (peek_symbol("(")) {
            next();
            const double v = expr();
            expect_symbol(")");
            return v;
        }
        if (t.type == Tok::Ident) {
            next();
            if (t.text == "pi") return std::numbers::pi;
            using Fn = double (*)(double);
            Fn fn = nullptr;
            if (t.text == "sin") fn = [](double x) { return std::sin(x); };
            else if (t.text == "cos") fn = [](double x) { return std::cos(x); };
            else if (t.text == "tan") fn = [](double x) { return std::tan(x); };
            else if (t.text == "exp") fn = [](double x) { return std::exp(x); };
            else if (t.text == "ln") fn = [](double x) { return std::log(x); };
            else if (t.text == "sqrt") fn = [](double x) { return std::sqrt(x); };
            if (!fn) fail(t, "unknown identifier '" + t.text + "' in expression");
            expect_symbol("(");
            const double v = expr();
            expect_symbol(")");
            return fn(v);
        }
        fail(t, "expected expression, found " + describe(t));
    }

    QubitRef qubit_ref() {
        const Token& t = expect_type(Tok::Ident, "qubit argument");
        if (!circuit_) fail(t, "gate applied before any quantum register was declared");
        if (t.text != reg_) fail(t, "unknown quantum register '" + t.text + "'");
        QubitRef ref{std::nullopt, t.line, t.column};
        if (peek_symbol("[")) {
            next();
            const Token& idx_tok = peek();
            const std::size_t idx = parse_size();
            if (idx >= circuit_->num_qubits()) {
                fail(idx_tok, "index " + std::to_string(idx) + " out of range for register " + reg_ + "[" +
                                  std::to_string(circuit_->num_qubits()) + "]");
            }
            expect_symbol("]");
            ref.index = idx;
        }
        return ref;
    }

    void gate_statement() {
        const Token head = next();
        std::vector<double> params;
        if (peek_symbol("(")) {
            next();
            if (!peek_symbol(")")) {
                params.push_back(expr());
                while (peek_symbol(",")) {
                    next();
                    params.push_back(expr());
                }
            }
            expect_symbol(")");
        }
        std::vector<QubitRef> args{qubit_ref()};
        while (peek_symbol(",")) {
            next();
            args.push_back(qubit_ref());
        }
        expect_symbol(";");

        const std::size_t n = circuit_->num_qubits();
        // Broadcast whole-register arguments: every register argument must span all n qubits.
        const bool broadcast = std::any_of(args.begin(), args.end(), [](const QubitRef& r) { return !r.index; });
        const std::size_t reps = broadcast ? n : 1;
        for (std::size_t k = 0; k < reps; ++k) {
            std::vector<std::size_t> qubits;
            for (const auto& a : args) qubits.push_back(a.index ? *a.index : k);
            emit(head, params, qubits);
        }
    }

    void check_shape(const Token& head, const std::vector<double>& params, std::size_t nparams,
                     const std::vector<std::size_t>& qubits, std::size_t nqubits) {
        if (params.size() != nparams) {
            fail(head, "gate '" + head.text + "' expects " + std::to_string(nparams) + " parameter(s), got " +
                           std::to_string(params.size()));
        }
        if (qubits.size() != nqubits) {
            fail(head, "gate '" + head.text + "' expects " + std::to_string(nqubits) + " qubit(s), got " +
                           std::to_string(qubits.size()));
        }
        if (nqubits == 2 && qubits[0] == qubits[1]) fail(head, "gate '" + head.text + "' repeats a qubit");
    }

    void emit(const Token& head, const std::vector<double>& p, const std::vector<std::size_t>& q) {
        const std::string& g = head.text;
        auto add = [&](GateKind k, std::vector<std::size_t> targets, std::vector<double> params = {}) {
            circuit_->append(make_gate(k, std::move(targets), std::move(params)));
        };
        struct Fixed {
            std::string_view name;
            GateKind kind;
        };
        static constexpr Fixed kFixed1[] = {{"h", GateKind::H},     {"x", GateKind::X},   {"y", GateKind::Y},
                                            {"z", GateKind::Z},     {"s", GateKind::S},   {"sdg", GateKind::Sdg},
                                            {"t", GateKind::T},     {"tdg", GateKind::Tdg}};
        for (const auto& f : kFixed1) {
            if (g == f.name) {
                check_shape(head, p, 0, q, 1);
                add(f.kind, {q[0]});
                return;
            }
        }
        if (g == "id") {
            check_shape(head, p, 0, q, 1);
            return;
        }
        if (g == "rx" || g == "ry" || g == "rz") {
            check_shape(head, p, 1, q, 1);
            add(g == "rx" ? GateKind::RX : g == "ry" ? GateKind::RY : GateKind::RZ, {q[0]}, {p[0]});
            return;
        }
        if (g == "sx" || g == "sxdg") {
            check_shape(head, p, 0, q, 1);
            add(GateKind::RX, {q[0]}, {g == "sx" ? std::numbers::pi / 2 : -std::numbers::pi / 2});
            return;
        }
        // u-family gates are decomposed up to global phase: u3(t,f,l) = RZ(f) RY(t) RZ(l).
        if (g == "u1" || g == "p") {
            check_shape(head, p, 1, q, 1);
            add(GateKind::RZ, {q[0]}, {p[0]});
            return;
        }
        if (g == "u2") {
            check_shape(head, p, 2, q, 1);
            add(GateKind::RZ, {q[0]}, {p[1]});
            add(GateKind::RY, {q[0]}, {std::numbers::pi / 2});
            add(GateKind::RZ, {q[0]}, {p[0]});
            return;
        }
        if (g == "u3" || g == "u" || g == "U") {
            check_shape(head, p, 3, q, 1);
            add(GateKind::RZ, {q[0]}, {p[2]});
            add(GateKind::RY, {q[0]}, {p[0]});
            add(GateKind::RZ, {q[0]}, {p[1]});
            return;
        }
        if (g == "cx" || g == "CX") {
            check_shape(head, p, 0, q, 2);
            add(GateKind::CX, {q[0], q[1]});
            return;
        }
        if (g == "cz") {
            check_shape(head, p, 0, q, 2);
            add(GateKind::CZ, {q[0], q[1]});
            return;
        }
        if (g == "swap") {
            check_shape(head, p, 0, q, 2);
            add(GateKind::SWAP, {q[0], q[1]});
            return;
        }
        fail(head, "unsupported gate '" + g + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string name_;
    std::string reg_;
    std::optional<Circuit> circuit_;
};

inline std::string format_angle(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace qasm_detail

/// Parses an OpenQASM 2.0 program with a single quantum register.
///
/// Measurement and barrier statements are dropped. u1/u2/u3/p/sx are lowered
/// to rotations (global phase is discarded). Throws ParseError with a 1-based
/// line and column on malformed or unsupported input.
inline Circuit parse_qasm(std::string_view text, std::string name = "circuit") {
    return qasm_detail::Parser(text, std::move(name)).parse();
}

inline Circuit load_qasm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto stem = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
    return parse_qasm(ss.str(), stem);
}

/// Emits OpenQASM 2.0 that parse_qasm maps back onto the same gate list.
inline std::string to_qasm(const Circuit& c) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" + std::to_string(c.num_qubits()) + "];\n";
    for (const auto& g : c.gates()) {
        std::string name(gate_name(g.kind));
        for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        out += name;
        if (!g.params.empty()) out += "(" + qasm_detail::format_angle(g.params[0]) + ")";
        out += " ";
        for (std::size_t i = 0; i < g.targets.size(); ++i) {
            if (i) out += ",";
            out += "q[" + std::to_string(g.targets[i]) + "]";
        }
        out += ";\n";
    }
    return out;
}

}  // namespace qops

#endif  // QOPS_QASM_HPP
