#pragma once

// PSVN domains: fixed-length symbol vectors rewritten by pattern operators.
//
// File grammar (line oriented, '#' starts a comment):
//
//   domain <ident>
//   alphabet <sym> <sym> ...
//   length <n>
//   position <i> <sym> ...              (optional, 0-based, repeatable)
//   op <label>: <cell>{n} => <cell>{n}  (cell := symbol | $var | _)
//   goal <sym>{n}

#include "error.hpp"

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spurion {

using Symbol = std::uint8_t;
inline constexpr std::size_t kMaxSymbols = 256;
inline constexpr std::size_t kMaxVariables = 64;

using StateVector = std::vector<Symbol>;
using SymbolSet = std::bitset<kMaxSymbols>;

enum class CellKind : std::uint8_t { Const, Var, Underscore };

struct Cell {
    CellKind kind = CellKind::Underscore;
    // Symbol id for Const, variable index for Var.
    std::uint8_t value = 0;

    static constexpr Cell constant(Symbol s) { return {CellKind::Const, s}; }
    static constexpr Cell variable(std::uint8_t v) { return {CellKind::Var, v}; }
    static constexpr Cell underscore() { return {CellKind::Underscore, 0}; }

    bool is_const() const { return kind == CellKind::Const; }
    bool is_var() const { return kind == CellKind::Var; }
    bool is_underscore() const { return kind == CellKind::Underscore; }

    friend bool operator==(const Cell &, const Cell &) = default;
    friend auto operator<=>(const Cell &, const Cell &) = default;
};

using Pattern = std::vector<Cell>;

struct Operator {
    std::string label;
    Pattern lhs;
    Pattern rhs;
    // Names indexed by variable id; ids are assigned in order of first lhs occurrence.
    std::vector<std::string> var_names;

    std::size_t num_vars() const { return var_names.size(); }

    friend bool operator==(const Operator &a, const Operator &b) {
        return a.label == b.label && a.lhs == b.lhs && a.rhs == b.rhs &&
               a.var_names == b.var_names;
    }
};

// Variable id -> bound symbol.
using Binding = std::vector<std::optional<Symbol>>;

struct Domain {
    std::string name;
    std::vector<std::string> alphabet;
    std::size_t state_len = 0;
    std::vector<SymbolSet> position_domains;
    std::vector<Operator> operators;
    StateVector goal;

    std::optional<Symbol> find_symbol(std::string_view name) const {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == name)
                return static_cast<Symbol>(i);
        return std::nullopt;
    }

    Symbol symbol(std::string_view name) const {
        auto s = find_symbol(name);
        if (!s)
            throw Error(ErrorKind::Domain, "symbol not in alphabet: " + std::string(name));
        return *s;
    }

    StateVector state(std::initializer_list<std::string_view> names) const {
        StateVector s;
        s.reserve(names.size());
        for (auto n : names)
            s.push_back(symbol(n));
        return s;
    }

    StateVector state(const std::vector<std::string> &names) const {
        StateVector s;
        s.reserve(names.size());
        for (const auto &n : names)
            s.push_back(symbol(n));
        return s;
    }

    bool is_valid_state(std::span<const Symbol> s) const {
        if (s.size() != state_len)
            return false;
        for (std::size_t i = 0; i < state_len; ++i)
            if (!position_domains[i].test(s[i]))
                return false;
        return true;
    }

    std::string format(std::span<const Symbol> s) const {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i)
                out += ' ';
            out += alphabet[s[i]];
        }
        return out;
    }

    friend bool operator==(const Domain &, const Domain &) = default;
};

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        if (i >= line.size() || line[i] == '#')
            break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
               line[i] != '#')
            ++i;
        tokens.push_back({line.substr(start, i - start), start + 1});
    }
    return tokens;
}

inline bool parse_size(std::string_view text, std::size_t &out) {
    if (text.empty())
        return false;
    std::size_t v = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            return false;
        v = v * 10 + static_cast<std::size_t>(c - '0');
        if (v > (std::size_t{1} << 40))
            return false;
    }
    out = v;
    return true;
}

} // namespace detail

inline Domain parse_domain(std::string_view source) {
    using detail::Token;
    Domain d;
    bool have_alphabet = false, have_length = false, have_goal = false;
    std::unordered_map<std::string, Symbol> symbol_index;
    std::vector<bool> position_declared;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t end = source.find('\n', pos);
        if (end == std::string_view::npos)
            end = source.size();
        std::string_view line = source.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        auto tokens = detail::tokenize(line);
        if (tokens.empty()) {
            if (end == source.size())
                break;
            continue;
        }
        auto fail = [&](const Token &t, const std::string &msg) -> ParseError {
            return ParseError(line_no, t.column, msg);
        };
        auto require_header = [&](const Token &t) {
            if (!have_alphabet || !have_length)
                throw fail(t, "'alphabet' and 'length' must precede '" + std::string(t.text) + "'");
        };
        auto lookup = [&](const Token &t) -> Symbol {
            auto it = symbol_index.find(std::string(t.text));
            if (it == symbol_index.end())
                throw fail(t, "symbol not in alphabet: " + std::string(t.text));
            return it->second;
        };

        std::string_view keyword = tokens[0].text;
        if (keyword == "domain") {
            if (tokens.size() != 2)
                throw fail(tokens[0], "expected 'domain <ident>'");
            d.name = std::string(tokens[1].text);
        } else if (keyword == "alphabet") {
            if (have_alphabet)
                throw fail(tokens[0], "duplicate 'alphabet'");
            if (tokens.size() < 2)
                throw fail(tokens[0], "empty alphabet");
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                std::string sym(tokens[i].text);
                if (sym == "_" || sym[0] == '$' || sym == "=>")
                    throw fail(tokens[i], "reserved token used as symbol: " + sym);
                if (symbol_index.count(sym))
                    throw fail(tokens[i], "duplicate symbol: " + sym);
                if (d.alphabet.size() >= kMaxSymbols)
                    throw fail(tokens[i], "alphabet exceeds 256 symbols");
                symbol_index.emplace(sym, static_cast<Symbol>(d.alphabet.size()));
                d.alphabet.push_back(sym);
            }
            have_alphabet = true;
        } else if (keyword == "length") {
            if (have_length)
                throw fail(tokens[0], "duplicate 'length'");
            std::size_t n = 0;
            if (tokens.size() != 2 || !detail::parse_size(tokens[1].text, n) || n == 0)
                throw fail(tokens[0], "expected 'length <positive integer>'");
            d.state_len = n;
            have_length = true;
        } else if (keyword == "position") {
            require_header(tokens[0]);
            std::size_t i = 0;
            if (tokens.size() < 3 || !detail::parse_size(tokens[1].text, i))
                throw fail(tokens[0], "expected 'position <i> <sym> ...'");
            if (i >= d.state_len)
                throw fail(tokens[1], "position index out of range");
            if (position_declared.empty()) {
                position_declared.assign(d.state_len, false);
                d.position_domains.assign(d.state_len, SymbolSet{});
            }
            if (position_declared[i])
                throw fail(tokens[1], "duplicate position declaration");
            position_declared[i] = true;
            for (std::size_t k = 2; k < tokens.size(); ++k)
                d.position_domains[i].set(lookup(tokens[k]));
        } else if (keyword == "op") {
            require_header(tokens[0]);
            if (tokens.size() < 2)
                throw fail(tokens[0], "expected 'op <label>: ...'");
            std::size_t k = 1;
            std::string label(tokens[1].text);
            if (!label.empty() && label.back() == ':') {
                label.pop_back();
                k = 2;
            } else if (tokens.size() > 2 && tokens[2].text == ":") {
                k = 3;
            } else {
                throw fail(tokens[1], "operator label must be followed by ':'");
            }
            if (label.empty())
                throw fail(tokens[1], "empty operator label");
            Operator op;
            op.label = label;
            std::unordered_map<std::string, std::uint8_t> vars;
            auto read_pattern = [&](Pattern &pattern, bool is_lhs) {
                for (std::size_t c = 0; c < d.state_len; ++c, ++k) {
                    if (k >= tokens.size())
                        throw fail(tokens.back(), "length mismatch: expected " +
                                                      std::to_string(d.state_len) + " cells");
                    const Token &t = tokens[k];
                    if (t.text == "=>")
                        throw fail(t, "length mismatch: expected " + std::to_string(d.state_len) +
                                          " cells, got " + std::to_string(c));
                    if (t.text == "_") {
                        pattern.push_back(Cell::underscore());
                    } else if (t.text[0] == '$') {
                        std::string name(t.text.substr(1));
                        if (name.empty())
                            throw fail(t, "empty variable name");
                        auto it = vars.find(name);
                        if (it == vars.end()) {
                            if (!is_lhs)
                                throw fail(t, "rhs variable unbound: $" + name);
                            if (vars.size() >= kMaxVariables)
                                throw fail(t, "too many variables");
                            it = vars.emplace(name, static_cast<std::uint8_t>(vars.size())).first;
                            op.var_names.push_back(name);
                        }
                        pattern.push_back(Cell::variable(it->second));
                    } else {
                        pattern.push_back(Cell::constant(lookup(t)));
                    }
                }
            };
            read_pattern(op.lhs, true);
            if (k >= tokens.size() || tokens[k].text != "=>")
                throw fail(k < tokens.size() ? tokens[k] : tokens.back(),
                           "length mismatch or missing '=>'");
            ++k;
            read_pattern(op.rhs, false);
            if (k != tokens.size())
                throw fail(tokens[k], "length mismatch: trailing cells after rhs");
            d.operators.push_back(std::move(op));
        } else if (keyword == "goal") {
            require_header(tokens[0]);
            if (have_goal)
                throw fail(tokens[0], "duplicate 'goal'");
            if (tokens.size() != d.state_len + 1)
                throw fail(tokens[0], "length mismatch: goal needs " + std::to_string(d.state_len) +
                                          " symbols");
            for (std::size_t k = 1; k < tokens.size(); ++k)
                d.goal.push_back(lookup(tokens[k]));
            have_goal = true;
        } else {
            throw fail(tokens[0], "unknown directive: " + std::string(keyword));
        }
        if (end == source.size())
            break;
    }

    if (!have_alphabet || !have_length)
        throw ParseError(line_no, 1, "missing 'alphabet' or 'length'");
    if (!have_goal)
        throw ParseError(line_no, 1, "missing 'goal'");

    SymbolSet full;
    for (std::size_t s = 0; s < d.alphabet.size(); ++s)
        full.set(s);
    if (d.position_domains.empty()) {
        d.position_domains.assign(d.state_len, full);
    } else {
        for (std::size_t i = 0; i < d.state_len; ++i)
            if (!position_declared[i])
                d.position_domains[i] = full;
    }
    for (std::size_t i = 0; i < d.state_len; ++i)
        if (!d.position_domains[i].test(d.goal[i]))
            throw Error(ErrorKind::Domain, "goal symbol '" + d.alphabet[d.goal[i]] +
                                               "' outside domain of position " + std::to_string(i));
    return d;
}

inline std::string format_pattern(const Domain &d, const Operator &op, const Pattern &p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ' ';
        switch (p[i].kind) {
        case CellKind::Const:
            out += d.alphabet[p[i].value];
            break;
        case CellKind::Var:
            out += '$';
            out += op.var_names[p[i].value];
            break;
        case CellKind::Underscore:
            out += '_';
            break;
        }
    }
    return out;
}

// Canonical printer; parse_domain(print_domain(d)) == d.
inline std::string print_domain(const Domain &d) {
    std::ostringstream out;
    out << "domain " << (d.name.empty() ? "unnamed" : d.name) << '\n';
    out << "alphabet";
    for (const auto &s : d.alphabet)
        out << ' ' << s;
    out << '\n' << "length " << d.state_len << '\n';
    SymbolSet full;
    for (std::size_t s = 0; s < d.alphabet.size(); ++s)
        full.set(s);
    for (std::size_t i = 0; i < d.state_len; ++i) {
        if (d.position_domains[i] == full)
            continue;
        out << "position " << i;
        for (std::size_t s = 0; s < d.alphabet.size(); ++s)
            if (d.position_domains[i].test(s))
                out << ' ' << d.alphabet[s];
        out << '\n';
    }
    for (const auto &op : d.operators)
        out << "op " << op.label << ": " << format_pattern(d, op, op.lhs) << " => "
            << format_pattern(d, op, op.rhs) << '\n';
    out << "goal " << d.format(d.goal) << '\n';
    return out.str();
}

// Unifies lhs against s. Returns the binding on success.
inline std::optional<Binding> match(const Operator &op, std::span<const Symbol> s) {
    Binding binding(op.num_vars());
    for (std::size_t i = 0; i < op.lhs.size(); ++i) {
        const Cell c = op.lhs[i];
        if (c.is_const()) {
            if (s[i] != c.value)
                return std::nullopt;
        } else if (c.is_var()) {
            auto &b = binding[c.value];
            if (!b)
                b = s[i];
            else if (*b != s[i])
                return std::nullopt;
        }
    }
    return binding;
}

// Allocation-free apply. `out` must have the same length as `s` and may not alias it.
inline bool apply_into(const Operator &op, std::span<const Symbol> s, std::span<Symbol> out) {
    std::array<std::int16_t, kMaxVariables> binding;
    const std::size_t nv = op.var_names.size();
    for (std::size_t v = 0; v < nv; ++v)
        binding[v] = -1;
    const std::size_t n = op.lhs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Cell c = op.lhs[i];
        if (c.kind == CellKind::Const) {
            if (s[i] != c.value)
                return false;
        } else if (c.kind == CellKind::Var) {
            auto &b = binding[c.value];
            if (b < 0)
                b = s[i];
            else if (b != s[i])
                return false;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Cell c = op.rhs[i];
        if (c.kind == CellKind::Const)
            out[i] = c.value;
        else if (c.kind == CellKind::Var)
            out[i] = static_cast<Symbol>(binding[c.value]);
        else
            out[i] = s[i];
    }
    return true;
}

inline std::optional<StateVector> apply(const Operator &op, std::span<const Symbol> s) {
    StateVector out(s.size());
    if (!apply_into(op, s, out))
        return std::nullopt;
    return out;
}

// As apply, but rejects results that leave the per-position domains.
inline std::optional<StateVector> apply(const Domain &d, const Operator &op,
                                        std::span<const Symbol> s) {
    auto out = apply(op, s);
    if (out) {
        for (std::size_t i = 0; i < d.state_len; ++i)
            if (!d.position_domains[i].test((*out)[i]))
                throw Error(ErrorKind::Domain,
                            "operator " + op.label + " writes '" + d.alphabet[(*out)[i]] +
                                "' outside domain of position " + std::to_string(i));
    }
    return out;
}

// Reusable buffers for predecessor enumeration.
struct PredecessorScratch {
    StateVector pred;
    StateVector check;
};

// Exact pre-image { s : apply(op, s) = next } restricted to the position domains.
// Enumerates unconstrained predecessor cells and unbound variables in ascending
// symbol order (odometer, last choice fastest).
template <typename Visit>
void for_each_predecessor(const Domain &d, const Operator &op, std::span<const Symbol> next,
                          PredecessorScratch &scratch, Visit &&visit) {
    const std::size_t n = op.lhs.size();
    std::array<std::int16_t, kMaxVariables> binding;
    const std::size_t nv = op.num_vars();
    for (std::size_t v = 0; v < nv; ++v)
        binding[v] = -1;
    auto bind = [&](std::uint8_t var, Symbol value) {
        if (binding[var] < 0) {
            binding[var] = value;
            return true;
        }
        return binding[var] == value;
    };

    std::size_t num_free_positions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Cell l = op.lhs[i];
        const Cell r = op.rhs[i];
        if (r.is_const()) {
            if (next[i] != r.value)
                return;
        } else if (r.is_var()) {
            if (!bind(r.value, next[i]))
                return;
        } else {
            if (l.is_const() && next[i] != l.value)
                return;
            if (l.is_var() && !bind(l.value, next[i]))
                return;
        }
        if (l.is_underscore() && !r.is_underscore())
            ++num_free_positions;
    }
    std::size_t num_free_vars = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (binding[v] < 0)
            ++num_free_vars;

    StateVector &pred = scratch.pred;
    pred.resize(n);
    scratch.check.resize(n);
    auto fill_fixed = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const Cell l = op.lhs[i];
            if (op.rhs[i].is_underscore())
                pred[i] = next[i];
            else if (l.is_const())
                pred[i] = l.value;
            else if (l.is_var())
                pred[i] = static_cast<Symbol>(binding[l.value]);
        }
    };
    auto emit_if_valid = [&]() {
        for (std::size_t i = 0; i < n; ++i)
            if (!d.position_domains[i].test(pred[i]))
                return;
        if (apply_into(op, pred, scratch.check) &&
            std::equal(scratch.check.begin(), scratch.check.end(), next.begin()))
            visit(std::span<const Symbol>(pred));
    };

    if (num_free_positions == 0 && num_free_vars == 0) {
        fill_fixed();
        emit_if_valid();
        return;
    }

    // Choice k < free_vars.size() is a variable, otherwise a position.
    std::vector<std::uint8_t> free_vars;
    std::vector<SymbolSet> var_domains;
    for (std::size_t v = 0; v < nv; ++v) {
        if (binding[v] >= 0)
            continue;
        SymbolSet dom;
        dom.set();
        for (std::size_t i = 0; i < n; ++i)
            if (op.lhs[i].is_var() && op.lhs[i].value == v)
                dom &= d.position_domains[i];
        free_vars.push_back(static_cast<std::uint8_t>(v));
        var_domains.push_back(dom);
    }
    std::vector<std::size_t> free_positions;
    for (std::size_t i = 0; i < n; ++i)
        if (op.lhs[i].is_underscore() && !op.rhs[i].is_underscore())
            free_positions.push_back(i);

    const std::size_t alphabet = d.alphabet.size();
    const std::size_t choices = free_vars.size() + free_positions.size();
    std::vector<std::size_t> cursor(choices, 0);
    auto domain_of = [&](std::size_t k) -> const SymbolSet & {
        return k < free_vars.size() ? var_domains[k]
                                    : d.position_domains[free_positions[k - free_vars.size()]];
    };
    auto advance = [&](std::size_t k, std::size_t from) -> bool {
        const SymbolSet &dom = domain_of(k);
        for (std::size_t s = from; s < alphabet; ++s)
            if (dom.test(s)) {
                cursor[k] = s;
                return true;
            }
        return false;
    };
    for (std::size_t k = 0; k < choices; ++k)
        if (!advance(k, 0))
            return;

    while (true) {
        for (std::size_t k = 0; k < free_vars.size(); ++k)
            binding[free_vars[k]] = static_cast<std::int16_t>(cursor[k]);
        fill_fixed();
        for (std::size_t k = 0; k < free_positions.size(); ++k)
            pred[free_positions[k]] = static_cast<Symbol>(cursor[free_vars.size() + k]);
        emit_if_valid();

        std::size_t k = choices;
        while (true) {
            --k;
            if (advance(k, cursor[k] + 1))
                break;
            if (k == 0)
                return;
            advance(k, 0);
        }
    }
}

template <typename Visit>
void for_each_predecessor(const Domain &d, const Operator &op, std::span<const Symbol> next,
                          Visit &&visit) {
    PredecessorScratch scratch;
    for_each_predecessor(d, op, next, scratch, std::forward<Visit>(visit));
}

inline std::vector<StateVector> regress(const Domain &d, const Operator &op,
                                        std::span<const Symbol> next) {
    std::vector<StateVector> out;
    for_each_predecessor(d, op, next, [&](std::span<const Symbol> s) {
        out.emplace_back(s.begin(), s.end());
    });
    return out;
}

} // namespace spurion
