#pragma once

// Domain abstractions (uniform symbol relabelings) and projections (kept positions).
//
// Spec text format, one directive per line, '#' starts a comment:
//
//   map <target> <- <src> <src> ...     symbols may also be comma separated
//   keep <i> <j> ...                    0-based positions of the original vector
//   keep <group> <label>,<label> ...    symbolic form, resolved through layout metadata
//
// All keep lines of one spec are merged into a single projection over the original
// positions. Maps compose in file order.

#include "error.hpp"
#include "psvn.hpp"
#include "state_table.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spurion {

struct DomainMap {
    // Indexed by source symbol; total on the alphabet.
    std::vector<Symbol> map;
};

struct Projection {
    std::vector<std::size_t> keep;
};

using AbstractionStep = std::variant<DomainMap, Projection>;

// Symbolic position names emitted by the domain generators: group -> label -> positions.
struct LayoutMetadata {
    std::map<std::string, std::map<std::string, std::vector<std::size_t>>> groups;

    void add(const std::string &group, const std::string &label, std::vector<std::size_t> pos) {
        auto &dst = groups[group][label];
        dst.insert(dst.end(), pos.begin(), pos.end());
    }

    // One mapping per line: "<group> <label> <pos> <pos> ..."
    std::string to_text() const {
        std::ostringstream out;
        for (const auto &[group, labels] : groups)
            for (const auto &[label, positions] : labels) {
                out << group << ' ' << label;
                for (auto p : positions)
                    out << ' ' << p;
                out << '\n';
            }
        return out.str();
    }

    static LayoutMetadata parse(std::string_view text) {
        LayoutMetadata meta;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.resize(hash);
            std::istringstream ls(line);
            std::string group, label;
            if (!(ls >> group))
                continue;
            if (!(ls >> label))
                throw ParseError(line_no, 1, "metadata line needs '<group> <label> <pos>...'");
            std::vector<std::size_t> positions;
            std::string tok;
            while (ls >> tok) {
                std::size_t v = 0;
                if (!detail::parse_size(tok, v))
                    throw ParseError(line_no, 1, "bad position index: " + tok);
                positions.push_back(v);
            }
            meta.add(group, label, std::move(positions));
        }
        return meta;
    }
};

class Abstraction {
    std::size_t alphabet_size_ = 0;
    std::size_t state_len_ = 0;
    std::vector<AbstractionStep> steps_;
    // Fused form: out[k] = map_[s[keep_[k]]].
    std::vector<std::size_t> keep_;
    std::vector<Symbol> map_;

    void fuse() {
        keep_.resize(state_len_);
        for (std::size_t i = 0; i < state_len_; ++i)
            keep_[i] = i;
        map_.resize(alphabet_size_);
        for (std::size_t a = 0; a < alphabet_size_; ++a)
            map_[a] = static_cast<Symbol>(a);
        for (const auto &step : steps_) {
            if (auto *m = std::get_if<DomainMap>(&step)) {
                for (auto &v : map_)
                    v = m->map[v];
            } else {
                const auto &p = std::get<Projection>(step);
                std::vector<std::size_t> next;
                next.reserve(p.keep.size());
                for (auto k : p.keep)
                    next.push_back(keep_[k]);
                keep_ = std::move(next);
            }
        }
    }

public:
    Abstraction() = default;

    Abstraction(std::size_t alphabet_size, std::size_t state_len,
                std::vector<AbstractionStep> steps = {})
        : alphabet_size_(alphabet_size), state_len_(state_len), steps_(std::move(steps)) {
        std::size_t len = state_len_;
        for (const auto &step : steps_) {
            if (auto *m = std::get_if<DomainMap>(&step)) {
                if (m->map.size() != alphabet_size_)
                    throw Error(ErrorKind::Config, "domain map must cover the alphabet");
                for (auto v : m->map)
                    if (v >= alphabet_size_)
                        throw Error(ErrorKind::Config, "domain map target outside alphabet");
            } else {
                const auto &p = std::get<Projection>(step);
                for (std::size_t k = 0; k < p.keep.size(); ++k) {
                    if (p.keep[k] >= len)
                        throw Error(ErrorKind::Config, "keep index out of range");
                    if (k && p.keep[k] <= p.keep[k - 1])
                        throw Error(ErrorKind::Config, "keep indices must be strictly increasing");
                }
                len = p.keep.size();
            }
        }
        fuse();
    }

    static Abstraction identity(const Domain &d) {
        return Abstraction(d.alphabet.size(), d.state_len);
    }

    const std::vector<AbstractionStep> &steps() const { return steps_; }
    const std::vector<std::size_t> &kept_positions() const { return keep_; }
    const std::vector<Symbol> &symbol_map() const { return map_; }
    std::size_t source_len() const { return state_len_; }
    std::size_t target_len() const { return keep_.size(); }

    Symbol map_symbol(Symbol a) const { return map_[a]; }

    // Abstract position of original position i, or -1 when projected away.
    std::ptrdiff_t target_position(std::size_t i) const {
        auto it = std::lower_bound(keep_.begin(), keep_.end(), i);
        if (it == keep_.end() || *it != i)
            return -1;
        return it - keep_.begin();
    }

    void apply_into(std::span<const Symbol> s, std::span<Symbol> out) const {
        for (std::size_t k = 0; k < keep_.size(); ++k)
            out[k] = map_[s[keep_[k]]];
    }

    StateVector operator()(std::span<const Symbol> s) const {
        StateVector out(keep_.size());
        apply_into(s, out);
        return out;
    }

    // Step-by-step application (reference semantics for the fused form).
    StateVector apply_sequential(std::span<const Symbol> s) const {
        StateVector cur(s.begin(), s.end());
        for (const auto &step : steps_) {
            if (auto *m = std::get_if<DomainMap>(&step)) {
                for (auto &c : cur)
                    c = m->map[c];
            } else {
                StateVector next;
                for (auto k : std::get<Projection>(step).keep)
                    next.push_back(cur[k]);
                cur = std::move(next);
            }
        }
        return cur;
    }

    std::uint64_t digest() const {
        std::vector<Symbol> bytes;
        for (auto k : keep_)
            for (int b = 0; b < 4; ++b)
                bytes.push_back(static_cast<Symbol>(k >> (8 * b)));
        bytes.insert(bytes.end(), map_.begin(), map_.end());
        bytes.push_back(static_cast<Symbol>(state_len_));
        return hash_cells(bytes);
    }

    std::string describe(const Domain &d) const {
        std::ostringstream out;
        std::map<Symbol, std::vector<Symbol>> groups;
        for (std::size_t a = 0; a < map_.size(); ++a)
            if (map_[a] != a)
                groups[map_[a]].push_back(static_cast<Symbol>(a));
        bool first = true;
        for (auto &[t, srcs] : groups) {
            out << (first ? "" : " / ") << d.alphabet[t] << "<-";
            first = false;
            if (map_[t] == t)
                srcs.insert(std::lower_bound(srcs.begin(), srcs.end(), t), t);
            for (std::size_t k = 0; k < srcs.size(); ++k)
                out << (k ? "," : "") << d.alphabet[srcs[k]];
        }
        if (keep_.size() != state_len_) {
            out << (first ? "" : " / ") << "keep";
            for (auto k : keep_)
                out << ' ' << k;
        }
        if (first && keep_.size() == state_len_)
            out << "identity";
        return out.str();
    }
};

namespace detail {

inline std::vector<std::string> split_list(std::istringstream &in) {
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        std::size_t start = 0;
        while (start <= tok.size()) {
            std::size_t comma = tok.find(',', start);
            if (comma == std::string::npos)
                comma = tok.size();
            if (comma > start)
                out.push_back(tok.substr(start, comma - start));
            start = comma + 1;
        }
    }
    return out;
}

} // namespace detail

inline Abstraction parse_abstraction(std::string_view text, const Domain &d,
                                     const LayoutMetadata *meta = nullptr) {
    std::vector<AbstractionStep> steps;
    std::set<std::size_t> kept;
    bool have_keep = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword))
            continue;
        if (keyword == "map") {
            std::string target, arrow;
            if (!(ls >> target >> arrow) || arrow != "<-")
                throw ParseError(line_no, 1, "expected 'map <target> <- <src> ...'");
            auto sources = detail::split_list(ls);
            if (sources.empty())
                throw ParseError(line_no, 1, "map needs at least one source symbol");
            auto t = d.find_symbol(target);
            if (!t)
                throw ParseError(line_no, 1, "symbol not in alphabet: " + target);
            DomainMap m;
            m.map.resize(d.alphabet.size());
            for (std::size_t a = 0; a < m.map.size(); ++a)
                m.map[a] = static_cast<Symbol>(a);
            for (const auto &src : sources) {
                auto s = d.find_symbol(src);
                if (!s)
                    throw ParseError(line_no, 1, "symbol not in alphabet: " + src);
                m.map[*s] = *t;
            }
            steps.emplace_back(std::move(m));
        } else if (keyword == "keep") {
            have_keep = true;
            auto items = detail::split_list(ls);
            if (items.empty())
                continue;
            std::size_t v = 0;
            if (detail::parse_size(items[0], v)) {
                for (const auto &item : items) {
                    if (!detail::parse_size(item, v) || v >= d.state_len)
                        throw ParseError(line_no, 1, "bad keep index: " + item);
                    kept.insert(v);
                }
            } else {
                if (!meta)
                    throw ParseError(line_no, 1,
                                     "symbolic keep '" + items[0] + "' needs layout metadata");
                auto g = meta->groups.find(items[0]);
                if (g == meta->groups.end())
                    throw ParseError(line_no, 1, "unknown layout group: " + items[0]);
                for (std::size_t k = 1; k < items.size(); ++k) {
                    if (items[k] == "all") {
                        for (const auto &[label, positions] : g->second)
                            kept.insert(positions.begin(), positions.end());
                        continue;
                    }
                    if (items[k] == "none")
                        continue;
                    auto l = g->second.find(items[k]);
                    if (l == g->second.end())
                        throw ParseError(line_no, 1,
                                         "unknown label '" + items[k] + "' in group " + items[0]);
                    kept.insert(l->second.begin(), l->second.end());
                }
            }
        } else {
            throw ParseError(line_no, 1, "unknown abstraction directive: " + keyword);
        }
    }
    if (have_keep) {
        for (auto k : kept)
            if (k >= d.state_len)
                throw Error(ErrorKind::Config, "keep index out of range");
        steps.emplace_back(Projection{std::vector<std::size_t>(kept.begin(), kept.end())});
    }
    return Abstraction(d.alphabet.size(), d.state_len, std::move(steps));
}

// Relabels constants and drops projected cells. Labels and variables are preserved.
inline Operator abstract_operator(const Abstraction &psi, const Operator &o) {
    Operator out;
    out.label = o.label;
    const auto &keep = psi.kept_positions();
    std::vector<int> renumber(o.num_vars(), -1);
    auto convert = [&](Cell c) {
        if (c.is_const())
            return Cell::constant(psi.map_symbol(c.value));
        if (c.is_var()) {
            if (renumber[c.value] < 0) {
                renumber[c.value] = static_cast<int>(out.var_names.size());
                out.var_names.push_back(o.var_names[c.value]);
            }
            return Cell::variable(static_cast<std::uint8_t>(renumber[c.value]));
        }
        return c;
    };
    for (auto k : keep)
        out.lhs.push_back(convert(o.lhs[k]));
    for (auto k : keep)
        out.rhs.push_back(convert(o.rhs[k]));
    return out;
}

struct AbstractDomain {
    Domain domain;
    Abstraction psi;
    std::size_t original_operator_count = 0;
};

namespace detail {

// Rhs variables whose lhs occurrences were all projected away.
inline std::vector<std::uint8_t> orphan_vars(const Operator &o) {
    std::vector<bool> in_lhs(o.num_vars(), false), in_rhs(o.num_vars(), false);
    for (auto c : o.lhs)
        if (c.is_var())
            in_lhs[c.value] = true;
    for (auto c : o.rhs)
        if (c.is_var())
            in_rhs[c.value] = true;
    std::vector<std::uint8_t> out;
    for (std::size_t v = 0; v < o.num_vars(); ++v)
        if (in_rhs[v] && !in_lhs[v])
            out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

// Renumbers variables by first lhs occurrence and drops unused names.
inline void canonicalize_vars(Operator &o) {
    std::vector<int> renumber(o.num_vars(), -1);
    std::vector<std::string> names;
    for (auto &c : o.lhs)
        if (c.is_var()) {
            if (renumber[c.value] < 0) {
                renumber[c.value] = static_cast<int>(names.size());
                names.push_back(o.var_names[c.value]);
            }
            c.value = static_cast<std::uint8_t>(renumber[c.value]);
        }
    for (auto &c : o.rhs)
        if (c.is_var())
            c.value = static_cast<std::uint8_t>(renumber[c.value]);
    o.var_names = std::move(names);
}

// Rewrites cells that provably leave the value unchanged as '_'.
inline void normalize_effects(Operator &o) {
    for (std::size_t i = 0; i < o.lhs.size(); ++i)
        if (!o.rhs[i].is_underscore() && o.rhs[i] == o.lhs[i])
            o.rhs[i] = Cell::underscore();
}

inline bool is_noop(const Operator &o) {
    return std::all_of(o.rhs.begin(), o.rhs.end(), [](Cell c) { return c.is_underscore(); });
}

} // namespace detail

// Image of a whole domain. Orphaned rhs variables are grounded over the images of
// their original value sets; no-op and duplicate abstract operators are dropped.
inline AbstractDomain abstract_domain(const Abstraction &psi, const Domain &d) {
    AbstractDomain out;
    out.psi = psi;
    out.original_operator_count = d.operators.size();
    Domain &ad = out.domain;
    ad.name = d.name + "_abs";
    ad.alphabet = d.alphabet;
    ad.state_len = psi.target_len();
    for (auto k : psi.kept_positions()) {
        SymbolSet img;
        for (std::size_t a = 0; a < d.alphabet.size(); ++a)
            if (d.position_domains[k].test(a))
                img.set(psi.map_symbol(static_cast<Symbol>(a)));
        ad.position_domains.push_back(img);
    }
    ad.goal = psi(d.goal);

    std::set<std::pair<Pattern, Pattern>> seen;
    auto emit = [&](Operator op) {
        detail::normalize_effects(op);
        detail::canonicalize_vars(op);
        if (detail::is_noop(op))
            return;
        if (seen.emplace(op.lhs, op.rhs).second)
            ad.operators.push_back(std::move(op));
    };

    for (const auto &o : d.operators) {
        Operator ao = abstract_operator(psi, o);
        auto orphans = detail::orphan_vars(ao);
        if (orphans.empty()) {
            emit(std::move(ao));
            continue;
        }
        // Value sets of each orphan in the original operator, mapped into the abstraction.
        std::vector<std::vector<Symbol>> choices;
        for (auto v : orphans) {
            const std::string &name = ao.var_names[v];
            std::size_t orig = 0;
            while (o.var_names[orig] != name)
                ++orig;
            SymbolSet dom;
            dom.set();
            for (std::size_t i = 0; i < o.lhs.size(); ++i)
                if (o.lhs[i].is_var() && o.lhs[i].value == orig)
                    dom &= d.position_domains[i];
            std::set<Symbol> img;
            for (std::size_t a = 0; a < d.alphabet.size(); ++a)
                if (dom.test(a))
                    img.insert(psi.map_symbol(static_cast<Symbol>(a)));
            choices.emplace_back(img.begin(), img.end());
            if (choices.back().empty())
                break;
        }
        if (choices.size() != orphans.size() || choices.back().empty())
            continue;
        std::vector<std::size_t> cursor(orphans.size(), 0);
        while (true) {
            Operator g = ao;
            for (auto &c : g.rhs)
                if (c.is_var())
                    for (std::size_t k = 0; k < orphans.size(); ++k)
                        if (c.value == orphans[k]) {
                            c = Cell::constant(choices[k][cursor[k]]);
                            break;
                        }
            emit(std::move(g));
            std::size_t k = orphans.size();
            while (k > 0 && ++cursor[k - 1] == choices[k - 1].size())
                cursor[--k] = 0;
            if (k == 0)
                break;
        }
    }
    return out;
}

} // namespace spurion
