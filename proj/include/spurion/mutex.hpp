#pragma once

// Reachable atom pairs (exhaustive and h²), mutex pairs, and the abstraction-based
// mutex test used to filter pattern database construction.

#include "abstraction.hpp"
#include "error.hpp"
#include "psvn.hpp"

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace spurion {

struct Atom {
    std::size_t position = 0;
    Symbol value = 0;

    friend bool operator==(const Atom &, const Atom &) = default;
    friend auto operator<=>(const Atom &, const Atom &) = default;
};

enum class PairProvenance { Exhaustive, H2, Image };

inline const char *to_string(PairProvenance p) {
    switch (p) {
    case PairProvenance::Exhaustive:
        return "exhaustive";
    case PairProvenance::H2:
        return "h2";
    case PairProvenance::Image:
        return "image";
    }
    return "?";
}

// Dense bit matrix over atoms (position * alphabet + value), kept symmetric so a row
// lists every atom that co-occurs with the row atom.
class PairTable {
    std::size_t positions_ = 0;
    std::size_t symbols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> singles_;
    std::vector<std::uint64_t> pairs_;
    PairProvenance provenance_ = PairProvenance::Exhaustive;

public:
    PairTable() = default;
    PairTable(std::size_t positions, std::size_t symbols, PairProvenance provenance)
        : positions_(positions), symbols_(symbols),
          words_((positions * symbols + 63) / 64), singles_(words_, 0),
          pairs_(positions * symbols * words_, 0), provenance_(provenance) {}

    std::size_t num_positions() const { return positions_; }
    std::size_t num_symbols() const { return symbols_; }
    std::size_t num_atoms() const { return positions_ * symbols_; }
    std::size_t words() const { return words_; }
    PairProvenance provenance() const { return provenance_; }

    std::size_t atom_id(std::size_t i, Symbol a) const { return i * symbols_ + a; }
    Atom atom(std::size_t id) const {
        return {id / symbols_, static_cast<Symbol>(id % symbols_)};
    }

    bool single(std::size_t i, Symbol a) const {
        std::size_t id = atom_id(i, a);
        return (singles_[id >> 6] >> (id & 63)) & 1;
    }
    bool set_single(std::size_t i, Symbol a) {
        std::size_t id = atom_id(i, a);
        std::uint64_t bit = std::uint64_t{1} << (id & 63);
        bool fresh = !(singles_[id >> 6] & bit);
        singles_[id >> 6] |= bit;
        return fresh;
    }

    bool pair_by_id(std::size_t x, std::size_t y) const {
        return (pairs_[x * words_ + (y >> 6)] >> (y & 63)) & 1;
    }
    bool pair(std::size_t i, Symbol a, std::size_t j, Symbol b) const {
        return pair_by_id(atom_id(i, a), atom_id(j, b));
    }
    bool set_pair_by_id(std::size_t x, std::size_t y) {
        std::uint64_t bit = std::uint64_t{1} << (y & 63);
        std::uint64_t &w = pairs_[x * words_ + (y >> 6)];
        if (w & bit)
            return false;
        w |= bit;
        pairs_[y * words_ + (x >> 6)] |= std::uint64_t{1} << (x & 63);
        return true;
    }
    // Pairs over the same position are never stored.
    bool set_pair(std::size_t i, Symbol a, std::size_t j, Symbol b) {
        if (i == j)
            return false;
        return set_pair_by_id(atom_id(i, a), atom_id(j, b));
    }

    std::span<const std::uint64_t> row(std::size_t x) const {
        return {pairs_.data() + x * words_, words_};
    }
    std::span<const std::uint64_t> singles() const { return singles_; }

    std::size_t count_singles() const {
        std::size_t n = 0;
        for (auto w : singles_)
            n += std::popcount(w);
        return n;
    }
    std::size_t count_pairs() const {
        std::size_t n = 0;
        for (auto w : pairs_)
            n += std::popcount(w);
        return n / 2;
    }

    // True iff q has distinct positions and is not a reachable pair.
    bool is_mutex(std::size_t i, Symbol a, std::size_t j, Symbol b) const {
        if (i == j)
            throw Error(ErrorKind::Invalid, "mutex query with equal positions");
        return !pair(i, a, j, b);
    }

    friend bool operator==(const PairTable &x, const PairTable &y) {
        return x.positions_ == y.positions_ && x.symbols_ == y.symbols_ &&
               x.singles_ == y.singles_ && x.pairs_ == y.pairs_;
    }
};

// Pairs realized by at least one state of the list.
template <typename States>
PairTable exhaustive_pairs(const Domain &d, const States &states) {
    PairTable t(d.state_len, d.alphabet.size(), PairProvenance::Exhaustive);
    const std::size_t n = d.state_len;
    for (std::size_t k = 0; k < states.size(); ++k) {
        std::span<const Symbol> s = states[k];
        for (std::size_t i = 0; i < n; ++i) {
            t.set_single(i, s[i]);
            const std::size_t x = t.atom_id(i, s[i]);
            for (std::size_t j = i + 1; j < n; ++j)
                t.set_pair_by_id(x, t.atom_id(j, s[j]));
        }
    }
    return t;
}

struct GroundOperator {
    std::size_t source = 0;
    std::vector<Atom> pre;
    // Post-values of every written position.
    std::vector<Atom> writes;
};

inline constexpr std::size_t kDefaultGroundCap = 10'000'000;

// One ground instance per consistent binding of the lhs variables.
inline std::vector<GroundOperator> ground(const Domain &d, std::size_t cap = kDefaultGroundCap) {
    std::vector<GroundOperator> out;
    for (std::size_t oi = 0; oi < d.operators.size(); ++oi) {
        const Operator &op = d.operators[oi];
        const std::size_t nv = op.num_vars();
        std::vector<std::vector<Symbol>> values(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            SymbolSet dom;
            dom.set();
            for (std::size_t i = 0; i < d.state_len; ++i)
                if (op.lhs[i].is_var() && op.lhs[i].value == v)
                    dom &= d.position_domains[i];
            for (std::size_t a = 0; a < d.alphabet.size(); ++a)
                if (dom.test(a))
                    values[v].push_back(static_cast<Symbol>(a));
            if (values[v].empty())
                break;
        }
        bool empty = false;
        for (const auto &v : values)
            empty = empty || v.empty();
        if (empty)
            continue;
        std::vector<std::size_t> cursor(nv, 0);
        while (true) {
            GroundOperator g;
            g.source = oi;
            bool ok = true;
            for (std::size_t i = 0; i < d.state_len && ok; ++i) {
                Cell l = op.lhs[i];
                if (l.is_const())
                    g.pre.push_back({i, l.value});
                else if (l.is_var())
                    g.pre.push_back({i, values[l.value][cursor[l.value]]});
                Cell r = op.rhs[i];
                Symbol w = 0;
                if (r.is_const())
                    w = r.value;
                else if (r.is_var())
                    w = values[r.value][cursor[r.value]];
                else
                    continue;
                if (!d.position_domains[i].test(w))
                    ok = false;
                g.writes.push_back({i, w});
            }
            for (const auto &p : g.pre)
                ok = ok && d.position_domains[p.position].test(p.value);
            if (ok) {
                if (out.size() >= cap)
                    throw Error(ErrorKind::Capacity, "grounding exceeds cap of " +
                                                         std::to_string(cap) + " operators");
                out.push_back(std::move(g));
            }
            std::size_t k = nv;
            while (k > 0 && ++cursor[k - 1] == values[k - 1].size())
                cursor[--k] = 0;
            if (k == 0)
                break;
        }
    }
    return out;
}

// Least fixed point of the h² reachability rules, starting from init.
inline PairTable h2_pairs(const Domain &d, const std::vector<GroundOperator> &gs,
                          std::span<const Symbol> init, std::size_t *iterations = nullptr) {
    PairTable t(d.state_len, d.alphabet.size(), PairProvenance::H2);
    const std::size_t n = d.state_len;
    for (std::size_t i = 0; i < n; ++i) {
        t.set_single(i, init[i]);
        for (std::size_t j = i + 1; j < n; ++j)
            t.set_pair(i, init[i], j, init[j]);
    }
    const std::size_t words = t.words();
    const std::size_t atoms = t.num_atoms();

    // Atoms at each position, used to mask out written positions.
    std::vector<std::vector<std::uint64_t>> position_mask(n, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < t.num_symbols(); ++a) {
            std::size_t id = t.atom_id(i, static_cast<Symbol>(a));
            position_mask[i][id >> 6] |= std::uint64_t{1} << (id & 63);
        }

    std::vector<std::uint64_t> candidates(words);
    std::size_t rounds = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++rounds;
        for (const auto &g : gs) {
            bool applicable = true;
            for (std::size_t x = 0; x < g.pre.size() && applicable; ++x) {
                const Atom &p = g.pre[x];
                applicable = t.single(p.position, p.value);
                for (std::size_t y = x + 1; y < g.pre.size() && applicable; ++y)
                    applicable = t.pair(p.position, p.value, g.pre[y].position, g.pre[y].value);
            }
            if (!applicable)
                continue;

            for (std::size_t x = 0; x < g.writes.size(); ++x) {
                const Atom &a = g.writes[x];
                changed |= t.set_single(a.position, a.value);
                for (std::size_t y = x + 1; y < g.writes.size(); ++y)
                    changed |= t.set_pair(a.position, a.value, g.writes[y].position,
                                          g.writes[y].value);
            }

            // Atoms that survive the operator: reachable, at unwritten positions, and
            // compatible with every precondition.
            auto singles = t.singles();
            for (std::size_t w = 0; w < words; ++w)
                candidates[w] = singles[w];
            for (const auto &a : g.writes)
                for (std::size_t w = 0; w < words; ++w)
                    candidates[w] &= ~position_mask[a.position][w];
            for (const auto &p : g.pre) {
                const std::size_t pid = t.atom_id(p.position, p.value);
                auto row = t.row(pid);
                for (std::size_t w = 0; w < words; ++w) {
                    std::uint64_t allowed = row[w];
                    if ((pid >> 6) == w)
                        allowed |= std::uint64_t{1} << (pid & 63);
                    candidates[w] &= allowed;
                }
            }
            for (const auto &a : g.writes) {
                const std::size_t aid = t.atom_id(a.position, a.value);
                for (std::size_t w = 0; w < words; ++w) {
                    std::uint64_t bits = candidates[w];
                    while (bits) {
                        std::size_t q = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                        bits &= bits - 1;
                        if (q < atoms)
                            changed |= t.set_pair_by_id(aid, q);
                    }
                }
            }
        }
    }
    if (iterations)
        *iterations = rounds;
    return t;
}

// Image of a pair table under an abstraction. Pairs with a projected-away position
// are dropped; abstract pairs whose positions coincide are not representable.
inline PairTable abstract_pair_image(const Abstraction &psi, const PairTable &pairs) {
    PairTable out(psi.target_len(), pairs.num_symbols(), PairProvenance::Image);
    const auto &keep = psi.kept_positions();
    const std::size_t m = keep.size();
    const std::size_t k = pairs.num_symbols();
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t a = 0; a < k; ++a) {
            if (!pairs.single(keep[x], static_cast<Symbol>(a)))
                continue;
            const Symbol ma = psi.map_symbol(static_cast<Symbol>(a));
            out.set_single(x, ma);
            for (std::size_t y = x + 1; y < m; ++y)
                for (std::size_t b = 0; b < k; ++b)
                    if (pairs.pair(keep[x], static_cast<Symbol>(a), keep[y], static_cast<Symbol>(b)))
                        out.set_pair(x, ma, y, psi.map_symbol(static_cast<Symbol>(b)));
        }
    return out;
}

// Abstraction-based mutex: every pre-image pair of q is mutex.
inline bool is_abstraction_based_mutex(const PairTable &image, const Atom &p, const Atom &q) {
    if (p.position == q.position)
        throw Error(ErrorKind::Invalid, "mutex query with equal positions");
    return !image.pair(p.position, p.value, q.position, q.value);
}

inline bool state_has_mutex(const PairTable &image, std::span<const Symbol> t) {
    const std::size_t m = t.size();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t x = image.atom_id(i, t[i]);
        auto row = image.row(x);
        for (std::size_t j = i + 1; j < m; ++j) {
            const std::size_t y = image.atom_id(j, t[j]);
            if (!((row[y >> 6] >> (y & 63)) & 1))
                return true;
        }
    }
    return false;
}

// "mutex i=a j=b" per line, over atoms that are individually reachable.
inline std::string dump_mutexes(const Domain &d, const PairTable &t) {
    std::ostringstream out;
    const std::size_t n = t.num_positions();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < t.num_symbols(); ++a) {
            if (!t.single(i, static_cast<Symbol>(a)) ||
                (i < d.position_domains.size() && !d.position_domains[i].test(a)))
                continue;
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t b = 0; b < t.num_symbols(); ++b) {
                    if (!t.single(j, static_cast<Symbol>(b)) ||
                        (j < d.position_domains.size() && !d.position_domains[j].test(b)))
                        continue;
                    if (!t.pair(i, static_cast<Symbol>(a), j, static_cast<Symbol>(b)))
                        out << "mutex " << i << '=' << d.alphabet[a] << ' ' << j << '='
                            << d.alphabet[b] << '\n';
                }
        }
    return out.str();
}

} // namespace spurion
