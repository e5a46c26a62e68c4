#pragma once

// Pattern databases built by backward breadth-first search from the abstract goal.
//
//   ORGN     every abstract state generated by regression
//   MTX_*    generated states containing an abstraction-based mutex pair are skipped
//   TRUE     only images of genuine states are kept
//   PURE     only images of genuine states and genuine transitions

#include "abstraction.hpp"
#include "error.hpp"
#include "match_tree.hpp"
#include "mutex.hpp"
#include "reachability.hpp"
#include "state_table.hpp"

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace spurion {

enum class Variant { Orgn, MtxExh, MtxH2, True, Pure };

inline const char *to_string(Variant v) {
    switch (v) {
    case Variant::Orgn:
        return "ORGN";
    case Variant::MtxExh:
        return "MTX_EXH";
    case Variant::MtxH2:
        return "MTX_H2";
    case Variant::True:
        return "TRUE";
    case Variant::Pure:
        return "PURE";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "ORGN")
        return Variant::Orgn;
    if (s == "MTX_EXH" || s == "MTX")
        return Variant::MtxExh;
    if (s == "MTX_H2")
        return Variant::MtxH2;
    if (s == "TRUE")
        return Variant::True;
    if (s == "PURE")
        return Variant::Pure;
    throw Error(ErrorKind::Config, "unknown PDB variant: " + std::string(s));
}

inline constexpr std::uint32_t kInfinity = std::numeric_limits<std::uint32_t>::max();

struct PDB {
    Variant variant = Variant::Orgn;
    std::uint64_t abstraction_digest = 0;
    StateVector abstract_goal;
    StateTable entries;

    std::size_t size() const { return entries.size(); }
    std::size_t capacity() const { return entries.capacity(); }
    std::size_t size_bytes() const { return entries.size_bytes(); }
    std::uint32_t max_distance() const {
        std::uint32_t m = 0;
        entries.for_each([&](auto, std::uint32_t v) { m = std::max(m, v); });
        return m;
    }
};

struct NoFilter {};
struct MutexFilter {
    const PairTable *image;
};
struct StateSetFilter {
    const StateTable *allowed;
};
using BuildFilter = std::variant<NoFilter, MutexFilter, StateSetFilter>;

inline bool passes(const BuildFilter &f, std::span<const Symbol> t) {
    if (auto *m = std::get_if<MutexFilter>(&f))
        return !state_has_mutex(*m->image, t);
    if (auto *s = std::get_if<StateSetFilter>(&f))
        return s->allowed->contains(t);
    return true;
}

// Layer-synchronous backward BFS over the abstract operators' exact pre-images.
inline PDB build(const AbstractDomain &ad, const BuildFilter &filter, Variant variant,
                 std::size_t cap = kDefaultStateCap) {
    const Domain &d = ad.domain;
    PDB pdb;
    pdb.variant = variant;
    pdb.abstraction_digest = ad.psi.digest();
    pdb.abstract_goal = d.goal;
    pdb.entries = StateTable(d.state_len);
    if (!passes(filter, d.goal))
        throw Error(ErrorKind::Invalid, "abstract goal rejected by the build filter");

    const std::size_t n = d.state_len;
    SuccessorGenerator gen(d);
    std::vector<std::uint32_t> ids;
    PredecessorScratch scratch;
    std::vector<Symbol> layer(d.goal.begin(), d.goal.end());
    std::vector<Symbol> next_layer;
    StateVector current(n);
    pdb.entries.insert(d.goal, 0);
    for (std::uint32_t depth = 1; !layer.empty(); ++depth) {
        next_layer.clear();
        const std::size_t count = n ? layer.size() / n : 0;
        for (std::size_t k = 0; k < count; ++k) {
            std::copy_n(layer.begin() + static_cast<std::ptrdiff_t>(k * n), n, current.begin());
            gen.for_each_predecessor(current, ids, scratch,
                                     [&](std::uint32_t, std::span<const Symbol> p) {
                                         if (pdb.entries.contains(p) || !passes(filter, p))
                                             return;
                                         pdb.entries.insert(p, depth);
                                         next_layer.insert(next_layer.end(), p.begin(), p.end());
                                     });
        }
        if (pdb.entries.size() > cap)
            throw Error(ErrorKind::Capacity, "PDB exceeds cap of " + std::to_string(cap) + " entries");
        layer.swap(next_layer);
        if (n == 0)
            break;
    }
    return pdb;
}

// Image of every genuine state, usable as a StateSetFilter.
inline StateTable abstract_image(const Abstraction &psi, const ReachableSet &r) {
    StateTable image(psi.target_len());
    StateVector t(psi.target_len());
    for (std::size_t k = 0; k < r.size(); ++k) {
        psi.apply_into(r[k], t);
        image.insert(t, 0);
    }
    return image;
}

// Backward BFS over the explicit abstract edge graph {(psi(s), psi(s')) : s -> s' genuine}.
inline PDB build_pure(const AbstractDomain &ad, const ReachableSet &r, const EdgeSet &e) {
    const Abstraction &psi = ad.psi;
    const std::size_t m = psi.target_len();
    StateArena nodes(m);
    std::vector<std::uint32_t> node_of(r.size());
    StateVector t(m);
    for (std::size_t k = 0; k < r.size(); ++k) {
        psi.apply_into(r[k], t);
        node_of[k] = nodes.insert(t).first;
    }
    const std::size_t nn = nodes.size();
    std::vector<std::uint32_t> offset(nn + 1, 0);
    for (const auto &edge : e.edges)
        ++offset[node_of[edge.to] + 1];
    for (std::size_t i = 0; i < nn; ++i)
        offset[i + 1] += offset[i];
    std::vector<std::uint32_t> pred(e.edges.size());
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (const auto &edge : e.edges)
        pred[fill[node_of[edge.to]]++] = node_of[edge.from];

    auto goal = nodes.find(ad.domain.goal);
    if (!goal)
        throw Error(ErrorKind::NoSolution, "abstract goal is not the image of a genuine state");
    std::vector<std::uint32_t> dist(nn, kUnreached);
    std::vector<std::uint32_t> queue{*goal};
    dist[*goal] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (std::uint32_t k = offset[v]; k < offset[v + 1]; ++k)
            if (dist[pred[k]] == kUnreached) {
                dist[pred[k]] = dist[v] + 1;
                queue.push_back(pred[k]);
            }
    }

    PDB pdb;
    pdb.variant = Variant::Pure;
    pdb.abstraction_digest = psi.digest();
    pdb.abstract_goal = ad.domain.goal;
    pdb.entries = StateTable(m);
    for (auto v : queue)
        pdb.entries.insert(nodes[v], dist[v]);
    return pdb;
}

// h(s) = distance of psi(s); kInfinity on a miss unless strict.
inline std::uint32_t lookup(const PDB &pdb, const Abstraction &psi, std::span<const Symbol> s,
                            bool strict = false) {
    StateVector t(psi.target_len());
    psi.apply_into(s, t);
    const std::uint32_t *v = pdb.entries.find(t);
    if (v)
        return *v;
    if (strict)
        throw Error(ErrorKind::StrictMiss, "abstract state missing from " +
                                               std::string(to_string(pdb.variant)) + " PDB");
    return kInfinity;
}

// Heuristic functor with a reusable abstraction buffer.
class PdbHeuristic {
    const PDB *pdb_;
    const Abstraction *psi_;
    bool strict_;
    mutable StateVector buffer_;

public:
    PdbHeuristic(const PDB &pdb, const Abstraction &psi, bool strict = false)
        : pdb_(&pdb), psi_(&psi), strict_(strict), buffer_(psi.target_len()) {}

    std::uint32_t operator()(std::span<const Symbol> s) const {
        psi_->apply_into(s, buffer_);
        const std::uint32_t *v = pdb_->entries.find(buffer_);
        if (v)
            return *v;
        if (strict_)
            throw Error(ErrorKind::StrictMiss, "abstract state missing from PDB");
        return kInfinity;
    }
};

template <typename States>
double avg_h(const PDB &pdb, const Abstraction &psi, const States &states) {
    if (states.size() == 0)
        return 0.0;
    PdbHeuristic h(pdb, psi);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < states.size(); ++k) {
        std::uint32_t v = h(states[k]);
        if (v == kInfinity)
            throw Error(ErrorKind::NoSolution, "infinite heuristic value while averaging");
        total += v;
    }
    return static_cast<double>(total) / static_cast<double>(states.size());
}

inline constexpr std::uint32_t kPdbFileVersion = 1;

// Layout (little endian): "SPDB", version, variant, digest, key_len, capacity, size,
// goal cells, padded key slots, values.
inline void save_pdb(std::ostream &out, const PDB &pdb) {
    out.write("SPDB", 4);
    io::put_u32(out, kPdbFileVersion);
    io::put_u32(out, static_cast<std::uint32_t>(pdb.variant));
    io::put_u64(out, pdb.abstraction_digest);
    io::put_u32(out, static_cast<std::uint32_t>(pdb.entries.key_len()));
    io::put_u64(out, pdb.entries.capacity());
    io::put_u64(out, pdb.entries.size());
    io::put_bytes(out, pdb.abstract_goal);
    io::put_bytes(out, pdb.entries.raw_keys());
    for (auto v : pdb.entries.raw_values())
        io::put_u32(out, v);
}

inline PDB load_pdb(std::istream &in) {
    io::expect_magic(in, "SPDB", kPdbFileVersion);
    PDB pdb;
    const std::uint32_t variant = io::get_u32(in);
    if (variant > static_cast<std::uint32_t>(Variant::Pure))
        throw Error(ErrorKind::Invalid, "unknown PDB variant tag");
    pdb.variant = static_cast<Variant>(variant);
    pdb.abstraction_digest = io::get_u64(in);
    const std::size_t key_len = io::get_u32(in);
    const std::uint64_t capacity = io::get_u64(in);
    const std::uint64_t size = io::get_u64(in);
    if (capacity > (std::uint64_t{1} << 36))
        throw Error(ErrorKind::Invalid, "PDB capacity out of range");
    pdb.abstract_goal.resize(key_len);
    io::get_bytes(in, pdb.abstract_goal);
    std::vector<Symbol> keys(capacity * ((key_len + 3) / 4 * 4));
    io::get_bytes(in, keys);
    std::vector<std::uint32_t> values(capacity);
    for (auto &v : values)
        v = io::get_u32(in);
    pdb.entries = StateTable::from_raw(key_len, capacity, std::move(keys), std::move(values));
    if (pdb.entries.size() != size)
        throw Error(ErrorKind::Invalid, "PDB entry count does not match header");
    return pdb;
}

} // namespace spurion
