#pragma once

// PSVN generators for the benchmark families.
//
// Every generator returns the PSVN text, symbolic layout metadata (group -> label ->
// positions) and a default seed state for enumeration.

#include "abstraction.hpp"
#include "error.hpp"
#include "psvn.hpp"
#include "reachability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace spurion {

struct GeneratedDomain {
    std::string text;
    LayoutMetadata meta;
    std::vector<std::string> seed;

    Domain domain() const { return parse_domain(text); }
    StateVector seed_state(const Domain &d) const { return d.state(seed); }

    // .meta file: layout lines plus "@seed <sym> ...".
    std::string meta_text() const {
        std::string out = meta.to_text();
        out += "@seed";
        for (const auto &s : seed)
            out += ' ' + s;
        out += '\n';
        return out;
    }
};

// Splits a .meta file into layout metadata and the seed line.
inline std::pair<LayoutMetadata, std::vector<std::string>> parse_meta(std::string_view text) {
    std::string layout;
    std::vector<std::string> seed;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("@seed", 0) == 0) {
            std::istringstream ls(line.substr(5));
            std::string tok;
            while (ls >> tok)
                seed.push_back(tok);
            layout += '\n';
        } else {
            layout += line + '\n';
        }
    }
    return {LayoutMetadata::parse(layout), seed};
}

namespace detail {

class PsvnWriter {
    std::string name_;
    std::vector<std::string> alphabet_;
    std::size_t len_;
    std::vector<std::vector<std::string>> positions_;
    std::ostringstream ops_;
    std::vector<std::string> goal_;

public:
    PsvnWriter(std::string name, std::vector<std::string> alphabet, std::size_t len)
        : name_(std::move(name)), alphabet_(std::move(alphabet)), len_(len), positions_(len) {}

    void position(std::size_t i, std::vector<std::string> values) {
        positions_[i] = std::move(values);
    }

    // Cells: "" for underscore, "$x" for a variable, otherwise a symbol.
    void op(const std::string &label, const std::vector<std::string> &lhs,
            const std::vector<std::string> &rhs) {
        ops_ << "op " << label << ":";
        for (const auto &c : lhs)
            ops_ << ' ' << (c.empty() ? "_" : c);
        ops_ << " =>";
        for (const auto &c : rhs)
            ops_ << ' ' << (c.empty() ? "_" : c);
        ops_ << '\n';
    }

    void goal(std::vector<std::string> g) { goal_ = std::move(g); }

    std::string str() const {
        std::ostringstream out;
        out << "domain " << name_ << '\n' << "alphabet";
        for (const auto &a : alphabet_)
            out << ' ' << a;
        out << '\n' << "length " << len_ << '\n';
        for (std::size_t i = 0; i < len_; ++i) {
            if (positions_[i].empty())
                continue;
            out << "position " << i;
            for (const auto &v : positions_[i])
                out << ' ' << v;
            out << '\n';
        }
        out << ops_.str();
        out << "goal";
        for (const auto &g : goal_)
            out << ' ' << g;
        out << '\n';
        return out.str();
    }
};

inline std::vector<std::string> numbers(int from, int to) {
    std::vector<std::string> out;
    for (int i = from; i <= to; ++i)
        out.push_back(std::to_string(i));
    return out;
}

inline std::vector<std::string> blank_cells(std::size_t n) { return std::vector<std::string>(n); }

} // namespace detail

// ---------------------------------------------------------------------------
// Towers of Hanoi. Disk 1 is the smallest; pegs are numbered from 1.

// Disk representation: component k holds the peg of disk k+1.
inline GeneratedDomain toh_disk(int disks, int pegs) {
    if (disks < 1 || pegs < 3 || disks > 60 || pegs > 60)
        throw Error(ErrorKind::Config, "unsupported Towers of Hanoi size");
    const std::size_t n = static_cast<std::size_t>(disks);
    detail::PsvnWriter w("toh_disk", detail::numbers(1, pegs), n);
    auto pos = [&](int disk) { return static_cast<std::size_t>(disk - 1); };
    for (int d = 1; d <= disks; ++d)
        for (int from = 1; from <= pegs; ++from)
            for (int to = 1; to <= pegs; ++to) {
                if (from == to)
                    continue;
                auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
                lhs[pos(d)] = std::to_string(from);
                rhs[pos(d)] = std::to_string(to);
                // Every smaller disk sits on one of the remaining pegs.
                std::vector<int> others;
                for (int p = 1; p <= pegs; ++p)
                    if (p != from && p != to)
                        others.push_back(p);
                std::vector<std::size_t> idx(static_cast<std::size_t>(d - 1), 0);
                while (true) {
                    for (int s = 1; s < d; ++s)
                        lhs[pos(s)] = std::to_string(others[idx[static_cast<std::size_t>(s - 1)]]);
                    std::string label = "m" + std::to_string(d) + "_" + std::to_string(from) + "_" +
                                        std::to_string(to);
                    for (int s = 1; s < d; ++s)
                        label += "_" + lhs[pos(s)];
                    w.op(label, lhs, rhs);
                    std::size_t k = idx.size();
                    while (k > 0 && ++idx[k - 1] == others.size())
                        idx[--k] = 0;
                    if (k == 0)
                        break;
                }
            }
    GeneratedDomain g;
    w.goal(std::vector<std::string>(n, "1"));
    g.text = w.str();
    for (int d = 1; d <= disks; ++d)
        g.meta.add("disks", std::to_string(d), {pos(d)});
    g.seed = std::vector<std::string>(n, "1");
    return g;
}

// Binary representation: for every peg, one 0/1 component per disk.
inline GeneratedDomain toh_binary(int disks, int pegs) {
    if (disks < 1 || pegs < 3 || disks > 20 || pegs > 12)
        throw Error(ErrorKind::Config, "unsupported Towers of Hanoi size");
    const std::size_t n = static_cast<std::size_t>(disks * pegs);
    detail::PsvnWriter w("toh_binary", {"0", "1"}, n);
    auto pos = [&](int disk, int peg) {
        return static_cast<std::size_t>((peg - 1) * disks + (disk - 1));
    };
    for (int d = 1; d <= disks; ++d)
        for (int from = 1; from <= pegs; ++from)
            for (int to = 1; to <= pegs; ++to) {
                if (from == to)
                    continue;
                auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
                lhs[pos(d, from)] = "1";
                lhs[pos(d, to)] = "0";
                rhs[pos(d, from)] = "0";
                rhs[pos(d, to)] = "1";
                for (int s = 1; s < d; ++s) {
                    lhs[pos(s, from)] = "0";
                    lhs[pos(s, to)] = "0";
                }
                w.op("m" + std::to_string(d) + "_" + std::to_string(from) + "_" + std::to_string(to),
                     lhs, rhs);
            }
    std::vector<std::string> goal(n, "0");
    for (int d = 1; d <= disks; ++d)
        goal[pos(d, 1)] = "1";
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    for (int d = 1; d <= disks; ++d)
        for (int p = 1; p <= pegs; ++p)
            g.meta.add("disk_on_peg", std::to_string(d) + "@" + std::to_string(p), {pos(d, p)});
    g.seed = goal;
    return g;
}

struct TohStackOptions {
    // Add the implied preconditions that pin every disk below the moved one.
    bool implied_preconditions = false;
};

inline std::string toh_height_symbol(int h) { return "h" + std::to_string(h); }

// Stack representation: for each peg, a height counter followed by n cells listing the
// disks from the bottom up (0 = empty). Height counters use their own symbols so that
// domain abstractions over disks leave them untouched.
inline GeneratedDomain toh_stack(int disks, int pegs, TohStackOptions opt = {}) {
    if (disks < 1 || pegs < 3 || disks > 30 || pegs > 8)
        throw Error(ErrorKind::Config, "unsupported Towers of Hanoi size");
    const std::size_t seg = static_cast<std::size_t>(disks + 1);
    const std::size_t n = static_cast<std::size_t>(pegs) * seg;
    std::vector<std::string> alphabet = detail::numbers(0, disks);
    for (int h = 0; h <= disks; ++h)
        alphabet.push_back(toh_height_symbol(h));
    detail::PsvnWriter w("toh_stack", alphabet, n);
    std::vector<std::string> heights, cells = detail::numbers(0, disks);
    for (int h = 0; h <= disks; ++h)
        heights.push_back(toh_height_symbol(h));
    auto height_pos = [&](int peg) { return static_cast<std::size_t>(peg - 1) * seg; };
    auto cell_pos = [&](int peg, int level) { return height_pos(peg) + static_cast<std::size_t>(level); };
    for (int p = 1; p <= pegs; ++p) {
        w.position(height_pos(p), heights);
        for (int l = 1; l <= disks; ++l)
            w.position(cell_pos(p, l), cells);
    }

    for (int from = 1; from <= pegs; ++from)
        for (int to = 1; to <= pegs; ++to) {
            if (from == to)
                continue;
            for (int d = 1; d <= disks; ++d)
                for (int h = 1; h <= disks; ++h)
                    for (int k = 0; h + k <= disks; ++k)
                        for (int b = (h >= 2 ? d + 1 : 0); b <= (h >= 2 ? disks : 0); ++b)
                            for (int e = (k >= 1 ? d + 1 : 0); e <= (k >= 1 ? disks : 0); ++e) {
                                if (h >= 2 && k >= 1 && b == e)
                                    continue;
                                // Every named disk only has larger disks below it.
                                if ((h - 1) + k > disks - d)
                                    continue;
                                if ((h >= 2 && h - 2 > disks - b) || (k >= 1 && k - 1 > disks - e))
                                    continue;
                                auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
                                lhs[height_pos(from)] = toh_height_symbol(h);
                                rhs[height_pos(from)] = toh_height_symbol(h - 1);
                                if (h >= 2)
                                    lhs[cell_pos(from, h - 1)] = rhs[cell_pos(from, h - 1)] =
                                        std::to_string(b);
                                lhs[cell_pos(from, h)] = std::to_string(d);
                                rhs[cell_pos(from, h)] = "0";
                                lhs[height_pos(to)] = toh_height_symbol(k);
                                rhs[height_pos(to)] = toh_height_symbol(k + 1);
                                if (k >= 1)
                                    lhs[cell_pos(to, k)] = rhs[cell_pos(to, k)] = std::to_string(e);
                                lhs[cell_pos(to, k + 1)] = "0";
                                rhs[cell_pos(to, k + 1)] = std::to_string(d);
                                std::string label = "d" + std::to_string(d) + "_" +
                                                    std::to_string(from) + "to" + std::to_string(to) +
                                                    "_h" + std::to_string(h) + "k" +
                                                    std::to_string(k) + "b" + std::to_string(b) +
                                                    "e" + std::to_string(e);
                                w.op(label, lhs, rhs);
                            }
        }

    std::vector<std::string> goal(n, "0");
    for (int p = 1; p <= pegs; ++p)
        goal[height_pos(p)] = toh_height_symbol(0);
    goal[height_pos(1)] = toh_height_symbol(disks);
    for (int l = 1; l <= disks; ++l)
        goal[cell_pos(1, l)] = std::to_string(disks - l + 1);
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    for (int p = 1; p <= pegs; ++p) {
        g.meta.add("height", std::to_string(p), {height_pos(p)});
        for (int l = 1; l <= disks; ++l)
            g.meta.add("peg" + std::to_string(p), std::to_string(l), {cell_pos(p, l)});
    }
    g.seed = goal;
    if (opt.implied_preconditions) {
        Domain weak = g.domain();
        g.text = print_domain(strengthen_preconditions(weak, enumerate(weak, g.seed_state(weak))));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Blocks World with a hand and p named table positions. Blocks are named a, b, c, ...;
// "0" means no block. The goal stacks every block on position 1 in alphabetical order.

namespace detail {

inline std::string block_name(int b) {
    std::string out;
    do {
        out.insert(out.begin(), static_cast<char>('a' + b % 26));
        b = b / 26 - 1;
    } while (b >= 0);
    return out;
}

inline std::vector<std::string> block_names(int blocks) {
    std::vector<std::string> out;
    for (int b = 0; b < blocks; ++b)
        out.push_back(block_name(b));
    return out;
}

inline void check_blocks(int blocks, int positions) {
    if (blocks < 1 || positions < 1 || blocks > 40 || positions > 40)
        throw Error(ErrorKind::Config, "unsupported Blocks World size");
}

} // namespace detail

// Top representation: hand, the block directly on each table position, then the block
// directly on top of each block.
inline GeneratedDomain bw_top(int blocks, int positions) {
    detail::check_blocks(blocks, positions);
    const auto names = detail::block_names(blocks);
    const std::size_t n = static_cast<std::size_t>(1 + positions + blocks);
    std::vector<std::string> alphabet{"0"};
    alphabet.insert(alphabet.end(), names.begin(), names.end());
    detail::PsvnWriter w("bw_top", alphabet, n);
    auto tp = [](int t) { return static_cast<std::size_t>(1 + t); };
    auto on = [&](int b) { return static_cast<std::size_t>(1 + positions + b); };

    for (int x = 0; x < blocks; ++x) {
        for (int t = 0; t < positions; ++t) {
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = "0";
            lhs[tp(t)] = names[x];
            lhs[on(x)] = "0";
            rhs[0] = names[x];
            rhs[tp(t)] = "0";
            w.op("pick_" + names[x] + "_tp" + std::to_string(t + 1), lhs, rhs);
        }
        for (int y = 0; y < blocks; ++y) {
            if (y == x)
                continue;
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = "0";
            lhs[on(y)] = names[x];
            lhs[on(x)] = "0";
            rhs[0] = names[x];
            rhs[on(y)] = "0";
            w.op("pick_" + names[x] + "_" + names[y], lhs, rhs);
        }
    }
    for (int x = 0; x < blocks; ++x) {
        for (int t = 0; t < positions; ++t) {
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = names[x];
            lhs[tp(t)] = "0";
            rhs[0] = "0";
            rhs[tp(t)] = names[x];
            w.op("put_" + names[x] + "_tp" + std::to_string(t + 1), lhs, rhs);
        }
        for (int y = 0; y < blocks; ++y) {
            if (y == x)
                continue;
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = names[x];
            lhs[on(y)] = "0";
            rhs[0] = "0";
            rhs[on(y)] = names[x];
            w.op("put_" + names[x] + "_" + names[y], lhs, rhs);
        }
    }

    std::vector<std::string> goal(n, "0");
    goal[tp(0)] = names[0];
    for (int b = 0; b + 1 < blocks; ++b)
        goal[on(b)] = names[b + 1];
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    g.meta.add("hand", "hand", {0});
    for (int t = 0; t < positions; ++t)
        g.meta.add("tp", std::to_string(t + 1), {tp(t)});
    for (int b = 0; b < blocks; ++b)
        g.meta.add("on", names[b], {on(b)});
    g.seed = goal;
    return g;
}

// Height representation: hand, then (table position, height, covered flag) per block,
// then an occupied flag per table position. A block in the hand has the triple (0, 0, 0).
inline GeneratedDomain bw_height(int blocks, int positions) {
    detail::check_blocks(blocks, positions);
    const auto names = detail::block_names(blocks);
    const std::size_t n = static_cast<std::size_t>(1 + 3 * blocks + positions);
    std::vector<std::string> alphabet = detail::numbers(0, std::max(blocks, positions));
    alphabet.insert(alphabet.end(), names.begin(), names.end());
    detail::PsvnWriter w("bw_height", alphabet, n);
    auto tp = [](int b) { return static_cast<std::size_t>(1 + 3 * b); };
    auto hgh = [](int b) { return static_cast<std::size_t>(2 + 3 * b); };
    auto cov = [](int b) { return static_cast<std::size_t>(3 + 3 * b); };
    auto flag = [&](int t) { return static_cast<std::size_t>(1 + 3 * blocks + t); };
    std::vector<std::string> hand{"0"};
    hand.insert(hand.end(), names.begin(), names.end());
    w.position(0, hand);
    for (int b = 0; b < blocks; ++b) {
        w.position(tp(b), detail::numbers(0, positions));
        w.position(hgh(b), detail::numbers(0, blocks));
        w.position(cov(b), {"0", "1"});
    }
    for (int t = 0; t < positions; ++t)
        w.position(flag(t), {"0", "1"});

    const auto num = [](int v) { return std::to_string(v); };
    for (int x = 0; x < blocks; ++x)
        for (int t = 0; t < positions; ++t) {
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = "0";
            lhs[tp(x)] = num(t + 1);
            lhs[hgh(x)] = "1";
            lhs[cov(x)] = "0";
            rhs[0] = names[x];
            rhs[tp(x)] = rhs[hgh(x)] = "0";
            lhs[flag(t)] = "1";
            rhs[flag(t)] = "0";
            w.op("pick_" + names[x] + "_tp" + num(t + 1), lhs, rhs);
            for (int y = 0; y < blocks; ++y) {
                if (y == x)
                    continue;
                for (int k = 2; k <= blocks; ++k) {
                    auto l2 = detail::blank_cells(n), r2 = detail::blank_cells(n);
                    l2[0] = "0";
                    l2[tp(x)] = num(t + 1);
                    l2[hgh(x)] = num(k);
                    l2[cov(x)] = "0";
                    r2[0] = names[x];
                    r2[tp(x)] = r2[hgh(x)] = "0";
                    l2[tp(y)] = num(t + 1);
                    l2[hgh(y)] = num(k - 1);
                    l2[cov(y)] = "1";
                    r2[cov(y)] = "0";
                    w.op("pick_" + names[x] + "_" + names[y] + "_tp" + num(t + 1) + "h" + num(k),
                         l2, r2);
                }
            }
        }
    for (int x = 0; x < blocks; ++x)
        for (int t = 0; t < positions; ++t) {
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            lhs[0] = names[x];
            rhs[0] = "0";
            lhs[flag(t)] = "0";
            rhs[flag(t)] = "1";
            rhs[tp(x)] = num(t + 1);
            rhs[hgh(x)] = "1";
            w.op("put_" + names[x] + "_tp" + num(t + 1), lhs, rhs);
            for (int y = 0; y < blocks; ++y) {
                if (y == x)
                    continue;
                for (int k = 1; k < blocks; ++k) {
                    auto l2 = detail::blank_cells(n), r2 = detail::blank_cells(n);
                    l2[0] = names[x];
                    r2[0] = "0";
                    l2[tp(y)] = num(t + 1);
                    l2[hgh(y)] = num(k);
                    l2[cov(y)] = "0";
                    r2[cov(y)] = "1";
                    r2[tp(x)] = num(t + 1);
                    r2[hgh(x)] = num(k + 1);
                    w.op("put_" + names[x] + "_" + names[y] + "_tp" + num(t + 1) + "h" + num(k + 1),
                         l2, r2);
                }
            }
        }

    std::vector<std::string> goal(n, "0");
    for (int b = 0; b < blocks; ++b) {
        goal[tp(b)] = "1";
        goal[hgh(b)] = num(b + 1);
        goal[cov(b)] = b + 1 < blocks ? "1" : "0";
    }
    goal[flag(0)] = "1";
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    g.meta.add("hand", "hand", {0});
    for (int b = 0; b < blocks; ++b) {
        g.meta.add("tp", names[b], {tp(b)});
        g.meta.add("hgh", names[b], {hgh(b)});
        g.meta.add("bln_on", names[b], {cov(b)});
    }
    for (int t = 0; t < positions; ++t)
        g.meta.add("bln_on_tp", num(t + 1), {flag(t)});
    g.seed = goal;
    return g;
}

// Stack representation: hand, then for each table position a block count followed by
// n cells listing the blocks from the bottom up.
inline GeneratedDomain bw_stack(int blocks, int positions) {
    detail::check_blocks(blocks, positions);
    const auto names = detail::block_names(blocks);
    const std::size_t seg = static_cast<std::size_t>(blocks + 1);
    const std::size_t n = 1 + static_cast<std::size_t>(positions) * seg;
    std::vector<std::string> alphabet = detail::numbers(0, blocks);
    alphabet.insert(alphabet.end(), names.begin(), names.end());
    detail::PsvnWriter w("bw_stack", alphabet, n);
    auto count = [&](int t) { return 1 + static_cast<std::size_t>(t) * seg; };
    auto cell = [&](int t, int level) { return count(t) + static_cast<std::size_t>(level); };
    std::vector<std::string> held{"0"};
    held.insert(held.end(), names.begin(), names.end());
    w.position(0, held);
    for (int t = 0; t < positions; ++t) {
        w.position(count(t), detail::numbers(0, blocks));
        for (int l = 1; l <= blocks; ++l)
            w.position(cell(t, l), held);
    }

    const auto num = [](int v) { return std::to_string(v); };
    for (int x = 0; x < blocks; ++x)
        for (int t = 0; t < positions; ++t)
            for (int k = 1; k <= blocks; ++k) {
                auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
                lhs[0] = "0";
                rhs[0] = names[x];
                lhs[count(t)] = num(k);
                rhs[count(t)] = num(k - 1);
                lhs[cell(t, k)] = names[x];
                rhs[cell(t, k)] = "0";
                w.op("pick_" + names[x] + "_tp" + num(t + 1) + "h" + num(k), lhs, rhs);
            }
    for (int x = 0; x < blocks; ++x)
        for (int t = 0; t < positions; ++t)
            for (int k = 0; k < blocks; ++k) {
                auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
                lhs[0] = names[x];
                rhs[0] = "0";
                lhs[count(t)] = num(k);
                rhs[count(t)] = num(k + 1);
                lhs[cell(t, k + 1)] = "0";
                rhs[cell(t, k + 1)] = names[x];
                w.op("put_" + names[x] + "_tp" + num(t + 1) + "h" + num(k + 1), lhs, rhs);
            }

    std::vector<std::string> goal(n, "0");
    goal[count(0)] = num(blocks);
    for (int b = 0; b < blocks; ++b)
        goal[cell(0, b + 1)] = names[b];
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    g.meta.add("hand", "hand", {0});
    for (int t = 0; t < positions; ++t) {
        g.meta.add("height", num(t + 1), {count(t)});
        for (int l = 1; l <= blocks; ++l)
            g.meta.add("tp" + num(t + 1), num(l), {cell(t, l)});
    }
    g.seed = goal;
    return g;
}

// ---------------------------------------------------------------------------
// Sliding-tile puzzle on a rows x cols grid; locations are numbered 1.. row-major.

namespace detail {

// Ordered (from, to) blank moves: for each location, up, down, left, right.
inline std::vector<std::pair<int, int>> grid_moves(int rows, int cols) {
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int p = r * cols + c;
            if (r > 0)
                out.emplace_back(p, p - cols);
            if (r + 1 < rows)
                out.emplace_back(p, p + cols);
            if (c > 0)
                out.emplace_back(p, p - 1);
            if (c + 1 < cols)
                out.emplace_back(p, p + 1);
        }
    return out;
}

} // namespace detail

// Standard representation: component = location, value = tile or "B". Moves are given as
// (blank location, tile location) pairs, 0-based.
inline GeneratedDomain stp_standard(int rows, int cols,
                                    std::optional<std::vector<std::pair<int, int>>> moves = {}) {
    if (rows < 1 || cols < 1 || rows * cols < 2 || rows * cols > 200)
        throw Error(ErrorKind::Config, "unsupported sliding-tile size");
    const int cells = rows * cols;
    const std::size_t n = static_cast<std::size_t>(cells);
    std::vector<std::string> alphabet = detail::numbers(1, cells - 1);
    alphabet.push_back("B");
    detail::PsvnWriter w(moves ? "cstp" : "stp_standard", alphabet, n);
    auto list = moves ? *moves : detail::grid_moves(rows, cols);
    for (auto [p, q] : list) {
        if (p < 0 || q < 0 || p >= cells || q >= cells || p == q)
            throw Error(ErrorKind::Config, "move table references an invalid location");
        auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
        lhs[static_cast<std::size_t>(p)] = "B";
        lhs[static_cast<std::size_t>(q)] = "$T";
        rhs[static_cast<std::size_t>(p)] = "$T";
        rhs[static_cast<std::size_t>(q)] = "B";
        w.op("b" + std::to_string(p + 1) + "_" + std::to_string(q + 1), lhs, rhs);
    }
    std::vector<std::string> goal = detail::numbers(1, cells - 1);
    goal.push_back("B");
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    for (int i = 0; i < cells; ++i)
        g.meta.add("locations", std::to_string(i + 1), {static_cast<std::size_t>(i)});
    g.seed = goal;
    return g;
}

// Constrained-movement puzzle: the first and last rows are corridors joined by vertical
// lanes; horizontal moves in the inner rows are disallowed. Every move stays invertible.
inline std::vector<std::pair<int, int>> cstp_default_moves(int rows, int cols) {
    std::vector<std::pair<int, int>> out;
    for (auto [p, q] : detail::grid_moves(rows, cols)) {
        const bool horizontal = p / cols == q / cols;
        if (!horizontal || p / cols == 0 || p / cols == rows - 1)
            out.emplace_back(p, q);
    }
    return out;
}

inline GeneratedDomain cstp(int rows, int cols, std::optional<std::vector<std::pair<int, int>>> moves = {}) {
    auto list = moves ? *moves : cstp_default_moves(rows, cols);
    for (auto [p, q] : list)
        if (std::find(list.begin(), list.end(), std::pair{q, p}) == list.end())
            throw Error(ErrorKind::Config, "constrained move table must contain each move's inverse");
    return stp_standard(rows, cols, std::move(list));
}

// Dual representation: component = tile (blank last), value = location 1..rows*cols.
inline GeneratedDomain stp_dual(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2 || rows * cols > 200)
        throw Error(ErrorKind::Config, "unsupported sliding-tile size");
    const int cells = rows * cols;
    const std::size_t n = static_cast<std::size_t>(cells);
    detail::PsvnWriter w("stp_dual", detail::numbers(1, cells), n);
    for (auto [p, q] : detail::grid_moves(rows, cols))
        for (int t = 1; t < cells; ++t) {
            auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
            const std::size_t tile = static_cast<std::size_t>(t - 1), blank = n - 1;
            lhs[blank] = std::to_string(p + 1);
            lhs[tile] = std::to_string(q + 1);
            rhs[blank] = std::to_string(q + 1);
            rhs[tile] = std::to_string(p + 1);
            w.op("t" + std::to_string(t) + "_" + std::to_string(q + 1) + "to" + std::to_string(p + 1),
                 lhs, rhs);
        }
    w.goal(detail::numbers(1, cells));
    GeneratedDomain g;
    g.text = w.str();
    for (int t = 1; t < cells; ++t)
        g.meta.add("tiles", std::to_string(t), {static_cast<std::size_t>(t - 1)});
    g.meta.add("tiles", "blank", {n - 1});
    g.seed = detail::numbers(1, cells);
    return g;
}

// ---------------------------------------------------------------------------
// Scanalyzer. Belt i occupies components 2i (batch) and 2i+1 (analyzed flag). Belts
// 0..n/2-1 form the upper half, belt 0 is topmost and belt n-1 bottommost.

struct ScanalyzerMove {
    int upper;
    int lower;
    bool analyze;
};

// Every upper belt can exchange with every lower belt; rotate-and-analyze moves the batch
// on the topmost belt to the bottommost one.
inline std::vector<ScanalyzerMove> scanalyzer_default_moves(int belts) {
    std::vector<ScanalyzerMove> out;
    const int half = belts / 2;
    for (int u = 0; u < half; ++u)
        for (int l = half; l < belts; ++l)
            out.push_back({u, l, false});
    out.push_back({0, belts - 1, true});
    return out;
}

inline GeneratedDomain scanalyzer(int belts, std::optional<std::vector<ScanalyzerMove>> moves = {}) {
    if (belts < 2 || belts % 2 != 0 || belts > 60)
        throw Error(ErrorKind::Config, "Scanalyzer needs an even number of belts");
    const std::size_t n = static_cast<std::size_t>(2 * belts);
    std::vector<std::string> alphabet;
    for (int b = 0; b < belts; ++b)
        alphabet.push_back("p" + std::to_string(b));
    alphabet.push_back("0");
    alphabet.push_back("1");
    detail::PsvnWriter w("scanalyzer", alphabet, n);
    std::vector<std::string> batches(alphabet.begin(), alphabet.begin() + belts);
    for (int b = 0; b < belts; ++b) {
        w.position(static_cast<std::size_t>(2 * b), batches);
        w.position(static_cast<std::size_t>(2 * b + 1), {"0", "1"});
    }
    for (const auto &m : moves ? *moves : scanalyzer_default_moves(belts)) {
        if (m.upper < 0 || m.lower < 0 || m.upper >= belts || m.lower >= belts || m.upper == m.lower)
            throw Error(ErrorKind::Config, "move table references an invalid belt");
        auto lhs = detail::blank_cells(n), rhs = detail::blank_cells(n);
        const auto u = static_cast<std::size_t>(2 * m.upper), l = static_cast<std::size_t>(2 * m.lower);
        lhs[u] = "$A";
        lhs[u + 1] = "$F";
        lhs[l] = "$C";
        lhs[l + 1] = "$G";
        rhs[u] = "$C";
        rhs[u + 1] = "$G";
        rhs[l] = "$A";
        rhs[l + 1] = m.analyze ? "1" : "$F";
        w.op(std::string(m.analyze ? "analyze" : "rotate") + "_" + std::to_string(m.upper) + "_" +
                 std::to_string(m.lower),
             lhs, rhs);
    }
    std::vector<std::string> goal, seed;
    for (int b = 0; b < belts; ++b) {
        goal.push_back("p" + std::to_string(b));
        goal.push_back("1");
        seed.push_back("p" + std::to_string(b));
        seed.push_back("0");
    }
    w.goal(goal);
    GeneratedDomain g;
    g.text = w.str();
    for (int b = 0; b < belts; ++b) {
        g.meta.add("belts", std::to_string(b), {static_cast<std::size_t>(2 * b)});
        g.meta.add("bln_analyzed", std::to_string(b), {static_cast<std::size_t>(2 * b + 1)});
    }
    g.seed = seed;
    return g;
}

// ---------------------------------------------------------------------------
// Generator specs: "<family> <int>...", e.g. "toh-stack 9 4" or "scanalyzer 6".

struct GeneratorSpec {
    std::string family;
    std::vector<int> params;
    // Scanalyzer: "u:l" rotate or "u:l:a" rotate-and-analyze, 0-based belts.
    // CSTP: "p:q" blank moves, 1-based locations.
    std::vector<std::string> move_table;
    bool implied_preconditions = false;
};

inline const std::vector<std::string> &generator_families() {
    static const std::vector<std::string> f{"toh-binary", "toh-disk",     "toh-stack", "bw-top",
                                            "bw-height",  "bw-stack",     "stp-standard",
                                            "stp-dual",   "scanalyzer",   "cstp"};
    return f;
}

inline GeneratorSpec parse_generator_spec(std::string_view text) {
    std::istringstream in{std::string(text)};
    GeneratorSpec spec;
    in >> spec.family;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            spec.params.push_back(v);
        } catch (const std::exception &) {
            throw Error(ErrorKind::Config, "generator parameter is not an integer: " + tok);
        }
    }
    const auto &f = generator_families();
    if (std::find(f.begin(), f.end(), spec.family) == f.end())
        throw Error(ErrorKind::Config, "unknown generator family: " + spec.family);
    return spec;
}

namespace detail {

inline std::vector<int> split_ints(const std::string &entry, char sep) {
    std::vector<int> out;
    std::string part;
    std::istringstream in(entry);
    while (std::getline(in, part, sep)) {
        if (part == "a")
            out.push_back(-1);
        else
            try {
                out.push_back(std::stoi(part));
            } catch (const std::exception &) {
                throw Error(ErrorKind::Config, "bad move table entry: " + entry);
            }
    }
    return out;
}

inline void want_params(const GeneratorSpec &spec, std::size_t n) {
    if (spec.params.size() != n)
        throw Error(ErrorKind::Config, spec.family + " takes " + std::to_string(n) + " parameter(s)");
}

} // namespace detail

inline GeneratedDomain generate(const GeneratorSpec &spec) {
    const auto &p = spec.params;
    const std::string &f = spec.family;
    if (f == "scanalyzer") {
        detail::want_params(spec, 1);
        if (spec.move_table.empty())
            return scanalyzer(p[0]);
        std::vector<ScanalyzerMove> moves;
        for (const auto &e : spec.move_table) {
            auto v = detail::split_ints(e, ':');
            if (v.size() < 2 || v.size() > 3 || (v.size() == 3 && v[2] != -1))
                throw Error(ErrorKind::Config, "scanalyzer move must be u:l or u:l:a, got " + e);
            moves.push_back({v[0], v[1], v.size() == 3});
        }
        return scanalyzer(p[0], moves);
    }
    if (!spec.move_table.empty() && f != "cstp")
        throw Error(ErrorKind::Config, "move_table is only accepted by scanalyzer and cstp");
    if (spec.implied_preconditions && f != "toh-stack")
        throw Error(ErrorKind::Config, "implied_preconditions is only accepted by toh-stack");
    detail::want_params(spec, 2);
    if (f == "toh-binary")
        return toh_binary(p[0], p[1]);
    if (f == "toh-disk")
        return toh_disk(p[0], p[1]);
    if (f == "toh-stack")
        return toh_stack(p[0], p[1], TohStackOptions{spec.implied_preconditions});
    if (f == "bw-top")
        return bw_top(p[0], p[1]);
    if (f == "bw-height")
        return bw_height(p[0], p[1]);
    if (f == "bw-stack")
        return bw_stack(p[0], p[1]);
    if (f == "stp-standard")
        return stp_standard(p[0], p[1]);
    if (f == "stp-dual")
        return stp_dual(p[0], p[1]);
    if (spec.move_table.empty())
        return cstp(p[0], p[1]);
    std::vector<std::pair<int, int>> moves;
    for (const auto &e : spec.move_table) {
        auto v = detail::split_ints(e, ':');
        if (v.size() != 2)
            throw Error(ErrorKind::Config, "cstp move must be p:q, got " + e);
        moves.emplace_back(v[0] - 1, v[1] - 1);
    }
    return cstp(p[0], p[1], moves);
}

struct Fingerprint {
    std::string family;
    std::vector<int> params;
    std::size_t states = 0;
    std::optional<double> avg_distance;
    // Needs more memory or time than a desk run allows.
    bool heavy = false;
};

inline const std::vector<Fingerprint> &known_fingerprints() {
    static const std::vector<Fingerprint> f{
        {"toh-stack", {9, 4}, 262'144, 29.39, false},
        {"stp-dual", {3, 3}, 181'440, std::nullopt, false},
        {"stp-standard", {2, 2}, 12, std::nullopt, false},
        {"scanalyzer", {6}, 46'080, 8.34, false},
        {"bw-top", {9, 3}, 36'288'000, 37.11, true},
        {"bw-height", {9, 3}, 36'288'000, 37.11, true},
        {"cstp", {3, 4}, 2'177'280, std::nullopt, true},
        {"cstp", {4, 5}, 1'814'400, std::nullopt, true},
    };
    return f;
}

inline const Fingerprint *find_fingerprint(const GeneratorSpec &spec) {
    if (!spec.move_table.empty() || spec.implied_preconditions)
        return nullptr;
    for (const auto &f : known_fingerprints())
        if (f.family == spec.family && f.params == spec.params)
            return &f;
    return nullptr;
}

struct ValidationReport {
    std::size_t states = 0;
    double avg_distance = 0.0;
    const Fingerprint *expected = nullptr;
    bool ok = true;
    std::string message;
};

// Enumerates from the generator seed and compares with the known fingerprint, if any.
// Average distances are compared at two decimals.
inline ValidationReport validate(const GeneratorSpec &spec, bool heavy = false) {
    ValidationReport rep;
    rep.expected = find_fingerprint(spec);
    if (rep.expected && rep.expected->heavy && !heavy)
        throw Error(ErrorKind::Config, spec.family + " fingerprint needs --heavy");
    GeneratedDomain g = generate(spec);
    Domain d = g.domain();
    auto r = enumerate(d, g.seed_state(d));
    rep.states = r.size();
    rep.avg_distance = avg_distance(d, r, d.goal);
    if (!rep.expected) {
        rep.message = "no reference fingerprint";
        return rep;
    }
    const auto &e = *rep.expected;
    if (rep.states != e.states) {
        rep.ok = false;
        rep.message = "expected " + std::to_string(e.states) + " states, got " + std::to_string(rep.states);
    } else if (e.avg_distance && std::fabs(rep.avg_distance - *e.avg_distance) > 0.005) {
        rep.ok = false;
        rep.message = "expected average distance " + std::to_string(*e.avg_distance) + ", got " +
                      std::to_string(rep.avg_distance);
    } else {
        rep.message = "fingerprint matches";
    }
    return rep;
}

} // namespace spurion
