#pragma once

#include "error.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace spurion {

struct RatioSummary {
    std::vector<double> ratios;
    double mean = 0.0;
    bool dominance_ok = true;
};

// Mean of a[i]/b[i]. The mean is only meaningful when one list dominates the other
// pointwise; otherwise dominance_ok is false and a warning goes to `warn`.
inline RatioSummary avg_of_ratios(const std::vector<double> &a, const std::vector<double> &b,
                                  std::ostream *warn = nullptr) {
    if (a.size() != b.size())
        throw Error(ErrorKind::Invalid, "avg_of_ratios: lists differ in length");
    RatioSummary out;
    out.ratios.reserve(a.size());
    bool all_ge = true, all_le = true;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(b[i] > 0.0))
            throw Error(ErrorKind::Invalid, "avg_of_ratios: zero denominator at index " + std::to_string(i));
        all_ge = all_ge && a[i] >= b[i];
        all_le = all_le && a[i] <= b[i];
        out.ratios.push_back(a[i] / b[i]);
        sum += out.ratios.back();
    }
    out.mean = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
    out.dominance_ok = all_ge || all_le;
    if (!out.dominance_ok && warn)
        *warn << "warning: average of ratios over lists without pointwise dominance\n";
    return out;
}

inline RatioSummary avg_of_ratios(const std::vector<std::uint64_t> &a,
                                  const std::vector<std::uint64_t> &b,
                                  std::ostream *warn = nullptr) {
    return avg_of_ratios(std::vector<double>(a.begin(), a.end()),
                         std::vector<double>(b.begin(), b.end()), warn);
}

// Mean over i of 100 * (after[i] - before[i]) / before[i].
inline double pct_improvement(const std::vector<double> &before, const std::vector<double> &after) {
    if (before.size() != after.size())
        throw Error(ErrorKind::Invalid, "pct_improvement: lists differ in length");
    if (before.empty())
        return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (!(before[i] > 0.0))
            throw Error(ErrorKind::Invalid, "pct_improvement: zero baseline at index " + std::to_string(i));
        sum += 100.0 * (after[i] - before[i]) / before[i];
    }
    return sum / static_cast<double>(before.size());
}

// Bucket k of width w covers (k*w - w, k*w]. Values within 1e-9 (relative) of a
// boundary count as sitting on it, so 0.7 lands in bucket 7 at width 0.1.
inline std::int64_t bucket_index(double v, double width) {
    const double q = v / width;
    const double r = std::nearbyint(q);
    if (std::fabs(q - r) <= 1e-9 * std::max(1.0, std::fabs(q)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(q));
}

struct Histogram {
    double width = 1.0;
    std::map<std::int64_t, std::size_t> counts;

    std::size_t total() const {
        std::size_t n = 0;
        for (auto [k, c] : counts)
            n += c;
        return n;
    }

    std::string label(std::int64_t k) const {
        char buf[64];
        if (width == 1.0)
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(k));
        else
            std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(k) * width);
        return buf;
    }

    // Two columns: bucket upper bound, count.
    std::string to_text() const {
        std::string out;
        for (auto [k, c] : counts)
            out += label(k) + ' ' + std::to_string(c) + '\n';
        return out;
    }
};

inline Histogram histogram(const std::vector<double> &values, double width = 1.0) {
    if (!(width > 0.0))
        throw Error(ErrorKind::Invalid, "histogram width must be positive");
    Histogram h;
    h.width = width;
    for (double v : values) {
        if (v < 0.0)
            throw Error(ErrorKind::Invalid, "histogram values must be non-negative");
        ++h.counts[bucket_index(v, width)];
    }
    return h;
}

} // namespace spurion
