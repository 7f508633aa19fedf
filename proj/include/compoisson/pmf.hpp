#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compoisson/errors.hpp"

namespace compoisson {

// Kahan-Babuska-Neumaier compensated accumulator.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }

    double value() const { return s + c; }
};

// Certified description of how the mass beyond the stored window decays.
// Lets power transforms P^q re-certify their own tails instead of assuming.
//
//   geometric: mass(end + j) <= a * s^(j-1) for j >= 1, with 0 < s < 1
//   power_law: mass(x)       <= a * x^(-s)  for x > end, with s > 1
enum class TailKind { none, geometric, power_law };

struct TailCertificate {
    TailKind kind = TailKind::none;
    double a = 0.0;
    double s = 0.0;
};

struct PmfMeta {
    std::string family;
    std::vector<std::pair<std::string, double>> params;
    double tol = 0.0;
    std::optional<std::int64_t> seed;
    std::string note;

    double param(const std::string& name, double fallback = 0.0) const {
        for (const auto& [k, v] : params)
            if (k == name) return v;
        return fallback;
    }
};

// A normalized finite probability window plus a certified bound on the mass
// the window does not carry. The window probs sum to ~1 by construction; the
// tail bound is reported in the same (normalized) units.
struct TruncatedPmf {
    long support_start = 0;
    std::vector<double> probs;
    double tail_bound = 0.0;
    TailCertificate tail;
    PmfMeta meta;

    long size() const { return static_cast<long>(probs.size()); }
    long support_end() const { return support_start + size() - 1; }

    double at(long x) const {
        const long i = x - support_start;
        if (i < 0 || i >= size()) return 0.0;
        return probs[static_cast<std::size_t>(i)];
    }

    double mass() const {
        KahanSum acc;
        for (double p : probs) acc.add(p);
        return acc.value();
    }

    double mean() const {
        KahanSum acc;
        for (long i = 0; i < size(); ++i)
            acc.add(static_cast<double>(support_start + i) * probs[static_cast<std::size_t>(i)]);
        return acc.value();
    }

    double variance() const {
        const double m = mean();
        KahanSum acc;
        for (long i = 0; i < size(); ++i) {
            const double d = static_cast<double>(support_start + i) - m;
            acc.add(d * d * probs[static_cast<std::size_t>(i)]);
        }
        return acc.value();
    }

    TruncatedPmf shifted(long offset) const {
        TruncatedPmf out = *this;
        out.support_start += offset;
        return out;
    }
};

// sum(probs) + tail_bound must sit within 10*tol of 1.
inline void validate_pmf(const TruncatedPmf& p, double tol) {
    require_arg(!p.probs.empty(), "pmf window non-empty");
    for (double v : p.probs)
        require_arg(v >= 0.0 && std::isfinite(v), "pmf masses non-negative and finite");
    require_arg(p.tail_bound >= 0.0, "tail_bound >= 0");
    const double total = p.mass() + p.tail_bound;
    require_arg(std::abs(total - 1.0) <= 10.0 * tol + 1e-15,
                "sum(probs) + tail_bound within 10*tol of 1");
}

// Certified bound on sum_{x > support_end} mass(x)^q, or nullopt when the
// available certificate cannot establish convergence (q < 1 with no decay
// information, or a power-law tail with s*q <= 1).
inline std::optional<double> power_tail_bound(const TruncatedPmf& p, double q) {
    if (p.tail_bound == 0.0) return 0.0;
    switch (p.tail.kind) {
        case TailKind::geometric: {
            const double rq = std::pow(p.tail.s, q);
            if (!(rq < 1.0)) return std::nullopt;
            return std::pow(p.tail.a, q) / (1.0 - rq);
        }
        case TailKind::power_law: {
            const double sq = p.tail.s * q;
            if (!(sq > 1.0)) return std::nullopt;
            const double edge = static_cast<double>(p.support_end());
            // integral test: sum_{x>B} x^(-sq) <= B^(1-sq)/(sq-1)
            return std::pow(p.tail.a, q) * std::pow(edge, 1.0 - sq) / (sq - 1.0);
        }
        case TailKind::none:
            // each off-window mass is at most the total tail, so for q >= 1
            // sum m^q <= tail^(q-1) * sum m <= tail^q
            if (q >= 1.0) return std::pow(p.tail_bound, q);
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace compoisson
