#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "compoisson/distributions.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"

namespace compoisson {

// ---------------------------------------------------------------------------
// convolution and conditional-given-sum
// ---------------------------------------------------------------------------

inline TruncatedPmf convolve(const TruncatedPmf& a, const TruncatedPmf& b) {
    TruncatedPmf out;
    out.support_start = a.support_start + b.support_start;
    out.probs.assign(a.probs.size() + b.probs.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.probs.size(); ++i) {
        if (a.probs[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.probs.size(); ++j)
            out.probs[i + j] += a.probs[i] * b.probs[j];
    }
    out.tail_bound = a.tail_bound + b.tail_bound;
    out.meta.family = "convolution";
    out.meta.note = a.meta.family + " * " + b.meta.family;
    return out;
}

// P(X = k | X + Y = s) for k = 0..s, by the Bayes ratio of the two windows.
inline std::vector<double> conditional_given_sum(const TruncatedPmf& x, const TruncatedPmf& y,
                                                 long s) {
    require_arg(s >= 0, "s >= 0");
    std::vector<double> out(static_cast<std::size_t>(s) + 1, 0.0);
    KahanSum denom;
    for (long k = 0; k <= s; ++k) {
        const double v = x.at(k) * y.at(s - k);
        out[static_cast<std::size_t>(k)] = v;
        denom.add(v);
    }
    const double d = denom.value();
    if (!(d > 0.0))
        throw_numeric(errkind::zero_probability_sum,
                      "P(X + Y = " + std::to_string(s) + ") vanishes on the window");
    for (auto& v : out) v /= d;
    return out;
}

// ---------------------------------------------------------------------------
// the closure-failure sequence a_n(lambda_x, lambda_y, nu)
// ---------------------------------------------------------------------------

// a_n = sum_k (binom(n,k) p^k q^(n-k))^nu with p = lambda_x/(lambda_x+lambda_y).
// a_n == 1 for all n iff nu == 1; the sign of a_n - 1 matches the sign of 1 - nu.
inline std::vector<double> a_sequence(double lambda_x, double lambda_y, double nu, long n_max) {
    require_arg(lambda_x > 0.0 && lambda_y > 0.0, "lambda_x, lambda_y > 0");
    require_arg(nu > 0.0, "nu > 0");
    require_arg(n_max >= 0, "n_max >= 0");
    const double lp = std::log(lambda_x) - std::log(lambda_x + lambda_y);
    const double lq = std::log(lambda_y) - std::log(lambda_x + lambda_y);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 1.0);
    for (long n = 1; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        std::vector<double> lt(static_cast<std::size_t>(n) + 1);
        double mx = -std::numeric_limits<double>::infinity();
        for (long k = 0; k <= n; ++k) {
            const double dk = static_cast<double>(k);
            const double l = nu * (std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) -
                                   std::lgamma(dn - dk + 1.0) + dk * lp + (dn - dk) * lq);
            lt[static_cast<std::size_t>(k)] = l;
            mx = std::max(mx, l);
        }
        KahanSum acc;
        for (double l : lt) acc.add(std::exp(l - mx));
        out[static_cast<std::size_t>(n)] = std::exp(mx) * acc.value();
    }
    return out;
}

struct ClosureReport {
    double nu = 1.0;
    double lambda_x = 0.0;  // mu-scale parameters, lambda_i^(1/nu)
    double lambda_y = 0.0;
    std::vector<double> a_seq;
    std::optional<long> first_violation_n;  // vs CMP fitted from the n=1 ratio
    double max_ratio_deviation = 0.0;
    std::optional<long> first_violation_vs_sum;  // vs CMP(lambda1+lambda2, nu)
    double max_ratio_deviation_vs_sum = 0.0;
    double lambda_hat = 0.0;
};

// Convolve two same-nu CMP laws and test the consecutive-ratio sequence
// against the CMP recurrence lambda/n^nu, for the lambda fitted at n = 1 and
// for lambda1 + lambda2. Any deviation beyond tol marks non-closure.
inline ClosureReport closure_test(double lambda1, double lambda2, double nu, long n_max,
                                  double tol = 1e-6) {
    require_arg(n_max >= 2, "n_max >= 2");
    // windows must reach n_max so the convolution is complete through the scan
    const TruncatedPmf sum =
        convolve(cmp_pmf(CmpParams(lambda1, nu), n_max), cmp_pmf(CmpParams(lambda2, nu), n_max));

    ClosureReport rep;
    rep.nu = nu;
    rep.lambda_x = std::pow(lambda1, 1.0 / nu);
    rep.lambda_y = std::pow(lambda2, 1.0 / nu);
    rep.a_seq = a_sequence(rep.lambda_x, rep.lambda_y, nu, n_max);

    const long last = std::min<long>(n_max, sum.support_end());
    require_arg(last >= 2, "convolution window too short");
    rep.lambda_hat = sum.at(1) / sum.at(0);

    for (long n = 1; n <= last; ++n) {
        const double prev = sum.at(n - 1);
        if (!(prev > 1e-250)) break;
        const double ratio = sum.at(n) / prev;
        const double nnu = std::pow(static_cast<double>(n), nu);
        const double dev = std::abs(ratio * nnu / rep.lambda_hat - 1.0);
        const double dev_sum = std::abs(ratio * nnu / (lambda1 + lambda2) - 1.0);
        rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, dev);
        rep.max_ratio_deviation_vs_sum = std::max(rep.max_ratio_deviation_vs_sum, dev_sum);
        if (dev > tol && !rep.first_violation_n) rep.first_violation_n = n;
        if (dev_sum > tol && !rep.first_violation_vs_sum) rep.first_violation_vs_sum = n;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Stein residual and the Rao-Rubin damage-model gap
// ---------------------------------------------------------------------------

struct SteinResult {
    double max_residual = 0.0;
    long argmax_j = 0;
};

// Residual of the CMP Stein identity with indicator test functions:
// residual(j) = |lambda P(W = j-1) - j^nu P(W = j)|.
inline SteinResult stein_residual(const TruncatedPmf& w, double lambda, double nu) {
    require_arg(lambda > 0.0 && nu > 0.0, "lambda, nu > 0");
    SteinResult out;
    const long j0 = std::max<long>(1, w.support_start);
    for (long j = j0; j <= w.support_end(); ++j) {
        const double r =
            std::abs(lambda * w.at(j - 1) - std::pow(static_cast<double>(j), nu) * w.at(j));
        if (r > out.max_residual) {
            out.max_residual = r;
            out.argmax_j = j;
        }
    }
    return out;
}

// Damage model: given X = z, the survivor count Y is CMB(z, p, nu). Returns
// max_r |P(Y = r) - P(Y = r | X = Y)|, which vanishes iff X is CMP.
inline double rao_rubin_gap(const TruncatedPmf& x, double p, double nu) {
    require_arg(p > 0.0 && p < 1.0, "0 < p < 1");
    require_arg(nu > 0.0, "nu > 0");
    require_arg(x.support_start == 0, "X supported from 0");
    if (!(x.tail_bound < 1e-9))
        throw_numeric(errkind::window_mass, "window mass below 1 - 1e-9");

    const long zmax = x.support_end();
    std::vector<KahanSum> marginal(static_cast<std::size_t>(zmax) + 1);
    KahanSum diag_total;
    std::vector<double> diag(static_cast<std::size_t>(zmax) + 1, 0.0);
    for (long z = 0; z <= zmax; ++z) {
        const double pz = x.at(z);
        const TruncatedPmf kz =
            (z == 0) ? TruncatedPmf{0, {1.0}, 0.0, {}, {}} : cmb_pmf(CmbParams(z, p, nu));
        for (long r = 0; r <= z; ++r)
            marginal[static_cast<std::size_t>(r)].add(pz * kz.at(r));
        diag[static_cast<std::size_t>(z)] = pz * kz.at(z);
        diag_total.add(diag[static_cast<std::size_t>(z)]);
    }

    const double dt = diag_total.value();
    if (!(dt > 0.0)) throw_numeric(errkind::zero_probability_sum, "P(X = Y) vanishes");
    double gap = 0.0;
    for (long r = 0; r <= zmax; ++r)
        gap = std::max(gap, std::abs(marginal[static_cast<std::size_t>(r)].value() -
                                     diag[static_cast<std::size_t>(r)] / dt));
    return gap;
}

// The law that the damage-model lemma pairs with the CMB(z, p, nu) kernel:
// P_z proportional to theta^z c_z with c_z = N(z, p, nu)/(z!)^nu, i.e. the
// unique family closing the Rao-Rubin gap under that kernel. At nu = 1 the
// binomial theorem gives N == 1 and this is the Poisson family.
inline TruncatedPmf damage_stable_law(double theta, double p, double nu, long z_max) {
    require_arg(theta > 0.0, "theta > 0");
    require_arg(p > 0.0 && p < 1.0, "0 < p < 1");
    require_arg(nu > 0.0 && z_max >= 1, "nu > 0, z_max >= 1");
    TruncatedPmf out;
    out.support_start = 0;
    out.probs.resize(static_cast<std::size_t>(z_max) + 1);
    KahanSum sum;
    for (long z = 0; z <= z_max; ++z) {
        KahanSum n;
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> lt(static_cast<std::size_t>(z) + 1);
        for (long i = 0; i <= z; ++i) {
            const double lb = std::lgamma(z + 1.0) - std::lgamma(i + 1.0) -
                              std::lgamma(z - i + 1.0);
            lt[static_cast<std::size_t>(i)] =
                nu * lb + i * std::log(p) + (z - i) * std::log1p(-p);
            mx = std::max(mx, lt[static_cast<std::size_t>(i)]);
        }
        for (double l : lt) n.add(std::exp(l - mx));
        const double v =
            std::exp(z * std::log(theta) - nu * std::lgamma(z + 1.0) + mx) * n.value();
        out.probs[static_cast<std::size_t>(z)] = v;
        sum.add(v);
    }
    for (auto& v : out.probs) v /= sum.value();
    out.meta.family = "damage-stable";
    out.meta.params = {{"theta", theta}, {"p", p}, {"nu", nu}};
    return out;
}

// ---------------------------------------------------------------------------
// total variation and the two limit theorems
// ---------------------------------------------------------------------------

// Half-L1 over the union window; the upper end folds in both tails.
struct TvInterval {
    double lower = 0.0;
    double upper = 0.0;
};

inline TvInterval tv_distance(const TruncatedPmf& a, const TruncatedPmf& b) {
    const long lo = std::min(a.support_start, b.support_start);
    const long hi = std::max(a.support_end(), b.support_end());
    KahanSum acc;
    for (long x = lo; x <= hi; ++x) acc.add(std::abs(a.at(x) - b.at(x)));
    TvInterval out;
    out.lower = 0.5 * acc.value();
    out.upper = std::min(1.0, out.lower + 0.5 * (a.tail_bound + b.tail_bound));
    return out;
}

struct LimitCurve {
    std::vector<double> grid;
    std::vector<double> tv;  // upper bounds
    double lambda = 0.0;
    double nu = 1.0;
};

// CMB(m, lambda/m^nu, nu) -> CMP(lambda, nu) along an m grid.
inline LimitCurve limit_cmb_to_cmp(double lambda, double nu, const std::vector<long>& m_grid) {
    LimitCurve curve;
    curve.lambda = lambda;
    curve.nu = nu;
    const TruncatedPmf target = cmp_pmf(CmpParams(lambda, nu));
    for (long m : m_grid) {
        const double pm = lambda / std::pow(static_cast<double>(m), nu);
        require_arg(pm < 1.0, "m^nu > lambda across the grid");
        const TruncatedPmf approx = cmb_pmf(CmbParams(m, pm, nu));
        curve.grid.push_back(static_cast<double>(m));
        curve.tv.push_back(tv_distance(approx, target).upper);
    }
    return curve;
}

// CMNB(r, nu, lambda/(r^nu + lambda)) -> CMP(lambda, nu) along an r grid.
inline LimitCurve limit_cmnb_to_cmp(double lambda, double nu, const std::vector<double>& r_grid) {
    require_arg(std::is_sorted(r_grid.begin(), r_grid.end()), "r_grid increasing");
    LimitCurve curve;
    curve.lambda = lambda;
    curve.nu = nu;
    const TruncatedPmf target = cmp_pmf(CmpParams(lambda, nu));
    for (double r : r_grid) {
        const double pr = lambda / (std::pow(r, nu) + lambda);
        const TruncatedPmf approx = cmnb_pmf(CmnbParams(r, nu, pr));
        curve.grid.push_back(r);
        curve.tv.push_back(tv_distance(approx, target).upper);
    }
    return curve;
}

}  // namespace compoisson
