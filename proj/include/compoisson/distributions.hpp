#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"
#include "compoisson/rng.hpp"
#include "compoisson/series.hpp"

namespace compoisson {

inline constexpr double kDefaultTol = 1e-12;

// ---------------------------------------------------------------------------
// parameter records
// ---------------------------------------------------------------------------

// P(X=k) proportional to lambda^k / (k!)^nu. nu < 1 overdispersed, nu > 1
// underdispersed, nu = 1 Poisson.
struct CmpParams {
    double lambda;
    double nu;

    CmpParams(double lambda_, double nu_) : lambda(lambda_), nu(nu_) {
        require_arg(lambda > 0.0 && std::isfinite(lambda), "lambda > 0");
        require_arg(nu > 0.0 && std::isfinite(nu), "nu > 0");
    }
};

// P(X=k) proportional to binom(m,k)^nu p^k (1-p)^(m-k) on 0..m.
struct CmbParams {
    long m;
    double p;
    double nu;

    CmbParams(long m_, double p_, double nu_) : m(m_), p(p_), nu(nu_) {
        require_arg(m >= 0, "m >= 0");
        require_arg(p > 0.0 && p < 1.0, "0 < p < 1");
        require_arg(nu > 0.0 && std::isfinite(nu), "nu > 0");
    }
};

// P(X=k) proportional to (Gamma(r+k)/(k! Gamma(r)))^nu p^k.
struct CmnbParams {
    double r;
    double nu;
    double p;

    CmnbParams(double r_, double nu_, double p_) : r(r_), nu(nu_), p(p_) {
        require_arg(r > 0.0 && std::isfinite(r), "r > 0");
        require_arg(nu > 0.0 && std::isfinite(nu), "nu > 0");
        require_arg(p > 0.0 && p < 1.0, "0 < p < 1");
    }
};

// P(X=k) proportional to Gamma(r+k)^beta theta^k / (k!)^alpha, with the
// parameter space (r >= 0, theta > 0, alpha > beta) or
// (r > 0, 0 < theta < 1, alpha = beta).
struct EcompParams {
    double r;
    double theta;
    double alpha;
    double beta;

    EcompParams(double r_, double theta_, double alpha_, double beta_)
        : r(r_), theta(theta_), alpha(alpha_), beta(beta_) {
        const bool strict = r >= 0.0 && theta > 0.0 && alpha > beta;
        const bool boundary = r > 0.0 && theta > 0.0 && theta < 1.0 && alpha == beta;
        require_arg(strict || boundary,
                    "(r >= 0, theta > 0, alpha > beta) or (r > 0, 0 < theta < 1, alpha = beta)");
        // Gamma(r+k) enters with a nonzero power, so r = 0 would put Gamma(0)
        // in the k = 0 term; only the beta = 0 path admits r = 0.
        require_arg(beta == 0.0 || r > 0.0, "r > 0 when beta != 0");
    }
};

// Generic one-parameter power series: normalized weights w_k, k >= support_start.
// The optional fields carry certified tail knowledge for the truncation engine;
// the factories below fill them in.
struct SeriesSpec {
    std::function<double(long)> log_weight;
    std::string name = "series";
    long support_start = 0;
    std::optional<long> mode_hint;  // argmax of w; scanned for when absent
    std::vector<std::pair<std::string, double>> params;
    std::function<double(long)> ratio_sup;                // sup_{j>=x} w(j+1)/w(j)
    std::function<double(long, double)> tail_sum_bound;   // (x, w_x) -> bound on sum_{j>x} w_j
    bool power_law_tail = false;
    double power_exponent = 0.0;
};

// ---------------------------------------------------------------------------
// family plans for the truncation engine
// ---------------------------------------------------------------------------

namespace detail {

inline SeriesPlan cmp_plan(const CmpParams& ps) {
    SeriesPlan plan;
    const double lambda = ps.lambda, nu = ps.nu;
    plan.ratio = [lambda, nu](long k) { return lambda / std::pow(static_cast<double>(k) + 1.0, nu); };
    plan.log_weight = [lambda, nu](long k) {
        return static_cast<double>(k) * std::log(lambda) - nu * std::lgamma(static_cast<double>(k) + 1.0);
    };
    const double mode = std::pow(lambda, 1.0 / nu);
    plan.mode = (mode < 1.0) ? 0 : static_cast<long>(std::min(mode, 1.9e7));
    plan.ratio_sup = plan.ratio;  // strictly decreasing in k
    plan.name = "cmp";
    return plan;
}

inline SeriesPlan cmb_plan(const CmbParams& ps) {
    SeriesPlan plan;
    const double nu = ps.nu, logit = std::log(ps.p) - std::log1p(-ps.p);
    const long m = ps.m;
    plan.ratio = [m, nu, logit](long k) {
        if (k >= m) return 0.0;
        const double dk = static_cast<double>(k);
        return std::exp(nu * (std::log(static_cast<double>(m) - dk) - std::log(dk + 1.0)) + logit);
    };
    plan.log_weight = [m, nu, logit, p = ps.p](long k) {
        const double dm = static_cast<double>(m), dk = static_cast<double>(k);
        return nu * (std::lgamma(dm + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dm - dk + 1.0)) +
               dk * std::log(p) + (dm - dk) * std::log1p(-p);
    };
    plan.support_end = m;
    // ratio >= 1 iff (m-k)/(k+1) >= ((1-p)/p)^(1/nu)
    const double c = std::exp(-logit / nu);
    const double kstar = (static_cast<double>(m) - c) / (1.0 + c);
    plan.mode = std::clamp(static_cast<long>(std::floor(kstar)) + 1, 0L, m);
    if (plan.mode > 0 && plan.ratio(plan.mode - 1) < 1.0) --plan.mode;
    plan.name = "cmb";
    return plan;
}

inline SeriesPlan cmnb_plan(const CmnbParams& ps) {
    SeriesPlan plan;
    const double r = ps.r, nu = ps.nu, p = ps.p;
    plan.ratio = [r, nu, p](long k) {
        const double dk = static_cast<double>(k);
        return std::exp(nu * (std::log(r + dk) - std::log(dk + 1.0))) * p;
    };
    plan.log_weight = [r, nu, p](long k) {
        const double dk = static_cast<double>(k);
        return nu * (std::lgamma(r + dk) - std::lgamma(dk + 1.0) - std::lgamma(r)) +
               dk * std::log(p);
    };
    // ratio(k) is monotone: decreasing for r > 1 (sup attained at x),
    // increasing toward p for r <= 1 (sup is the limit p)
    if (r > 1.0) {
        plan.ratio_sup = plan.ratio;
        const double c = std::pow(p, -1.0 / nu);  // ratio >= 1 iff (r+k)/(k+1) >= c
        plan.mode = (c <= 1.0) ? 0 : std::max(0L, static_cast<long>(std::floor((r - c) / (c - 1.0))) + 1);
        if (plan.mode > 0 && plan.ratio(plan.mode - 1) < 1.0) --plan.mode;
    } else {
        plan.ratio_sup = [p](long) { return p; };
        plan.mode = 0;
    }
    plan.gate_run = 50;
    plan.name = "cmnb";
    return plan;
}

inline SeriesPlan ecomp_plan(const EcompParams& ps) {
    SeriesPlan plan;
    const double r = ps.r, th = ps.theta, a = ps.alpha, b = ps.beta;
    plan.ratio = [r, th, a, b](long k) {
        const double dk = static_cast<double>(k);
        const double lg = (b == 0.0) ? 0.0 : b * std::log(r + dk);
        return std::exp(lg - a * std::log(dk + 1.0)) * th;
    };
    plan.log_weight = [r, th, a, b](long k) {
        const double dk = static_cast<double>(k);
        const double lg = (b == 0.0) ? 0.0 : b * std::lgamma(r + dk);
        return lg + dk * std::log(th) - a * std::lgamma(dk + 1.0);
    };
    // log ratio derivative is b/(r+k) - a/(k+1): at most one sign change, so
    // the ratio is unimodal with argmax near (b - a r)/(a - b) when a > b,
    // and monotone toward theta when a = b
    if (a > b) {
        const double peak = std::max(0.0, (b - a * r) / (a - b));
        plan.ratio_sup = [ratio = plan.ratio, peak](long x) {
            if (static_cast<double>(x) >= peak) return ratio(x);
            const long kl = std::max(x, static_cast<long>(std::floor(peak)));
            return std::max({ratio(x), ratio(kl), ratio(kl + 1)});
        };
    } else {
        plan.ratio_sup = [ratio = plan.ratio, th](long x) { return std::max(ratio(x), th); };
    }
    plan.mode = scan_mode(plan);
    plan.gate_run = 50;
    plan.name = "ecomp";
    return plan;
}

inline SeriesPlan series_plan(const SeriesSpec& spec) {
    SeriesPlan plan;
    plan.log_weight = spec.log_weight;
    plan.ratio = [lw = spec.log_weight](long x) { return std::exp(lw(x + 1) - lw(x)); };
    plan.support_start = spec.support_start;
    plan.ratio_sup = spec.ratio_sup;
    plan.tail_sum_bound = spec.tail_sum_bound;
    plan.name = spec.name;
    plan.mode = spec.mode_hint ? *spec.mode_hint : scan_mode(plan);
    if (!spec.ratio_sup && !spec.tail_sum_bound) {
        // no analytic tail knowledge: fall back to the observed-ratio gate;
        // build_series_window still requires a certificate to stop, so give
        // it the local ratio as sup and insist on a long sub-1 run first
        plan.ratio_sup = plan.ratio;
        plan.gate_run = 50;
    }
    return plan;
}

inline PmfMeta make_meta(std::string family,
                         std::vector<std::pair<std::string, double>> params) {
    PmfMeta meta;
    meta.family = std::move(family);
    meta.params = std::move(params);
    return meta;
}

// exponential-type families: push the normalizer to the machine floor so the
// window probabilities are accurate to rounding regardless of the window tol
inline double floor_tol(double tol) { return std::min(tol, 1e-17); }

}  // namespace detail

// ---------------------------------------------------------------------------
// normalizing constant Z(lambda, nu)
// ---------------------------------------------------------------------------

struct NormalizerResult {
    double value = 0.0;       // sum over the computed window
    double log_value = 0.0;
    double tail_bound = 0.0;  // certified bound on the rest of the series:
                              // relative to value in the log form, absolute in the linear form
    long terms = 0;
};

// Z in the log domain; never overflows for valid parameters.
inline NormalizerResult log_normalizer_series(const CmpParams& params, double tol = kDefaultTol) {
    require_arg(tol > 0.0 && tol <= 1e-3, "tol in (0, 1e-3]");
    const auto plan = detail::cmp_plan(params);
    const auto win = detail::build_series_window(plan, detail::floor_tol(tol));
    NormalizerResult out;
    out.log_value = plan.log_weight(plan.mode) + std::log(win.sum);
    out.value = std::exp(out.log_value);
    out.tail_bound = win.tail_abs / win.sum;
    out.terms = win.terms;
    return out;
}

inline NormalizerResult normalizer_series(const CmpParams& params, double tol = kDefaultTol) {
    NormalizerResult out = log_normalizer_series(params, tol);
    if (!std::isfinite(out.value))
        throw_numeric(errkind::overflow,
                      "normalizer exceeds double range (log Z = " + std::to_string(out.log_value) +
                          "); use the log-domain form");
    out.tail_bound *= out.value;
    return out;
}

// Leading term of the closed-form large-lambda approximation
//   Z ~ exp(nu lambda^(1/nu)) / (lambda^((nu-1)/(2 nu)) (2 pi)^((nu-1)/2) sqrt(nu)).
inline double log_normalizer_asymptotic(const CmpParams& params) {
    const double lam = params.lambda, nu = params.nu;
    return nu * std::pow(lam, 1.0 / nu) - (nu - 1.0) / (2.0 * nu) * std::log(lam) -
           (nu - 1.0) / 2.0 * std::log(2.0 * M_PI) - 0.5 * std::log(nu);
}

inline double normalizer_asymptotic(const CmpParams& params) {
    const double lv = log_normalizer_asymptotic(params);
    const double v = std::exp(lv);
    if (!std::isfinite(v))
        throw_numeric(errkind::overflow, "asymptotic normalizer exceeds double range");
    return v;
}

// ---------------------------------------------------------------------------
// pmf builders
// ---------------------------------------------------------------------------

inline TruncatedPmf cmp_pmf(const CmpParams& params, long k_max = -1, double tol = kDefaultTol) {
    const auto plan = detail::cmp_plan(params);
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    opt.k_max = k_max;
    return detail::build_pmf(plan, opt,
                             detail::make_meta("cmp", {{"lambda", params.lambda}, {"nu", params.nu}}),
                             detail::floor_tol(tol));
}

inline TruncatedPmf poisson_pmf(double lambda, double tol = kDefaultTol, long k_max = -1) {
    TruncatedPmf pmf = cmp_pmf(CmpParams(lambda, 1.0), k_max, tol);
    pmf.meta = detail::make_meta("poisson", {{"lambda", lambda}});
    pmf.meta.tol = tol;
    return pmf;
}

inline TruncatedPmf geometric_pmf(double p, double tol = kDefaultTol, long k_max = -1) {
    require_arg(p > 0.0 && p < 1.0, "0 < p < 1");
    detail::SeriesPlan plan;
    const double q = 1.0 - p;
    plan.ratio = [q](long) { return q; };
    plan.log_weight = [q](long k) { return static_cast<double>(k) * std::log(q); };
    plan.mode = 0;
    plan.ratio_sup = [q](long) { return q; };
    plan.name = "geometric";
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    opt.k_max = k_max;
    return detail::build_pmf(plan, opt, detail::make_meta("geometric", {{"p", p}}),
                             detail::floor_tol(tol));
}

inline TruncatedPmf cmb_pmf(const CmbParams& params, double tol = kDefaultTol) {
    const auto plan = detail::cmb_plan(params);
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    opt.k_max = params.m;  // exact finite support, never trimmed
    return detail::build_pmf(
        plan, opt,
        detail::make_meta("cmb", {{"m", static_cast<double>(params.m)}, {"p", params.p}, {"nu", params.nu}}),
        detail::floor_tol(tol));
}

inline TruncatedPmf cmnb_pmf(const CmnbParams& params, double tol = kDefaultTol) {
    const auto plan = detail::cmnb_plan(params);
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    return detail::build_pmf(
        plan, opt, detail::make_meta("cmnb", {{"r", params.r}, {"nu", params.nu}, {"p", params.p}}),
        detail::floor_tol(tol));
}

inline TruncatedPmf binomial_pmf(long m, double p) {
    TruncatedPmf pmf = cmb_pmf(CmbParams(m, p, 1.0));
    pmf.meta = detail::make_meta("binomial", {{"m", static_cast<double>(m)}, {"p", p}});
    pmf.meta.tol = kDefaultTol;
    return pmf;
}

inline TruncatedPmf negative_binomial_pmf(double r, double p, double tol = kDefaultTol) {
    TruncatedPmf pmf = cmnb_pmf(CmnbParams(r, 1.0, p), tol);
    pmf.meta = detail::make_meta("negative-binomial", {{"r", r}, {"p", p}});
    pmf.meta.tol = tol;
    return pmf;
}

inline TruncatedPmf ecomp_pmf(const EcompParams& params, double tol = kDefaultTol) {
    const auto plan = detail::ecomp_plan(params);
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    return detail::build_pmf(plan, opt,
                             detail::make_meta("ecomp", {{"r", params.r},
                                                         {"theta", params.theta},
                                                         {"alpha", params.alpha},
                                                         {"beta", params.beta}}),
                             detail::floor_tol(tol));
}

inline TruncatedPmf power_series_pmf(const SeriesSpec& spec, double tol = kDefaultTol) {
    const auto plan = detail::series_plan(spec);
    detail::PmfBuildOptions opt;
    opt.tol = tol;
    opt.power_law_tail = spec.power_law_tail;
    opt.power_exponent = spec.power_exponent;
    PmfMeta meta = detail::make_meta(spec.name, spec.params);
    // power-law tails cannot be pushed to the machine floor; stop at tol
    const double tol_stop = spec.power_law_tail ? tol : detail::floor_tol(tol);
    return detail::build_pmf(plan, opt, std::move(meta), tol_stop);
}

// ---------------------------------------------------------------------------
// named power-series families
// ---------------------------------------------------------------------------

// Riemann zeta: w_x = x^(-sigma), x = 1, 2, ...
inline SeriesSpec zeta_series(double sigma) {
    require_arg(sigma > 1.0, "sigma > 1");
    SeriesSpec spec;
    spec.log_weight = [sigma](long x) { return -sigma * std::log(static_cast<double>(x)); };
    spec.name = "zeta";
    spec.support_start = 1;
    spec.mode_hint = 1;  // weights strictly decreasing
    spec.params = {{"sigma", sigma}};
    spec.power_law_tail = true;
    spec.power_exponent = sigma;
    // integral test: sum_{j>x} j^(-sigma) <= x^(1-sigma)/(sigma-1) = w_x * x/(sigma-1)
    spec.tail_sum_bound = [sigma](long x, double wx) {
        return wx * static_cast<double>(x) / (sigma - 1.0);
    };
    return spec;
}

// Lerch-type: w_i = rho^i / (c+i)^s, i = 0, 1, ...  (s = 1 gives the pgf
// weights of the Lerch transcendent Phi(rho, 1, c))
inline SeriesSpec lerch_series(double rho, double c, double s = 1.0) {
    require_arg(rho > 0.0 && rho < 1.0, "0 < rho < 1");
    require_arg(c > 0.0, "c > 0");
    SeriesSpec spec;
    spec.log_weight = [rho, c, s](long i) {
        return static_cast<double>(i) * std::log(rho) - s * std::log(c + static_cast<double>(i));
    };
    spec.name = "lerch";
    if (s >= 0.0) spec.mode_hint = 0;  // ratio < rho < 1 everywhere
    spec.params = {{"rho", rho}, {"c", c}, {"s", s}};
    spec.ratio_sup = [rho, c, s](long i) {
        const double local =
            rho * std::exp(s * (std::log(c + static_cast<double>(i)) - std::log(c + static_cast<double>(i) + 1.0)));
        return std::max(rho, local);
    };
    return spec;
}

// COM-hyper-Poisson (shifted COM-Poisson): w_x = (lambda^x / (a+x)!)^nu.
inline SeriesSpec hyper_poisson_series(double a, double lambda, double nu) {
    require_arg(a >= 0.0, "a >= 0");
    require_arg(lambda > 0.0, "lambda > 0");
    require_arg(nu > 0.0, "nu > 0");
    SeriesSpec spec;
    spec.log_weight = [a, lambda, nu](long x) {
        return nu * (static_cast<double>(x) * std::log(lambda) - std::lgamma(a + static_cast<double>(x) + 1.0));
    };
    spec.name = "hyper-poisson";
    spec.mode_hint = std::max(0L, static_cast<long>(std::floor(lambda - a)));
    spec.params = {{"a", a}, {"lambda", lambda}, {"nu", nu}};
    spec.ratio_sup = [a, lambda, nu](long x) {
        return std::exp(nu * (std::log(lambda) - std::log(a + static_cast<double>(x) + 1.0)));
    };
    return spec;
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

struct CmpMoments {
    double mean = 0.0;
    double variance = 0.0;
    double mean_approx = 0.0;  // lambda^(1/nu) - (nu-1)/(2 nu)
};

inline CmpMoments cmp_moments(const CmpParams& params, double tol = kDefaultTol) {
    // moments want the whole computed window, not the tol-trimmed one
    const TruncatedPmf pmf = cmp_pmf(params, -1, detail::floor_tol(tol));
    CmpMoments out;
    out.mean = pmf.mean();
    out.variance = pmf.variance();
    out.mean_approx = std::pow(params.lambda, 1.0 / params.nu) - (params.nu - 1.0) / (2.0 * params.nu);
    return out;
}

// ---------------------------------------------------------------------------
// sampling by CDF inversion
// ---------------------------------------------------------------------------

inline std::vector<long> sample(const TruncatedPmf& pmf, std::size_t n, std::uint64_t seed) {
    if (!(pmf.tail_bound < 1e-9))
        throw_numeric(errkind::tail_too_heavy,
                      "sampling requires tail_bound < 1e-9, got " + std::to_string(pmf.tail_bound));
    std::vector<double> cdf(pmf.probs.size());
    KahanSum acc;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        acc.add(pmf.probs[i]);
        cdf[i] = acc.value();
    }
    cdf.back() = std::max(cdf.back(), 1.0);

    Rng rng(seed);
    std::vector<long> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<long>(it - cdf.begin());
        draws[i] = pmf.support_start + std::min<long>(idx, pmf.size() - 1);
    }
    return draws;
}

// Histogram of draws as an empirical pmf, for TV comparisons.
inline TruncatedPmf empirical_pmf(const std::vector<long>& draws, std::uint64_t seed) {
    require_arg(!draws.empty(), "draws non-empty");
    const auto [lo_it, hi_it] = std::minmax_element(draws.begin(), draws.end());
    const long lo = *lo_it, hi = *hi_it;
    TruncatedPmf out;
    out.support_start = lo;
    out.probs.assign(static_cast<std::size_t>(hi - lo) + 1, 0.0);
    const double w = 1.0 / static_cast<double>(draws.size());
    for (long d : draws) out.probs[static_cast<std::size_t>(d - lo)] += w;
    out.meta.family = "empirical";
    out.meta.seed = static_cast<std::int64_t>(seed);
    return out;
}

}  // namespace compoisson
