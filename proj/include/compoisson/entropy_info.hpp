#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "compoisson/characterizations.hpp"
#include "compoisson/com_transform.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"

namespace compoisson {

namespace detail {

// sum of P^alpha over the window, with a finiteness certificate for the tail
inline double certified_power_sum(const TruncatedPmf& pmf, double alpha) {
    if (!power_tail_bound(pmf, alpha))
        throw_numeric(errkind::divergence,
                      "sum P^alpha cannot be certified finite for alpha = " + std::to_string(alpha));
    KahanSum acc;
    for (double p : pmf.probs)
        if (p > 0.0) acc.add(std::exp(alpha * std::log(p)));
    return acc.value();
}

}  // namespace detail

// Renyi entropy of order alpha: ln(sum P^alpha) / (1 - alpha).
inline double renyi_entropy(const TruncatedPmf& pmf, double alpha) {
    require_arg(alpha > 0.0 && alpha != 1.0, "alpha > 0, alpha != 1");
    return std::log(detail::certified_power_sum(pmf, alpha)) / (1.0 - alpha);
}

// Tsallis entropy of order alpha: (sum P^alpha - 1) / (1 - alpha).
inline double tsallis_entropy(const TruncatedPmf& pmf, double alpha) {
    require_arg(alpha > 0.0 && alpha != 1.0, "alpha > 0, alpha != 1");
    return (detail::certified_power_sum(pmf, alpha) - 1.0) / (1.0 - alpha);
}

// Kagan score J(x) = 1 - P(x-1)/P(x) where P(x) > 0 (else 0), with
// P(support_start - 1) taken as 0, and I = E J^2.
struct FisherReport {
    std::vector<double> score;
    double fisher_info = 0.0;
    bool rsp = false;  // right side positive, checked on the stored window
    double nu = 1.0;
    std::optional<double> com_fisher_info;
    double neglected_mass = 0.0;
};

inline FisherReport score_and_fisher(const TruncatedPmf& pmf) {
    FisherReport rep;
    rep.score.resize(pmf.probs.size(), 0.0);
    rep.rsp = true;
    KahanSum info;
    for (long i = 0; i < pmf.size(); ++i) {
        const double p = pmf.probs[static_cast<std::size_t>(i)];
        if (p > 0.0) {
            const double prev = (i == 0) ? 0.0 : pmf.probs[static_cast<std::size_t>(i) - 1];
            const double j = 1.0 - prev / p;
            rep.score[static_cast<std::size_t>(i)] = j;
            info.add(j * j * p);
            if (i + 1 < pmf.size() && pmf.probs[static_cast<std::size_t>(i) + 1] <= 0.0)
                rep.rsp = false;
        }
    }
    rep.fisher_info = info.value();
    rep.neglected_mass = pmf.tail_bound;
    return rep;
}

// COM-type Fisher information: the Kagan information of X_{1/nu}. The score
// and fisher_info fields refer to the original law; com_fisher_info carries
// the transformed-law information.
inline FisherReport com_fisher_info(const TruncatedPmf& pmf, double nu, double tol = kDefaultTol) {
    require_arg(nu > 0.0, "nu > 0");
    FisherReport rep = score_and_fisher(pmf);
    rep.nu = nu;
    const ComTypeResult t = com_type(pmf, 1.0 / nu, tol);
    const FisherReport transformed = score_and_fisher(t.pmf);
    rep.com_fisher_info = transformed.fisher_info;
    rep.neglected_mass = std::max(pmf.tail_bound, t.pmf.tail_bound);
    return rep;
}

// Stam gap for the COM-type information at order nu:
//   lhs = 1 / C_nu I_{X+Y},  rhs = 1 / C_nu I_X + 1 / C_nu I_Y.
// C_nu I is the Kagan information of the 1/nu transform, and the sum's
// information is that of the independent sum of the transformed variables,
// which is what the equality characterization speaks about.
struct StamResult {
    double gap = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

inline StamResult stam_gap(const TruncatedPmf& pmf_x, const TruncatedPmf& pmf_y, double nu,
                           double tol = kDefaultTol) {
    require_arg(nu > 0.0, "nu > 0");
    const TruncatedPmf tx = com_type(pmf_x, 1.0 / nu, tol).pmf;
    const TruncatedPmf ty = com_type(pmf_y, 1.0 / nu, tol).pmf;

    const FisherReport fx = score_and_fisher(tx);
    const FisherReport fy = score_and_fisher(ty);
    if (!fx.rsp || !fy.rsp)
        throw_numeric(errkind::rsp_violation,
                      "X_{1/nu} and Y_{1/nu} must be right-side positive on the window");
    if (!(std::isfinite(fx.fisher_info) && std::isfinite(fy.fisher_info)) ||
        fx.fisher_info <= 0.0 || fy.fisher_info <= 0.0)
        throw_numeric(errkind::non_finite_information, "Fisher information degenerate");

    const TruncatedPmf tz = convolve(tx, ty);
    const FisherReport fz = score_and_fisher(tz);
    if (!(std::isfinite(fz.fisher_info)) || fz.fisher_info <= 0.0)
        throw_numeric(errkind::non_finite_information, "Fisher information of the sum degenerate");

    StamResult out;
    out.lhs = 1.0 / fz.fisher_info;
    out.rhs = 1.0 / fx.fisher_info + 1.0 / fy.fisher_info;
    out.gap = out.lhs - out.rhs;
    return out;
}

}  // namespace compoisson
