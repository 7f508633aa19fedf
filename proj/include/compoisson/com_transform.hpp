#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "compoisson/distributions.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"

namespace compoisson {

// nu-power transform of a discrete law: P'(x) = P(x)^nu / sum_j P(j)^nu.
struct ComTypeResult {
    TruncatedPmf pmf;
    double log_norm_const = 0.0;  // ln C = -ln sum_window P^nu
    double nu = 1.0;
};

// The power sum must be certified finite before the transform is meaningful;
// the input's tail certificate is consulted and transformed along. Existence
// fails when the certificate cannot establish sum P^nu < infinity (heavy
// tails with nu < 1) or when the transformed tail exceeds the tolerance.
inline ComTypeResult com_type(const TruncatedPmf& pmf, double nu, double tol = kDefaultTol) {
    require_arg(nu > 0.0 && std::isfinite(nu), "nu > 0");
    require_arg(tol > 0.0, "tol > 0");

    const auto tail_q = power_tail_bound(pmf, nu);
    if (!tail_q)
        throw_numeric(errkind::existence,
                      "sum P^nu cannot be certified finite for nu = " + std::to_string(nu) +
                          " with the available tail certificate");

    KahanSum acc;
    std::vector<double> powered(pmf.probs.size(), 0.0);
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const double p = pmf.probs[i];
        if (p > 0.0) {
            powered[i] = std::exp(nu * std::log(p));
            acc.add(powered[i]);
        }
    }
    const double wq = acc.value();
    if (!(wq > 0.0) || !std::isfinite(wq))
        throw_numeric(errkind::existence, "window power sum is degenerate");

    const double tail_rel = *tail_q / wq;
    if (tail_rel > 10.0 * tol) {
        std::ostringstream msg;
        msg << "transformed tail " << tail_rel << " exceeds 10*tol = " << 10.0 * tol
            << "; widen the window (k_max) or loosen tol";
        throw_numeric(errkind::existence, msg.str());
    }

    ComTypeResult out;
    out.nu = nu;
    out.log_norm_const = -std::log(wq);
    out.pmf.support_start = pmf.support_start;
    out.pmf.probs.resize(powered.size());
    for (std::size_t i = 0; i < powered.size(); ++i) out.pmf.probs[i] = powered[i] / wq;
    out.pmf.tail_bound = tail_rel;

    switch (pmf.tail.kind) {
        case TailKind::geometric:
            out.pmf.tail.kind = TailKind::geometric;
            out.pmf.tail.a = std::pow(pmf.tail.a, nu) / wq;
            out.pmf.tail.s = std::pow(pmf.tail.s, nu);
            break;
        case TailKind::power_law:
            out.pmf.tail.kind = TailKind::power_law;
            out.pmf.tail.a = std::pow(pmf.tail.a, nu) / wq;
            out.pmf.tail.s = pmf.tail.s * nu;
            break;
        case TailKind::none:
            break;
    }

    out.pmf.meta.family = "com-type";
    out.pmf.meta.params = {{"nu", nu}, {"log_norm_const", out.log_norm_const}};
    out.pmf.meta.tol = tol;
    out.pmf.meta.note = pmf.meta.family.empty() ? "com-type transform"
                                                : "com-type of " + pmf.meta.family;
    return out;
}

// E f(X_nu): expectation of f under the nu-power transform of the law.
inline double com_expectation(const TruncatedPmf& pmf, double nu,
                              const std::function<double(long)>& f, double tol = kDefaultTol) {
    const ComTypeResult t = com_type(pmf, nu, tol);
    KahanSum acc;
    for (long i = 0; i < t.pmf.size(); ++i)
        acc.add(f(t.pmf.support_start + i) * t.pmf.probs[static_cast<std::size_t>(i)]);
    return acc.value();
}

}  // namespace compoisson
