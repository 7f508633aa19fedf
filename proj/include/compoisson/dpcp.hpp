#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "compoisson/distributions.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"
#include "compoisson/rng.hpp"

namespace compoisson {

// Parameters of a discrete (pseudo) compound Poisson law: the pgf is
// exp(sum_k lambda_tilde alpha_k (z^k - 1)). Negative alpha_k are
// first-class ("pseudo"); only sampling insists on a genuine mixture.
struct DpcpParams {
    double lambda_tilde = 0.0;
    std::vector<double> alphas;  // alpha_1 .. alpha_N
    std::string source;

    // recursion rounding noise sits at ~1e-17; below this magnitude a sign
    // carries no information
    static constexpr double kSignFloor = 1e-12;

    double alpha_sum() const {
        KahanSum acc;
        for (double a : alphas) acc.add(a);
        return acc.value();
    }

    long negative_count() const {
        long n = 0;
        for (double a : alphas)
            if (a < -kSignFloor) ++n;
        return n;
    }

    // 1-based index of the first genuinely negative weight
    std::optional<long> first_negative_index() const {
        for (std::size_t i = 0; i < alphas.size(); ++i)
            if (alphas[i] < -kSignFloor) return static_cast<long>(i) + 1;
        return std::nullopt;
    }
};

// G(z) = sum_n P(n) z^n over the window; |error| <= tail_bound on |z| <= 1.
inline std::complex<double> pgf_eval(const TruncatedPmf& pmf, std::complex<double> z) {
    require_arg(std::abs(z) <= 1.0 + 1e-12, "|z| <= 1");
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = pmf.probs.size(); i-- > 0;) acc = acc * z + pmf.probs[i];
    for (long k = 0; k < pmf.support_start; ++k) acc *= z;  // z^support_start, 0^0 = 1
    return acc;
}

struct MinModulusResult {
    double min_mod = 0.0;
    std::complex<double> argmin;
};

// Minimum of |G| over a polar grid on the closed unit disk. A screening
// statistic for zero-freeness, not a proof.
inline MinModulusResult pgf_min_modulus(const TruncatedPmf& pmf, int radial_steps = 256,
                                        int angular_steps = 256) {
    require_arg(radial_steps >= 64 && angular_steps >= 64, "grid steps >= 64");
    MinModulusResult out;
    out.min_mod = std::numeric_limits<double>::infinity();
    for (int i = 0; i < radial_steps; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(radial_steps - 1);
        for (int j = 0; j < angular_steps; ++j) {
            const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(angular_steps);
            const std::complex<double> z = std::polar(r, th);
            const double m = std::abs(pgf_eval(pmf, z));
            if (m < out.min_mod) {
                out.min_mod = m;
                out.argmin = z;
            }
        }
    }
    return out;
}

// Solve the compound-Poisson recursion for (lambda_tilde, alpha_1..alpha_n):
//   P_{n+1} = lambda_tilde/(n+1) * sum_{j=1}^{n+1} j alpha_j P_{n+1-j},
// with lambda_tilde = -ln P_0. Recovery is exact on any law with P_0 > 0;
// whether the alphas are non-negative is the DCP question, reported, not
// assumed.
inline DpcpParams dpcp_recover(const TruncatedPmf& pmf, long n_terms) {
    require_arg(n_terms >= 1, "n_terms >= 1");
    if (pmf.support_start != 0 || !(pmf.at(0) > 0.0))
        throw_numeric(errkind::zero_mass_at_origin, "recovery needs P(X=0) > 0");
    require_arg(n_terms < pmf.size(), "n_terms within the stored window");

    DpcpParams out;
    out.lambda_tilde = -std::log(pmf.at(0));
    out.source = pmf.meta.family;
    out.alphas.resize(static_cast<std::size_t>(n_terms), 0.0);
    const double p0 = pmf.at(0);
    for (long n = 0; n < n_terms; ++n) {
        // alpha_{n+1} from the (n -> n+1) step
        KahanSum known;
        for (long j = 1; j <= n; ++j)
            known.add(static_cast<double>(j) * out.alphas[static_cast<std::size_t>(j) - 1] *
                      pmf.at(n + 1 - j));
        const double target = static_cast<double>(n + 1) * pmf.at(n + 1) / out.lambda_tilde;
        out.alphas[static_cast<std::size_t>(n)] =
            (target - known.value()) / (static_cast<double>(n + 1) * p0);
    }
    return out;
}

// Forward Panjer recursion from (lambda_tilde, alphas). The window may fail
// to exhaust the mass when n_max is small; the deficit goes to tail_bound.
inline TruncatedPmf dpcp_reconstruct(const DpcpParams& params, long n_max) {
    require_arg(params.lambda_tilde > 0.0, "lambda_tilde > 0");
    require_arg(n_max >= 0, "n_max >= 0");
    TruncatedPmf out;
    out.support_start = 0;
    out.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.probs[0] = std::exp(-params.lambda_tilde);
    for (long n = 0; n < n_max; ++n) {
        KahanSum acc;
        const long jmax = std::min<long>(n + 1, static_cast<long>(params.alphas.size()));
        for (long j = 1; j <= jmax; ++j)
            acc.add(static_cast<double>(j) * params.alphas[static_cast<std::size_t>(j) - 1] *
                    out.probs[static_cast<std::size_t>(n + 1 - j)]);
        out.probs[static_cast<std::size_t>(n) + 1] =
            params.lambda_tilde / static_cast<double>(n + 1) * acc.value();
    }
    out.tail_bound = std::abs(1.0 - out.mass());
    out.meta.family = "dpcp-reconstruct";
    out.meta.params = {{"lambda_tilde", params.lambda_tilde},
                       {"n_alphas", static_cast<double>(params.alphas.size())}};
    return out;
}

// Sample X = Y_1 + ... + Y_N with N ~ Poisson(lambda_tilde) and jumps from
// the alpha mixture. Requires a genuine DCP parameterization.
inline std::vector<long> dcp_sample(const DpcpParams& params, std::size_t n, std::uint64_t seed) {
    for (double a : params.alphas)
        if (a < -DpcpParams::kSignFloor)
            throw_numeric(errkind::pseudo_parameters,
                          "negative alpha weights have no sampling interpretation");
    if (std::abs(params.alpha_sum() - 1.0) > 1e-9)
        throw_numeric(errkind::pseudo_parameters, "jump weights must sum to 1 within 1e-9");
    require_arg(params.lambda_tilde > 0.0, "lambda_tilde > 0");

    std::vector<double> jump_cdf(params.alphas.size());
    KahanSum cum;
    for (std::size_t i = 0; i < params.alphas.size(); ++i) {
        cum.add(std::max(params.alphas[i], 0.0));
        jump_cdf[i] = cum.value();
    }
    jump_cdf.back() = 1.0;

    Rng rng(seed);
    const double lam = params.lambda_tilde;
    std::vector<long> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Poisson count by inversion
        long events = 0;
        double u = rng.uniform01();
        double pk = std::exp(-lam), cdf = pk;
        while (u > cdf && events < 100000) {
            ++events;
            pk *= lam / static_cast<double>(events);
            cdf += pk;
        }
        long total = 0;
        for (long e = 0; e < events; ++e) {
            const double v = rng.uniform01();
            const auto it = std::lower_bound(jump_cdf.begin(), jump_cdf.end(), v);
            total += static_cast<long>(it - jump_cdf.begin()) + 1;
        }
        draws[i] = total;
    }
    return draws;
}

}  // namespace compoisson
