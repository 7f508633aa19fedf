#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"

namespace compoisson {
namespace detail {

// Description of a non-negative weight series w(x), x = support_start, ...,
// given through consecutive-term ratios. Weights are evaluated by a walk
// anchored at the mode, so adjacent terms are ratio-consistent to rounding
// and no (k!)^nu style overflow can occur.
struct SeriesPlan {
    std::function<double(long)> ratio;       // w(x+1)/w(x)
    std::function<double(long)> log_weight;  // log w(x), used only at the anchor
    long support_start = 0;
    long support_end = -1;  // inclusive; -1 means infinite support
    long mode = 0;          // global argmax of w (support units)

    // certified sup of ratio(j) over j >= x; null when unavailable
    std::function<double(long)> ratio_sup;
    // certified bound on sum_{j > x} w(j) given w(x); overrides the
    // geometric bound (needed for power-law tails whose ratios tend to 1)
    std::function<double(long, double)> tail_sum_bound;

    // truncation gate: this many consecutive ratios below 1 - 1e-6 must be
    // seen past the mode before the tail certificate is trusted
    int gate_run = 0;

    long cap = 20'000'000;
    std::string name = "series";
};

struct SeriesWindow {
    long support_start = 0;
    long mode_index = 0;
    std::vector<double> weights;  // anchored: weights[mode_index] == 1
    double sum = 0.0;             // compensated sum of weights
    double tail_abs = 0.0;        // certified bound on off-window weight mass
    double ratio_end = std::numeric_limits<double>::quiet_NaN();
    long terms = 0;
};

constexpr double kGateMargin = 1e-6;

// Walk the weights outward from the mode. Terminates when the certified
// remainder drops below tol_stop * sum, at support_end, or with a
// divergence error at the cap. min_end, when non-negative, forces the walk
// to reach that support point before a certified stop is taken (far tails
// flush to zero rather than stopping early).
inline SeriesWindow build_series_window(const SeriesPlan& plan, double tol_stop,
                                        long min_end = -1) {
    SeriesWindow out;
    out.support_start = plan.support_start;

    const long lo = plan.support_start;
    require_arg(plan.mode >= lo, "series mode within support");

    // descending side, full
    std::vector<double> down;
    {
        double t = 1.0;
        for (long x = plan.mode; x > lo; --x) {
            const double r = plan.ratio(x - 1);
            t = (r > 0.0) ? t / r : 0.0;
            if (!std::isfinite(t)) t = 0.0;  // below an effective support hole
            down.push_back(t);
        }
    }

    out.weights.assign(down.rbegin(), down.rend());
    out.weights.push_back(1.0);
    out.mode_index = static_cast<long>(out.weights.size()) - 1;

    KahanSum acc;
    for (double w : out.weights) acc.add(w);

    // ascending side with certified stopping
    double t = 1.0;
    long x = plan.mode;
    int run = 0;
    bool stopped = false;
    while (true) {
        if (plan.support_end >= 0 && x >= plan.support_end) {
            out.tail_abs = 0.0;
            out.ratio_end = 0.0;
            stopped = true;
            break;
        }
        if (static_cast<long>(out.weights.size()) >= plan.cap) break;

        const double r = plan.ratio(x);
        run = (r < 1.0 - kGateMargin) ? run + 1 : 0;

        t *= r;
        ++x;
        out.weights.push_back(t);
        acc.add(t);

        if (x <= plan.mode) continue;
        if (x < min_end) continue;
        if (plan.gate_run > 0 && run < plan.gate_run) continue;

        double bound = std::numeric_limits<double>::infinity();
        double rho = std::numeric_limits<double>::quiet_NaN();
        if (plan.tail_sum_bound) {
            bound = plan.tail_sum_bound(x, t);
        } else if (plan.ratio_sup) {
            rho = plan.ratio_sup(x);
            if (rho < 1.0) bound = t * rho / (1.0 - rho);
        }
        if (bound <= tol_stop * acc.value()) {
            out.tail_abs = bound;
            out.ratio_end = rho;
            stopped = true;
            break;
        }
    }

    if (!stopped)
        throw_numeric(errkind::divergence,
                      plan.name + ": tail could not be certified below tolerance within " +
                          std::to_string(plan.cap) + " terms");

    out.sum = acc.value();
    out.terms = static_cast<long>(out.weights.size());
    return out;
}

struct PmfBuildOptions {
    double tol = 1e-12;   // certified tail target for the emitted window
    long k_max = -1;      // force window end at this support point (-1: cut at tol)
    // certificate to attach: geometric from the plan's ratio_sup, or a
    // power-law mass(x) <= a x^(-s) with this exponent
    bool power_law_tail = false;
    double power_exponent = 0.0;
};

// Normalize a computed window into a TruncatedPmf. The normalizer is the
// full computed sum; the emitted window may be shorter, with the remainder
// folded into tail_bound.
inline TruncatedPmf finish_pmf(const SeriesPlan& plan, const SeriesWindow& win,
                               const PmfBuildOptions& opt, PmfMeta meta) {
    const long n = static_cast<long>(win.weights.size());
    long end_index = n - 1;
    if (opt.k_max >= 0) {
        const long limit = opt.k_max - plan.support_start;
        require_arg(limit >= 0, "k_max within support");
        end_index = std::min(end_index, limit);
    }

    // suffix mass beyond each candidate cut
    std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
    {
        KahanSum tailacc;
        tailacc.add(win.tail_abs);
        suffix[static_cast<std::size_t>(n)] = win.tail_abs;
        for (long i = n - 1; i >= 0; --i) {
            suffix[static_cast<std::size_t>(i)] = tailacc.value();
            tailacc.add(win.weights[static_cast<std::size_t>(i)]);
        }
    }

    if (opt.k_max < 0) {
        long cut = win.mode_index;
        while (cut < n - 1 && suffix[static_cast<std::size_t>(cut)] > opt.tol * win.sum) ++cut;
        end_index = cut;
    }

    TruncatedPmf pmf;
    pmf.support_start = plan.support_start;
    pmf.probs.resize(static_cast<std::size_t>(end_index) + 1);
    for (long i = 0; i <= end_index; ++i)
        pmf.probs[static_cast<std::size_t>(i)] = win.weights[static_cast<std::size_t>(i)] / win.sum;
    pmf.tail_bound = suffix[static_cast<std::size_t>(end_index)] / win.sum;

    if (pmf.tail_bound > 0.0) {
        if (opt.power_law_tail) {
            pmf.tail.kind = TailKind::power_law;
            pmf.tail.s = opt.power_exponent;
            pmf.tail.a = std::pow(static_cast<double>(plan.mode), opt.power_exponent) / win.sum;
        } else {
            double rho = std::numeric_limits<double>::quiet_NaN();
            if (plan.ratio_sup) rho = plan.ratio_sup(plan.support_start + end_index);
            if (std::isfinite(rho) && rho < 1.0) {
                pmf.tail.kind = TailKind::geometric;
                pmf.tail.s = rho;
                const double first_off = (end_index + 1 < n)
                                             ? win.weights[static_cast<std::size_t>(end_index) + 1]
                                             : win.weights[static_cast<std::size_t>(end_index)] * rho;
                pmf.tail.a = first_off / win.sum;
            }
        }
    }

    meta.tol = opt.tol;
    pmf.meta = std::move(meta);
    return pmf;
}

inline TruncatedPmf build_pmf(const SeriesPlan& plan, const PmfBuildOptions& opt, PmfMeta meta,
                              double tol_stop) {
    const SeriesWindow win = build_series_window(plan, tol_stop, opt.k_max);
    return finish_pmf(plan, win, opt, std::move(meta));
}

// Locate the global weight argmax by a cumulative log scan. Used for
// families without a closed-form mode. Sound once the running weight sits
// 900 logs below the best seen and the (unimodal) ratio has fallen under 1.
inline long scan_mode(const SeriesPlan& plan) {
    long best_x = plan.support_start;
    double best = 0.0, cur = 0.0;
    long x = plan.support_start;
    for (long i = 0; i < plan.cap; ++i) {
        if (plan.support_end >= 0 && x >= plan.support_end) return best_x;
        const double r = plan.ratio(x);
        if (r <= 0.0) return best_x;
        cur += std::log(r);
        ++x;
        if (cur > best) {
            best = cur;
            best_x = x;
        }
        if (cur < best - 900.0 && r < 0.999) return best_x;
    }
    throw_numeric(errkind::divergence, plan.name + ": no mode found within term cap");
}

}  // namespace detail
}  // namespace compoisson
