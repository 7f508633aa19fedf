#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <json.hpp>

#include "compoisson/characterizations.hpp"
#include "compoisson/distributions.hpp"
#include "compoisson/dpcp.hpp"
#include "compoisson/entropy_info.hpp"
#include "compoisson/pmf.hpp"
#include "compoisson/queue_sim.hpp"

namespace compoisson {

using json = nlohmann::ordered_json;

inline json to_json(const TruncatedPmf& pmf) {
    json params = json::object();
    for (const auto& [k, v] : pmf.meta.params) params[k] = v;
    json out;
    out["family"] = pmf.meta.family;
    out["params"] = params;
    out["support_start"] = pmf.support_start;
    out["probs"] = pmf.probs;
    out["tail_bound"] = pmf.tail_bound;
    out["tol"] = pmf.meta.tol;
    out["seed"] = pmf.meta.seed ? json(*pmf.meta.seed) : json(nullptr);
    if (!pmf.meta.note.empty()) out["note"] = pmf.meta.note;
    return out;
}

namespace detail {

// The wire schema does not carry tail certificates; recognized families get
// theirs rebuilt from the parameters so power transforms stay certified.
inline void rederive_certificate(TruncatedPmf& pmf) {
    if (pmf.tail_bound <= 0.0 || pmf.probs.empty()) return;
    const std::string& fam = pmf.meta.family;
    const double end = static_cast<double>(pmf.support_end());
    const auto geometric_from_ratio = [&](double rho) {
        if (rho > 0.0 && rho < 1.0) {
            pmf.tail.kind = TailKind::geometric;
            pmf.tail.a = pmf.probs.back() * rho;
            pmf.tail.s = rho;
        }
    };
    if (fam == "cmp" || fam == "com-poisson") {
        geometric_from_ratio(pmf.meta.param("lambda") / std::pow(end + 1.0, pmf.meta.param("nu")));
    } else if (fam == "queue-exact") {
        geometric_from_ratio(pmf.meta.param("arrival") / pmf.meta.param("service", 1.0) /
                             std::pow(end + 1.0, pmf.meta.param("nu")));
    } else if (fam == "poisson") {
        geometric_from_ratio(pmf.meta.param("lambda") / (end + 1.0));
    } else if (fam == "geometric") {
        geometric_from_ratio(1.0 - pmf.meta.param("p"));
    } else if (fam == "negative-binomial" || fam == "cmnb") {
        const double r = pmf.meta.param("r"), nu = pmf.meta.param("nu", 1.0),
                     p = pmf.meta.param("p");
        const double local = std::pow((r + end) / (end + 1.0), nu) * p;
        geometric_from_ratio(r > 1.0 ? local : std::max(local, p));
    } else if (fam == "hyper-poisson") {
        geometric_from_ratio(std::pow(
            pmf.meta.param("lambda") / (pmf.meta.param("a") + end + 1.0), pmf.meta.param("nu")));
    } else if (fam == "lerch") {
        geometric_from_ratio(pmf.meta.param("rho"));
    } else if (fam == "zeta") {
        const double sigma = pmf.meta.param("sigma");
        if (sigma > 1.0) {
            pmf.tail.kind = TailKind::power_law;
            pmf.tail.s = sigma;
            pmf.tail.a = pmf.probs.front() *
                         std::pow(static_cast<double>(pmf.support_start), sigma);
        }
    }
}

}  // namespace detail

inline TruncatedPmf pmf_from_json(const json& j) {
    TruncatedPmf pmf;
    pmf.meta.family = j.value("family", std::string("unknown"));
    if (j.contains("params") && j["params"].is_object())
        for (const auto& [k, v] : j["params"].items())
            pmf.meta.params.emplace_back(k, v.get<double>());
    pmf.support_start = j.value("support_start", 0L);
    pmf.probs = j.at("probs").get<std::vector<double>>();
    pmf.tail_bound = j.value("tail_bound", 0.0);
    pmf.meta.tol = j.value("tol", kDefaultTol);
    if (j.contains("seed") && !j["seed"].is_null())
        pmf.meta.seed = j["seed"].get<std::int64_t>();
    if (j.contains("note")) pmf.meta.note = j["note"].get<std::string>();
    detail::rederive_certificate(pmf);
    validate_pmf(pmf, std::max(pmf.meta.tol, 1e-9));
    return pmf;
}

inline json to_json(const FisherReport& rep) {
    json out;
    out["fisher_info"] = rep.fisher_info;
    out["com_fisher_info"] = rep.com_fisher_info ? json(*rep.com_fisher_info) : json(nullptr);
    out["rsp"] = rep.rsp;
    out["nu"] = rep.nu;
    out["neglected_mass"] = rep.neglected_mass;
    out["score"] = rep.score;
    return out;
}

inline json to_json(const DpcpParams& params) {
    json out;
    out["lambda_tilde"] = params.lambda_tilde;
    out["alphas"] = params.alphas;
    out["alpha_sum"] = params.alpha_sum();
    json sign;
    sign["negative_count"] = params.negative_count();
    const auto idx = params.first_negative_index();
    sign["first_negative_index"] = idx ? json(*idx) : json(nullptr);
    out["sign_summary"] = sign;
    if (!params.source.empty()) out["source"] = params.source;
    return out;
}

inline json to_json(const TvInterval& tv) { return json::array({tv.lower, tv.upper}); }

inline json to_json(const SteadyStateEstimate& est) {
    json out;
    out["occupancy"] = to_json(est.occupancy);
    out["tv_to_cmp"] = to_json(est.tv_to_cmp);
    out["transitions"] = est.transitions;
    out["cap_hits"] = est.cap_hits;
    out["saturated"] = est.saturated;
    out["seed"] = static_cast<std::int64_t>(est.seed);
    out["balance_residual"] = est.balance_residual;
    return out;
}

inline json to_json(const ClosureReport& rep) {
    json out;
    out["nu"] = rep.nu;
    out["lambda_x"] = rep.lambda_x;
    out["lambda_y"] = rep.lambda_y;
    out["lambda_hat"] = rep.lambda_hat;
    out["a_seq"] = rep.a_seq;
    out["first_violation_n"] = rep.first_violation_n ? json(*rep.first_violation_n) : json(nullptr);
    out["max_ratio_deviation"] = rep.max_ratio_deviation;
    out["first_violation_vs_sum"] =
        rep.first_violation_vs_sum ? json(*rep.first_violation_vs_sum) : json(nullptr);
    out["max_ratio_deviation_vs_sum"] = rep.max_ratio_deviation_vs_sum;
    return out;
}

inline json to_json(const LimitCurve& curve) {
    json out;
    out["lambda"] = curve.lambda;
    out["nu"] = curve.nu;
    out["grid"] = curve.grid;
    out["tv"] = curve.tv;
    return out;
}

inline json to_json(const StamResult& res) {
    json out;
    out["gap"] = res.gap;
    out["lhs"] = res.lhs;
    out["rhs"] = res.rhs;
    return out;
}

// pmf as CSV: k,prob rows under a comment header carrying the parameters
inline std::string to_csv(const TruncatedPmf& pmf) {
    std::string head = "# family=" + pmf.meta.family;
    for (const auto& [k, v] : pmf.meta.params) {
        head += " " + k + "=";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        head += buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " tail_bound=%.17g tol=%.17g", pmf.tail_bound, pmf.meta.tol);
    head += buf;
    std::string out = head + "\nk,prob\n";
    for (long i = 0; i < pmf.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g\n", pmf.support_start + i,
                      pmf.probs[static_cast<std::size_t>(i)]);
        out += buf;
    }
    return out;
}

}  // namespace compoisson
