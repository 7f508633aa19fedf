#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compoisson/compoisson.hpp"

namespace compoisson {
namespace cli {

inline TruncatedPmf load_pmf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open pmf file: " + path);
    json j;
    in >> j;
    return pmf_from_json(j);
}

inline std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

inline std::vector<long> parse_longs(const std::string& csv) {
    std::vector<long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

// Dispatch a full command line (without the program name). Writes the JSON
// (or CSV) result to `out`. Exit codes: 0 ok, 1 failed verify check,
// 2 usage/parameter error, 3 numeric error.
inline int run_command(std::vector<std::string> args, std::ostream& out) {
    CLI::App app{"Conway-Maxwell-Poisson distribution toolkit"};
    app.require_subcommand(1);

    std::string format = "json";
    double tol = kDefaultTol;
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--tol", tol, "series truncation tolerance");

    json result;
    std::optional<TruncatedPmf> pmf_result;  // set when the output is a pmf
    int exit_code = 0;

    // ---- pmf ----
    auto* pmf_cmd = app.add_subcommand("pmf", "evaluate a family pmf");
    pmf_cmd->require_subcommand(1);
    double lambda = 1.0, nu = 1.0, p = 0.5, r = 1.0, theta = 0.5, alpha = 1.0, beta = 1.0;
    double sigma = 2.0, rho = 0.5, c = 1.0, spow = 1.0, a_shift = 0.0;
    long m = 1, kmax = -1;
    std::string series_kind = "zeta";

    auto* pmf_cmp = pmf_cmd->add_subcommand("cmp", "com-poisson");
    pmf_cmp->add_option("--lambda", lambda)->required();
    pmf_cmp->add_option("--nu", nu)->required();
    pmf_cmp->add_option("--kmax", kmax);
    pmf_cmp->callback([&] { pmf_result = cmp_pmf(CmpParams(lambda, nu), kmax, tol); });

    auto* pmf_cmb = pmf_cmd->add_subcommand("cmb", "com-binomial");
    pmf_cmb->add_option("--m", m)->required();
    pmf_cmb->add_option("--p", p)->required();
    pmf_cmb->add_option("--nu", nu)->required();
    pmf_cmb->callback([&] { pmf_result = cmb_pmf(CmbParams(m, p, nu), tol); });

    auto* pmf_cmnb = pmf_cmd->add_subcommand("cmnb", "com-negative-binomial");
    pmf_cmnb->add_option("--r", r)->required();
    pmf_cmnb->add_option("--nu", nu)->required();
    pmf_cmnb->add_option("--p", p)->required();
    pmf_cmnb->callback([&] { pmf_result = cmnb_pmf(CmnbParams(r, nu, p), tol); });

    auto* pmf_ecomp = pmf_cmd->add_subcommand("ecomp", "extended com-poisson");
    pmf_ecomp->add_option("--r", r)->required();
    pmf_ecomp->add_option("--theta", theta)->required();
    pmf_ecomp->add_option("--alpha", alpha)->required();
    pmf_ecomp->add_option("--beta", beta)->required();
    pmf_ecomp->callback([&] { pmf_result = ecomp_pmf(EcompParams(r, theta, alpha, beta), tol); });

    auto* pmf_series = pmf_cmd->add_subcommand("series", "power-series family");
    pmf_series->add_option("--kind", series_kind)
        ->check(CLI::IsMember({"zeta", "lerch", "hyper-poisson"}))
        ->required();
    pmf_series->add_option("--sigma", sigma);
    pmf_series->add_option("--rho", rho);
    pmf_series->add_option("--c", c);
    pmf_series->add_option("--s", spow);
    pmf_series->add_option("--a", a_shift);
    pmf_series->add_option("--lambda", lambda);
    pmf_series->add_option("--nu", nu);
    pmf_series->callback([&] {
        if (series_kind == "zeta")
            pmf_result = power_series_pmf(zeta_series(sigma), tol);
        else if (series_kind == "lerch")
            pmf_result = power_series_pmf(lerch_series(rho, c, spow), tol);
        else
            pmf_result = power_series_pmf(hyper_poisson_series(a_shift, lambda, nu), tol);
    });

    // ---- normalizer ----
    auto* norm_cmd = app.add_subcommand("normalizer", "normalizing constant Z(lambda, nu)");
    norm_cmd->require_subcommand(1);
    auto* norm_series = norm_cmd->add_subcommand("series", "truncated series with certified tail");
    norm_series->add_option("--lambda", lambda)->required();
    norm_series->add_option("--nu", nu)->required();
    norm_series->callback([&] {
        const auto z = log_normalizer_series(CmpParams(lambda, nu), tol);
        result = {{"log_value", z.log_value},
                  {"value", std::isfinite(z.value) ? json(z.value) : json(nullptr)},
                  {"tail_bound_rel", z.tail_bound},
                  {"terms", z.terms}};
    });
    auto* norm_asym = norm_cmd->add_subcommand("asymptotic", "closed-form large-lambda leading term");
    norm_asym->add_option("--lambda", lambda)->required();
    norm_asym->add_option("--nu", nu)->required();
    norm_asym->callback([&] {
        const double lv = log_normalizer_asymptotic(CmpParams(lambda, nu));
        const double v = std::exp(lv);
        result = {{"log_value", lv}, {"value", std::isfinite(v) ? json(v) : json(nullptr)}};
    });

    // ---- moments ----
    auto* moments_cmd = app.add_subcommand("moments", "mean, variance, closed-form approximation");
    moments_cmd->add_option("--lambda", lambda)->required();
    moments_cmd->add_option("--nu", nu)->required();
    moments_cmd->callback([&] {
        const auto mo = cmp_moments(CmpParams(lambda, nu), tol);
        result = {{"mean", mo.mean}, {"variance", mo.variance}, {"mean_approx", mo.mean_approx}};
    });

    // ---- sample ----
    std::string pmf_path;
    long n_draws = 1000;
    std::uint64_t seed = 0;
    auto* sample_cmd = app.add_subcommand("sample", "inversion sampling from a pmf file");
    sample_cmd->add_option("--pmf-file", pmf_path)->required();
    sample_cmd->add_option("--n", n_draws)->required();
    sample_cmd->add_option("--seed", seed)->required();
    sample_cmd->callback([&] {
        const auto draws = sample(load_pmf(pmf_path), static_cast<std::size_t>(n_draws), seed);
        result = {{"draws", draws}, {"seed", seed}};
    });

    // ---- transform ----
    auto* transform_cmd = app.add_subcommand("transform", "com-type power transform");
    transform_cmd->require_subcommand(1);
    auto* com_cmd = transform_cmd->add_subcommand("com-type", "P^nu renormalized");
    com_cmd->add_option("--pmf-file", pmf_path)->required();
    com_cmd->add_option("--nu", nu)->required();
    com_cmd->callback([&] { pmf_result = com_type(load_pmf(pmf_path), nu, tol).pmf; });

    // ---- entropy ----
    auto* entropy_cmd = app.add_subcommand("entropy", "Renyi / Tsallis entropy");
    entropy_cmd->require_subcommand(1);
    for (const char* kind : {"renyi", "tsallis"}) {
        auto* e = entropy_cmd->add_subcommand(kind, "");
        e->add_option("--pmf-file", pmf_path)->required();
        e->add_option("--alpha", alpha)->required();
        e->callback([&, kind = std::string(kind)] {
            const auto pmf = load_pmf(pmf_path);
            const double h =
                kind == "renyi" ? renyi_entropy(pmf, alpha) : tsallis_entropy(pmf, alpha);
            result = {{"kind", kind}, {"alpha", alpha}, {"entropy", h}};
        });
    }

    // ---- fisher ----
    std::optional<double> fisher_nu;
    auto* fisher_cmd = app.add_subcommand("fisher", "Kagan score and discrete Fisher information");
    fisher_cmd->add_option("--pmf-file", pmf_path)->required();
    fisher_cmd->add_option("--nu", [&fisher_nu](const std::vector<std::string>& v) {
        fisher_nu = std::stod(v[0]);
        return true;
    }, "compute the com-type information at this order too");
    fisher_cmd->callback([&] {
        const auto pmf = load_pmf(pmf_path);
        result = to_json(fisher_nu ? com_fisher_info(pmf, *fisher_nu, tol) : score_and_fisher(pmf));
    });

    // ---- stam ----
    std::vector<std::string> pmf_paths;
    auto* stam_cmd = app.add_subcommand("stam", "com-type Stam gap for a pair");
    stam_cmd->add_option("--pmf-file", pmf_paths)->expected(2);
    stam_cmd->add_option("--nu", nu)->required();
    stam_cmd->callback([&] {
        result = to_json(stam_gap(load_pmf(pmf_paths.at(0)), load_pmf(pmf_paths.at(1)), nu, tol));
    });

    // ---- convolve ----
    auto* conv_cmd = app.add_subcommand("convolve", "sum of two independent pmfs");
    conv_cmd->add_option("--pmf-file", pmf_paths)->expected(2);
    conv_cmd->callback([&] {
        pmf_result = convolve(load_pmf(pmf_paths.at(0)), load_pmf(pmf_paths.at(1)));
    });

    // ---- conditional ----
    long s_value = 0;
    auto* cond_cmd = app.add_subcommand("conditional", "P(X = k | X + Y = s)");
    cond_cmd->add_option("--pmf-file", pmf_paths)->expected(2);
    cond_cmd->add_option("--s", s_value)->required();
    cond_cmd->callback([&] {
        result = {{"s", s_value},
                  {"conditional", conditional_given_sum(load_pmf(pmf_paths.at(0)),
                                                        load_pmf(pmf_paths.at(1)), s_value)}};
    });

    // ---- closure ----
    double lambda2 = 1.0, closure_tol = 1e-6;
    long n_max = 20;
    auto* closure_cmd = app.add_subcommand("closure", "non-closure of addition test");
    closure_cmd->add_option("--lambda1", lambda)->required();
    closure_cmd->add_option("--lambda2", lambda2)->required();
    closure_cmd->add_option("--nu", nu)->required();
    closure_cmd->add_option("--nmax", n_max);
    closure_cmd->add_option("--ctol", closure_tol, "ratio deviation threshold");
    closure_cmd->callback(
        [&] { result = to_json(closure_test(lambda, lambda2, nu, n_max, closure_tol)); });

    // ---- stein ----
    auto* stein_cmd = app.add_subcommand("stein", "Stein identity residual");
    stein_cmd->add_option("--pmf-file", pmf_path)->required();
    stein_cmd->add_option("--lambda", lambda)->required();
    stein_cmd->add_option("--nu", nu)->required();
    stein_cmd->callback([&] {
        const auto res = stein_residual(load_pmf(pmf_path), lambda, nu);
        result = {{"max_residual", res.max_residual}, {"argmax_j", res.argmax_j}};
    });

    // ---- rao-rubin ----
    auto* rr_cmd = app.add_subcommand("rao-rubin", "damage model marginal/conditional gap");
    rr_cmd->add_option("--pmf-file", pmf_path)->required();
    rr_cmd->add_option("--p", p)->required();
    rr_cmd->add_option("--nu", nu)->required();
    rr_cmd->callback([&] {
        result = {{"max_gap", rao_rubin_gap(load_pmf(pmf_path), p, nu)}, {"p", p}, {"nu", nu}};
    });

    // ---- limit ----
    std::string grid_csv;
    auto* limit_cmd = app.add_subcommand("limit", "limit-theorem tv curves");
    limit_cmd->require_subcommand(1);
    auto* limit_cmb = limit_cmd->add_subcommand("cmb", "cmb(m, lambda/m^nu, nu) -> cmp");
    limit_cmb->add_option("--lambda", lambda)->required();
    limit_cmb->add_option("--nu", nu)->required();
    limit_cmb->add_option("--grid", grid_csv)->required();
    limit_cmb->callback(
        [&] { result = to_json(limit_cmb_to_cmp(lambda, nu, parse_longs(grid_csv))); });
    auto* limit_cmnb = limit_cmd->add_subcommand("cmnb", "cmnb(r, nu, p_r) -> cmp");
    limit_cmnb->add_option("--lambda", lambda)->required();
    limit_cmnb->add_option("--nu", nu)->required();
    limit_cmnb->add_option("--grid", grid_csv)->required();
    limit_cmnb->callback(
        [&] { result = to_json(limit_cmnb_to_cmp(lambda, nu, parse_doubles(grid_csv))); });

    // ---- dpcp ----
    double lambda_tilde = 1.0;
    std::string alphas_csv;
    long terms = 30;
    int radial = 256, angular = 256;
    auto* dpcp_cmd = app.add_subcommand("dpcp", "discrete (pseudo) compound Poisson");
    dpcp_cmd->require_subcommand(1);
    auto* dpcp_recover_cmd = dpcp_cmd->add_subcommand("recover", "Panjer recursion parameters");
    dpcp_recover_cmd->add_option("--pmf-file", pmf_path)->required();
    dpcp_recover_cmd->add_option("--terms", terms);
    dpcp_recover_cmd->callback([&] { result = to_json(dpcp_recover(load_pmf(pmf_path), terms)); });
    auto* dpcp_recon_cmd = dpcp_cmd->add_subcommand("reconstruct", "forward Panjer recursion");
    dpcp_recon_cmd->add_option("--lambda-tilde", lambda_tilde)->required();
    dpcp_recon_cmd->add_option("--alphas", alphas_csv)->required();
    dpcp_recon_cmd->add_option("--nmax", n_max);
    dpcp_recon_cmd->callback([&] {
        pmf_result = dpcp_reconstruct(DpcpParams{lambda_tilde, parse_doubles(alphas_csv), "cli"}, n_max);
    });
    auto* dpcp_sample_cmd = dpcp_cmd->add_subcommand("sample", "simulate a genuine dcp law");
    dpcp_sample_cmd->add_option("--lambda-tilde", lambda_tilde)->required();
    dpcp_sample_cmd->add_option("--alphas", alphas_csv)->required();
    dpcp_sample_cmd->add_option("--n", n_draws)->required();
    dpcp_sample_cmd->add_option("--seed", seed)->required();
    dpcp_sample_cmd->callback([&] {
        const auto draws = dcp_sample(DpcpParams{lambda_tilde, parse_doubles(alphas_csv), "cli"},
                                      static_cast<std::size_t>(n_draws), seed);
        result = {{"draws", draws}, {"seed", seed}};
    });
    auto* dpcp_zeros_cmd = dpcp_cmd->add_subcommand("zeros", "pgf minimum-modulus screening");
    dpcp_zeros_cmd->add_option("--pmf-file", pmf_path)->required();
    dpcp_zeros_cmd->add_option("--radial", radial);
    dpcp_zeros_cmd->add_option("--angular", angular);
    dpcp_zeros_cmd->callback([&] {
        const auto res = pgf_min_modulus(load_pmf(pmf_path), radial, angular);
        result = {{"min_mod", res.min_mod},
                  {"argmin", {res.argmin.real(), res.argmin.imag()}},
                  {"radial_steps", radial},
                  {"angular_steps", angular}};
    });

    // ---- queue ----
    double arrival = 1.0, service = 1.0, horizon = 1e5;
    std::optional<double> burn_in;
    std::optional<long> cap;
    auto* queue_cmd = app.add_subcommand("queue", "birth-death queue with service rate mu n^nu");
    queue_cmd->require_subcommand(1);
    auto* queue_exact_cmd = queue_cmd->add_subcommand("exact", "balance-equation steady state");
    queue_exact_cmd->add_option("--arrival", arrival)->required();
    queue_exact_cmd->add_option("--service", service)->required();
    queue_exact_cmd->add_option("--nu", nu)->required();
    queue_exact_cmd->callback(
        [&] { pmf_result = queue_exact_steady_state(arrival, service, nu, tol); });
    auto* queue_sim_cmd = queue_cmd->add_subcommand("simulate", "event-driven simulation");
    queue_sim_cmd->add_option("--arrival", arrival)->required();
    queue_sim_cmd->add_option("--service", service)->required();
    queue_sim_cmd->add_option("--nu", nu)->required();
    queue_sim_cmd->add_option("--horizon", horizon);
    queue_sim_cmd->add_option("--burn-in", [&burn_in](const std::vector<std::string>& v) {
        burn_in = std::stod(v[0]);
        return true;
    }, "");
    queue_sim_cmd->add_option("--seed", seed);
    queue_sim_cmd->add_option("--cap", [&cap](const std::vector<std::string>& v) {
        cap = std::stol(v[0]);
        return true;
    }, "");
    queue_sim_cmd->callback([&] {
        QueueConfig cfg = QueueConfig::make(arrival, service, nu, horizon, seed);
        if (burn_in) cfg.burn_in = *burn_in;
        if (cap) cfg.state_cap = *cap;
        result = to_json(queue_simulate(cfg));
    });

    // ---- verify ----
    std::string target = "all";
    auto* verify_cmd = app.add_subcommand("verify", "run the characterization checks");
    verify_cmd->add_option("target", target, "all, or a check-name prefix");
    verify_cmd->add_option("--seed", seed);
    verify_cmd->callback([&] {
        const auto rep = run_verify(target, seed);
        result = to_json(rep);
        if (!rep.overall) exit_code = 1;
    });

    // global options remain reachable after subcommand tokens
    const std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* node) {
        for (auto* sub : node->get_subcommands({})) {
            sub->fallthrough(true);
            enable_fallthrough(sub);
        }
    };
    enable_fallthrough(&app);

    // parse and run
    std::vector<const char*> argv;
    argv.push_back("compois");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        json err = {{"error", "usage"}, {"message", e.what()}};
        out << err.dump(2) << "\n";
        return 2;
    } catch (const numeric_error& e) {
        json err = {{"error", e.kind()}, {"message", e.what()}};
        out << err.dump(2) << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        json err = {{"error", "invalid-argument"}, {"message", e.what()}};
        out << err.dump(2) << "\n";
        return 2;
    }

    if (pmf_result) {
        if (format == "csv")
            out << to_csv(*pmf_result);
        else
            out << to_json(*pmf_result).dump(2) << "\n";
        return 0;
    }
    if (format == "csv") {
        json err = {{"error", "usage"}, {"message", "csv output is only available for pmf results"}};
        out << err.dump(2) << "\n";
        return 2;
    }
    out << result.dump(2) << "\n";
    return exit_code;
}

}  // namespace cli
}  // namespace compoisson
