#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "compoisson/cli.hpp"

using namespace compoisson;

namespace {

struct CliResult {
    int code;
    std::string text;
    json parsed;  // null unless valid json
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out;
    const int code = cli::run_command(std::move(args), out);
    CliResult res{code, out.str(), json()};
    try {
        res.parsed = json::parse(res.text);
    } catch (...) {
        res.parsed = nullptr;
    }
    return res;
}

std::string write_pmf_file(const std::string& name, const TruncatedPmf& pmf) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << to_json(pmf).dump();
    return path.string();
}

}  // namespace

TEST_CASE("cli: pmf evaluation") {
    const auto res = run({"pmf", "cmp", "--lambda", "1", "--nu", "2", "--kmax", "5"});
    REQUIRE(res.code == 0);
    REQUIRE(res.parsed["family"] == "cmp");
    REQUIRE(res.parsed["probs"][0].get<double>() == Approx(0.438675).margin(1e-6));
    REQUIRE(res.parsed["probs"].size() == 6);
}

TEST_CASE("cli: parameter violations exit 2 and name the invariant") {
    const auto res = run({"pmf", "cmp", "--lambda", "-1", "--nu", "2"});
    REQUIRE(res.code == 2);
    REQUIRE(res.parsed["error"] == "invalid-argument");
    REQUIRE(res.parsed["message"].get<std::string>().find("lambda > 0") != std::string::npos);
}

TEST_CASE("cli: unknown flags exit 2") {
    const auto res = run({"pmf", "cmp", "--lambda", "1", "--nu", "2", "--bogus", "3"});
    REQUIRE(res.code == 2);
    REQUIRE(res.parsed["error"] == "usage");
}

TEST_CASE("cli: numeric errors exit 3 with the error kind") {
    auto shallow = cmp_pmf(CmpParams(1.0, 2.0));
    shallow.tail.kind = TailKind::none;
    const auto path = write_pmf_file("shallow.json", shallow);
    // re-derivation is keyed by family; hide it so the tail is uncertified
    {
        std::ifstream in(path);
        json j;
        in >> j;
        j["family"] = "mystery";
        std::ofstream out(path);
        out << j.dump();
    }
    const auto res = run({"transform", "com-type", "--pmf-file", path, "--nu", "0.5"});
    REQUIRE(res.code == 3);
    REQUIRE(res.parsed["error"] == "existence");
}

TEST_CASE("cli: pmf files feed the pair operations") {
    const auto pa = write_pmf_file("pois1.json", poisson_pmf(1.0, kDefaultTol, 40));
    const auto pb = write_pmf_file("pois2.json", poisson_pmf(2.0, kDefaultTol, 40));

    SECTION("convolve") {
        const auto res = run({"convolve", "--pmf-file", pa, "--pmf-file", pb});
        REQUIRE(res.code == 0);
        const auto pmf = pmf_from_json(res.parsed);
        const auto ref = poisson_pmf(3.0);
        for (long k = 0; k <= 20; ++k) REQUIRE(pmf.at(k) == Approx(ref.at(k)).margin(1e-12));
    }
    SECTION("conditional") {
        const auto res = run({"conditional", "--pmf-file", pa, "--pmf-file", pb, "--s", "6"});
        REQUIRE(res.code == 0);
        REQUIRE(res.parsed["conditional"].size() == 7);
    }
    SECTION("stam") {
        const auto res = run({"stam", "--pmf-file", pa, "--pmf-file", pb, "--nu", "1"});
        REQUIRE(res.code == 0);
        REQUIRE(std::abs(res.parsed["gap"].get<double>()) < 1e-8);
    }
    SECTION("fisher with and without nu") {
        const auto plain = run({"fisher", "--pmf-file", pb});
        REQUIRE(plain.code == 0);
        REQUIRE(plain.parsed["fisher_info"].get<double>() == Approx(0.5).margin(1e-9));
        REQUIRE(plain.parsed["com_fisher_info"].is_null());
        const auto com = run({"fisher", "--pmf-file", pb, "--nu", "2"});
        REQUIRE(com.code == 0);
        REQUIRE_FALSE(com.parsed["com_fisher_info"].is_null());
    }
}

TEST_CASE("cli: csv output for pmfs only") {
    const auto csv = run({"pmf", "cmb", "--m", "2", "--p", "0.5", "--nu", "2", "--format", "csv"});
    REQUIRE(csv.code == 0);
    REQUIRE(csv.text.rfind("# family=cmb", 0) == 0);
    REQUIRE(csv.text.find("k,prob") != std::string::npos);
    const auto bad = run({"moments", "--lambda", "2", "--nu", "1", "--format", "csv"});
    REQUIRE(bad.code == 2);
}

TEST_CASE("cli: verify is deterministic and green") {
    const auto a = run({"verify", "all", "--seed", "7"});
    REQUIRE(a.code == 0);
    REQUIRE(a.parsed["overall"] == true);
    REQUIRE(a.parsed["seed"] == 7);
    const auto b = run({"verify", "all", "--seed", "7"});
    REQUIRE(a.text == b.text);

    const auto one = run({"verify", "stam", "--seed", "7"});
    REQUIRE(one.code == 0);
    for (const auto& chk : one.parsed["checks"])
        REQUIRE(chk["check"].get<std::string>().rfind("stam", 0) == 0);

    const auto unknown = run({"verify", "nonsense"});
    REQUIRE(unknown.code == 2);
}

TEST_CASE("cli: dpcp and queue surfaces") {
    SECTION("recover emits the sign summary") {
        const auto path = write_pmf_file("cmp08.json", cmp_pmf(CmpParams(0.8, 2.0), 40));
        const auto res = run({"dpcp", "recover", "--pmf-file", path, "--terms", "30"});
        REQUIRE(res.code == 0);
        REQUIRE(res.parsed["lambda_tilde"].get<double>() > 0.0);
        REQUIRE(res.parsed["sign_summary"]["negative_count"].get<long>() > 0);
        REQUIRE(res.parsed["sign_summary"]["first_negative_index"] == 2);
    }
    SECTION("reconstruct round-trips through the command surface") {
        const auto res = run({"dpcp", "reconstruct", "--lambda-tilde", "2", "--alphas", "1",
                              "--nmax", "25"});
        REQUIRE(res.code == 0);
        const auto pmf = pmf_from_json(res.parsed);
        REQUIRE(pmf.at(1) == Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
    }
    SECTION("pseudo parameters refuse to sample") {
        const auto res = run({"dpcp", "sample", "--lambda-tilde", "1", "--alphas", "1.5,-0.5",
                              "--n", "10", "--seed", "1"});
        REQUIRE(res.code == 3);
        REQUIRE(res.parsed["error"] == "pseudo-parameters");
    }
    SECTION("queue simulate reports the tv interval") {
        const auto res = run({"queue", "simulate", "--arrival", "2", "--service", "1", "--nu",
                              "2", "--horizon", "5000", "--seed", "5"});
        REQUIRE(res.code == 0);
        REQUIRE(res.parsed["tv_to_cmp"].size() == 2);
        REQUIRE(res.parsed["tv_to_cmp"][1].get<double>() < 0.1);
        REQUIRE(res.parsed["occupancy"]["seed"] == 5);
    }
}

TEST_CASE("json round trip preserves the pmf and its certificate use") {
    const auto pmf = cmp_pmf(CmpParams(1.3, 0.7), 60);
    const auto back = pmf_from_json(to_json(pmf));
    REQUIRE(back.support_start == pmf.support_start);
    REQUIRE(back.probs == pmf.probs);
    REQUIRE(back.tail_bound == pmf.tail_bound);
    REQUIRE(back.meta.family == "cmp");
    // certificate re-derived from family parameters: sub-1 powers stay legal
    REQUIRE_NOTHROW(com_type(back, 0.5, 1e-6));
}
