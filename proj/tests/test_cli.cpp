// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: exit codes, JSON shape, and
// agreement with in-process estimates.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sepcoef/sepcoef.hpp"

using json = nlohmann::json;
using namespace sepcoef;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    namespace fs = std::filesystem;
    static int counter = 0;
    const auto dir = fs::temp_directory_path();
    const auto out_path = dir / ("sepcoef_out_" + std::to_string(counter) + ".txt");
    const auto err_path = dir / ("sepcoef_err_" + std::to_string(counter) + ".txt");
    ++counter;

    const std::string cmd = std::string(SEPCOEF_CLI_BIN) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());

    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

std::string write_temp_csv(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << content;
    return path.string();
}

} // namespace

TEST_CASE("csv reader accepts scientific notation and reports bad shapes", "[cli][csv]") {
    std::istringstream in("a,b\n1e-3,2.5E+2\n-4.25e1,.5\n");
    const auto table = read_csv(in);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][0] == 1e-3);
    CHECK(table.rows[0][1] == 250.0);
    CHECK(table.rows[1][0] == -42.5);
    CHECK(table.rows[1][1] == 0.5);

    std::istringstream short_row("a,b\n1\n");
    CHECK_THROWS_AS(read_csv(short_row), CsvError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), CsvError);
}

TEST_CASE("estimate matches the library call exactly", "[cli]") {
    const auto csv = write_temp_csv("cli_basic.csv", "x,y\n1,1\n2,2\n3,3\n4,4\n");
    const auto r = run_cli("--seed 9 estimate --input " + csv);
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);

    Matrix x(4, 1, {1, 2, 3, 4});
    const ObservationSet obs(std::move(x), {1, 2, 3, 4});
    const auto expect = lambda_nn(obs, 9);
    CHECK(doc["lambda"].get<double>() == expect.value);
    CHECK(doc["numerator"].get<double>() == expect.numerator);
    CHECK(doc["denominator"].get<double>() == expect.denominator);
    CHECK(doc["n"] == 4);
    CHECK(doc["p"] == 1);
    CHECK(doc["seed"] == 9);
    CHECK(doc["config"]["input"].get<std::string>() == csv);
}

TEST_CASE("non-numeric cell exits 2 and names the location", "[cli]") {
    const auto csv = write_temp_csv("cli_bad.csv", "x,y\n1,1\n2,oops\n3,3\n");
    const auto r = run_cli("estimate --input " + csv);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("row 3") != std::string::npos);
    CHECK(r.err.find("'y'") != std::string::npos);
}

TEST_CASE("missing file exits 2; degenerate data exits 3", "[cli]") {
    CHECK(run_cli("estimate --input /nonexistent/nope.csv").exit_code == 2);

    const auto csv = write_temp_csv("cli_degen.csv", "x,y\n5,1\n5,2\n5,3\n");
    const auto r = run_cli("estimate --input " + csv);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("identical") != std::string::npos);
}

TEST_CASE("rank preprocessing equals estimating a pre-ranked file", "[cli]") {
    const auto raw = write_temp_csv("cli_rank_raw.csv",
                                    "x,y\n10,5\n40,1\n40,2\n70,4\n90,3\n");
    const auto pre = write_temp_csv("cli_rank_pre.csv",
                                    "x,y\n1,5\n2.5,1\n2.5,2\n4,4\n5,3\n");
    const auto a = run_cli("--seed 5 estimate --preprocess rank --input " + raw);
    const auto b = run_cli("--seed 5 estimate --input " + pre);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(json::parse(a.out)["lambda"].get<double>() ==
          json::parse(b.out)["lambda"].get<double>());
}

TEST_CASE("simulate round-trip: estimate on the written dataset matches", "[cli]") {
    namespace fs = std::filesystem;
    const auto data = (fs::temp_directory_path() / "cli_roundtrip.csv").string();
    const auto r = run_cli("--seed 31 simulate --scenario s1 --rho 0.6 --n 400 --reps 1 "
                           "--data-out " + data + " --data-rep 0");
    REQUIRE(r.exit_code == 0);

    // in-process: same derived rep seed and estimator seed as the runner
    ScenarioSpec spec;
    spec.id = ScenarioId::s1_bvn;
    spec.n = 400;
    spec.rho = 0.6;
    spec.seed = rng::derive_key(31, rng::kScenarioRep, 0);
    const auto obs = generate(spec);
    const auto expected = lambda_nn(obs, rng::derive_key(spec.seed, rng::kEstimator)).value;

    const auto doc = json::parse(r.out);
    CHECK(doc["series"][0]["name"] == "lambda_nn");
    CHECK(doc["series"][0]["median"].get<double>() == expected); // reps = 1

    // the CSV written by simulate reproduces the same estimate when re-read
    const auto est = run_cli("--seed 77 estimate --input " + data);
    REQUIRE(est.exit_code == 0);
    const auto table = read_csv_file(data);
    const auto reread = table_to_observations(table, "y");
    CHECK(json::parse(est.out)["lambda"].get<double>() == lambda_nn(reread, 77).value);
    fs::remove(data);
}

TEST_CASE("simulate s3 at k = n: every rank-based estimate is exactly 1", "[cli]") {
    namespace fs = std::filesystem;
    const auto csv = (fs::temp_directory_path() / "cli_s3.csv").string();
    const auto r = run_cli("--seed 2 simulate --scenario s3 --k 256 --n 256 --reps 50 --csv " +
                           csv);
    REQUIRE(r.exit_code == 0);
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    const auto cols = detail_csv::split_line(header);
    std::size_t rank_col = 0;
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (cols[j] == "lambda_rank") rank_col = j;
    REQUIRE(rank_col > 0);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = detail_csv::split_line(line);
        CHECK(fields[rank_col] == "1");
        ++rows;
    }
    CHECK(rows == 50);
    fs::remove(csv);
}

TEST_CASE("oracle command prints closed forms", "[cli]") {
    const auto bf = run_cli("oracle --family bf-normal --mu1 0 --mu2 0 --s1 1 --s2 4");
    REQUIRE(bf.exit_code == 0);
    CHECK(json::parse(bf.out)["lambda"].get<double>() == 0.0);

    const auto mvn = run_cli("oracle --family mvn --rho 0.7");
    REQUIRE(mvn.exit_code == 0);
    const double expect = 2.0 / 3.14159265358979323846 * std::asin(0.49);
    CHECK(std::abs(json::parse(mvn.out)["lambda"].get<double>() - expect) < 1e-12);

    const auto tg = run_cli("oracle --family three-group --q-num 1 --q-den 4");
    REQUIRE(tg.exit_code == 0);
    CHECK(std::abs(json::parse(tg.out)["lambda"].get<double>() - 0.2) < 1e-12);

    CHECK(run_cli("oracle --family bf-normal --s1 -1").exit_code == 3);
    CHECK(run_cli("oracle --family nope").exit_code == 2);
}

TEST_CASE("permtest reports a valid p-value and replays by seed", "[cli]") {
    const auto csv = write_temp_csv("cli_perm.csv", [] {
        std::ostringstream ss;
        ss << "x,y\n";
        CounterRng rng(404);
        for (int i = 0; i < 60; ++i) ss << rng.uniform01() << "," << rng.uniform01() << "\n";
        return ss.str();
    }());
    const auto a = run_cli("--seed 6 permtest --n-perms 99 --input " + csv);
    const auto b = run_cli("--seed 6 permtest --n-perms 99 --input " + csv);
    REQUIRE(a.exit_code == 0);
    const auto doc = json::parse(a.out);
    const double p = doc["p_value"].get<double>();
    CHECK((p >= 0.0 && p <= 1.0));
    CHECK(doc["n_perms"] == 99);
    CHECK(json::parse(b.out)["p_value"].get<double>() == p);
}

TEST_CASE("select command emits a trace", "[cli]") {
    const auto csv = write_temp_csv("cli_select.csv", [] {
        std::ostringstream ss;
        ss << "a,b,y\n";
        CounterRng rng(505);
        for (int i = 0; i < 400; ++i) {
            const double a = rng.uniform01(), b = rng.uniform01();
            ss << a << "," << b << "," << a + 0.02 * rng.uniform01() << "\n";
        }
        return ss.str();
    }());
    const auto r = run_cli("--seed 8 select --method forward --response y --input " + csv);
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    REQUIRE(doc["steps"].size() >= 1);
    CHECK(doc["steps"][0]["name"] == "a");
    CHECK(doc["selected"][0] == "a");

    const auto rb = run_cli("--seed 8 select --method best-subset --response y --input " + csv);
    REQUIRE(rb.exit_code == 0);
    CHECK(json::parse(rb.out)["top_subsets"].size() == 3);
}

TEST_CASE("SEPCOEF_SEED env var sets the default seed", "[cli]") {
    const auto csv = write_temp_csv("cli_env.csv", "x,y\n1,4\n2,3\n3,2\n4,1\n5,2\n");
    const std::string cmd = "SEPCOEF_SEED=123 " + std::string(SEPCOEF_CLI_BIN) +
                            " estimate --input " + csv + " > /tmp/sepcoef_env.json 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream f("/tmp/sepcoef_env.json");
    const auto doc = json::parse(f);
    CHECK(doc["seed"] == 123);

    const auto overridden = run_cli("--seed 7 estimate --input " + csv);
    CHECK(json::parse(overridden.out)["seed"] == 7);
}
