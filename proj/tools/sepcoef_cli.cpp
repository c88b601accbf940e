// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface: CSV in, JSON out. Every report embeds the resolved
// configuration (seed included) so any run can be replayed exactly.
// Exit codes: 0 success, 2 I/O or parse error, 3 degenerate-data or
// invalid-parameter estimation error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepcoef/sepcoef.hpp"

using json = nlohmann::ordered_json;
using namespace sepcoef;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitEstimationError = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SEPCOEF_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CsvError("SEPCOEF_SEED is not an unsigned integer");
        }
    }
    return 0;
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

LambdaVariant parse_variant(const std::string& v) {
    if (v == "standard") return LambdaVariant::nn_standard;
    if (v == "between-group") return LambdaVariant::nn_between_group;
    if (v == "rank") return LambdaVariant::rank_based;
    throw CsvError("unknown variant '" + v + "'");
}

PreprocessSpec::Mode parse_preprocess(const std::string& v) {
    if (v == "none") return PreprocessSpec::Mode::none;
    if (v == "rank") return PreprocessSpec::Mode::rank;
    if (v == "standardize") return PreprocessSpec::Mode::standardize;
    throw CsvError("unknown preprocess mode '" + v + "'");
}

struct DataOptions {
    std::string input;
    std::string response = "y";
    std::string predictors; // comma-separated, empty = all others
    std::string preprocess = "none";
    bool rank_y = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "CSV file with a header row")->required();
        cmd->add_option("--response", response, "response column name (default: y)");
        cmd->add_option("--predictors", predictors,
                        "comma-separated predictor columns (default: all others)");
        cmd->add_option("--preprocess", preprocess, "none|rank|standardize");
        cmd->add_flag("--rank-y", rank_y, "midrank the response as well");
    }

    ObservationSet load() const {
        const auto table = read_csv_file(input);
        auto obs = table_to_observations(table, response, split_names(predictors));
        const PreprocessSpec spec{parse_preprocess(preprocess), rank_y};
        if (spec.mode == PreprocessSpec::Mode::none && !spec.rank_y) return obs;
        return sepcoef::preprocess(obs, spec).data;
    }

    json config() const {
        return {{"input", input},
                {"response", response},
                {"predictors", predictors.empty() ? json("<all>") : json(predictors)},
                {"preprocess", preprocess},
                {"rank_y", rank_y}};
    }
};

json estimate_to_json(const LambdaEstimate& est, bool clip_negative) {
    json warnings = json::array();
    if (est.between_group_recommended)
        warnings.push_back("tied predictor share " + std::to_string(est.tied_x_share) +
                           " exceeds 0.2; consider --variant between-group");
    const double value = clip_negative && est.value < 0.0 ? 0.0 : est.value;
    return {{"lambda", value},
            {"lambda_raw", est.value},
            {"numerator", est.numerator},
            {"denominator", est.denominator},
            {"variant", to_string(est.variant)},
            {"n", est.n},
            {"p", est.p},
            {"seed", est.seed},
            {"tied_x_share", est.tied_x_share},
            {"warnings", warnings}};
}

int cmd_estimate(const DataOptions& data, std::uint64_t seed, const std::string& variant,
                 bool clip_negative) {
    const auto obs = data.load();
    const auto v = parse_variant(variant);
    const LambdaEstimate est =
        v == LambdaVariant::rank_based ? lambda_rank_based(obs) : lambda_nn(obs, seed, v);
    json out = estimate_to_json(est, clip_negative);
    out["command"] = "estimate";
    out["config"] = data.config();
    out["config"]["seed"] = seed;
    out["config"]["variant"] = variant;
    out["config"]["clip_negative"] = clip_negative;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_permtest(const DataOptions& data, std::uint64_t seed, const std::string& variant,
                 std::size_t n_perms, bool plus_one, bool emit_replicates) {
    const auto obs = data.load();
    const auto res = permutation_test(obs, n_perms, seed, parse_variant(variant), plus_one);
    json out{{"command", "permtest"},
             {"observed", res.observed},
             {"p_value", res.p_value},
             {"n_perms", res.n_perms},
             {"seed", res.seed},
             {"plus_one_correction", res.plus_one_correction}};
    if (emit_replicates) out["replicates"] = res.replicates;
    out["config"] = data.config();
    out["config"]["seed"] = seed;
    out["config"]["variant"] = variant;
    out["config"]["n_perms"] = n_perms;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_select(const DataOptions& data, std::uint64_t seed, const std::string& method,
               const std::string& variant, std::size_t max_p, bool no_standardize) {
    const auto obs = data.load();
    SelectionOptions opts;
    opts.standardize = !no_standardize;
    opts.variant = parse_variant(variant);
    opts.max_p = max_p;

    const auto names = [&](const std::vector<std::size_t>& cols) {
        json arr = json::array();
        for (std::size_t c : cols)
            arr.push_back(obs.column_names().empty() ? "x" + std::to_string(c + 1)
                                                     : obs.column_names()[c]);
        return arr;
    };

    SelectionTrace trace;
    if (method == "forward") {
        trace = forward_select(obs, seed, opts);
    } else if (method == "best-subset") {
        trace = best_subset_select(obs, seed, opts);
    } else {
        throw CsvError("unknown method '" + method + "'");
    }

    json steps = json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"column", s.added_column},
                         {"name", names({s.added_column})[0]},
                         {"lambda", s.lambda_after}});
    json out{{"command", "select"},
             {"method", method},
             {"steps", steps},
             {"selected_columns", trace.selected},
             {"selected", names(trace.selected)}};
    if (!trace.all_subsets.empty()) {
        json top = json::array();
        const std::size_t limit = std::min<std::size_t>(10, trace.all_subsets.size());
        for (std::size_t i = 0; i < limit; ++i)
            top.push_back({{"columns", names(trace.all_subsets[i].columns)},
                           {"lambda", trace.all_subsets[i].lambda}});
        out["top_subsets"] = top;
    }
    out["config"] = data.config();
    out["config"]["seed"] = seed;
    out["config"]["method"] = method;
    out["config"]["standardize"] = opts.standardize;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

ScenarioId parse_scenario(const std::string& s) {
    if (s == "intro") return ScenarioId::intro_discretization;
    if (s == "s1") return ScenarioId::s1_bvn;
    if (s == "s2a") return ScenarioId::s2a_bf;
    if (s == "s2b") return ScenarioId::s2b_bf;
    if (s == "s3") return ScenarioId::s3_discretize;
    if (s == "s4a") return ScenarioId::s4a_noise;
    if (s == "s4b") return ScenarioId::s4b_cosine;
    if (s == "s5a") return ScenarioId::s5a_indep;
    if (s == "s5b") return ScenarioId::s5b_scale;
    if (s == "s5c") return ScenarioId::s5c_rademacher;
    if (s == "s5d") return ScenarioId::s5d_misspec;
    throw CsvError("unknown scenario '" + s + "'");
}

int cmd_simulate(const std::string& scenario, std::size_t n, std::size_t reps,
                 std::uint64_t seed, double rho, double sigma, std::size_t k,
                 const std::string& csv_path, const std::string& data_out,
                 std::size_t data_rep) {
    ScenarioSpec spec;
    spec.id = parse_scenario(scenario);
    spec.n = n;
    spec.reps = reps;
    spec.seed = seed;
    spec.rho = rho;
    spec.sigma = sigma;
    spec.k = k;

    if (!data_out.empty()) {
        ScenarioSpec one = spec;
        one.seed = rng::derive_key(spec.seed, rng::kScenarioRep, data_rep);
        const auto obs = generate(one);
        std::ofstream f(data_out);
        if (!f) throw CsvError("cannot write '" + data_out + "'");
        write_csv(f, obs);
    }

    const auto summary = run_scenario(spec);
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw CsvError("cannot write '" + csv_path + "'");
        f << to_csv(summary);
    }

    json series = json::array();
    for (const auto& s : summary.series) {
        json entry{{"name", s.name},
                   {"min", s.box.min},
                   {"q1", s.box.q1},
                   {"median", s.box.median},
                   {"q3", s.box.q3},
                   {"max", s.box.max}};
        if (s.oracle) entry["oracle"] = *s.oracle;
        series.push_back(entry);
    }
    json out{{"command", "simulate"},
             {"scenario", scenario},
             {"series", series},
             {"config",
              {{"scenario", scenario},
               {"n", n},
               {"reps", reps},
               {"seed", seed},
               {"rho", rho},
               {"sigma", sigma},
               {"k", k},
               {"csv", csv_path},
               {"data_out", data_out},
               {"data_rep", data_rep}}}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& family, double mu1, double mu2, double s1, double s2,
               double rho, double delta, double p1, double p2, double l1, double l2,
               double alpha, double beta, std::size_t efgm_p, std::uint64_t q_num,
               std::uint64_t q_den) {
    std::optional<models::ClosedFormModel> model;
    if (family == "bf-normal") model = models::BFNormal{mu1, s1, mu2, s2, 0.5};
    else if (family == "mvn") model = models::MVNormal{Matrix(2, 2, {1.0, rho, rho, 1.0})};
    else if (family == "uniform-shift") model = models::UniformShift{delta};
    else if (family == "bernoulli") model = models::BernoulliPair{p1, p2};
    else if (family == "exponential") model = models::ExponentialPair{l1, l2};
    else if (family == "marshall-olkin") model = models::MarshallOlkin{beta};
    else if (family == "frechet") model = models::FrechetCopula{alpha, beta};
    else if (family == "efgm") model = models::EFGM{alpha, efgm_p};
    else if (family == "frechet-class") model = models::frechet_class_table();
    else if (family == "three-group") model = models::three_group_paradox_table(q_num, q_den);
    else throw CsvError("unknown family '" + family + "'");

    json out{{"command", "oracle"}, {"family", family}, {"lambda", models::lambda_exact(*model)}};
    try {
        out["psi"] = models::psi_exact(*model);
    } catch (const std::invalid_argument&) {
        // not a two-group family; psi omitted
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"separation coefficient estimation and inference"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--seed", seed, "RNG seed (default: SEPCOEF_SEED env or 0)")
        ->each([&](const std::string&) { seed_given = true; });

    DataOptions est_data, perm_data, sel_data;
    std::string est_variant = "standard", perm_variant = "standard", sel_variant = "standard";
    bool clip_negative = false;
    auto* est = app.add_subcommand("estimate", "estimate the separation coefficient");
    est_data.attach(est);
    est->add_option("--variant", est_variant, "standard|between-group|rank");
    est->add_flag("--clip-negative", clip_negative, "clip negative estimates to 0");

    std::size_t n_perms = 999;
    bool plus_one = false, emit_replicates = false;
    auto* perm = app.add_subcommand("permtest", "permutation test of no separation");
    perm_data.attach(perm);
    perm->add_option("--n-perms", n_perms, "number of permutations (default 999)");
    perm->add_option("--variant", perm_variant, "standard|between-group");
    perm->add_flag("--plus-one", plus_one, "use the (count+1)/(N+1) corrected p-value");
    perm->add_flag("--emit-replicates", emit_replicates, "include replicate values in output");

    std::string method = "forward";
    std::size_t max_p = 20;
    bool no_standardize = false;
    auto* sel = app.add_subcommand("select", "variable selection maximizing the coefficient");
    sel_data.attach(sel);
    sel->add_option("--method", method, "forward|best-subset");
    sel->add_option("--variant", sel_variant, "standard|between-group");
    sel->add_option("--max-p", max_p, "best-subset budget (default 20)");
    sel->add_flag("--no-standardize", no_standardize, "skip predictor standardization");

    std::string scenario = "s1", csv_path, data_out;
    std::size_t sim_n = 1000, reps = 1, sim_k = 0, data_rep = 0;
    double rho = 0.0, sigma = 0.0;
    auto* sim = app.add_subcommand("simulate", "run a synthetic scenario");
    sim->add_option("--scenario", scenario,
                    "intro|s1|s2a|s2b|s3|s4a|s4b|s5a|s5b|s5c|s5d")->required();
    sim->add_option("--n", sim_n, "sample size per rep");
    sim->add_option("--reps", reps, "number of repetitions");
    sim->add_option("--rho", rho, "s1 correlation");
    sim->add_option("--sigma", sigma, "s4a noise scale");
    sim->add_option("--k", sim_k, "bin count for intro/s3 (0 = ungrouped)");
    sim->add_option("--csv", csv_path, "write per-rep estimates as CSV to this path");
    sim->add_option("--data-out", data_out, "write one generated dataset as CSV");
    sim->add_option("--data-rep", data_rep, "which rep to write with --data-out");

    std::string family;
    double mu1 = 0, mu2 = 0, s1v = 1, s2v = 1, orho = 0, delta = 0, p1 = 0, p2 = 0;
    double l1 = 1, l2 = 1, alpha = 0, beta = 0;
    std::size_t efgm_p = 1, q_num = 1, q_den = 4;
    auto* ora = app.add_subcommand("oracle", "closed-form coefficient values");
    ora->add_option("--family", family,
                    "bf-normal|mvn|uniform-shift|bernoulli|exponential|marshall-olkin|"
                    "frechet|efgm|frechet-class|three-group")->required();
    ora->add_option("--mu1", mu1, "group-1 mean (bf-normal)");
    ora->add_option("--mu2", mu2, "group-2 mean (bf-normal)");
    ora->add_option("--s1", s1v, "group-1 variance (bf-normal)");
    ora->add_option("--s2", s2v, "group-2 variance (bf-normal)");
    ora->add_option("--rho", orho, "correlation (mvn, bivariate)");
    ora->add_option("--delta", delta, "shift (uniform-shift)");
    ora->add_option("--p1", p1, "group-1 success probability (bernoulli)");
    ora->add_option("--p2", p2, "group-2 success probability (bernoulli)");
    ora->add_option("--l1", l1, "group-1 rate (exponential)");
    ora->add_option("--l2", l2, "group-2 rate (exponential)");
    ora->add_option("--alpha", alpha, "copula parameter (frechet, efgm)");
    ora->add_option("--beta", beta, "copula parameter (marshall-olkin, frechet)");
    ora->add_option("--p", efgm_p, "predictor dimension (efgm)");
    ora->add_option("--q-num", q_num, "three-group q numerator");
    ora->add_option("--q-den", q_den, "three-group q denominator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (!seed_given) seed = default_seed();
        if (est->parsed()) return cmd_estimate(est_data, seed, est_variant, clip_negative);
        if (perm->parsed())
            return cmd_permtest(perm_data, seed, perm_variant, n_perms, plus_one,
                                emit_replicates);
        if (sel->parsed())
            return cmd_select(sel_data, seed, method, sel_variant, max_p, no_standardize);
        if (sim->parsed())
            return cmd_simulate(scenario, sim_n, reps, seed, rho, sigma, sim_k, csv_path,
                                data_out, data_rep);
        if (ora->parsed())
            return cmd_oracle(family, mu1, mu2, s1v, s2v, orho, delta, p1, p2, l1, l2, alpha,
                              beta, efgm_p, q_num, q_den);
    } catch (const CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitEstimationError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitEstimationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
