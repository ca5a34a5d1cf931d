#include "attdet/covariance.hpp"
#include "attdet/estimation.hpp"
#include "attdet/io.hpp"
#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"
#include "attdet/projection.hpp"
#include "attdet/simulation.hpp"
#include "attdet/solver.hpp"
#include "attdet/version.hpp"

#include "oracle_suite.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPreconditionError = 3;

bool log_enabled() {
    const char* env = std::getenv("ATT_LOG");
    return env != nullptr && std::string(env) != "" && std::string(env) != "quiet";
}

void log_info(const std::string& msg) {
    if (log_enabled()) std::cerr << "[attdet] " << msg << '\n';
}

using attdet::Json;
using attdet::Mat;
using attdet::Vec;

struct SolveOptions {
    std::string input;
    std::string out_dir = ".";
    std::uint64_t seed = attdet::kDefaultSeed;
    bool handeye_only = false;
    std::string projection = "svd";
};

int cmd_solve(const SolveOptions& opt) {
    Json input;
    attdet::MeasurementSet ms;
    std::optional<Mat> truth;
    try {
        input = attdet::read_json_file(opt.input);
        ms = attdet::measurement_set_from_json(input);
        if (input.contains("truth")) {
            truth = attdet::matrix_from_json(input["truth"], "truth");
            if (truth->rows() != ms.n || truth->cols() != ms.n) {
                throw std::invalid_argument("field 'truth': dimension mismatch with n");
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    }

    attdet::AttitudeSolution sol;
    try {
        sol = opt.handeye_only ? attdet::solve_handeye_only(ms) : attdet::solve_unified(ms);
    } catch (const std::exception& e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kExitPreconditionError;
    }
    log_info("solved, rank " + std::to_string(sol.rank) + ", loss " +
             attdet::format_double(sol.loss));

    const Mat xm = attdet::mat(sol.x, ms.n, ms.n);
    const attdet::RotationEstimate svd_est = attdet::project_svd(xm);
    std::optional<attdet::RotationEstimate> cayley_est;
    try {
        cayley_est = attdet::project_cayley(xm);
    } catch (const std::exception& e) {
        log_info(std::string("cayley projection unavailable: ") + e.what());
    }

    const Mat R_primary = (opt.projection == "cayley" && cayley_est) ? cayley_est->R : svd_est.R;

    const attdet::BlockCov blocks = attdet::assemble_blocks(ms);
    const attdet::SolutionCovariance cov = attdet::solution_covariance(ms, sol, blocks);
    std::optional<attdet::RotationCovariance> rot_cov;
    try {
        rot_cov = attdet::rotation_covariance(sol, cov.sigma_xx, R_primary);
    } catch (const std::exception& e) {
        log_info(std::string("rotation covariance unavailable: ") + e.what());
    }

    Json out;
    Json config;
    config["input"] = opt.input;
    config["handeye_only"] = opt.handeye_only;
    config["projection"] = opt.projection;
    out["metadata"] = attdet::metadata_json(opt.seed, config);
    out["mode"] = attdet::to_string(sol.mode);
    out["x"] = attdet::vector_to_json(sol.x);
    out["loss"] = sol.loss;
    out["rank"] = sol.rank;
    out["degenerate"] = sol.degenerate;
    out["ambiguous"] = sol.ambiguous;
    out["R"] = attdet::matrix_to_json(R_primary);
    out["R_svd"] = attdet::matrix_to_json(svd_est.R);
    out["R_cayley"] = cayley_est ? attdet::matrix_to_json(cayley_est->R) : Json();
    out["g_cayley"] = cayley_est ? attdet::vector_to_json(cayley_est->g.g) : Json();
    out["sigma_xx"] = attdet::matrix_to_json(cov.sigma_xx);
    out["sigma_r"] = rot_cov ? attdet::matrix_to_json(rot_cov->sigma_r) : Json();
    out["sigma_g"] = rot_cov ? attdet::matrix_to_json(rot_cov->sigma_g) : Json();
    if (truth) {
        out["eta_svd"] = attdet::rotation_error(svd_est.R, *truth);
        if (cayley_est) out["eta_cayley"] = attdet::rotation_error(cayley_est->R, *truth);
    }

    std::filesystem::create_directories(opt.out_dir);
    const std::string path = opt.out_dir + "/solution.json";
    attdet::write_json_file(path, out);
    log_info("wrote " + path);
    return kExitOk;
}

struct SweepOptions {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int jobs = 1;
};

int cmd_sweep(const SweepOptions& opt) {
    attdet::SweepSpec spec;
    attdet::TrajectorySpec ts;
    Json config_json;
    try {
        if (!opt.config.empty()) {
            config_json = attdet::read_json_file(opt.config);
            if (config_json.contains("scenario")) {
                spec.base = attdet::scenario_from_json(config_json["scenario"]);
            }
            if (config_json.contains("vector_counts")) {
                spec.vector_counts = config_json["vector_counts"].get<std::vector<int>>();
            }
            if (config_json.contains("handeye_counts")) {
                spec.handeye_counts = config_json["handeye_counts"].get<std::vector<int>>();
            }
            if (config_json.contains("kinds")) {
                spec.kinds.clear();
                for (const Json& k : config_json["kinds"]) {
                    const std::string name = k.get<std::string>();
                    if (name == "rigid") {
                        spec.kinds.push_back(attdet::HandEyeKind::rigid);
                    } else if (name == "symmetric") {
                        spec.kinds.push_back(attdet::HandEyeKind::symmetric);
                    } else {
                        throw std::invalid_argument("field 'kinds': unknown kind '" + name + "'");
                    }
                }
            }
            if (config_json.contains("trajectory")) {
                ts = attdet::trajectory_from_json(config_json["trajectory"]);
            }
        }
        if (opt.seed) spec.base.seed = *opt.seed;
        if (opt.trials) spec.base.trials = *opt.trials;
        spec.jobs = opt.jobs;
        if (spec.base.trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (spec.vector_counts.empty() || spec.kinds.empty()) {
            throw std::invalid_argument("sweep needs vector counts and kinds");
        }
        if (ts.length < spec.base.trials) ts.length = spec.base.trials;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    }

    log_info("running sweep: " + std::to_string(spec.vector_counts.size()) + "x" +
             std::to_string(spec.handeye_counts.size()) + " cells, " +
             std::to_string(spec.base.trials) + " trials each");
    const attdet::SweepResult result = attdet::run_sweep(spec, ts);

    std::filesystem::create_directories(opt.out_dir);
    const std::string scenario_id = "sweep-" + std::to_string(spec.base.seed);
    attdet::write_sweep_csv(opt.out_dir + "/sweep.csv", scenario_id, result, spec.base.seed);
    attdet::write_summary_csv(opt.out_dir + "/summary.csv", scenario_id, result);

    Json resolved;
    resolved["scenario"] = attdet::to_json(spec.base);
    resolved["vector_counts"] = spec.vector_counts;
    resolved["handeye_counts"] = spec.handeye_counts;
    Json kinds = Json::array();
    for (attdet::HandEyeKind k : spec.kinds) kinds.push_back(attdet::to_string(k));
    resolved["kinds"] = kinds;
    resolved["trajectory"] = attdet::to_json(ts);
    // synthesis conventions that the noise scales alone do not pin down
    resolved["conventions"] = {{"reference_vectors", "uniform on unit sphere"},
                               {"symmetric_eigenvalue_range", {0.5, 2.0}},
                               {"projection", "svd"}};
    attdet::write_json_file(opt.out_dir + "/metadata.json",
                            attdet::metadata_json(spec.base.seed, resolved));
    log_info("wrote sweep.csv, summary.csv, metadata.json to " + opt.out_dir);
    return kExitOk;
}

struct FilterOptions {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

int cmd_filter(const FilterOptions& opt) {
    attdet::FilterStudyConfig cfg;
    try {
        if (opt.config.empty()) throw std::invalid_argument("filter requires --config");
        cfg = attdet::filter_study_from_json(attdet::read_json_file(opt.config));
        if (opt.seed) cfg.seed = *opt.seed;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    }

    log_info("running filter study, " + std::to_string(cfg.trajectory.length) + " steps");
    const attdet::FilterStudyResult result = attdet::run_filter_study(cfg);

    std::filesystem::create_directories(opt.out_dir);
    attdet::write_filter_csv(opt.out_dir + "/filter.csv", result.rows);

    Json summary;
    summary["metadata"] = attdet::metadata_json(cfg.seed, attdet::to_json(cfg));
    summary["final_bias"] = {result.final_bias(0), result.final_bias(1), result.final_bias(2)};
    summary["true_bias"] = {cfg.true_bias(0), cfg.true_bias(1), cfg.true_bias(2)};
    summary["bias_rel_error"] = result.bias_rel_error;
    summary["nis_within_band"] = result.nis_within_band;
    summary["final_eta"] = result.final_eta;
    summary["updates"] = result.updates;
    attdet::write_json_file(opt.out_dir + "/filter_summary.json", summary);
    log_info("wrote filter.csv, filter_summary.json to " + opt.out_dir);
    return kExitOk;
}

struct OracleOptions {
    std::uint64_t seed = attdet::kDefaultSeed;
    int trials = 5000;
};

int cmd_oracle_check(const OracleOptions& opt) {
    const std::vector<attdet::oracle::Report> reports = attdet::oracle::run_all(opt.seed, opt.trials);
    bool any_fail = false;
    for (const attdet::oracle::Report& r : reports) {
        const char* tag = r.status == attdet::oracle::Status::pass
                              ? "PASS"
                              : (r.status == attdet::oracle::Status::skip ? "SKIP" : "FAIL");
        std::cout << "[" << tag << "] " << r.name << ": " << r.detail << '\n';
        any_fail = any_fail || r.status == attdet::oracle::Status::fail;
    }
    return any_fail ? kExitPropertyFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form attitude determination from vector observations and "
                 "hand-eye measurements"};
    app.set_version_flag("--version", std::string("attdet ") + attdet::kVersion);
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "Solve a measurement set from JSON");
    solve->add_option("--input", solve_opt.input, "MeasurementSet JSON file")->required();
    solve->add_option("--out", solve_opt.out_dir, "Output directory");
    solve->add_option("--seed", solve_opt.seed, "Seed recorded in metadata");
    solve->add_flag("--handeye-only", solve_opt.handeye_only,
                    "Use the eigen-solution (requires M >= 1)");
    solve->add_option("--projection", solve_opt.projection, "Primary projection")
        ->check(CLI::IsMember({"svd", "cayley"}));

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep");
    sweep->add_option("--config", sweep_opt.config, "Sweep config JSON");
    sweep->add_option("--out", sweep_opt.out_dir, "Output directory");
    std::uint64_t sweep_seed = 0;
    int sweep_trials = 0;
    CLI::Option* seed_opt = sweep->add_option("--seed", sweep_seed, "Base seed");
    CLI::Option* trials_opt = sweep->add_option("--trials", sweep_trials, "Trials per cell");
    sweep->add_option("--jobs", sweep_opt.jobs, "Worker threads");

    FilterOptions filter_opt;
    CLI::App* filter = app.add_subcommand("filter", "Run the gyro-fusion filter study");
    filter->add_option("--config", filter_opt.config, "FilterStudyConfig JSON")->required();
    filter->add_option("--out", filter_opt.out_dir, "Output directory");
    std::uint64_t filter_seed = 0;
    CLI::Option* fseed_opt = filter->add_option("--seed", filter_seed, "Seed");

    OracleOptions oracle_opt;
    CLI::App* oracle = app.add_subcommand("oracle-check", "Run the independent oracle suites");
    oracle->add_option("--seed", oracle_opt.seed, "Seed");
    oracle->add_option("--trials", oracle_opt.trials, "Monte Carlo trials");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_opt);
        if (sweep->parsed()) {
            if (*seed_opt) sweep_opt.seed = sweep_seed;
            if (*trials_opt) sweep_opt.trials = sweep_trials;
            return cmd_sweep(sweep_opt);
        }
        if (filter->parsed()) {
            if (*fseed_opt) filter_opt.seed = filter_seed;
            return cmd_filter(filter_opt);
        }
        if (oracle->parsed()) return cmd_oracle_check(oracle_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPropertyFailure;
    }
    return kExitOk;
}
