// deconvar: command-line front end for noisy-AR parameter estimation.
//
// Subcommands:
//   simulate          draw one trajectory and write it as CSV
//   estimate          run estimators on an existing trajectory CSV
//   mc                run a Monte Carlo study and write report files
//   check-conditions  evaluate the moment/integrability diagnostics
//
// Exit codes: 0 success; 2 configuration problems (bad flags, malformed
// files, unsupported combinations); 3 runtime estimation failures
// (degenerate designs, diverging simulations, numeric breakdown);
// 4 condition check did not converge.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deconvar/ar_process.hpp"
#include "deconvar/errors.hpp"
#include "deconvar/estimators.hpp"
#include "deconvar/json_io.hpp"
#include "deconvar/monte_carlo.hpp"
#include "deconvar/rng.hpp"
#include "deconvar/table_io.hpp"
#include "deconvar/weight_functions.hpp"

namespace {

using json = nlohmann::json;
using namespace deconvar;

/// Flags shared by the subcommands that need a data-generating scenario.
struct ScenarioFlags {
    std::string preset = "case-a";
    long n = 1000;
    double s2n = 0.5;
    std::string error = "laplace";
    std::string config_path;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& flags, bool with_n) {
    cmd->add_option("--preset", flags.preset, "Scenario preset: case-a, case-b, cauchy")
        ->capture_default_str();
    if (with_n)
        cmd->add_option("--n", flags.n, "Number of observed transitions")->capture_default_str();
    cmd->add_option("--s2n", flags.s2n, "Noise-to-signal ratio var(noise)/var(state)")
        ->capture_default_str();
    cmd->add_option("--error", flags.error, "Observation error law: laplace, gaussian")
        ->capture_default_str();
    cmd->add_option("--config", flags.config_path,
                    "JSON scenario file (overrides the preset flags)");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

Scenario scenario_from_flags(const ScenarioFlags& flags) {
    if (!flags.config_path.empty())
        return load_json_file(flags.config_path).get<Scenario>();
    if (flags.n <= 0) throw ConfigError("--n must be positive");
    return preset_by_name(flags.preset, flags.n, flags.s2n,
                          error_kind_from_name(flags.error));
}

/// Estimation knobs shared by `estimate` and flag-driven `mc`.
struct SetupFlags {
    long points = 4096;
    double t_max = 0.0;
    std::string weight = "sc";
    double cn = 0.0; // 0 means "no truncation"
    double delta = 0.0;
};

void add_setup_flags(CLI::App* cmd, SetupFlags& flags) {
    cmd->add_option("--points", flags.points, "Frequency-grid intervals (power of two)")
        ->capture_default_str();
    cmd->add_option("--tmax", flags.t_max, "Frequency cutoff (0 = automatic)")
        ->capture_default_str();
    cmd->add_option("--weight", flags.weight,
                    "Weight family for deconv-general: n or sc")
        ->capture_default_str();
    cmd->add_option("--cn", flags.cn,
                    "Spectral truncation level for deconv-general (0 = none)");
    cmd->add_option("--delta", flags.delta,
                    "Relative taper width of the truncation (0 = sharp)")
        ->capture_default_str();
}

EstimationSetup setup_from_flags(const SetupFlags& flags) {
    EstimationSetup setup;
    if (flags.points <= 0) throw ConfigError("--points must be positive");
    setup.points = flags.points;
    setup.t_max_override = flags.t_max;
    setup.general_weight = weight_base_from_name(flags.weight);
    setup.general_cn =
        flags.cn > 0.0 ? flags.cn : std::numeric_limits<double>::infinity();
    setup.general_delta = flags.delta;
    return setup;
}

std::vector<EstimatorTag> tags_from_names(const std::vector<std::string>& names) {
    std::vector<EstimatorTag> tags;
    tags.reserve(names.size());
    for (const auto& name : names) tags.push_back(estimator_from_name(name));
    return tags;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

int cmd_simulate(const ScenarioFlags& flags, std::uint64_t seed, const std::string& out_path) {
    const Scenario scenario = scenario_from_flags(flags);
    // Seed exactly like replication 0 of a Monte Carlo run with the same
    // master seed, so single trajectories can be cross-checked against it.
    RngStream rng = RngStream::split(seed, 0);
    const TrajectoryPair traj = simulate(scenario, rng);
    if (out_path.empty()) {
        write_trajectory_csv(std::cout, traj);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_trajectory_csv(out, traj);
    }
    return 0;
}

int cmd_estimate(const ScenarioFlags& flags, const SetupFlags& setup_flags,
                 const std::vector<std::string>& estimator_names,
                 const std::string& data_path, const std::string& out_path) {
    const Scenario scenario = scenario_from_flags(flags);
    const EstimationSetup setup = setup_from_flags(setup_flags);

    std::ifstream in(data_path);
    if (!in) throw ConfigError("cannot open '" + data_path + "'");
    const TrajectoryData data = read_trajectory_csv(in);

    json out = json::array();
    for (const auto& name : estimator_names) {
        const EstimatorTag tag = estimator_from_name(name);
        const EstimateRecord rec =
            run_estimator(tag, scenario, data.has_x ? data.x : std::vector<double>{},
                          data.z, setup);
        out.push_back(rec);
    }
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
    return 0;
}

int cmd_mc(const ScenarioFlags& flags, const SetupFlags& setup_flags,
           const std::vector<std::string>& estimator_names, long reps,
           std::uint64_t seed, long threads, const std::string& out_dir) {
    MCConfig config;
    if (!flags.config_path.empty()) {
        config = load_json_file(flags.config_path).get<MCConfig>();
    } else {
        if (flags.n <= 0) throw ConfigError("--n must be positive");
        if (reps <= 0) throw ConfigError("--reps must be positive");
        config.preset = flags.preset;
        config.n = flags.n;
        config.s2n = flags.s2n;
        config.error_kind = error_kind_from_name(flags.error);
        config.reps = static_cast<int>(reps);
        config.master_seed = seed;
        config.estimators = tags_from_names(estimator_names);
        config.setup = setup_from_flags(setup_flags);
        config.threads = threads < 0 ? 0 : static_cast<int>(threads);
    }
    config.validate();

    const MCReport report = run_mc(config);

    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    const json report_json = report;
    write_text_file((dir / "report.json").string(), report_json.dump(2) + "\n");
    write_text_file((dir / "table.csv").string(), emit_table(report, TableFormat::Csv));
    write_text_file((dir / "boxplot.csv").string(), emit_boxplot_data(report));

    std::cout << emit_table(report, TableFormat::Markdown);
    std::printf("\n%d replications in %.2f s\n", report.config.reps, report.wall_seconds);
    return 0;
}

int cmd_check_conditions(const ScenarioFlags& flags, const std::string& weight_name) {
    const Scenario scenario = scenario_from_flags(flags);
    const WeightBase base = weight_base_from_name(weight_name);
    const bool cauchy = scenario.regression.family == RegressionFamily::Cauchy;
    const double sigma = scenario.error.sigma_eps;
    const WeightSpec weight =
        base == WeightBase::N ? (cauchy ? WeightSpec::n_c(sigma) : WeightSpec::n(sigma))
                              : (cauchy ? WeightSpec::sc_c() : WeightSpec::sc());
    const C11Report report = condition_c11_report(weight, scenario.error, scenario.regression);
    for (const auto& integral : report.integrals) {
        if (!integral.applicable) {
            std::printf("%-28s  skipped   (%s)\n", integral.name.c_str(),
                        integral.note.c_str());
        } else {
            std::printf("%-28s  %-9s value=%.6g\n", integral.name.c_str(),
                        integral.converged ? "finite" : "DIVERGES", integral.value);
        }
    }
    if (!report.all_converged) {
        std::printf("condition check FAILED: at least one integral diverges\n");
        return 4;
    }
    std::printf("condition check passed\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter estimation for autoregressions observed with additive noise"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Draw one trajectory and write CSV");
    ScenarioFlags sim_flags;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    add_scenario_flags(sim, sim_flags, true);
    sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    sim->add_option("--out", sim_out, "Output CSV path (default: stdout)");

    // --- estimate ---------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "Estimate parameters from a trajectory CSV");
    ScenarioFlags est_flags;
    SetupFlags est_setup;
    std::vector<std::string> est_names;
    std::string est_data;
    std::string est_out;
    est->add_option("data", est_data, "Trajectory CSV (header with z, optionally x)")
        ->required();
    add_scenario_flags(est, est_flags, false);
    add_setup_flags(est, est_setup);
    est->add_option("--estimator", est_names,
                    "Estimator (repeatable): deconv-n, deconv-sc, deconv-general, "
                    "oracle, naive, arma")
        ->required();
    est->add_option("--out", est_out, "Output JSON path (default: stdout)");

    // --- mc ---------------------------------------------------------------
    auto* mc = app.add_subcommand("mc", "Run a Monte Carlo study");
    ScenarioFlags mc_flags;
    SetupFlags mc_setup;
    std::vector<std::string> mc_names = {"deconv-sc", "naive"};
    long mc_reps = 100;
    std::uint64_t mc_seed = 1;
    long mc_threads = 0;
    std::string mc_out;
    add_scenario_flags(mc, mc_flags, true);
    add_setup_flags(mc, mc_setup);
    mc->add_option("--estimator", mc_names, "Estimator (repeatable)")
        ->capture_default_str();
    mc->add_option("--reps", mc_reps, "Number of replications")->capture_default_str();
    mc->add_option("--seed", mc_seed, "Master seed")->capture_default_str();
    mc->add_option("--threads", mc_threads, "Worker threads (0 = default, 1 = serial)")
        ->capture_default_str();
    mc->add_option("--out", mc_out, "Output directory for report files")->required();

    // --- check-conditions ---------------------------------------------------
    auto* chk = app.add_subcommand("check-conditions",
                                   "Evaluate the moment/integrability diagnostics");
    ScenarioFlags chk_flags;
    std::string chk_weight = "sc";
    add_scenario_flags(chk, chk_flags, false);
    chk->add_option("--weight", chk_weight, "Weight family: n or sc")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags, sim_seed, sim_out);
        if (est->parsed())
            return cmd_estimate(est_flags, est_setup, est_names, est_data, est_out);
        if (mc->parsed())
            return cmd_mc(mc_flags, mc_setup, mc_names, mc_reps, mc_seed, mc_threads, mc_out);
        if (chk->parsed()) return cmd_check_conditions(chk_flags, chk_weight);
    } catch (const DegenerateDesignError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
