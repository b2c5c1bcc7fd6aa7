#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deconvar/ar_process.hpp"
#include "deconvar/estimators.hpp"

namespace deconvar {

/// Shared knobs for building weights, plans and kernels out of a scenario.
struct EstimationSetup {
    long points = 4096;
    double t_max_override = 0.0; // 0 keeps the per-weight automatic range
    EvalMode mode = EvalMode::ClosedForm;
    // configuration of the spectral-cutoff estimator
    WeightBase general_weight = WeightBase::SC;
    double general_cn = std::numeric_limits<double>::infinity();
    double general_delta = 0.0;
};

/// Run one estimator on one data set.  `x` is the latent series and may be
/// empty for everything except the oracle.  Deconvolution weights are picked
/// per family from the scenario's error sigma: DeconvN uses N (linear) or
/// N_c (Cauchy), DeconvSC uses SC or SC_c.
EstimateRecord run_estimator(EstimatorTag tag, const Scenario& scenario,
                             std::span<const double> x, std::span<const double> z,
                             const EstimationSetup& setup);

struct MCConfig {
    std::string preset = "case-a"; // case-a | case-b | cauchy | custom
    std::optional<Scenario> scenario; // required when preset == "custom"
    long n = 1000;
    double s2n = 0.5;
    ErrorKind error_kind = ErrorKind::Laplace;
    int reps = 100;
    std::vector<EstimatorTag> estimators;
    std::uint64_t master_seed = 1;
    EstimationSetup setup;
    int threads = 0; // 0 = library default, 1 = force the serial path

    Scenario resolve_scenario() const;
    void validate() const;
};

struct EstimatorSummary {
    EstimatorTag tag = EstimatorTag::Naive;
    long reps_used = 0;
    long failures = 0;
    std::vector<long> failed_reps;
    std::vector<long> success_reps;               // replication ids, ascending
    std::vector<std::vector<double>> estimates;   // [coordinate][success index]
    std::vector<double> mean, bias, mse;          // per coordinate
};

struct MCReport {
    MCConfig config;
    std::vector<std::string> coords; // "a","b" or "theta"
    std::vector<double> theta0;
    std::vector<EstimatorSummary> estimators;
    double wall_seconds = 0.0; // informational; never serialized
};

/// Replication r simulates from the stream split(master_seed, r), then runs
/// every configured estimator on the replication's data.  Per-replication
/// estimator failures (degenerate design, numeric faults) are recorded and
/// excluded from the moments; mean, bias and MSE average over the
/// replications that succeeded:  MSE = (1/reps_used) sum (theta_hat - theta0)^2.
/// Output is bit-identical for a fixed config regardless of thread count.
MCReport run_mc(const MCConfig& cfg);

enum class TableFormat { Csv, Markdown };

/// Per-(estimator, coordinate) summary; Markdown uses the "mean (MSE)" cell
/// layout, CSV carries full precision.
std::string emit_table(const MCReport& report, TableFormat format);

/// Long-format CSV: one "rep" row per replication estimate plus quartile and
/// 1.5*IQR whisker rows per (estimator, coordinate).
std::string emit_boxplot_data(const MCReport& report);

} // namespace deconvar
