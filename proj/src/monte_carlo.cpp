#include "deconvar/monte_carlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "deconvar/errors.hpp"

namespace deconvar {

namespace {

WeightSpec weight_for(WeightBase base, RegressionFamily family, double sigma_eps) {
    const bool cauchy = family == RegressionFamily::Cauchy;
    if (base == WeightBase::N)
        return cauchy ? WeightSpec::n_c(sigma_eps) : WeightSpec::n(sigma_eps);
    return cauchy ? WeightSpec::sc_c() : WeightSpec::sc();
}

InversionPlan plan_for(const WeightSpec& w, const ErrorModel& err, const EstimationSetup& setup) {
    InversionPlan plan;
    plan.t_max = setup.t_max_override > 0.0 ? setup.t_max_override : default_t_max(w, err);
    plan.points = setup.points;
    plan.mode = setup.mode;
    plan.validate();
    return plan;
}

KernelSpec kernel_for(const EstimationSetup& setup) {
    if (std::isinf(setup.general_cn) && setup.general_delta == 0.0) return KernelSpec::none();
    if (setup.general_delta == 0.0) return KernelSpec::indicator(setup.general_cn);
    return KernelSpec::tapered(setup.general_cn, setup.general_delta);
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

EstimateRecord run_estimator(EstimatorTag tag, const Scenario& scenario,
                             std::span<const double> x, std::span<const double> z,
                             const EstimationSetup& setup) {
    const RegressionFamily family = scenario.regression.family;
    const ErrorModel& err = scenario.error;

    switch (tag) {
        case EstimatorTag::Naive:
            return estimate_naive(z, family);
        case EstimatorTag::Oracle:
            if (x.empty()) throw ConfigError("oracle estimator needs the latent series");
            return estimate_oracle(x, family);
        case EstimatorTag::Arma:
            if (family != RegressionFamily::Linear)
                throw ConfigError("the ARMA baseline applies to the linear family only");
            return estimate_arma(z);
        case EstimatorTag::DeconvN:
        case EstimatorTag::DeconvSC: {
            const auto w = weight_for(
                tag == EstimatorTag::DeconvN ? WeightBase::N : WeightBase::SC, family,
                err.sigma_eps);
            const auto plan = plan_for(w, err, setup);
            return family == RegressionFamily::Linear
                       ? estimate_linear_closed(z, w, err, plan)
                       : estimate_cauchy_closed(z, w, err, plan);
        }
        case EstimatorTag::DeconvGeneral: {
            const auto w = weight_for(setup.general_weight, family, err.sigma_eps);
            const auto plan = plan_for(w, err, setup);
            return estimate_general(z, family, ThetaBox::family_default(family), w, err,
                                    kernel_for(setup), plan);
        }
    }
    throw ConfigError("unknown estimator tag");
}

Scenario MCConfig::resolve_scenario() const {
    if (preset == "custom") {
        if (!scenario) throw ConfigError("custom preset needs an explicit scenario");
        Scenario s = *scenario;
        s.validate();
        return s;
    }
    return preset_by_name(preset, n, s2n, error_kind);
}

void MCConfig::validate() const {
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (threads < 0) throw ConfigError("threads must be non-negative");
    const Scenario s = resolve_scenario();
    for (const auto tag : estimators)
        if (tag == EstimatorTag::Arma && s.regression.family != RegressionFamily::Linear)
            throw ConfigError("the ARMA baseline applies to the linear family only");
    InversionPlan probe;
    probe.points = setup.points;
    if (setup.t_max_override > 0.0) probe.t_max = setup.t_max_override;
    probe.validate();
    KernelSpec k = kernel_for(setup);
    k.validate();
}

MCReport run_mc(const MCConfig& cfg) {
    cfg.validate();
    const Scenario scenario = cfg.resolve_scenario();
    const auto t_start = std::chrono::steady_clock::now();

    const std::size_t n_est = cfg.estimators.size();
    const int reps = cfg.reps;

    // one slot per (replication, estimator); empty optional = failure
    std::vector<std::vector<std::optional<std::vector<double>>>> slots(
        static_cast<std::size_t>(reps));
    for (auto& row : slots) row.resize(n_est);

    auto run_rep = [&](int r) {
        auto& row = slots[static_cast<std::size_t>(r)];
        TrajectoryPair traj;
        try {
            RngStream stream = RngStream::split(cfg.master_seed, static_cast<std::uint64_t>(r));
            traj = simulate(scenario, stream);
        } catch (const Error&) {
            return; // whole replication unusable; every estimator records a failure
        }
        for (std::size_t e = 0; e < n_est; ++e) {
            try {
                row[e] = run_estimator(cfg.estimators[e], scenario, traj.x, traj.z, cfg.setup)
                             .theta_hat;
            } catch (const DegenerateDesignError&) {
            } catch (const NumericError&) {
            }
        }
    };

    if (cfg.threads == 1) {
        for (int r = 0; r < reps; ++r) run_rep(r);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int r = 0; r < reps; ++r) run_rep(r);
    }

    MCReport report;
    report.config = cfg;
    report.theta0 = scenario.regression.theta();
    report.coords = scenario.regression.family == RegressionFamily::Linear
                        ? std::vector<std::string>{"a", "b"}
                        : std::vector<std::string>{"theta"};
    const std::size_t dim = report.theta0.size();

    for (std::size_t e = 0; e < n_est; ++e) {
        EstimatorSummary summary;
        summary.tag = cfg.estimators[e];
        summary.estimates.resize(dim);
        for (int r = 0; r < reps; ++r) {
            const auto& slot = slots[static_cast<std::size_t>(r)][e];
            if (!slot) {
                ++summary.failures;
                summary.failed_reps.push_back(r);
                continue;
            }
            summary.success_reps.push_back(r);
            for (std::size_t d = 0; d < dim; ++d) summary.estimates[d].push_back((*slot)[d]);
        }
        summary.reps_used = static_cast<long>(summary.success_reps.size());
        summary.mean.resize(dim, 0.0);
        summary.bias.resize(dim, 0.0);
        summary.mse.resize(dim, 0.0);
        for (std::size_t d = 0; d < dim; ++d) {
            if (summary.reps_used == 0) continue;
            double mean = 0.0;
            double mse = 0.0;
            for (double v : summary.estimates[d]) {
                mean += v;
                const double dev = v - report.theta0[d];
                mse += dev * dev;
            }
            mean /= static_cast<double>(summary.reps_used);
            mse /= static_cast<double>(summary.reps_used);
            summary.mean[d] = mean;
            summary.bias[d] = mean - report.theta0[d];
            summary.mse[d] = mse;
        }
        report.estimators.push_back(std::move(summary));
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

std::string emit_table(const MCReport& report, TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "estimator,coordinate,mean,bias,mse,reps_used,failures\n";
        for (const auto& s : report.estimators)
            for (std::size_t d = 0; d < report.coords.size(); ++d)
                out << estimator_name(s.tag) << ',' << report.coords[d] << ','
                    << format_full(s.mean[d]) << ',' << format_full(s.bias[d]) << ','
                    << format_full(s.mse[d]) << ',' << s.reps_used << ',' << s.failures << '\n';
        return out.str();
    }
    out << "| estimator | coordinate | mean (MSE) |\n";
    out << "|---|---|---|\n";
    char cell[64];
    for (const auto& s : report.estimators)
        for (std::size_t d = 0; d < report.coords.size(); ++d) {
            std::snprintf(cell, sizeof(cell), "%.4f (%.5f)", s.mean[d], s.mse[d]);
            out << "| " << estimator_name(s.tag) << " | " << report.coords[d] << " | " << cell
                << " |\n";
        }
    return out.str();
}

namespace {

// Linear-interpolation quantile on sorted values.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::string emit_boxplot_data(const MCReport& report) {
    std::ostringstream out;
    out << "estimator,coordinate,kind,index,value\n";
    for (const auto& s : report.estimators) {
        for (std::size_t d = 0; d < report.coords.size(); ++d) {
            const auto& name = report.coords[d];
            const auto& values = s.estimates[d];
            for (std::size_t i = 0; i < values.size(); ++i)
                out << estimator_name(s.tag) << ',' << name << ",rep," << s.success_reps[i]
                    << ',' << format_full(values[i]) << '\n';
            if (values.empty()) continue;
            std::vector<double> sorted(values);
            std::sort(sorted.begin(), sorted.end());
            const double q1 = sorted_quantile(sorted, 0.25);
            const double q2 = sorted_quantile(sorted, 0.5);
            const double q3 = sorted_quantile(sorted, 0.75);
            const double iqr = q3 - q1;
            double wlo = q2;
            double whi = q2;
            // Tukey fences: the most extreme observations within 1.5*IQR
            for (double v : sorted) {
                if (v >= q1 - 1.5 * iqr) {
                    wlo = v;
                    break;
                }
            }
            for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
                if (*it <= q3 + 1.5 * iqr) {
                    whi = *it;
                    break;
                }
            }
            const char* kinds[] = {"q1", "median", "q3", "whisker_low", "whisker_high"};
            const double stats[] = {q1, q2, q3, wlo, whi};
            for (int i = 0; i < 5; ++i)
                out << estimator_name(s.tag) << ',' << name << ',' << kinds[i] << ",-1,"
                    << format_full(stats[i]) << '\n';
        }
    }
    return out.str();
}

} // namespace deconvar
