#include "deconvar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "deconvar/errors.hpp"

namespace deconvar {

std::string estimator_name(EstimatorTag tag) {
    switch (tag) {
        case EstimatorTag::DeconvN: return "deconv-n";
        case EstimatorTag::DeconvSC: return "deconv-sc";
        case EstimatorTag::DeconvGeneral: return "deconv-general";
        case EstimatorTag::Oracle: return "oracle";
        case EstimatorTag::Naive: return "naive";
        case EstimatorTag::Arma: return "arma";
    }
    return "?";
}

EstimatorTag estimator_from_name(const std::string& name) {
    if (name == "deconv-n") return EstimatorTag::DeconvN;
    if (name == "deconv-sc") return EstimatorTag::DeconvSC;
    if (name == "deconv-general") return EstimatorTag::DeconvGeneral;
    if (name == "oracle") return EstimatorTag::Oracle;
    if (name == "naive") return EstimatorTag::Naive;
    if (name == "arma") return EstimatorTag::Arma;
    throw ConfigError("unknown estimator '" + name + "'");
}

ThetaBox ThetaBox::linear_default() {
    return ThetaBox{{{-0.99, 0.99}, {-5.0, 5.0}}};
}

ThetaBox ThetaBox::cauchy_default() {
    return ThetaBox{{{-10.0, 10.0}}};
}

ThetaBox ThetaBox::family_default(RegressionFamily family) {
    return family == RegressionFamily::Linear ? linear_default() : cauchy_default();
}

void ThetaBox::validate(int dim) const {
    if (static_cast<int>(bounds.size()) != dim)
        throw ConfigError("parameter box dimension does not match the regression family");
    for (const auto& b : bounds)
        if (!(b[0] < b[1]) || !std::isfinite(b[0]) || !std::isfinite(b[1]))
            throw ConfigError("parameter box bounds must be finite with lo < hi");
}

namespace {

struct SeriesStats {
    double mean = 0.0;
    double var = 0.0;
};

SeriesStats series_stats(std::span<const double> z) {
    SeriesStats s;
    if (z.empty()) return s;
    s.mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double acc = 0.0;
    for (double v : z) acc += (v - s.mean) * (v - s.mean);
    s.var = acc / static_cast<double>(z.size());
    return s;
}

void require_series(std::span<const double> z) {
    if (z.size() < 3) throw ConfigError("need at least 3 observations");
    for (double v : z)
        if (!std::isfinite(v)) throw NumericError("series contains a non-finite value");
}

bool closed_integrals_available(const WeightSpec& w, const ErrorModel& err,
                                const InversionPlan& plan, const KernelSpec& kernel) {
    return plan.mode == EvalMode::ClosedForm && w.base == WeightBase::N &&
           kernel.is_identity() &&
           std::abs(w.sigma_eps - err.sigma_eps) <= 1e-12 * std::max(1.0, err.sigma_eps);
}

} // namespace

ContrastCache::ContrastCache(std::span<const double> z, RegressionFamily family,
                             const WeightSpec& w, const ErrorModel& err,
                             const InversionPlan& plan, const KernelSpec& kernel)
    : family_(family) {
    require_series(z);
    kernel.validate();
    n_ = static_cast<long>(z.size()) - 1;
    const auto stats = series_stats(z);
    z_mean_ = stats.mean;
    z_var_ = stats.var;

    const std::span<const double> lagged = z.first(z.size() - 1);
    closed_integrals_ = closed_integrals_available(w, err, plan, kernel);

    auto integrals = [&](ProductFn g) {
        if (closed_integrals_) {
            std::vector<double> out(lagged.size());
            for (std::size_t i = 0; i < lagged.size(); ++i)
                out[i] = deconv_closed(w, err, g, lagged[i]);
            return out;
        }
        return kernel_deconv_batch(make_product_transform(w, g), err, lagged, kernel, plan);
    };

    if (family_ == RegressionFamily::Linear) {
        if (w.cauchy_factor)
            throw UnsupportedCombination("the linear family pairs with the plain N and SC weights");
        const auto i0 = integrals(ProductFn::P0);
        const auto i1 = integrals(ProductFn::P1);
        const auto i2 = integrals(ProductFn::P2);
        for (std::size_t k = 0; k < lagged.size(); ++k) {
            const double lead = z[k + 1];
            lin_.i0 += i0[k];
            lin_.i1 += i1[k];
            lin_.i2 += i2[k];
            lin_.z_i0 += lead * i0[k];
            lin_.z_i1 += lead * i1[k];
            lin_.zz_i0 += lead * lead * i0[k];
        }
    } else {
        if (!w.cauchy_factor)
            throw UnsupportedCombination("the Cauchy family pairs with the N_c and SC_c weights");
        const auto iwf = integrals(ProductFn::FCauchy);
        const auto iwf2 = integrals(ProductFn::FCauchySq);
        for (std::size_t k = 0; k < lagged.size(); ++k) {
            cau_.wf2 += iwf2[k];
            cau_.abs_wf2 += std::abs(iwf2[k]);
            cau_.z_wf += z[k + 1] * iwf[k];
        }
    }
}

double ContrastCache::value(std::span<const double> theta) const {
    const double n = static_cast<double>(n_);
    if (family_ == RegressionFamily::Linear) {
        const double a = theta[0];
        const double b = theta[1];
        return (lin_.zz_i0 + b * b * lin_.i0 - 2.0 * b * lin_.z_i0 + a * a * lin_.i2 -
                2.0 * a * lin_.z_i1 + 2.0 * a * b * lin_.i1) /
               n;
    }
    const double th = theta[0];
    return (th * th * cau_.wf2 - 2.0 * th * cau_.z_wf) / n;
}

std::vector<double> ContrastCache::closed_minimizer() const {
    if (z_var_ <= 1e-12 * std::max(1.0, z_mean_ * z_mean_))
        throw DegenerateDesignError("observed series is (near) constant");
    if (family_ == RegressionFamily::Linear) {
        const double det = lin_.i2 * lin_.i0 - lin_.i1 * lin_.i1;
        const double scale = std::abs(lin_.i2 * lin_.i0) + lin_.i1 * lin_.i1;
        if (std::abs(det) <= 1e-10 * scale || scale == 0.0)
            throw DegenerateDesignError("normal system of the quadratic contrast is near singular");
        if (std::abs(lin_.i0) <= 1e-300)
            throw DegenerateDesignError("weight mass sum vanished");
        const double a = (lin_.z_i1 * lin_.i0 - lin_.z_i0 * lin_.i1) / det;
        const double b = (lin_.z_i0 - a * lin_.i1) / lin_.i0;
        return {a, b};
    }
    if (std::abs(cau_.wf2) <= 1e-10 * cau_.abs_wf2 || cau_.abs_wf2 == 0.0)
        throw DegenerateDesignError("sum of I_{wf^2} integrals is not bounded away from zero");
    return {cau_.z_wf / cau_.wf2};
}

const ContrastCache::LinearSums& ContrastCache::linear_sums() const {
    if (family_ != RegressionFamily::Linear)
        throw ConfigError("linear sums requested from a Cauchy-family cache");
    return lin_;
}

const ContrastCache::CauchySums& ContrastCache::cauchy_sums() const {
    if (family_ != RegressionFamily::Cauchy)
        throw ConfigError("Cauchy sums requested from a linear-family cache");
    return cau_;
}

double contrast(std::span<const double> theta, std::span<const double> z,
                RegressionFamily family, const WeightSpec& w, const ErrorModel& err,
                const InversionPlan& plan) {
    ContrastCache cache(z, family, w, err, plan);
    if (static_cast<int>(theta.size()) != (family == RegressionFamily::Linear ? 2 : 1))
        throw ConfigError("theta dimension does not match the regression family");
    return cache.value(theta);
}

namespace {

using Objective = std::function<double(std::span<const double>)>;

std::vector<double> grid_scan(const Objective& f, const ThetaBox& box, int points_per_axis) {
    const std::size_t dim = box.bounds.size();
    std::vector<double> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<int> idx(dim, 0);
    std::vector<double> theta(dim);
    while (true) {
        for (std::size_t d = 0; d < dim; ++d) {
            const auto& b = box.bounds[d];
            theta[d] = b[0] + (b[1] - b[0]) * static_cast<double>(idx[d]) /
                                  static_cast<double>(points_per_axis - 1);
        }
        const double value = f(theta);
        // strict comparison with lexicographic sweep order: ties keep the
        // lexicographically smallest point
        if (value < best_value) {
            best_value = value;
            best = theta;
        }
        std::size_t d = dim;
        while (d > 0) {
            --d;
            if (++idx[d] < points_per_axis) break;
            idx[d] = 0;
            if (d == 0) return best;
        }
        if (dim == 0) return best;
    }
}

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    int evals = 0;
    bool converged = false;
};

void clip_to_box(std::vector<double>& x, const ThetaBox& box) {
    for (std::size_t d = 0; d < x.size(); ++d)
        x[d] = std::clamp(x[d], box.bounds[d][0], box.bounds[d][1]);
}

NmResult nelder_mead(const Objective& f, std::vector<double> x0, const ThetaBox& box,
                     int max_iter, double tol) {
    const std::size_t dim = x0.size();
    NmResult res;
    clip_to_box(x0, box);

    struct Vertex {
        std::vector<double> x;
        double fx;
    };
    std::vector<Vertex> simplex;
    auto eval = [&](std::vector<double> x) {
        clip_to_box(x, box);
        ++res.evals;
        return Vertex{x, f(x)};
    };
    simplex.push_back(eval(x0));
    for (std::size_t d = 0; d < dim; ++d) {
        auto x = x0;
        const double span = box.bounds[d][1] - box.bounds[d][0];
        double step = 0.05 * span;
        if (x[d] + step > box.bounds[d][1]) step = -step;
        x[d] += step;
        simplex.push_back(eval(x));
    }

    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& l, const Vertex& r) { return l.fx < r.fx; });
    };
    order();

    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        const double spread = simplex.back().fx - simplex.front().fx;
        if (spread <= tol * (std::abs(simplex.front().fx) + tol)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto combine = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (centroid[d] - simplex.back().x[d]);
            return x;
        };

        Vertex reflected = eval(combine(1.0));
        if (reflected.fx < simplex.front().fx) {
            Vertex expanded = eval(combine(2.0));
            simplex.back() = expanded.fx < reflected.fx ? expanded : reflected;
        } else if (reflected.fx < simplex[simplex.size() - 2].fx) {
            simplex.back() = reflected;
        } else {
            Vertex contracted = eval(combine(-0.5));
            if (contracted.fx < simplex.back().fx) {
                simplex.back() = contracted;
            } else {
                for (std::size_t v = 1; v < simplex.size(); ++v) {
                    for (std::size_t d = 0; d < dim; ++d)
                        simplex[v].x[d] =
                            simplex.front().x[d] + 0.5 * (simplex[v].x[d] - simplex.front().x[d]);
                    simplex[v] = eval(simplex[v].x);
                }
            }
        }
        order();
    }
    res.x = simplex.front().x;
    res.fx = simplex.front().fx;
    return res;
}

double gradient_norm(const Objective& f, std::span<const double> x, const ThetaBox& box) {
    double acc = 0.0;
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t d = 0; d < probe.size(); ++d) {
        const double h = 1e-6 * std::max(1.0, std::abs(probe[d]));
        const double lo = std::max(box.bounds[d][0], probe[d] - h);
        const double hi = std::min(box.bounds[d][1], probe[d] + h);
        const double keep = probe[d];
        probe[d] = hi;
        const double f_hi = f(probe);
        probe[d] = lo;
        const double f_lo = f(probe);
        probe[d] = keep;
        if (hi > lo) {
            const double g = (f_hi - f_lo) / (hi - lo);
            acc += g * g;
        }
    }
    return std::sqrt(acc);
}

bool on_boundary(std::span<const double> x, const ThetaBox& box) {
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double span = box.bounds[d][1] - box.bounds[d][0];
        if (std::abs(x[d] - box.bounds[d][0]) <= 1e-9 * span ||
            std::abs(x[d] - box.bounds[d][1]) <= 1e-9 * span)
            return true;
    }
    return false;
}

} // namespace

EstimateRecord estimate_linear_closed(std::span<const double> z, const WeightSpec& w,
                                      const ErrorModel& err, const InversionPlan& plan) {
    ContrastCache cache(z, RegressionFamily::Linear, w, err, plan);
    EstimateRecord rec;
    rec.tag = w.base == WeightBase::N ? EstimatorTag::DeconvN : EstimatorTag::DeconvSC;
    rec.family = RegressionFamily::Linear;
    rec.theta_hat = cache.closed_minimizer();
    rec.diagnostics["contrast"] = cache.value(rec.theta_hat);
    rec.diagnostics["closed_integrals"] = cache.used_closed_integrals() ? 1.0 : 0.0;
    rec.diagnostics["iterations"] = 0.0;
    return rec;
}

EstimateRecord estimate_cauchy_closed(std::span<const double> z, const WeightSpec& w,
                                      const ErrorModel& err, const InversionPlan& plan) {
    ContrastCache cache(z, RegressionFamily::Cauchy, w, err, plan);
    EstimateRecord rec;
    rec.tag = w.base == WeightBase::N ? EstimatorTag::DeconvN : EstimatorTag::DeconvSC;
    rec.family = RegressionFamily::Cauchy;
    rec.theta_hat = cache.closed_minimizer();
    rec.diagnostics["contrast"] = cache.value(rec.theta_hat);
    rec.diagnostics["closed_integrals"] = cache.used_closed_integrals() ? 1.0 : 0.0;
    rec.diagnostics["iterations"] = 0.0;
    return rec;
}

EstimateRecord estimate_argmin(std::span<const double> z, RegressionFamily family,
                               const ThetaBox& box, const WeightSpec& w, const ErrorModel& err,
                               const InversionPlan& plan, const KernelSpec& kernel) {
    const int dim = family == RegressionFamily::Linear ? 2 : 1;
    box.validate(dim);
    ContrastCache cache(z, family, w, err, plan, kernel);
    Objective f = [&cache](std::span<const double> theta) { return cache.value(theta); };

    const auto start = grid_scan(f, box, 21);
    const auto nm = nelder_mead(f, start, box, 500, 1e-10);

    EstimateRecord rec;
    rec.tag = kernel.is_identity()
                  ? (w.base == WeightBase::N ? EstimatorTag::DeconvN : EstimatorTag::DeconvSC)
                  : EstimatorTag::DeconvGeneral;
    rec.family = family;
    rec.theta_hat = nm.x;
    rec.diagnostics["contrast"] = nm.fx;
    rec.diagnostics["iterations"] = static_cast<double>(nm.iterations);
    rec.diagnostics["evals"] = static_cast<double>(nm.evals);
    rec.diagnostics["converged"] = nm.converged ? 1.0 : 0.0;
    rec.diagnostics["grad_norm"] = gradient_norm(f, nm.x, box);
    rec.diagnostics["on_boundary"] = on_boundary(nm.x, box) ? 1.0 : 0.0;
    rec.diagnostics["closed_integrals"] = cache.used_closed_integrals() ? 1.0 : 0.0;
    return rec;
}

EstimateRecord estimate_general(std::span<const double> z, RegressionFamily family,
                                const ThetaBox& box, const WeightSpec& w, const ErrorModel& err,
                                const KernelSpec& kernel, const InversionPlan& plan) {
    auto rec = estimate_argmin(z, family, box, w, err, plan, kernel);
    rec.tag = EstimatorTag::DeconvGeneral;
    return rec;
}

namespace {

// AR(1) least squares of lead on (1, lag); shared by the naive and oracle
// estimators.
std::vector<double> ar1_least_squares(std::span<const double> series) {
    const std::size_t n = series.size() - 1;
    double mean_lag = 0.0;
    double mean_lead = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean_lag += series[k];
        mean_lead += series[k + 1];
    }
    mean_lag /= static_cast<double>(n);
    mean_lead /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = series[k] - mean_lag;
        sxx += dx * dx;
        sxy += dx * (series[k + 1] - mean_lead);
    }
    if (sxx <= 1e-12 * static_cast<double>(n) * std::max(1.0, mean_lag * mean_lag))
        throw DegenerateDesignError("lagged series has (near) zero variance");
    const double a = sxy / sxx;
    return {a, mean_lead - a * mean_lag};
}

std::vector<double> cauchy_least_squares(std::span<const double> series) {
    const std::size_t n = series.size() - 1;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double g = 1.0 / (1.0 + series[k] * series[k]);
        num += series[k + 1] * g;
        den += g * g;
    }
    if (den <= 1e-300) throw DegenerateDesignError("Cauchy design sum vanished");
    return {num / den};
}

} // namespace

EstimateRecord estimate_naive(std::span<const double> z, RegressionFamily family) {
    require_series(z);
    EstimateRecord rec;
    rec.tag = EstimatorTag::Naive;
    rec.family = family;
    rec.theta_hat = family == RegressionFamily::Linear ? ar1_least_squares(z)
                                                       : cauchy_least_squares(z);
    return rec;
}

EstimateRecord estimate_oracle(std::span<const double> x, RegressionFamily family) {
    require_series(x);
    EstimateRecord rec;
    rec.tag = EstimatorTag::Oracle;
    rec.family = family;
    rec.theta_hat = family == RegressionFamily::Linear ? ar1_least_squares(x)
                                                       : cauchy_least_squares(x);
    return rec;
}

EstimateRecord estimate_arma(std::span<const double> z) {
    require_series(z);
    const std::size_t n_obs = z.size();
    const auto stats = series_stats(z);
    if (stats.var <= 1e-12 * std::max(1.0, stats.mean * stats.mean))
        throw DegenerateDesignError("observed series is (near) constant");

    auto autocov = [&](std::span<const double> s, std::size_t lag, double mean) {
        double acc = 0.0;
        for (std::size_t i = lag; i < s.size(); ++i)
            acc += (s[i] - mean) * (s[i - lag] - mean);
        return acc / static_cast<double>(s.size());
    };

    // Moment starting point: autocovariances of an ARMA(1,1) satisfy
    // gamma(2) = a gamma(1); the MA root solves beta/(1+beta^2) = r with r
    // read off the AR-filtered series.
    const double g1 = autocov(z, 1, stats.mean);
    const double g2 = autocov(z, 2, stats.mean);
    double a_init = std::abs(g1) > 1e-12 * stats.var ? g2 / g1 : 0.0;
    a_init = std::clamp(a_init, -0.95, 0.95);
    const double b_init = (1.0 - a_init) * stats.mean;

    std::vector<double> filtered(n_obs - 1);
    for (std::size_t i = 1; i < n_obs; ++i)
        filtered[i - 1] = z[i] - a_init * z[i - 1] - b_init;
    const auto fstats = series_stats(filtered);
    double r = 0.0;
    if (fstats.var > 0.0) r = -autocov(filtered, 1, fstats.mean) / fstats.var;
    r = std::clamp(r, -0.499, 0.499);
    const double beta_init =
        std::abs(r) < 1e-12 ? 0.0 : (1.0 - std::sqrt(1.0 - 4.0 * r * r)) / (2.0 * r);

    const double sd = std::sqrt(stats.var);
    ThetaBox box{{{-0.99, 0.99},
                  {stats.mean - 10.0 * (sd + 1.0), stats.mean + 10.0 * (sd + 1.0)},
                  {-0.99, 0.99}}};

    Objective css = [&](std::span<const double> p) {
        const double a = p[0];
        const double b = p[1];
        const double beta = p[2];
        double eta = 0.0;
        double acc = 0.0;
        for (std::size_t i = 1; i < n_obs; ++i) {
            eta = z[i] - a * z[i - 1] - b + beta * eta;
            acc += eta * eta;
        }
        return acc;
    };

    auto fit = nelder_mead(css, {a_init, b_init, beta_init}, box, 800, 1e-12);
    if (!fit.converged) {
        auto retry = nelder_mead(css, {0.9 * a_init, b_init, 0.0}, box, 800, 1e-12);
        if (retry.fx < fit.fx) fit = retry;
    }

    EstimateRecord rec;
    rec.tag = EstimatorTag::Arma;
    rec.family = RegressionFamily::Linear;
    rec.theta_hat = {fit.x[0], fit.x[1]};
    rec.diagnostics["beta"] = fit.x[2];
    rec.diagnostics["css"] = fit.fx;
    rec.diagnostics["iterations"] = static_cast<double>(fit.iterations);
    rec.diagnostics["converged"] = fit.converged ? 1.0 : 0.0;
    rec.diagnostics["weak_identification"] = std::abs(fit.x[0] - fit.x[2]) < 0.05 ? 1.0 : 0.0;
    return rec;
}

} // namespace deconvar
