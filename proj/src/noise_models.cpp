#include "deconvar/noise_models.hpp"

#include <cmath>
#include <numbers>

#include "deconvar/errors.hpp"

namespace deconvar {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(name) + " must be a positive finite real");
}

} // namespace

ErrorModel ErrorModel::laplace(double sigma_eps) {
    require_positive(sigma_eps, "sigma_eps");
    return ErrorModel{ErrorKind::Laplace, sigma_eps};
}

ErrorModel ErrorModel::gaussian(double sigma_eps) {
    require_positive(sigma_eps, "sigma_eps");
    return ErrorModel{ErrorKind::Gaussian, sigma_eps};
}

double ErrorModel::density(double x) const {
    const double s = sigma_eps;
    if (kind == ErrorKind::Laplace)
        return std::exp(-kSqrt2 * std::abs(x) / s) / (s * kSqrt2);
    const double u = x / s;
    return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double ErrorModel::cdf(double x) const {
    const double s = sigma_eps;
    if (kind == ErrorKind::Laplace) {
        if (x < 0.0) return 0.5 * std::exp(kSqrt2 * x / s);
        return 1.0 - 0.5 * std::exp(-kSqrt2 * x / s);
    }
    return 0.5 * std::erfc(-x / (s * kSqrt2));
}

double ErrorModel::cf(double t) const {
    const double s2t2 = sigma_eps * sigma_eps * t * t;
    if (kind == ErrorKind::Laplace)
        return 1.0 / (1.0 + 0.5 * s2t2);
    return std::exp(-0.5 * s2t2);
}

double ErrorModel::sample(RngStream& rng) const {
    if (kind == ErrorKind::Laplace) {
        // Inverse CDF: map u uniformly from (0,1) through the two tails.
        const double u = rng.next_uniform01();
        const double scale = sigma_eps / kSqrt2;
        if (u < 0.5) return scale * std::log(2.0 * u + 1e-300);
        return -scale * std::log(2.0 * (1.0 - u) + 1e-300);
    }
    return sigma_eps * rng.next_standard_normal();
}

std::vector<double> ErrorModel::sample(RngStream& rng, std::size_t n) const {
    std::vector<double> out(n);
    for (auto& v : out) v = sample(rng);
    return out;
}

InnovationModel InnovationModel::two_point(double c) {
    require_positive(c, "two-point innovation level");
    return InnovationModel{InnovationKind::TwoPoint, c};
}

InnovationModel InnovationModel::gaussian(double sigma_xi) {
    require_positive(sigma_xi, "sigma_xi");
    return InnovationModel{InnovationKind::Gaussian, sigma_xi};
}

double InnovationModel::variance() const {
    return param * param;
}

double InnovationModel::sample(RngStream& rng) const {
    if (kind == InnovationKind::TwoPoint)
        return rng.next_bit() ? param : -param;
    return param * rng.next_standard_normal();
}

std::vector<double> InnovationModel::sample(RngStream& rng, std::size_t n) const {
    std::vector<double> out(n);
    for (auto& v : out) v = sample(rng);
    return out;
}

} // namespace deconvar
