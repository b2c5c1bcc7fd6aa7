#pragma once

#include <cstddef>
#include <vector>

#include "deconvar/rng.hpp"

namespace deconvar {

enum class ErrorKind { Laplace, Gaussian };

/// Law of the additive observation error.  Both supported laws are symmetric
/// around zero, parametrised by their standard deviation, and have a real,
/// even, strictly positive characteristic function, which is what the
/// deconvolution step divides by.
struct ErrorModel {
    ErrorKind kind = ErrorKind::Laplace;
    double sigma_eps = 1.0;

    static ErrorModel laplace(double sigma_eps);
    static ErrorModel gaussian(double sigma_eps);

    double density(double x) const;
    double cdf(double x) const;
    /// Characteristic function E[exp(i t eps)].  Real-valued by symmetry.
    double cf(double t) const;
    double sample(RngStream& rng) const;
    std::vector<double> sample(RngStream& rng, std::size_t n) const;
};

enum class InnovationKind { TwoPoint, Gaussian };

/// Law of the (unknown to the estimator) regression innovation.
/// TwoPoint(c) puts mass 1/2 on each of -c and +c.
struct InnovationModel {
    InnovationKind kind = InnovationKind::TwoPoint;
    double param = 0.25; // c for TwoPoint, standard deviation for Gaussian

    static InnovationModel two_point(double c);
    static InnovationModel gaussian(double sigma_xi);

    double variance() const;
    double sample(RngStream& rng) const;
    std::vector<double> sample(RngStream& rng, std::size_t n) const;
};

} // namespace deconvar
