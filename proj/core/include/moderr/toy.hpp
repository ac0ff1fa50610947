#pragma once

#include <functional>

#include "moderr/particles.hpp"

namespace moderr {

/// Density values on a uniform 1D grid; the reference side of the
/// bounded-noise convergence rigs.
struct GridDensity {
    Vector nodes;
    Vector pdf;  // normalized so that sum(pdf) * spacing == 1
    double spacing = 0.0;

    double integrate(const std::function<double(double)>& phi) const;
    double mean() const;
};

GridDensity uniform_grid(double lo, double hi, int n);
GridDensity gaussian_on_grid(double mean, double variance, const GridDensity& grid);

/// One exact update of the density iteration by quadrature:
///   next(u) proportional to prior(u) * int pi_noise(b - f(u) - M(z)) current(z) dz.
GridDensity lp_density_step(const GridDensity& prior, const GridDensity& current,
                            const BoundedNoiseDensity& noise,
                            const std::function<double(double)>& f,
                            const std::function<double(double)>& model_error, double b);

DiscreteMeasure to_discrete_measure(const GridDensity& density);

/// Total variation distance between a weighted 1D sample and a grid density,
/// binned on [lo, hi] with the given number of bins.
double histogram_tv_distance(const ParticleEnsemble& ensemble, const GridDensity& density,
                             double lo, double hi, int bins);

/// Scalar accurate/approximate pair F(u) = a_star u, f(u) = a u.
struct ScalarLinearToy {
    double a_star = 1.2;
    double a = 1.0;
    double prior_mean = 0.0;
    double prior_var = 1.0;
    double noise_var = 0.25;
    double data = 1.0;
    double kappa = 0.3;  // clamp level for the bounded-noise rigs

    double model_error(double u) const { return (a_star - a) * u; }
    GaussianMeasure prior() const;
    Matrix gamma() const;
    BoundedNoiseDensity clamped_noise() const;
};

}  // namespace moderr
