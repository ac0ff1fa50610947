#include "moderr/toy.hpp"

#include <cmath>

namespace moderr {

double GridDensity::integrate(const std::function<double(double)>& phi) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) acc += pdf[i] * phi(nodes[i]);
    return acc * spacing;
}

double GridDensity::mean() const {
    return integrate([](double u) { return u; });
}

GridDensity uniform_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw ConfigError("uniform_grid: invalid range");
    GridDensity grid;
    grid.nodes = Vector::LinSpaced(n, lo, hi);
    grid.pdf = Vector::Zero(n);
    grid.spacing = (hi - lo) / (n - 1);
    return grid;
}

GridDensity gaussian_on_grid(double mean, double variance, const GridDensity& grid) {
    GridDensity out = grid;
    out.pdf = (-(out.nodes.array() - mean).square() / (2.0 * variance)).exp();
    out.pdf /= out.pdf.sum() * out.spacing;
    return out;
}

GridDensity lp_density_step(const GridDensity& prior, const GridDensity& current,
                            const BoundedNoiseDensity& noise,
                            const std::function<double(double)>& f,
                            const std::function<double(double)>& model_error, double b) {
    if (prior.nodes.size() != current.nodes.size())
        throw DimensionError("lp_density_step: prior and current grids differ");
    const Eigen::Index n = prior.nodes.size();

    Vector errors(n);
    for (Eigen::Index k = 0; k < n; ++k) errors[k] = model_error(current.nodes[k]);

    GridDensity out = prior;
    Matrix residual(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        residual.row(0) = (b - f(prior.nodes[i])) - errors.transpose().array();
        const Vector dens = noise.log_density_batch(residual).array().exp();
        out.pdf[i] = prior.pdf[i] * dens.dot(current.pdf) * current.spacing;
    }
    const double mass = out.pdf.sum() * out.spacing;
    if (!(mass > 0.0)) throw NumericalError("lp_density_step: zero posterior mass");
    out.pdf /= mass;
    return out;
}

DiscreteMeasure to_discrete_measure(const GridDensity& density) {
    DiscreteMeasure out;
    out.points.resize(1, density.nodes.size());
    out.points.row(0) = density.nodes.transpose();
    out.weights = density.pdf * density.spacing;
    out.weights /= out.weights.sum();
    return out;
}

double histogram_tv_distance(const ParticleEnsemble& ensemble, const GridDensity& density,
                             double lo, double hi, int bins) {
    if (ensemble.dim() != 1) throw DimensionError("histogram_tv_distance expects 1D particles");
    const double width = (hi - lo) / bins;
    Vector sample_mass = Vector::Zero(bins + 1);  // last bin collects outliers
    for (Eigen::Index j = 0; j < ensemble.size(); ++j) {
        const double u = ensemble.particles(0, j);
        if (u < lo || u >= hi) {
            sample_mass[bins] += ensemble.weights[j];
            continue;
        }
        sample_mass[static_cast<int>((u - lo) / width)] += ensemble.weights[j];
    }
    Vector grid_mass = Vector::Zero(bins + 1);
    for (Eigen::Index i = 0; i < density.nodes.size(); ++i) {
        const double u = density.nodes[i];
        const double mass = density.pdf[i] * density.spacing;
        if (u < lo || u >= hi)
            grid_mass[bins] += mass;
        else
            grid_mass[static_cast<int>((u - lo) / width)] += mass;
    }
    grid_mass /= grid_mass.sum();
    return 0.5 * (sample_mass - grid_mass).cwiseAbs().sum();
}

GaussianMeasure ScalarLinearToy::prior() const {
    GaussianMeasure g;
    g.mean = Vector::Constant(1, prior_mean);
    g.covariance = Matrix::Constant(1, 1, prior_var);
    return g;
}

Matrix ScalarLinearToy::gamma() const { return Matrix::Constant(1, 1, noise_var); }

BoundedNoiseDensity ScalarLinearToy::clamped_noise() const {
    return BoundedNoiseDensity::clamped(gamma(), kappa);
}

}  // namespace moderr
