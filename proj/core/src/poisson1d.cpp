#include "moderr/poisson1d.hpp"

#include <cmath>
#include <vector>

namespace moderr {

namespace {

int points_at(int level) { return (1 << level) - 1; }

/// Thomas solve of the Dirichlet tridiagonal system (-1, 2, -1)/h^2 p = u.
Vector solve_dirichlet_tridiag(int level, const Vector& u) {
    const int n = points_at(level);
    const double h = 1.0 / static_cast<double>(1 << level);
    const double h2 = h * h;
    std::vector<double> c(n), d(n);
    c[0] = -1.0 / 2.0;
    d[0] = h2 * u[0] / 2.0;
    for (int i = 1; i < n; ++i) {
        const double m = 2.0 + c[i - 1];
        c[i] = -1.0 / m;
        d[i] = (h2 * u[i] + d[i - 1]) / m;
    }
    Vector p(n);
    p[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) p[i] = d[i] - c[i] * p[i + 1];
    return p;
}

/// Linear interpolation of interior-node values at x in [0,1], with value 0
/// at x = 0 and a flat extension at x = 1.
double interpolate_interior(const Vector& values, int level, double x) {
    const int n = points_at(level);
    const double h = 1.0 / static_cast<double>(1 << level);
    const double s = x / h;  // node index scale; node i sits at x = i h
    if (s <= 0.0) return 0.0;
    if (s >= n) return values[n - 1];  // flat right extension (zero-slope end)
    const int i = static_cast<int>(s);
    const double t = s - i;
    const double left = i == 0 ? 0.0 : values[i - 1];
    const double right = values[i == n ? n - 1 : i];
    return left + t * (right - left);
}

}  // namespace

void Poisson1DConfig::validate() const {
    if (coarse_level < 3 || coarse_level > 9)
        throw ConfigError("poisson1d coarse_level must lie in [3, 9]");
    if (coarse_level >= fine_level)
        throw ConfigError("poisson1d coarse_level must be below fine_level");
    if (parameter_level < 2 || parameter_level > fine_level)
        throw ConfigError("poisson1d parameter_level must lie in [2, fine_level]");
    if (num_obs < 1 || num_obs > 15)
        throw ConfigError("poisson1d observation count must lie in [1, 15]");
    if (!(noise_var > 0.0)) throw ConfigError("poisson1d noise_var must be positive");
}

Vector poisson1d_solve(int level, const Vector& source) {
    if (source.size() != points_at(level))
        throw DimensionError("poisson1d_solve: source does not match the grid");
    return solve_dirichlet_tridiag(level, source);
}

Vector poisson1d_prolong(int from_level, int to_level, const Vector& values) {
    if (values.size() != points_at(from_level))
        throw DimensionError("poisson1d_prolong: values do not match the source grid");
    if (to_level == from_level) return values;
    if (to_level < from_level)
        throw DimensionError("poisson1d_prolong: target grid must be at least as fine");
    const int n_to = points_at(to_level);
    const double h_to = 1.0 / static_cast<double>(1 << to_level);
    Vector out(n_to);
    for (int i = 0; i < n_to; ++i)
        out[i] = interpolate_interior(values, from_level, (i + 1) * h_to);
    return out;
}

Vector poisson1d_transfer(int from_level, int to_level, const Vector& values) {
    if (to_level >= from_level) return poisson1d_prolong(from_level, to_level, values);
    if (values.size() != points_at(from_level))
        throw DimensionError("poisson1d_transfer: values do not match the source grid");
    // Downward: the coarse nodes are a subset of the fine nodes, so linear
    // interpolation reduces to sampling.
    const int gap = 1 << (from_level - to_level);
    const int n_to = points_at(to_level);
    Vector out(n_to);
    for (int i = 0; i < n_to; ++i) out[i] = values[(i + 1) * gap - 1];
    return out;
}

Poisson1DPair::Poisson1DPair(const Poisson1DConfig& config) : config_(config) {
    config_.validate();
    const int param_level = config_.parameter_grid_level();
    const int d = points_at(param_level);
    const int j_obs = config_.num_obs;

    auto assemble = [&](int solver_level) {
        Matrix a(j_obs, d);
        Vector e = Vector::Zero(d);
        for (int k = 0; k < d; ++k) {
            e[k] = 1.0;
            const Vector source = poisson1d_transfer(param_level, solver_level, e);
            const Vector p = poisson1d_solve(solver_level, source);
            for (int j = 0; j < j_obs; ++j)
                a(j, k) = interpolate_interior(p, solver_level, (j + 1) / 16.0);
            e[k] = 0.0;
        }
        return a;
    };

    a_star_ = assemble(config_.fine_level);
    a_ = assemble(config_.coarse_level);
}

double Poisson1DPair::cost_ratio() const {
    return std::pow(2.0, config_.fine_level - config_.coarse_level);
}

double Poisson1DPair::operator_gap() const {
    return (a_ - a_star_).jacobiSvd().singularValues()(0);
}

std::unique_ptr<Poisson1DPair> poisson1d_pair(const Poisson1DConfig& config) {
    return std::make_unique<Poisson1DPair>(config);
}

SpMat brownian_precision(int level) {
    if (level < 2) throw ConfigError("brownian_prior level must be >= 2");
    const int n = points_at(level);
    const double h = 1.0 / static_cast<double>(1 << level);
    SpMat t(n, n);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
        // Mirrored Neumann end: last diagonal entry 1 instead of 2, which
        // keeps the precision symmetric and makes its inverse exactly the
        // Brownian kernel min(x_i, x_j)/h ... times h below.
        entries.emplace_back(i, i, (i == n - 1 ? 1.0 : 2.0) / h);
        if (i > 0) entries.emplace_back(i, i - 1, -1.0 / h);
        if (i < n - 1) entries.emplace_back(i, i + 1, -1.0 / h);
    }
    t.setFromTriplets(entries.begin(), entries.end());
    return t;
}

GaussianMeasure brownian_prior(int level) {
    if (level < 2) throw ConfigError("brownian_prior level must be >= 2");
    const int n = points_at(level);
    const double h = 1.0 / static_cast<double>(1 << level);
    GaussianMeasure prior;
    prior.mean = Vector::Zero(n);
    prior.covariance.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            prior.covariance(i, j) = h * static_cast<double>(std::min(i, j) + 1);
    return prior;
}

}  // namespace moderr
