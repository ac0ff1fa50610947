#include "moderr/priors.hpp"

#include <vector>

#include "moderr/poisson1d.hpp"

namespace moderr {

SpMat grid_laplacian_5pt(int nx, int ny, double h) {
    if (nx < 1 || ny < 1) throw ConfigError("grid_laplacian_5pt: empty grid");
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    const double w = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * n);
    auto at = [nx](int i, int j) { return i + static_cast<Eigen::Index>(j) * nx; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Eigen::Index c = at(i, j);
            int neighbors = 0;
            if (i > 0) { entries.emplace_back(c, at(i - 1, j), w); ++neighbors; }
            if (i + 1 < nx) { entries.emplace_back(c, at(i + 1, j), w); ++neighbors; }
            if (j > 0) { entries.emplace_back(c, at(i, j - 1), w); ++neighbors; }
            if (j + 1 < ny) { entries.emplace_back(c, at(i, j + 1), w); ++neighbors; }
            entries.emplace_back(c, c, -neighbors * w);
        }
    }
    SpMat l(n, n);
    l.setFromTriplets(entries.begin(), entries.end());
    return l;
}

SpMat whittle_matern_operator(double lambda, const SpMat& laplacian) {
    if (!(lambda > 0.0)) throw ConfigError("whittle-matern lambda must be positive");
    SpMat identity(laplacian.rows(), laplacian.cols());
    identity.setIdentity();
    SpMat w = identity - (lambda * lambda) * laplacian;
    w.makeCompressed();
    return w;
}

SpMat whittle_matern_precision(double lambda, double zeta, const SpMat& laplacian) {
    if (!(zeta > 0.0)) throw ConfigError("whittle-matern zeta must be positive");
    const SpMat w = whittle_matern_operator(lambda, laplacian);
    const double s = zeta / lambda;
    SpMat precision = (s * s) * (w * w).pruned();
    precision.makeCompressed();
    return precision;
}

GaussianMeasure whittle_matern_prior(double lambda, double zeta, const SpMat& laplacian) {
    if (laplacian.rows() > 4096)
        throw NumericalError("whittle_matern_prior: dense covariance limited to d <= 4096; "
                             "use WhitenedGaussianPrior");
    WhitenedGaussianPrior prior(lambda, zeta, laplacian);
    return prior.dense_measure();
}

PriorSpec whittle_matern_eit_preset() {
    PriorSpec spec;
    spec.kind = PriorSpec::Kind::WhittleMatern;
    spec.lambda = 0.2;
    spec.zeta = 1.0 / 15.0;
    return spec;
}

WhitenedGaussianPrior::WhitenedGaussianPrior(double lambda, double zeta, const SpMat& laplacian,
                                             double white_noise_scale)
    : scale_(lambda / zeta * white_noise_scale) {
    if (!(lambda > 0.0) || !(zeta > 0.0) || !(white_noise_scale > 0.0))
        throw ConfigError("whittle-matern parameters must be positive");
    const SpMat w = whittle_matern_operator(lambda, laplacian);
    whitening_llt_.compute(w);
    if (whitening_llt_.info() != Eigen::Success)
        throw NumericalError("whittle-matern operator -lambda^2 L + I is not SPD");
    const double s2 = white_noise_scale * white_noise_scale;
    precision_ = (1.0 / s2) * whittle_matern_precision(lambda, zeta, laplacian);
    precision_.makeCompressed();
}

Vector WhitenedGaussianPrior::draw(SubStream& stream) const {
    const Vector w = stream.normal_vector(dim());
    return scale_ * whitening_llt_.solve(w);
}

Matrix WhitenedGaussianPrior::covariance_apply(const Matrix& x) const {
    return (scale_ * scale_) * whitening_llt_.solve(whitening_llt_.solve(x));
}

GaussianMeasure WhitenedGaussianPrior::dense_measure(int limit) const {
    if (dim() > limit)
        throw NumericalError("WhitenedGaussianPrior: dense covariance above the storage limit");
    GaussianMeasure out;
    out.mean = Vector::Zero(dim());
    out.covariance = covariance_apply(Matrix::Identity(dim(), dim()));
    out.covariance = ((out.covariance + out.covariance.transpose()) * 0.5).eval();
    return out;
}

GaussianPriorOps make_prior_ops(const GaussianMeasure& measure) {
    GaussianPriorOps ops;
    ops.mean = measure.mean;
    Eigen::LLT<Matrix> llt(measure.covariance);
    if (llt.info() != Eigen::Success)
        throw NumericalError("make_prior_ops: covariance is not positive definite");
    const Matrix b0 = llt.solve(Matrix::Identity(measure.dim(), measure.dim()));
    ops.precision = ((b0 + b0.transpose()) * 0.5).sparseView();
    auto sampler = std::make_shared<GaussianSampler>(measure);
    ops.draw = [sampler](SubStream& s) { return sampler->draw(s); };
    const Matrix cov = measure.covariance;
    ops.covariance_apply = [cov](const Matrix& x) { return cov * x; };
    ops.dense_measure = [measure]() { return measure; };
    return ops;
}

GaussianPriorOps make_prior_ops(std::shared_ptr<const WhitenedGaussianPrior> prior) {
    GaussianPriorOps ops;
    ops.mean = Vector::Zero(prior->dim());
    ops.precision = prior->precision();
    ops.draw = [prior](SubStream& s) { return prior->draw(s); };
    ops.covariance_apply = [prior](const Matrix& x) { return prior->covariance_apply(x); };
    ops.dense_measure = [prior]() { return prior->dense_measure(); };
    return ops;
}

GaussianPriorOps make_brownian_prior_ops(int level) {
    GaussianPriorOps ops;
    const GaussianMeasure measure = brownian_prior(level);
    ops.mean = measure.mean;
    ops.precision = brownian_precision(level);
    auto sampler = std::make_shared<GaussianSampler>(measure);
    ops.draw = [sampler](SubStream& s) { return sampler->draw(s); };
    const Matrix cov = measure.covariance;
    ops.covariance_apply = [cov](const Matrix& x) { return cov * x; };
    ops.dense_measure = [measure]() { return measure; };
    return ops;
}

}  // namespace moderr
