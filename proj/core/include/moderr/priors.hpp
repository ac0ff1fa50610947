#pragma once

#include <functional>
#include <memory>

#include <Eigen/SparseCholesky>

#include "moderr/particles.hpp"

namespace moderr {

/// Prior families used by the experiments.
struct PriorSpec {
    enum class Kind { BrownianMotion, WhittleMatern };
    Kind kind = Kind::WhittleMatern;
    // Whittle-Matern parameters
    double lambda = 0.1;  // correlation length
    double zeta = 1.0;    // amplitude scaling
    // Brownian-motion parameter grid level
    int level = 6;
};

/// 5-point grid Laplacian with zero-flux (graph) boundary rows, scaled by
/// 1/h^2. Nonpositive spectrum, so -lambda^2 L + I is SPD.
SpMat grid_laplacian_5pt(int nx, int ny, double h);

/// Whittle-Matern whitening operator W = -lambda^2 L_g + I.
SpMat whittle_matern_operator(double lambda, const SpMat& laplacian);

/// Prior precision (zeta/lambda)^2 W^2 (sparse).
SpMat whittle_matern_precision(double lambda, double zeta, const SpMat& laplacian);

/// Dense covariance C0 = (lambda/zeta)^2 W^{-2}; refuses d > 4096 (sampling
/// goes through the whitening solve instead at larger sizes).
GaussianMeasure whittle_matern_prior(double lambda, double zeta, const SpMat& laplacian);

/// Named parameterization from the EIT setup (lambda = 0.2, zeta = 1/15).
PriorSpec whittle_matern_eit_preset();

/// Zero-mean Gaussian prior sampled through the whitening solve
/// W u = (lambda/zeta) s w, w ~ N(0, I); no dense covariance is formed.
/// white_noise_scale s defaults to 1 (the literal nodal convention). Grid
/// experiments pass s = 1/h so the driving noise has unit intensity as a
/// distribution and the field variance is mesh-independent.
class WhitenedGaussianPrior {
public:
    WhitenedGaussianPrior(double lambda, double zeta, const SpMat& laplacian,
                          double white_noise_scale = 1.0);

    Vector draw(SubStream& stream) const;
    Eigen::Index dim() const { return precision_.rows(); }
    const SpMat& precision() const { return precision_; }
    /// C0 * X through two sparse solves.
    Matrix covariance_apply(const Matrix& x) const;
    GaussianMeasure dense_measure(int limit = 4096) const;

private:
    double scale_;  // (lambda / zeta) * white_noise_scale
    SpMat precision_;
    Eigen::SimplicialLLT<SpMat> whitening_llt_;  // factor of W
};

/// Uniform handle over the prior representations the experiment drivers need:
/// a draw callback, the sparse precision, and optional dense materialization.
struct GaussianPriorOps {
    Vector mean;
    SpMat precision;
    PriorDraw draw;
    std::function<Matrix(const Matrix&)> covariance_apply;
    std::function<GaussianMeasure()> dense_measure;
};

GaussianPriorOps make_prior_ops(const GaussianMeasure& measure);
GaussianPriorOps make_prior_ops(std::shared_ptr<const WhitenedGaussianPrior> prior);
/// Brownian-motion prior ops on the 1D parameter grid (exact min-kernel
/// covariance, tridiagonal precision).
GaussianPriorOps make_brownian_prior_ops(int level);

}  // namespace moderr
