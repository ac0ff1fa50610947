#pragma once

#include <memory>

#include "moderr/forward_model.hpp"

namespace moderr {

/// 1D inverse source problem -p'' = u on (0,1), p = 0 at the boundary.
/// The accurate operator solves on the fine grid (2^fine_level - 1 interior
/// points), the approximate one on 2^coarse_level - 1 points. The source is
/// represented on a fixed parameter grid (level parameter_level, independent
/// of the solver grids), moved to each solver grid by linear interpolation:
/// prolongation when the solver grid is finer, exact nodal sampling when it
/// is coarser (the grids nest).
struct Poisson1DConfig {
    int fine_level = 10;
    int coarse_level = 6;      // n in [3, 9]
    int parameter_level = 10;  // parameter representation grid (fixed across n sweeps)
    int num_obs = 15;          // observation points q_j = j/16
    double noise_var = 1e-8;   // Gamma = noise_var * I

    int parameter_grid_level() const { return parameter_level; }
    void validate() const;
};

/// Dirichlet finite-difference solve of -p'' = source at the given level;
/// source and solution live on the 2^level - 1 interior nodes.
Vector poisson1d_solve(int level, const Vector& source);

/// Piecewise-linear prolongation between nested interior-node grids.
/// Values extend with u(0) = 0 on the left and constant slope 0 on the right
/// (the prior's boundary behavior).
Vector poisson1d_prolong(int from_level, int to_level, const Vector& values);

/// Grid transfer in either direction: prolongation upward, nodal sampling
/// downward (interpolation is exact at the shared nodes).
Vector poisson1d_transfer(int from_level, int to_level, const Vector& values);

/// Linear forward pair with assembled observation matrices.
class Poisson1DPair final : public ForwardModelPair {
public:
    explicit Poisson1DPair(const Poisson1DConfig& config);

    Eigen::Index parameter_dim() const override { return a_.cols(); }
    Eigen::Index data_dim() const override { return a_.rows(); }
    std::string label() const override { return "poisson1d"; }
    double cost_ratio() const override;
    std::optional<AffineMap> approximate_affine() const override {
        return AffineMap{a_, Vector::Zero(a_.rows())};
    }

    const Matrix& accurate_matrix() const { return a_star_; }
    const Matrix& approximate_matrix() const { return a_; }
    const Poisson1DConfig& config() const { return config_; }

    /// Spectral-norm gap ||A_n - A*||_2.
    double operator_gap() const;

protected:
    Vector eval_accurate(const Vector& u) const override { return a_star_ * u; }
    Vector eval_approximate(const Vector& u) const override { return a_ * u; }

private:
    Poisson1DConfig config_;
    Matrix a_star_, a_;
};

std::unique_ptr<Poisson1DPair> poisson1d_pair(const Poisson1DConfig& config);

/// Brownian-motion prior on the 2^level - 1 interior nodes: precision is the
/// grid Laplacian with a pinned left end and a mirrored (zero-slope) right
/// end, scaled by 1/h. The resulting covariance is exactly min(x_i, x_j).
GaussianMeasure brownian_prior(int level);
SpMat brownian_precision(int level);

}  // namespace moderr
