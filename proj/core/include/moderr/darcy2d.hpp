#pragma once

#include <memory>

#include "moderr/forward_model.hpp"

namespace moderr {

/// Steady-state Darcy flow -div(e^u grad p) = g on (0,1)^2 with p = 0 on the
/// boundary. Cell-centered finite volumes on cells x cells uniform cells;
/// the coarse grid tiles the fine grid (fine_cells a multiple of
/// coarse_cells) so restriction by cell averaging is well defined. The
/// unknown log-permeability lives on the coarse cells.
struct Darcy2DConfig {
    int fine_cells = 128;
    int coarse_cells = 64;
    double source_amplitude = 100.0;  // g = amp sin(pi x1) sin(pi x2)
    double obs_width = 0.02;          // mollifier width epsilon
    int obs_per_side = 5;             // q on the uniform obs x obs interior grid
    int noise_index = 2;              // Gamma = 10^{-index-1} I
    /// Mollifier prefactor: normalized 1/(2 pi eps^2) (observations approach
    /// point values of p, matching the stated noise magnitudes) or the
    /// unnormalized 1/(2 pi eps) variant (observations carry a factor eps).
    bool normalized_mollifier = true;

    double noise_variance() const;
    Eigen::Index parameter_dim() const {
        return static_cast<Eigen::Index>(coarse_cells) * coarse_cells;
    }
    Eigen::Index observation_dim() const {
        return static_cast<Eigen::Index>(obs_per_side) * obs_per_side;
    }
    void validate() const;
};

/// One solver grid: assembly, factorization, mollified observations, and the
/// adjoint linearization. PDE solves (one per right-hand side) are counted.
class DarcyGrid {
public:
    DarcyGrid(int cells, const Darcy2DConfig& config);

    int cells() const { return cells_; }
    double spacing() const { return 1.0 / cells_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(cells_) * cells_; }

    /// Pressure field for log-permeability u (both on this grid's cells).
    Vector solve(const Vector& u) const;

    /// Mollified point observations O_j(p) by midpoint quadrature over cells,
    /// with the literal 1/(2 pi eps) prefactor.
    Vector observe(const Vector& p) const;

    /// Forward map F(u) = observe(solve(u)) on this grid.
    Vector forward(const Vector& u) const { return observe(solve(u)); }

    /// Baseline F(u0) and the Jacobian DF(u0), built from one forward solve
    /// and one adjoint solve per observation functional (J + 1 PDE solves).
    std::pair<Vector, Matrix> linearize(const Vector& u0) const;

    std::int64_t solve_count() const { return solve_count_.load(); }
    void reset_solve_count() const { solve_count_ = 0; }

    /// Source vector h^2 g(x_c) used as the right-hand side.
    const Vector& source() const { return rhs_; }
    /// Observation quadrature weights (one row per observation point).
    const Matrix& observation_weights() const { return obs_weights_; }

    Vector cell_centers_x() const;
    Vector cell_centers_y() const;

private:
    SpMat assemble(const Vector& u) const;

    int cells_;
    double eps_;
    Vector rhs_;          // h^2 g at cell centers
    Matrix obs_weights_;  // J x cells^2
    mutable std::atomic<std::int64_t> solve_count_{0};
};

/// Free-function forms of the grid operations.
Vector darcy2d_solve(const Vector& u, const DarcyGrid& grid);
Vector darcy2d_observe(const Vector& p, const DarcyGrid& grid);
std::pair<Vector, Matrix> darcy2d_linearize(const Vector& u0, const DarcyGrid& grid);

/// Bilinear prolongation between cell-center grids (clamped at the edges)
/// and the adjoint-free restriction by cell averaging.
Vector darcy2d_prolong(int coarse_cells, int fine_cells, const Vector& coarse_values);
Vector darcy2d_restrict(int fine_cells, int coarse_cells, const Vector& fine_values);

/// Accurate model: nonlinear solve + observe on the fine grid of the
/// prolonged field. Approximate model: coarse-grid linearization at u0 = 0,
/// f(u) = F_c(0) + DF_c(0) u.
class Darcy2DPair final : public ForwardModelPair {
public:
    explicit Darcy2DPair(const Darcy2DConfig& config);

    Eigen::Index parameter_dim() const override { return config_.parameter_dim(); }
    Eigen::Index data_dim() const override { return config_.observation_dim(); }
    std::string label() const override { return "darcy2d"; }
    double cost_ratio() const override;
    std::optional<AffineMap> approximate_affine() const override {
        return AffineMap{jacobian_, baseline_};
    }

    const Darcy2DConfig& config() const { return config_; }
    const DarcyGrid& fine_grid() const { return *fine_; }
    const DarcyGrid& coarse_grid() const { return *coarse_; }
    const Matrix& jacobian() const { return jacobian_; }
    const Vector& baseline() const { return baseline_; }

protected:
    Vector eval_accurate(const Vector& u) const override;
    Vector eval_approximate(const Vector& u) const override;

private:
    Darcy2DConfig config_;
    std::unique_ptr<DarcyGrid> fine_, coarse_;
    Vector baseline_;  // F_c(0)
    Matrix jacobian_;  // DF_c(0)
};

std::unique_ptr<Darcy2DPair> darcy2d_pair(const Darcy2DConfig& config);

/// Analytic truth preset: sum of two unnormalized Gaussian bumps sampled at
/// the coarse cell centers. The default geometry is a plotting choice, not a
/// calibrated quantity; override through the config file.
struct TwoBumpTruth {
    double x1 = 0.35, y1 = 0.35, width1 = 0.12, amplitude1 = 3.0;
    double x2 = 0.70, y2 = 0.65, width2 = 0.10, amplitude2 = 2.4;
};
Vector darcy_two_bump_truth(int cells, const TwoBumpTruth& bumps = {});

}  // namespace moderr
