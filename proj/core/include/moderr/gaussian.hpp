#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "moderr/errors.hpp"

namespace moderr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Gaussian law N(mean, covariance). Used for the prior, every iterated
/// posterior, and the model-error law.
struct GaussianMeasure {
    Vector mean;
    Matrix covariance;

    GaussianMeasure() = default;
    GaussianMeasure(Vector m, Matrix c) : mean(std::move(m)), covariance(std::move(c)) {}

    Eigen::Index dim() const { return mean.size(); }

    /// Throws unless covariance is square, matches the mean, is symmetric to
    /// 1e-12 relative and PSD to -1e-10 * lambda_max relative slack.
    void validate() const;
};

/// Linear problem statement: data b = A* u + noise, inversion runs with A.
/// The model-error operator M = A* - A is always derived, never stored, and
/// delta scales M as delta*M throughout.
struct LinearModelPair {
    Matrix a_star;        // J x d accurate operator
    Matrix a;             // J x d approximate operator
    Matrix gamma;         // J x J noise covariance, SPD
    GaussianMeasure prior;
    double delta = 1.0;

    Matrix model_error() const { return a_star - a; }

    Eigen::Index data_dim() const { return a.rows(); }
    Eigen::Index parameter_dim() const { return a.cols(); }

    void validate() const;
};

/// Compact covariance record used instead of the full matrix when d is large.
struct CovarianceSummary {
    double trace = 0.0;
    double frobenius_norm = 0.0;
    Vector marginal_variances;
};

/// Per-iteration record of the linear iteration: means, covariances (full or
/// summarized), error norms against the run's own limit, and step norms.
struct IterationTrace {
    std::vector<Vector> means;                     // one per iteration, 0..L
    std::vector<Matrix> covariances;               // full storage (d <= storage limit)
    std::vector<CovarianceSummary> cov_summaries;  // summary storage otherwise
    std::vector<double> mean_errors;               // ||m_l - m_L||
    std::vector<double> cov_errors;                // ||C_l - C_L||_F
    std::vector<double> mean_steps;                // ||m_l - m_{l-1}||, step 0 is 0
    std::vector<double> cov_steps;                 // ||C_l - C_{l-1}||_F
    std::optional<int> converged_at;
    /// Machine epsilon of the scalar type the error lists were computed in.
    double error_epsilon = 2.220446049250313e-16;
    /// Predicted rounding floors for the error lists (eps * inner condition *
    /// iterate scale, with margin); deviations below these are noise.
    double mean_noise_floor = 0.0;
    double cov_noise_floor = 0.0;

    std::size_t iterations() const { return means.empty() ? 0 : means.size() - 1; }
    bool full_covariances() const { return !covariances.empty(); }
};

struct LinearIterationOptions {
    int max_iters = 30;
    double tol = 1e-10;
    /// Run the iteration and all error norms in long double. The stored trace
    /// is cast down to double; error_epsilon records the working epsilon.
    bool extended_precision = false;
    /// Covariances above this dimension are stored as summaries.
    int covariance_storage_limit = 4096;
};

/// One inverse-free Gaussian update:
///   mean = m0 + C0 A^T (gamma + A C0 A^T)^{-1} (b - A m0 - shift)
///   cov  = C0 - C0 A^T (gamma + A C0 A^T)^{-1} A C0
/// All solves act on the J x J inner matrix; C0 is never inverted.
GaussianMeasure posterior_update(const GaussianMeasure& prior, const Matrix& a,
                                 const Matrix& gamma, const Vector& shift, const Vector& b);

/// One step of the model-error iteration: the same update with the inner
/// matrix inflated by delta^2 M C_l M^T and the data shifted by delta M m_l.
GaussianMeasure iterate_step(const LinearModelPair& model, const GaussianMeasure& current,
                             const Vector& b);

/// Runs iterate_step from the prior for max_iters steps, recording every
/// iterate. converged_at is the first iterate the sequence is stationary at
/// under the relative tolerance; the trace always runs to max_iters.
IterationTrace run_linear_iteration(const LinearModelPair& model, const Vector& b,
                                    const LinearIterationOptions& options);
IterationTrace run_linear_iteration(const LinearModelPair& model, const Vector& b,
                                    int max_iters, double tol = 1e-10);

/// Monotone precision map R(B) = A^T (gamma + delta^2 M B^{-1} M^T)^{-1} A + C0^{-1}.
Matrix precision_iterate(const Matrix& b_matrix, const LinearModelPair& model);
/// Same with a precomputed prior precision (C0^{-1}), for iteration loops.
Matrix precision_iterate(const Matrix& b_matrix, const LinearModelPair& model,
                         const Matrix& prior_precision);

/// Computable contraction diagnostic
///   beta_hat = || C0 A^T (gamma + A C0 A^T)^{-1} ||_2 * || M ||_2,
/// an upper bound on the contraction modulus; beta_hat * delta < 1 certifies
/// the geometric-rate regime (means ~ (beta delta)^l, covariances squared).
double contraction_bound(const LinearModelPair& model);

struct RateFit {
    double slope = 0.0;      // least-squares slope of log(err) vs iteration
    double r_squared = 1.0;
    int points_used = 0;
};

/// Least-squares slope of log(errors[l]) vs l over the leading segment with
/// errors above plateau_floor (trailing plateau entries are dropped). Throws
/// InsufficientDecayError with fewer than 3 usable points.
RateFit estimate_rate_fit(const std::vector<double>& errors, double plateau_floor);
double estimate_rate(const std::vector<double>& errors, double plateau_floor);
/// Default floor: 10 * machine epsilon * errors[0].
double estimate_rate(const std::vector<double>& errors);

double frobenius_distance(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of a symmetric matrix (helper for PSD-order checks).
double min_eigenvalue(const Matrix& symmetric);

}  // namespace moderr
