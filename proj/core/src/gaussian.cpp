#include "moderr/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#if defined(__GNUC__) && defined(__SIZEOF_FLOAT128__)
#include <quadmath.h>
#define MODERR_HAVE_FLOAT128 1
#endif

namespace moderr {

namespace {

constexpr double kMaxInnerCondition = 1e14;

void require(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

template <typename Mat>
void symmetrize(Mat& m) {
    m = ((m + m.transpose()) * 0.5).eval();
}

/// Templated engine so the experiment traces can run in long double.
template <typename S>
struct LinearEngine {
    using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

    Mat a;           // J x d
    Mat m;           // delta * (a_star - a), J x d
    Mat gamma;       // J x J
    Mat c0;          // d x d
    Vec m0;
    Mat a_c0;        // A C0
    Mat a_c0_at;     // A C0 A^T

    static LinearEngine from(const LinearModelPair& pair) {
        LinearEngine e;
        e.a = pair.a.template cast<S>();
        e.m = (pair.delta * pair.model_error()).template cast<S>();
        e.gamma = pair.gamma.template cast<S>();
        e.c0 = pair.prior.covariance.template cast<S>();
        e.m0 = pair.prior.mean.template cast<S>();
        e.a_c0 = e.a * e.c0;
        e.a_c0_at = e.a_c0 * e.a.transpose();
        symmetrize(e.a_c0_at);
        return e;
    }

    /// Solves against the inner J x J matrix through its eigendecomposition,
    /// rejecting configurations with condition estimate above 1e14.
    static Mat inner_solve(const Mat& inner, const Mat& rhs) {
        Eigen::SelfAdjointEigenSolver<Mat> es(inner);
        if (es.info() != Eigen::Success)
            throw NumericalError("inner matrix eigendecomposition failed");
        const auto& ev = es.eigenvalues();
        const S lmax = ev.maxCoeff();
        const S lmin = ev.minCoeff();
        if (!(lmax > S(0)) || !(lmin > S(0)) ||
            static_cast<double>(lmax / lmin) > kMaxInnerCondition)
            throw NumericalError("ill-posed configuration: inner matrix numerically singular");
        return es.eigenvectors() *
               (ev.array().inverse().matrix().asDiagonal() *
                (es.eigenvectors().transpose() * rhs));
    }

    /// One update with inner inflation Q and mean shift:
    ///   cov  = C0 - C0 A^T (gamma + Q + A C0 A^T)^{-1} A C0
    ///   mean = m0 + C0 A^T (gamma + Q + A C0 A^T)^{-1} (b - A m0 - shift)
    void update(const Mat& q, const Vec& shift, const Vec& b, Vec& mean_out, Mat& cov_out) const {
        Mat inner = gamma + a_c0_at;
        if (q.size() > 0) inner += q;
        symmetrize(inner);
        const Vec resid = b - a * m0 - shift;
        // W = inner^{-1} [A C0 | resid], one factorization for both.
        Mat rhs(inner.rows(), a_c0.cols() + 1);
        rhs.leftCols(a_c0.cols()) = a_c0;
        rhs.col(a_c0.cols()) = resid;
        const Mat w = inner_solve(inner, rhs);
        cov_out = c0 - a_c0.transpose() * w.leftCols(a_c0.cols());
        symmetrize(cov_out);
        mean_out = m0 + a_c0.transpose() * w.col(a_c0.cols());
    }

    void step(const Vec& mean, const Mat& cov, const Vec& b, Vec& mean_out, Mat& cov_out) const {
        const Mat q = m * cov * m.transpose();
        const Vec shift = m * mean;
        update(q, shift, b, mean_out, cov_out);
    }
};

// ---------------------------------------------------------------------------
// Reduced-space trace engine.
//
// Every iterate has the form
//   C_l = C0 - C0 A^T X_l A C0,   m_l = m0 + C0 A^T z_l,
// with J x J state X_l = (gamma + A C0 A^T + d^2 M C_l-1 M^T)^{-1} and a
// J-vector z_l. Substituting C_l-1 back in closes the recursion over five
// precomputed J x J Gram blocks, so the whole trace runs in the data
// dimension. This is the same inverse-free update written in its natural
// coordinates, and it lets the error norms run in quad precision: the
// covariance deviations contract at rate^2 and fall below double (and long
// double) resolution after two steps at fine approximation levels.
// ---------------------------------------------------------------------------

template <typename S>
S scalar_sqrt(S x) {
    return std::sqrt(x);
}
#ifdef MODERR_HAVE_FLOAT128
template <>
__float128 scalar_sqrt(__float128 x) {
    return sqrtq(x);
}
#endif

template <typename S>
struct SmallLinalg {
    // Row-major square matrices of runtime size n.
    using Buf = std::vector<S>;

    static Buf mul(const Buf& a, const Buf& b, int n) {
        Buf c(static_cast<std::size_t>(n) * n, S(0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const S aik = a[i * n + k];
                if (aik == S(0)) continue;
                for (int j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
            }
        return c;
    }

    static Buf mul_tn(const Buf& a, const Buf& b, int n) {  // a^T * b
        Buf c(static_cast<std::size_t>(n) * n, S(0));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                const S aki = a[k * n + i];
                if (aki == S(0)) continue;
                for (int j = 0; j < n; ++j) c[i * n + j] += aki * b[k * n + j];
            }
        return c;
    }

    static std::vector<S> mul_vec(const Buf& a, const std::vector<S>& x, int n) {
        std::vector<S> y(n, S(0));
        for (int i = 0; i < n; ++i) {
            S acc(0);
            for (int j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    static std::vector<S> mul_tvec(const Buf& a, const std::vector<S>& x, int n) {  // a^T x
        std::vector<S> y(n, S(0));
        for (int j = 0; j < n; ++j) {
            S acc(0);
            for (int i = 0; i < n; ++i) acc += a[i * n + j] * x[i];
            y[j] = acc;
        }
        return y;
    }

    static void symmetrize(Buf& a, int n) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const S v = (a[i * n + j] + a[j * n + i]) / S(2);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
    }

    /// In-place lower Cholesky; throws on a nonpositive pivot.
    static void chol(Buf& a, int n) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                S acc = a[i * n + j];
                for (int k = 0; k < j; ++k) acc -= a[i * n + k] * a[j * n + k];
                if (i == j) {
                    if (!(acc > S(0)))
                        throw NumericalError("reduced iteration: inner matrix not SPD");
                    a[i * n + i] = scalar_sqrt(acc);
                } else {
                    a[i * n + j] = acc / a[j * n + j];
                }
            }
            for (int j = i + 1; j < n; ++j) a[i * n + j] = S(0);
        }
    }

    /// X = (L L^T)^{-1}, from the Cholesky factor.
    static Buf chol_inverse(const Buf& l, int n) {
        Buf x(static_cast<std::size_t>(n) * n, S(0));
        std::vector<S> col(n);
        for (int rhs = 0; rhs < n; ++rhs) {
            for (int i = 0; i < n; ++i) {
                S acc = (i == rhs) ? S(1) : S(0);
                for (int k = 0; k < i; ++k) acc -= l[i * n + k] * col[k];
                col[i] = acc / l[i * n + i];
            }
            for (int i = n - 1; i >= 0; --i) {
                S acc = col[i];
                for (int k = i + 1; k < n; ++k) acc -= l[k * n + i] * col[k];
                col[i] = acc / l[i * n + i];
            }
            for (int i = 0; i < n; ++i) x[i * n + rhs] = col[i];
        }
        symmetrize(x, n);
        return x;
    }

    static S quad_form(const Buf& g, const std::vector<S>& x, int n) {
        S acc(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += x[i] * g[i * n + j] * x[j];
        return acc;
    }

    /// tr[(G D)^2] for symmetric G, D.
    static S trace_gd2(const Buf& g, const Buf& d, int n) {
        const Buf gd = mul(g, d, n);
        S acc(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += gd[i * n + j] * gd[j * n + i];
        return acc;
    }
};

template <typename S>
IterationTrace run_iteration(const LinearModelPair& model, const Vector& b,
                             const LinearIterationOptions& options) {
    using LA = SmallLinalg<S>;
    using Buf = typename LA::Buf;
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

    const int j = static_cast<int>(model.data_dim());
    const Eigen::Index d = model.parameter_dim();

    // Gram blocks accumulated in long double.
    const LMat a = model.a.cast<long double>();
    const LMat m = model.model_error().cast<long double>();
    const LMat c0 = model.prior.covariance.cast<long double>();
    const LVec m0 = model.prior.mean.cast<long double>();
    const LMat a_c0 = a * c0;
    const LMat g1l = (m * c0) * m.transpose();
    const LMat g2l = a_c0 * m.transpose();
    const LMat g3l = model.gamma.cast<long double>() + a_c0 * a.transpose();
    const LMat g4l = a_c0 * a_c0.transpose();
    const LMat g5l = (a_c0 * c0) * a_c0.transpose();
    const LVec v0l = a_c0 * m0;
    const LVec r0l = b.cast<long double>() - a * m0;
    const LVec mm0l = m * m0;
    const long double c0_fro2 = c0.squaredNorm();
    const long double m0_norm2 = m0.squaredNorm();

    auto to_buf = [j](const LMat& src) {
        Buf out(static_cast<std::size_t>(j) * j);
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < j; ++c) out[r * j + c] = static_cast<S>(src(r, c));
        return out;
    };
    auto to_vec = [j](const LVec& src) {
        std::vector<S> out(j);
        for (int r = 0; r < j; ++r) out[r] = static_cast<S>(src(r));
        return out;
    };

    const Buf g1 = to_buf(g1l), g2 = to_buf(g2l), gamma_g3 = to_buf(g3l), g4 = to_buf(g4l),
              g5 = to_buf(g5l);
    const std::vector<S> v0 = to_vec(v0l), r0 = to_vec(r0l), mm0 = to_vec(mm0l);
    const S delta = static_cast<S>(model.delta);
    const S delta2 = delta * delta;
    const S tol = static_cast<S>(options.tol);

    auto mean_norm = [&](const std::vector<S>& z) {
        S acc = static_cast<S>(m0_norm2) + LA::quad_form(g4, z, j);
        for (int i = 0; i < j; ++i) acc += S(2) * v0[i] * z[i];
        return scalar_sqrt(std::max(acc, S(0)));
    };
    auto cov_norm = [&](const Buf& x) {
        S acc = static_cast<S>(c0_fro2) + LA::trace_gd2(g4, x, j);
        const Buf xg5 = LA::mul(x, g5, j);
        for (int i = 0; i < j; ++i) acc -= S(2) * xg5[i * j + i];
        return scalar_sqrt(std::max(acc, S(0)));
    };
    auto diff_vec = [&](const std::vector<S>& p, const std::vector<S>& q) {
        std::vector<S> out(j);
        for (int i = 0; i < j; ++i) out[i] = p[i] - q[i];
        return out;
    };
    auto diff_buf = [&](const Buf& p, const Buf& q) {
        Buf out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] - q[i];
        return out;
    };
    auto mean_dist = [&](const std::vector<S>& p, const std::vector<S>& q) {
        return scalar_sqrt(std::max(LA::quad_form(g4, diff_vec(p, q), j), S(0)));
    };
    auto cov_dist = [&](const Buf& p, const Buf& q) {
        return scalar_sqrt(std::max(LA::trace_gd2(g4, diff_buf(p, q), j), S(0)));
    };

    // The inner-matrix conditioning gate, evaluated on the double cast.
    double cond_max = 1.0;
    auto check_condition = [&](const Buf& s_mat) {
        Matrix sd(j, j);
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < j; ++c) sd(r, c) = static_cast<double>(s_mat[r * j + c]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sd, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        const double lmin = es.eigenvalues().minCoeff();
        if (!(lmin > 0.0) || lmax / lmin > kMaxInnerCondition)
            throw NumericalError("ill-posed configuration: inner matrix numerically singular");
        cond_max = std::max(cond_max, lmax / lmin);
    };

    std::vector<std::vector<S>> zs;
    std::vector<Buf> xs;
    zs.push_back(std::vector<S>(j, S(0)));  // prior iterate
    xs.push_back(Buf(static_cast<std::size_t>(j) * j, S(0)));

    IterationTrace trace;
#ifdef MODERR_HAVE_FLOAT128
    trace.error_epsilon = options.extended_precision ? 1.925929944387235853e-34
                                                     : std::numeric_limits<double>::epsilon();
#else
    trace.error_epsilon = static_cast<double>(std::numeric_limits<S>::epsilon());
#endif
    trace.mean_steps.push_back(0.0);
    trace.cov_steps.push_back(0.0);

    for (int k = 1; k <= options.max_iters; ++k) {
        const std::vector<S>& z = zs.back();
        const Buf& x = xs.back();

        // S_k = gamma + A C0 A^T + d^2 (G1 - G2^T X G2),  X_k = S_k^{-1}.
        const Buf xg2 = LA::mul(x, g2, j);
        const Buf q = LA::mul_tn(g2, xg2, j);
        Buf s_mat(static_cast<std::size_t>(j) * j);
        for (std::size_t i = 0; i < s_mat.size(); ++i)
            s_mat[i] = gamma_g3[i] + delta2 * (g1[i] - q[i]);
        LA::symmetrize(s_mat, j);
        check_condition(s_mat);
        Buf factor = s_mat;
        LA::chol(factor, j);
        Buf x_next = LA::chol_inverse(factor, j);

        // z_k = X_k (b - A m0 - d M m_{k-1}).
        std::vector<S> shifted(j);
        const std::vector<S> g2tz = LA::mul_tvec(g2, z, j);
        for (int i = 0; i < j; ++i) shifted[i] = r0[i] - delta * (mm0[i] + g2tz[i]);
        std::vector<S> z_next = LA::mul_vec(x_next, shifted, j);

        const S mean_step = mean_dist(z_next, z);
        const S cov_step = cov_dist(x_next, x);
        trace.mean_steps.push_back(static_cast<double>(mean_step));
        trace.cov_steps.push_back(static_cast<double>(cov_step));
        if (!trace.converged_at && mean_step <= tol * (S(1) + mean_norm(z_next)) &&
            cov_step <= tol * (S(1) + cov_norm(x_next))) {
            // The sequence is stationary from iterate k-1 on.
            trace.converged_at = k - 1;
        }

        zs.push_back(std::move(z_next));
        xs.push_back(std::move(x_next));
    }

    // Error norms against the run's own limit, in working precision.
    for (const auto& z : zs)
        trace.mean_errors.push_back(static_cast<double>(mean_dist(z, zs.back())));
    for (const auto& x : xs)
        trace.cov_errors.push_back(static_cast<double>(cov_dist(x, xs.back())));
    trace.mean_noise_floor = 100.0 * trace.error_epsilon * cond_max *
                             (1.0 + static_cast<double>(mean_norm(zs.back())));
    trace.cov_noise_floor = 100.0 * trace.error_epsilon * cond_max *
                            (1.0 + static_cast<double>(cov_norm(xs.back())));

    // Reconstruct the iterates in double for the stored trace.
    const Matrix c0_at = model.prior.covariance * model.a.transpose();  // d x J
    const bool full = d <= options.covariance_storage_limit;
    const Vector diag_c0 = model.prior.covariance.diagonal();
    for (std::size_t i = 0; i < zs.size(); ++i) {
        Vector zd(j);
        for (int r = 0; r < j; ++r) zd[r] = static_cast<double>(zs[i][r]);
        trace.means.push_back(model.prior.mean + c0_at * zd);

        Matrix xd(j, j);
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < j; ++c) xd(r, c) = static_cast<double>(xs[i][r * j + c]);
        if (full) {
            Matrix cov = model.prior.covariance - c0_at * xd * c0_at.transpose();
            trace.covariances.push_back(((cov + cov.transpose()) * 0.5).eval());
        } else {
            // diag(C0 A^T X A C0)_k = row_k(C0 A^T) X row_k(C0 A^T)^T.
            const Matrix t = c0_at * xd;
            CovarianceSummary summary;
            summary.marginal_variances =
                diag_c0 - (t.array() * c0_at.array()).rowwise().sum().matrix();
            summary.trace = summary.marginal_variances.sum();
            const double fro2 =
                static_cast<double>(c0_fro2) -
                2.0 * static_cast<double>((xd.array() * g5l.cast<double>().array()).sum()) +
                (g4l.cast<double>() * xd * g4l.cast<double>() * xd).trace();
            summary.frobenius_norm = std::sqrt(std::max(fro2, 0.0));
            trace.cov_summaries.push_back(summary);
        }
    }
    return trace;
}

}  // namespace

void GaussianMeasure::validate() const {
    require(covariance.rows() == covariance.cols(), "covariance must be square");
    require(covariance.rows() == mean.size(), "mean/covariance dimension mismatch");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericalError("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(covariance, Eigen::EigenvaluesOnly);
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lmax, 1e-300))
        throw NumericalError("covariance is not positive semi-definite");
}

void LinearModelPair::validate() const {
    require(a_star.rows() == a.rows() && a_star.cols() == a.cols(),
            "a_star and a must have identical dimensions");
    require(gamma.rows() == gamma.cols() && gamma.rows() == a.rows(),
            "gamma must be J x J");
    require(prior.mean.size() == a.cols(), "prior dimension must match operator columns");
    prior.validate();
    if (delta < 0.0) throw NumericalError("delta must be nonnegative");
    const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
    if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericalError("gamma is not symmetric");
    if (min_eigenvalue(gamma) <= 0.0)
        throw NumericalError("gamma is not positive definite");
}

GaussianMeasure posterior_update(const GaussianMeasure& prior, const Matrix& a,
                                 const Matrix& gamma, const Vector& shift, const Vector& b) {
    require(a.cols() == prior.mean.size(), "operator/prior dimension mismatch");
    require(a.rows() == b.size(), "operator/data dimension mismatch");
    require(gamma.rows() == gamma.cols() && gamma.rows() == a.rows(), "gamma must be J x J");
    require(shift.size() == b.size(), "shift/data dimension mismatch");

    auto engine = LinearEngine<double>::from(LinearModelPair{a, a, gamma, prior, 1.0});
    Vector mean;
    Matrix cov;
    engine.update(Matrix(), shift, b, mean, cov);
    return GaussianMeasure{std::move(mean), std::move(cov)};
}

GaussianMeasure iterate_step(const LinearModelPair& model, const GaussianMeasure& current,
                             const Vector& b) {
    require(current.mean.size() == model.parameter_dim(), "current/model dimension mismatch");
    require(b.size() == model.data_dim(), "data/model dimension mismatch");

    const auto engine = LinearEngine<double>::from(model);
    Vector mean;
    Matrix cov;
    engine.step(current.mean, current.covariance, b, mean, cov);
    return GaussianMeasure{std::move(mean), std::move(cov)};
}

IterationTrace run_linear_iteration(const LinearModelPair& model, const Vector& b,
                                    const LinearIterationOptions& options) {
    if (options.max_iters < 1) throw DimensionError("max_iters must be >= 1");
    require(b.size() == model.data_dim(), "data/model dimension mismatch");
#ifdef MODERR_HAVE_FLOAT128
    if (options.extended_precision) return run_iteration<__float128>(model, b, options);
#else
    if (options.extended_precision) return run_iteration<long double>(model, b, options);
#endif
    return run_iteration<double>(model, b, options);
}

IterationTrace run_linear_iteration(const LinearModelPair& model, const Vector& b,
                                    int max_iters, double tol) {
    LinearIterationOptions options;
    options.max_iters = max_iters;
    options.tol = tol;
    return run_linear_iteration(model, b, options);
}

Matrix precision_iterate(const Matrix& b_matrix, const LinearModelPair& model,
                         const Matrix& prior_precision) {
    require(b_matrix.rows() == b_matrix.cols() && b_matrix.rows() == model.parameter_dim(),
            "b_matrix must be d x d");
    Eigen::LLT<Matrix> llt(b_matrix);
    if (llt.info() != Eigen::Success)
        throw NumericalError("precision_iterate: b_matrix is not SPD");

    const Matrix m = model.delta * model.model_error();
    Matrix inner = model.gamma + m * llt.solve(m.transpose());
    symmetrize(inner);
    Eigen::LDLT<Matrix> inner_ldlt(inner);
    if (inner_ldlt.info() != Eigen::Success)
        throw NumericalError("precision_iterate: inner matrix factorization failed");
    Matrix result = model.a.transpose() * inner_ldlt.solve(model.a) + prior_precision;
    symmetrize(result);
    return result;
}

Matrix precision_iterate(const Matrix& b_matrix, const LinearModelPair& model) {
    Eigen::LLT<Matrix> llt(model.prior.covariance);
    if (llt.info() != Eigen::Success)
        throw NumericalError("precision_iterate: prior covariance is not invertible");
    Matrix b0 = llt.solve(Matrix::Identity(model.parameter_dim(), model.parameter_dim()));
    symmetrize(b0);
    return precision_iterate(b_matrix, model, b0);
}

double contraction_bound(const LinearModelPair& model) {
    model.validate();
    Matrix inner = model.gamma + model.a * model.prior.covariance * model.a.transpose();
    symmetrize(inner);
    Eigen::LDLT<Matrix> ldlt(inner);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("contraction_bound: inner matrix factorization failed");
    const Matrix k = model.prior.covariance * model.a.transpose() *
                     ldlt.solve(Matrix::Identity(inner.rows(), inner.cols()));
    const double k_norm = k.jacobiSvd().singularValues()(0);
    const Matrix m = model.model_error();
    if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const double m_norm = m.jacobiSvd().singularValues()(0);
    return k_norm * m_norm;
}

RateFit estimate_rate_fit(const std::vector<double>& errors, double plateau_floor) {
    // Leading segment above the floor; everything from the first plateau
    // entry on is dropped.
    std::vector<double> logs;
    for (double e : errors) {
        if (!(e > plateau_floor)) break;
        logs.push_back(std::log(e));
    }
    if (logs.size() < 3)
        throw InsufficientDecayError("estimate_rate: fewer than 3 entries above the plateau floor");

    const auto n = static_cast<double>(logs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += logs[i];
        sxx += x * x;
        sxy += x * logs[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double fit = intercept + slope * static_cast<double>(i);
        ss_res += (logs[i] - fit) * (logs[i] - fit);
        ss_tot += (logs[i] - mean_y) * (logs[i] - mean_y);
    }
    RateFit out;
    out.slope = slope;
    out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    out.points_used = static_cast<int>(logs.size());
    return out;
}

double estimate_rate(const std::vector<double>& errors, double plateau_floor) {
    return estimate_rate_fit(errors, plateau_floor).slope;
}

double estimate_rate(const std::vector<double>& errors) {
    if (errors.empty()) throw InsufficientDecayError("estimate_rate: empty error list");
    return estimate_rate(errors, 10.0 * std::numeric_limits<double>::epsilon() * errors.front());
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace moderr
