#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "moderr/forward_model.hpp"
#include "moderr/gaussian.hpp"
#include "moderr/rng.hpp"

namespace moderr {

/// Weighted particle approximation of a parameter-space measure.
/// Immutable after construction: updates return new ensembles.
struct ParticleEnsemble {
    Matrix particles;  // d x N, column j is particle j
    Vector weights;    // N nonnegative entries summing to 1
    int generation = 0;

    Eigen::Index size() const { return particles.cols(); }
    Eigen::Index dim() const { return particles.rows(); }

    /// Throws unless weights form a simplex (sum 1 within 1e-12, all >= 0)
    /// matching the particle count.
    void validate() const;
};

/// Model errors of one ensemble: errors.col(j) = F(u_j) - f(u_j).
struct ModelErrorSample {
    Matrix errors;  // J x N
    int source_generation = 0;
};

enum class NoiseMode { ExactGaussian, Clamped };

/// Gaussian observation-noise density N(0, gamma), optionally clamped into
/// [kappa, 1/kappa] so the bounded-noise convergence assumptions hold
/// literally in the test rigs. kappa = 1 clamps to the flat density 1.
class BoundedNoiseDensity {
public:
    BoundedNoiseDensity(Matrix gamma, double kappa, NoiseMode mode);
    static BoundedNoiseDensity gaussian(Matrix gamma) {
        return BoundedNoiseDensity(std::move(gamma), 0.5, NoiseMode::ExactGaussian);
    }
    static BoundedNoiseDensity clamped(Matrix gamma, double kappa) {
        return BoundedNoiseDensity(std::move(gamma), kappa, NoiseMode::Clamped);
    }

    double log_density(const Vector& eps) const;
    /// One log-density per column.
    Vector log_density_batch(const Matrix& residual_columns) const;
    /// log of a global upper bound on the density (tight at eps = 0).
    double max_log_density() const;

    NoiseMode mode() const { return mode_; }
    double kappa() const { return kappa_; }
    const Matrix& gamma() const { return gamma_; }
    Eigen::Index dim() const { return gamma_.rows(); }

    /// Gamma^{-1} x and the induced quadratic form (for precomputed mixture
    /// evaluation).
    Matrix precision_apply(const Matrix& x) const;
    double quad_form(const Vector& eps) const;
    double log_normalizer() const { return log_norm_; }
    /// Clamps a raw Gaussian log-density according to the mode.
    double finalize(double raw_log_density) const;

private:
    Matrix gamma_;
    Eigen::LLT<Matrix> llt_;
    bool diagonal_ = false;
    Vector inv_diag_;
    double log_norm_ = 0.0;  // -J/2 log(2 pi) - 1/2 log det gamma
    double kappa_ = 0.5;
    NoiseMode mode_ = NoiseMode::ExactGaussian;
};

/// Discrete reference measure (dense-grid quadrature of an exact density).
struct DiscreteMeasure {
    Matrix points;   // d x n
    Vector weights;  // n, sums to 1

    double integrate(const std::function<double(const Vector&)>& phi) const;
};

/// Reusable symmetric factorization of a Gaussian measure for sampling.
/// Cholesky when the covariance is PD, eigenvalue square root for the PSD
/// boundary (zero eigenvalues allowed).
class GaussianSampler {
public:
    explicit GaussianSampler(const GaussianMeasure& measure);
    Vector draw(SubStream& stream) const;
    Eigen::Index dim() const { return mean_.size(); }
    const Matrix& factor() const { return factor_; }

private:
    Vector mean_;
    Matrix factor_;  // factor * factor^T = covariance
};

/// Draw callback used where a dense covariance would be wasteful.
using PriorDraw = std::function<Vector(SubStream&)>;

// ---------------------------------------------------------------------------
// Ensemble construction and updates
// ---------------------------------------------------------------------------

/// N i.i.d. prior draws with uniform weights at the given generation.
/// Particle j consumes substream (PriorSample, generation, j).
ParticleEnsemble sample_prior(const GaussianMeasure& prior, int n, const RngSpec& rng,
                              int generation = 0);
ParticleEnsemble sample_prior(const PriorDraw& draw, Eigen::Index dim, int n, const RngSpec& rng,
                              int generation = 0);

/// errors.col(j) = F(u_j) - f(u_j); evaluations run per particle in parallel.
ModelErrorSample model_error_sample(const ParticleEnsemble& ensemble, const ForwardModelPair& fm);

/// Systematic resampling: N indices from the weight simplex using the single
/// uniform u01 (stride 1/N positions over the cumulative weights).
std::vector<int> systematic_resample(const Vector& weights, double u01);

/// Gaussian-mixture step operator for a linear approximate model:
/// shared covariance C = (A^T Gamma^{-1} A + C0^{-1})^{-1}, mixture means
/// p(m) = C (A^T Gamma^{-1} (b - m) + C0^{-1} m0). Factorized once, reused
/// across iterations.
class LinearGaussianMixtureOp {
public:
    LinearGaussianMixtureOp(const Matrix& a, const Matrix& gamma, const GaussianMeasure& prior);
    LinearGaussianMixtureOp(const Matrix& a, const Matrix& gamma, const Vector& prior_mean,
                            const SpMat& prior_precision);

    Vector mean_for(const Vector& model_error, const Vector& b) const;
    /// center + L^{-T} z with P = L L^T, so the draw has covariance C = P^{-1}.
    Vector draw_from(const Vector& center, SubStream& stream) const;
    Matrix covariance() const;
    Eigen::Index dim() const { return b0_m0_.size(); }

private:
    void factorize(Matrix p);
    Eigen::LLT<Matrix> llt_p_;
    Matrix at_gamma_inv_;  // A^T Gamma^{-1}
    Vector b0_m0_;         // C0^{-1} m0
};

/// One mixture update: resample component indices by the ensemble weights
/// (systematic; uniform weights give the stratified special case), then draw
/// u_j ~ N(p(m_{k_j}), C). Output has uniform weights, generation + 1.
ParticleEnsemble mixture_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                const LinearGaussianMixtureOp& op, const Vector& b,
                                const RngSpec& rng);
ParticleEnsemble mixture_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                const Matrix& a, const Matrix& gamma, const GaussianMeasure& prior,
                                const Vector& b, const RngSpec& rng);

/// log g(u) = log sum_k w_k pi_noise(b - f_u - m_k), evaluated in log space.
/// residual_base = b - f(u); mix_logw = log weights (length N).
double mixture_log_likelihood(const BoundedNoiseDensity& noise, const Vector& residual_base,
                              const Matrix& mix_errors, const Vector& mix_logw);

/// Precomputed state for repeated mixture-likelihood evaluations against one
/// model-error sample: the cross terms reduce each evaluation to a GEMV plus
/// one vectorized pass over the components. Read-only after construction;
/// workers keep their own scratch.
class MixtureLikelihoodEvaluator {
public:
    struct Scratch {
        Vector cross, work;
    };

    MixtureLikelihoodEvaluator(const BoundedNoiseDensity& noise, const Matrix& mix_errors,
                               const Vector& mix_logw);

    Scratch make_scratch() const;
    double log_g(const Vector& residual_base, Scratch& scratch) const;
    /// One log g per column, blocked internally.
    Vector log_g_batch(const Matrix& residual_bases) const;

private:
    const BoundedNoiseDensity& noise_;
    Matrix weighted_errors_;  // Gamma^{-1} m_k columns
    Vector quad_errors_;      // m_k^T Gamma^{-1} m_k
    Vector logw_;
};

/// Importance-sampling update: N fresh prior draws, weighted by the mixture
/// likelihood g built from the current ensemble's model errors.
ParticleEnsemble importance_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                   const std::function<Vector(const Vector&)>& approximate,
                                   const BoundedNoiseDensity& noise, const PriorDraw& prior_draw,
                                   Eigen::Index dim, const Vector& b, const RngSpec& rng);
/// Spec-shaped variant: model errors evaluated through fm, prior sampled from
/// its dense covariance.
ParticleEnsemble importance_update(const ParticleEnsemble& ensemble, const ForwardModelPair& fm,
                                   const BoundedNoiseDensity& noise, const GaussianMeasure& prior,
                                   const Vector& b, const RngSpec& rng);

/// Inner sampler contract for resample_draw_update: draw one sample from
/// pi_prior(u) pi_noise(b - f(u) - m) for the given model error m.
using InnerSampler = std::function<Vector(const Vector& model_error, SubStream& stream)>;

/// Exact Gaussian inner sampler (linear f); consumes its stream exactly like
/// mixture_update, so the two paths are bitwise identical under a shared
/// RngSpec.
InnerSampler make_gaussian_inner_sampler(std::shared_ptr<const LinearGaussianMixtureOp> op,
                                         Vector b);

/// Rejection inner sampler from prior proposals; valid for any bounded noise
/// density (the Gaussian and clamped modes both are).
InnerSampler make_rejection_inner_sampler(std::shared_ptr<const GaussianSampler> prior,
                                          const BoundedNoiseDensity& noise,
                                          std::function<Vector(const Vector&)> f, Vector b,
                                          long max_attempts = 100000000L);

/// Generic resample-then-draw scheme: index k_j by systematic resampling over
/// the ensemble weights, then inner_sampler draws against m_{k_j}. A null
/// inner_sampler falls back to the rejection sampler built from
/// (prior, noise, f, b).
ParticleEnsemble resample_draw_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                      const GaussianMeasure& prior,
                                      const BoundedNoiseDensity& noise,
                                      const std::function<Vector(const Vector&)>& f,
                                      const Vector& b, const RngSpec& rng,
                                      InnerSampler inner_sampler = nullptr);

/// Exact sampling of S^N L P mu^N: for each particle, rejection-sample from
/// prior(u) g(u) with g the full mixture likelihood. This is the
/// bounded-noise convergence rig's exact-sampling update.
ParticleEnsemble sn_rejection_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                     const GaussianSampler& prior,
                                     const BoundedNoiseDensity& noise,
                                     const std::function<Vector(const Vector&)>& f,
                                     const Vector& b, const RngSpec& rng,
                                     long max_attempts = 100000000L);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Weighted mean and weighted diagonal second central moment (1/N-style, no
/// Bessel correction).
std::pair<Vector, Vector> ensemble_moments(const ParticleEnsemble& ensemble);

/// 1 / sum w_j^2.
double effective_sample_size(const Vector& weights);

/// Inputs for one stage of the KL-divergence diagnostic. Accurate values are
/// the cached fine-model evaluations; mix_errors/mix_weights define the
/// stage's mixture likelihood (empty mix_errors means the prior stage, whose
/// likelihood is constant).
struct KlStageData {
    Matrix approx_values;    // f(u_j), J x N
    Matrix accurate_values;  // F(u_j), J x N
    Vector weights;          // ensemble weights, N
    Matrix mix_errors;       // J x N_prev (empty at stage 0)
    Vector mix_weights;      // N_prev
};

struct KlDeltaResult {
    std::vector<double> delta;       // D_l - D_last
    std::vector<double> divergence;  // per-stage self-normalized estimates
    std::vector<double> std_error;   // crude MC standard errors
};

/// Sample-average KL-divergence differences against the final stage,
/// D_l - D_last, with each stage's unknown normalizer estimated from the same
/// sample (self-normalized; bias O(1/N), see README).
KlDeltaResult kl_divergence_delta(const std::vector<KlStageData>& stages,
                                  const BoundedNoiseDensity& noise, const Vector& b);

/// max over the dictionary of sqrt( mean_r |mu_r(phi) - reference(phi)|^2 )
/// across R replicate ensembles (R >= 16 required).
double empirical_operator_distance(const DiscreteMeasure& reference,
                                   const std::vector<ParticleEnsemble>& replicates,
                                   const std::vector<std::function<double(const Vector&)>>& tests);

/// Bounded-by-1 test dictionary over the first coordinate, scaled to the
/// problem's spread.
std::vector<std::function<double(const Vector&)>> default_test_dictionary(double scale);

}  // namespace moderr
