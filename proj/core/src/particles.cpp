#include "moderr/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moderr/parallel.hpp"

namespace moderr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Vector& logs) {
    const double m = logs.maxCoeff();
    if (!std::isfinite(m)) return m;  // all -inf (or a stray inf propagates)
    return m + std::log((logs.array() - m).exp().sum());
}

Vector log_weights(const Vector& w) {
    Vector lw(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) lw[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
    return lw;
}

}  // namespace

void ParticleEnsemble::validate() const {
    if (weights.size() != particles.cols())
        throw DimensionError("ensemble weights/particles size mismatch");
    if (weights.size() == 0) throw DimensionError("empty ensemble");
    if (weights.minCoeff() < 0.0) throw NumericalError("negative particle weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw NumericalError("particle weights do not sum to 1");
}

// --------------------------------------------------------------------------
// BoundedNoiseDensity
// --------------------------------------------------------------------------

BoundedNoiseDensity::BoundedNoiseDensity(Matrix gamma, double kappa, NoiseMode mode)
    : gamma_(std::move(gamma)), kappa_(kappa), mode_(mode) {
    if (gamma_.rows() != gamma_.cols()) throw DimensionError("noise covariance must be square");
    if (mode_ == NoiseMode::Clamped && !(kappa_ > 0.0 && kappa_ <= 1.0))
        throw NumericalError("clamp parameter kappa must lie in (0, 1]");

    diagonal_ = gamma_.isDiagonal(0.0);
    double log_det = 0.0;
    if (diagonal_) {
        inv_diag_ = gamma_.diagonal().cwiseInverse();
        if (!(gamma_.diagonal().minCoeff() > 0.0))
            throw NumericalError("noise covariance is not positive definite");
        log_det = gamma_.diagonal().array().log().sum();
    } else {
        llt_.compute(gamma_);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("noise covariance is not positive definite");
        log_det = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }
    const double j = static_cast<double>(gamma_.rows());
    log_norm_ = -0.5 * j * std::log(2.0 * M_PI) - 0.5 * log_det;
}

double BoundedNoiseDensity::log_density(const Vector& eps) const {
    if (eps.size() != gamma_.rows()) throw DimensionError("noise residual dimension mismatch");
    double quad;
    if (diagonal_)
        quad = (eps.array().square() * inv_diag_.array()).sum();
    else
        quad = eps.dot(llt_.solve(eps));
    double lg = log_norm_ - 0.5 * quad;
    if (mode_ == NoiseMode::Clamped) lg = std::clamp(lg, std::log(kappa_), -std::log(kappa_));
    return lg;
}

Vector BoundedNoiseDensity::log_density_batch(const Matrix& residuals) const {
    if (residuals.rows() != gamma_.rows())
        throw DimensionError("noise residual dimension mismatch");
    Vector quad(residuals.cols());
    if (diagonal_) {
        quad = (residuals.array().square().colwise() * inv_diag_.array()).colwise().sum();
    } else {
        const Matrix solved = llt_.solve(residuals);
        quad = (residuals.array() * solved.array()).colwise().sum();
    }
    Vector lg = (-0.5 * quad).array() + log_norm_;
    if (mode_ == NoiseMode::Clamped) {
        const double lo = std::log(kappa_);
        lg = lg.array().max(lo).min(-lo);
    }
    return lg;
}

double BoundedNoiseDensity::max_log_density() const {
    if (mode_ == NoiseMode::Clamped)
        return std::clamp(log_norm_, std::log(kappa_), -std::log(kappa_));
    return log_norm_;
}

Matrix BoundedNoiseDensity::precision_apply(const Matrix& x) const {
    if (x.rows() != gamma_.rows()) throw DimensionError("noise residual dimension mismatch");
    if (diagonal_) return x.array().colwise() * inv_diag_.array();
    return llt_.solve(x);
}

double BoundedNoiseDensity::quad_form(const Vector& eps) const {
    if (diagonal_) return (eps.array().square() * inv_diag_.array()).sum();
    return eps.dot(llt_.solve(eps));
}

double BoundedNoiseDensity::finalize(double raw_log_density) const {
    if (mode_ == NoiseMode::Clamped)
        return std::clamp(raw_log_density, std::log(kappa_), -std::log(kappa_));
    return raw_log_density;
}

double DiscreteMeasure::integrate(const std::function<double(const Vector&)>& phi) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) acc += weights[i] * phi(points.col(i));
    return acc;
}

// --------------------------------------------------------------------------
// Sampling
// --------------------------------------------------------------------------

GaussianSampler::GaussianSampler(const GaussianMeasure& measure) : mean_(measure.mean) {
    const auto& cov = measure.covariance;
    if (cov.rows() != cov.cols() || cov.rows() != mean_.size())
        throw DimensionError("GaussianSampler: covariance/mean dimension mismatch");
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        return;
    }
    // PSD boundary: eigenvalue square root, small negatives rejected.
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success)
        throw NumericalError("GaussianSampler: covariance factorization failed");
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lmax, 1e-300))
        throw NumericalError("GaussianSampler: covariance is indefinite");
    factor_ = es.eigenvectors() *
              es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector GaussianSampler::draw(SubStream& stream) const {
    return mean_ + factor_ * stream.normal_vector(mean_.size());
}

ParticleEnsemble sample_prior(const PriorDraw& draw, Eigen::Index dim, int n, const RngSpec& rng,
                              int generation) {
    if (n < 1) throw DimensionError("sample size must be >= 1");
    ParticleEnsemble out;
    out.particles.resize(dim, n);
    out.weights = Vector::Constant(n, 1.0 / n);
    out.generation = generation;
    parallel_for(n, [&](int j) {
        SubStream stream = substream(rng, StreamId::PriorSample, generation, j);
        out.particles.col(j) = draw(stream);
    });
    return out;
}

ParticleEnsemble sample_prior(const GaussianMeasure& prior, int n, const RngSpec& rng,
                              int generation) {
    GaussianSampler sampler(prior);
    return sample_prior([&sampler](SubStream& s) { return sampler.draw(s); }, prior.dim(), n,
                        rng, generation);
}

ModelErrorSample model_error_sample(const ParticleEnsemble& ensemble, const ForwardModelPair& fm) {
    if (ensemble.dim() != fm.parameter_dim())
        throw DimensionError("ensemble/model parameter dimension mismatch");
    ModelErrorSample out;
    out.source_generation = ensemble.generation;
    const Matrix accurate = fm.accurate_batch(ensemble.particles);
    const Matrix approximate = fm.approximate_batch(ensemble.particles);
    out.errors = accurate - approximate;
    return out;
}

std::vector<int> systematic_resample(const Vector& weights, double u01) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> indices(n);
    double cumulative = weights[0];
    int k = 0;
    for (int j = 0; j < n; ++j) {
        const double position = (j + u01) / n;
        while (position > cumulative && k < n - 1) cumulative += weights[++k];
        indices[j] = k;
    }
    return indices;
}

// --------------------------------------------------------------------------
// Mixture update
// --------------------------------------------------------------------------

void LinearGaussianMixtureOp::factorize(Matrix p) {
    p = ((p + p.transpose()) * 0.5).eval();
    llt_p_.compute(p);
    if (llt_p_.info() != Eigen::Success)
        throw NumericalError("mixture covariance factorization failed");
}

LinearGaussianMixtureOp::LinearGaussianMixtureOp(const Matrix& a, const Matrix& gamma,
                                                 const GaussianMeasure& prior) {
    Eigen::LLT<Matrix> gamma_llt(gamma);
    if (gamma_llt.info() != Eigen::Success)
        throw NumericalError("noise covariance is not positive definite");
    at_gamma_inv_ = gamma_llt.solve(a).transpose();

    Eigen::LLT<Matrix> c0_llt(prior.covariance);
    if (c0_llt.info() != Eigen::Success)
        throw NumericalError("prior covariance is not invertible");
    const Matrix b0 = c0_llt.solve(Matrix::Identity(prior.dim(), prior.dim()));
    b0_m0_ = b0 * prior.mean;
    factorize(at_gamma_inv_ * a + b0);
}

LinearGaussianMixtureOp::LinearGaussianMixtureOp(const Matrix& a, const Matrix& gamma,
                                                 const Vector& prior_mean,
                                                 const SpMat& prior_precision) {
    Eigen::LLT<Matrix> gamma_llt(gamma);
    if (gamma_llt.info() != Eigen::Success)
        throw NumericalError("noise covariance is not positive definite");
    at_gamma_inv_ = gamma_llt.solve(a).transpose();
    b0_m0_ = prior_precision * prior_mean;
    factorize(at_gamma_inv_ * a + Matrix(prior_precision));
}

Vector LinearGaussianMixtureOp::mean_for(const Vector& model_error, const Vector& b) const {
    return llt_p_.solve(at_gamma_inv_ * (b - model_error) + b0_m0_);
}

Vector LinearGaussianMixtureOp::draw_from(const Vector& center, SubStream& stream) const {
    const Vector z = stream.normal_vector(center.size());
    return center + llt_p_.matrixU().solve(z);
}

Matrix LinearGaussianMixtureOp::covariance() const {
    const Eigen::Index d = dim();
    return llt_p_.solve(Matrix::Identity(d, d));
}

ParticleEnsemble mixture_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                const LinearGaussianMixtureOp& op, const Vector& b,
                                const RngSpec& rng) {
    ensemble.validate();
    if (me.errors.cols() != ensemble.size())
        throw DimensionError("model-error sample does not match the ensemble");
    const int n = static_cast<int>(ensemble.size());
    const int gen = ensemble.generation;

    Matrix means(op.dim(), n);
    parallel_for(n, [&](int j) { means.col(j) = op.mean_for(me.errors.col(j), b); });

    SubStream index_stream = substream(rng, StreamId::ResampleIndex, gen, 0);
    const std::vector<int> picks = systematic_resample(ensemble.weights, index_stream.uniform01());

    ParticleEnsemble out;
    out.particles.resize(op.dim(), n);
    out.weights = Vector::Constant(n, 1.0 / n);
    out.generation = gen + 1;
    parallel_for(n, [&](int j) {
        SubStream stream = substream(rng, StreamId::MixtureDraw, gen, j);
        out.particles.col(j) = op.draw_from(means.col(picks[j]), stream);
    });
    return out;
}

ParticleEnsemble mixture_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                const Matrix& a, const Matrix& gamma, const GaussianMeasure& prior,
                                const Vector& b, const RngSpec& rng) {
    LinearGaussianMixtureOp op(a, gamma, prior);
    return mixture_update(ensemble, me, op, b, rng);
}

// --------------------------------------------------------------------------
// Importance update
// --------------------------------------------------------------------------

double mixture_log_likelihood(const BoundedNoiseDensity& noise, const Vector& residual_base,
                              const Matrix& mix_errors, const Vector& mix_logw) {
    const Vector dens = noise.log_density_batch((-mix_errors).colwise() + residual_base);
    return logsumexp(dens + mix_logw);
}

MixtureLikelihoodEvaluator::MixtureLikelihoodEvaluator(const BoundedNoiseDensity& noise,
                                                       const Matrix& mix_errors,
                                                       const Vector& mix_logw)
    : noise_(noise), logw_(mix_logw) {
    if (mix_errors.rows() != noise.dim())
        throw DimensionError("mixture errors do not match the noise dimension");
    if (mix_errors.cols() != mix_logw.size())
        throw DimensionError("mixture errors/weights size mismatch");
    weighted_errors_ = noise.precision_apply(mix_errors);
    quad_errors_ = (mix_errors.array() * weighted_errors_.array()).colwise().sum();
}

MixtureLikelihoodEvaluator::Scratch MixtureLikelihoodEvaluator::make_scratch() const {
    return Scratch{Vector(logw_.size()), Vector(logw_.size())};
}

double MixtureLikelihoodEvaluator::log_g(const Vector& base, Scratch& s) const {
    // quad_k = |base|^2_W - 2 base^T W m_k + |m_k|^2_W
    const double qb = noise_.quad_form(base);
    s.cross.noalias() = weighted_errors_.transpose() * base;
    const double lo = noise_.mode() == NoiseMode::Clamped ? std::log(noise_.kappa()) : 0.0;
    s.work = (noise_.log_normalizer() - 0.5 * qb) +
             (s.cross - 0.5 * quad_errors_).array();
    if (noise_.mode() == NoiseMode::Clamped)
        s.work = s.work.array().max(lo).min(-lo);
    s.work += logw_;
    const double m = s.work.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((s.work.array() - m).exp().sum());
}

Vector MixtureLikelihoodEvaluator::log_g_batch(const Matrix& bases) const {
    const Eigen::Index n = bases.cols();
    Vector out(n);
    const Eigen::Index block = std::max<Eigen::Index>(1, (1 << 21) / std::max<Eigen::Index>(1, logw_.size()));
    parallel_for(static_cast<int>((n + block - 1) / block), [&](int blk) {
        const Eigen::Index begin = static_cast<Eigen::Index>(blk) * block;
        const Eigen::Index count = std::min(block, n - begin);
        // cross: components x count
        Matrix cross = weighted_errors_.transpose() * bases.middleCols(begin, count);
        const double lo = noise_.mode() == NoiseMode::Clamped ? std::log(noise_.kappa()) : 0.0;
        for (Eigen::Index c = 0; c < count; ++c) {
            const double qb = noise_.quad_form(bases.col(begin + c));
            Vector work = (noise_.log_normalizer() - 0.5 * qb) +
                          (cross.col(c) - 0.5 * quad_errors_).array();
            if (noise_.mode() == NoiseMode::Clamped)
                work = work.array().max(lo).min(-lo);
            work += logw_;
            const double m = work.maxCoeff();
            out[begin + c] = std::isfinite(m)
                                 ? m + std::log((work.array() - m).exp().sum())
                                 : m;
        }
    });
    return out;
}

ParticleEnsemble importance_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                   const std::function<Vector(const Vector&)>& approximate,
                                   const BoundedNoiseDensity& noise, const PriorDraw& prior_draw,
                                   Eigen::Index dim, const Vector& b, const RngSpec& rng) {
    ensemble.validate();
    if (me.errors.cols() != ensemble.size())
        throw DimensionError("model-error sample does not match the ensemble");
    const int n = static_cast<int>(ensemble.size());
    const int gen = ensemble.generation;
    const Vector mix_logw = log_weights(ensemble.weights);

    ParticleEnsemble out;
    out.particles.resize(dim, n);
    out.generation = gen + 1;
    Vector log_g(n);
    parallel_for(n, [&](int j) {
        SubStream stream = substream(rng, StreamId::PriorSample, gen + 1, j);
        const Vector u = prior_draw(stream);
        out.particles.col(j) = u;
        log_g[j] = mixture_log_likelihood(noise, b - approximate(u), me.errors, mix_logw);
    });

    const double total = logsumexp(log_g);
    if (!std::isfinite(total))
        throw DegenerateLikelihoodError(
            "importance update: all mixture likelihoods underflowed to zero; widen the noise "
            "density or use clamped mode");
    out.weights = (log_g.array() - total).exp();
    out.weights /= out.weights.sum();  // exact simplex after rounding
    return out;
}

ParticleEnsemble importance_update(const ParticleEnsemble& ensemble, const ForwardModelPair& fm,
                                   const BoundedNoiseDensity& noise, const GaussianMeasure& prior,
                                   const Vector& b, const RngSpec& rng) {
    const ModelErrorSample me = model_error_sample(ensemble, fm);
    GaussianSampler sampler(prior);
    return importance_update(
        ensemble, me, [&fm](const Vector& u) { return fm.approximate(u); }, noise,
        [&sampler](SubStream& s) { return sampler.draw(s); }, prior.dim(), b, rng);
}

// --------------------------------------------------------------------------
// Resample-then-draw and rejection rigs
// --------------------------------------------------------------------------

InnerSampler make_gaussian_inner_sampler(std::shared_ptr<const LinearGaussianMixtureOp> op,
                                         Vector b) {
    return [op, b = std::move(b)](const Vector& model_error, SubStream& stream) {
        return op->draw_from(op->mean_for(model_error, b), stream);
    };
}

InnerSampler make_rejection_inner_sampler(std::shared_ptr<const GaussianSampler> prior,
                                          const BoundedNoiseDensity& noise,
                                          std::function<Vector(const Vector&)> f, Vector b,
                                          long max_attempts) {
    const double bound = noise.max_log_density();
    return [prior, noise, f = std::move(f), b = std::move(b), bound,
            max_attempts](const Vector& model_error, SubStream& stream) {
        for (long attempt = 0; attempt < max_attempts; ++attempt) {
            const Vector u = prior->draw(stream);
            const double lg = noise.log_density(b - f(u) - model_error);
            if (std::log(1.0 - stream.uniform01()) <= lg - bound) return u;
        }
        throw NumericalError("rejection inner sampler exceeded the attempt budget");
    };
}

ParticleEnsemble resample_draw_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                      const GaussianMeasure& prior,
                                      const BoundedNoiseDensity& noise,
                                      const std::function<Vector(const Vector&)>& f,
                                      const Vector& b, const RngSpec& rng,
                                      InnerSampler inner_sampler) {
    ensemble.validate();
    if (me.errors.cols() != ensemble.size())
        throw DimensionError("model-error sample does not match the ensemble");
    if (!inner_sampler) {
        auto sampler = std::make_shared<GaussianSampler>(prior);
        inner_sampler = make_rejection_inner_sampler(sampler, noise, f, b);
    }
    const int n = static_cast<int>(ensemble.size());
    const int gen = ensemble.generation;

    SubStream index_stream = substream(rng, StreamId::ResampleIndex, gen, 0);
    const std::vector<int> picks = systematic_resample(ensemble.weights, index_stream.uniform01());

    ParticleEnsemble out;
    out.particles.resize(ensemble.dim(), n);
    out.weights = Vector::Constant(n, 1.0 / n);
    out.generation = gen + 1;
    parallel_for(n, [&](int j) {
        try {
            // Same stream id as mixture_update: the Gaussian inner sampler is
            // bit-compatible with it.
            SubStream stream = substream(rng, StreamId::MixtureDraw, gen, j);
            out.particles.col(j) = inner_sampler(me.errors.col(picks[j]), stream);
        } catch (const NumericalError&) {
            throw;
        } catch (const std::exception& err) {
            std::ostringstream msg;
            msg << "inner sampler failed at particle " << j << ": " << err.what();
            throw NumericalError(msg.str());
        }
    });
    return out;
}

ParticleEnsemble sn_rejection_update(const ParticleEnsemble& ensemble, const ModelErrorSample& me,
                                     const GaussianSampler& prior,
                                     const BoundedNoiseDensity& noise,
                                     const std::function<Vector(const Vector&)>& f,
                                     const Vector& b, const RngSpec& rng, long max_attempts) {
    ensemble.validate();
    if (me.errors.cols() != ensemble.size())
        throw DimensionError("model-error sample does not match the ensemble");
    const int n = static_cast<int>(ensemble.size());
    const int gen = ensemble.generation;
    const Vector mix_logw = log_weights(ensemble.weights);
    // g(u) <= max density since the mixture weights sum to 1.
    const double bound = noise.max_log_density();

    ParticleEnsemble out;
    out.particles.resize(ensemble.dim(), n);
    out.weights = Vector::Constant(n, 1.0 / n);
    out.generation = gen + 1;
    parallel_for(n, [&](int j) {
        SubStream stream = substream(rng, StreamId::RejectionDraw, gen, j);
        for (long attempt = 0; attempt < max_attempts; ++attempt) {
            const Vector u = prior.draw(stream);
            const double lg = mixture_log_likelihood(noise, b - f(u), me.errors, mix_logw);
            if (std::log(1.0 - stream.uniform01()) <= lg - bound) {
                out.particles.col(j) = u;
                return;
            }
        }
        throw NumericalError("sn_rejection_update exceeded the attempt budget");
    });
    return out;
}

// --------------------------------------------------------------------------
// Diagnostics
// --------------------------------------------------------------------------

std::pair<Vector, Vector> ensemble_moments(const ParticleEnsemble& ensemble) {
    ensemble.validate();
    const Vector mean = ensemble.particles * ensemble.weights;
    const Matrix centered = ensemble.particles.colwise() - mean;
    const Vector var = centered.array().square().matrix() * ensemble.weights;
    return {mean, var};
}

double effective_sample_size(const Vector& weights) {
    const double s = weights.squaredNorm();
    if (s <= 0.0) throw NumericalError("effective_sample_size: zero weight vector");
    return 1.0 / s;
}

KlDeltaResult kl_divergence_delta(const std::vector<KlStageData>& stages,
                                  const BoundedNoiseDensity& noise, const Vector& b) {
    if (stages.empty()) throw DimensionError("kl_divergence_delta: no stages");
    KlDeltaResult out;
    for (const auto& stage : stages) {
        const Eigen::Index n = stage.weights.size();
        if (stage.approx_values.cols() != n || stage.accurate_values.cols() != n)
            throw DimensionError("kl_divergence_delta: stage value/weight mismatch");
        const Vector mix_logw =
            stage.mix_errors.cols() > 0 ? log_weights(stage.mix_weights) : Vector();

        // Lambda_j = log pi_l(b | u_j) - log pi(b | u_j); constants cancel in
        // the self-normalized estimator.
        Vector lambda(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double stage_ll = 0.0;
            if (stage.mix_errors.cols() > 0)
                stage_ll = mixture_log_likelihood(noise, b - stage.approx_values.col(j),
                                                  stage.mix_errors, mix_logw);
            const double accurate_ll = noise.log_density(b - stage.accurate_values.col(j));
            if (!std::isfinite(accurate_ll) || !std::isfinite(stage_ll))
                throw NumericalError("kl_divergence_delta: zero likelihood at a particle");
            lambda[j] = stage_ll - accurate_ll;
        }

        const Vector logw = log_weights(stage.weights);
        const double mean_lambda = stage.weights.dot(lambda);
        const double log_zratio = logsumexp(logw - lambda);
        out.divergence.push_back(mean_lambda + log_zratio);

        // Delta-method error estimate, doubled to cover the normalizer term.
        double var = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            var += stage.weights[j] * stage.weights[j] * (lambda[j] - mean_lambda) *
                   (lambda[j] - mean_lambda);
        out.std_error.push_back(2.0 * std::sqrt(var));
    }
    const double last = out.divergence.back();
    for (double d : out.divergence) out.delta.push_back(d - last);
    return out;
}

double empirical_operator_distance(const DiscreteMeasure& reference,
                                   const std::vector<ParticleEnsemble>& replicates,
                                   const std::vector<std::function<double(const Vector&)>>& tests) {
    if (replicates.size() < 16)
        throw DimensionError("empirical_operator_distance requires >= 16 replicates");
    if (tests.empty()) throw DimensionError("empirical_operator_distance: empty dictionary");

    double worst = 0.0;
    for (const auto& phi : tests) {
        const double ref_value = reference.integrate(phi);
        double mean_square = 0.0;
        for (const auto& ensemble : replicates) {
            double value = 0.0;
            for (Eigen::Index j = 0; j < ensemble.size(); ++j)
                value += ensemble.weights[j] * phi(ensemble.particles.col(j));
            mean_square += (value - ref_value) * (value - ref_value);
        }
        mean_square /= static_cast<double>(replicates.size());
        worst = std::max(worst, mean_square);
    }
    return std::sqrt(worst);
}

std::vector<std::function<double(const Vector&)>> default_test_dictionary(double scale) {
    std::vector<std::function<double(const Vector&)>> tests;
    for (double k : {0.5, 1.0, 2.0, 3.0}) {
        tests.emplace_back([k, scale](const Vector& u) { return std::sin(k * u[0] / scale); });
        tests.emplace_back([k, scale](const Vector& u) { return std::cos(k * u[0] / scale); });
    }
    for (double c : {-1.0, 0.0, 1.0}) {
        tests.emplace_back(
            [c, scale](const Vector& u) { return std::tanh(u[0] / scale - c); });
    }
    tests.emplace_back([scale](const Vector& u) {
        return std::exp(-0.5 * u.squaredNorm() / (scale * scale));
    });
    return tests;
}

}  // namespace moderr
