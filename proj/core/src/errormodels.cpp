#include "moderr/errormodels.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

#include "moderr/io.hpp"

namespace moderr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

AffineMap require_affine(const ForwardModelPair& pair) {
    auto affine = pair.approximate_affine();
    if (!affine)
        throw ConfigError("this driver needs a linear (affine) approximate model; '" +
                          pair.label() + "' does not expose one");
    return *affine;
}

/// mean = m0 + C0 A^T (noise + A C0 A^T)^{-1} (b - A m0 - shift) without
/// forming any d x d matrix.
Vector gaussian_mean_update(const AffineMap& map, const GaussianPriorOps& prior,
                            const Matrix& noise, const Vector& b, const Vector& extra_shift) {
    const Matrix c0_at = prior.covariance_apply(map.linear.transpose());  // d x J
    Matrix inner = noise + map.linear * c0_at;
    inner = ((inner + inner.transpose()) * 0.5).eval();
    Eigen::LDLT<Matrix> ldlt(inner);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("gaussian update: inner matrix factorization failed");
    const Vector resid = b - map.offset - map.linear * prior.mean - extra_shift;
    return prior.mean + c0_at * ldlt.solve(resid);
}

}  // namespace

void ErrorModelKind::validate() const {
    if (tag == Tag::Enhanced && sample_size < 2)
        throw ConfigError("enhanced error model needs sample_size >= 2");
    if (tag == Tag::Iterative && iterations < 1)
        throw ConfigError("iterative error model needs iterations >= 1");
    if (tag == Tag::Iterative && !linear_exact && n_particles < 1)
        throw ConfigError("iterative particle path needs n_particles >= 1");
}

RngSpec fork_rng(const RngSpec& rng, std::uint64_t tag) {
    return RngSpec{detail::mix64(detail::mix64(rng.master_seed) ^ tag)};
}

ExperimentResult run_conventional(const ForwardModelPair& pair, const GaussianPriorOps& prior,
                                  const Matrix& gamma, const Vector& b) {
    const auto start = Clock::now();
    const AffineMap map = require_affine(pair);
    ExperimentResult result;
    result.estimate =
        gaussian_mean_update(map, prior, gamma, b, Vector::Zero(b.size()));
    result.metadata.info["method"] = "conventional";
    result.metadata.wall_seconds = seconds_since(start);
    return result;
}

ExperimentResult run_conventional(const ForwardModelPair& pair, const GaussianMeasure& prior,
                                  const Matrix& gamma, const Vector& b) {
    return run_conventional(pair, make_prior_ops(prior), gamma, b);
}

std::pair<Vector, Matrix> enhanced_error_moments(const ForwardModelPair& pair,
                                                 const GaussianPriorOps& prior, int n_err,
                                                 const RngSpec& rng) {
    if (n_err < 2) throw ConfigError("enhanced error model needs n_err >= 2");
    const ParticleEnsemble draws = sample_prior(prior.draw, pair.parameter_dim(), n_err, rng);
    const Matrix errors =
        pair.accurate_batch(draws.particles) - pair.approximate_batch(draws.particles);
    const Vector mbar = errors.rowwise().mean();
    const Matrix centered = errors.colwise() - mbar;
    Matrix sigma = centered * centered.transpose() / static_cast<double>(n_err - 1);
    sigma = ((sigma + sigma.transpose()) * 0.5).eval();
    return {mbar, sigma};
}

Vector enhanced_update_with_moments(const AffineMap& approximate, const GaussianPriorOps& prior,
                                    const Matrix& gamma, const Vector& b, const Vector& mbar,
                                    const Matrix& sigma) {
    return gaussian_mean_update(approximate, prior, gamma + sigma, b, mbar);
}

ExperimentResult run_enhanced(const ForwardModelPair& pair, const GaussianPriorOps& prior,
                              const Matrix& gamma, const Vector& b, int n_err,
                              const RngSpec& rng) {
    const auto start = Clock::now();
    const AffineMap map = require_affine(pair);
    const std::int64_t solves_before = pair.accurate_call_count();
    auto [mbar, sigma] = enhanced_error_moments(pair, prior, n_err, rng);

    ExperimentResult result;
    result.estimate = enhanced_update_with_moments(map, prior, gamma, b, mbar, sigma);
    result.metadata.info["method"] = "enhanced";
    result.metadata.info["n_err"] = std::to_string(n_err);
    result.metadata.seed = rng.master_seed;
    result.metadata.accurate_solves = pair.accurate_call_count() - solves_before;
    // Variance-inflation audit: smallest eigenvalue of the sample covariance.
    result.series["sigma_min_eig"] = {min_eigenvalue(sigma)};
    result.series["error_mean"] = std::vector<double>(mbar.data(), mbar.data() + mbar.size());
    result.metadata.wall_seconds = seconds_since(start);
    return result;
}

ExperimentResult run_enhanced(const ForwardModelPair& pair, const GaussianMeasure& prior,
                              const Matrix& gamma, const Vector& b, int n_err,
                              const RngSpec& rng) {
    return run_enhanced(pair, make_prior_ops(prior), gamma, b, n_err, rng);
}

ExperimentResult run_iterative_linear(const LinearModelPair& model, const Vector& b,
                                      const IterativeLinearOptions& options) {
    const auto start = Clock::now();
    model.validate();

    LinearIterationOptions run_options;
    run_options.max_iters = options.iterations;
    run_options.tol = options.tol;
    run_options.extended_precision = options.extended_precision;

    ExperimentResult result;
    result.trace = run_linear_iteration(model, b, run_options);
    result.estimate = result.trace.means.back();

    // Reference posterior from the accurate operator.
    const GaussianMeasure posterior = posterior_update(
        model.prior, model.a_star, model.gamma, Vector::Zero(b.size()), b);
    std::vector<double> mean_err, cov_err;
    for (const auto& m : result.trace.means) mean_err.push_back((m - posterior.mean).norm());
    for (const auto& c : result.trace.covariances)
        cov_err.push_back((c - posterior.covariance).norm());
    result.series["mean_err_vs_post"] = std::move(mean_err);
    result.series["cov_err_vs_post"] = std::move(cov_err);
    result.metadata.info["method"] = "iterative-linear";
    if (result.trace.converged_at)
        result.metadata.info["converged_at"] = std::to_string(*result.trace.converged_at);
    result.metadata.wall_seconds = seconds_since(start);
    return result;
}

ExperimentResult run_iterative_particle(const ForwardModelPair& pair,
                                        const GaussianPriorOps& prior, const Matrix& gamma,
                                        const Vector& b, const IterativeParticleOptions& options,
                                        const RngSpec& rng, const Vector* truth) {
    const auto start = Clock::now();
    if (options.iterations < 1) throw ConfigError("iterative particle run needs iterations >= 1");
    if (options.n_particles < 1) throw ConfigError("iterative particle run needs n_particles >= 1");
    const std::int64_t solves_before = pair.accurate_call_count();
    const Eigen::Index d = pair.parameter_dim();
    const int n = options.n_particles;

    std::optional<AffineMap> affine = pair.approximate_affine();
    std::optional<LinearGaussianMixtureOp> mixture_op;
    Vector b_mixture;
    if (options.kind == UpdateKind::Mixture) {
        if (!affine)
            throw ConfigError("mixture updates need a linear approximate model; '" +
                              pair.label() + "' does not expose one");
        mixture_op.emplace(affine->linear, gamma, prior.mean, prior.precision);
        b_mixture = b - affine->offset;
    }
    const BoundedNoiseDensity noise = BoundedNoiseDensity::gaussian(gamma);

    ExperimentResult result;
    result.metadata.seed = rng.master_seed;
    result.metadata.info["method"] =
        options.kind == UpdateKind::Mixture ? "iterative-mixture" : "iterative-importance";

    auto record_generation = [&](const ParticleEnsemble& ensemble) {
        const auto [mean, var] = ensemble_moments(ensemble);
        result.series["ess"].push_back(effective_sample_size(ensemble.weights));
        result.series["mean_norm"].push_back(mean.norm());
        result.series["max_marginal_var"].push_back(var.maxCoeff());
        if (truth) result.truth_error.push_back((mean - *truth).norm());
        const double ess = result.series["ess"].back();
        if (ess < options.ess_warn_fraction * n) {
            std::ostringstream msg;
            msg << "importance weights degenerate at generation " << ensemble.generation
                << " (ESS " << ess << " < " << options.ess_warn_fraction * n << ")";
            result.metadata.warnings.push_back(msg.str());
        }
    };

    ParticleEnsemble ensemble = sample_prior(prior.draw, d, n, rng);
    record_generation(ensemble);

    std::vector<KlStageData> kl_stages;
    Matrix prev_errors;
    Vector prev_weights;
    for (int step = 0; step < options.iterations; ++step) {
        // Accurate evaluations of the current generation, cached for the KL
        // diagnostic; the approximate side is cheap.
        const Matrix accurate = pair.accurate_batch(ensemble.particles);
        const Matrix approx = pair.approximate_batch(ensemble.particles);
        ModelErrorSample me;
        me.errors = accurate - approx;
        me.source_generation = ensemble.generation;

        if (options.compute_kl) {
            KlStageData stage;
            stage.approx_values = approx;
            stage.accurate_values = accurate;
            stage.weights = ensemble.weights;
            stage.mix_errors = prev_errors;
            stage.mix_weights = prev_weights;
            kl_stages.push_back(std::move(stage));
        }
        prev_errors = me.errors;
        prev_weights = ensemble.weights;

        if (options.kind == UpdateKind::Mixture) {
            ensemble = mixture_update(ensemble, me, *mixture_op, b_mixture, rng);
        } else {
            ensemble = importance_update(
                ensemble, me, [&](const Vector& u) { return pair.approximate(u); }, noise,
                prior.draw, d, b, rng);
        }
        record_generation(ensemble);
    }

    if (options.compute_kl && !kl_stages.empty()) {
        const KlDeltaResult kl = kl_divergence_delta(kl_stages, noise, b);
        result.series["dkl_delta"] = kl.delta;
        result.series["dkl"] = kl.divergence;
        result.series["dkl_std_error"] = kl.std_error;
    }

    result.estimate = ensemble_moments(ensemble).first;
    result.metadata.accurate_solves = pair.accurate_call_count() - solves_before;
    result.metadata.info["n_particles"] = std::to_string(n);
    result.metadata.info["iterations"] = std::to_string(options.iterations);
    result.metadata.wall_seconds = seconds_since(start);
    return result;
}

ExperimentResult run_iterative_particle(const ForwardModelPair& pair,
                                        const GaussianMeasure& prior, const Matrix& gamma,
                                        const Vector& b, const IterativeParticleOptions& options,
                                        const RngSpec& rng, const Vector* truth) {
    return run_iterative_particle(pair, make_prior_ops(prior), gamma, b, options, rng, truth);
}

RateFit fit_trace_rate(const std::vector<double>& errors, double noise_floor) {
    if (errors.size() < 4)
        throw InsufficientDecayError("fit_trace_rate: trace too short for a slope fit");

    // Usable segment: from iteration 1, while the deviations keep contracting
    // by at least a factor 0.7 per step and stay above the noise floor. A
    // flat trailing plateau (rounding that the predicted floor missed) also
    // caps the segment.
    double floor = noise_floor;
    std::vector<double> tail;
    for (auto it = errors.rbegin(); it != errors.rend() && tail.size() < 5; ++it)
        if (*it > 0.0) tail.push_back(*it);
    if (tail.size() >= 2) {
        std::sort(tail.begin(), tail.end());
        if (tail.back() <= 1e4 * tail.front())
            floor = std::max(floor, 5.0 * tail[tail.size() / 2]);
    }

    std::vector<double> usable;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double e = errors[i];
        if (!(e > floor)) break;
        if (!usable.empty() && e > 0.7 * usable.back()) break;
        usable.push_back(e);
    }

    // Fit the trailing (asymptotic) part: the first steps out of the prior
    // carry a super-geometric transient.
    std::size_t start = usable.size() > 5 ? usable.size() / 2 - 1 : 0;
    if (usable.size() < start + 3) start = usable.size() >= 3 ? usable.size() - 3 : 0;
    return estimate_rate_fit({usable.begin() + start, usable.end()}, 0.0);
}

void write_experiment_result(const std::string& directory, const ExperimentResult& result,
                             const std::string& config_snapshot) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const auto path = [&](const std::string& name) { return (fs::path(directory) / name).string(); };

    write_text_file(path("config.txt"), config_snapshot);
    write_vector_csv(path("estimate.csv"), result.estimate);
    write_matrix_binary(path("estimate.bin"), result.estimate);
    if (!result.trace.means.empty()) write_trace_csv(path("trace.csv"), result.trace);

    if (!result.series.empty() || !result.truth_error.empty()) {
        std::vector<std::string> header{"index"};
        std::vector<const std::vector<double>*> columns;
        std::size_t rows = result.truth_error.size();
        if (!result.truth_error.empty()) {
            header.push_back("truth_err");
            columns.push_back(&result.truth_error);
        }
        for (const auto& [name, series] : result.series) {
            header.push_back(name);
            columns.push_back(&series);
            rows = std::max(rows, series.size());
        }
        std::vector<std::vector<double>> table;
        for (std::size_t i = 0; i < rows; ++i) {
            std::vector<double> row{static_cast<double>(i)};
            for (const auto* col : columns)
                row.push_back(i < col->size() ? (*col)[i]
                                              : std::numeric_limits<double>::quiet_NaN());
            table.push_back(std::move(row));
        }
        write_table_csv(path("series.csv"), header, table);
    }

    ConfigMap meta;
    meta.set("metadata", "seed", std::to_string(result.metadata.seed));
    meta.set("metadata", "accurate_solves", std::to_string(result.metadata.accurate_solves));
    meta.set("metadata", "approximate_solves",
             std::to_string(result.metadata.approximate_solves));
    meta.set("metadata", "wall_seconds", format_g17(result.metadata.wall_seconds));
    for (const auto& [key, value] : result.metadata.info) meta.set("info", key, value);
    for (std::size_t i = 0; i < result.metadata.warnings.size(); ++i)
        meta.set("warnings", "warning_" + std::to_string(i), result.metadata.warnings[i]);
    write_text_file(path("metadata.txt"), meta.serialize());
}

}  // namespace moderr
