#pragma once

#include <map>
#include <string>
#include <vector>

#include "moderr/priors.hpp"

namespace moderr {

/// Which inference driver to run, with its size parameters.
struct ErrorModelKind {
    enum class Tag { Conventional, Enhanced, Iterative };
    Tag tag = Tag::Iterative;
    int sample_size = 1500;   // enhanced: pushforward sample size (>= 2)
    int iterations = 10;      // iterative: L
    int n_particles = 100;    // iterative nonlinear path
    bool linear_exact = false;  // iterative linear path (exact Gaussian algebra)

    void validate() const;
};

struct ExperimentMetadata {
    std::uint64_t seed = 0;
    std::int64_t accurate_solves = 0;
    std::int64_t approximate_solves = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> info;
};

/// Point estimate plus everything the tables and figures are built from.
struct ExperimentResult {
    Vector estimate;       // conditional mean (Gaussian paths: posterior mean)
    IterationTrace trace;  // linear path: full iteration trace
    std::vector<double> truth_error;  // ||estimate_l - truth|| when truth known
    std::map<std::string, std::vector<double>> series;  // named diagnostics
    ExperimentMetadata metadata;
};

/// Single Gaussian update that ignores the model error.
ExperimentResult run_conventional(const ForwardModelPair& pair, const GaussianPriorOps& prior,
                                  const Matrix& gamma, const Vector& b);
ExperimentResult run_conventional(const ForwardModelPair& pair, const GaussianMeasure& prior,
                                  const Matrix& gamma, const Vector& b);

/// Sample mean and unbiased covariance of the model error under prior draws.
std::pair<Vector, Matrix> enhanced_error_moments(const ForwardModelPair& pair,
                                                 const GaussianPriorOps& prior, int n_err,
                                                 const RngSpec& rng);

/// Gaussian update with inflated noise gamma + sigma and data shift mbar.
Vector enhanced_update_with_moments(const AffineMap& approximate, const GaussianPriorOps& prior,
                                    const Matrix& gamma, const Vector& b, const Vector& mbar,
                                    const Matrix& sigma);

/// Enhanced error model: pushforward moments from n_err prior draws, then one
/// inflated Gaussian update.
ExperimentResult run_enhanced(const ForwardModelPair& pair, const GaussianPriorOps& prior,
                              const Matrix& gamma, const Vector& b, int n_err,
                              const RngSpec& rng);
ExperimentResult run_enhanced(const ForwardModelPair& pair, const GaussianMeasure& prior,
                              const Matrix& gamma, const Vector& b, int n_err,
                              const RngSpec& rng);

struct IterativeLinearOptions {
    int iterations = 30;
    double tol = 1e-10;
    /// Trace errors computed in long double (the plateau sits well below
    /// double rounding for fine approximation levels).
    bool extended_precision = true;
};

/// Exact linear-Gaussian iteration; trace errors are measured against the
/// run's own limit, and the series against the accurate-model posterior.
ExperimentResult run_iterative_linear(const LinearModelPair& model, const Vector& b,
                                      const IterativeLinearOptions& options = {});

enum class UpdateKind { Mixture, Importance };

struct IterativeParticleOptions {
    int iterations = 10;    // L
    int n_particles = 100;  // N
    UpdateKind kind = UpdateKind::Mixture;
    bool compute_kl = true;
    double ess_warn_fraction = 0.01;  // warn when ESS < fraction * N
};

/// Particle iteration: sample the prior, then L rounds of model-error
/// sampling and mixture/importance updates. Accurate-model evaluations are
/// cached per generation and reused by the KL diagnostic; the mixture path
/// performs exactly iterations * n_particles accurate solves.
ExperimentResult run_iterative_particle(const ForwardModelPair& pair,
                                        const GaussianPriorOps& prior, const Matrix& gamma,
                                        const Vector& b, const IterativeParticleOptions& options,
                                        const RngSpec& rng, const Vector* truth = nullptr);
ExperimentResult run_iterative_particle(const ForwardModelPair& pair,
                                        const GaussianMeasure& prior, const Matrix& gamma,
                                        const Vector& b, const IterativeParticleOptions& options,
                                        const RngSpec& rng, const Vector* truth = nullptr);

/// Slope fit for a vs-limit error trace. The first update out of the prior
/// is a transient, so the fit starts at iteration 1, and it stops at the
/// trace's rounding plateau (detected from the trailing entries rather than
/// assumed at machine epsilon; solve conditioning sets the actual floor).
RateFit fit_trace_rate(const std::vector<double>& errors, double trace_epsilon);

/// Writes a result directory: config snapshot, trace and series CSVs,
/// estimate (CSV + binary), and a key = value metadata file.
void write_experiment_result(const std::string& directory, const ExperimentResult& result,
                             const std::string& config_snapshot);

/// Derives an independent seed stream for a sub-experiment.
RngSpec fork_rng(const RngSpec& rng, std::uint64_t tag);

}  // namespace moderr
