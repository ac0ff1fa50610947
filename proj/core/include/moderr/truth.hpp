#pragma once

#include "moderr/particles.hpp"

namespace moderr {

struct TruthData {
    Vector truth;
    Vector data;
};

/// data = accurate(truth) + noise draw. The approximate model is never
/// evaluated here. Streams: truth (TruthDraw, 0, 0), noise (NoiseDraw, 0, 0).
TruthData synthesize_data(const ForwardModelPair& pair, const Vector& truth,
                          const Matrix& noise_cov, const RngSpec& rng);

/// Truth drawn from the prior, then data as above.
TruthData truth_and_data(const ForwardModelPair& pair, const GaussianMeasure& prior,
                         const Matrix& noise_cov, const RngSpec& rng);
TruthData truth_and_data(const ForwardModelPair& pair, const PriorDraw& prior_draw,
                         const Matrix& noise_cov, const RngSpec& rng);

}  // namespace moderr
