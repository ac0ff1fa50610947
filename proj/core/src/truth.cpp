#include "moderr/truth.hpp"

namespace moderr {

TruthData synthesize_data(const ForwardModelPair& pair, const Vector& truth,
                          const Matrix& noise_cov, const RngSpec& rng) {
    if (truth.size() != pair.parameter_dim())
        throw DimensionError("synthesize_data: truth does not match the model");
    if (noise_cov.rows() != pair.data_dim() || noise_cov.cols() != pair.data_dim())
        throw DimensionError("synthesize_data: noise covariance does not match the data");

    TruthData out;
    out.truth = truth;
    out.data = pair.accurate(truth);
    if (noise_cov.cwiseAbs().maxCoeff() > 0.0) {
        GaussianSampler noise(GaussianMeasure{Vector::Zero(pair.data_dim()), noise_cov});
        SubStream stream = substream(rng, StreamId::NoiseDraw, 0, 0);
        out.data += noise.draw(stream);
    }
    return out;
}

TruthData truth_and_data(const ForwardModelPair& pair, const PriorDraw& prior_draw,
                         const Matrix& noise_cov, const RngSpec& rng) {
    SubStream stream = substream(rng, StreamId::TruthDraw, 0, 0);
    return synthesize_data(pair, prior_draw(stream), noise_cov, rng);
}

TruthData truth_and_data(const ForwardModelPair& pair, const GaussianMeasure& prior,
                         const Matrix& noise_cov, const RngSpec& rng) {
    GaussianSampler sampler(prior);
    return truth_and_data(
        pair, [&sampler](SubStream& s) { return sampler.draw(s); }, noise_cov, rng);
}

}  // namespace moderr
