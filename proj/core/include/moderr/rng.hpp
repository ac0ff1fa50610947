#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace moderr {

/// Logical stream labels. Every random draw in the library belongs to one of
/// these streams so that two call sites can never consume from the same
/// substream by accident.
enum class StreamId : std::uint64_t {
    PriorSample = 1,
    ResampleIndex = 2,
    MixtureDraw = 3,
    ImportanceDraw = 4,
    NoiseDraw = 5,
    TruthDraw = 6,
    RejectionDraw = 7,
    Replicate = 8,
};

/// Seeding policy for an experiment.
///
/// Substream derivation rule (stable across versions of this library):
/// the substream for (stream, generation, index) is an mt19937_64 engine
/// seeded with
///
///   mix(mix(mix(mix(master_seed) ^ stream) ^ (generation + 1)) ^ (index + 1))
///
/// where mix is the splitmix64 finalizer. Uniform doubles are the top 53 bits
/// of one engine output; normals are Box-Muller pairs built from two uniforms.
/// Identical RngSpec and inputs therefore give bitwise-identical results no
/// matter how per-particle work is scheduled.
struct RngSpec {
    std::uint64_t master_seed = 0;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// A single deterministic random stream. Cheap to construct; not thread-safe
/// (each worker derives its own).
class SubStream {
public:
    explicit SubStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second member of each pair is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
        return z;
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

inline std::uint64_t derive_seed(const RngSpec& spec, StreamId stream,
                                 std::uint64_t generation, std::uint64_t index) {
    using detail::mix64;
    std::uint64_t s = mix64(spec.master_seed);
    s = mix64(s ^ static_cast<std::uint64_t>(stream));
    s = mix64(s ^ (generation + 1));
    s = mix64(s ^ (index + 1));
    return s;
}

inline SubStream substream(const RngSpec& spec, StreamId stream,
                           std::uint64_t generation, std::uint64_t index) {
    return SubStream(derive_seed(spec, stream, generation, index));
}

}  // namespace moderr
