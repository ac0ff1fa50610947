#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>

#include "moderr/gaussian.hpp"

namespace moderr {

/// Affine map u -> offset + linear * u (a linearized forward model).
struct AffineMap {
    Matrix linear;
    Vector offset;

    Vector operator()(const Vector& u) const { return offset + linear * u; }
};

/// Evaluation interface for an accurate/approximate forward-model pair.
/// model_error(u) = accurate(u) - approximate(u) is always formed from the two
/// evaluations. Accurate evaluations are counted (they dominate cost).
class ForwardModelPair {
public:
    virtual ~ForwardModelPair() = default;

    virtual Eigen::Index parameter_dim() const = 0;
    virtual Eigen::Index data_dim() const = 0;
    virtual std::string label() const { return "forward-model-pair"; }
    /// Rough cost of one accurate evaluation relative to one approximate one.
    virtual double cost_ratio() const { return 1.0; }

    Vector accurate(const Vector& u) const {
        ++accurate_calls_;
        return eval_accurate(u);
    }
    Vector approximate(const Vector& u) const {
        ++approximate_calls_;
        return eval_approximate(u);
    }
    Vector model_error(const Vector& u) const { return accurate(u) - approximate(u); }

    /// The affine form of the approximate model when it has one.
    virtual std::optional<AffineMap> approximate_affine() const { return std::nullopt; }

    /// Columnwise batch evaluation (parallel; deterministic assembly order).
    /// Evaluation failures are rethrown with the column index attached.
    Matrix accurate_batch(const Matrix& u_columns) const;
    Matrix approximate_batch(const Matrix& u_columns) const;

    std::int64_t accurate_call_count() const { return accurate_calls_.load(); }
    std::int64_t approximate_call_count() const { return approximate_calls_.load(); }
    void reset_call_counts() const {
        accurate_calls_ = 0;
        approximate_calls_ = 0;
    }

protected:
    virtual Vector eval_accurate(const Vector& u) const = 0;
    virtual Vector eval_approximate(const Vector& u) const = 0;

private:
    mutable std::atomic<std::int64_t> accurate_calls_{0};
    mutable std::atomic<std::int64_t> approximate_calls_{0};
};

/// Generic matrix-defined pair, used by toys and tests.
class LinearForwardModelPair final : public ForwardModelPair {
public:
    LinearForwardModelPair(Matrix a_star, Matrix a, std::string label = "linear-pair");

    Eigen::Index parameter_dim() const override { return a_.cols(); }
    Eigen::Index data_dim() const override { return a_.rows(); }
    std::string label() const override { return label_; }
    std::optional<AffineMap> approximate_affine() const override {
        return AffineMap{a_, Vector::Zero(a_.rows())};
    }

    const Matrix& accurate_matrix() const { return a_star_; }
    const Matrix& approximate_matrix() const { return a_; }

protected:
    Vector eval_accurate(const Vector& u) const override { return a_star_ * u; }
    Vector eval_approximate(const Vector& u) const override { return a_ * u; }

private:
    Matrix a_star_, a_;
    std::string label_;
};

}  // namespace moderr
