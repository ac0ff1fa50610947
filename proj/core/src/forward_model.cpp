#include "moderr/forward_model.hpp"

#include <sstream>

#include "moderr/parallel.hpp"

namespace moderr {

namespace {

template <typename Eval>
Matrix batch_eval(Eigen::Index rows, const Matrix& u_columns, const Eval& eval) {
    Matrix out(rows, u_columns.cols());
    parallel_for(static_cast<int>(u_columns.cols()), [&](int j) {
        try {
            out.col(j) = eval(u_columns.col(j));
        } catch (const std::exception& err) {
            std::ostringstream msg;
            msg << "forward evaluation failed at particle " << j << ": " << err.what();
            throw NumericalError(msg.str());
        }
    });
    return out;
}

}  // namespace

Matrix ForwardModelPair::accurate_batch(const Matrix& u_columns) const {
    return batch_eval(data_dim(), u_columns, [&](const auto& u) { return accurate(u); });
}

Matrix ForwardModelPair::approximate_batch(const Matrix& u_columns) const {
    return batch_eval(data_dim(), u_columns, [&](const auto& u) { return approximate(u); });
}

LinearForwardModelPair::LinearForwardModelPair(Matrix a_star, Matrix a, std::string label)
    : a_star_(std::move(a_star)), a_(std::move(a)), label_(std::move(label)) {
    if (a_star_.rows() != a_.rows() || a_star_.cols() != a_.cols())
        throw DimensionError("accurate and approximate operators must agree in shape");
}

}  // namespace moderr
