#include "moderr/darcy2d.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

namespace moderr {

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

double Darcy2DConfig::noise_variance() const { return std::pow(10.0, -noise_index - 1); }

void Darcy2DConfig::validate() const {
    if (coarse_cells < 4) throw ConfigError("darcy2d coarse grid must have at least 4 cells");
    if (fine_cells <= coarse_cells || fine_cells % coarse_cells != 0)
        throw ConfigError("darcy2d coarse grid must divide the fine grid");
    if (!(obs_width > 0.0)) throw ConfigError("darcy2d obs_width must be positive");
    if (obs_per_side < 1) throw ConfigError("darcy2d needs at least one observation point");
    if (noise_index < 1 || noise_index > 3)
        throw ConfigError("darcy2d noise_index must lie in {1, 2, 3}");
}

DarcyGrid::DarcyGrid(int cells, const Darcy2DConfig& config)
    : cells_(cells), eps_(config.obs_width) {
    const double h = spacing();
    const Eigen::Index n = dim();

    rhs_.resize(n);
    for (int j = 0; j < cells_; ++j) {
        const double y = (j + 0.5) * h;
        for (int i = 0; i < cells_; ++i) {
            const double x = (i + 0.5) * h;
            rhs_[i + static_cast<Eigen::Index>(j) * cells_] =
                h * h * config.source_amplitude * std::sin(M_PI * x) * std::sin(M_PI * y);
        }
    }

    const int q = config.obs_per_side;
    obs_weights_.resize(static_cast<Eigen::Index>(q) * q, n);
    const double prefactor = config.normalized_mollifier ? 1.0 / (2.0 * M_PI * eps_ * eps_)
                                                         : 1.0 / (2.0 * M_PI * eps_);
    for (int qy = 0; qy < q; ++qy) {
        const double py = (qy + 1) / static_cast<double>(q + 1);
        for (int qx = 0; qx < q; ++qx) {
            const double px = (qx + 1) / static_cast<double>(q + 1);
            const Eigen::Index row = qx + static_cast<Eigen::Index>(qy) * q;
            for (int j = 0; j < cells_; ++j) {
                const double y = (j + 0.5) * h;
                for (int i = 0; i < cells_; ++i) {
                    const double x = (i + 0.5) * h;
                    const double r2 = (x - px) * (x - px) + (y - py) * (y - py);
                    obs_weights_(row, i + static_cast<Eigen::Index>(j) * cells_) =
                        prefactor * std::exp(-0.5 * r2 / (eps_ * eps_)) * h * h;
                }
            }
        }
    }
}

SpMat DarcyGrid::assemble(const Vector& u) const {
    if (u.size() != dim()) throw DimensionError("darcy2d: field does not match the grid");
    if (!u.allFinite()) throw NumericalError("darcy2d: non-finite log-permeability");
    const int g = cells_;
    const Vector kappa = u.array().exp();
    if (!kappa.allFinite() || !(kappa.minCoeff() > 0.0))
        throw NumericalError("darcy2d: permeability overflow or underflow");

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * dim());
    Vector diag = Vector::Zero(dim());
    auto at = [g](int i, int j) { return i + static_cast<Eigen::Index>(j) * g; };

    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            const Eigen::Index c = at(i, j);
            // Faces in +x and +y; harmonic transmissibility between cells.
            if (i + 1 < g) {
                const double k = harmonic(kappa[c], kappa[at(i + 1, j)]);
                diag[c] += k;
                diag[at(i + 1, j)] += k;
                entries.emplace_back(c, at(i + 1, j), -k);
                entries.emplace_back(at(i + 1, j), c, -k);
            }
            if (j + 1 < g) {
                const double k = harmonic(kappa[c], kappa[at(i, j + 1)]);
                diag[c] += k;
                diag[at(i, j + 1)] += k;
                entries.emplace_back(c, at(i, j + 1), -k);
                entries.emplace_back(at(i, j + 1), c, -k);
            }
            // Dirichlet walls at half-cell distance: transmissibility 2 kappa.
            if (i == 0) diag[c] += 2.0 * kappa[c];
            if (i == g - 1) diag[c] += 2.0 * kappa[c];
            if (j == 0) diag[c] += 2.0 * kappa[c];
            if (j == g - 1) diag[c] += 2.0 * kappa[c];
        }
    }
    for (Eigen::Index c = 0; c < dim(); ++c) entries.emplace_back(c, c, diag[c]);

    SpMat s(dim(), dim());
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

Vector DarcyGrid::solve(const Vector& u) const {
    const SpMat s = assemble(u);
    Eigen::SimplicialLLT<SpMat> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("darcy2d: sparse factorization failed");
    ++solve_count_;
    Vector p = llt.solve(rhs_);
    // One refinement pass keeps the residual at rounding level.
    p += llt.solve(rhs_ - s * p);
    return p;
}

Vector DarcyGrid::observe(const Vector& p) const {
    if (p.size() != dim()) throw DimensionError("darcy2d: pressure does not match the grid");
    return obs_weights_ * p;
}

std::pair<Vector, Matrix> DarcyGrid::linearize(const Vector& u0) const {
    const SpMat s = assemble(u0);
    Eigen::SimplicialLLT<SpMat> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("darcy2d: sparse factorization failed");

    ++solve_count_;
    const Vector p0 = llt.solve(rhs_);

    const Eigen::Index n_obs = obs_weights_.rows();
    Matrix adjoints(dim(), n_obs);
    for (Eigen::Index j = 0; j < n_obs; ++j) {
        ++solve_count_;
        adjoints.col(j) = llt.solve(obs_weights_.row(j).transpose());
    }

    // (DF)_{jk} = -sum_faces dkappa_f/du_k (lambda_j,L - lambda_j,R)(p_L - p_R),
    // with the Dirichlet faces contributing -2 e^{u_k} lambda_k p_k.
    const int g = cells_;
    const Vector kappa = u0.array().exp();
    Matrix jac = Matrix::Zero(n_obs, dim());
    auto at = [g](int i, int j) { return i + static_cast<Eigen::Index>(j) * g; };

    auto interior_face = [&](Eigen::Index a, Eigen::Index b) {
        const double ka = kappa[a], kb = kappa[b];
        const double k = harmonic(ka, kb);
        const double da = k * kb / (ka + kb);  // dkappa_f / du_a
        const double db = k * ka / (ka + kb);
        const double dp = p0[a] - p0[b];
        for (Eigen::Index j = 0; j < n_obs; ++j) {
            const double dl = adjoints(a, j) - adjoints(b, j);
            jac(j, a) -= da * dl * dp;
            jac(j, b) -= db * dl * dp;
        }
    };
    auto boundary_face = [&](Eigen::Index c) {
        const double dk = 2.0 * kappa[c];
        for (Eigen::Index j = 0; j < n_obs; ++j) jac(j, c) -= dk * adjoints(c, j) * p0[c];
    };

    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            const Eigen::Index c = at(i, j);
            if (i + 1 < g) interior_face(c, at(i + 1, j));
            if (j + 1 < g) interior_face(c, at(i, j + 1));
            if (i == 0) boundary_face(c);
            if (i == g - 1) boundary_face(c);
            if (j == 0) boundary_face(c);
            if (j == g - 1) boundary_face(c);
        }
    }

    return {obs_weights_ * p0, std::move(jac)};
}

Vector DarcyGrid::cell_centers_x() const {
    Vector x(dim());
    const double h = spacing();
    for (int j = 0; j < cells_; ++j)
        for (int i = 0; i < cells_; ++i)
            x[i + static_cast<Eigen::Index>(j) * cells_] = (i + 0.5) * h;
    return x;
}

Vector DarcyGrid::cell_centers_y() const {
    Vector y(dim());
    const double h = spacing();
    for (int j = 0; j < cells_; ++j)
        for (int i = 0; i < cells_; ++i)
            y[i + static_cast<Eigen::Index>(j) * cells_] = (j + 0.5) * h;
    return y;
}

Vector darcy2d_solve(const Vector& u, const DarcyGrid& grid) { return grid.solve(u); }
Vector darcy2d_observe(const Vector& p, const DarcyGrid& grid) { return grid.observe(p); }
std::pair<Vector, Matrix> darcy2d_linearize(const Vector& u0, const DarcyGrid& grid) {
    return grid.linearize(u0);
}

Vector darcy2d_prolong(int coarse_cells, int fine_cells, const Vector& coarse_values) {
    if (coarse_values.size() != static_cast<Eigen::Index>(coarse_cells) * coarse_cells)
        throw DimensionError("darcy2d_prolong: values do not match the coarse grid");
    const double hc = 1.0 / coarse_cells;
    const double hf = 1.0 / fine_cells;
    Vector out(static_cast<Eigen::Index>(fine_cells) * fine_cells);
    auto coarse_at = [&](int i, int j) {
        return coarse_values[i + static_cast<Eigen::Index>(j) * coarse_cells];
    };
    for (int j = 0; j < fine_cells; ++j) {
        const double y = (j + 0.5) * hf;
        double sy = y / hc - 0.5;
        int jy = static_cast<int>(std::floor(sy));
        jy = std::max(0, std::min(jy, coarse_cells - 2));
        const double ty = std::clamp(sy - jy, 0.0, 1.0);
        for (int i = 0; i < fine_cells; ++i) {
            const double x = (i + 0.5) * hf;
            double sx = x / hc - 0.5;
            int ix = static_cast<int>(std::floor(sx));
            ix = std::max(0, std::min(ix, coarse_cells - 2));
            const double tx = std::clamp(sx - ix, 0.0, 1.0);
            const double v00 = coarse_at(ix, jy), v10 = coarse_at(ix + 1, jy);
            const double v01 = coarse_at(ix, jy + 1), v11 = coarse_at(ix + 1, jy + 1);
            out[i + static_cast<Eigen::Index>(j) * fine_cells] =
                (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
                tx * ty * v11;
        }
    }
    return out;
}

Vector darcy2d_restrict(int fine_cells, int coarse_cells, const Vector& fine_values) {
    if (fine_values.size() != static_cast<Eigen::Index>(fine_cells) * fine_cells)
        throw DimensionError("darcy2d_restrict: values do not match the fine grid");
    if (fine_cells % coarse_cells != 0)
        throw DimensionError("darcy2d_restrict: coarse grid must divide the fine grid");
    const int ratio = fine_cells / coarse_cells;
    Vector out = Vector::Zero(static_cast<Eigen::Index>(coarse_cells) * coarse_cells);
    for (int j = 0; j < fine_cells; ++j)
        for (int i = 0; i < fine_cells; ++i)
            out[(i / ratio) + static_cast<Eigen::Index>(j / ratio) * coarse_cells] +=
                fine_values[i + static_cast<Eigen::Index>(j) * fine_cells];
    return out / static_cast<double>(ratio * ratio);
}

Darcy2DPair::Darcy2DPair(const Darcy2DConfig& config) : config_(config) {
    config_.validate();
    fine_ = std::make_unique<DarcyGrid>(config_.fine_cells, config_);
    coarse_ = std::make_unique<DarcyGrid>(config_.coarse_cells, config_);
    auto [baseline, jac] = coarse_->linearize(Vector::Zero(coarse_->dim()));
    baseline_ = std::move(baseline);
    jacobian_ = std::move(jac);
}

double Darcy2DPair::cost_ratio() const {
    const double r = static_cast<double>(config_.fine_cells) / config_.coarse_cells;
    return r * r * r;  // solve cost grows roughly like cells^3 for the direct solver
}

Vector Darcy2DPair::eval_accurate(const Vector& u) const {
    const Vector u_fine = darcy2d_prolong(config_.coarse_cells, config_.fine_cells, u);
    return fine_->forward(u_fine);
}

Vector Darcy2DPair::eval_approximate(const Vector& u) const { return baseline_ + jacobian_ * u; }

std::unique_ptr<Darcy2DPair> darcy2d_pair(const Darcy2DConfig& config) {
    return std::make_unique<Darcy2DPair>(config);
}

Vector darcy_two_bump_truth(int cells, const TwoBumpTruth& b) {
    Vector u(static_cast<Eigen::Index>(cells) * cells);
    const double h = 1.0 / cells;
    for (int j = 0; j < cells; ++j) {
        const double y = (j + 0.5) * h;
        for (int i = 0; i < cells; ++i) {
            const double x = (i + 0.5) * h;
            const double r1 =
                (x - b.x1) * (x - b.x1) + (y - b.y1) * (y - b.y1);
            const double r2 =
                (x - b.x2) * (x - b.x2) + (y - b.y2) * (y - b.y2);
            u[i + static_cast<Eigen::Index>(j) * cells] =
                b.amplitude1 * std::exp(-0.5 * r1 / (b.width1 * b.width1)) +
                b.amplitude2 * std::exp(-0.5 * r2 / (b.width2 * b.width2));
        }
    }
    return u;
}

}  // namespace moderr
