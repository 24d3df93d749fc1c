#include "infosal/decorrelate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "infosal/errors.hpp"

namespace infosal {

PcaModel pca_fit(const SampleMatrix& vectors, double target_energy,
                 std::size_t max_components) {
    const std::size_t n = vectors.n_samples();
    const std::size_t d = vectors.n_dims();
    if (!(target_energy > 0.0 && target_energy <= 1.0)) {
        throw InputError("PCA target energy must lie in (0, 1]");
    }
    if (d == 0 || n <= d) {
        throw InputError("PCA needs more samples (" + std::to_string(n) + ") than dimensions (" +
                         std::to_string(d) + ")");
    }
    if (max_components == 0) throw InputError("PCA must keep at least one component");

    Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = vectors.column(j);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(col[i])) throw InputError("PCA input contains a non-finite value");
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
    }
    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    data.rowwise() -= model.mean.transpose();
    const Eigen::MatrixXd cov = (data.transpose() * data) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw InputError("PCA eigendecomposition failed");
    // Eigen sorts ascending.
    const Eigen::VectorXd values = solver.eigenvalues().reverse();
    const Eigen::MatrixXd vecs = solver.eigenvectors().rowwise().reverse();

    const double top = std::max(values(0), 0.0);
    const double total = values.cwiseMax(0.0).sum();
    const double positive_floor = top * 1e-12;

    std::size_t k = 0;
    double kept = 0.0;
    while (k < d && k < max_components && values(static_cast<Eigen::Index>(k)) > positive_floor) {
        kept += values(static_cast<Eigen::Index>(k));
        ++k;
        if (total > 0.0 && kept / total >= target_energy) break;
    }
    if (k == 0) {
        // All variance is zero: keep the leading direction so the model is usable.
        k = 1;
    }
    model.basis = vecs.leftCols(static_cast<Eigen::Index>(k));
    model.eigenvalues = values.head(static_cast<Eigen::Index>(k)).cwiseMax(0.0);
    model.energy_fraction = total > 0.0 ? model.eigenvalues.sum() / total : 1.0;
    return model;
}

SampleMatrix pca_project(const PcaModel& model, const SampleMatrix& vectors) {
    if (vectors.n_dims() != model.input_dims()) {
        throw InputError("PCA model expects " + std::to_string(model.input_dims()) +
                         " dimensions, got " + std::to_string(vectors.n_dims()));
    }
    const std::size_t n = vectors.n_samples();
    SampleMatrix out(n, model.kept());
    Eigen::VectorXd centered(static_cast<Eigen::Index>(vectors.n_dims()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < vectors.n_dims(); ++j) {
            centered(static_cast<Eigen::Index>(j)) =
                vectors(i, j) - model.mean(static_cast<Eigen::Index>(j));
        }
        const Eigen::VectorXd coords = model.basis.transpose() * centered;
        for (std::size_t c = 0; c < model.kept(); ++c) out(i, c) = coords(static_cast<Eigen::Index>(c));
    }
    return out;
}

namespace {

// Row k holds basis function k sampled at n points.
std::vector<double> dct_matrix(std::size_t n) {
    std::vector<double> m(n * n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / nn);
        for (std::size_t i = 0; i < n; ++i) {
            m[k * n + i] = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                            static_cast<double>(k) / (2.0 * nn));
        }
    }
    return m;
}

}  // namespace

std::vector<double> dct_ii(std::span<const double> x) {
    const std::size_t n = x.size();
    const auto m = dct_matrix(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += m[k * n + i] * x[i];
        out[k] = acc;
    }
    return out;
}

std::vector<double> idct_ii(std::span<const double> coefficients) {
    const std::size_t n = coefficients.size();
    const auto m = dct_matrix(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += m[k * n + i] * coefficients[k];
        out[i] = acc;
    }
    return out;
}

TemporalFeatureStack dct_temporal_decorrelate(const FrameStack& stack) {
    stack.validate();
    const std::size_t t = stack.size();
    if (t < 4) {
        throw InputError("temporal decorrelation needs at least 4 frames, got " +
                         std::to_string(t));
    }
    const std::size_t w = stack.frames.front().width();
    const std::size_t h = stack.frames.front().height();
    const std::size_t pixels = w * h;
    const auto m = dct_matrix(t);

    // coeffs[k] is the plane of basis k.
    std::vector<ImagePlane> coeffs(t, ImagePlane(w, h));
    std::vector<double> energy(t, 0.0);
    for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t k = 0; k < t; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < t; ++i) acc += m[k * t + i] * stack.frames[i].values()[p];
            coeffs[k].values()[p] = acc;
            energy[k] += acc * acc;
        }
    }

    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });

    TemporalFeatureStack out;
    out.width = w;
    out.height = h;
    out.basis_energy = energy;
    for (std::size_t rank = 1; rank < t / 2; ++rank) {
        out.basis_index.push_back(order[rank]);
        out.planes.push_back(std::move(coeffs[order[rank]]));
    }
    return out;
}

}  // namespace infosal
