#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "infosal/image.hpp"
#include "infosal/kdp_entropy.hpp"

namespace infosal {

struct PcaModel {
    Eigen::VectorXd mean;         // D
    Eigen::MatrixXd basis;        // D x k, orthonormal columns
    Eigen::VectorXd eigenvalues;  // k, nonincreasing
    double energy_fraction = 0.0;

    std::size_t input_dims() const noexcept { return static_cast<std::size_t>(basis.rows()); }
    std::size_t kept() const noexcept { return static_cast<std::size_t>(basis.cols()); }
};

// Eigendecomposition of the sample covariance; keeps the fewest leading
// components whose cumulative energy reaches `target_energy`, never more than
// `max_components` and never a component with a non-positive eigenvalue.
PcaModel pca_fit(const SampleMatrix& vectors, double target_energy,
                 std::size_t max_components = static_cast<std::size_t>(-1));

// Centered projection onto the kept basis; N x k, untagged.
SampleMatrix pca_project(const PcaModel& model, const SampleMatrix& vectors);

// Orthonormal DCT-II and its inverse (DCT-III).
std::vector<double> dct_ii(std::span<const double> x);
std::vector<double> idct_ii(std::span<const double> coefficients);

struct TemporalFeatureStack {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<ImagePlane> planes;          // one per retained basis
    std::vector<std::size_t> basis_index;    // DCT index of each plane
    std::vector<double> basis_energy;        // global energy of every basis, by index

    std::size_t n_bases() const noexcept { return planes.size(); }
};

// Per-pixel temporal DCT; bases ranked by energy summed over all pixels;
// ranks 2 .. floor(T/2) are kept (1-based), in rank order. Needs T >= 4.
TemporalFeatureStack dct_temporal_decorrelate(const FrameStack& stack);

}  // namespace infosal
