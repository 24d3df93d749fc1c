#pragma once

// Nonparametric differential entropy and KL divergence estimation by
// adaptive k-d partitioning of the sample space. All results are in nats.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace infosal {

enum class DimRole : std::uint8_t { surround, center };

// N samples x D dimensions, stored column-major so that per-dimension scans
// during partitioning are contiguous.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t n_samples, std::size_t n_dims);

    // `row_major` holds n_samples rows of n_dims values each.
    static SampleMatrix from_rows(std::span<const double> row_major, std::size_t n_samples,
                                  std::size_t n_dims, std::vector<DimRole> roles = {});

    std::size_t n_samples() const noexcept { return n_samples_; }
    std::size_t n_dims() const noexcept { return n_dims_; }

    double& operator()(std::size_t sample, std::size_t dim) {
        return values_[dim * n_samples_ + sample];
    }
    double operator()(std::size_t sample, std::size_t dim) const {
        return values_[dim * n_samples_ + sample];
    }

    std::span<double> column(std::size_t dim) {
        return {values_.data() + dim * n_samples_, n_samples_};
    }
    std::span<const double> column(std::size_t dim) const {
        return {values_.data() + dim * n_samples_, n_samples_};
    }

    // Empty when the matrix is untagged; otherwise one role per dimension.
    const std::vector<DimRole>& roles() const noexcept { return roles_; }
    void set_roles(std::vector<DimRole> roles);

    std::vector<std::size_t> dims_with_role(DimRole role) const;

    // Throws InputError on non-finite values, AdmissibilityError if N < 2^D.
    void validate() const;

private:
    std::size_t n_samples_ = 0;
    std::size_t n_dims_ = 0;
    std::vector<double> values_;
    std::vector<DimRole> roles_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double extent() const noexcept { return hi - lo; }
};

// Extents below this are clamped before taking logs, so constant dimensions
// give a large negative (but finite) log-volume.
inline constexpr double kMinExtent = 1e-12;

struct PartitionCell {
    std::vector<Interval> bounds;
    std::size_t count = 0;
    std::size_t depth = 0;

    double log_volume() const;
    double volume() const;
};

struct Partition {
    std::vector<PartitionCell> cells;
    std::vector<Interval> root_bounds;
    std::size_t n_samples = 0;
};

enum class StopRule {
    // Every node at depth floor(log2(N)/2) is a leaf.
    fixed_depth,
    // Past depth floor(log2(N)/2), a node keeps splitting until the median of
    // every dimension sits within `uniformity_z` standard errors of the cell
    // midpoint.
    uniformity,
};

// How the KL estimate weighs the surround sub-volume against the center
// sub-volume of each cell.
enum class KlVolume {
    // log(V_c / V_sr), the raw ratio of projected sub-volumes.
    projected,
    // log V_c - (d_c / d_s) log V_sr: the surround volume is brought to the
    // center's dimensionality so that the ratio is unit-free.
    per_dimension,
};

struct EstimatorOptions {
    StopRule stop = StopRule::uniformity;
    double uniformity_z = 1.96;
    // Nodes holding fewer samples than this are never split.
    std::size_t min_split_count = 4;
    KlVolume kl_volume = KlVolume::per_dimension;
    // Cell extents are clamped to this before taking logs.
    double min_extent = kMinExtent;
};

// Minimum leaf depth floor(log2(N)/2) and hard depth cap floor(log2(N)).
std::size_t partition_min_depth(std::size_t n_samples);
std::size_t partition_max_depth(std::size_t n_samples);

// Splits round-robin over dimensions in declared order at the lower median.
Partition build_partition(const SampleMatrix& samples, const EstimatorOptions& options = {});

// Sum over cells of (n_j/N) log((N/n_j) V(A_j)). May be negative.
double estimate_joint_entropy(const SampleMatrix& samples, const EstimatorOptions& options = {});

// H(all dims) - H(surround dims). Needs at least one dimension of each role.
double estimate_conditional_entropy(const SampleMatrix& samples,
                                    const EstimatorOptions& options = {});

// One partition over all dimensions, surround dimensions first. Negative
// values are returned as-is; they indicate estimation bias.
double estimate_kl_divergence(const SampleMatrix& samples, const EstimatorOptions& options = {});

}  // namespace infosal
