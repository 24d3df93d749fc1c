#include "infosal/kdp_entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "infosal/errors.hpp"

namespace infosal {

SampleMatrix::SampleMatrix(std::size_t n_samples, std::size_t n_dims)
    : n_samples_(n_samples), n_dims_(n_dims), values_(n_samples * n_dims, 0.0) {}

SampleMatrix SampleMatrix::from_rows(std::span<const double> row_major, std::size_t n_samples,
                                     std::size_t n_dims, std::vector<DimRole> roles) {
    if (row_major.size() != n_samples * n_dims) {
        throw InputError("sample buffer holds " + std::to_string(row_major.size()) +
                         " values, expected " + std::to_string(n_samples * n_dims));
    }
    SampleMatrix m(n_samples, n_dims);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (std::size_t d = 0; d < n_dims; ++d) m(i, d) = row_major[i * n_dims + d];
    }
    m.set_roles(std::move(roles));
    return m;
}

void SampleMatrix::set_roles(std::vector<DimRole> roles) {
    if (!roles.empty() && roles.size() != n_dims_) {
        throw InputError("got " + std::to_string(roles.size()) + " role tags for " +
                         std::to_string(n_dims_) + " dimensions");
    }
    roles_ = std::move(roles);
}

std::vector<std::size_t> SampleMatrix::dims_with_role(DimRole role) const {
    std::vector<std::size_t> out;
    for (std::size_t d = 0; d < roles_.size(); ++d) {
        if (roles_[d] == role) out.push_back(d);
    }
    return out;
}

void SampleMatrix::validate() const {
    if (n_dims_ == 0) throw InputError("sample matrix has no dimensions");
    for (double v : values_) {
        if (!std::isfinite(v)) throw InputError("sample matrix contains a non-finite value");
    }
    if (n_dims_ >= 63 || n_samples_ < (std::size_t{1} << n_dims_)) {
        throw AdmissibilityError("need at least 2^" + std::to_string(n_dims_) +
                                 " samples for " + std::to_string(n_dims_) +
                                 " dimensions, got " + std::to_string(n_samples_));
    }
}

double PartitionCell::log_volume() const {
    double acc = 0.0;
    for (const auto& b : bounds) acc += std::log(std::max(b.extent(), kMinExtent));
    return acc;
}

double PartitionCell::volume() const { return std::exp(log_volume()); }

std::size_t partition_max_depth(std::size_t n_samples) {
    return n_samples == 0 ? 0 : static_cast<std::size_t>(std::bit_width(n_samples)) - 1;
}

std::size_t partition_min_depth(std::size_t n_samples) {
    return partition_max_depth(n_samples) / 2;
}

namespace {

// Recursive median splitter over a subset of the matrix's columns. Calls
// `leaf(count, bounds, depth)` once per leaf, in depth-first order.
class KdSplitter {
public:
    KdSplitter(const SampleMatrix& samples, std::span<const std::size_t> dims,
               const EstimatorOptions& options)
        : samples_(samples),
          dims_(dims.begin(), dims.end()),
          options_(options),
          min_depth_(partition_min_depth(samples.n_samples())),
          max_depth_(partition_max_depth(samples.n_samples())),
          index_(samples.n_samples()),
          bounds_(dims.size()) {
        if (!(options.min_extent > 0.0) || !std::isfinite(options.min_extent)) {
            throw InputError("min_extent must be positive and finite");
        }
        if (!(options.uniformity_z > 0.0)) throw InputError("uniformity_z must be positive");
        if (options.min_split_count < 2) throw InputError("min_split_count must be at least 2");
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            auto col = samples_.column(dims_[k]);
            auto [lo, hi] = std::minmax_element(col.begin(), col.end());
            bounds_[k] = {*lo, *hi};
        }
    }

    const std::vector<Interval>& root_bounds() const { return bounds_; }

    template <class Leaf>
    void run(Leaf&& leaf) {
        recurse(0, index_.size(), 0, leaf);
    }

private:
    template <class Leaf>
    void recurse(std::size_t begin, std::size_t end, std::size_t depth, Leaf& leaf) {
        const std::size_t n = end - begin;
        if (is_leaf(begin, end, depth)) {
            leaf(n, std::span<const Interval>(bounds_), depth);
            return;
        }
        const std::size_t k = depth % dims_.size();
        const auto col = samples_.column(dims_[k]);
        const std::size_t mid = begin + (n - 1) / 2;
        std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                         index_.begin() + static_cast<std::ptrdiff_t>(mid),
                         index_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
        const double split = col[index_[mid]];

        const double hi = bounds_[k].hi;
        bounds_[k].hi = split;
        recurse(begin, mid + 1, depth + 1, leaf);
        bounds_[k].hi = hi;

        const double lo = bounds_[k].lo;
        bounds_[k].lo = split;
        recurse(mid + 1, end, depth + 1, leaf);
        bounds_[k].lo = lo;
    }

    bool is_leaf(std::size_t begin, std::size_t end, std::size_t depth) {
        const std::size_t n = end - begin;
        if (n < options_.min_split_count || depth >= max_depth_) return true;
        if (depth < min_depth_) return false;
        if (options_.stop == StopRule::fixed_depth) return true;
        return is_uniform(begin, end);
    }

    bool is_uniform(std::size_t begin, std::size_t end) {
        const std::size_t n = end - begin;
        const double root_n = std::sqrt(static_cast<double>(n));
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const double extent = bounds_[k].extent();
            if (!(extent > 0.0)) continue;
            const auto col = samples_.column(dims_[k]);
            scratch_.resize(n);
            for (std::size_t i = 0; i < n; ++i) scratch_[i] = col[index_[begin + i]];
            const auto mid = scratch_.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2);
            std::nth_element(scratch_.begin(), mid, scratch_.end());
            const double z = root_n * (2.0 * *mid - bounds_[k].lo - bounds_[k].hi) / extent;
            if (std::abs(z) >= options_.uniformity_z) return false;
        }
        return true;
    }

    const SampleMatrix& samples_;
    std::vector<std::size_t> dims_;
    const EstimatorOptions& options_;
    std::size_t min_depth_;
    std::size_t max_depth_;
    std::vector<std::size_t> index_;
    std::vector<Interval> bounds_;
    std::vector<double> scratch_;
};

std::vector<std::size_t> all_dims(const SampleMatrix& samples) {
    std::vector<std::size_t> dims(samples.n_dims());
    std::iota(dims.begin(), dims.end(), std::size_t{0});
    return dims;
}

double log_extent(const Interval& b, double floor) { return std::log(std::max(b.extent(), floor)); }

double joint_entropy_over(const SampleMatrix& samples, std::span<const std::size_t> dims,
                          const EstimatorOptions& options) {
    const double total = static_cast<double>(samples.n_samples());
    double h = 0.0;
    KdSplitter splitter(samples, dims, options);
    splitter.run([&](std::size_t count, std::span<const Interval> bounds, std::size_t) {
        const double n = static_cast<double>(count);
        double log_v = 0.0;
        for (const auto& b : bounds) log_v += log_extent(b, options.min_extent);
        h += (n / total) * (std::log(total / n) + log_v);
    });
    return h;
}

void require_both_roles(const SampleMatrix& samples, const char* what) {
    if (samples.roles().empty()) {
        throw InputError(std::string(what) + " needs surround/center role tags");
    }
    if (samples.dims_with_role(DimRole::surround).empty() ||
        samples.dims_with_role(DimRole::center).empty()) {
        throw InputError(std::string(what) + " needs at least one surround and one center dim");
    }
}

}  // namespace

Partition build_partition(const SampleMatrix& samples, const EstimatorOptions& options) {
    samples.validate();
    const auto dims = all_dims(samples);
    KdSplitter splitter(samples, dims, options);
    Partition p;
    p.root_bounds = splitter.root_bounds();
    p.n_samples = samples.n_samples();
    splitter.run([&](std::size_t count, std::span<const Interval> bounds, std::size_t depth) {
        p.cells.push_back({{bounds.begin(), bounds.end()}, count, depth});
    });
    return p;
}

double estimate_joint_entropy(const SampleMatrix& samples, const EstimatorOptions& options) {
    samples.validate();
    return joint_entropy_over(samples, all_dims(samples), options);
}

double estimate_conditional_entropy(const SampleMatrix& samples,
                                    const EstimatorOptions& options) {
    require_both_roles(samples, "conditional entropy");
    samples.validate();
    const auto surround = samples.dims_with_role(DimRole::surround);
    return joint_entropy_over(samples, all_dims(samples), options) -
           joint_entropy_over(samples, surround, options);
}

double estimate_kl_divergence(const SampleMatrix& samples, const EstimatorOptions& options) {
    require_both_roles(samples, "KL divergence");
    const auto& roles = samples.roles();
    if (!std::is_partitioned(roles.begin(), roles.end(),
                             [](DimRole r) { return r == DimRole::surround; })) {
        throw InputError("KL divergence needs all surround dims before the center dims");
    }
    samples.validate();

    const std::size_t n_surround = samples.dims_with_role(DimRole::surround).size();
    const std::size_t n_center = samples.n_dims() - n_surround;
    const double surround_weight =
        options.kl_volume == KlVolume::per_dimension
            ? static_cast<double>(n_center) / static_cast<double>(n_surround)
            : 1.0;

    const double total = static_cast<double>(samples.n_samples());
    double d = 0.0;
    const auto dims = all_dims(samples);
    KdSplitter splitter(samples, dims, options);
    splitter.run([&](std::size_t count, std::span<const Interval> bounds, std::size_t) {
        double log_sr = 0.0;
        double log_c = 0.0;
        for (std::size_t k = 0; k < bounds.size(); ++k) {
            (k < n_surround ? log_sr : log_c) += log_extent(bounds[k], options.min_extent);
        }
        d += (static_cast<double>(count) / total) * (log_c - surround_weight * log_sr);
    });
    return d;
}

}  // namespace infosal
