#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "infosal/errors.hpp"
#include "infosal/kdp_entropy.hpp"
#include "test_support.hpp"

namespace infosal {
namespace {

using testing::columns_to_matrix;
using testing::histogram_entropy;

template <class Dist>
SampleMatrix draw(std::size_t n, std::size_t d, std::uint64_t seed, Dist dist) {
    std::mt19937_64 rng(seed);
    SampleMatrix m(n, d);
    for (std::size_t k = 0; k < d; ++k) {
        for (double& v : m.column(k)) v = dist(rng);
    }
    return m;
}

SampleMatrix uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
    return draw(n, d, seed, std::uniform_real_distribution<double>(0.0, 1.0));
}

std::vector<DimRole> roles(std::size_t surround, std::size_t center) {
    std::vector<DimRole> r(surround, DimRole::surround);
    r.insert(r.end(), center, DimRole::center);
    return r;
}

TEST(SampleMatrix, FromRowsAndValidation) {
    const std::vector<double> rows = {1, 2, 3, 4, 5, 6, 7, 8};
    const SampleMatrix m = SampleMatrix::from_rows(rows, 4, 2);
    EXPECT_EQ(m(2, 1), 6.0);
    EXPECT_EQ(m.column(0)[3], 7.0);
    EXPECT_THROW(SampleMatrix::from_rows(rows, 3, 2), InputError);
    EXPECT_THROW(SampleMatrix::from_rows(rows, 4, 2, {DimRole::center}), InputError);

    SampleMatrix bad(8, 2);
    bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(bad.validate(), InputError);
    EXPECT_THROW(SampleMatrix(3, 2).validate(), AdmissibilityError);
    EXPECT_NO_THROW(SampleMatrix(4, 2).validate());
}

TEST(Partition, DepthRule) {
    EXPECT_EQ(partition_max_depth(64), 6u);
    EXPECT_EQ(partition_min_depth(64), 3u);
    EXPECT_EQ(partition_max_depth(1000), 9u);
    EXPECT_EQ(partition_min_depth(1000), 4u);
}

TEST(Partition, GridOfEightByEight) {
    std::vector<std::vector<double>> cols(2, std::vector<double>(64));
    for (std::size_t i = 0; i < 64; ++i) {
        cols[0][i] = static_cast<double>(i % 8);
        cols[1][i] = static_cast<double>(i / 8);
    }
    EstimatorOptions opts;
    opts.stop = StopRule::fixed_depth;
    const Partition p = build_partition(columns_to_matrix(cols), opts);
    ASSERT_EQ(p.cells.size(), 8u);
    std::size_t total = 0;
    for (const auto& c : p.cells) {
        EXPECT_EQ(c.count, 8u);
        EXPECT_EQ(c.depth, 3u);
        total += c.count;
    }
    EXPECT_EQ(total, 64u);
}

// Cells tile the root box: volumes add up and no two interiors overlap.
void expect_tiles_root(const Partition& p) {
    double root = 1.0;
    for (const auto& b : p.root_bounds) root *= b.extent();
    double sum = 0.0;
    for (const auto& c : p.cells) {
        double v = 1.0;
        for (std::size_t k = 0; k < c.bounds.size(); ++k) {
            EXPECT_LE(c.bounds[k].lo, c.bounds[k].hi);
            EXPECT_GE(c.bounds[k].lo, p.root_bounds[k].lo);
            EXPECT_LE(c.bounds[k].hi, p.root_bounds[k].hi);
            v *= c.bounds[k].extent();
        }
        sum += v;
    }
    EXPECT_NEAR(sum, root, 1e-9 * root);
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        for (std::size_t j = i + 1; j < p.cells.size(); ++j) {
            double overlap = 1.0;
            for (std::size_t k = 0; k < p.root_bounds.size(); ++k) {
                const double lo = std::max(p.cells[i].bounds[k].lo, p.cells[j].bounds[k].lo);
                const double hi = std::min(p.cells[i].bounds[k].hi, p.cells[j].bounds[k].hi);
                overlap *= std::max(0.0, hi - lo);
            }
            EXPECT_LE(overlap, 1e-12 * root);
        }
    }
}

TEST(Partition, InvariantsOnRandomInputs) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t d = 1 + seed % 4;
        const std::size_t n = 40 + 37 * seed;
        const SampleMatrix m = draw(n, d, seed, std::normal_distribution<double>(0.0, 1.0));
        for (StopRule rule : {StopRule::fixed_depth, StopRule::uniformity}) {
            EstimatorOptions opts;
            opts.stop = rule;
            const Partition p = build_partition(m, opts);
            std::size_t total = 0;
            for (const auto& c : p.cells) {
                EXPECT_GE(c.count, 1u);
                EXPECT_LE(c.depth, partition_max_depth(n));
                EXPECT_GT(c.volume(), 0.0);
                total += c.count;
            }
            EXPECT_EQ(total, n);
            expect_tiles_root(p);
        }
    }
}

TEST(Partition, BalancedOnUniformSquare) {
    EstimatorOptions opts;
    opts.stop = StopRule::fixed_depth;
    const Partition p = build_partition(uniform(4096, 2, 3), opts);
    const double mean = 4096.0 / static_cast<double>(p.cells.size());
    for (const auto& c : p.cells) {
        EXPECT_LE(static_cast<double>(c.count), 2.0 * mean);
        EXPECT_GE(static_cast<double>(c.count), 0.5 * mean);
    }
}

TEST(Partition, CountsFollowTheSamples) {
    // Every sample lies inside (or on the boundary of) some cell.
    const SampleMatrix m = draw(300, 3, 8, std::exponential_distribution<double>(1.0));
    const Partition p = build_partition(m);
    for (std::size_t i = 0; i < m.n_samples(); ++i) {
        bool inside = false;
        for (const auto& c : p.cells) {
            bool in = true;
            for (std::size_t k = 0; k < 3; ++k) in = in && m(i, k) >= c.bounds[k].lo && m(i, k) <= c.bounds[k].hi;
            inside = inside || in;
        }
        EXPECT_TRUE(inside) << i;
    }
}

TEST(JointEntropy, UniformUnitSquareNearZero) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        EXPECT_NEAR(estimate_joint_entropy(uniform(10000, 2, seed)), 0.0, 0.1);
    }
}

TEST(JointEntropy, StandardNormalMonteCarlo) {
    const double truth = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    double abs_err = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const SampleMatrix m = draw(10000, 1, 100 + seed, std::normal_distribution<double>(0.0, 1.0));
        abs_err += std::abs(estimate_joint_entropy(m) - truth);
    }
    EXPECT_LE(abs_err / 30.0, 0.05);
}

TEST(JointEntropy, AgreesWithHistogramOracle) {
    for (std::size_t d : {1u, 2u}) {
        const std::size_t bins = d == 1 ? 64 : 16;
        const SampleMatrix samples[] = {
            uniform(4096, d, 21),
            draw(4096, d, 22, std::normal_distribution<double>(0.0, 1.0)),
            draw(4096, d, 23, std::exponential_distribution<double>(1.0)),
        };
        for (const auto& m : samples) {
            EXPECT_NEAR(estimate_joint_entropy(m), histogram_entropy(m, bins), 0.15) << "d=" << d;
        }
    }
}

TEST(JointEntropy, TranslationAndScaling) {
    const SampleMatrix m = draw(2000, 3, 9, std::normal_distribution<double>(0.0, 1.0));
    SampleMatrix shifted = m;
    const double scale[] = {2.0, 0.5, 10.0};
    for (std::size_t k = 0; k < 3; ++k) {
        for (double& v : shifted.column(k)) v = scale[k] * v + 7.0;
    }
    const double expect = estimate_joint_entropy(m) + std::log(2.0 * 0.5 * 10.0);
    EXPECT_NEAR(estimate_joint_entropy(shifted), expect, 1e-9);
}

TEST(JointEntropy, ConstantDimensionHitsTheFloor) {
    SampleMatrix m = uniform(256, 2, 4);
    for (double& v : m.column(1)) v = 0.25;
    // Splits along the constant dim waste depth, so only the floor's order
    // of magnitude is pinned.
    const double h = estimate_joint_entropy(m);
    EXPECT_TRUE(std::isfinite(h));
    EXPECT_NEAR(h, estimate_joint_entropy(uniform(256, 1, 4)) + std::log(kMinExtent), 2.0);
    EstimatorOptions opts;
    opts.min_extent = 1e-3;
    EXPECT_GT(estimate_joint_entropy(m, opts), h);
}

TEST(JointEntropy, OptionErrors) {
    const SampleMatrix m = uniform(64, 2, 1);
    EstimatorOptions opts;
    opts.min_extent = 0.0;
    EXPECT_THROW(estimate_joint_entropy(m, opts), InputError);
    opts = {};
    opts.uniformity_z = -1.0;
    EXPECT_THROW(estimate_joint_entropy(m, opts), InputError);
    EXPECT_THROW(estimate_joint_entropy(uniform(31, 5, 1)), AdmissibilityError);
}

TEST(ConditionalEntropy, DuplicatedCenterIsStronglyNegative) {
    SampleMatrix m = uniform(1024, 3, 5);
    for (std::size_t i = 0; i < m.n_samples(); ++i) m(i, 2) = m(i, 0);
    m.set_roles(roles(2, 1));
    SampleMatrix surround(1024, 2);
    for (std::size_t k = 0; k < 2; ++k) std::copy(m.column(k).begin(), m.column(k).end(), surround.column(k).begin());
    const double h = estimate_conditional_entropy(m);
    // Cell bounds come from split points, not from the samples, so the
    // copy shows up as a finite deficit rather than the clamp floor.
    EXPECT_LT(h, estimate_joint_entropy(surround) - 0.5);
}

TEST(ConditionalEntropy, IndependentUniformCenter) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SampleMatrix m = uniform(10000, 3, 40 + seed);
        m.set_roles(roles(2, 1));
        EXPECT_NEAR(estimate_conditional_entropy(m), 0.0, 0.15);
    }
}

TEST(ConditionalEntropy, SmallPatchIsAdmissible) {
    SampleMatrix m = uniform(64, 5, 6);
    m.set_roles(roles(4, 1));
    EXPECT_TRUE(std::isfinite(estimate_conditional_entropy(m)));
}

TEST(ConditionalEntropy, RoleErrors) {
    SampleMatrix m = uniform(64, 3, 6);
    EXPECT_THROW(estimate_conditional_entropy(m), InputError);
    m.set_roles(roles(3, 0));
    EXPECT_THROW(estimate_conditional_entropy(m), InputError);
}

TEST(KlDivergence, SameDistributionNearZero) {
    // Center drawn from the same law as each surround dim, independently.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SampleMatrix m = uniform(8192, 2, 60 + seed);
        m.set_roles(roles(1, 1));
        EXPECT_NEAR(estimate_kl_divergence(m), 0.0, 0.1);
    }
}

TEST(KlDivergence, ProjectedAndPerDimensionAgreeWhenBalanced) {
    SampleMatrix m = draw(4096, 2, 7, std::normal_distribution<double>(0.0, 1.0));
    m.set_roles(roles(1, 1));
    EstimatorOptions projected;
    projected.kl_volume = KlVolume::projected;
    EXPECT_NEAR(estimate_kl_divergence(m), estimate_kl_divergence(m, projected), 1e-12);
}

TEST(KlDivergence, PerDimensionIsScaleInvariant) {
    SampleMatrix m = draw(4096, 5, 8, std::normal_distribution<double>(0.0, 1.0));
    m.set_roles(roles(4, 1));
    SampleMatrix scaled = m;
    for (std::size_t k = 0; k < 5; ++k) {
        for (double& v : scaled.column(k)) v = 3.0 * v - 1.0;
    }
    EXPECT_NEAR(estimate_kl_divergence(m), estimate_kl_divergence(scaled), 1e-9);
}

TEST(KlDivergence, WideCenterScoresHigher) {
    // A center spread wider than its surround has a larger center volume in
    // every cell.
    SampleMatrix narrow = uniform(4096, 3, 9);
    SampleMatrix wide = narrow;
    for (double& v : wide.column(2)) v *= 4.0;
    narrow.set_roles(roles(2, 1));
    wide.set_roles(roles(2, 1));
    EXPECT_NEAR(estimate_kl_divergence(wide) - estimate_kl_divergence(narrow), std::log(4.0), 1e-9);
}

TEST(KlDivergence, OrderingAndRoleErrors) {
    SampleMatrix m = uniform(64, 3, 1);
    m.set_roles({DimRole::surround, DimRole::center, DimRole::surround});
    EXPECT_THROW(estimate_kl_divergence(m), InputError);
    m.set_roles(roles(0, 3));
    EXPECT_THROW(estimate_kl_divergence(m), InputError);
}

}  // namespace
}  // namespace infosal
