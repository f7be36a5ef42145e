#include <gtest/gtest.h>

#include "motiflets/search.hpp"
#include "support.hpp"

namespace {

using motiflets::DistanceSource;
using motiflets::Exactness;
using motiflets::Index;
using motiflets::MatrixSource;
using motiflets::SeriesView;
using testing_support::random_walk;

// Brute-force pair motif: smallest non-overlapping entry, earliest pair on ties.
template <typename Source>
std::pair<double, std::vector<Index>> min_pair(const Source& src) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> at;
    for (Index i = 0; i < src.count(); ++i) {
        for (Index j = i + 1; j < src.count(); ++j) {
            if (!src.overlaps(i, j) && src.sq_dist(i, j) < best) {
                best = src.sq_dist(i, j);
                at = {i, j};
            }
        }
    }
    return {best, at};
}

void expect_sound(const SeriesView<double>& view, const motiflets::Motiflet& m) {
    double worst = 0.0;
    for (std::size_t a = 0; a < m.offsets.size(); ++a) {
        for (std::size_t b = a + 1; b < m.offsets.size(); ++b) {
            EXPECT_FALSE(view.overlaps(m.offsets[a], m.offsets[b]));
            worst = std::max(worst,
                             motiflets::znorm_distance_naive(view, {m.offsets[a], m.offsets[b]}));
        }
    }
    EXPECT_NEAR(m.extent, worst, 1e-6);
    EXPECT_TRUE(std::is_sorted(m.offsets.begin(), m.offsets.end()));
}

struct Planted {
    Eigen::VectorXd values;
    std::vector<Index> copies;
};

Planted planted(Index l, std::vector<Index> copies, double noise, std::uint64_t seed) {
    Planted p{testing_support::gaussian_noise(copies.back() + 3 * l, noise, seed), copies};
    const Eigen::VectorXd shape = testing_support::bump_template(l);
    for (Index c : copies) {
        p.values.segment(c, l) = shape;
    }
    return p;
}

TEST(PairwiseExtent, Examples) {
    const auto p = planted(30, {40, 200}, 0.2, 41);
    const SeriesView<double> view(p.values, 30);
    const auto src = DistanceSource<double>::compute(view);

    const std::vector<Index> two{3, 120};
    EXPECT_NEAR(*motiflets::pairwise_extent(src, std::span<const Index>(two)),
                motiflets::znorm_distance_naive(view, {3, 120}), 1e-9);

    const std::vector<Index> three{40, 120, 200};
    const double far = std::max(motiflets::znorm_distance_naive(view, {40, 120}),
                                motiflets::znorm_distance_naive(view, {120, 200}));
    const auto extent = motiflets::pairwise_extent(src, std::span<const Index>(three));
    EXPECT_NEAR(*extent, far, 1e-6);
    EXPECT_LT(motiflets::znorm_distance_naive(view, {40, 200}), 1e-6);
    EXPECT_FALSE(motiflets::pairwise_extent(src, std::span<const Index>(three), 0.5 * *extent));

    const std::vector<Index> clash{40, 50};
    EXPECT_THROW((void)motiflets::pairwise_extent(src, std::span<const Index>(clash)),
                 motiflets::ContractViolation);
}

TEST(ApproxMotiflet, RecoversExactCopies) {
    const std::vector<Index> copies{60, 190, 330, 455, 610, 790};
    const auto p = planted(40, copies, 0.1, 42);
    const SeriesView<double> view(p.values, 40);
    const auto r = motiflets::approx_k_motiflet(view, 6);
    EXPECT_EQ(r.motiflet.offsets, copies);
    EXPECT_LT(r.motiflet.extent, 1e-6);
    EXPECT_EQ(r.motiflet.exactness, Exactness::kApproximate);
    EXPECT_EQ(r.motiflet.window, 40);
}

TEST(PairMotif, KTwoIsGlobalMinimum) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SeriesView<double> view(random_walk(300, 100 + seed), 20);
        const auto src = DistanceSource<double>::compute(view);
        const auto [best, at] = min_pair(src);
        const auto approx = motiflets::approx_k_motiflet(src, 2);
        const auto exact = motiflets::exact_k_motiflet(src, 2);
        EXPECT_EQ(approx.motiflet.sq_extent, best);
        EXPECT_EQ(exact.motiflet.sq_extent, best);
        EXPECT_EQ(exact.motiflet.offsets, at);
    }
}

TEST(WorstCase, ApproxIsTwiceExact) {
    const Index m = 8;
    const double r = 1.0;
    const double eps = 1e-3;
    const MatrixSource src(testing_support::two_ring_geometry(m, r, eps));
    const auto approx = motiflets::approx_k_motiflet(src, 3);
    const auto exact = motiflets::exact_k_motiflet(src, 3);
    const auto oracle = motiflets::oracle_k_motiflet(src, 3);
    EXPECT_NEAR(approx.motiflet.extent, 2 * r, 1e-12);
    EXPECT_NEAR(exact.motiflet.extent, r + eps, 1e-12);
    EXPECT_EQ(exact.motiflet.offsets, (std::vector<Index>{0, 1, m}));
    EXPECT_EQ(oracle.offsets, exact.motiflet.offsets);
    EXPECT_EQ(oracle.sq_extent, exact.motiflet.sq_extent);
    EXPECT_GE(approx.motiflet.extent / exact.motiflet.extent, 1.99);
    EXPECT_EQ(exact.motiflet.window, 0);
}

TEST(ExactMotiflet, AgreesWithOracle) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SeriesView<double> view(random_walk(300, 200 + seed), 20);
        const auto src = DistanceSource<double>::compute(view);
        for (Index k : {3, 4, 5}) {
            const auto approx = motiflets::approx_k_motiflet(src, k);
            const auto exact = motiflets::exact_k_motiflet(src, k);
            const auto oracle = motiflets::oracle_k_motiflet(src, k);
            EXPECT_EQ(exact.motiflet.sq_extent, oracle.sq_extent) << seed << " k=" << k;
            EXPECT_EQ(exact.motiflet.offsets, oracle.offsets) << seed << " k=" << k;
            EXPECT_LE(exact.motiflet.sq_extent, approx.motiflet.sq_extent);
            EXPECT_LE(approx.motiflet.extent, 2.0 * exact.motiflet.extent);
            expect_sound(view, exact.motiflet);
            expect_sound(view, approx.motiflet);
            EXPECT_TRUE(std::is_sorted(exact.state.trace.rbegin(), exact.state.trace.rend()));
            EXPECT_TRUE(std::is_sorted(approx.state.trace.rbegin(), approx.state.trace.rend()));
        }
    }
}

TEST(ExactMotiflet, KeepsOptimalIncumbent) {
    const std::vector<Index> copies{30, 150, 270, 400};
    const auto p = planted(25, copies, 0.3, 43);
    const SeriesView<double> view(p.values, 25);
    const auto src = DistanceSource<double>::compute(view);
    const auto approx = motiflets::approx_k_motiflet(src, 4);
    const auto exact = motiflets::exact_k_motiflet(src, 4);
    EXPECT_EQ(exact.motiflet.offsets, approx.motiflet.offsets);
    EXPECT_EQ(exact.motiflet.offsets, copies);
    EXPECT_GT(exact.state.stats.pruned, 0U);
    EXPECT_EQ(exact.state.stats.incumbent_updates, 1U);
}

TEST(ExactMotiflet, CeilingRaisesResourceError) {
    const SeriesView<double> view(random_walk(400, 44), 10);
    motiflets::SearchOptions options;
    options.subset_ceiling = 10.0;
    EXPECT_THROW((void)motiflets::exact_k_motiflet(view, 5, options), motiflets::ResourceError);
}

TEST(Search, FeasibilityAndParameters) {
    const SeriesView<double> view(random_walk(100, 45), 20);
    const auto src = DistanceSource<double>::compute(view);
    EXPECT_EQ(motiflets::max_disjoint(src), 8);
    EXPECT_THROW((void)motiflets::approx_k_motiflet(src, 9), motiflets::FeasibilityError);
    EXPECT_THROW((void)motiflets::exact_k_motiflet(src, 9), motiflets::FeasibilityError);
    EXPECT_THROW((void)motiflets::approx_k_motiflet(src, 1), motiflets::ParameterError);
    EXPECT_NO_THROW((void)motiflets::approx_k_motiflet(src, 8));
}

TEST(Search, Deterministic) {
    const SeriesView<double> view(random_walk(500, 46), 30);
    const auto a = motiflets::exact_k_motiflet(view, 4);
    const auto b = motiflets::exact_k_motiflet(view, 4);
    EXPECT_EQ(a.motiflet.offsets, b.motiflet.offsets);
    EXPECT_EQ(a.motiflet.sq_extent, b.motiflet.sq_extent);
    EXPECT_EQ(a.state.trace, b.state.trace);
}

TEST(OracleMotiflet, TinyMatrix) {
    Eigen::MatrixXd d(5, 5);
    d << 0, 4, 3, 9, 8,
         4, 0, 7, 2.5, 6,
         3, 7, 0, 5, 4,
         9, 2.5, 5, 0, 1,
         8, 6, 4, 1, 0;
    const MatrixSource src(d);
    const auto m = motiflets::oracle_k_motiflet(src, 2);
    EXPECT_EQ(m.offsets, (std::vector<Index>{3, 4}));
    EXPECT_DOUBLE_EQ(m.extent, 1.0);
}

TEST(OracleMotiflet, ConstantSeriesTakesEarliest) {
    const SeriesView<double> view(Eigen::VectorXd::Constant(60, 1.0), 10);
    const auto m = motiflets::oracle_k_motiflet(view, 3);
    EXPECT_EQ(m.extent, 0.0);
    EXPECT_EQ(m.offsets, (std::vector<Index>{0, 6, 12}));
    EXPECT_EQ(motiflets::exact_k_motiflet(view, 3).motiflet.offsets, m.offsets);
    EXPECT_EQ(motiflets::approx_k_motiflet(view, 3).motiflet.offsets, m.offsets);
}

TEST(OracleMotiflet, SizeGuard) {
    const SeriesView<double> view(random_walk(700, 47), 10);
    EXPECT_THROW((void)motiflets::oracle_k_motiflet(view, 3), motiflets::ResourceError);
    const SeriesView<double> small(random_walk(200, 47), 10);
    EXPECT_THROW((void)motiflets::oracle_k_motiflet(small, 7), motiflets::ResourceError);
}

}  // namespace
