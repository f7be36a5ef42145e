#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/distance.hpp"
#include "motiflets/search.hpp"

namespace motiflets {

/// Extent function EF(k) = extent of the top k-motiflet, for k = 2..k_max.
struct ExtentProfile {
    Index window = 0;
    Index k_max = 0;            ///< largest k actually evaluated
    Index requested_k_max = 0;  ///< differs from k_max when the profile was truncated
    bool truncated = false;     ///< fewer than requested_k_max disjoint windows exist
    Exactness mode = Exactness::kApproximate;
    std::vector<double> extents;  ///< extents[k - 2]
    std::vector<Motiflet> motiflets;
    std::vector<Index> elbows;       ///< ascending k
    std::vector<Index> recommended;  ///< the elbows again, strongest slope ratio first
    /// k where EF(k) < EF(k-1). Always empty in exact mode; reported, never clamped.
    std::vector<Index> monotonicity_violations;

    [[nodiscard]] double extent(Index k) const { return extents.at(static_cast<std::size_t>(k - 2)); }
};

struct LengthScore {
    Index window = 0;
    double au_ef = 0.0;
    Index elbow_count = 0;
};

struct ProfileOptions {
    double alpha = 5.0;
    double subset_ceiling = 1e9;
    OracleLimits oracle_limits{};
};

struct LengthOptions {
    ProfileOptions profile{};
    std::uint64_t memory_budget = kDefaultMemoryBudget;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct LengthSelection {
    Index best_window = 0;
    std::vector<LengthScore> scores;  ///< in ascending window order
    std::vector<ExtentProfile> profiles;
};

/// Default slope offset for the elbow test: 1e-9 of the largest extent.
[[nodiscard]] double default_elbow_epsilon(std::span<const double> extents);

/// Elbow points of an EF given as extents[k - 2]. k is reported when
///   ((EF(k+1) - EF(k)) + eps) / ((EF(k) - EF(k-1)) + eps) > alpha,
/// i.e. k is the last cardinality before the steep rise, which is also the recommended
/// motif-set size. Only k in [3, k_max - 1] can be tested.
[[nodiscard]] std::vector<Index> find_elbows(std::span<const double> extents, double alpha = 5.0,
                                             std::optional<double> epsilon = std::nullopt);

struct ElbowPoint {
    Index k = 0;
    double ratio = 0.0;  ///< slope ratio that fired, always > alpha
};

/// Same test as find_elbows, ordered by descending ratio (ties to the smaller k).
[[nodiscard]] std::vector<ElbowPoint> rank_elbows(std::span<const double> extents,
                                                  double alpha = 5.0,
                                                  std::optional<double> epsilon = std::nullopt);

/// Area under the min-max normalised EF, divided by (k_max - 1) and by max(1, #elbows).
[[nodiscard]] LengthScore au_ef(const ExtentProfile& profile);

namespace detail {

// Best (k-1)-subset of a k-set by dropping one member; ties to the smaller tuple.
template <PairwiseDistances Source>
std::pair<double, std::vector<Index>> best_drop_one(const Source& source,
                                                    const std::vector<Index>& offsets) {
    double best = kInf;
    std::vector<Index> best_set;
    for (std::size_t r = 0; r < offsets.size(); ++r) {
        std::vector<Index> subset;
        subset.reserve(offsets.size() - 1);
        for (std::size_t t = 0; t < offsets.size(); ++t) {
            if (t != r) {
                subset.push_back(offsets[t]);
            }
        }
        const double sq = *pairwise_extent_sq(source, std::span<const Index>(subset), kInf);
        if (sq < best || (sq == best && subset < best_set)) {
            best = sq;
            best_set = std::move(subset);
        }
    }
    return {best, best_set};
}

}  // namespace detail

/// Computes EF from k_max down to 2; each k is seeded with the best k-subset of the
/// (k+1)-motiflet, whose extent bounds EF(k) from above.
template <PairwiseDistances Source>
[[nodiscard]] ExtentProfile extent_function(const Source& source, Index k_max,
                                            Exactness mode = Exactness::kApproximate,
                                            const ProfileOptions& options = {}) {
    if (k_max < 3) {
        throw ParameterError("k_max must be at least 3");
    }
    ExtentProfile profile;
    profile.window = detail::source_window(source);
    profile.requested_k_max = k_max;
    profile.mode = mode;
    const Index top = std::min(k_max, max_disjoint(source));
    if (top < 2) {
        throw FeasibilityError("fewer than 2 non-overlapping windows");
    }
    profile.truncated = top < k_max;
    profile.k_max = top;
    profile.extents.assign(static_cast<std::size_t>(top - 1), kInf);
    profile.motiflets.resize(static_cast<std::size_t>(top - 1));

    SearchOptions search;
    search.subset_ceiling = options.subset_ceiling;
    for (Index k = top; k >= 2; --k) {
        Motiflet m;
        switch (mode) {
            case Exactness::kApproximate: m = approx_k_motiflet(source, k, search).motiflet; break;
            case Exactness::kExact: m = exact_k_motiflet(source, k, search).motiflet; break;
            case Exactness::kOracle: m = oracle_k_motiflet(source, k, options.oracle_limits); break;
        }
        m.exactness = mode;
        const auto slot = static_cast<std::size_t>(k - 2);
        profile.extents[slot] = m.extent;
        if (k > 2) {
            auto [sq, subset] = detail::best_drop_one(source, m.offsets);
            search.seed_sq_bound = sq;
            search.seed_offsets = std::move(subset);
        }
        profile.motiflets[slot] = std::move(m);
    }
    for (Index k = 3; k <= top; ++k) {
        if (profile.extent(k) < profile.extent(k - 1)) {
            profile.monotonicity_violations.push_back(k);
        }
    }
    for (const auto& e : rank_elbows(profile.extents, options.alpha)) {
        profile.recommended.push_back(e.k);
    }
    profile.elbows = profile.recommended;
    std::sort(profile.elbows.begin(), profile.elbows.end());
    return profile;
}

[[nodiscard]] ExtentProfile extent_function(const SeriesView<double>& view, Index k_max,
                                            Exactness mode = Exactness::kApproximate,
                                            const ProfileOptions& options = {},
                                            std::uint64_t memory_budget = kDefaultMemoryBudget);

/// AU_EF sweep over candidate window lengths (approximate EF). Returns the minimiser,
/// ties to the smaller length. Windows are evaluated in parallel.
[[nodiscard]] LengthSelection select_length(const Eigen::VectorXd& series,
                                            std::span<const Index> windows, Index k_max,
                                            const LengthOptions& options = {});

}  // namespace motiflets
