#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "motiflets/distance.hpp"
#include "motiflets/errors.hpp"
#include "motiflets/series.hpp"

namespace motiflets {

enum class Exactness { kApproximate, kExact, kOracle };

[[nodiscard]] constexpr std::string_view to_string(Exactness e) noexcept {
    switch (e) {
        case Exactness::kApproximate: return "approximate";
        case Exactness::kExact: return "exact";
        case Exactness::kOracle: return "oracle";
    }
    return "unknown";
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A k-element motif set: ascending start offsets and their extent (max pairwise z-ED).
struct Motiflet {
    std::vector<Index> offsets;
    double extent = kInf;
    double sq_extent = kInf;
    Index window = 0;  ///< 0 when searched on an abstract matrix
    Exactness exactness = Exactness::kApproximate;

    [[nodiscard]] Index k() const noexcept { return static_cast<Index>(offsets.size()); }
};

struct SearchStats {
    std::uint64_t queries = 0;              ///< query offsets visited
    std::uint64_t candidates_examined = 0;  ///< candidate sets whose extent was evaluated
    std::uint64_t pruned = 0;               ///< queries or branches cut by the best-so-far
    std::uint64_t subsets_enumerated = 0;   ///< complete k-subsets scored (exact / oracle)
    std::uint64_t incumbent_updates = 0;
    double estimated_subsets = 0.0;  ///< exact search: sum_i C(|range_i|, k-1)
};

/// Best-so-far bookkeeping. `best_sq_extent` never increases during a run; every value it
/// takes is appended to `trace`.
struct SearchState {
    double best_sq_extent = kInf;
    std::vector<Index> best_offsets;
    SearchStats stats;
    std::vector<double> trace;

    [[nodiscard]] double best_extent() const { return std::sqrt(best_sq_extent); }

    void update(double sq, std::vector<Index> offsets) {
        best_sq_extent = sq;
        best_offsets = std::move(offsets);
        trace.push_back(sq);
        ++stats.incumbent_updates;
    }
};

struct SearchResult {
    Motiflet motiflet;
    SearchState state;
};

struct SearchOptions {
    /// Optional incumbent: an upper bound on the squared extent and (optionally) a set
    /// achieving it. Used to seed extent-function sweeps from k+1.
    double seed_sq_bound = kInf;
    std::vector<Index> seed_offsets;
    /// Exact search refuses when the estimated number of candidate subsets exceeds this.
    double subset_ceiling = 1e9;
};

struct OracleLimits {
    Index max_count = 512;
    Index max_k = 6;
};

namespace detail {

template <typename Source>
Index source_window(const Source& source) {
    if constexpr (requires { source.window(); }) {
        return source.window();
    } else {
        return 0;
    }
}

// Binomial coefficient as a double, saturating at +inf.
inline double binomial(Index m, Index r) {
    if (r < 0 || m < r) {
        return 0.0;
    }
    r = std::min(r, m - r);
    double out = 1.0;
    for (Index t = 1; t <= r; ++t) {
        out = out * static_cast<double>(m - r + t) / static_cast<double>(t);
        if (!std::isfinite(out)) {
            return kInf;
        }
    }
    return out;
}

template <PairwiseDistances Source>
void check_members(const Source& source, std::span<const Index> candidate) {
    for (std::size_t a = 0; a < candidate.size(); ++a) {
        if (candidate[a] < 0 || candidate[a] >= source.count()) {
            throw ContractViolation("candidate offset out of range");
        }
        for (std::size_t b = a + 1; b < candidate.size(); ++b) {
            if (source.overlaps(candidate[a], candidate[b])) {
                throw ContractViolation("candidate offsets " + std::to_string(candidate[a]) +
                                        " and " + std::to_string(candidate[b]) + " overlap");
            }
        }
    }
}

// Max pairwise squared distance, or nullopt as soon as one pair reaches `sq_bound`.
template <PairwiseDistances Source>
std::optional<double> pairwise_extent_sq(const Source& source, std::span<const Index> candidate,
                                         double sq_bound) {
    double worst = 0.0;
    for (std::size_t a = 0; a < candidate.size(); ++a) {
        for (std::size_t b = a + 1; b < candidate.size(); ++b) {
            const auto d = static_cast<double>(source.sq_dist(candidate[a], candidate[b]));
            if (d >= sq_bound) {
                return std::nullopt;
            }
            worst = std::max(worst, d);
        }
    }
    return worst;
}

template <PairwiseDistances Source>
Motiflet make_motiflet(const Source& source, std::vector<Index> offsets, double sq,
                       Exactness exactness) {
    std::sort(offsets.begin(), offsets.end());
    Motiflet m;
    m.offsets = std::move(offsets);
    m.sq_extent = sq;
    m.extent = std::sqrt(sq);
    m.window = source_window(source);
    m.exactness = exactness;
    return m;
}

}  // namespace detail

/// Greedy ascending-offset set of mutually non-overlapping items, stopping at `limit`.
template <PairwiseDistances Source>
[[nodiscard]] std::vector<Index> greedy_disjoint(const Source& source,
                                                 Index limit = std::numeric_limits<Index>::max()) {
    std::vector<Index> picked;
    for (Index j = 0; j < source.count() && static_cast<Index>(picked.size()) < limit; ++j) {
        const bool clash = std::any_of(picked.begin(), picked.end(),
                                       [&](Index p) { return source.overlaps(p, j); });
        if (!clash) {
            picked.push_back(j);
        }
    }
    return picked;
}

/// Size of the greedy disjoint set: exact for interval-style trivial matches, a lower
/// bound for arbitrary predicates.
template <PairwiseDistances Source>
[[nodiscard]] Index max_disjoint(const Source& source) {
    return static_cast<Index>(greedy_disjoint(source).size());
}

template <PairwiseDistances Source>
void check_feasible(const Source& source, Index k) {
    if (k < 2) {
        throw ParameterError("k must be at least 2");
    }
    const Index avail = max_disjoint(source);
    if (avail < k) {
        throw FeasibilityError("only " + std::to_string(avail) +
                               " mutually non-overlapping windows exist, k = " + std::to_string(k));
    }
}

/// Extent (unsquared) of a non-overlapping candidate set, or nullopt once any pair
/// reaches `bound`.
template <PairwiseDistances Source>
[[nodiscard]] std::optional<double> pairwise_extent(const Source& source,
                                                    std::span<const Index> candidate,
                                                    double bound = kInf) {
    detail::check_members(source, candidate);
    const double sq_bound = std::isinf(bound) ? bound : bound * bound;
    auto sq = detail::pairwise_extent_sq(source, candidate, sq_bound);
    if (!sq) {
        return std::nullopt;
    }
    return std::sqrt(*sq);
}

/// Approximate top k-motiflet: for each query, the greedy non-trivial (k-1)-NN within the
/// best-so-far range is scored with early abandoning. At most twice the optimal extent.
template <PairwiseDistances Source>
[[nodiscard]] SearchResult approx_k_motiflet(const Source& source, Index k,
                                             const SearchOptions& options = {}) {
    check_feasible(source, k);
    SearchState state;
    state.best_sq_extent = options.seed_sq_bound;
    state.best_offsets = options.seed_offsets;
    state.trace.push_back(state.best_sq_extent);

    auto cursor = source.cursor();
    std::vector<std::pair<double, Index>> scratch;
    for (Index i = 0; i < source.count(); ++i) {
        ++state.stats.queries;
        const auto row = source.row(i, cursor);
        Index within = 1;  // the query itself
        for (Index j = 0; j < source.count() && within < k; ++j) {
            if (j != i && static_cast<double>(row[static_cast<std::size_t>(j)]) < state.best_sq_extent) {
                ++within;
            }
        }
        if (within < k) {
            ++state.stats.pruned;
            continue;
        }
        const auto knn = detail::greedy_knn(source, row, i, k, state.best_sq_extent, scratch);
        if (static_cast<Index>(knn.size()) < k) {
            continue;
        }
        const auto members = knn.members();
        ++state.stats.candidates_examined;
        const auto sq = detail::pairwise_extent_sq(source, std::span<const Index>(members),
                                                   state.best_sq_extent);
        if (!sq) {
            ++state.stats.pruned;
            continue;
        }
        if (*sq < state.best_sq_extent) {
            auto sorted = members;
            std::sort(sorted.begin(), sorted.end());
            state.update(*sq, std::move(sorted));
        }
    }
    if (state.best_offsets.empty()) {
        // Near the packing limit the greedy neighbour lists can all come up short; any
        // disjoint k-set is still a valid (if loose) answer.
        auto fallback = greedy_disjoint(source, k);
        const double sq =
                *detail::pairwise_extent_sq(source, std::span<const Index>(fallback), kInf);
        state.update(sq, std::move(fallback));
    }
    SearchResult out;
    out.motiflet = detail::make_motiflet(source, state.best_offsets, state.best_sq_extent,
                                         Exactness::kApproximate);
    out.state = std::move(state);
    return out;
}

namespace detail {

// Branch-and-bound over k-subsets that start at the query offset, members added in
// ascending offset order. Ties on extent go to the lexicographically smallest tuple.
template <PairwiseDistances Source>
class ExactEnumerator {
public:
    ExactEnumerator(const Source& source, Index k, SearchState& state)
        : source_(source), k_(k), state_(state) {
        seed_ = state_.best_offsets;
    }

    // Candidates: ascending offsets > query that do not overlap it, with squared query
    // distance within the current bound.
    void run_query(Index query, std::span<const typename Source::value_type> row) {
        int lex = seed_.empty() ? -1 : compare(query, seed_[0]);
        if (lex > 0) {
            strict_ = true;  // every later tuple is lexicographically larger than the seed
        }
        const bool ties = !strict_ && lex <= 0;
        candidates_.clear();
        query_sq_.clear();
        for (Index j = query + 1; j < source_.count(); ++j) {
            const auto d = static_cast<double>(row[static_cast<std::size_t>(j)]);
            const bool inside = ties ? d <= state_.best_sq_extent : d < state_.best_sq_extent;
            if (inside && !source_.overlaps(query, j)) {
                candidates_.push_back(j);
                query_sq_.push_back(d);
            }
        }
        if (static_cast<Index>(candidates_.size()) < k_ - 1) {
            ++state_.stats.pruned;
            return;
        }
        chosen_.assign(1, query);
        descend(0, 1, 0.0, lex);
    }

private:
    static int compare(Index a, Index b) { return a < b ? -1 : (a > b ? 1 : 0); }

    void descend(std::size_t pos, Index depth, double current, int lex) {
        const auto needed = static_cast<std::size_t>(k_ - depth);
        for (std::size_t p = pos; p + needed <= candidates_.size(); ++p) {
            const Index c = candidates_[p];
            bool clash = false;
            for (std::size_t t = 1; t < chosen_.size() && !clash; ++t) {
                clash = source_.overlaps(chosen_[t], c);
            }
            if (clash) {
                continue;
            }
            int lex_c = lex;
            if (lex_c == 0 && !strict_) {
                lex_c = compare(c, seed_[static_cast<std::size_t>(depth)]);
            }
            const bool ties = !strict_ && lex_c <= 0;

            double worst = std::max(current, query_sq_[p]);
            bool cut = worst > state_.best_sq_extent || (!ties && worst == state_.best_sq_extent);
            for (std::size_t t = 1; t < chosen_.size() && !cut; ++t) {
                worst = std::max(worst, static_cast<double>(source_.sq_dist(chosen_[t], c)));
                cut = worst > state_.best_sq_extent ||
                      (!ties && worst == state_.best_sq_extent);
            }
            if (cut) {
                ++state_.stats.pruned;
                continue;
            }
            chosen_.push_back(c);
            if (depth + 1 == k_) {
                ++state_.stats.subsets_enumerated;
                const bool wins = worst < state_.best_sq_extent || (!strict_ && lex_c < 0);
                if (wins) {
                    state_.update(worst, chosen_);
                    strict_ = true;  // tuples found from here on are lexicographically larger
                }
            } else {
                descend(p + 1, depth + 1, worst, lex_c);
            }
            chosen_.pop_back();
        }
    }

    const Source& source_;
    Index k_;
    SearchState& state_;
    std::vector<Index> seed_;
    bool strict_ = false;
    std::vector<Index> candidates_;
    std::vector<double> query_sq_;
    std::vector<Index> chosen_;
};

}  // namespace detail

/// Exact top k-motiflet. Seeds the best-so-far from the approximate search, then for every
/// query enumerates the k-subsets of its best-so-far range that contain it as smallest
/// offset, pruning any branch whose partial extent already exceeds the incumbent.
template <PairwiseDistances Source>
[[nodiscard]] SearchResult exact_k_motiflet(const Source& source, Index k,
                                            const SearchOptions& options = {}) {
    check_feasible(source, k);
    SearchState state;
    {
        auto approx = approx_k_motiflet(source, k, options);
        state.update(approx.state.best_sq_extent, approx.state.best_offsets);
        state.stats.candidates_examined = approx.state.stats.candidates_examined;
    }

    auto cursor = source.cursor();
    double estimate = 0.0;
    for (Index i = 0; i < source.count(); ++i) {
        const auto row = source.row(i, cursor);
        Index range = 0;
        for (Index j = i + 1; j < source.count(); ++j) {
            if (static_cast<double>(row[static_cast<std::size_t>(j)]) <= state.best_sq_extent &&
                !source.overlaps(i, j)) {
                ++range;
            }
        }
        estimate += detail::binomial(range, k - 1);
    }
    state.stats.estimated_subsets = estimate;
    if (estimate > options.subset_ceiling) {
        throw ResourceError("exact search would enumerate about " + std::to_string(estimate) +
                            " candidate subsets (ceiling " +
                            std::to_string(options.subset_ceiling) +
                            "); use approximate mode or a smaller k");
    }

    detail::ExactEnumerator<Source> enumerator(source, k, state);
    cursor = source.cursor();
    for (Index i = 0; i < source.count(); ++i) {
        ++state.stats.queries;
        enumerator.run_query(i, source.row(i, cursor));
    }
    SearchResult out;
    out.motiflet = detail::make_motiflet(source, state.best_offsets, state.best_sq_extent,
                                         Exactness::kExact);
    out.state = std::move(state);
    return out;
}

/// Verification oracle: walks every non-overlapping k-subset in lexicographic order. The
/// only cut is the trivially admissible one (a partial set already at or above the best
/// complete extent cannot win, ties included, since later tuples are lexicographically
/// larger). No seeding, no range filter.
template <PairwiseDistances Source>
[[nodiscard]] Motiflet oracle_k_motiflet(const Source& source, Index k,
                                         const OracleLimits& limits = {}) {
    if (source.count() > limits.max_count || k > limits.max_k) {
        throw ResourceError("oracle limited to " + std::to_string(limits.max_count) +
                            " windows and k <= " + std::to_string(limits.max_k));
    }
    check_feasible(source, k);
    const Index n = source.count();
    double best = kInf;
    std::vector<Index> best_set;
    std::vector<Index> chosen;
    chosen.reserve(static_cast<std::size_t>(k));

    auto walk = [&](auto&& self, Index from, double current) -> void {
        for (Index c = from; c + (k - static_cast<Index>(chosen.size())) <= n; ++c) {
            double worst = current;
            bool skip = false;
            for (Index x : chosen) {
                if (source.overlaps(x, c)) {
                    skip = true;
                    break;
                }
                worst = std::max(worst, static_cast<double>(source.sq_dist(x, c)));
                if (worst >= best) {
                    skip = true;
                    break;
                }
            }
            if (skip) {
                continue;
            }
            chosen.push_back(c);
            if (static_cast<Index>(chosen.size()) == k) {
                best = worst;
                best_set = chosen;
            } else {
                self(self, c + 1, worst);
            }
            chosen.pop_back();
        }
    };
    walk(walk, 0, 0.0);
    return detail::make_motiflet(source, best_set, best, Exactness::kOracle);
}

// Series entry points: build the distance source with the default policy.

[[nodiscard]] inline SearchResult approx_k_motiflet(const SeriesView<double>& view, Index k,
                                                    const SearchOptions& options = {}) {
    return approx_k_motiflet(DistanceSource<double>::compute(view), k, options);
}

[[nodiscard]] inline SearchResult exact_k_motiflet(const SeriesView<double>& view, Index k,
                                                   const SearchOptions& options = {}) {
    return exact_k_motiflet(DistanceSource<double>::compute(view), k, options);
}

[[nodiscard]] inline Motiflet oracle_k_motiflet(const SeriesView<double>& view, Index k,
                                                const OracleLimits& limits = {}) {
    return oracle_k_motiflet(DistanceSource<double>::compute(view), k, limits);
}

}  // namespace motiflets
