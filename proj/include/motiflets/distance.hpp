#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/errors.hpp"
#include "motiflets/series.hpp"

namespace motiflets {

enum class StoragePolicy {
    kMaterialize,  ///< full (n-l+1)^2 matrix of squared z-ED
    kOnDemand,     ///< rows rebuilt from sliding statistics when asked
    kAutomatic,    ///< materialize when it fits the memory budget
};

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{2} << 30;

/// Anything the motiflet searches can run on: a symmetric table of squared distances
/// over `count()` items together with a trivial-match predicate.
template <typename S>
concept PairwiseDistances = requires(const S& s, Index i, Index j, typename S::Cursor& cursor) {
    typename S::value_type;
    { s.count() } -> std::convertible_to<Index>;
    { s.overlaps(i, j) } -> std::same_as<bool>;
    { s.sq_dist(i, j) } -> std::convertible_to<double>;
    { s.cursor() } -> std::same_as<typename S::Cursor>;
    { s.row(i, cursor) } -> std::same_as<std::span<const typename S::value_type>>;
};

/// All-pairs squared z-normalized distances for one window length.
///
/// Uses the centred streaming update of the sliding cross products along diagonals,
///   cov(i+1, j+1) = cov(i, j) + df[i] * dg[j] + df[j] * dg[i],
///   df[t] = (x[t+l] - x[t]) / 2,   dg[t] = (x[t+l] - mu[t+1]) + (x[t] - mu[t]),
/// and converts via z-ED^2(i, j) = 2l * (1 - cov(i, j) / (l * sigma_i * sigma_j)),
/// which equals 2l * (1 - (Q_ij - l * mu_i * mu_j) / (l * sigma_i * sigma_j)) for the raw
/// dot product Q. Total work is O((n-l+1)^2), independent of l.
template <typename Scalar = double>
class DistanceSource {
public:
    using value_type = Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    /// Per-caller scratch for row access. Rows requested in ascending order cost O(n).
    class Cursor {
    public:
        Cursor() = default;

    private:
        friend class DistanceSource;
        std::vector<double> cov;
        std::vector<Scalar> row;
        Index last = -1;
    };

    static DistanceSource compute(SeriesView<Scalar> view,
                                  StoragePolicy policy = StoragePolicy::kAutomatic,
                                  std::uint64_t memory_budget = kDefaultMemoryBudget,
                                  unsigned threads = 0) {
        if (view.policy() == FlatPolicy::kStrict && view.any_flat()) {
            throw DegenerateWindowError("series has flat windows under the strict flat policy");
        }
        DistanceSource src(std::move(view));
        const auto cells = static_cast<std::uint64_t>(src.count()) *
                           static_cast<std::uint64_t>(src.count());
        const std::uint64_t bytes = cells * sizeof(Scalar);
        bool materialize = policy == StoragePolicy::kMaterialize;
        if (policy == StoragePolicy::kAutomatic) {
            materialize = bytes <= memory_budget;
        } else if (materialize && bytes > memory_budget) {
            throw ResourceError("materialized distance matrix needs " + std::to_string(bytes) +
                                " bytes, over the budget of " + std::to_string(memory_budget) +
                                "; use on-demand mode");
        }
        if (materialize) {
            src.materialize(threads);
        }
        return src;
    }

    [[nodiscard]] const SeriesView<Scalar>& view() const noexcept { return view_; }
    [[nodiscard]] Index count() const noexcept { return view_.count(); }
    [[nodiscard]] Index window() const noexcept { return view_.window(); }
    [[nodiscard]] bool materialized() const noexcept { return matrix_.size() > 0; }
    [[nodiscard]] bool overlaps(Index i, Index j) const noexcept { return view_.overlaps(i, j); }

    /// Only valid in materialized mode.
    [[nodiscard]] const Matrix& matrix() const {
        if (!materialized()) {
            throw ContractViolation("distance source is in on-demand mode");
        }
        return matrix_;
    }

    [[nodiscard]] Scalar sq_dist(Index i, Index j) const {
        if (materialized()) {
            return matrix_(i, j);
        }
        if (i == j) {
            return Scalar{0};
        }
        const Index a = std::min(i, j);
        const Index b = std::max(i, j);
        return to_sq(a, b, direct_cov(a, b));
    }

    [[nodiscard]] Cursor cursor() const { return Cursor{}; }

    /// Squared distances from `i` to every window.
    [[nodiscard]] std::span<const Scalar> row(Index i, Cursor& cursor) const {
        const auto n = static_cast<std::size_t>(count());
        if (materialized()) {
            // Column i equals row i and is contiguous in column-major storage.
            return {matrix_.data() + i * count(), n};
        }
        if (cursor.last == i) {
            return {cursor.row.data(), n};
        }
        cursor.cov.resize(n);
        cursor.row.resize(n);
        if (cursor.last == i - 1 && i % kRefreshStride != 0) {
            for (Index j = count() - 1; j >= 1; --j) {
                auto& c = cursor.cov[static_cast<std::size_t>(j)];
                c = cursor.cov[static_cast<std::size_t>(j - 1)] + df_[i - 1] * dg_[j - 1] +
                    df_[j - 1] * dg_[i - 1];
            }
            cursor.cov[0] = direct_cov(0, i);
        } else {
            for (Index j = 0; j < count(); ++j) {
                cursor.cov[static_cast<std::size_t>(j)] = direct_cov(std::min(i, j), std::max(i, j));
            }
        }
        for (Index j = 0; j < count(); ++j) {
            cursor.row[static_cast<std::size_t>(j)] =
                    j == i ? Scalar{0} : to_sq(i, j, cursor.cov[static_cast<std::size_t>(j)]);
        }
        cursor.last = i;
        return {cursor.row.data(), n};
    }

private:
    explicit DistanceSource(SeriesView<Scalar> view) : view_(std::move(view)) {
        const Index n = count();
        const Index l = window();
        const auto& x = view_.values();
        const auto& mu = view_.means();
        inv_norm_.resize(n);
        for (Index i = 0; i < n; ++i) {
            inv_norm_[i] = view_.flat(i)
                                   ? 0.0
                                   : 1.0 / (static_cast<double>(view_.stds()(i)) *
                                            std::sqrt(static_cast<double>(l)));
        }
        df_.resize(std::max<Index>(n - 1, 0));
        dg_.resize(std::max<Index>(n - 1, 0));
        for (Index t = 0; t + 1 < n; ++t) {
            const double in = x(t + l);
            const double out = x(t);
            df_[t] = (in - out) / 2.0;
            dg_[t] = (in - static_cast<double>(mu(t + 1))) + (out - static_cast<double>(mu(t)));
        }
    }

    [[nodiscard]] double direct_cov(Index a, Index b) const {
        const auto& x = view_.values();
        const double ma = view_.means()(a);
        const double mb = view_.means()(b);
        double acc = 0.0;
        for (Index t = 0; t < window(); ++t) {
            acc += (static_cast<double>(x(a + t)) - ma) * (static_cast<double>(x(b + t)) - mb);
        }
        return acc;
    }

    [[nodiscard]] Scalar to_sq(Index i, Index j, double cov) const {
        const bool fi = view_.flat(i);
        const bool fj = view_.flat(j);
        const auto l = static_cast<double>(window());
        if (fi && fj) {
            return Scalar{0};
        }
        if (fi || fj) {
            return static_cast<Scalar>(l);
        }
        const double corr = std::clamp(cov * inv_norm_[i] * inv_norm_[j], -1.0, 1.0);
        return static_cast<Scalar>(2.0 * l * (1.0 - corr));
    }

    void materialize(unsigned threads) {
        const Index n = count();
        matrix_.setZero(n, n);
        if (threads == 0) {
            threads = std::max(1U, std::thread::hardware_concurrency());
        }
        threads = static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(n - 1, 1)));

        // Diagonals are independent; every cell is written by exactly one diagonal.
        auto sweep = [this, n, threads](unsigned worker) {
            for (Index g = 1 + worker; g < n; g += threads) {
                double cov = 0.0;
                for (Index i = 0; i + g < n; ++i) {
                    const Index j = i + g;
                    if (i % kRefreshStride == 0) {
                        cov = direct_cov(i, j);
                    } else {
                        cov += df_[i - 1] * dg_[j - 1] + df_[j - 1] * dg_[i - 1];
                    }
                    const Scalar d = to_sq(i, j, cov);
                    matrix_(i, j) = d;
                    matrix_(j, i) = d;
                }
            }
        };
        if (threads == 1) {
            sweep(0);
            return;
        }
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(sweep, w);
        }
    }

    SeriesView<Scalar> view_;
    Eigen::VectorXd inv_norm_;
    Eigen::VectorXd df_;
    Eigen::VectorXd dg_;
    Matrix matrix_;
};

/// Caller-supplied symmetric distance matrix with an arbitrary trivial-match predicate.
/// Lets the searches run on point sets that do not come from a time series.
class MatrixSource {
public:
    using value_type = double;
    using OverlapFn = std::function<bool(Index, Index)>;
    struct Cursor {};

    /// `distances` holds unsquared distances. Without a predicate nothing overlaps
    /// except an item with itself.
    explicit MatrixSource(const Eigen::MatrixXd& distances, OverlapFn overlap = {})
        : sq_(distances.cwiseAbs2()), overlap_(std::move(overlap)) {
        if (distances.rows() != distances.cols() || distances.rows() == 0) {
            throw ParameterError("distance matrix must be square and non-empty");
        }
        if (!distances.allFinite() || (distances.array() < 0.0).any()) {
            throw ParameterError("distances must be finite and non-negative");
        }
        if (distances != distances.transpose() || distances.diagonal().any()) {
            throw ParameterError("distance matrix must be symmetric with zero diagonal");
        }
    }

    [[nodiscard]] Index count() const noexcept { return sq_.rows(); }
    [[nodiscard]] bool overlaps(Index i, Index j) const {
        return i == j || (overlap_ && overlap_(i, j));
    }
    [[nodiscard]] double sq_dist(Index i, Index j) const { return sq_(i, j); }
    [[nodiscard]] Cursor cursor() const { return {}; }
    [[nodiscard]] std::span<const double> row(Index i, Cursor&) const {
        return {sq_.data() + i * count(), static_cast<std::size_t>(count())};
    }

private:
    Eigen::MatrixXd sq_;
    OverlapFn overlap_;
};

/// Greedy non-trivial neighbours of a query; `members()` is the candidate motif set.
struct NeighborList {
    Index query = 0;
    std::vector<Index> neighbors;     ///< ascending by distance, ties by offset
    std::vector<double> sq_distances;  ///< squared distance of each neighbour to the query

    [[nodiscard]] std::vector<Index> members() const {
        std::vector<Index> out{query};
        out.insert(out.end(), neighbors.begin(), neighbors.end());
        return out;
    }
    [[nodiscard]] std::size_t size() const noexcept { return neighbors.size() + 1; }
};

namespace detail {

// Entries of `row` strictly below `sq_bound` that do not overlap the query, greedily
// admitted in (distance, offset) order while rejecting overlaps with admitted ones.
template <PairwiseDistances Source, typename T>
NeighborList greedy_knn(const Source& source, std::span<const T> row, Index query, Index k,
                        double sq_bound, std::vector<std::pair<double, Index>>& scratch) {
    NeighborList out;
    out.query = query;
    scratch.clear();
    for (Index j = 0; j < static_cast<Index>(row.size()); ++j) {
        const auto d = static_cast<double>(row[static_cast<std::size_t>(j)]);
        if (j != query && d < sq_bound && !source.overlaps(query, j)) {
            scratch.emplace_back(d, j);
        }
    }
    const Index wanted = k - 1;
    if (wanted <= 0) {
        return out;
    }
    auto admit = [&](const std::pair<double, Index>& e) {
        for (Index a : out.neighbors) {
            if (source.overlaps(a, e.second)) {
                return;
            }
        }
        out.neighbors.push_back(e.second);
        out.sq_distances.push_back(e.first);
    };
    // Sort lazily in growing chunks: most queries settle within the first few.
    std::size_t sorted = 0;
    std::size_t chunk = static_cast<std::size_t>(std::max<Index>(4 * wanted, 16));
    while (static_cast<Index>(out.neighbors.size()) < wanted && sorted < scratch.size()) {
        const std::size_t upto = std::min(scratch.size(), sorted + chunk);
        std::partial_sort(scratch.begin() + static_cast<std::ptrdiff_t>(sorted),
                          scratch.begin() + static_cast<std::ptrdiff_t>(upto), scratch.end());
        for (std::size_t s = sorted; s < upto && static_cast<Index>(out.neighbors.size()) < wanted;
             ++s) {
            admit(scratch[s]);
        }
        sorted = upto;
        chunk *= 2;
    }
    return out;
}

}  // namespace detail

/// Up to k-1 non-trivial neighbours of `query` with distance strictly below `bound`.
/// A short list means fewer than k non-overlapping windows qualify.
template <PairwiseDistances Source>
[[nodiscard]] NeighborList row_knn(const Source& source, Index query, Index k,
                                   double bound = std::numeric_limits<double>::infinity()) {
    if (k < 1) {
        throw ParameterError("k must be at least 1");
    }
    if (query < 0 || query >= source.count()) {
        throw ParameterError("query offset out of range");
    }
    auto cursor = source.cursor();
    const auto row = source.row(query, cursor);
    std::vector<std::pair<double, Index>> scratch;
    const double sq_bound = std::isinf(bound) ? bound : bound * bound;
    return detail::greedy_knn(source, row, query, k, sq_bound, scratch);
}

}  // namespace motiflets
