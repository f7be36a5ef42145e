#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/errors.hpp"

namespace motiflets {

using Index = Eigen::Index;

/// How windows with (numerically) zero standard deviation are treated.
enum class FlatPolicy {
    kZeroVector,  ///< flat window z-normalizes to all zeros
    kStrict,      ///< any distance involving a flat window throws DegenerateWindowError
};

/// Relative flatness floor: sigma < kFlatTolerance * (max - min) marks a window flat.
inline constexpr double kFlatTolerance = 1e-8;

/// Sliding sums are recomputed from scratch at this stride to bound drift.
inline constexpr Index kRefreshStride = 4096;

struct OffsetPair {
    Index i = 0;
    Index j = 0;
};

/// Trivial-match test: two windows overlap iff |i - j| <= floor(l / 2).
[[nodiscard]] constexpr bool overlaps(OffsetPair pair, Index window) noexcept {
    const Index half = window / 2;
    const Index gap = pair.i > pair.j ? pair.i - pair.j : pair.j - pair.i;
    return gap <= half;
}

template <typename Scalar>
struct SlidingStats {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> means;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stds;
};

namespace detail {

// Neumaier-compensated accumulator.
template <typename T>
struct CompensatedSum {
    T sum{0};
    T carry{0};

    void add(T v) noexcept {
        const T t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] T value() const noexcept { return sum + carry; }
};

template <typename Scalar>
using Accum = std::common_type_t<Scalar, double>;

inline void check_window(Index n, Index window) {
    if (window < 2 || window > n) {
        throw ParameterError("window length " + std::to_string(window) + " must lie in [2, " +
                             std::to_string(n) + "]");
    }
}

}  // namespace detail

/// Per-offset mean and population standard deviation of every length-`window` subsequence.
///
/// Single pass over compensated running sums of x and x^2, taken relative to the global
/// mean so that large offsets do not cancel; sums are rebuilt every kRefreshStride steps.
template <typename Derived>
[[nodiscard]] SlidingStats<typename Derived::Scalar> sliding_stats(
        const Eigen::MatrixBase<Derived>& values, Index window) {
    using Scalar = typename Derived::Scalar;
    using Acc = detail::Accum<Scalar>;
    const Index n = values.size();
    detail::check_window(n, window);

    const Index count = n - window + 1;
    SlidingStats<Scalar> out;
    out.means.resize(count);
    out.stds.resize(count);

    const Acc shift = values.template cast<Acc>().mean();
    auto y = [&](Index t) { return static_cast<Acc>(values(t)) - shift; };
    const Acc inv_l = Acc{1} / static_cast<Acc>(window);

    detail::CompensatedSum<Acc> s1;
    detail::CompensatedSum<Acc> s2;
    auto rebuild = [&](Index start) {
        s1 = {};
        s2 = {};
        for (Index t = start; t < start + window; ++t) {
            const Acc v = y(t);
            s1.add(v);
            s2.add(v * v);
        }
    };

    for (Index i = 0; i < count; ++i) {
        if (i % kRefreshStride == 0) {
            rebuild(i);
        } else {
            const Acc in = y(i + window - 1);
            const Acc gone = y(i - 1);
            s1.add(in);
            s1.add(-gone);
            s2.add(in * in);
            s2.add(-gone * gone);
        }
        const Acc mean = s1.value() * inv_l;
        const Acc var = std::max(Acc{0}, s2.value() * inv_l - mean * mean);
        out.means(i) = static_cast<Scalar>(mean + shift);
        out.stds(i) = static_cast<Scalar>(std::sqrt(var));
    }
    return out;
}

/// Immutable time series plus the sliding statistics for one window length.
template <typename Scalar = double>
class SeriesView {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    SeriesView(Vector values, Index window, FlatPolicy policy = FlatPolicy::kZeroVector)
        : values_(std::move(values)), window_(window), policy_(policy) {
        detail::check_window(values_.size(), window_);
        if (!values_.allFinite()) {
            throw ParameterError("series contains non-finite values");
        }
        auto stats = sliding_stats(values_, window_);
        means_ = std::move(stats.means);
        stds_ = std::move(stats.stds);

        const Scalar range = values_.maxCoeff() - values_.minCoeff();
        flat_floor_ = static_cast<Scalar>(kFlatTolerance) * range;
        flat_.resize(static_cast<std::size_t>(count()));
        for (Index i = 0; i < count(); ++i) {
            // A globally constant series has range 0: every window is flat.
            flat_[static_cast<std::size_t>(i)] = range == Scalar{0} || stds_(i) < flat_floor_;
        }
    }

    [[nodiscard]] const Vector& values() const noexcept { return values_; }
    [[nodiscard]] Index length() const noexcept { return values_.size(); }
    [[nodiscard]] Index window() const noexcept { return window_; }
    [[nodiscard]] Index half_window() const noexcept { return window_ / 2; }
    /// Number of subsequences, n - l + 1.
    [[nodiscard]] Index count() const noexcept { return values_.size() - window_ + 1; }
    [[nodiscard]] const Vector& means() const noexcept { return means_; }
    [[nodiscard]] const Vector& stds() const noexcept { return stds_; }
    [[nodiscard]] Scalar flat_floor() const noexcept { return flat_floor_; }
    [[nodiscard]] FlatPolicy policy() const noexcept { return policy_; }
    [[nodiscard]] bool flat(Index i) const { return flat_[static_cast<std::size_t>(i)] != 0; }
    [[nodiscard]] bool any_flat() const {
        return std::any_of(flat_.begin(), flat_.end(), [](char f) { return f != 0; });
    }
    [[nodiscard]] bool overlaps(Index i, Index j) const noexcept {
        return motiflets::overlaps({i, j}, window_);
    }
    [[nodiscard]] auto subsequence(Index i) const { return values_.segment(i, window_); }

    void check_offset(Index i) const {
        if (i < 0 || i >= count()) {
            throw ParameterError("offset " + std::to_string(i) + " outside [0, " +
                                 std::to_string(count() - 1) + "]");
        }
    }

private:
    Vector values_;
    Index window_;
    FlatPolicy policy_;
    Vector means_;
    Vector stds_;
    Scalar flat_floor_{0};
    std::vector<char> flat_;
};

template <typename Derived>
SeriesView(const Eigen::MatrixBase<Derived>&, Index, FlatPolicy)
        -> SeriesView<typename Derived::Scalar>;

/// Squared z-normalized Euclidean distance, evaluated by explicitly z-normalizing both
/// windows with two-pass statistics. Reference path for the streaming engine.
template <typename Scalar>
[[nodiscard]] Scalar znorm_sq_distance_naive(const SeriesView<Scalar>& view, OffsetPair pair) {
    using Acc = detail::Accum<Scalar>;
    view.check_offset(pair.i);
    view.check_offset(pair.j);
    // Fixed evaluation order keeps d(i, j) == d(j, i) bit for bit.
    const Index a = std::min(pair.i, pair.j);
    const Index b = std::max(pair.i, pair.j);
    if (a == b) {
        return Scalar{0};
    }
    const Index l = view.window();
    const bool flat_a = view.flat(a);
    const bool flat_b = view.flat(b);
    if ((flat_a || flat_b) && view.policy() == FlatPolicy::kStrict) {
        throw DegenerateWindowError("flat window at offset " + std::to_string(flat_a ? a : b));
    }

    auto normalized = [&](Index start, bool flat) {
        Eigen::Matrix<Acc, Eigen::Dynamic, 1> w =
                view.values().segment(start, l).template cast<Acc>();
        if (flat) {
            return Eigen::Matrix<Acc, Eigen::Dynamic, 1>::Zero(l).eval();
        }
        const Acc mean = w.sum() / static_cast<Acc>(l);
        w.array() -= mean;
        const Acc sd = std::sqrt(w.squaredNorm() / static_cast<Acc>(l));
        return (w / sd).eval();
    };
    const auto za = normalized(a, flat_a);
    const auto zb = normalized(b, flat_b);
    return static_cast<Scalar>((za - zb).squaredNorm());
}

template <typename Scalar>
[[nodiscard]] Scalar znorm_distance_naive(const SeriesView<Scalar>& view, OffsetPair pair) {
    return std::sqrt(znorm_sq_distance_naive(view, pair));
}

}  // namespace motiflets
