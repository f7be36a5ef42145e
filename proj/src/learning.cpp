#include "motiflets/learning.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace motiflets {

double default_elbow_epsilon(std::span<const double> extents) {
    double peak = 0.0;
    for (double e : extents) {
        peak = std::max(peak, std::abs(e));
    }
    return std::max(1e-9 * peak, std::numeric_limits<double>::min());
}

std::vector<ElbowPoint> rank_elbows(std::span<const double> extents, double alpha,
                                    std::optional<double> epsilon) {
    const double eps = epsilon.value_or(default_elbow_epsilon(extents));
    std::vector<ElbowPoint> out;
    // extents[t] holds EF(t + 2); both neighbours are needed.
    for (std::size_t t = 1; t + 1 < extents.size(); ++t) {
        const double rise = (extents[t + 1] - extents[t]) + eps;
        const double before = (extents[t] - extents[t - 1]) + eps;
        const double ratio = rise / before;
        if (ratio > alpha) {
            out.push_back({static_cast<Index>(t) + 2, ratio});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ElbowPoint& a, const ElbowPoint& b) { return a.ratio > b.ratio; });
    return out;
}

std::vector<Index> find_elbows(std::span<const double> extents, double alpha,
                               std::optional<double> epsilon) {
    std::vector<Index> out;
    for (const auto& e : rank_elbows(extents, alpha, epsilon)) {
        out.push_back(e.k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LengthScore au_ef(const ExtentProfile& profile) {
    LengthScore score;
    score.window = profile.window;
    score.elbow_count = static_cast<Index>(profile.elbows.size());
    const auto& p = profile.extents;
    if (p.empty()) {
        return score;
    }
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    const double span = *hi - *lo;
    if (span <= 0.0) {
        return score;  // flat EF: every normalised term is 0
    }
    double area = 0.0;
    for (double d : p) {
        area += (d - *lo) / span;
    }
    area /= static_cast<double>(p.size());
    score.au_ef = area / static_cast<double>(std::max<Index>(1, score.elbow_count));
    return score;
}

ExtentProfile extent_function(const SeriesView<double>& view, Index k_max, Exactness mode,
                              const ProfileOptions& options, std::uint64_t memory_budget) {
    const auto source = DistanceSource<double>::compute(view, StoragePolicy::kAutomatic, memory_budget);
    return extent_function(source, k_max, mode, options);
}

LengthSelection select_length(const Eigen::VectorXd& series, std::span<const Index> windows,
                              Index k_max, const LengthOptions& options) {
    if (windows.empty()) {
        throw ParameterError("empty window range");
    }
    std::vector<Index> sorted(windows.begin(), windows.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    LengthSelection out;
    out.profiles.resize(sorted.size());
    out.scores.resize(sorted.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < sorted.size(); t = next++) {
            try {
                const SeriesView<double> view(series, sorted[t]);
                const auto source = DistanceSource<double>::compute(
                        view, StoragePolicy::kAutomatic, options.memory_budget, 1);
                auto profile = extent_function(source, k_max, Exactness::kApproximate,
                                               options.profile);
                if (profile.truncated) {
                    throw FeasibilityError("window " + std::to_string(sorted[t]) + " admits only " +
                                           std::to_string(profile.k_max) +
                                           " non-overlapping windows");
                }
                out.scores[t] = au_ef(profile);
                out.profiles[t] = std::move(profile);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = sorted.size();
            }
        }
    };

    unsigned threads = options.threads != 0 ? options.threads
                                            : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, sorted.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::size_t best = 0;
    for (std::size_t t = 1; t < out.scores.size(); ++t) {
        if (out.scores[t].au_ef < out.scores[best].au_ef) {
            best = t;
        }
    }
    out.best_window = out.scores[best].window;
    return out;
}

}  // namespace motiflets
