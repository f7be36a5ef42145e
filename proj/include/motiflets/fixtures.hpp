#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/series.hpp"

namespace motiflets {

enum class FixtureKind { kPlantedMotif, kTwoMotif, kRandomWalk, kSine };

[[nodiscard]] std::string_view to_string(FixtureKind kind) noexcept;
[[nodiscard]] std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept;

struct FixtureParams {
    Index length = 0;     ///< total samples; 0 lets planted kinds size themselves
    Index period = 64;    ///< template length / sine period / beat length
    Index copies = 8;     ///< planted-motif copies
    double noise = 0.05;  ///< Gaussian noise sigma, relative to the template amplitude
    Index gap_min = -1;   ///< background gap between planted copies; -1 = period / 2
    Index gap_max = -1;   ///< -1 = 2 * period
};

/// Generated series plus where the planted patterns start.
struct Fixture {
    FixtureKind kind = FixtureKind::kRandomWalk;
    std::uint64_t seed = 0;
    Index period = 0;
    Eigen::VectorXd values;
    /// One offset list per planted motif (planted-motif: 1, two-motif: 2, others: 0).
    std::vector<std::vector<Index>> ground_truth;
};

/// Deterministic for a fixed (kind, params, seed).
///  - planted-motif: `copies` noisy copies of a smooth random template of length `period`,
///    separated by random-walk gaps.
///  - two-motif: 6 square-wave periods followed by 16 heartbeat-like periods whose T wave
///    grows slowly from beat to beat, framed by random-walk lead-in and tail.
///  - random-walk: cumulative Gaussian steps.
///  - sine: sin(2 pi t / period) plus noise.
/// Throws ParameterError for bad parameters or when the copies do not fit `length`.
[[nodiscard]] Fixture generate_fixture(FixtureKind kind, const FixtureParams& params,
                                       std::uint64_t seed);

}  // namespace motiflets
