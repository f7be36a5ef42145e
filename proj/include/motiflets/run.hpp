#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "motiflets/errors.hpp"
#include "motiflets/fixtures.hpp"
#include "motiflets/learning.hpp"
#include "motiflets/search.hpp"

namespace motiflets {

enum class Command { kDiscover, kLearnK, kLearnLength, kFixture, kMatrixDump };

[[nodiscard]] std::string_view to_string(Command command) noexcept;

/// Everything one invocation of the tool needs. Paths that are empty are not written.
struct RunConfig {
    Command command = Command::kDiscover;

    std::string input;
    std::optional<std::string> column;

    std::optional<Index> window;     ///< --l
    std::vector<Index> window_range; ///< --l-range, exclusive with `window`
    std::optional<Index> k;
    std::optional<Index> k_max;

    Exactness mode = Exactness::kApproximate;
    double alpha = 5.0;
    std::uint64_t memory_budget = kDefaultMemoryBudget;
    double subset_ceiling = 1e9;
    OracleLimits oracle_limits{};
    FlatPolicy flat_policy = FlatPolicy::kZeroVector;
    unsigned threads = 0;

    std::string curves;      ///< CSV of the EF or AU_EF curve
    std::string series_out;  ///< fixture: generated series
    std::string matrix_out;  ///< matrix-dump: binary matrix

    FixtureKind fixture_kind = FixtureKind::kPlantedMotif;
    FixtureParams fixture{};
    std::uint64_t seed = 0;
};

/// Throws ParameterError when required options are missing or conflict.
void validate(const RunConfig& config);

/// Memory budget from MOTIFLETS_MEMORY_BUDGET when set, otherwise `fallback`.
[[nodiscard]] std::uint64_t memory_budget_from_env(std::uint64_t fallback = kDefaultMemoryBudget);

/// Executes the command and returns the result document; side files named in the
/// config (curves, series, matrix) are written as well. Key order is fixed.
[[nodiscard]] nlohmann::ordered_json run(const RunConfig& config);

/// Naive recomputation of a set's extent straight from the series.
[[nodiscard]] double rescore_extent(const Eigen::VectorXd& series, Index window,
                                    const std::vector<Index>& offsets,
                                    FlatPolicy policy = FlatPolicy::kZeroVector);

/// {"error": {"code": 2, "kind": "parameter", "message": ...}}
[[nodiscard]] nlohmann::ordered_json error_document(ErrorCode code, const std::string& message);

[[nodiscard]] nlohmann::ordered_json to_json(const Motiflet& m);
[[nodiscard]] nlohmann::ordered_json to_json(const SearchState& state);
[[nodiscard]] nlohmann::ordered_json to_json(const ExtentProfile& profile, double alpha);

}  // namespace motiflets
