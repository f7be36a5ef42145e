#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/distance.hpp"

namespace motiflets {

/// Reads one series from text. Accepted layouts:
///  - one value per line, no header;
///  - delimited columns (`,` `;` or tab) with an optional header row;
///  - whitespace-separated values. Without a column selector every token is read in
///    order, so both one-row and one-per-line files work.
/// `column` is a header name or a 0-based index; delimited input defaults to column 0.
/// Blank lines and lines starting with '#' are skipped. Non-finite values, unparseable
/// fields and files without data raise IoError naming the offending line.
[[nodiscard]] Eigen::VectorXd read_series(std::istream& in,
                                          const std::optional<std::string>& column = std::nullopt);

[[nodiscard]] Eigen::VectorXd load_series(const std::filesystem::path& path,
                                          const std::optional<std::string>& column = std::nullopt);

/// One value per line, round-trip precision.
void write_series(const std::filesystem::path& path, const Eigen::VectorXd& values);

/// Binary dump of a materialized distance matrix:
///   bytes 0-3 "MTLD", u32 version, u32 rows, u32 window, then rows*rows f64 squared z-ED,
///   row-major. All integers and reals little-endian.
inline constexpr std::uint32_t kMatrixDumpVersion = 1;

struct MatrixDump {
    std::uint32_t version = kMatrixDumpVersion;
    Index window = 0;
    Eigen::MatrixXd sq_distances;
};

void write_matrix_dump(const std::filesystem::path& path, const DistanceSource<double>& source);
[[nodiscard]] MatrixDump read_matrix_dump(const std::filesystem::path& path);

/// Parses a byte count such as "1048576", "512M" or "2G" (binary multiples).
[[nodiscard]] std::uint64_t parse_byte_size(const std::string& text);

/// Window grid: "a,b,c", "min:max:step" or "min:max:xFACTOR" (geometric, rounded).
[[nodiscard]] std::vector<Index> parse_window_range(const std::string& text);

}  // namespace motiflets
