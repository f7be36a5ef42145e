#include "motiflets/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

#include "motiflets/errors.hpp"

namespace motiflets {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_number(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() || token.empty()) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    if (delim == ' ') {
        std::size_t t = 0;
        while (t < line.size()) {
            while (t < line.size() && std::isspace(static_cast<unsigned char>(line[t]))) {
                ++t;
            }
            const std::size_t start = t;
            while (t < line.size() && !std::isspace(static_cast<unsigned char>(line[t]))) {
                ++t;
            }
            if (t > start) {
                out.push_back(line.substr(start, t - start));
            }
        }
        return out;
    }
    std::size_t start = 0;
    for (std::size_t t = 0; t <= line.size(); ++t) {
        if (t == line.size() || line[t] == delim) {
            out.push_back(trim(line.substr(start, t - start)));
            start = t + 1;
        }
    }
    return out;
}

char detect_delimiter(std::string_view line) {
    for (char d : {',', ';', '\t'}) {
        if (line.find(d) != std::string_view::npos) {
            return d;
        }
    }
    return ' ';
}

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int t = 0; t < 4; ++t) {
        b[static_cast<std::size_t>(t)] = static_cast<char>((v >> (8 * t)) & 0xFFU);
    }
    out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int t = 0; t < 8; ++t) {
        b[static_cast<std::size_t>(t)] = static_cast<char>((bits >> (8 * t)) & 0xFFU);
    }
    out.write(b.data(), 8);
}

std::uint64_t get_le(std::istream& in, int bytes) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), bytes);
    if (!in) {
        throw IoError("truncated matrix dump");
    }
    std::uint64_t v = 0;
    for (int t = bytes - 1; t >= 0; --t) {
        v = (v << 8) | b[static_cast<std::size_t>(t)];
    }
    return v;
}

}  // namespace

Eigen::VectorXd read_series(std::istream& in, const std::optional<std::string>& column) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string raw;
    for (std::size_t number = 1; std::getline(in, raw); ++number) {
        const auto body = trim(raw);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        lines.emplace_back(number, std::string(body));
    }
    if (lines.empty()) {
        throw IoError("no data in series input");
    }

    const char delim = detect_delimiter(lines.front().second);
    const auto first = split(lines.front().second, delim);
    const bool header = std::any_of(first.begin(), first.end(),
                                    [](std::string_view f) { return !parse_number(f); });

    // -1: take every token in order (whitespace layout without selector).
    std::ptrdiff_t pick = delim == ' ' && !column ? -1 : 0;
    if (column) {
        if (const auto idx = parse_number(*column);
            idx && *idx >= 0 && std::floor(*idx) == *idx) {
            pick = static_cast<std::ptrdiff_t>(*idx);
        } else if (header) {
            const auto it = std::find(first.begin(), first.end(), trim(*column));
            if (it == first.end()) {
                throw IoError("column '" + *column + "' not found in header");
            }
            pick = it - first.begin();
        } else {
            throw IoError("column '" + *column + "' given by name but the input has no header");
        }
    }

    std::vector<double> values;
    for (std::size_t t = header ? 1 : 0; t < lines.size(); ++t) {
        const auto& [number, text] = lines[t];
        const auto fields = split(text, delim);
        auto take = [&, number = number](std::string_view field) {
            const auto v = parse_number(field);
            if (!v) {
                throw IoError(line_error(number, "cannot parse '" + std::string(field) + "'"));
            }
            if (!std::isfinite(*v)) {
                throw IoError(line_error(number, "non-finite value '" + std::string(field) + "'"));
            }
            values.push_back(*v);
        };
        if (pick < 0) {
            for (auto f : fields) {
                take(f);
            }
        } else {
            if (static_cast<std::size_t>(pick) >= fields.size()) {
                throw IoError(line_error(number, "missing column " + std::to_string(pick)));
            }
            take(fields[static_cast<std::size_t>(pick)]);
        }
    }
    if (values.empty()) {
        throw IoError("no data in series input");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

Eigen::VectorXd load_series(const std::filesystem::path& path,
                            const std::optional<std::string>& column) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return read_series(in, column);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_series(const std::filesystem::path& path, const Eigen::VectorXd& values) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    std::array<char, 32> buf{};
    for (Index t = 0; t < values.size(); ++t) {
        const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), values(t));
        out.write(buf.data(), end - buf.data());
        out.put('\n');
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_matrix_dump(const std::filesystem::path& path, const DistanceSource<double>& source) {
    const auto& m = source.matrix();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write("MTLD", 4);
    put_u32(out, kMatrixDumpVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(source.window()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            put_f64(out, m(i, j));
        }
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

MatrixDump read_matrix_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "MTLD", 4) != 0) {
        throw IoError(path.string() + " is not a matrix dump");
    }
    MatrixDump dump;
    dump.version = static_cast<std::uint32_t>(get_le(in, 4));
    if (dump.version != kMatrixDumpVersion) {
        throw IoError("unsupported matrix dump version " + std::to_string(dump.version));
    }
    const auto rows = static_cast<Index>(get_le(in, 4));
    dump.window = static_cast<Index>(get_le(in, 4));
    dump.sq_distances.resize(rows, rows);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < rows; ++j) {
            dump.sq_distances(i, j) = std::bit_cast<double>(get_le(in, 8));
        }
    }
    return dump;
}

std::uint64_t parse_byte_size(const std::string& text) {
    auto body = trim(text);
    std::uint64_t scale = 1;
    if (!body.empty()) {
        switch (std::toupper(static_cast<unsigned char>(body.back()))) {
            case 'K': scale = std::uint64_t{1} << 10; break;
            case 'M': scale = std::uint64_t{1} << 20; break;
            case 'G': scale = std::uint64_t{1} << 30; break;
            default: break;
        }
        if (scale != 1) {
            body.remove_suffix(1);
        }
    }
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (body.empty() || ec != std::errc{} || end != body.data() + body.size()) {
        throw ParameterError("invalid byte size '" + text + "'");
    }
    return value * scale;
}

std::vector<Index> parse_window_range(const std::string& text) {
    auto bad = [&] { return ParameterError("invalid window range '" + text + "'"); };
    auto integer = [&](std::string_view s) {
        const auto v = parse_number(s);
        if (!v || *v < 1 || std::floor(*v) != *v) {
            throw bad();
        }
        return static_cast<Index>(*v);
    };
    std::vector<Index> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw bad();
        }
        const Index lo = integer(parts[0]);
        const Index hi = integer(parts[1]);
        if (hi < lo) {
            throw bad();
        }
        if (!parts[2].empty() && (parts[2].front() == 'x' || parts[2].front() == 'X')) {
            const auto factor = parse_number(parts[2].substr(1));
            if (!factor || *factor <= 1.0) {
                throw bad();
            }
            for (double l = static_cast<double>(lo); l <= static_cast<double>(hi) * (1 + 1e-9);
                 l *= *factor) {
                out.push_back(std::llround(l));
            }
        } else {
            const Index step = integer(parts[2]);
            for (Index l = lo; l <= hi; l += step) {
                out.push_back(l);
            }
        }
    } else {
        for (auto part : split(text, ',')) {
            out.push_back(integer(part));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) {
        throw bad();
    }
    return out;
}

}  // namespace motiflets
