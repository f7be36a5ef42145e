#include "motiflets/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "motiflets/errors.hpp"

namespace motiflets {

namespace {

constexpr Index kCalibrationCopies = 6;
constexpr Index kHeartbeatCopies = 16;
constexpr double kGapStep = 0.2;

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    double normal(double sigma) { return sigma * unit_(rng_); }
    Index uniform(Index lo, Index hi) {
        return std::uniform_int_distribution<Index>(lo, hi)(rng_);
    }

    // Appends a random walk continuing from the last value.
    void walk(std::vector<double>& out, Index count, double step) {
        double level = out.empty() ? 0.0 : out.back();
        for (Index t = 0; t < count; ++t) {
            level += normal(step);
            out.push_back(level);
        }
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> unit_{0.0, 1.0};
};

// Smoothed random walk, zero mean, peak magnitude 1.
std::vector<double> smooth_template(Generator& gen, Index length) {
    std::vector<double> raw;
    gen.walk(raw, length, 1.0);
    const Index half = std::max<Index>(1, length / 16);
    std::vector<double> smooth(raw.size());
    for (Index t = 0; t < length; ++t) {
        double acc = 0.0;
        Index used = 0;
        for (Index u = std::max<Index>(0, t - half); u <= std::min(length - 1, t + half); ++u) {
            acc += raw[static_cast<std::size_t>(u)];
            ++used;
        }
        smooth[static_cast<std::size_t>(t)] = acc / static_cast<double>(used);
    }
    double mean = 0.0;
    for (double v : smooth) {
        mean += v;
    }
    mean /= static_cast<double>(length);
    double peak = 0.0;
    for (double& v : smooth) {
        v -= mean;
        peak = std::max(peak, std::abs(v));
    }
    for (double& v : smooth) {
        v /= peak > 0.0 ? peak : 1.0;
    }
    return smooth;
}

double bump(double t, double centre, double width) {
    const double z = (t - centre) / width;
    return std::exp(-0.5 * z * z);
}

// One heartbeat-like period: P wave, sharp QRS complex, then a T wave of height t_height.
double heartbeat(Index t, Index period, double t_height) {
    const double x = static_cast<double>(t) / static_cast<double>(period);
    return 0.15 * bump(x, 0.15, 0.03) - 0.12 * bump(x, 0.30, 0.012) + 1.0 * bump(x, 0.33, 0.012) -
           0.25 * bump(x, 0.36, 0.012) + t_height * bump(x, 0.62, 0.06);
}

void check_params(const FixtureParams& p) {
    if (p.period < 2) {
        throw ParameterError("fixture period must be at least 2");
    }
    if (p.noise < 0.0) {
        throw ParameterError("fixture noise must be non-negative");
    }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

Fixture planted_motif(const FixtureParams& p, Generator& gen) {
    if (p.copies < 1) {
        throw ParameterError("planted-motif needs at least one copy");
    }
    const Index gap_min = p.gap_min >= 0 ? p.gap_min : p.period / 2;
    const Index gap_max = p.gap_max >= 0 ? p.gap_max : 2 * p.period;
    if (gap_max < gap_min) {
        throw ParameterError("gap_max below gap_min");
    }
    const auto shape = smooth_template(gen, p.period);

    std::vector<Index> gaps;
    for (Index c = 0; c <= p.copies; ++c) {
        gaps.push_back(gen.uniform(gap_min, gap_max));
    }
    Index needed = p.copies * p.period;
    for (Index g : gaps) {
        needed += g;
    }
    if (p.length > 0) {
        if (needed - gaps.back() > p.length) {
            throw ParameterError("cannot place " + std::to_string(p.copies) + " copies of length " +
                                 std::to_string(p.period) + " in " + std::to_string(p.length) +
                                 " samples");
        }
        gaps.back() = p.length - (needed - gaps.back());
    }

    Fixture f;
    f.ground_truth.emplace_back();
    std::vector<double> out;
    for (Index c = 0; c < p.copies; ++c) {
        gen.walk(out, gaps[static_cast<std::size_t>(c)], kGapStep);
        const double level = out.empty() ? 0.0 : out.back();
        f.ground_truth[0].push_back(static_cast<Index>(out.size()));
        for (double v : shape) {
            out.push_back(level + v + gen.normal(p.noise));
        }
    }
    gen.walk(out, gaps.back(), kGapStep);
    f.values = to_vector(out);
    return f;
}

Fixture two_motif(const FixtureParams& p, Generator& gen) {
    const Index frame = p.period;
    const Index body = (kCalibrationCopies + kHeartbeatCopies) * p.period;
    Index lead = frame;
    Index tail = frame;
    if (p.length > 0) {
        if (p.length < body) {
            throw ParameterError("two-motif fixture needs at least " + std::to_string(body) +
                                 " samples");
        }
        lead = (p.length - body) / 2;
        tail = p.length - body - lead;
    }
    Fixture f;
    f.ground_truth.resize(2);
    std::vector<double> out;
    gen.walk(out, lead, kGapStep);
    const double level = out.empty() ? 0.0 : out.back();
    for (Index c = 0; c < kCalibrationCopies; ++c) {
        f.ground_truth[0].push_back(static_cast<Index>(out.size()));
        for (Index t = 0; t < p.period; ++t) {
            const double square = t < p.period / 2 ? 1.0 : -1.0;
            out.push_back(level + square + gen.normal(p.noise));
        }
    }
    for (Index c = 0; c < kHeartbeatCopies; ++c) {
        f.ground_truth[1].push_back(static_cast<Index>(out.size()));
        const double t_height =
                0.2 + 0.3 * static_cast<double>(c) / static_cast<double>(kHeartbeatCopies - 1);
        for (Index t = 0; t < p.period; ++t) {
            out.push_back(level + heartbeat(t, p.period, t_height) + gen.normal(p.noise));
        }
    }
    gen.walk(out, tail, kGapStep);
    f.values = to_vector(out);
    return f;
}

}  // namespace

std::string_view to_string(FixtureKind kind) noexcept {
    switch (kind) {
        case FixtureKind::kPlantedMotif: return "planted-motif";
        case FixtureKind::kTwoMotif: return "two-motif";
        case FixtureKind::kRandomWalk: return "random-walk";
        case FixtureKind::kSine: return "sine";
    }
    return "unknown";
}

std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept {
    for (auto kind : {FixtureKind::kPlantedMotif, FixtureKind::kTwoMotif, FixtureKind::kRandomWalk,
                      FixtureKind::kSine}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

Fixture generate_fixture(FixtureKind kind, const FixtureParams& params, std::uint64_t seed) {
    check_params(params);
    Generator gen(seed);
    Fixture f;
    switch (kind) {
        case FixtureKind::kPlantedMotif: f = planted_motif(params, gen); break;
        case FixtureKind::kTwoMotif: f = two_motif(params, gen); break;
        case FixtureKind::kRandomWalk: {
            if (params.length < 1) {
                throw ParameterError("random-walk needs a positive length");
            }
            std::vector<double> out;
            gen.walk(out, params.length, 1.0);
            f.values = to_vector(out);
            break;
        }
        case FixtureKind::kSine: {
            if (params.length < 1) {
                throw ParameterError("sine needs a positive length");
            }
            f.values.resize(params.length);
            for (Index t = 0; t < params.length; ++t) {
                f.values(t) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                       static_cast<double>(params.period)) +
                              gen.normal(params.noise);
            }
            break;
        }
    }
    f.kind = kind;
    f.seed = seed;
    f.period = params.period;
    return f;
}

}  // namespace motiflets
