#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "motiflets/series.hpp"

namespace testing_support {

using motiflets::Index;

inline Eigen::VectorXd random_walk(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    Eigen::VectorXd x(n);
    double v = 0.0;
    for (Index t = 0; t < n; ++t) {
        v += step(rng);
        x(t) = v;
    }
    return x;
}

inline Eigen::VectorXd gaussian_noise(Index n, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    Eigen::VectorXd x(n);
    for (Index t = 0; t < n; ++t) {
        x(t) = g(rng);
    }
    return x;
}

/// Two-pass mean and population std of x[i, i+l) in long double.
struct WindowStats {
    long double mean;
    long double std;
};

inline WindowStats two_pass(const Eigen::VectorXd& x, Index i, Index l) {
    long double mean = 0;
    for (Index t = 0; t < l; ++t) {
        mean += x(i + t);
    }
    mean /= l;
    long double var = 0;
    for (Index t = 0; t < l; ++t) {
        const long double d = x(i + t) - mean;
        var += d * d;
    }
    return {mean, std::sqrt(var / l)};
}

/// Squared z-normalized distance from the definition, in long double. Windows whose
/// std is below `flat_floor` normalize to zero.
inline long double oracle_sq_distance(const Eigen::VectorXd& x, Index l, Index i, Index j,
                                      long double flat_floor = 0) {
    const auto a = two_pass(x, i, l);
    const auto b = two_pass(x, j, l);
    long double sum = 0;
    for (Index t = 0; t < l; ++t) {
        const long double za = a.std <= flat_floor ? 0 : (x(i + t) - a.mean) / a.std;
        const long double zb = b.std <= flat_floor ? 0 : (x(j + t) - b.mean) / b.std;
        sum += (za - zb) * (za - zb);
    }
    return sum;
}

/// Smooth bump template of length l with unit peak, for planting exact copies.
inline Eigen::VectorXd bump_template(Index l) {
    Eigen::VectorXd t(l);
    for (Index s = 0; s < l; ++s) {
        const double u = static_cast<double>(s) / static_cast<double>(l - 1);
        t(s) = std::sin(3.0 * M_PI * u) * std::exp(-3.0 * u) + 0.5 * u;
    }
    return t;
}

/// Points on two parallel rings of m points each (flat cylinder, circumference m * r).
/// Neighbouring points on a ring are r apart; each red point sits at distance r + eps from
/// its two nearest blue points. Items 0..m-1 are blue, m..2m-1 red (red j between blue j
/// and blue j+1). Returns unsquared distances.
inline Eigen::MatrixXd two_ring_geometry(Index m, double r, double eps) {
    const double circumference = static_cast<double>(m) * r;
    const double h = std::sqrt((r + eps) * (r + eps) - 0.25 * r * r);
    auto x_of = [&](Index p) {
        return p < m ? static_cast<double>(p) * r : (static_cast<double>(p - m) + 0.5) * r;
    };
    Eigen::MatrixXd d(2 * m, 2 * m);
    for (Index a = 0; a < 2 * m; ++a) {
        for (Index b = 0; b < 2 * m; ++b) {
            double dx = std::abs(x_of(a) - x_of(b));
            dx = std::min(dx, circumference - dx);
            const double dy = (a < m) == (b < m) ? 0.0 : h;
            d(a, b) = a == b ? 0.0 : std::hypot(dx, dy);
        }
    }
    return d;
}

}  // namespace testing_support
