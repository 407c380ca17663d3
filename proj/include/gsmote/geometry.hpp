#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "gsmote/matrix.hpp"
#include "gsmote/rng.hpp"

namespace gsmote {

// Uniform draw from the interior of the unit p-ball. A standard normal vector
// gives the direction (isotropic); the radius follows r^(1/p) so volume shells
// are hit uniformly. Consumes exactly p normals plus one uniform per call,
// except in the measure-zero case of an all-zero normal vector, which is
// redrawn.
inline std::vector<double> sample_unit_ball(Rng& rng, std::size_t p) {
    std::vector<double> v(p);
    double len = 0.0;
    do {
        len = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            v[i] = rng.normal();
            len += v[i] * v[i];
        }
    } while (len == 0.0);
    len = std::sqrt(len);
    const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(p));
    for (auto& x : v) x = x / len * r;
    return v;
}

// Unit vector from a center toward a surface point, with the separating
// distance. Coincident points have no direction; callers treat that case as
// a degenerate geometry where the sample collapses onto the center.
struct Direction {
    std::vector<double> e_par;  // unit vector center -> surface
    double radius = 0.0;        // distance between the two points
};

inline std::optional<Direction> make_direction(std::span<const double> center,
                                               std::span<const double> surface) {
    Direction d;
    d.e_par.resize(center.size());
    double len = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        d.e_par[i] = surface[i] - center[i];
        len += d.e_par[i] * d.e_par[i];
    }
    if (len == 0.0) return std::nullopt;
    len = std::sqrt(len);
    d.radius = len;
    for (auto& x : d.e_par) x /= len;
    return d;
}

// Reflects the sample across the hyperplane through the origin orthogonal to
// e_par when it falls in the cap cut off by the truncation factor. At
// a_trunc = 1 the surviving half-space is x_par >= 0; at a_trunc = -1 it is
// x_par <= 0; intermediate values trim a smaller cap.
inline std::vector<double> truncate(std::vector<double> x, std::span<const double> e_par,
                                    double a_trunc) {
    const double x_par = dot(x, e_par);
    if (std::abs(a_trunc - x_par) > 1.0) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= 2.0 * x_par * e_par[i];
    }
    return x;
}

// Shrinks the component orthogonal to e_par by a_def; a_def = 1 flattens the
// ball onto the center-surface axis, a_def = 0 leaves it untouched.
inline std::vector<double> deform(std::vector<double> x, std::span<const double> e_par,
                                  double a_def) {
    const double x_par = dot(x, e_par);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double perp = x[i] - x_par * e_par[i];
        x[i] -= a_def * perp;
    }
    return x;
}

// Maps a unit-ball sample into data space: scaled by the center-to-surface
// radius and recentered on the chosen minority point.
inline std::vector<double> translate(std::span<const double> x, std::span<const double> center,
                                     double radius) {
    std::vector<double> out(center.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = center[i] + radius * x[i];
    return out;
}

}  // namespace gsmote
