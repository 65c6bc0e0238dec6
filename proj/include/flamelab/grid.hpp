#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "flamelab/errors.hpp"

namespace flamelab {

inline constexpr double pi = std::numbers::pi;

// Collocation setup on [0, pi].  n_points = 0 means "derive from n_modes";
// the default 2*n_modes+1 gives a grid on which the pointwise product of two
// band-limited fields is alias-free after truncation back to n_modes.
struct GridSpec {
    int n_modes = 256;
    int n_points = 0;
    double dealias_fraction = 2.0 / 3.0;

    int points() const { return n_points > 0 ? n_points : 2 * n_modes + 1; }

    // First mode index that gets zeroed by dealiasing.
    int cutoff() const {
        return static_cast<int>(std::floor(dealias_fraction * n_modes));
    }

    double dx() const { return pi / (points() - 1); }
    double x(int i) const { return i * dx(); }

    std::vector<double> nodes() const {
        std::vector<double> xs(points());
        for (int i = 0; i < points(); ++i) xs[i] = x(i);
        return xs;
    }

    void validate() const {
        if (n_modes < 4) throw ConfigError("grid: n_modes must be at least 4");
        if (n_points != 0 && n_points < n_modes + 1)
            throw ConfigError("grid: n_points must be 0 (auto) or > n_modes");
        if (dealias_fraction <= 0.0 || dealias_fraction > 1.0)
            throw ConfigError("grid: dealias_fraction must lie in (0, 1]");
    }

    bool operator==(const GridSpec&) const = default;
};

} // namespace flamelab
