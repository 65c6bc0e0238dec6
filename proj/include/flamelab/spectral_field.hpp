#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "flamelab/grid.hpp"
#include "flamelab/transforms.hpp"

namespace flamelab {

enum class Parity { Even, Odd }; // Even = cosine series, Odd = sine series

// A real field on [0, pi] carried simultaneously as mode coefficients and as
// grid samples.  The two views are kept consistent: values are always the
// synthesis of the (possibly dealiased) coefficients.  Coefficient index k is
// the wavenumber; for odd fields slot 0 is unused.
class SpectralField {
public:
    SpectralField() = default;

    static SpectralField from_coeffs(const GridSpec& grid, Parity parity,
                                     std::vector<double> coeffs) {
        grid.validate();
        coeffs.resize(grid.n_modes, 0.0);
        if (parity == Parity::Odd) coeffs[0] = 0.0;
        SpectralField f;
        f.grid_ = grid;
        f.parity_ = parity;
        f.coeffs_ = std::move(coeffs);
        f.synthesize();
        return f;
    }

    static SpectralField from_values(const GridSpec& grid, Parity parity,
                                     const std::vector<double>& values,
                                     bool dealias = true) {
        grid.validate();
        if (static_cast<int>(values.size()) != grid.points())
            throw ConfigError("field: sample count does not match grid");
        std::vector<double> c = parity == Parity::Even
                                    ? cosine_analyze(values, grid.n_modes)
                                    : sine_analyze(values, grid.n_modes);
        if (dealias)
            for (int k = grid.cutoff(); k < grid.n_modes; ++k) c[k] = 0.0;
        return from_coeffs(grid, parity, std::move(c));
    }

    static SpectralField zero(const GridSpec& grid, Parity parity) {
        return from_coeffs(grid, parity, {});
    }

    const GridSpec& grid() const { return grid_; }
    Parity parity() const { return parity_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    const std::vector<double>& values() const { return values_; }
    double coeff(int k) const { return coeffs_.at(k); }

    // Direct mode sum; works for any x, not just grid nodes.
    double eval(double x) const {
        double s = 0.0;
        if (parity_ == Parity::Even) {
            for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k)
                s += coeffs_[k] * std::cos(k * x);
            s += coeffs_[0];
        } else {
            for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k)
                s += coeffs_[k] * std::sin(k * x);
        }
        return s;
    }

    SpectralField with_coeffs(std::vector<double> coeffs) const {
        return from_coeffs(grid_, parity_, std::move(coeffs));
    }

private:
    void synthesize() {
        values_ = parity_ == Parity::Even
                      ? cosine_synthesize(coeffs_, grid_.points())
                      : sine_synthesize(coeffs_, grid_.points());
    }

    GridSpec grid_;
    Parity parity_ = Parity::Even;
    std::vector<double> coeffs_;
    std::vector<double> values_;
};

namespace detail {
inline void require_same_layout(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid() == g.grid()) || f.parity() != g.parity())
        throw ConfigError("field: operands live on different grids or parities");
}
} // namespace detail

inline SpectralField operator+(const SpectralField& f, const SpectralField& g) {
    detail::require_same_layout(f, g);
    std::vector<double> c = f.coeffs();
    for (size_t k = 0; k < c.size(); ++k) c[k] += g.coeffs()[k];
    return f.with_coeffs(std::move(c));
}

inline SpectralField operator-(const SpectralField& f, const SpectralField& g) {
    detail::require_same_layout(f, g);
    std::vector<double> c = f.coeffs();
    for (size_t k = 0; k < c.size(); ++k) c[k] -= g.coeffs()[k];
    return f.with_coeffs(std::move(c));
}

inline SpectralField operator*(double s, const SpectralField& f) {
    std::vector<double> c = f.coeffs();
    for (double& v : c) v *= s;
    return f.with_coeffs(std::move(c));
}

// d/dx flips parity: (a_k cos kx)' = -k a_k sin kx, (b_k sin kx)' = k b_k cos kx.
inline SpectralField derivative(const SpectralField& f, int order = 1) {
    if (order < 0) throw ConfigError("derivative: order must be >= 0");
    SpectralField out = f;
    for (int pass = 0; pass < order; ++pass) {
        const auto& c = out.coeffs();
        std::vector<double> d(c.size(), 0.0);
        Parity p;
        if (out.parity() == Parity::Even) {
            p = Parity::Odd;
            for (size_t k = 1; k < c.size(); ++k) d[k] = -static_cast<double>(k) * c[k];
        } else {
            p = Parity::Even;
            for (size_t k = 1; k < c.size(); ++k) d[k] = static_cast<double>(k) * c[k];
        }
        out = SpectralField::from_coeffs(out.grid(), p, std::move(d));
    }
    return out;
}

// |D|: multiply mode k by k, preserving parity.  Annihilates the mean.
inline SpectralField dl_operator(const SpectralField& f) {
    std::vector<double> c = f.coeffs();
    for (size_t k = 0; k < c.size(); ++k) c[k] *= static_cast<double>(k);
    return f.with_coeffs(std::move(c));
}

inline SpectralField remove_mean(const SpectralField& f) {
    if (f.parity() != Parity::Even)
        throw ConfigError("remove_mean: only meaningful for cosine fields");
    std::vector<double> c = f.coeffs();
    c[0] = 0.0;
    return f.with_coeffs(std::move(c));
}

// Pointwise product computed on the grid, then re-analyzed with the parity
// product rule (even*even, odd*odd -> even; mixed -> odd).  On the default
// grid the sample count is high enough that truncation back to n_modes is
// exact; dealiasing additionally zeroes the top third.
inline SpectralField multiply(const SpectralField& f, const SpectralField& g,
                              bool dealias = true) {
    if (!(f.grid() == g.grid()))
        throw ConfigError("multiply: operands live on different grids");
    Parity p = f.parity() == g.parity() ? Parity::Even : Parity::Odd;
    std::vector<double> prod(f.values().size());
    for (size_t i = 0; i < prod.size(); ++i)
        prod[i] = f.values()[i] * g.values()[i];
    return SpectralField::from_values(f.grid(), p, prod, dealias);
}

inline double mean(const SpectralField& f) {
    if (f.parity() == Parity::Even) return f.coeffs()[0];
    // (1/pi) * integral of sin(kx) over [0, pi] = (1 - (-1)^k) / (pi k)
    double m = 0.0;
    for (size_t k = 1; k < f.coeffs().size(); k += 2)
        m += 2.0 * f.coeffs()[k] / (pi * static_cast<double>(k));
    return m;
}

// Parseval on [0, pi]: |f|^2 = pi a_0^2 + (pi/2) sum a_k^2 for cosine fields,
// (pi/2) sum b_k^2 for sine fields.
inline double l2_norm_sq(const SpectralField& f) {
    const auto& c = f.coeffs();
    double s = 0.0;
    for (size_t k = 1; k < c.size(); ++k) s += c[k] * c[k];
    s *= 0.5 * pi;
    if (f.parity() == Parity::Even) s += pi * c[0] * c[0];
    return s;
}

inline double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_sq(f)); }

inline double h1_norm(const SpectralField& f) {
    const auto& c = f.coeffs();
    double grad = 0.0;
    for (size_t k = 1; k < c.size(); ++k)
        grad += static_cast<double>(k) * static_cast<double>(k) * c[k] * c[k];
    return std::sqrt(l2_norm_sq(f) + 0.5 * pi * grad);
}

inline double max_abs(const SpectralField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

// Antiderivative with zero value at x = 0.  Integrating a cosine series
// produces a genuine ramp a_0 * x on top of a sine series; the ramp slope is
// returned alongside the periodic part so callers can reassemble exactly.
struct Primitive {
    SpectralField field;
    double ramp = 0.0;

    double eval(double x) const { return field.eval(x) + ramp * x; }

    std::vector<double> values() const {
        std::vector<double> v = field.values();
        for (int i = 0; i < field.grid().points(); ++i)
            v[i] += ramp * field.grid().x(i);
        return v;
    }
};

inline Primitive antiderivative(const SpectralField& f) {
    const auto& c = f.coeffs();
    std::vector<double> out(c.size(), 0.0);
    if (f.parity() == Parity::Odd) {
        // integral of b_k sin kx = (b_k/k)(1 - cos kx)
        double a0 = 0.0;
        for (size_t k = 1; k < c.size(); ++k) {
            out[k] = -c[k] / static_cast<double>(k);
            a0 += c[k] / static_cast<double>(k);
        }
        out[0] = a0;
        return {SpectralField::from_coeffs(f.grid(), Parity::Even, std::move(out)), 0.0};
    }
    for (size_t k = 1; k < c.size(); ++k) out[k] = c[k] / static_cast<double>(k);
    return {SpectralField::from_coeffs(f.grid(), Parity::Odd, std::move(out)), c[0]};
}

} // namespace flamelab
