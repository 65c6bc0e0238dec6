#pragma once

// Reference implementations used only by the test suite.  Everything here is
// deliberately independent of the library's computational path: products are
// expanded with product-to-sum identities instead of transforms, integrals use
// Gauss-Legendre quadrature instead of time integration, and so on.  When a
// test compares the library against these, agreement is evidence, not
// tautology.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------- products

// Trig series product via cos A cos B = (cos(A-B)+cos(A+B))/2 and friends.
// Coefficient slot k is wavenumber k; sine series keep slot 0 at zero.
struct Series {
    bool even;                  // cosine series if true, sine series if false
    std::vector<double> c;
};

inline void add_cos(std::vector<double>& acc, int k, double v) {
    if (k < 0) k = -k; // cos is even
    if (k >= static_cast<int>(acc.size())) acc.resize(k + 1, 0.0);
    acc[k] += v;
}

inline void add_sin(std::vector<double>& acc, int k, double v) {
    if (k == 0) return;
    if (k < 0) { k = -k; v = -v; } // sin is odd
    if (k >= static_cast<int>(acc.size())) acc.resize(k + 1, 0.0);
    acc[k] += v;
}

inline Series product(const Series& f, const Series& g) {
    Series out;
    out.even = (f.even == g.even);
    out.c.assign(1, 0.0);
    for (int m = 0; m < static_cast<int>(f.c.size()); ++m) {
        if (f.c[m] == 0.0) continue;
        for (int n = 0; n < static_cast<int>(g.c.size()); ++n) {
            if (g.c[n] == 0.0) continue;
            const double w = 0.5 * f.c[m] * g.c[n];
            if (f.even && g.even) {
                add_cos(out.c, m - n, w);
                add_cos(out.c, m + n, w);
            } else if (!f.even && !g.even) {
                add_cos(out.c, m - n, w);
                add_cos(out.c, m + n, -w);
            } else if (!f.even && g.even) { // sin * cos
                add_sin(out.c, m + n, w);
                add_sin(out.c, m - n, w);
            } else {                        // cos * sin
                add_sin(out.c, m + n, w);
                add_sin(out.c, n - m, w);
            }
        }
    }
    // cos(0-n) double-counts nothing, but a0 of a cosine result picked up
    // contributions from both m-n and n-m terms already; nothing to fix here.
    return out;
}

// -------------------------------------------------------------- quadrature

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, int n = 80) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * f(mid + half * x[i]);
    return s * half;
}

inline double trapezoid(const std::vector<double>& vals, double dx) {
    double s = 0.5 * (vals.front() + vals.back());
    for (size_t i = 1; i + 1 < vals.size(); ++i) s += vals[i];
    return s * dx;
}

// ------------------------------------------------- phase-plane period oracle

// The orbit through (w0, 0) of  w' = p(w-1)/eps, p' = w  conserves
//   E(w, p) = p^2/2 - eps[(w - w0) + ln((1-w)/(1-w0))],
// so on the orbit p^2 = 2 eps H(w) with H(w) = (w - w0) + ln((1-w)/(1-w0)).
// The period reduces to a quadrature of a smooth integrand after the
// substitution w = mid + half*sin(theta), which absorbs both square-root
// endpoints of H.  None of this shares code with the library's event-based
// period measurement.
inline double phase_h(double w, double w0) {
    return (w - w0) + std::log((1.0 - w) / (1.0 - w0));
}

inline double phase_wmin(double w0) {
    double lo = -1.0;
    while (phase_h(lo, w0) > 0.0) lo *= 2.0;
    double hi = 0.0; // H(0) = -w0 - ln(1-w0) > 0
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (phase_h(mid, w0) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double period_by_quadrature(double eps, double w0, int n_nodes = 120) {
    if (w0 <= 0.0 || w0 >= 1.0) throw std::invalid_argument("w0 out of (0,1)");
    const double wmin = phase_wmin(w0);
    const double mid = 0.5 * (w0 + wmin), half = 0.5 * (w0 - wmin);
    auto q = [&](double w) { // H / ((w0 - w)(w - wmin)), extended to the ends
        const double d0 = w0 - w, d1 = w - wmin;
        if (d0 < 1e-9 * half) return (w0 / (1.0 - w0)) / (w0 - wmin);
        if (d1 < 1e-9 * half) return (-wmin / (1.0 - wmin)) / (w0 - wmin);
        return phase_h(w, w0) / (d0 * d1);
    };
    auto integrand = [&](double theta) {
        const double w = mid + half * std::sin(theta);
        return 1.0 / (std::sqrt(2.0 * q(w)) * (1.0 - w));
    };
    // T/2 = sqrt(eps) * integral over theta in [-pi/2, pi/2]
    return 2.0 * std::sqrt(eps) * integrate(integrand, -0.5 * pi, 0.5 * pi, n_nodes);
}

} // namespace oracle
