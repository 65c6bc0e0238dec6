#pragma once

// Linear stability of steady flame profiles.  The linearization about a
// slope profile v is
//     L[v] xi = eps xi'' - v xi' + (1 - v') xi
// which is symmetric under the weighted inner product with weight
// rho(x) = exp(-theta(x)/eps), theta' = v.  The MS variant adds the
// nonlocal term I(xi) (multiplication by k on mode k) in place of xi.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "flamelab/evolution.hpp"
#include "flamelab/phase_plane.hpp"

namespace flamelab {

enum class Stability { STABLE, UNSTABLE };

inline const char* stability_name(Stability s) {
    return s == Stability::STABLE ? "STABLE" : "UNSTABLE";
}

enum class OperatorKind { RS_ABOUT_V, MS_ABOUT_V, TRIVIAL_RS, TRIVIAL_MS };

struct LinearizedOperator {
    OperatorKind kind = OperatorKind::TRIVIAL_RS;
    double epsilon = 0.5;
    std::optional<SpectralField> v; // absent for the TRIVIAL kinds
};

struct SpectrumReport {
    std::vector<double> eigenvalues; // descending (real parts for MS)
    int n_grid = 0;
    bool weight_used = false;
    // zero mode of the MS linearization (level shifts are neutral),
    // identified as the eigenvalue of smallest magnitude
    std::optional<double> translational;
};

inline SpectrumReport trivial_spectrum(Equation equation, double epsilon,
                                       int n_max) {
    if (n_max < 1) throw ConfigError("trivial_spectrum: n_max must be >= 1");
    SpectrumReport rep;
    rep.n_grid = n_max;
    rep.eigenvalues.reserve(n_max);
    for (int n = 1; n <= n_max; ++n)
        rep.eigenvalues.push_back(linear_symbol(equation, epsilon, n));
    std::sort(rep.eigenvalues.rbegin(), rep.eigenvalues.rend());
    return rep;
}

// L[v] applied spectrally; parities work out for both xi parities.
inline SpectralField apply_linearized(const SpectralField& v, double eps,
                                      const SpectralField& xi) {
    return (eps * derivative(xi, 2)) - multiply(v, derivative(xi)) + xi -
           multiply(derivative(v), xi);
}

struct ComparisonVerdict {
    std::vector<double> phi; // samples on the grid of v
    std::optional<double> first_zero;
    Stability verdict = Stability::STABLE;
};

// Integrates L[v] phi = 0 with phi(0) = 0, phi'(0) = 1 across the channel
// and reports the first interior sign change.  No zero on (0, pi) certifies
// that the largest eigenvalue of L[v] is negative.
inline ComparisonVerdict comparison_test(const SpectralField& v,
                                         double epsilon) {
    if (epsilon <= 0.0)
        throw ConfigError("comparison_test: epsilon must be positive");
    if (v.parity() != Parity::Odd)
        throw ConfigError("comparison_test: profile must be a slope field");
    if (rs_residual(v, epsilon) > 1e-6)
        throw ConfigError("comparison_test: profile is not a steady state");

    const SpectralField vp = derivative(v);
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    auto rhs = [&](const State& s, State& d, double x) {
        d[0] = s[1];
        d[1] = (v.eval(x) * s[1] - (1.0 - vp.eval(x)) * s[0]) / epsilon;
    };
    auto st = ode::make_dense_output(1e-12, 1e-12,
                                     ode::runge_kutta_dopri5<State>());
    st.initialize(State{0.0, 1.0}, 0.0, 1e-4);

    const GridSpec& grid = v.grid();
    ComparisonVerdict out;
    out.phi.resize(grid.points(), 0.0);

    State scratch;
    auto phi_at = [&](double x) {
        st.calc_state(x, scratch);
        return scratch[0];
    };

    // checkpoints: every grid node plus every step end, in order
    double check_t = 0.0;
    int node = 1;
    bool crossed = false;
    for (;;) {
        auto iv = st.do_step(rhs);
        const double tb = std::min(iv.second, pi);
        for (;;) {
            double next;
            if (node < grid.points() && grid.x(node) <= tb) {
                next = grid.x(node);
            } else if (check_t < tb) {
                next = tb;
            } else {
                break;
            }
            const double val = phi_at(next);
            if (node < grid.points() && next == grid.x(node)) {
                out.phi[node] = val;
                ++node;
            }
            if (val < 0.0 && !crossed) {
                double lo = check_t, hi = next;
                for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (phi_at(mid) < 0.0 ? hi : lo) = mid;
                }
                const double zero = 0.5 * (lo + hi);
                if (zero < pi - 1e-10) {
                    out.first_zero = zero;
                    out.verdict = Stability::UNSTABLE;
                }
                crossed = true;
            }
            check_t = next;
        }
        if (iv.second >= pi) break;
    }
    return out;
}

struct ChiWitnessReport {
    double c = 0.0;          // normalization, chi'(0) = 1
    double max_residual = 0.0; // of L[v] chi + 2 c (v')^2 v
    double min_chi = 0.0;    // over (delta, pi - delta)
    SpectralField chi;
};

// Positive supersolution witness for the j = 1 branch: with
// chi = c v (3 - v'), equal to c (2v - eps v'') on steady profiles, the
// steady equation gives the identity L[v] chi = -2c (v')^2 v <= 0 wherever
// v >= 0, so a positive chi certifies the comparison solution stays
// positive.  The product form avoids putting fourth derivatives on the
// profile's coefficient noise.
inline ChiWitnessReport chi_witness(const SpectralField& v, double epsilon,
                                    double delta = 0.05) {
    if (v.parity() != Parity::Odd)
        throw ConfigError("chi_witness: profile must be a slope field");
    const auto& vals = v.values();
    for (size_t i = 1; i + 1 < vals.size(); ++i)
        if (vals[i] <= 0.0 && std::abs(vals[i]) > 1e-12)
            throw ConfigError("chi_witness: profile must be positive inside the channel");

    ChiWitnessReport rep;
    SpectralField raw = (3.0 * v) - multiply(v, derivative(v));
    rep.c = 1.0 / derivative(raw).eval(0.0);
    rep.chi = rep.c * raw;

    const SpectralField vp = derivative(v);
    SpectralField forcing = multiply(multiply(vp, vp), v);
    SpectralField res = apply_linearized(v, epsilon, rep.chi) +
                        (2.0 * rep.c) * forcing;
    rep.max_residual = max_abs(res);

    const GridSpec& grid = v.grid();
    double lo = std::numeric_limits<double>::max();
    for (int i = 0; i < grid.points(); ++i) {
        const double x = grid.x(i);
        if (x <= delta || x >= pi - delta) continue;
        lo = std::min(lo, rep.chi.values()[i]);
    }
    rep.min_chi = lo;
    return rep;
}

// max |L[v] v'| over interior nodes: differentiating the steady equation
// shows the translation generator is annihilated even though it fails the
// boundary conditions.
inline double translational_residual(const SpectralField& v, double epsilon) {
    SpectralField res = apply_linearized(v, epsilon, derivative(v));
    const auto& vals = res.values();
    double m = 0.0;
    for (size_t i = 1; i + 1 < vals.size(); ++i)
        m = std::max(m, std::abs(vals[i]));
    return m;
}

namespace detail {

inline SpectrumReport rs_discrete_spectrum(const SpectralField& v, double eps,
                                           int m) {
    const SpectralField theta = antiderivative(v).field;
    const SpectralField vp = derivative(v);
    const double h = pi / (m + 1);

    // Conservative-form discretization symmetrized by the square root of
    // the weight; the exponents are O(h^2) differences of theta, so the
    // transform never under- or overflows even for small eps.
    std::vector<double> th(m + 2), th_half(m + 1);
    for (int i = 0; i <= m + 1; ++i) th[i] = theta.eval(i * h);
    for (int i = 0; i <= m; ++i) th_half[i] = theta.eval((i + 0.5) * h);
    Eigen::VectorXd diag(m), sub(m - 1);
    for (int i = 1; i <= m; ++i) {
        const double up = std::exp(-(th_half[i] - th[i]) / eps);
        const double dn = std::exp(-(th_half[i - 1] - th[i]) / eps);
        diag(i - 1) = -(eps / (h * h)) * (up + dn) + 1.0 - vp.eval(i * h);
        if (i < m)
            sub(i - 1) = (eps / (h * h)) *
                         std::exp(-(th_half[i] - 0.5 * (th[i] + th[i + 1])) / eps);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("discrete_spectrum: eigensolver failed");
    SpectrumReport rep;
    rep.n_grid = m;
    rep.weight_used = true;
    rep.eigenvalues.assign(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + m);
    std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
    return rep;
}

inline SpectrumReport ms_discrete_spectrum(const SpectralField& v, double eps,
                                           int n_modes) {
    const GridSpec& grid = v.grid();
    if (n_modes > grid.cutoff())
        throw ConfigError("discrete_spectrum: mode count exceeds the profile's resolved band");
    const auto& vv = v.values();
    const int np = grid.points();

    // column k: action on cos(kx) is (k - eps k^2) cos(kx) + k v sin(kx)
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_modes, n_modes);
    std::vector<double> prod(np);
    for (int k = 1; k < n_modes; ++k) {
        for (int i = 0; i < np; ++i)
            prod[i] = k * vv[i] * std::sin(k * grid.x(i));
        auto col = SpectralField::from_values(grid, Parity::Even, prod);
        for (int j = 0; j < n_modes; ++j) a(j, k) = col.coeff(j);
        a(k, k) += static_cast<double>(k) - eps * k * k;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericalError("discrete_spectrum: eigensolver failed");
    SpectrumReport rep;
    rep.n_grid = n_modes;
    rep.weight_used = false;
    rep.eigenvalues.resize(n_modes);
    for (int i = 0; i < n_modes; ++i)
        rep.eigenvalues[i] = solver.eigenvalues()[i].real();
    std::sort(rep.eigenvalues.rbegin(), rep.eigenvalues.rend());
    const auto small = std::min_element(
        rep.eigenvalues.begin(), rep.eigenvalues.end(),
        [](double x, double y) { return std::abs(x) < std::abs(y); });
    rep.translational = *small;
    return rep;
}

} // namespace detail

inline SpectrumReport discrete_spectrum(const LinearizedOperator& op,
                                        int n_grid) {
    if (n_grid < 64)
        throw ConfigError("discrete_spectrum: n_grid must be at least 64");
    if (op.epsilon <= 0.0)
        throw ConfigError("discrete_spectrum: epsilon must be positive");
    switch (op.kind) {
        case OperatorKind::TRIVIAL_RS:
            return trivial_spectrum(Equation::RS, op.epsilon, n_grid);
        case OperatorKind::TRIVIAL_MS:
            return trivial_spectrum(Equation::MS, op.epsilon, n_grid);
        case OperatorKind::RS_ABOUT_V: {
            if (!op.v) throw ConfigError("discrete_spectrum: profile missing");
            if (rs_residual(*op.v, op.epsilon) > 1e-6)
                throw ConfigError("discrete_spectrum: profile is not a steady state");
            return detail::rs_discrete_spectrum(*op.v, op.epsilon, n_grid);
        }
        case OperatorKind::MS_ABOUT_V: {
            if (!op.v) throw ConfigError("discrete_spectrum: profile missing");
            SpectralField res = (op.epsilon * derivative(*op.v, 2)) -
                                multiply(*op.v, derivative(*op.v)) +
                                dl_operator(*op.v);
            if (max_abs(res) > 1e-6)
                throw ConfigError("discrete_spectrum: profile is not a steady state");
            return detail::ms_discrete_spectrum(*op.v, op.epsilon, n_grid);
        }
    }
    throw ConfigError("discrete_spectrum: unknown operator kind");
}

// Stability column for bifurcation tables.
inline std::function<std::string(const RsSteadyState&)>
comparison_verdict_hook() {
    return [](const RsSteadyState& st) {
        return std::string(
            stability_name(comparison_test(st.v, st.epsilon).verdict));
    };
}

} // namespace flamelab
