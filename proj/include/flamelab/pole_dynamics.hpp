#pragma once

// Pole decomposition of the nonlocal equation: profiles of the form
//     v(x) = -eps * sum over pole pairs of 2 sin(x - a) / (cosh y - cos(x - a))
// with pair lines a in {0, pi} stay in this family, and the heights obey
// the gradient flow dy_j/dt = F_j.  Heights of the conjugate lower-half
// poles mirror the upper ones, so only the n representative heights are
// state variables.  The overall minus sign pairs with the -v v' convention
// of the steady equation: near a pole the eps v'' and -v v' singularities
// cancel only for residue -eps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "flamelab/errors.hpp"
#include "flamelab/parallel.hpp"
#include "flamelab/spectral_field.hpp"

namespace flamelab {

constexpr double pole_height_floor = 1e-8;
constexpr double pole_separation_floor = 1e-10;
constexpr double pole_escape_height = 60.0;

struct PolePair {
    double line = 0.0;   // 0 or pi
    double height = 1.0; // imaginary part of the upper pole, > 0
};

struct PoleSet {
    double epsilon = 0.2;
    std::vector<PolePair> pairs;

    int n() const { return static_cast<int>(pairs.size()); }

    void validate() const {
        if (epsilon <= 0.0)
            throw ConfigError("poles: epsilon must be positive");
        if (pairs.empty()) throw ConfigError("poles: no pairs");
        for (const auto& p : pairs) {
            if (!(p.height > pole_height_floor))
                throw ConfigError("poles: height at or below the axis floor");
            if (std::abs(p.line) > 1e-12 && std::abs(p.line - pi) > 1e-12)
                throw ConfigError("poles: line must be 0 or pi");
        }
        for (int j = 0; j < n(); ++j)
            for (int l = j + 1; l < n(); ++l)
                if (std::abs(pairs[j].line - pairs[l].line) < 1e-9 &&
                    std::abs(pairs[j].height - pairs[l].height) <
                        pole_separation_floor)
                    throw ConfigError("poles: coincident heights on one line");
    }
};

namespace detail {

inline double coth(double x) { return 1.0 / std::tanh(x); }
inline double csch2(double x) {
    const double s = std::sinh(x);
    return 1.0 / (s * s);
}
inline double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}
inline bool same_line(const PolePair& a, const PolePair& b) {
    return std::abs(a.line - b.line) < 1e-9;
}

// force without the validation pass, for use inside flow steps
inline void force_raw(const PoleSet& p, const std::vector<double>& y,
                      std::vector<double>& out) {
    const int n = p.n();
    out.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double f = coth(y[j]); // conjugate of the same pair
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            const double d = 0.5 * (y[j] - y[l]);
            const double s = 0.5 * (y[j] + y[l]);
            if (same_line(p.pairs[j], p.pairs[l]))
                f += coth(d) + coth(s);
            else
                f += std::tanh(d) + std::tanh(s);
        }
        out[j] = p.epsilon * f - 1.0;
    }
}

inline std::vector<double> heights_of(const PoleSet& p) {
    std::vector<double> y(p.n());
    for (int j = 0; j < p.n(); ++j) y[j] = p.pairs[j].height;
    return y;
}

inline PoleSet with_heights(PoleSet p, const std::vector<double>& y) {
    for (int j = 0; j < p.n(); ++j) p.pairs[j].height = y[j];
    return p;
}

inline double max_abs_vec(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace detail

inline std::vector<double> force_F(const PoleSet& p) {
    p.validate();
    std::vector<double> f;
    detail::force_raw(p, detail::heights_of(p), f);
    return f;
}

// Full complex pole velocities; mainly a consistency check that two-line
// configurations keep their real parts frozen.
inline std::vector<std::complex<double>> complex_velocity(
    const std::vector<std::complex<double>>& z, double epsilon) {
    const int n = static_cast<int>(z.size());
    if (n == 0) throw ConfigError("complex_velocity: no poles");
    for (int j = 0; j < n; ++j) {
        if (std::abs(z[j].imag()) <= pole_height_floor)
            throw ConfigError("complex_velocity: pole on the real axis");
        for (int l = j + 1; l < n; ++l)
            if (std::abs(z[j] - z[l]) < pole_separation_floor)
                throw ConfigError("complex_velocity: coincident poles");
        bool has_conjugate = false;
        for (int l = 0; l < n; ++l)
            if (std::abs(std::conj(z[j]) - z[l]) < 1e-9) has_conjugate = true;
        if (!has_conjugate)
            throw ConfigError("complex_velocity: set is not conjugate-closed");
    }
    std::vector<std::complex<double>> w(n);
    const std::complex<double> i_unit(0.0, 1.0);
    for (int j = 0; j < n; ++j) {
        std::complex<double> acc(0.0, 0.0);
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            const std::complex<double> u = 0.5 * (z[j] - z[l]);
            acc -= epsilon * std::cos(u) / std::sin(u);
        }
        w[j] = acc - i_unit * (z[j].imag() > 0.0 ? 1.0 : -1.0);
    }
    return w;
}

// Potential whose gradient in the representative heights is exactly the
// force: same-line interactions contribute log sinh terms, opposite lines
// log cosh, and each pair interacts with its own conjugate through
// log sinh(y_j).
inline double pole_liapunov(const PoleSet& p) {
    p.validate();
    const int n = p.n();
    double u = 0.0;
    for (int j = 0; j < n; ++j) {
        u += p.epsilon * std::log(std::sinh(p.pairs[j].height)) -
             p.pairs[j].height;
        for (int l = j + 1; l < n; ++l) {
            const double d = 0.5 * (p.pairs[j].height - p.pairs[l].height);
            const double s = 0.5 * (p.pairs[j].height + p.pairs[l].height);
            if (detail::same_line(p.pairs[j], p.pairs[l]))
                u += 2.0 * p.epsilon *
                     (std::log(std::abs(std::sinh(d))) + std::log(std::sinh(s)));
            else
                u += 2.0 * p.epsilon *
                     (std::log(std::cosh(d)) + std::log(std::cosh(s)));
        }
    }
    return u;
}

// Analytic Jacobian of the force (equivalently the Hessian of the
// potential); symmetric because csch^2 and sech^2 are even.
inline Eigen::MatrixXd pole_hessian(const PoleSet& p) {
    p.validate();
    const int n = p.n();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        h(j, j) = -detail::csch2(p.pairs[j].height);
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            const double d = 0.5 * (p.pairs[j].height - p.pairs[l].height);
            const double s = 0.5 * (p.pairs[j].height + p.pairs[l].height);
            if (detail::same_line(p.pairs[j], p.pairs[l])) {
                h(j, j) += -0.5 * detail::csch2(d) - 0.5 * detail::csch2(s);
                h(j, l) = 0.5 * detail::csch2(d) - 0.5 * detail::csch2(s);
            } else {
                h(j, j) += 0.5 * detail::sech2(d) + 0.5 * detail::sech2(s);
                h(j, l) = -0.5 * detail::sech2(d) + 0.5 * detail::sech2(s);
            }
        }
    }
    return p.epsilon * h;
}

enum class HessianClass { MAXIMUM, SADDLE, INCONCLUSIVE_BY_GERSHGORIN };

inline const char* hessian_class_name(HessianClass c) {
    switch (c) {
        case HessianClass::MAXIMUM: return "MAXIMUM";
        case HessianClass::SADDLE: return "SADDLE";
        default: return "INCONCLUSIVE_BY_GERSHGORIN";
    }
}

struct HessianReport {
    Eigen::MatrixXd matrix;
    std::vector<double> eigenvalues; // descending
    std::vector<std::pair<double, double>> gershgorin; // (center, radius)
    HessianClass classification = HessianClass::INCONCLUSIVE_BY_GERSHGORIN;
    bool gershgorin_certifies = false; // negative-definite by discs alone
};

inline HessianReport hessian_classify(const PoleSet& p) {
    if (detail::max_abs_vec(force_F(p)) >= 1e-10)
        throw ConfigError("hessian_classify: configuration is not steady");
    HessianReport rep;
    rep.matrix = pole_hessian(p);
    const int n = p.n();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rep.matrix);
    rep.eigenvalues.assign(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + n);
    std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
    rep.gershgorin.reserve(n);
    bool certified = true;
    for (int j = 0; j < n; ++j) {
        double radius = 0.0;
        for (int l = 0; l < n; ++l)
            if (l != j) radius += std::abs(rep.matrix(j, l));
        rep.gershgorin.emplace_back(rep.matrix(j, j), radius);
        if (!(rep.matrix(j, j) + radius < -1e-10)) certified = false;
    }
    rep.gershgorin_certifies = certified;
    const double top = rep.eigenvalues.front();
    const double bottom = rep.eigenvalues.back();
    if (top < -1e-10)
        rep.classification = HessianClass::MAXIMUM;
    else if (top > 1e-10 && bottom < -1e-10)
        rep.classification = HessianClass::SADDLE;
    else
        rep.classification = HessianClass::INCONCLUSIVE_BY_GERSHGORIN;
    return rep;
}

struct PoleFlowReport {
    std::vector<double> times;
    std::vector<std::vector<double>> trajectory; // heights per sample
    std::vector<double> liapunov_values;
    double final_force_norm = std::numeric_limits<double>::infinity();
    bool converged = false;
};

inline std::pair<PoleSet, PoleFlowReport> flow_to_steady(const PoleSet& start,
                                                         double t_max = 200.0,
                                                         double tol = 1e-10) {
    start.validate();
    if (t_max <= 0.0 || tol <= 0.0)
        throw ConfigError("flow_to_steady: t_max and tol must be positive");
    const int n = start.n();

    namespace ode = boost::numeric::odeint;
    using Vec = std::vector<double>;
    auto rhs = [&](const Vec& y, Vec& dy, double) {
        detail::force_raw(start, y, dy);
    };

    PoleFlowReport rep;
    Vec y = detail::heights_of(start);
    Vec f(n);
    auto record = [&](double t) {
        rep.times.push_back(t);
        rep.trajectory.push_back(y);
        rep.liapunov_values.push_back(
            pole_liapunov(detail::with_heights(start, y)));
    };
    auto guard = [&]() {
        for (int j = 0; j < n; ++j) {
            if (y[j] > pole_escape_height)
                throw NumericalError("flow_to_steady: pole escaped to infinity");
            if (y[j] < pole_height_floor)
                throw NumericalError("flow_to_steady: pole reached the real axis");
            for (int l = j + 1; l < n; ++l)
                if (detail::same_line(start.pairs[j], start.pairs[l]) &&
                    std::abs(y[j] - y[l]) < pole_separation_floor)
                    throw NumericalError("flow_to_steady: pole collision");
        }
    };

    auto ctrl = ode::make_controlled(1e-10, 1e-10,
                                     ode::runge_kutta_dopri5<Vec>());
    double t = 0.0, dt = 1e-2;
    record(t);
    while (t < t_max) {
        detail::force_raw(start, y, f);
        if (detail::max_abs_vec(f) < tol) break;
        ode::controlled_step_result res;
        do {
            res = ctrl.try_step(rhs, y, t, dt);
        } while (res == ode::fail);
        guard();
        record(t);
    }

    // Newton polish on F = 0; the Jacobian is the (symmetric) Hessian.
    PoleSet out = detail::with_heights(start, y);
    for (int it = 0; it < 60; ++it) {
        detail::force_raw(out, detail::heights_of(out), f);
        if (detail::max_abs_vec(f) < 1e-12) break;
        Eigen::MatrixXd h = pole_hessian(out);
        Eigen::VectorXd fv(n);
        for (int j = 0; j < n; ++j) fv(j) = f[j];
        Eigen::VectorXd step = h.ldlt().solve(fv);
        if (!step.allFinite()) break;
        Vec trial = detail::heights_of(out);
        for (int j = 0; j < n; ++j) trial[j] -= step(j);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j)
            ok = trial[j] > pole_height_floor && trial[j] < pole_escape_height;
        if (!ok) break;
        out = detail::with_heights(out, trial);
    }
    detail::force_raw(out, detail::heights_of(out), f);
    rep.final_force_norm = detail::max_abs_vec(f);
    rep.converged = rep.final_force_norm < 1e-12;
    return {out, rep};
}

// Unique steady ladder of n pairs on one line; exists while
// eps * (2n - 1) < 1.
inline PoleSet coalescent_steady(int n_pairs, double epsilon, double line = 0.0) {
    if (n_pairs < 1)
        throw ConfigError("coalescent_steady: need at least one pair");
    if (!(epsilon > 0.0) || epsilon * (2.0 * n_pairs - 1.0) >= 1.0)
        throw ConfigError("coalescent_steady: epsilon outside the existence window");
    PoleSet p;
    p.epsilon = epsilon;
    p.pairs.resize(n_pairs);
    for (int j = 0; j < n_pairs; ++j)
        p.pairs[j] = PolePair{line, 0.5 * (j + 1)};
    auto [steady, rep] = flow_to_steady(p);
    if (!rep.converged)
        throw NumericalError("coalescent_steady: flow did not converge");
    return steady;
}

inline std::pair<PoleSet, HessianReport> bicoalescent_steady(
    int n0, int n_pi, double epsilon, const std::vector<double>& init_heights) {
    if (n0 < 1 || n_pi < 1)
        throw ConfigError("bicoalescent_steady: need pairs on both lines");
    if (static_cast<int>(init_heights.size()) != n0 + n_pi)
        throw ConfigError("bicoalescent_steady: wrong number of initial heights");
    PoleSet p;
    p.epsilon = epsilon;
    p.pairs.reserve(n0 + n_pi);
    for (int j = 0; j < n0 + n_pi; ++j)
        p.pairs.push_back(PolePair{j < n0 ? 0.0 : pi, init_heights[j]});
    auto [steady, rep] = flow_to_steady(p);
    if (!rep.converged)
        throw NumericalError("bicoalescent_steady: flow did not converge");
    return {steady, hessian_classify(steady)};
}

namespace detail {

inline double pole_eval(const PoleSet& p, double x) {
    double v = 0.0;
    for (const auto& pair : p.pairs)
        v += 2.0 * std::sin(x - pair.line) /
             (std::cosh(pair.height) - std::cos(x - pair.line));
    return -p.epsilon * v;
}

} // namespace detail

inline SpectralField profile_from_poles(const PoleSet& p, const GridSpec& grid) {
    p.validate();
    std::vector<double> vals(grid.points());
    for (int i = 0; i < grid.points(); ++i)
        vals[i] = detail::pole_eval(p, grid.x(i));
    return SpectralField::from_values(grid, Parity::Odd, vals);
}

inline double ms_residual(const SpectralField& v, double epsilon) {
    SpectralField res = (epsilon * derivative(v, 2)) -
                        multiply(v, derivative(v)) + dl_operator(v);
    const auto& vals = res.values();
    double m = 0.0;
    for (size_t i = 1; i + 1 < vals.size(); ++i)
        m = std::max(m, std::abs(vals[i]));
    return m;
}

// A steady set at k*eps squeezed into the channel: v(x) = v_base(kx) solves
// the equation at eps, with k - 1 extra interior zeros.
struct ScaledSolution {
    int k = 1;
    PoleSet base; // steady at k * epsilon()
    double epsilon() const { return base.epsilon / k; }
};

inline ScaledSolution rescale_solution(const PoleSet& base, int k) {
    if (k < 1) throw ConfigError("rescale_solution: k must be >= 1");
    if (detail::max_abs_vec(force_F(base)) > 1e-8)
        throw ConfigError("rescale_solution: base configuration is not steady");
    return ScaledSolution{k, base};
}

inline SpectralField scaled_profile(const ScaledSolution& s,
                                    const GridSpec& grid) {
    std::vector<double> vals(grid.points());
    for (int i = 0; i < grid.points(); ++i)
        vals[i] = detail::pole_eval(s.base, s.k * grid.x(i));
    return SpectralField::from_values(grid, Parity::Odd, vals);
}

struct CatalogEntry {
    int j = 1;    // pairs in the base configuration
    int k = 1;    // rescaling factor
    int sign = 1; // +: base line 0; -: base line pi
    int n_poles = 1;
    std::vector<double> heights;
    double delta_phi = 0.0;
    double velocity = 0.0;
    double residual = 0.0;
    std::string classification;
};

// All steady profiles reachable through coalescent ladders and rescaling;
// counts follow the window rule (2m - 1) k eps < 1.
inline std::vector<CatalogEntry> enumerate_family(double epsilon,
                                                  const GridSpec& grid = GridSpec{1024}) {
    if (!(epsilon > 0.05) || !(epsilon < 1.0))
        throw ConfigError("enumerate_family: epsilon must lie in (0.05, 1)");
    struct Task {
        int j, k;
    };
    std::vector<Task> tasks;
    for (int k = 1; k * epsilon < 1.0; ++k)
        for (int j = 1; (2 * j - 1) * k * epsilon < 1.0; ++j)
            tasks.push_back({j, k});

    auto build = [&](const Task& t) {
        PoleSet base = coalescent_steady(t.j, t.k * epsilon, 0.0);
        SpectralField v = scaled_profile(ScaledSolution{t.k, base}, grid);
        SpectralField theta = antiderivative(v).field;
        const auto& tv = theta.values();
        auto [lo, hi] = std::minmax_element(tv.begin(), tv.end());

        CatalogEntry plus;
        plus.j = t.j;
        plus.k = t.k;
        plus.sign = +1;
        plus.n_poles = t.j * t.k;
        plus.heights = detail::heights_of(base);
        plus.delta_phi = *hi - *lo;
        double sum_sq = 0.0;
        for (double b : v.coeffs()) sum_sq += b * b;
        plus.velocity = -0.25 * sum_sq;
        plus.residual = ms_residual(v, epsilon);
        plus.classification =
            hessian_class_name(hessian_classify(base).classification);

        CatalogEntry minus = plus;
        minus.sign = -1;
        return std::vector<CatalogEntry>{plus, minus};
    };
    auto chunks = parallel_map(tasks, build);
    std::vector<CatalogEntry> out;
    for (auto& c : chunks)
        for (auto& e : c) out.push_back(std::move(e));
    return out;
}

} // namespace flamelab
