#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "flamelab/spectral_field.hpp"

namespace flamelab {

// RS:    phi_t = eps phi_xx - (phi_x)^2/2 + (phi - mean phi)   cosine modes
// MS:    phi_t = eps phi_xx - (phi_x)^2/2 + |D| phi             cosine modes
// UFORM: u_t   = eps u_xx   - u u_x       + u                   sine modes
enum class Equation { RS, MS, UFORM };

inline const char* equation_name(Equation eq) {
    switch (eq) {
        case Equation::RS: return "rs";
        case Equation::MS: return "ms";
        case Equation::UFORM: return "uform";
    }
    return "?";
}

// Per-mode growth rate of the linear part.
inline double linear_symbol(Equation eq, double eps, int k) {
    if (k < 0) throw ConfigError("linear_symbol: negative mode index");
    switch (eq) {
        case Equation::RS:
        case Equation::UFORM:
            return k == 0 ? 0.0 : 1.0 - eps * k * k;
        case Equation::MS:
            return k - eps * static_cast<double>(k) * k;
    }
    return 0.0;
}

struct EvolutionProblem {
    Equation equation = Equation::RS;
    double epsilon = 0.5;
    GridSpec grid{};
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1;

    void validate() const {
        grid.validate();
        if (epsilon <= 0.0) throw ConfigError("evolution: epsilon must be positive");
        if (dt <= 0.0) throw ConfigError("evolution: dt must be positive");
        if (t_end <= 0.0) throw ConfigError("evolution: t_end must be positive");
        if (sample_every < 1) throw ConfigError("evolution: sample_every must be >= 1");
    }
};

struct FrontState {
    double time = 0.0;
    SpectralField field;
};

struct Trajectory {
    EvolutionProblem problem;
    std::vector<FrontState> states;
    bool blew_up = false;
    double blow_up_time = std::numeric_limits<double>::quiet_NaN();
};

// --------------------------------------------------------------------------
// Exponential time differencing (fourth order, Cox-Matthews tableau).  The
// linear part is diagonal in mode space and advanced exactly; only accuracy
// constrains dt.  phi_l are the entire functions phi_l(z) = sum z^m/(m+l)!,
// evaluated by series near 0 to dodge the cancellation in the closed forms.
// --------------------------------------------------------------------------

namespace detail {

inline double phi_series(double z, int l) {
    double fact = 1.0;
    for (int i = 2; i <= l; ++i) fact *= i;
    double term = 1.0 / fact;
    double sum = term;
    for (int m = 1; m <= 26; ++m) {
        term *= z / (m + l);
        sum += term;
    }
    return sum;
}

inline double phi1(double z) {
    return std::abs(z) < 0.9 ? phi_series(z, 1) : std::expm1(z) / z;
}
inline double phi2(double z) {
    return std::abs(z) < 0.9 ? phi_series(z, 2) : (std::expm1(z) - z) / (z * z);
}
inline double phi3(double z) {
    return std::abs(z) < 0.9 ? phi_series(z, 3)
                             : (std::expm1(z) - z - 0.5 * z * z) / (z * z * z);
}

// Coefficient tables for one step size h.
struct EtdTables {
    std::vector<double> e_full, e_half, q, f1, f2, f3;

    EtdTables(Equation eq, double eps, double h, int n_modes) {
        e_full.resize(n_modes);
        e_half.resize(n_modes);
        q.resize(n_modes);
        f1.resize(n_modes);
        f2.resize(n_modes);
        f3.resize(n_modes);
        for (int k = 0; k < n_modes; ++k) {
            const double z = h * linear_symbol(eq, eps, k);
            e_full[k] = std::exp(z);
            e_half[k] = std::exp(0.5 * z);
            q[k] = 0.5 * h * phi1(0.5 * z);
            const double p1 = phi1(z), p2 = phi2(z), p3 = phi3(z);
            f1[k] = h * (p1 - 3.0 * p2 + 4.0 * p3);
            f2[k] = 2.0 * h * (p2 - 2.0 * p3);
            f3[k] = h * (4.0 * p3 - p2);
        }
    }
};

// Nonlinear term in coefficient space, with the field samples of the input
// exposed so the caller can watch for blow-up without extra transforms.
struct NonlinearEval {
    std::vector<double> coeffs;
    double max_sample = 0.0;
    bool finite = true;
};

inline NonlinearEval nonlinear_term(Equation eq, const GridSpec& grid,
                                    const std::vector<double>& modes) {
    NonlinearEval out;
    const int np = grid.points();
    const int nm = grid.n_modes;
    if (eq == Equation::UFORM) {
        // -u u_x with u in sine modes
        std::vector<double> uvals = sine_synthesize(modes, np);
        std::vector<double> dcoef(nm, 0.0);
        for (int k = 1; k < nm; ++k) dcoef[k] = k * modes[k];
        std::vector<double> dvals = cosine_synthesize(dcoef, np);
        std::vector<double> prod(np);
        for (int i = 0; i < np; ++i) {
            prod[i] = -uvals[i] * dvals[i];
            const double a = std::abs(uvals[i]);
            if (a > out.max_sample) out.max_sample = a;
            if (!std::isfinite(uvals[i])) out.finite = false;
        }
        out.coeffs = sine_analyze(prod, nm);
    } else {
        // -(phi_x)^2 / 2 with phi in cosine modes
        std::vector<double> dcoef(nm, 0.0);
        for (int k = 1; k < nm; ++k) dcoef[k] = -k * modes[k];
        std::vector<double> dvals = sine_synthesize(dcoef, np);
        std::vector<double> phivals = cosine_synthesize(modes, np);
        std::vector<double> prod(np);
        for (int i = 0; i < np; ++i) {
            prod[i] = -0.5 * dvals[i] * dvals[i];
            const double a = std::abs(phivals[i]);
            if (a > out.max_sample) out.max_sample = a;
            if (!std::isfinite(phivals[i])) out.finite = false;
        }
        out.coeffs = cosine_analyze(prod, nm);
    }
    for (int k = grid.cutoff(); k < nm; ++k) out.coeffs[k] = 0.0;
    return out;
}

} // namespace detail

inline Trajectory integrate(const EvolutionProblem& problem,
                            const SpectralField& initial) {
    problem.validate();
    if (!(initial.grid() == problem.grid))
        throw ConfigError("integrate: initial data on the wrong grid");
    const Parity want =
        problem.equation == Equation::UFORM ? Parity::Odd : Parity::Even;
    if (initial.parity() != want)
        throw ConfigError("integrate: initial data has the wrong parity for the equation");

    const GridSpec& grid = problem.grid;
    const int nm = grid.n_modes;
    const double h = problem.dt;
    const long n_steps = std::lround(problem.t_end / h);
    const double leftover = problem.t_end - n_steps * h;
    if (n_steps < 1 && std::abs(leftover) < 1e-12)
        throw ConfigError("integrate: t_end shorter than one step");

    detail::EtdTables T(problem.equation, problem.epsilon, h, nm);

    Trajectory traj;
    traj.problem = problem;
    std::vector<double> u = initial.coeffs();
    auto record = [&](double t) {
        traj.states.push_back(
            {t, SpectralField::from_coeffs(grid, want, u)});
    };
    record(0.0);

    auto combine = [nm](const std::vector<double>& ea, const std::vector<double>& x,
                        const std::vector<double>& w, const std::vector<double>& y) {
        std::vector<double> r(nm);
        for (int k = 0; k < nm; ++k) r[k] = ea[k] * x[k] + w[k] * y[k];
        return r;
    };

    auto step = [&](const detail::EtdTables& tb, double t_now) -> bool {
        auto nu = detail::nonlinear_term(problem.equation, grid, u);
        if (!nu.finite || nu.max_sample > 1e8) {
            traj.blew_up = true;
            traj.blow_up_time = t_now;
            return false;
        }
        std::vector<double> a = combine(tb.e_half, u, tb.q, nu.coeffs);
        auto na = detail::nonlinear_term(problem.equation, grid, a);
        std::vector<double> b = combine(tb.e_half, u, tb.q, na.coeffs);
        auto nb = detail::nonlinear_term(problem.equation, grid, b);
        std::vector<double> two_nb_minus_nu(nm);
        for (int k = 0; k < nm; ++k)
            two_nb_minus_nu[k] = 2.0 * nb.coeffs[k] - nu.coeffs[k];
        std::vector<double> c = combine(tb.e_half, a, tb.q, two_nb_minus_nu);
        auto nc = detail::nonlinear_term(problem.equation, grid, c);
        for (int k = 0; k < nm; ++k)
            u[k] = tb.e_full[k] * u[k] + tb.f1[k] * nu.coeffs[k] +
                   tb.f2[k] * (na.coeffs[k] + nb.coeffs[k]) + tb.f3[k] * nc.coeffs[k];
        return true;
    };

    for (long i = 1; i <= n_steps; ++i) {
        if (!step(T, (i - 1) * h)) break;
        if (i % problem.sample_every == 0 && i != n_steps) record(i * h);
        if (i == n_steps) {
            if (std::abs(leftover) > 1e-12 * std::max(1.0, problem.t_end)) {
                detail::EtdTables Tlast(problem.equation, problem.epsilon,
                                        leftover, nm);
                if (!step(Tlast, n_steps * h)) break;
            }
            record(problem.t_end);
        }
    }
    if (traj.blew_up && (traj.states.empty() ||
                         traj.states.back().time < traj.blow_up_time))
        record(traj.blow_up_time);
    return traj;
}

// --------------------------------------------------------------- diagnostics

struct FrontMetrics {
    double mean_position = 0.0;
    double tip_x = 0.0;             // deepest excursion (minimum: fronts sink)
    std::vector<double> cusp_xs;    // local maxima
    double delta_phi = 0.0;
};

inline FrontMetrics front_metrics(const FrontState& state) {
    if (state.field.parity() != Parity::Even)
        throw ConfigError("front_metrics: expects a front (cosine) field");
    const auto& v = state.field.values();
    const GridSpec& g = state.field.grid();
    FrontMetrics m;
    m.mean_position = state.field.coeff(0);
    int imin = 0;
    double lo = v[0], hi = v[0];
    for (int i = 1; i < g.points(); ++i) {
        if (v[i] < lo) { lo = v[i]; imin = i; }
        if (v[i] > hi) hi = v[i];
    }
    m.tip_x = g.x(imin);
    m.delta_phi = hi - lo;
    for (int i = 0; i < g.points(); ++i) {
        const bool left_ok = i == 0 || v[i] >= v[i - 1];
        const bool right_ok = i == g.points() - 1 || v[i] >= v[i + 1];
        const bool strict = (i > 0 && v[i] > v[i - 1]) ||
                            (i < g.points() - 1 && v[i] > v[i + 1]);
        if (left_ok && right_ok && strict) m.cusp_xs.push_back(g.x(i));
    }
    return m;
}

// Least-squares slope of the mean front position over [t0, t1].  For sine
// (u-form) trajectories the mean position is reconstructed from the exact
// drift identity  d(mean phi)/dt = -mean(u^2)/2  by trapezoid accumulation.
inline double measured_speed(const Trajectory& traj, double t0, double t1) {
    std::vector<double> ts, ys;
    if (traj.states.empty()) throw ConfigError("measured_speed: empty trajectory");
    if (traj.states.front().field.parity() == Parity::Even) {
        for (const auto& s : traj.states)
            if (s.time >= t0 && s.time <= t1) {
                ts.push_back(s.time);
                ys.push_back(s.field.coeff(0));
            }
    } else {
        double acc = 0.0, prev_t = traj.states.front().time;
        double prev_d = -0.5 * l2_norm_sq(traj.states.front().field) / pi;
        for (const auto& s : traj.states) {
            const double d = -0.5 * l2_norm_sq(s.field) / pi;
            acc += 0.5 * (d + prev_d) * (s.time - prev_t);
            prev_t = s.time;
            prev_d = d;
            if (s.time >= t0 && s.time <= t1) {
                ts.push_back(s.time);
                ys.push_back(acc);
            }
        }
    }
    const size_t n = ts.size();
    if (n < 2) throw ConfigError("measured_speed: fewer than 2 samples in window");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (size_t i = 0; i < n; ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw ConfigError("measured_speed: degenerate time window");
    return (n * sty - st * sy) / denom;
}

// ----------------------------------------------------------------- Liapunov

struct LiapunovSample {
    double time = 0.0;
    double value = 0.0;
    bool defined = false;
};

// U(u) = integral of -u^2/(2 eps) + (1 - u_x) ln(1 - u_x) + u_x.
// Defined only while max u_x stays below 1 (logarithm domain), with a 1e-6
// safety margin against roundoff.
inline LiapunovSample rs_liapunov(const SpectralField& u, double eps) {
    if (u.parity() != Parity::Odd)
        throw ConfigError("rs_liapunov: expects a slope (sine) field");
    LiapunovSample s;
    SpectralField ux = derivative(u);
    double wmax = 0.0;
    for (double w : ux.values()) wmax = std::max(wmax, w);
    if (wmax >= 1.0 - 1e-6) return s; // defined = false
    const auto& uv = u.values();
    const auto& wv = ux.values();
    std::vector<double> integrand(uv.size());
    for (size_t i = 0; i < uv.size(); ++i) {
        const double p = uv[i], w = wv[i];
        integrand[i] = -p * p / (2.0 * eps) + (1.0 - w) * std::log1p(-w) + w;
    }
    double acc = 0.5 * (integrand.front() + integrand.back());
    for (size_t i = 1; i + 1 < integrand.size(); ++i) acc += integrand[i];
    s.value = acc * u.grid().dx();
    s.defined = true;
    return s;
}

struct LiapunovReport {
    std::vector<LiapunovSample> samples;
    double max_increase = 0.0; // between consecutive defined samples
    bool monotone = false;     // nonincreasing within 1e-10 * scale
};

inline LiapunovReport liapunov_monotone_report(const Trajectory& traj,
                                               double eps) {
    LiapunovReport rep;
    double scale = 0.0;
    bool have_prev = false;
    double prev = 0.0;
    for (const auto& st : traj.states) {
        LiapunovSample s = rs_liapunov(st.field, eps);
        s.time = st.time;
        if (s.defined) {
            scale = std::max(scale, std::abs(s.value));
            if (have_prev)
                rep.max_increase = std::max(rep.max_increase, s.value - prev);
            prev = s.value;
            have_prev = true;
        }
        rep.samples.push_back(s);
    }
    rep.monotone = rep.max_increase <= 1e-10 * std::max(scale, 1.0);
    return rep;
}

// ---------------------------------------------------------- initial data

// Band-limited noise with a platform-independent bit stream (mt19937_64 is
// specified exactly; the 53-bit mapping avoids distribution differences).
inline SpectralField random_band_limited(const GridSpec& grid, Parity parity,
                                         std::uint64_t seed, int k_lo = 1,
                                         int k_hi = 10, double amplitude = 1e-2) {
    std::mt19937_64 eng(seed);
    auto unit = [&eng]() {
        return static_cast<double>(eng() >> 11) * 0x1.0p-53; // [0, 1)
    };
    std::vector<double> c(grid.n_modes, 0.0);
    for (int k = k_lo; k <= k_hi && k < grid.n_modes; ++k)
        c[k] = amplitude * (2.0 * unit() - 1.0);
    return SpectralField::from_coeffs(grid, parity, std::move(c));
}

inline SpectralField single_mode(const GridSpec& grid, Parity parity, int k,
                                 double amplitude) {
    if (k < 1 || k >= grid.n_modes)
        throw ConfigError("single_mode: mode index out of range");
    std::vector<double> c(grid.n_modes, 0.0);
    c[k] = amplitude;
    return SpectralField::from_coeffs(grid, parity, std::move(c));
}

} // namespace flamelab
