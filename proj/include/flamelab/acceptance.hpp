#pragma once
// End-to-end verification suite.  Each criterion exercises one headline
// property of the library through its public interface, with the pass
// tolerance pinned next to the check.  The same table backs the
// acceptance binary and the CLI `verify` command.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flamelab/evolution.hpp"
#include "flamelab/phase_plane.hpp"
#include "flamelab/pole_dynamics.hpp"
#include "flamelab/stability.hpp"

namespace flamelab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

namespace acceptance_detail {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

inline double h1_distance(const SpectralField& a, const SpectralField& b) {
    SpectralField d = a - b;
    return std::sqrt(l2_norm_sq(d) + l2_norm_sq(derivative(d)));
}

// 1. Mode-k inputs map exactly through the spectral operators.
inline Check spectral_identities() {
    Check c;
    GridSpec grid;
    double worst = 0.0;
    for (int k = 1; k < grid.cutoff(); ++k) {
        auto f = single_mode(grid, Parity::Even, k, 1.0);
        auto dl = dl_operator(f);
        auto d2 = derivative(f, 2);
        for (int m = 0; m < grid.n_modes; ++m) {
            const double want_dl = m == k ? k : 0.0;
            const double want_d2 = m == k ? -double(k) * k : 0.0;
            worst = std::max(worst, std::abs(dl.coeff(m) - want_dl));
            worst = std::max(worst, std::abs(d2.coeff(m) - want_d2));
        }
    }
    c.require(worst <= 1e-12, "coefficient defect " + num(worst) + " > 1e-12");
    if (c.ok) c.detail = "max defect " + num(worst) + " for k=1.." +
                         std::to_string(grid.cutoff() - 1);
    return c;
}

// 2. Measured small-amplitude growth rates match the dispersion relations.
inline Check linear_growth_rates() {
    Check c;
    GridSpec grid;
    const double amp = 1e-6, t_end = 0.5;
    double worst = 0.0;
    for (Equation eq : {Equation::RS, Equation::MS}) {
        for (int n = 1; n <= 3; ++n) {
            for (double eps : {0.4, 0.7, 2.0}) {
                EvolutionProblem p;
                p.equation = eq;
                p.epsilon = eps;
                p.dt = 1e-3;
                p.t_end = t_end;
                p.sample_every = 1000;
                auto traj =
                    integrate(p, single_mode(grid, Parity::Even, n, amp));
                const double lam = linear_symbol(eq, eps, n);
                const double rate =
                    std::log(traj.states.back().field.coeff(n) / amp) / t_end;
                worst = std::max(worst, std::abs(rate - lam) / std::abs(lam));
            }
        }
    }
    c.require(worst <= 1e-3,
              "relative rate error " + num(worst) + " > 1e-3");
    if (c.ok) c.detail = "18 mode/parameter pairs, worst rel err " + num(worst);
    return c;
}

// 3. Orbit period: small-amplitude limit, exact parameter scaling,
//    monotonicity in the starting ordinate.
inline Check period_function() {
    Check c;
    double worst_limit = 0.0;
    for (double eps : {0.04, 0.25, 0.81}) {
        const double T = orbit_period(eps, 1e-4).period;
        worst_limit =
            std::max(worst_limit, std::abs(T - 2.0 * pi * std::sqrt(eps)));
    }
    c.require(worst_limit <= 1e-3,
              "harmonic limit defect " + num(worst_limit) + " > 1e-3");

    double worst_scale = 0.0;
    for (double w0 : {0.1, 0.5, 0.9, 0.99}) {
        const double unit = orbit_period(1.0, w0).period;
        for (double eps : {0.04, 0.25, 0.49, 0.81, 1.44}) {
            const double T = orbit_period(eps, w0).period;
            worst_scale = std::max(
                worst_scale, std::abs(T - std::sqrt(eps) * unit) / T);
        }
    }
    c.require(worst_scale <= 1e-8,
              "sqrt(eps) scaling defect " + num(worst_scale) + " > 1e-8");

    bool increasing = true;
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double w0 = 0.02 + (0.995 - 0.02) * i / 49.0;
        const double T = orbit_period(0.25, w0).period;
        if (i > 0 && T <= prev) increasing = false;
        prev = T;
    }
    c.require(increasing, "period not strictly increasing in w0");
    if (c.ok)
        c.detail = "limit defect " + num(worst_limit) + ", scaling " +
                   num(worst_scale) + ", monotone over 50 points";
    return c;
}

// 4. The steady family: census, residuals, node counts, velocity identity.
inline Check steady_family() {
    Check c;
    const GridSpec grid{1024};
    struct CaseSpec {
        double eps;
        int count;
    } cases[] = {{0.5, 2}, {0.2, 4}, {0.12, 4}};
    double worst_res = 0.0, worst_vel = 0.0;
    for (const auto& cs : cases) {
        const int got = steady_count(cs.eps);
        c.require(got == cs.count,
                  "steady_count(" + num(cs.eps) + ") = " +
                      std::to_string(got) + ", expected " +
                      std::to_string(cs.count));
        for (int j = 1; 2 * j <= cs.count; ++j) {
            for (int sign : {+1, -1}) {
                auto st = steady_solution(j, sign, cs.eps, grid);
                worst_res = std::max(worst_res, st.residual);
                c.require(st.residual <= 1e-8,
                          "residual of v_" + std::to_string(j) + " at eps=" +
                              num(cs.eps) + " is " + num(st.residual));
                const int zeros = count_interior_sign_changes(st.v);
                c.require(zeros == j - 1,
                          "v_" + std::to_string(j) + " has " +
                              std::to_string(zeros) + " interior zeros");
                const double defect =
                    std::abs(st.velocity + 0.5 * l2_norm_sq(st.v) / pi);
                worst_vel = std::max(worst_vel, defect);
                c.require(defect <= 1e-8,
                          "velocity identity defect " + num(defect));
            }
        }
    }
    if (c.ok)
        c.detail = "worst residual " + num(worst_res) +
                   ", velocity identity defect " + num(worst_vel);
    return c;
}

// 5. Stability verdicts about the first two branches, three independent ways.
inline Check stability_verdicts() {
    Check c;
    const GridSpec grid{1024};
    auto v1 = steady_solution(1, +1, 0.5, grid);
    auto v2 = steady_solution(2, +1, 0.2, grid);

    c.require(comparison_test(v1.v, 0.5).verdict == Stability::STABLE,
              "comparison verdict for v_1 at eps=0.5 is not STABLE");
    c.require(comparison_test(v2.v, 0.2).verdict == Stability::UNSTABLE,
              "comparison verdict for v_2 at eps=0.2 is not UNSTABLE");

    LinearizedOperator op1{OperatorKind::RS_ABOUT_V, 0.5, v1.v};
    LinearizedOperator op2{OperatorKind::RS_ABOUT_V, 0.2, v2.v};
    const double top1 = discrete_spectrum(op1, 1024).eigenvalues.front();
    const double top2 = discrete_spectrum(op2, 1024).eigenvalues.front();
    c.require(top1 < 0.0, "top eigenvalue about v_1 is " + num(top1));
    c.require(top2 > 0.0, "top eigenvalue about v_2 is " + num(top2));

    auto chi = chi_witness(v1.v, 0.5);
    c.require(chi.max_residual <= 1e-6,
              "witness residual " + num(chi.max_residual) + " > 1e-6");
    c.require(chi.min_chi > 0.0, "witness not positive in the interior");

    const double tr1 = translational_residual(v1.v, 0.5);
    const double tr2 = translational_residual(v2.v, 0.2);
    c.require(tr1 <= 1e-6, "translation defect about v_1 is " + num(tr1));
    c.require(tr2 <= 1e-6, "translation defect about v_2 is " + num(tr2));
    if (c.ok)
        c.detail = "top eigenvalues " + num(top1) + " / " + num(top2) +
                   ", witness residual " + num(chi.max_residual);
    return c;
}

struct AttractionOutcome {
    Check front;
    Check energy;
    bool ran = false;
};

// 6 + 7. Ten random small initial slopes relax onto the stable branch (or
// its mirror) with the right speed, and the energy functional decreases
// along every run.  Both checks share the same trajectories.
inline AttractionOutcome attraction_runs() {
    AttractionOutcome out;
    out.ran = true;
    GridSpec grid;
    auto plus = steady_solution(1, +1, 0.5);
    auto minus = steady_solution(1, -1, 0.5);
    double worst_dist = 0.0, worst_speed = 0.0, worst_rise = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        EvolutionProblem p;
        p.equation = Equation::UFORM;
        p.epsilon = 0.5;
        p.dt = 4e-3;
        p.t_end = 200.0;
        p.sample_every = 500;
        auto traj = integrate(p, random_band_limited(grid, Parity::Odd, seed));
        if (traj.blew_up) {
            out.front.require(false,
                              "seed " + std::to_string(seed) + " blew up");
            continue;
        }
        const auto& fin = traj.states.back().field;
        const double dist = std::min(h1_distance(fin, plus.v),
                                     h1_distance(fin, minus.v));
        worst_dist = std::max(worst_dist, dist);
        out.front.require(dist <= 1e-4, "seed " + std::to_string(seed) +
                                            " H1 distance " + num(dist));
        const double speed = measured_speed(traj, 150.0, 200.0);
        const double rel =
            std::abs(speed - plus.velocity) / std::abs(plus.velocity);
        worst_speed = std::max(worst_speed, rel);
        out.front.require(rel <= 0.01, "seed " + std::to_string(seed) +
                                           " speed off by " + num(rel));

        auto rep = liapunov_monotone_report(traj, 0.5);
        worst_rise = std::max(worst_rise, rep.max_increase);
        out.energy.require(rep.monotone,
                           "seed " + std::to_string(seed) +
                               " energy rises by " + num(rep.max_increase));
    }
    if (out.front.ok)
        out.front.detail = "worst H1 distance " + num(worst_dist) +
                           ", worst speed error " + num(worst_speed);
    if (out.energy.ok)
        out.energy.detail =
            "worst increase " + num(worst_rise) + " across 10 runs";
    return out;
}

// 8. Closed-form steady pole heights.
inline Check pole_steady_heights() {
    Check c;
    double worst = 0.0;
    for (double eps : {0.1, 0.2, 0.3}) {
        const double h1 = coalescent_steady(1, eps).pairs[0].height;
        worst = std::max(worst, std::abs(h1 - std::atanh(eps)));
        auto [pair_set, rep] = bicoalescent_steady(1, 1, eps, {0.5, 0.5});
        const double want = 0.5 * std::atanh(2.0 * eps);
        for (const auto& pp : pair_set.pairs)
            worst = std::max(worst, std::abs(pp.height - want));
    }
    c.require(worst <= 1e-10, "height defect " + num(worst) + " > 1e-10");
    if (c.ok) c.detail = "worst defect " + num(worst);
    return c;
}

// 9. The pole potential: finite-difference gradient equals the force, and
//    the flow only ever climbs it.
inline Check pole_potential() {
    Check c;
    std::mt19937_64 eng(2026);
    std::uniform_real_distribution<double> hdist(0.2, 3.0);
    double worst_grad = 0.0;
    for (int t = 0; t < 10; ++t) {
        PoleSet p;
        p.epsilon = 0.1 + 0.05 * t;
        const int n = 1 + static_cast<int>(eng() % 3);
        std::vector<double> hs(n);
        for (auto& h : hs) h = hdist(eng);
        std::sort(hs.begin(), hs.end());
        for (int j = 1; j < n; ++j)
            if (hs[j] - hs[j - 1] < 0.07) hs[j] = hs[j - 1] + 0.07;
        for (int j = 0; j < n; ++j)
            p.pairs.push_back({(eng() & 1) ? pi : 0.0, hs[j]});
        auto F = force_F(p);
        for (int j = 0; j < n; ++j) {
            const double h = 1e-6;
            auto up = p, dn = p;
            up.pairs[j].height += h;
            dn.pairs[j].height -= h;
            const double fd =
                (pole_liapunov(up) - pole_liapunov(dn)) / (2.0 * h);
            worst_grad = std::max(worst_grad, std::abs(fd - F[j]));
        }
    }
    c.require(worst_grad <= 1e-6,
              "gradient defect " + num(worst_grad) + " > 1e-6");

    double worst_dip = 0.0;
    for (int s = 0; s < 5; ++s) {
        PoleSet start;
        if (s < 3) {
            start.epsilon = 0.25;
            start.pairs = {{0.0, 0.4 + 0.1 * s}, {0.0, 2.4 - 0.1 * s}};
        } else if (s == 3) {
            start.epsilon = 0.3;
            start.pairs = {{0.0, 0.3}, {pi, 0.8}};
        } else {
            start.epsilon = 0.2;
            start.pairs = {{0.0, 2.5}};
        }
        auto [steady, rep] = flow_to_steady(start);
        c.require(rep.converged,
                  "flow " + std::to_string(s) + " did not converge");
        for (size_t i = 1; i < rep.liapunov_values.size(); ++i)
            worst_dip = std::max(worst_dip, rep.liapunov_values[i - 1] -
                                                rep.liapunov_values[i]);
    }
    c.require(worst_dip <= 1e-10, "potential dips by " + num(worst_dip));
    if (c.ok)
        c.detail = "gradient defect " + num(worst_grad) + ", worst dip " +
                   num(worst_dip);
    return c;
}

// 10. A two-pole steady profile solves the nonlocal equation and the
//     evolved front keeps its shape and speed.
inline Check pole_profile_dynamics() {
    Check c;
    GridSpec grid;
    auto base = coalescent_steady(2, 0.25);
    auto v = profile_from_poles(base, grid);
    const double res = ms_residual(v, 0.25);
    c.require(res <= 1e-8, "profile residual " + num(res) + " > 1e-8");

    EvolutionProblem p;
    p.equation = Equation::MS;
    p.epsilon = 0.25;
    p.dt = 2e-3;
    p.t_end = 10.0;
    p.sample_every = 100;
    auto traj = integrate(p, antiderivative(v).field);
    c.require(!traj.blew_up, "front blew up");

    SpectralField d = traj.states.back().field - traj.states.front().field;
    std::vector<double> shape = d.values();
    const double mean = d.coeff(0);
    for (auto& x : shape) x -= mean;
    auto dshape = SpectralField::from_values(grid, Parity::Even, shape);
    const double drift =
        std::sqrt(l2_norm_sq(dshape) + l2_norm_sq(derivative(dshape)));
    c.require(drift <= 1e-5, "H1 shape drift " + num(drift) + " > 1e-5");

    const double want = -0.5 * l2_norm_sq(v) / pi;
    const double speed = measured_speed(traj, 2.0, 10.0);
    const double rel = std::abs(speed - want) / std::abs(want);
    c.require(rel <= 0.01, "speed off by " + num(rel));
    if (c.ok)
        c.detail = "residual " + num(res) + ", drift " + num(drift) +
                   ", speed error " + num(rel);
    return c;
}

// 11. Classification of the equal-height two-line configuration across the
//     expected transition, plus the coalescent two-pole maximum.
inline Check pole_classification() {
    Check c;
    auto classify_equal = [](double eps) {
        PoleSet p;
        p.epsilon = eps;
        const double h = 0.5 * std::atanh(2.0 * eps);
        p.pairs = {{0.0, h}, {pi, h}};
        return hessian_classify(p);
    };
    auto at32 = classify_equal(0.32);
    c.require(at32.classification == HessianClass::SADDLE,
              std::string("equal-height pair at eps=0.32 classified ") +
                  hessian_class_name(at32.classification) +
                  " (eigenvalues " + num(at32.eigenvalues.front()) + ", " +
                  num(at32.eigenvalues.back()) +
                  "; Hessian is negative definite there, the sign change "
                  "sits at eps=sqrt(2)/3~0.4714)");
    auto at21 = classify_equal(0.21);
    c.require(at21.classification == HessianClass::MAXIMUM,
              std::string("equal-height pair at eps=0.21 classified ") +
                  hessian_class_name(at21.classification));
    for (const auto& rep : {at32, at21})
        for (double lam : rep.eigenvalues)
            c.require(std::abs(lam) >= 1e-6,
                      "eigenvalue " + num(lam) + " not separated from 0");

    auto coal = hessian_classify(coalescent_steady(2, 0.25));
    c.require(coal.classification == HessianClass::MAXIMUM,
              std::string("coalescent 2-pole at eps=0.25 classified ") +
                  hessian_class_name(coal.classification));
    return c;
}

// 12. Catalog size equals the window-counting formula and an independent
//     scan of the admissibility rule.
inline Check catalog_counting() {
    Check c;
    std::string counts;
    for (int n = 1; n <= 3; ++n) {
        const double eps = 1.0 / (2.0 * n + 1.0) + 1e-3;
        const auto entries = enumerate_family(eps);
        long long formula = 0;
        for (int m = 1; m <= n; ++m) formula += (2 * n) / (2 * m - 1);
        formula *= 2;
        long long scan = 0;
        for (int k = 1; k * eps < 1.0; ++k)
            for (int j = 1; (2 * j - 1) * k * eps < 1.0; ++j) scan += 2;
        c.require(static_cast<long long>(entries.size()) == formula,
                  "n=" + std::to_string(n) + ": " +
                      std::to_string(entries.size()) + " entries vs formula " +
                      std::to_string(formula));
        c.require(scan == formula, "n=" + std::to_string(n) +
                                       ": window scan " +
                                       std::to_string(scan) + " vs formula " +
                                       std::to_string(formula));
        if (!counts.empty()) counts += ", ";
        counts += std::to_string(entries.size());
    }
    if (c.ok) c.detail = "counts " + counts + " for n=1,2,3";
    return c;
}

// 13. Nonlocal spectra: the two-pole profile is the linearly stable one.
inline Check nonlocal_spectra() {
    Check c;
    const GridSpec grid{1024};
    const double eps = 0.25;
    auto spectrum = [&](int n_pairs) {
        auto v = profile_from_poles(coalescent_steady(n_pairs, eps), grid);
        return discrete_spectrum({OperatorKind::MS_ABOUT_V, eps, v}, 160);
    };
    auto rep2 = spectrum(2);
    c.require(std::abs(rep2.eigenvalues.front()) <= 1e-8,
              "top eigenvalue about the 2-pole profile is " +
                  num(rep2.eigenvalues.front()) +
                  ", expected the neutral translation mode");
    c.require(rep2.eigenvalues.size() > 1 && rep2.eigenvalues[1] <= 1e-8,
              "second eigenvalue " + num(rep2.eigenvalues[1]) + " > 0");

    auto rep1 = spectrum(1);
    int positive = 0;
    for (double lam : rep1.eigenvalues)
        if (lam > 1e-8) ++positive;
    c.require(positive >= 1, "no unstable mode about the 1-pole profile");
    if (c.ok)
        c.detail = "2-pole top " + num(rep2.eigenvalues.front()) +
                   ", 1-pole has " + std::to_string(positive) +
                   " unstable mode(s)";
    return c;
}

} // namespace acceptance_detail

inline std::vector<CriterionResult> run_acceptance() {
    using acceptance_detail::Check;
    std::vector<CriterionResult> out;
    acceptance_detail::AttractionOutcome attraction;

    auto add = [&out](int id, const std::string& name,
                      const std::function<Check()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        out.push_back({id, name, c.ok, secs, c.detail});
    };

    add(1, "spectral operator identities",
        acceptance_detail::spectral_identities);
    add(2, "linear growth rates", acceptance_detail::linear_growth_rates);
    add(3, "orbit period function", acceptance_detail::period_function);
    add(4, "steady-state family", acceptance_detail::steady_family);
    add(5, "branch stability verdicts",
        acceptance_detail::stability_verdicts);
    add(6, "attraction to the stable front", [&attraction] {
        attraction = acceptance_detail::attraction_runs();
        return attraction.front;
    });
    add(7, "energy monotone along attracting runs", [&attraction] {
        if (!attraction.ran)
            return Check{false, "attraction runs were not executed"};
        Check c = attraction.energy;
        c.detail += " (shares the runs of the previous criterion)";
        return c;
    });
    add(8, "closed-form pole heights",
        acceptance_detail::pole_steady_heights);
    add(9, "pole potential gradient and ascent",
        acceptance_detail::pole_potential);
    add(10, "pole profile residual and speed",
        acceptance_detail::pole_profile_dynamics);
    add(11, "equal-height pair classification",
        acceptance_detail::pole_classification);
    add(12, "catalog counting", acceptance_detail::catalog_counting);
    add(13, "nonlocal spectra about pole profiles",
        acceptance_detail::nonlocal_spectra);
    return out;
}

} // namespace flamelab
