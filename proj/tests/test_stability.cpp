#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "flamelab/phase_plane.hpp"
#include "flamelab/stability.hpp"

#include "support/oracles.hpp"

using namespace flamelab;

namespace {

constexpr double kW0_1_05 = 0.9975347662205668;   // j=1 branch at eps=0.5

// Shooting eigenvalue: lambda such that the solution of
// (L[v] - lambda) phi = 0, phi(0) = 0, phi'(0) = 1 vanishes at pi.
// Independent of the finite-difference route.
double shoot_top_eigenvalue(const SpectralField& v, double eps, double lo,
                            double hi) {
    const SpectralField vp = derivative(v);
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    auto phi_end = [&](double lambda) {
        auto rhs = [&](const State& s, State& d, double x) {
            d[0] = s[1];
            d[1] = (v.eval(x) * s[1] - (1.0 - vp.eval(x) - lambda) * s[0]) /
                   eps;
        };
        State s{0.0, 1.0};
        ode::integrate_adaptive(
            ode::make_controlled(1e-11, 1e-11, ode::runge_kutta_dopri5<State>()),
            rhs, s, 0.0, pi, 1e-4);
        return s[0];
    };
    double flo = phi_end(lo), fhi = phi_end(hi);
    REQUIRE(flo * fhi < 0.0);
    for (int it = 0; it < 80 && hi - lo > 1e-11; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi_end(mid);
        if (fm == 0.0) return mid;
        if (fm * flo < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("closed-form spectra of the flat front", "[stability]") {
    auto rs = trivial_spectrum(Equation::RS, 2.0, 3);
    REQUIRE(rs.eigenvalues.size() == 3);
    CHECK(rs.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-14));
    CHECK(rs.eigenvalues[1] == Catch::Approx(-7.0).margin(1e-14));
    CHECK(rs.eigenvalues[2] == Catch::Approx(-17.0).margin(1e-14));

    auto ms = trivial_spectrum(Equation::MS, 0.4, 3);
    REQUIRE(ms.eigenvalues.size() == 3);
    CHECK(ms.eigenvalues[0] == Catch::Approx(0.6).margin(1e-14));
    CHECK(ms.eigenvalues[1] == Catch::Approx(0.4).margin(1e-14));
    CHECK(ms.eigenvalues[2] == Catch::Approx(-0.6).margin(1e-14));

    auto marginal = trivial_spectrum(Equation::RS, 1.0, 1);
    REQUIRE(marginal.eigenvalues.size() == 1);
    CHECK(marginal.eigenvalues[0] == Catch::Approx(0.0).margin(1e-14));

    CHECK_THROWS_AS(trivial_spectrum(Equation::RS, 1.0, 0), ConfigError);
}

TEST_CASE("comparison solution about the flat front matches the sine closed form",
          "[stability]") {
    GridSpec grid;
    auto zero = SpectralField::zero(grid, Parity::Odd);

    // eps = 2: phi = sqrt(2) sin(x / sqrt(2)), no zero before pi
    auto stable = comparison_test(zero, 2.0);
    CHECK(stable.verdict == Stability::STABLE);
    CHECK_FALSE(stable.first_zero.has_value());
    REQUIRE(static_cast<int>(stable.phi.size()) == grid.points());
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < grid.points(); i += 16)
        CHECK(stable.phi[i] ==
              Catch::Approx(r2 * std::sin(grid.x(i) / r2)).margin(1e-9));

    // eps = 0.5: first zero at pi sqrt(0.5), inside the channel
    auto unstable = comparison_test(zero, 0.5);
    CHECK(unstable.verdict == Stability::UNSTABLE);
    REQUIRE(unstable.first_zero.has_value());
    CHECK(*unstable.first_zero ==
          Catch::Approx(pi * std::sqrt(0.5)).margin(1e-8));
}

TEST_CASE("comparison verdicts for the first two branches", "[stability]") {
    auto one = steady_solution(1, +1, 0.5);
    auto cv1 = comparison_test(one.v, 0.5);
    CHECK(cv1.verdict == Stability::STABLE);
    CHECK_FALSE(cv1.first_zero.has_value());
    CHECK(cv1.phi[0] == 0.0);

    auto two = steady_solution(2, +1, 0.2);
    auto cv2 = comparison_test(two.v, 0.2);
    CHECK(cv2.verdict == Stability::UNSTABLE);
    REQUIRE(cv2.first_zero.has_value());
    // under x -> 2x the j = 2 operator at eps maps to the j = 1 operator at
    // 4 eps, whose comparison solution is positive on the first half period,
    // so the zero must sit in the second half of the channel
    CHECK(*cv2.first_zero > pi / 2);
    CHECK(*cv2.first_zero < pi);

    // mirror branch has the same spectrum by the x -> pi - x reflection
    auto minus = steady_solution(1, -1, 0.5);
    CHECK(comparison_test(minus.v, 0.5).verdict == Stability::STABLE);
}

TEST_CASE("comparison test rejects bad input", "[stability]") {
    GridSpec grid;
    auto zero = SpectralField::zero(grid, Parity::Odd);
    CHECK_THROWS_AS(comparison_test(zero, 0.0), ConfigError);
    CHECK_THROWS_AS(comparison_test(SpectralField::zero(grid, Parity::Even), 1.0),
                    ConfigError);
    std::vector<double> c(grid.n_modes, 0.0);
    c[1] = 1.0; // sin x is not a steady slope at eps = 0.5
    CHECK_THROWS_AS(comparison_test(SpectralField::from_coeffs(grid, Parity::Odd, c), 0.5),
                    ConfigError);
}

TEST_CASE("positivity witness for the stable branch", "[stability]") {
    auto one = steady_solution(1, +1, 0.5);
    auto rep = chi_witness(one.v, 0.5);

    CHECK(rep.max_residual < 1e-6);
    CHECK(rep.min_chi > 0.0);
    // normalization chi'(0) = 1
    CHECK(derivative(rep.chi).eval(0.0) == Catch::Approx(1.0).margin(1e-9));
    // c = 1 / (w0 (3 - w0)) follows from chi = c v (3 - v')
    CHECK(rep.c ==
          Catch::Approx(1.0 / (kW0_1_05 * (3.0 - kW0_1_05))).epsilon(1e-8));

    auto deep = steady_solution(1, +1, 0.3, GridSpec{1024});
    auto rep3 = chi_witness(deep.v, 0.3);
    CHECK(rep3.max_residual < 1e-6);
    CHECK(rep3.min_chi > 0.0);

    // the mirrored branch is negative inside the channel
    auto minus = steady_solution(1, -1, 0.5);
    CHECK_THROWS_AS(chi_witness(minus.v, 0.5), ConfigError);
}

TEST_CASE("comparison solution dominates the witness", "[stability]") {
    auto one = steady_solution(1, +1, 0.5);
    auto cv = comparison_test(one.v, 0.5);
    auto rep = chi_witness(one.v, 0.5);
    const GridSpec& grid = one.v.grid();
    for (int i = 0; i < grid.points(); ++i) {
        if (grid.x(i) > pi - 0.05) break;
        CHECK(cv.phi[i] >= rep.chi.values()[i] - 1e-8);
    }
}

TEST_CASE("translation generator is annihilated by the linearization",
          "[stability]") {
    GridSpec grid;
    CHECK(translational_residual(SpectralField::zero(grid, Parity::Odd), 0.7) ==
          0.0);

    auto one = steady_solution(1, +1, 0.5);
    CHECK(translational_residual(one.v, 0.5) < 1e-6);

    auto two = steady_solution(2, +1, 0.2);
    CHECK(translational_residual(two.v, 0.2) < 1e-6);
}

TEST_CASE("finite-difference spectrum about the flat front matches closed form",
          "[stability]") {
    GridSpec grid;
    LinearizedOperator op{OperatorKind::RS_ABOUT_V, 2.0,
                          SpectralField::zero(grid, Parity::Odd)};
    auto rep = discrete_spectrum(op, 512);
    REQUIRE(rep.n_grid == 512);
    CHECK(rep.weight_used);
    REQUIRE(rep.eigenvalues.size() == 512);
    for (int n = 1; n <= 3; ++n)
        CHECK(rep.eigenvalues[n - 1] ==
              Catch::Approx(1.0 - 2.0 * n * n).margin(2e-3));
    // second-order convergence: doubling the grid shrinks the defect ~4x
    auto fine = discrete_spectrum(op, 1024);
    CHECK(std::abs(fine.eigenvalues[0] + 1.0) <
          0.4 * std::abs(rep.eigenvalues[0] + 1.0));
}

TEST_CASE("discrete spectrum agrees with an independent shooting eigenvalue",
          "[stability]") {
    auto one = steady_solution(1, +1, 0.5);
    LinearizedOperator op{OperatorKind::RS_ABOUT_V, 0.5, one.v};
    auto rep = discrete_spectrum(op, 1024);
    const double shot = shoot_top_eigenvalue(one.v, 0.5, rep.eigenvalues[0] - 0.3,
                                             rep.eigenvalues[0] + 0.3);
    CHECK(rep.eigenvalues[0] == Catch::Approx(shot).margin(1e-4));
}

TEST_CASE("discrete spectrum sign agrees with the comparison verdict",
          "[stability]") {
    auto one = steady_solution(1, +1, 0.5);
    LinearizedOperator op1{OperatorKind::RS_ABOUT_V, 0.5, one.v};
    const double c1 = discrete_spectrum(op1, 512).eigenvalues[0];
    const double f1 = discrete_spectrum(op1, 1024).eigenvalues[0];
    const double err1 = std::abs(f1 - c1) / 3.0;
    CHECK(std::abs(f1) > 10.0 * err1);
    CHECK(f1 < 0.0); // STABLE

    auto two = steady_solution(2, +1, 0.2);
    LinearizedOperator op2{OperatorKind::RS_ABOUT_V, 0.2, two.v};
    const double c2 = discrete_spectrum(op2, 512).eigenvalues[0];
    const double f2 = discrete_spectrum(op2, 1024).eigenvalues[0];
    const double err2 = std::abs(f2 - c2) / 3.0;
    CHECK(std::abs(f2) > 10.0 * err2);
    CHECK(f2 > 0.0); // UNSTABLE
}

TEST_CASE("trivial operator kinds reproduce the closed forms", "[stability]") {
    auto rs = discrete_spectrum({OperatorKind::TRIVIAL_RS, 0.7, {}}, 64);
    for (int n = 1; n <= 10; ++n)
        CHECK(rs.eigenvalues[n - 1] ==
              Catch::Approx(1.0 - 0.7 * n * n).margin(1e-6));

    auto ms = discrete_spectrum({OperatorKind::TRIVIAL_MS, 0.4, {}}, 64);
    std::vector<double> expect;
    for (int n = 1; n <= 64; ++n) expect.push_back(n - 0.4 * n * n);
    std::sort(expect.rbegin(), expect.rend());
    for (int i = 0; i < 10; ++i)
        CHECK(ms.eigenvalues[i] == Catch::Approx(expect[i]).margin(1e-6));
}

TEST_CASE("nonlocal spectrum about a zero profile is the trivial one",
          "[stability]") {
    GridSpec grid;
    LinearizedOperator op{OperatorKind::MS_ABOUT_V, 0.4,
                          SpectralField::zero(grid, Parity::Odd)};
    auto rep = discrete_spectrum(op, 128);
    CHECK_FALSE(rep.weight_used);
    REQUIRE(rep.translational.has_value());
    CHECK(std::abs(*rep.translational) < 1e-12);
    CHECK(rep.eigenvalues[0] == Catch::Approx(0.6).margin(1e-8));
    for (int n = 1; n <= 5; ++n) {
        const double eta = n - 0.4 * n * n;
        double best = 1e300;
        for (double lam : rep.eigenvalues)
            best = std::min(best, std::abs(lam - eta));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("discrete spectrum rejects bad input", "[stability]") {
    GridSpec grid;
    auto zero = SpectralField::zero(grid, Parity::Odd);
    CHECK_THROWS_AS(discrete_spectrum({OperatorKind::TRIVIAL_RS, 0.5, {}}, 32),
                    ConfigError);
    CHECK_THROWS_AS(discrete_spectrum({OperatorKind::RS_ABOUT_V, 0.5, {}}, 128),
                    ConfigError);
    CHECK_THROWS_AS(discrete_spectrum({OperatorKind::MS_ABOUT_V, 0.4, zero}, 200),
                    ConfigError); // beyond the resolved band
    std::vector<double> c(grid.n_modes, 0.0);
    c[1] = 1.0;
    auto notsteady = SpectralField::from_coeffs(grid, Parity::Odd, c);
    CHECK_THROWS_AS(discrete_spectrum({OperatorKind::RS_ABOUT_V, 0.5, notsteady}, 128),
                    ConfigError);
    CHECK_THROWS_AS(discrete_spectrum({OperatorKind::MS_ABOUT_V, 0.4, notsteady}, 128),
                    ConfigError);
}

TEST_CASE("stability column for bifurcation tables", "[stability]") {
    auto hook = comparison_verdict_hook();
    auto one = steady_solution(1, +1, 0.5);
    CHECK(hook(one) == "STABLE");
    auto two = steady_solution(2, +1, 0.2);
    CHECK(hook(two) == "UNSTABLE");

    auto rows = bifurcation_diagram({0.5}, 3, hook);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].verdict == "STABLE");
    CHECK(rows[1].verdict == "STABLE");
}
