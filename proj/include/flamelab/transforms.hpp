#pragma once

// Thin wrapper over FFTW's real even/odd transforms (REDFT00 / RODFT00).
//
// Conventions used throughout:
//   cosine series  f(x) = a_0 + sum_{k>=1} a_k cos(kx)      on x in [0, pi]
//   sine series    f(x) =       sum_{k>=1} b_k sin(kx)
//
// With N collocation points x_j = j*pi/(N-1) the DCT-I of the samples gives
//   a_0 = F_0 / (2(N-1)),   a_k = F_k / (N-1)
// and the DST-I of the N-2 interior samples gives
//   b_k = F_{k-1} / (N-1).
// Synthesis runs the same transforms on half-scaled coefficients (see below);
// REDFT00/RODFT00 are their own inverses up to the factor 2(N-1).

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "flamelab/errors.hpp"

namespace flamelab::detail {

// FFTW planning is not thread-safe, execution on distinct buffers is.  Plans
// are cached per (kind, length) and created on scratch buffers; execution
// always goes through fftw_execute_r2r on caller-owned arrays, so the plans
// are built with FFTW_UNALIGNED to keep them valid for any address.
inline fftw_plan r2r_plan(fftw_r2r_kind kind, int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(static_cast<int>(kind), n);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<double> in(n), out(n);
    fftw_plan p = fftw_plan_r2r_1d(n, in.data(), out.data(), kind,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw NumericalError("fftw: failed to create r2r plan");
    cache.emplace(key, p);
    return p;
}

inline void run_r2r(fftw_r2r_kind kind, const std::vector<double>& in,
                    std::vector<double>& out) {
    const int n = static_cast<int>(in.size());
    out.resize(n);
    // out-of-place execution; FFTW requires in != out to match the plan
    std::vector<double> tmp(in);
    fftw_execute_r2r(r2r_plan(kind, n), tmp.data(), out.data());
}

} // namespace flamelab::detail

namespace flamelab {

// Samples at the N grid points -> first n_modes cosine coefficients.
inline std::vector<double> cosine_analyze(const std::vector<double>& values,
                                          int n_modes) {
    const int n = static_cast<int>(values.size());
    std::vector<double> f;
    detail::run_r2r(FFTW_REDFT00, values, f);
    std::vector<double> a(n_modes, 0.0);
    const double inv = 1.0 / (n - 1);
    a[0] = 0.5 * f[0] * inv;
    for (int k = 1; k < n_modes && k < n; ++k) a[k] = f[k] * inv;
    return a;
}

inline std::vector<double> cosine_synthesize(const std::vector<double>& coeffs,
                                             int n_points) {
    std::vector<double> h(n_points, 0.0);
    h[0] = coeffs[0];
    for (int k = 1; k < static_cast<int>(coeffs.size()) && k < n_points - 1; ++k)
        h[k] = 0.5 * coeffs[k];
    std::vector<double> out;
    detail::run_r2r(FFTW_REDFT00, h, out);
    return out;
}

// Samples (including the zero endpoints) -> sine coefficients b_1..b_{n_modes-1}.
// Index 0 of the result is unused and stays zero.
inline std::vector<double> sine_analyze(const std::vector<double>& values,
                                        int n_modes) {
    const int n = static_cast<int>(values.size());
    std::vector<double> interior(values.begin() + 1, values.end() - 1);
    std::vector<double> f;
    detail::run_r2r(FFTW_RODFT00, interior, f);
    std::vector<double> b(n_modes, 0.0);
    const double inv = 1.0 / (n - 1);
    for (int k = 1; k < n_modes && k - 1 < n - 2; ++k) b[k] = f[k - 1] * inv;
    return b;
}

inline std::vector<double> sine_synthesize(const std::vector<double>& coeffs,
                                           int n_points) {
    std::vector<double> h(n_points - 2, 0.0);
    for (int k = 1; k < static_cast<int>(coeffs.size()) && k - 1 < n_points - 2; ++k)
        h[k - 1] = 0.5 * coeffs[k];
    std::vector<double> interior;
    detail::run_r2r(FFTW_RODFT00, h, interior);
    std::vector<double> out(n_points, 0.0);
    for (int i = 0; i < n_points - 2; ++i) out[i + 1] = interior[i];
    return out;
}

} // namespace flamelab
