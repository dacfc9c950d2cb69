#pragma once

// Independent reference solver for the tunnel-constrained energy minimization.
//
// Minimizes sum_k tau_k / h^2 * f((y_k - y_{k-1}) / tau_k) over the cumulative
// values y_1 .. y_{N-1}, each confined to [floor_k, ceiling_k], by projected
// Newton iterations (Bertsekas): variables near a bound with the gradient
// pushing outward are held, the rest take a Newton step on the tridiagonal
// reduced Hessian, followed by an Armijo search along the projection arc.
// Intended for small test instances only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cocomp/energy.hpp"
#include "cocomp/error.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/tunnel.hpp"

namespace cocomp {

struct OracleOptions {
    double stationarity = 1e-10;
    int max_iterations = 500;
};

inline OffloadSchedule convex_oracle(const FeasibilityTunnel& tunnel, const ChannelParams& ch,
                                     const OracleOptions& opt = {}) {
    if (!tunnel.feasible) throw InfeasibleError("oracle needs a feasible tunnel");
    const std::size_t n = tunnel.segment_count();
    if (n <= 1) {
        std::vector<double> y(n + 1, 0.0);
        if (n == 1) y[1] = tunnel.total;
        return schedule_from_cumulative(tunnel.times, y);
    }

    // Scaled variables z = y / W turn the objective into
    // phi(z) = sum_k tau_k (2^{(z_{k+1} - z_k) / tau_k} - 1), in units of N0 / h^2.
    const double w = ch.bandwidth;
    const std::vector<double> tau = tunnel.durations();
    const std::size_t m = n - 1;  // free interior boundaries
    std::vector<double> lo(m), hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = tunnel.floor[i + 1] / w;
        hi[i] = std::max(tunnel.ceiling[i + 1], tunnel.floor[i + 1]) / w;
    }
    const double z_end = tunnel.total / w;

    auto at = [&](const std::vector<double>& z, std::size_t b) {
        return b == 0 ? 0.0 : (b == n ? z_end : z[b - 1]);
    };
    auto objective = [&](const std::vector<double>& z) {
        double v = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            v += tau[k] * std::expm1((at(z, k + 1) - at(z, k)) / tau[k] * std::numbers::ln2);
        return v;
    };
    auto gradient = [&](const std::vector<double>& z, std::vector<double>& g) {
        std::vector<double> slope_term(n);
        for (std::size_t k = 0; k < n; ++k)
            slope_term[k] = std::numbers::ln2 * std::exp2((at(z, k + 1) - at(z, k)) / tau[k]);
        for (std::size_t i = 0; i < m; ++i) g[i] = slope_term[i] - slope_term[i + 1];
    };
    auto project = [&](std::vector<double>& z) {
        for (std::size_t i = 0; i < m; ++i) z[i] = std::clamp(z[i], lo[i], hi[i]);
    };

    // Start on the floor path: feasible and with finite rates, unlike a clamped chord.
    const OffloadSchedule start = follow_floor(tunnel);
    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = start.cumulative[i + 1] / w;
    project(z);

    auto curvature = [&](const std::vector<double>& v, std::vector<double>& c) {
        for (std::size_t k = 0; k < n; ++k)
            c[k] = std::numbers::ln2 * std::numbers::ln2 * std::exp2((at(v, k + 1) - at(v, k)) / tau[k]) / tau[k];
    };

    std::vector<double> g(m), c(n), d(m), trial(m), diag(m), upper(m), rhs(m);
    std::vector<bool> held(m);
    const double scale = std::max(1.0, z_end);
    const double hold_width = 1e-6 * scale;

    for (int it = 0; it < opt.max_iterations; ++it) {
        gradient(z, g);
        double residual = 0.0, g_scale = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            residual = std::max(residual, std::abs(std::clamp(z[i] - g[i], lo[i], hi[i]) - z[i]));
            g_scale = std::max(g_scale, std::abs(g[i]));
        }
        // gradient entries are differences of exponentials, so their rounding scales with |g|
        auto finish = [&] {
            std::vector<double> y(n + 1);
            for (std::size_t b = 0; b <= n; ++b) y[b] = at(z, b) * w;
            return schedule_from_cumulative(tunnel.times, std::move(y));
        };
        if (residual <= opt.stationarity * scale * g_scale) return finish();

        const double eps = std::min(hold_width, residual);
        for (std::size_t i = 0; i < m; ++i)
            held[i] = (z[i] <= lo[i] + eps && g[i] > 0.0) || (z[i] >= hi[i] - eps && g[i] < 0.0);

        // Interior boundary i sits between segments i and i + 1.
        curvature(z, c);
        for (std::size_t i = 0; i < m; ++i) {
            diag[i] = c[i] + c[i + 1];
            upper[i] = (i + 1 < m && !held[i] && !held[i + 1]) ? -c[i + 1] : 0.0;
            rhs[i] = -g[i];
        }
        // Thomas solve; held rows decouple and take a diagonally scaled gradient step.
        for (std::size_t i = 1; i < m; ++i) {
            if (upper[i - 1] == 0.0) continue;
            const double f = upper[i - 1] / diag[i - 1];
            diag[i] -= f * upper[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        for (std::size_t i = m; i-- > 0;) d[i] = (rhs[i] - (i + 1 < m ? upper[i] * d[i + 1] : 0.0)) / diag[i];

        const double fz = objective(z);
        double newton_decrease = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            newton_decrease += held[i] ? g[i] * (z[i] - std::clamp(z[i] + d[i], lo[i], hi[i])) : -g[i] * d[i];
        // below this the objective cannot resolve further progress
        if (newton_decrease <= 1e-13 * std::abs(fz)) return finish();

        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
            double decrease = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                trial[i] = std::clamp(z[i] + alpha * d[i], lo[i], hi[i]);
                decrease += held[i] ? g[i] * (z[i] - trial[i]) : -alpha * g[i] * d[i];
            }
            const double ft = objective(trial);
            if (std::isfinite(ft) && fz - ft >= 1e-4 * decrease) {
                moved = true;
                break;
            }
        }
        if (!moved) break;
        z = trial;
    }
    throw NumericError("convex oracle did not reach stationarity");
}

}  // namespace cocomp
