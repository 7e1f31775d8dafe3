#include "cuspflow/grid.hpp"

#include "cuspflow/errors.hpp"

#include <array>
#include <cmath>

namespace cuspflow {
namespace {

constexpr double pivot_fraction = 0.05; // log head ends, uniform tail begins
constexpr double tail_fraction = 0.5;   // share of nodes in the uniform tail

// Weights of the cubic through nodes t[0..3] integrated over [lo, hi],
// computed in segment-centered coordinates for conditioning.
std::array<double, 4> cubic_weights(const double* t, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::array<double, 4> tau{};
    for (int k = 0; k < 4; ++k) tau[k] = (t[k] - mid) / half;

    std::array<double, 4> w{};
    for (int k = 0; k < 4; ++k) {
        // Lagrange basis l_k as cubic coefficients c0..c3 in tau.
        std::array<double, 4> c{1.0, 0.0, 0.0, 0.0};
        double denom = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m == k) continue;
            denom *= tau[k] - tau[m];
            // multiply c by (tau - tau_m)
            std::array<double, 4> nc{};
            for (int d = 0; d < 3; ++d) nc[d + 1] += c[d];
            for (int d = 0; d < 4; ++d) nc[d] -= tau[m] * c[d];
            c = nc;
        }
        // integral of tau^d over [-1, 1]: 2, 0, 2/3, 0
        w[k] = half * (2.0 * c[0] + (2.0 / 3.0) * c[2]) / denom;
    }
    return w;
}

} // namespace

LagrangianGrid make_grid(double a, std::size_t n, double grading) {
    if (!(a > 0.0)) throw config_error("grid: a must be positive");
    if (n < 16) throw config_error("grid: N must be at least 16");
    if (!(grading > 0.0) || grading > 300.0) throw config_error("grid: grading out of range");

    LagrangianGrid g;
    g.x.resize(n);
    const double xmin = a * std::pow(10.0, -grading);
    const double xc = a * pivot_fraction;
    const auto n_tail = static_cast<std::size_t>(static_cast<double>(n) * tail_fraction);
    const std::size_t n_head = n - n_tail; // includes node 0

    g.x[0] = 0.0;
    const double ratio = std::log(xc / xmin) / static_cast<double>(n_head - 2);
    for (std::size_t i = 1; i < n_head; ++i) {
        g.x[i] = xmin * std::exp(static_cast<double>(i - 1) * ratio);
    }
    g.x[n_head - 1] = xc;
    for (std::size_t j = 1; j <= n_tail; ++j) {
        g.x[n_head - 1 + j] = xc + (a - xc) * static_cast<double>(j) / static_cast<double>(n_tail);
    }
    g.x[n - 1] = a;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(g.x[i] < g.x[i + 1])) throw config_error("grid: nodes not strictly increasing");
    }

    const std::size_t nseg = n - 1;
    g.trap_w.resize(nseg);
    g.cw0.resize(nseg);
    g.cw1.resize(nseg);
    g.cw2.resize(nseg);
    g.cw3.resize(nseg);
    for (std::size_t j = 0; j < nseg; ++j) {
        g.trap_w[j] = 0.5 * (g.x[j + 1] - g.x[j]);
        std::size_t s = (j == 0) ? 0 : j - 1;
        if (s > n - 4) s = n - 4;
        const auto w = cubic_weights(g.x.data() + s, g.x[j], g.x[j + 1]);
        g.cw0[j] = w[0];
        g.cw1[j] = w[1];
        g.cw2[j] = w[2];
        g.cw3[j] = w[3];
    }
    return g;
}

} // namespace cuspflow
