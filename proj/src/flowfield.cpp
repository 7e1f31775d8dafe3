#include "cuspflow/flowfield.hpp"

#include "cuspflow/errors.hpp"
#include "cuspflow/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cuspflow {

std::vector<double> cumulative_phi(const LagrangianGrid& grid, std::span<const double> phi) {
    const std::size_t n = grid.size();
    if (phi.size() != n) throw state_error("cumulative_phi: phi size mismatch");
    std::vector<double> seg(n - 1), Phi(n);
    kernels::ops().pair_sum(grid.trap_w.data(), phi.data(), seg.data(), n - 1);
    Phi[0] = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) Phi[j + 1] = Phi[j] + seg[j]; // sequential scan
    return Phi;
}

void velocity_gradient_core(const LagrangianGrid& grid, std::span<const double> phi,
                            std::span<const double> Phi, std::span<const double> g_prime_nodes,
                            double g_second_0, std::span<double> out, std::span<double> scratch) {
    const std::size_t n = grid.size();
    const auto& k = kernels::ops();
    double* f = scratch.data();          // integrand values at nodes
    double* seg = scratch.data() + n;    // per-segment integrals

    if (!(phi[0] > 0.0)) throw state_error("velocity gradient: phi(0) not positive");
    f[0] = g_second_0 / phi[0]; // removable limit of g'(z)/Phi(z) at z = 0
    if (k.vmin(Phi.data() + 1, n - 1) <= 0.0) {
        throw state_error("velocity gradient: nonpositive Phi at an interior node");
    }
    k.div(g_prime_nodes.data() + 1, Phi.data() + 1, f + 1, n - 1);

    const std::size_t nseg = n - 1;
    // boundary stencils (clamped) done here, interior via the sliding kernel
    seg[0] = grid.cw0[0] * f[0] + grid.cw1[0] * f[1] + grid.cw2[0] * f[2] + grid.cw3[0] * f[3];
    if (nseg > 1) {
        const std::size_t j = nseg - 1, s = n - 4;
        seg[j] = grid.cw0[j] * f[s] + grid.cw1[j] * f[s + 1] + grid.cw2[j] * f[s + 2] +
                 grid.cw3[j] * f[s + 3];
    }
    if (nseg > 2) {
        k.seg4(grid.cw0.data(), grid.cw1.data(), grid.cw2.data(), grid.cw3.data(), f, seg, 1,
               nseg - 1);
    }

    out[n - 1] = 0.0; // g' vanishes at and beyond x = a
    for (std::size_t j = n - 1; j-- > 0;) out[j] = out[j + 1] + seg[j]; // sequential scan
}

VelocityGradient velocity_gradient(const LagrangianGrid& grid, const FlowState& state,
                                   const Forcing& forcing) {
    const std::size_t n = grid.size();
    std::vector<double> gp(n);
    for (std::size_t i = 0; i < n; ++i) gp[i] = forcing.g_prime(grid.x[i]);
    VelocityGradient vg;
    vg.I.resize(n);
    std::vector<double> scratch(2 * n);
    velocity_gradient_core(grid, state.phi, state.Phi, gp, forcing.g_second(0.0), vg.I, scratch);
    return vg;
}

double eulerian_velocity_gradient(std::span<const double> theta, std::span<const double> y,
                                  double y_eval) {
    const std::size_t n = y.size();
    if (theta.size() != n || n < 3) throw state_error("eulerian gradient: bad inputs");
    if (!(y_eval > 0.0)) throw state_error("eulerian gradient: y_eval must be positive");

    // centered 3-point derivative on a nonuniform grid; one-sided endpoints unused
    std::vector<double> dth(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = y[i] - y[i - 1];
        const double h2 = y[i + 1] - y[i];
        dth[i] = (-h2 / (h1 * (h1 + h2))) * theta[i - 1] + ((h2 - h1) / (h1 * h2)) * theta[i] +
                 (h1 / (h2 * (h1 + h2))) * theta[i + 1];
    }

    auto integrand = [&](std::size_t i) { return y[i] > 0.0 ? dth[i] / y[i] : 0.0; };

    const auto j = static_cast<std::size_t>(
        std::lower_bound(y.begin(), y.end(), y_eval) - y.begin());
    if (j >= n) return 0.0;
    double s = 0.0;
    if (j > 0 && y_eval < y[j]) {
        // partial first segment, integrand interpolated at y_eval
        const double w = (y_eval - y[j - 1]) / (y[j] - y[j - 1]);
        const double fy = integrand(j - 1) + (integrand(j) - integrand(j - 1)) * w;
        s += 0.5 * (y[j] - y_eval) * (fy + integrand(j));
    }
    for (std::size_t i = j; i + 1 < n; ++i) {
        s += 0.5 * (y[i + 1] - y[i]) * (integrand(i) + integrand(i + 1));
    }
    return s;
}

double support_drift(const FlowState& state) {
    return state.Phi.back();
}

} // namespace cuspflow
