#pragma once

#include "cuspflow/grid.hpp"
#include "cuspflow/profile.hpp"

#include <span>
#include <vector>

namespace cuspflow {

/// Grid snapshot of the stretching phi = d(Phi)/dx and the flow map Phi.
/// eps(t) = phi at the stagnant point x = 0, the minimum of phi.
struct FlowState {
    double t = 0.0;
    std::vector<double> phi;
    std::vector<double> Phi;
    double eps() const { return phi[0]; }
};

/// Nonlocal velocity gradient I(x_i) = integral of g'(z)/Phi(z) from x_i to a,
/// evaluated as u_y along the flow map image.
struct VelocityGradient {
    std::vector<double> I;
};

/// Trapezoid cumulative integral of phi; Phi(x_0) = 0, exact for phi affine
/// between nodes.
std::vector<double> cumulative_phi(const LagrangianGrid& grid, std::span<const double> phi);

/// Core used by the time stepper: g' at nodes and the z->0 limit value are
/// precomputed by the caller. f(0) takes the removable-limit value
/// g''(0)/phi(0) (g'(0) = 0). Throws state_error on nonpositive interior Phi.
void velocity_gradient_core(const LagrangianGrid& grid, std::span<const double> phi,
                            std::span<const double> Phi, std::span<const double> g_prime_nodes,
                            double g_second_0, std::span<double> out,
                            std::span<double> scratch);

VelocityGradient velocity_gradient(const LagrangianGrid& grid, const FlowState& state,
                                   const Forcing& forcing);

/// Eulerian cross-check route: trapezoid approximation of the model
/// velocity-gradient integral of theta_y(z)/z from y_eval upward, with
/// theta_y by centered differences on the (possibly nonuniform) y grid.
/// Kept deliberately independent of the Lagrangian quadrature path.
double eulerian_velocity_gradient(std::span<const double> theta, std::span<const double> y,
                                  double y_eval);

/// Phi(a, t); the run harness checks Phi(a,t) = Phi(a,0) - g(0) t against it.
double support_drift(const FlowState& state);

} // namespace cuspflow
