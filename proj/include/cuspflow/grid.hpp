#pragma once

#include <cstddef>
#include <vector>

namespace cuspflow {

/// Static Lagrangian node set on [0, a] with precomputed quadrature tables.
///
/// Layout: node 0, a log-graded head from x_min = a*10^-decades up to the
/// pivot a/20, then a uniform tail to a. The head supplies the decades of
/// resolution the cusp analysis needs near x = 0; the uniform tail carries
/// the O(a)-scale mass of every integral at second-order accuracy with the
/// favorable endpoint cancellation of equispaced trapezoid sums.
struct LagrangianGrid {
    std::vector<double> x;

    // trapezoid: trap_w[j] = (x[j+1]-x[j])/2
    std::vector<double> trap_w;

    // cubic segment rule: integral over [x_j, x_j+1] of the cubic through
    // nodes s..s+3, s = clamp(j-1, 0, n-4); weights stored so that
    // seg_j = w0[j] f[s] + w1[j] f[s+1] + w2[j] f[s+2] + w3[j] f[s+3].
    std::vector<double> cw0, cw1, cw2, cw3;

    std::size_t size() const { return x.size(); }
    std::size_t segments() const { return x.size() - 1; }
    double a() const { return x.back(); }
    double x_min() const { return x[1]; }
};

/// grading = number of decades of log refinement near 0 (x_min = a*10^-grading).
LagrangianGrid make_grid(double a, std::size_t n, double grading = 12.0);

} // namespace cuspflow
