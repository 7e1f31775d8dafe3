#include "cuspflow/kernels.hpp"

#include <cmath>

// Reference kernels. These define the semantics: the SIMD variants must
// reproduce them bit for bit.

namespace cuspflow::kernels {
namespace {

void mul_s(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void div_s(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] / b[i];
}

void stage_combine_s(double* out, const double* base, double dt, const double* c,
                     const double* const* ks, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = c[0] * ks[0][i];
        for (std::size_t j = 1; j < m; ++j) acc += c[j] * ks[j][i];
        out[i] = base ? base[i] + dt * acc : dt * acc;
    }
}

void seg4_s(const double* w0, const double* w1, const double* w2, const double* w3,
            const double* f, double* seg, std::size_t j0, std::size_t j1) {
    for (std::size_t j = j0; j < j1; ++j) {
        seg[j] = w0[j] * f[j - 1] + w1[j] * f[j] + w2[j] * f[j + 1] + w3[j] * f[j + 2];
    }
}

void pair_sum_s(const double* tw, const double* f, double* seg, std::size_t nseg) {
    for (std::size_t j = 0; j < nseg; ++j) seg[j] = tw[j] * (f[j] + f[j + 1]);
}

double err_norm_max_s(const double* e, const double* phi, double rtol, std::size_t n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::fabs(e[i]) / (rtol * phi[i]);
        if (r > worst) worst = r;
    }
    return worst;
}

double vmin_s(const double* a, std::size_t n) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

double min_diff_s(const double* a, const double* b, std::size_t n) {
    double m = a[0] - b[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double d = a[i] - b[i];
        if (d < m) m = d;
    }
    return m;
}

double mono_rel_min_s(const double* phi, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (phi[i + 1] - phi[i]) / phi[i];
        if (i == 0 || d < m) m = d;
    }
    return m;
}

double max_rel_increase_s(const double* a, const double* b, std::size_t n) {
    double m = (a[0] - b[0]) / b[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double d = (a[i] - b[i]) / b[i];
        if (d > m) m = d;
    }
    return m;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{mul_s,      div_s,      stage_combine_s, seg4_s,
                           pair_sum_s, err_norm_max_s, vmin_s,      min_diff_s,
                           mono_rel_min_s, max_rel_increase_s};
    return table;
}

} // namespace cuspflow::kernels
