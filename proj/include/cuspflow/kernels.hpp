#pragma once

#include <cstddef>
#include <string_view>

namespace cuspflow::kernels {

// Data-parallel inner loops of the solver. Every backend implements the same
// operation table; SIMD variants are lane-independent with the exact scalar
// evaluation order per element (no FMA, no reassociated sums), so all
// backends produce bit-identical results. Reductions are restricted to
// min/max, which are order-insensitive for finite doubles.
struct Ops {
    // y[i] = a[i] * b[i]
    void (*mul)(const double* a, const double* b, double* y, std::size_t n);
    // y[i] = a[i] / b[i]
    void (*div)(const double* a, const double* b, double* y, std::size_t n);
    // out[i] = base[i] + dt*(c[0]*k0[i] + ... + c[m-1]*k_{m-1}[i]);
    // base == nullptr drops the base term. Accumulation order is fixed j=0..m-1.
    void (*stage_combine)(double* out, const double* base, double dt,
                          const double* c, const double* const* ks,
                          std::size_t m, std::size_t n);
    // seg[j] = w0[j]*f[j-1] + w1[j]*f[j] + w2[j]*f[j+1] + w3[j]*f[j+2],
    // for j in [j0, j1). Caller handles boundary stencils.
    void (*seg4)(const double* w0, const double* w1, const double* w2,
                 const double* w3, const double* f, double* seg,
                 std::size_t j0, std::size_t j1);
    // seg[j] = tw[j] * (f[j] + f[j+1]) for j in [0, nseg)
    void (*pair_sum)(const double* tw, const double* f, double* seg, std::size_t nseg);
    // max_i |e[i]| / (rtol * phi[i])
    double (*err_norm_max)(const double* e, const double* phi, double rtol, std::size_t n);
    double (*vmin)(const double* a, std::size_t n);
    // min_i (a[i] - b[i])
    double (*min_diff)(const double* a, const double* b, std::size_t n);
    // min_i (phi[i+1] - phi[i]) / phi[i]  over i in [0, n-1)
    double (*mono_rel_min)(const double* phi, std::size_t n);
    // max_i (a[i] - b[i]) / b[i]
    double (*max_rel_increase)(const double* a, const double* b, std::size_t n);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();
bool avx2_available();
const Ops& ops(Backend b);

/// Runtime-selected table: AVX2 when the CPU supports it, unless overridden
/// by force() or the CUSPFLOW_KERNELS environment variable ("scalar"/"avx2").
const Ops& ops();
Backend active();
void force(Backend b);
std::string_view backend_name(Backend b);

} // namespace cuspflow::kernels
