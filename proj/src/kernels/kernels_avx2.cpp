// AVX2 variants. Compiled with -mavx2 only (no FMA) and -ffp-contract=off:
// each lane performs the scalar sequence of rounded operations, so results
// are bit-identical to kernels_scalar.cpp. Reductions use min/max only.

#if defined(__x86_64__) || defined(_M_X64)

#include "cuspflow/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace cuspflow::kernels {
namespace {

constexpr std::size_t W = 4; // doubles per __m256d

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

void mul_v(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

void div_v(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(y + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) y[i] = a[i] / b[i];
}

void stage_combine_v(double* out, const double* base, double dt, const double* c,
                     const double* const* ks, std::size_t m, std::size_t n) {
    const __m256d vdt = _mm256_set1_pd(dt);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d acc = _mm256_mul_pd(_mm256_set1_pd(c[0]), _mm256_loadu_pd(ks[0] + i));
        for (std::size_t j = 1; j < m; ++j)
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(c[j]), _mm256_loadu_pd(ks[j] + i)));
        __m256d r = _mm256_mul_pd(vdt, acc);
        if (base) r = _mm256_add_pd(_mm256_loadu_pd(base + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        double acc = c[0] * ks[0][i];
        for (std::size_t j = 1; j < m; ++j) acc += c[j] * ks[j][i];
        out[i] = base ? base[i] + dt * acc : dt * acc;
    }
}

void seg4_v(const double* w0, const double* w1, const double* w2, const double* w3,
            const double* f, double* seg, std::size_t j0, std::size_t j1) {
    std::size_t j = j0;
    for (; j + W <= j1; j += W) {
        __m256d s = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(w0 + j), _mm256_loadu_pd(f + j - 1)),
                          _mm256_mul_pd(_mm256_loadu_pd(w1 + j), _mm256_loadu_pd(f + j))),
            _mm256_mul_pd(_mm256_loadu_pd(w2 + j), _mm256_loadu_pd(f + j + 1)));
        s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(w3 + j), _mm256_loadu_pd(f + j + 2)));
        _mm256_storeu_pd(seg + j, s);
    }
    for (; j < j1; ++j)
        seg[j] = w0[j] * f[j - 1] + w1[j] * f[j] + w2[j] * f[j + 1] + w3[j] * f[j + 2];
}

void pair_sum_v(const double* tw, const double* f, double* seg, std::size_t nseg) {
    std::size_t j = 0;
    for (; j + W <= nseg; j += W)
        _mm256_storeu_pd(seg + j,
                         _mm256_mul_pd(_mm256_loadu_pd(tw + j),
                                       _mm256_add_pd(_mm256_loadu_pd(f + j),
                                                     _mm256_loadu_pd(f + j + 1))));
    for (; j < nseg; ++j) seg[j] = tw[j] * (f[j] + f[j + 1]);
}

double err_norm_max_v(const double* e, const double* phi, double rtol, std::size_t n) {
    const __m256d vrtol = _mm256_set1_pd(rtol);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d worst = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d ae = _mm256_and_pd(absmask, _mm256_loadu_pd(e + i));
        __m256d r = _mm256_div_pd(ae, _mm256_mul_pd(vrtol, _mm256_loadu_pd(phi + i)));
        worst = _mm256_max_pd(worst, r);
    }
    double m = hmax(worst);
    for (; i < n; ++i) {
        const double r = std::fabs(e[i]) / (rtol * phi[i]);
        if (r > m) m = r;
    }
    return m;
}

double vmin_v(const double* a, std::size_t n) {
    double m = a[0];
    std::size_t i = 0;
    if (n >= W) {
        __m256d vm = _mm256_loadu_pd(a);
        for (i = W; i + W <= n; i += W) vm = _mm256_min_pd(vm, _mm256_loadu_pd(a + i));
        m = hmin(vm);
    }
    for (; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

double min_diff_v(const double* a, const double* b, std::size_t n) {
    double m = a[0] - b[0];
    std::size_t i = 0;
    if (n >= W) {
        __m256d vm = _mm256_sub_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
        for (i = W; i + W <= n; i += W)
            vm = _mm256_min_pd(vm, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        m = hmin(vm);
    }
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        if (d < m) m = d;
    }
    return m;
}

double mono_rel_min_v(const double* phi, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t nd = n - 1;
    double m = (phi[1] - phi[0]) / phi[0];
    std::size_t i = 0;
    if (nd >= W) {
        __m256d vm = _mm256_div_pd(
            _mm256_sub_pd(_mm256_loadu_pd(phi + 1), _mm256_loadu_pd(phi)), _mm256_loadu_pd(phi));
        for (i = W; i + W <= nd; i += W)
            vm = _mm256_min_pd(vm, _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(phi + i + 1),
                                                               _mm256_loadu_pd(phi + i)),
                                                 _mm256_loadu_pd(phi + i)));
        m = hmin(vm);
    }
    for (; i < nd; ++i) {
        const double d = (phi[i + 1] - phi[i]) / phi[i];
        if (d < m) m = d;
    }
    return m;
}

double max_rel_increase_v(const double* a, const double* b, std::size_t n) {
    double m = (a[0] - b[0]) / b[0];
    std::size_t i = 0;
    if (n >= W) {
        __m256d vb = _mm256_loadu_pd(b);
        __m256d vm = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(a), vb), vb);
        for (i = W; i + W <= n; i += W) {
            vb = _mm256_loadu_pd(b + i);
            vm = _mm256_max_pd(vm, _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), vb), vb));
        }
        m = hmax(vm);
    }
    for (; i < n; ++i) {
        const double d = (a[i] - b[i]) / b[i];
        if (d > m) m = d;
    }
    return m;
}

} // namespace

const Ops& avx2_ops_impl() {
    static const Ops table{mul_v,      div_v,      stage_combine_v, seg4_v,
                           pair_sum_v, err_norm_max_v, vmin_v,      min_diff_v,
                           mono_rel_min_v, max_rel_increase_v};
    return table;
}

} // namespace cuspflow::kernels

#endif // x86_64
