#include "cuspflow/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace cuspflow;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n, double lo, double hi,
                               bool log_scale = false) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = log_scale ? std::exp(dist(rng)) : dist(rng);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    }
    return true;
}

} // namespace

TEST_CASE("scalar and AVX2 kernels are bit-identical on random data") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available on this host; equivalence check skipped");
        return;
    }
    const auto& S = kernels::ops(kernels::Backend::scalar);
    const auto& V = kernels::ops(kernels::Backend::avx2);
    std::mt19937 rng(20240817);

    // odd sizes exercise the vector tails
    for (std::size_t n : {5u, 16u, 33u, 257u, 1024u, 4099u}) {
        const auto a = random_vec(rng, n, -3.0, 3.0);
        const auto b = random_vec(rng, n, std::log(1e-8), std::log(1e4), true);
        std::vector<double> ys(n), yv(n);

        S.mul(a.data(), b.data(), ys.data(), n);
        V.mul(a.data(), b.data(), yv.data(), n);
        CHECK(bit_equal(ys, yv));

        S.div(a.data(), b.data(), ys.data(), n);
        V.div(a.data(), b.data(), yv.data(), n);
        CHECK(bit_equal(ys, yv));

        // stage combination with 7 slopes
        std::vector<std::vector<double>> ks;
        for (int s = 0; s < 7; ++s) ks.push_back(random_vec(rng, n, -2.0, 2.0));
        std::vector<const double*> kp;
        for (auto& k : ks) kp.push_back(k.data());
        const double coef[7] = {0.3, -1.2, 0.07, 2.5, -0.9, 0.11, -0.05};
        S.stage_combine(ys.data(), b.data(), 0.037, coef, kp.data(), 7, n);
        V.stage_combine(yv.data(), b.data(), 0.037, coef, kp.data(), 7, n);
        CHECK(bit_equal(ys, yv));
        S.stage_combine(ys.data(), nullptr, 0.037, coef, kp.data(), 7, n);
        V.stage_combine(yv.data(), nullptr, 0.037, coef, kp.data(), 7, n);
        CHECK(bit_equal(ys, yv));

        if (n >= 8) {
            const std::size_t nseg = n - 1;
            const auto w0 = random_vec(rng, nseg, -1.0, 1.0);
            const auto w1 = random_vec(rng, nseg, -1.0, 1.0);
            const auto w2 = random_vec(rng, nseg, -1.0, 1.0);
            const auto w3 = random_vec(rng, nseg, -1.0, 1.0);
            std::vector<double> segs(nseg, 0.0), segv(nseg, 0.0);
            S.seg4(w0.data(), w1.data(), w2.data(), w3.data(), b.data(), segs.data(), 1,
                   nseg - 1);
            V.seg4(w0.data(), w1.data(), w2.data(), w3.data(), b.data(), segv.data(), 1,
                   nseg - 1);
            CHECK(bit_equal(segs, segv));

            S.pair_sum(w0.data(), b.data(), segs.data(), nseg);
            V.pair_sum(w0.data(), b.data(), segv.data(), nseg);
            CHECK(bit_equal(segs, segv));
        }

        CHECK(S.err_norm_max(a.data(), b.data(), 1e-10, n) ==
              V.err_norm_max(a.data(), b.data(), 1e-10, n));
        CHECK(S.vmin(a.data(), n) == V.vmin(a.data(), n));
        CHECK(S.min_diff(a.data(), b.data(), n) == V.min_diff(a.data(), b.data(), n));
        CHECK(S.mono_rel_min(b.data(), n) == V.mono_rel_min(b.data(), n));
        CHECK(S.max_rel_increase(b.data(), b.data(), n) ==
              V.max_rel_increase(b.data(), b.data(), n));
        std::vector<double> b2 = b;
        for (auto& x : b2) x *= 1.0 + 1e-13;
        CHECK(S.max_rel_increase(b2.data(), b.data(), n) ==
              V.max_rel_increase(b2.data(), b.data(), n));
    }
}

TEST_CASE("kernel semantics on small hand values") {
    const auto& K = kernels::ops(kernels::Backend::scalar);
    const double a[4] = {1.0, 2.0, 3.0, 4.0};
    const double b[4] = {4.0, 3.0, 2.0, 1.0};
    double y[4];
    K.mul(a, b, y, 4);
    CHECK(y[1] == 6.0);
    K.div(a, b, y, 4);
    CHECK(y[3] == 4.0);
    CHECK(K.vmin(a, 4) == 1.0);
    CHECK(K.min_diff(a, b, 4) == -3.0);
    const double up[4] = {1.0, 1.5, 1.5, 3.0};
    CHECK(K.mono_rel_min(up, 4) == 0.0);
    CHECK(K.err_norm_max(a, b, 0.5, 4) == doctest::Approx(8.0));
}

TEST_CASE("backend dispatch can be forced") {
    const auto original = kernels::active();
    kernels::force(kernels::Backend::scalar);
    CHECK(kernels::active() == kernels::Backend::scalar);
    kernels::force(original);
    CHECK(kernels::active() == original);
}
