#include "cuspflow/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cuspflow::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops_impl(); // kernels_avx2.cpp

bool avx2_available() {
    return __builtin_cpu_supports("avx2");
}
#else
bool avx2_available() {
    return false;
}
#endif

const Ops& ops(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) return avx2_ops_impl();
#endif
    return scalar_ops();
}

namespace {

Backend pick_default() {
    if (const char* env = std::getenv("CUSPFLOW_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend& selected() {
    static Backend b = pick_default();
    return b;
}

} // namespace

const Ops& ops() {
    return ops(selected());
}

Backend active() {
    return selected();
}

void force(Backend b) {
    selected() = (b == Backend::avx2 && !avx2_available()) ? Backend::scalar : b;
}

std::string_view backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace cuspflow::kernels
