#include "spinlab/kernels/twa_step.hpp"

#include <cstdlib>

namespace spinlab::kernels {

namespace {

bool force_scalar() {
    const char* env = std::getenv("SPINLAB_FORCE_SCALAR");
    return env != nullptr && env[0] == '1';
}

bool avx2_available() {
#if defined(SPINLAB_BUILD_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

} // namespace

StepFn select_step_fn(Scheme scheme) {
#if defined(SPINLAB_BUILD_AVX2)
    if (!force_scalar() && avx2_available())
        return scheme == Scheme::EulerMaruyama ? step_em_avx2 : step_heun_avx2;
#endif
    return scheme == Scheme::EulerMaruyama ? step_em_scalar : step_heun_scalar;
}

const char* active_kernel_name() {
#if defined(SPINLAB_BUILD_AVX2)
    if (!force_scalar() && avx2_available()) return "avx2";
#endif
    return "scalar";
}

} // namespace spinlab::kernels
