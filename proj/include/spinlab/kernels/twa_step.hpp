#pragma once

#include <cstddef>

// Langevin step kernels for the Schwinger-field chain. One spin per lattice
// site carries two complex modes (alpha, beta) stored as SoA arrays. The
// scalar kernel is the reference implementation; the AVX2 variant computes
// the same update and is selected at runtime.
namespace spinlab::kernels {

struct TwaStepParams {
    int n = 0;         // number of spins (sites)
    double inv_2s = 0; // 1/(2S)
    double dt = 0;
    int periodic = 1;
    const double* j_right = nullptr; // coupling of site i to site i+1 (ring)
    const double* gam = nullptr;     // per-site dissipation rate Gamma/(2S)
    const double* sgam = nullptr;    // signed: +gam on gain sites, -gam on loss sites
    int add_noise = 1;
};

struct TwaState {
    double* ar = nullptr;
    double* ai = nullptr;
    double* br = nullptr;
    double* bi = nullptr;
};

// noise: 4n standard normals in SoA blocks [zar | zai | zbr | zbi].
using StepFn = void (*)(const TwaStepParams&, TwaState&, const double* noise, double* work);

std::size_t work_size(int n);

void step_em_scalar(const TwaStepParams& p, TwaState& s, const double* noise, double* work);
void step_heun_scalar(const TwaStepParams& p, TwaState& s, const double* noise, double* work);

#if defined(SPINLAB_BUILD_AVX2)
void step_em_avx2(const TwaStepParams& p, TwaState& s, const double* noise, double* work);
void step_heun_avx2(const TwaStepParams& p, TwaState& s, const double* noise, double* work);
#endif

enum class Scheme { EulerMaruyama, StochasticHeun };

// Picks the widest kernel the CPU supports; SPINLAB_FORCE_SCALAR=1 overrides.
StepFn select_step_fn(Scheme scheme);
const char* active_kernel_name();

} // namespace spinlab::kernels
