#include "spinlab/kernels/twa_step.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 variant of the Langevin step. Mirrors the scalar kernel exactly:
// same padded-buffer layout, same update order, FMA contraction only.
namespace spinlab::kernels {

namespace {

void drift_avx2(const TwaStepParams& p, const double* ar, const double* ai, const double* br,
                const double* bi, double* dar, double* dai, double* dbr, double* dbi,
                double* amp_a, double* amp_b, double* work, const double* jl, const double* jr) {
    const int n = p.n;
    double* pr = work;
    double* pi = work + (n + 2);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d var = _mm256_loadu_pd(ar + i);
        __m256d vai = _mm256_loadu_pd(ai + i);
        __m256d vbr = _mm256_loadu_pd(br + i);
        __m256d vbi = _mm256_loadu_pd(bi + i);
        __m256d vpr = _mm256_fmadd_pd(vai, vbi, _mm256_mul_pd(var, vbr));
        __m256d vpi = _mm256_fmsub_pd(vai, vbr, _mm256_mul_pd(var, vbi));
        _mm256_storeu_pd(pr + i + 1, vpr);
        _mm256_storeu_pd(pi + i + 1, vpi);
    }
    for (; i < n; ++i) {
        pr[i + 1] = ar[i] * br[i] + ai[i] * bi[i];
        pi[i + 1] = ai[i] * br[i] - ar[i] * bi[i];
    }
    if (p.periodic) {
        pr[0] = pr[n]; pi[0] = pi[n];
        pr[n + 1] = pr[1]; pi[n + 1] = pi[1];
    } else {
        pr[0] = pi[0] = 0.0;
        pr[n + 1] = pi[n + 1] = 0.0;
    }
    const __m256d vc = _mm256_set1_pd(p.inv_2s);
    const __m256d vhalf = _mm256_set1_pd(0.5);
    const __m256d vhdt = _mm256_set1_pd(0.5 * p.dt);
    i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vjl = _mm256_loadu_pd(jl + i);
        __m256d vjr = _mm256_loadu_pd(jr + i);
        __m256d vkr = _mm256_fmadd_pd(vjl, _mm256_loadu_pd(pr + i),
                                      _mm256_mul_pd(vjr, _mm256_loadu_pd(pr + i + 2)));
        __m256d vki = _mm256_fmadd_pd(vjl, _mm256_loadu_pd(pi + i),
                                      _mm256_mul_pd(vjr, _mm256_loadu_pd(pi + i + 2)));
        __m256d var = _mm256_loadu_pd(ar + i);
        __m256d vai = _mm256_loadu_pd(ai + i);
        __m256d vbr = _mm256_loadu_pd(br + i);
        __m256d vbi = _mm256_loadu_pd(bi + i);
        __m256d vna = _mm256_fmadd_pd(vai, vai, _mm256_mul_pd(var, var));
        __m256d vnb = _mm256_fmadd_pd(vbi, vbi, _mm256_mul_pd(vbr, vbr));
        __m256d vgam = _mm256_loadu_pd(p.gam + i);
        __m256d vsgam = _mm256_loadu_pd(p.sgam + i);
        __m256d vga = _mm256_fmsub_pd(vsgam, vnb, _mm256_mul_pd(vhalf, vgam));
        __m256d vgb = _mm256_fnmsub_pd(vsgam, vna, _mm256_mul_pd(vhalf, vgam));
        // dar = c*(br*ki + bi*kr) + ga*ar
        __m256d t1 = _mm256_fmadd_pd(vbr, vki, _mm256_mul_pd(vbi, vkr));
        _mm256_storeu_pd(dar + i, _mm256_fmadd_pd(vc, t1, _mm256_mul_pd(vga, var)));
        // dai = -c*(br*kr - bi*ki) + ga*ai
        __m256d t2 = _mm256_fmsub_pd(vbr, vkr, _mm256_mul_pd(vbi, vki));
        _mm256_storeu_pd(dai + i, _mm256_fnmadd_pd(vc, t2, _mm256_mul_pd(vga, vai)));
        // dbr = c*(ai*kr - ar*ki) + gb*br
        __m256d t3 = _mm256_fmsub_pd(vai, vkr, _mm256_mul_pd(var, vki));
        _mm256_storeu_pd(dbr + i, _mm256_fmadd_pd(vc, t3, _mm256_mul_pd(vgb, vbr)));
        // dbi = -c*(ar*kr + ai*ki) + gb*bi
        __m256d t4 = _mm256_fmadd_pd(var, vkr, _mm256_mul_pd(vai, vki));
        _mm256_storeu_pd(dbi + i, _mm256_fnmadd_pd(vc, t4, _mm256_mul_pd(vgb, vbi)));
        __m256d vsn = _mm256_sqrt_pd(_mm256_mul_pd(vgam, vhdt));
        _mm256_storeu_pd(amp_a + i, _mm256_mul_pd(vsn, _mm256_sqrt_pd(vnb)));
        _mm256_storeu_pd(amp_b + i, _mm256_mul_pd(vsn, _mm256_sqrt_pd(vna)));
    }
    for (; i < n; ++i) {
        double kr = jl[i] * pr[i] + jr[i] * pr[i + 2];
        double ki = jl[i] * pi[i] + jr[i] * pi[i + 2];
        double na = ar[i] * ar[i] + ai[i] * ai[i];
        double nb = br[i] * br[i] + bi[i] * bi[i];
        double ga = p.sgam[i] * nb - 0.5 * p.gam[i];
        double gb = -p.sgam[i] * na - 0.5 * p.gam[i];
        double c = p.inv_2s;
        dar[i] = c * (br[i] * ki + bi[i] * kr) + ga * ar[i];
        dai[i] = -c * (br[i] * kr - bi[i] * ki) + ga * ai[i];
        dbr[i] = c * (ai[i] * kr - ar[i] * ki) + gb * br[i];
        dbi[i] = -c * (ar[i] * kr + ai[i] * ki) + gb * bi[i];
        double sn = std::sqrt(p.gam[i] * 0.5 * p.dt);
        amp_a[i] = sn * std::sqrt(nb);
        amp_b[i] = sn * std::sqrt(na);
    }
}

void fill_bond_arrays(const TwaStepParams& p, double* jl, double* jr) {
    const int n = p.n;
    for (int i = 0; i < n; ++i) {
        jl[i] = (i == 0) ? (p.periodic ? p.j_right[n - 1] : 0.0) : p.j_right[i - 1];
        jr[i] = (i == n - 1 && !p.periodic) ? 0.0 : p.j_right[i];
    }
}

void axpy_update(int n, double* y, double dt, const double* d, double w, const double* amp,
                 const double* z) {
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vw = _mm256_set1_pd(w);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(vdt, _mm256_loadu_pd(d + i), vy);
        __m256d nz = _mm256_mul_pd(vw, _mm256_mul_pd(_mm256_loadu_pd(amp + i), _mm256_loadu_pd(z + i)));
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, nz));
    }
    for (; i < n; ++i) y[i] += dt * d[i] + w * amp[i] * z[i];
}

} // namespace

void step_em_avx2(const TwaStepParams& p, TwaState& s, const double* noise, double* work) {
    const int n = p.n;
    double* dar = work + 2 * (n + 2);
    double* dai = dar + n;
    double* dbr = dai + n;
    double* dbi = dbr + n;
    double* amp_a = dbi + n;
    double* amp_b = amp_a + n;
    double* jl = amp_b + n;
    double* jr = jl + n;
    fill_bond_arrays(p, jl, jr);
    drift_avx2(p, s.ar, s.ai, s.br, s.bi, dar, dai, dbr, dbi, amp_a, amp_b, work, jl, jr);
    const double w = p.add_noise ? 1.0 : 0.0;
    axpy_update(n, s.ar, p.dt, dar, w, amp_a, noise);
    axpy_update(n, s.ai, p.dt, dai, w, amp_a, noise + n);
    axpy_update(n, s.br, p.dt, dbr, w, amp_b, noise + 2 * n);
    axpy_update(n, s.bi, p.dt, dbi, w, amp_b, noise + 3 * n);
}

void step_heun_avx2(const TwaStepParams& p, TwaState& s, const double* noise, double* work) {
    const int n = p.n;
    double* dar = work + 2 * (n + 2);
    double* dai = dar + n;
    double* dbr = dai + n;
    double* dbi = dbr + n;
    double* amp_a = dbi + n;
    double* amp_b = amp_a + n;
    double* par = amp_b + n;
    double* pai = par + n;
    double* pbr = pai + n;
    double* pbi = pbr + n;
    double* ear = pbi + n;
    double* eai = ear + n;
    double* ebr = eai + n;
    double* ebi = ebr + n;
    double* amp_a2 = ebi + n;
    double* amp_b2 = amp_a2 + n;
    double* jl = amp_b2 + n;
    double* jr = jl + n;
    fill_bond_arrays(p, jl, jr);

    drift_avx2(p, s.ar, s.ai, s.br, s.bi, dar, dai, dbr, dbi, amp_a, amp_b, work, jl, jr);
    const double w = p.add_noise ? 1.0 : 0.0;
    const double* zar = noise;
    const double* zai = noise + n;
    const double* zbr = noise + 2 * n;
    const double* zbi = noise + 3 * n;
    for (int i = 0; i < n; ++i) {
        par[i] = s.ar[i] + p.dt * dar[i] + w * amp_a[i] * zar[i];
        pai[i] = s.ai[i] + p.dt * dai[i] + w * amp_a[i] * zai[i];
        pbr[i] = s.br[i] + p.dt * dbr[i] + w * amp_b[i] * zbr[i];
        pbi[i] = s.bi[i] + p.dt * dbi[i] + w * amp_b[i] * zbi[i];
    }
    drift_avx2(p, par, pai, pbr, pbi, ear, eai, ebr, ebi, amp_a2, amp_b2, work, jl, jr);
    for (int i = 0; i < n; ++i) {
        s.ar[i] += 0.5 * p.dt * (dar[i] + ear[i]) + 0.5 * w * (amp_a[i] + amp_a2[i]) * zar[i];
        s.ai[i] += 0.5 * p.dt * (dai[i] + eai[i]) + 0.5 * w * (amp_a[i] + amp_a2[i]) * zai[i];
        s.br[i] += 0.5 * p.dt * (dbr[i] + ebr[i]) + 0.5 * w * (amp_b[i] + amp_b2[i]) * zbr[i];
        s.bi[i] += 0.5 * p.dt * (dbi[i] + ebi[i]) + 0.5 * w * (amp_b[i] + amp_b2[i]) * zbi[i];
    }
}

} // namespace spinlab::kernels
