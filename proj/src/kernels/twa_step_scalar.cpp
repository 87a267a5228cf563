#include "spinlab/kernels/twa_step.hpp"

#include <cmath>
#include <cstring>

namespace spinlab::kernels {

std::size_t work_size(int n) { return static_cast<std::size_t>(24 * (n + 2)); }

namespace {

// Drift and noise amplitudes at the given state.
//   dalpha = -i/(2S) beta K + (sgam |beta|^2 - gam/2) alpha
//   dbeta  = -i/(2S) alpha conj(K) + (-sgam |alpha|^2 - gam/2) beta
//   K_i = sum_j J_ij alpha_j conj(beta_j)
// Noise (Ito): dalpha += sqrt(gam dt/2) |beta| (z1 + i z2), dbeta likewise
// with |alpha|; amp arrays hold sqrt(gam dt/2)*|.|.
void drift_scalar(const TwaStepParams& p, const double* ar, const double* ai, const double* br,
                  const double* bi, double* dar, double* dai, double* dbr, double* dbi,
                  double* amp_a, double* amp_b, double* work) {
    const int n = p.n;
    double* pr = work;           // padded, index shifted by 1
    double* pi = work + (n + 2); // padded
    for (int i = 0; i < n; ++i) {
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
    const double c = p.inv_2s;
    const double half_dt = 0.5 * p.dt;
    for (int i = 0; i < n; ++i) {
        double jl = (i == 0) ? (p.periodic ? p.j_right[n - 1] : 0.0) : p.j_right[i - 1];
        double jr = (i == n - 1 && !p.periodic) ? 0.0 : p.j_right[i];
        double kr = jl * pr[i] + jr * pr[i + 2];
        double ki = jl * pi[i] + jr * pi[i + 2];
        double na = ar[i] * ar[i] + ai[i] * ai[i];
        double nb = br[i] * br[i] + bi[i] * bi[i];
        double ga = p.sgam[i] * nb - 0.5 * p.gam[i];
        double gb = -p.sgam[i] * na - 0.5 * p.gam[i];
        dar[i] = c * (br[i] * ki + bi[i] * kr) + ga * ar[i];
        dai[i] = -c * (br[i] * kr - bi[i] * ki) + ga * ai[i];
        dbr[i] = c * (ai[i] * kr - ar[i] * ki) + gb * br[i];
        dbi[i] = -c * (ar[i] * kr + ai[i] * ki) + gb * bi[i];
        double sn = std::sqrt(p.gam[i] * half_dt);
        amp_a[i] = sn * std::sqrt(nb);
        amp_b[i] = sn * std::sqrt(na);
    }
}

} // namespace

void step_em_scalar(const TwaStepParams& p, TwaState& s, const double* noise, double* work) {
    const int n = p.n;
    double* dar = work + 2 * (n + 2);
    double* dai = dar + n;
    double* dbr = dai + n;
    double* dbi = dbr + n;
    double* amp_a = dbi + n;
    double* amp_b = amp_a + n;
    drift_scalar(p, s.ar, s.ai, s.br, s.bi, dar, dai, dbr, dbi, amp_a, amp_b, work);
    const double* zar = noise;
    const double* zai = noise + n;
    const double* zbr = noise + 2 * n;
    const double* zbi = noise + 3 * n;
    const double dt = p.dt;
    const double w = p.add_noise ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) {
        s.ar[i] += dt * dar[i] + w * amp_a[i] * zar[i];
        s.ai[i] += dt * dai[i] + w * amp_a[i] * zai[i];
        s.br[i] += dt * dbr[i] + w * amp_b[i] * zbr[i];
        s.bi[i] += dt * dbi[i] + w * amp_b[i] * zbi[i];
    }
}

void step_heun_scalar(const TwaStepParams& p, TwaState& s, const double* noise, double* work) {
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

    drift_scalar(p, s.ar, s.ai, s.br, s.bi, dar, dai, dbr, dbi, amp_a, amp_b, work);
    const double* zar = noise;
    const double* zai = noise + n;
    const double* zbr = noise + 2 * n;
    const double* zbi = noise + 3 * n;
    const double dt = p.dt;
    const double w = p.add_noise ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i) {
        par[i] = s.ar[i] + dt * dar[i] + w * amp_a[i] * zar[i];
        pai[i] = s.ai[i] + dt * dai[i] + w * amp_a[i] * zai[i];
        pbr[i] = s.br[i] + dt * dbr[i] + w * amp_b[i] * zbr[i];
        pbi[i] = s.bi[i] + dt * dbi[i] + w * amp_b[i] * zbi[i];
    }
    drift_scalar(p, par, pai, pbr, pbi, ear, eai, ebr, ebi, amp_a2, amp_b2, work);
    for (int i = 0; i < n; ++i) {
        s.ar[i] += 0.5 * dt * (dar[i] + ear[i]) + 0.5 * w * (amp_a[i] + amp_a2[i]) * zar[i];
        s.ai[i] += 0.5 * dt * (dai[i] + eai[i]) + 0.5 * w * (amp_a[i] + amp_a2[i]) * zai[i];
        s.br[i] += 0.5 * dt * (dbr[i] + ebr[i]) + 0.5 * w * (amp_b[i] + amp_b2[i]) * zbr[i];
        s.bi[i] += 0.5 * dt * (dbi[i] + ebi[i]) + 0.5 * w * (amp_b[i] + amp_b2[i]) * zbi[i];
    }
}

} // namespace spinlab::kernels
