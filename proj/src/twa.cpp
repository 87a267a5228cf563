#include "spinlab/twa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace spinlab {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

GaussianRng::GaussianRng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t GaussianRng::next_u64() {
    // xoshiro256++
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double GaussianRng::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller on (0,1] uniforms; implementation-defined stdlib
    // distributions are avoided so streams are reproducible everywhere.
    double u1 = 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    has_cached_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0xA5A5A5A55A5A5A5AULL + index * 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

SdeSpec derive_sde(const TwaChainParams& chain) {
    if (chain.n_cells < 1) throw std::invalid_argument("derive_sde: n_cells must be >= 1");
    if (chain.s <= 0.0) throw std::invalid_argument("derive_sde: s must be positive");
    SdeSpec out;
    out.chain = chain;
    out.periodic = chain.boundary == Boundary::Periodic;
    int n = chain.n_spins();
    out.j_right.resize(n);
    out.gam.resize(n);
    out.sgam.resize(n);
    double inv_2s = 1.0 / (2.0 * chain.s);
    for (int i = 0; i < n; ++i) {
        bool a_site = (i % 2 == 0);
        out.j_right[i] = a_site ? chain.g : chain.h; // a-b intra bond g, b-a inter bond h
        double rate = (a_site ? chain.gamma_g : chain.gamma_l) * inv_2s;
        out.gam[i] = rate;
        out.sgam[i] = a_site ? rate : -rate;
    }
    return out;
}

kernels::TwaStepParams SdeSpec::step_params(double dt, bool with_noise) const {
    kernels::TwaStepParams p;
    p.n = chain.n_spins();
    p.inv_2s = 1.0 / (2.0 * chain.s);
    p.dt = dt;
    p.periodic = periodic ? 1 : 0;
    p.j_right = j_right.data();
    p.gam = gam.data();
    p.sgam = sgam.data();
    p.add_noise = with_noise ? 1 : 0;
    return p;
}

SchwingerField sample_initial(const InitialSpec& spec, double s, GaussianRng& rng, int n_spins) {
    if (spec.angles.empty()) throw std::invalid_argument("sample_initial: no orientations given");
    SchwingerField f;
    f.ar.resize(n_spins);
    f.ai.resize(n_spins);
    f.br.resize(n_spins);
    f.bi.resize(n_spins);
    double amp = std::sqrt(2.0 * s);
    for (int i = 0; i < n_spins; ++i) {
        auto [theta, phi] = spec.angles.size() == 1 ? spec.angles[0] : spec.angles.at(i);
        double ma = amp * std::cos(theta / 2.0);
        double mb_r = amp * std::sin(theta / 2.0) * std::cos(phi);
        double mb_i = amp * std::sin(theta / 2.0) * std::sin(phi);
        f.ar[i] = ma + 0.5 * rng.next();
        f.ai[i] = 0.0 + 0.5 * rng.next();
        f.br[i] = mb_r + 0.5 * rng.next();
        f.bi[i] = mb_i + 0.5 * rng.next();
    }
    return f;
}

void TwaConfig::validate() const {
    if (n_traj < 100) throw std::invalid_argument("TwaConfig: n_traj must be >= 100");
    if (dt <= 0.0 || t_max <= 0.0) throw std::invalid_argument("TwaConfig: dt and t_max must be positive");
    double fastest = std::max({chain.g + chain.h, chain.gamma_g, chain.gamma_l});
    if (dt * fastest >= 0.05)
        throw std::invalid_argument("TwaConfig: dt too large; require dt*max(g+h, Gg, Gl) < 0.05");
    if (save_interval < dt) throw std::invalid_argument("TwaConfig: save_interval must be >= dt");
    if (n_threads < 1) throw std::invalid_argument("TwaConfig: n_threads must be >= 1");
}

namespace {

// Weyl symbol of (S^z)^2 at one site: [n_a^2 - n_a - 2(n_a-1/2)(n_b-1/2)
// + n_b^2 - n_b]/4.
double szsq_symbol(double na, double nb) {
    return (na * na - na - 2.0 * (na - 0.5) * (nb - 0.5) + nb * nb - nb) / 4.0;
}

struct RawEnsemble {
    std::vector<double> t;
    int n_traj = 0;
    int n_cells = 0;
    int n_sep = 0;
    // [traj * n_times + time]
    std::vector<double> sz_a, sz_b, szsq_a, szsq_b, sx_a, sy_a;
    std::vector<cplx> corr; // [traj][time][sep] flattened, optional
    std::vector<char> excluded;

    size_t idx(int traj, int time) const { return static_cast<size_t>(traj) * t.size() + time; }
};

RawEnsemble run_raw(const TwaConfig& config, const InitialSpec& initial) {
    config.validate();
    SdeSpec sde = derive_sde(config.chain);
    const int n = config.chain.n_spins();
    const int n_cells = config.chain.n_cells;
    long n_steps = std::lround(config.t_max / config.dt);
    long stride = std::max(1L, std::lround(config.save_interval / config.dt));
    long n_times = n_steps / stride + 1;

    RawEnsemble raw;
    raw.n_traj = config.n_traj;
    raw.n_cells = n_cells;
    raw.t.resize(n_times);
    for (long k = 0; k < n_times; ++k) raw.t[k] = static_cast<double>(k * stride) * config.dt;
    size_t total = static_cast<size_t>(config.n_traj) * n_times;
    raw.sz_a.assign(total, 0.0);
    raw.sz_b.assign(total, 0.0);
    raw.szsq_a.assign(total, 0.0);
    raw.szsq_b.assign(total, 0.0);
    raw.sx_a.assign(total, 0.0);
    raw.sy_a.assign(total, 0.0);
    raw.excluded.assign(config.n_traj, 0);
    raw.n_sep = 0;
    if (config.collect_correlators && n_cells > 1) {
        raw.n_sep = config.max_separation > 0 ? config.max_separation : n_cells / 2;
        raw.n_sep = std::min(raw.n_sep, n_cells - 1);
        raw.corr.assign(total * raw.n_sep, cplx(0.0, 0.0));
    }

    kernels::StepFn step = kernels::select_step_fn(config.scheme);
    double div_threshold = config.divergence_factor * (2.0 * config.chain.s + 1.0);

    auto worker = [&](std::atomic<int>& counter) {
        std::vector<double> work(kernels::work_size(n));
        std::vector<double> noise(4 * n);
        kernels::TwaStepParams params = sde.step_params(config.dt, config.noise_enabled);
        while (true) {
            int traj = counter.fetch_add(1);
            if (traj >= config.n_traj) break;
            GaussianRng rng(trajectory_seed(config.seed, traj));
            SchwingerField f = sample_initial(initial, config.chain.s, rng, n);
            kernels::TwaState st{f.ar.data(), f.ai.data(), f.br.data(), f.bi.data()};
            bool diverged = false;
            long save_slot = 0;
            for (long step_i = 0; step_i <= n_steps; ++step_i) {
                if (step_i % stride == 0) {
                    // record observables
                    size_t base = raw.idx(traj, save_slot);
                    double sza = 0, szb = 0, sqa = 0, sqb = 0, sxa = 0, sya = 0;
                    double wmax = 0;
                    for (int i = 0; i < n; ++i) {
                        double na = f.ar[i] * f.ar[i] + f.ai[i] * f.ai[i];
                        double nb = f.br[i] * f.br[i] + f.bi[i] * f.bi[i];
                        wmax = std::max(wmax, na + nb);
                        double sz = 0.5 * (na - nb);
                        double sq = szsq_symbol(na, nb);
                        if (i % 2 == 0) {
                            sza += sz;
                            sqa += sq;
                            sxa += f.ar[i] * f.br[i] + f.ai[i] * f.bi[i];
                            sya += f.ar[i] * f.bi[i] - f.ai[i] * f.br[i];
                        } else {
                            szb += sz;
                            sqb += sq;
                        }
                    }
                    raw.sz_a[base] = sza / n_cells;
                    raw.sz_b[base] = szb / n_cells;
                    raw.szsq_a[base] = sqa / n_cells;
                    raw.szsq_b[base] = sqb / n_cells;
                    raw.sx_a[base] = sxa / n_cells;
                    raw.sy_a[base] = sya / n_cells;
                    if (raw.n_sep > 0) {
                        // Q_n = conj(alpha) beta on the a-site of cell n
                        for (int s = 1; s <= raw.n_sep; ++s) {
                            cplx acc(0.0, 0.0);
                            int pairs = 0;
                            for (int cell = 0; cell < n_cells; ++cell) {
                                int other = cell + s;
                                if (other >= n_cells) {
                                    if (!sde.periodic) break;
                                    other -= n_cells;
                                }
                                int i = 2 * cell, j = 2 * other;
                                cplx qi(f.ar[i] * f.br[i] + f.ai[i] * f.bi[i],
                                        f.ar[i] * f.bi[i] - f.ai[i] * f.br[i]);
                                cplx qj(f.ar[j] * f.br[j] + f.ai[j] * f.bi[j],
                                        f.ar[j] * f.bi[j] - f.ai[j] * f.br[j]);
                                acc += qi * std::conj(qj);
                                ++pairs;
                            }
                            raw.corr[base * raw.n_sep + (s - 1)] =
                                pairs > 0 ? acc / static_cast<double>(pairs) : cplx(0.0, 0.0);
                        }
                    }
                    if (wmax > div_threshold) {
                        diverged = true;
                        break;
                    }
                    ++save_slot;
                }
                if (step_i == n_steps) break;
                if (config.noise_enabled)
                    for (int i = 0; i < 4 * n; ++i) noise[i] = rng.next();
                step(params, st, noise.data(), work.data());
            }
            if (diverged) raw.excluded[traj] = 1;
        }
    };

    std::atomic<int> counter{0};
    if (config.n_threads == 1) {
        worker(counter);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < config.n_threads; ++t) pool.emplace_back([&] { worker(counter); });
        for (auto& th : pool) th.join();
    }

    int n_excluded = 0;
    for (char e : raw.excluded) n_excluded += e;
    if (n_excluded > config.exclusion_budget * config.n_traj)
        throw std::runtime_error("run_ensemble: " + std::to_string(n_excluded) +
                                 " divergent trajectories exceed the exclusion budget; "
                                 "reduce dt or check parameters");
    return raw;
}

} // namespace

ObservableSeries run_ensemble(const TwaConfig& config, const InitialSpec& initial) {
    RawEnsemble raw = run_raw(config, initial);
    long n_times = static_cast<long>(raw.t.size());
    ObservableSeries out;
    out.t = raw.t;
    out.n_trajectories = config.n_traj;
    for (char e : raw.excluded) out.n_excluded += e;
    int n_inc = config.n_traj - out.n_excluded;
    if (n_inc < 2) throw std::runtime_error("run_ensemble: fewer than 2 surviving trajectories");

    auto reduce = [&](const std::vector<double>& field, std::vector<double>& mean,
                      std::vector<double>* err) {
        mean.assign(n_times, 0.0);
        if (err) err->assign(n_times, 0.0);
        for (long k = 0; k < n_times; ++k) {
            double acc = 0.0;
            for (int tr = 0; tr < raw.n_traj; ++tr)
                if (!raw.excluded[tr]) acc += field[raw.idx(tr, k)];
            double m = acc / n_inc;
            mean[k] = m;
            if (err) {
                double var = 0.0;
                for (int tr = 0; tr < raw.n_traj; ++tr)
                    if (!raw.excluded[tr]) {
                        double d = field[raw.idx(tr, k)] - m;
                        var += d * d;
                    }
                (*err)[k] = std::sqrt(var / (n_inc - 1.0) / n_inc);
            }
        }
    };

    std::vector<double> szsq_a_mean, szsq_b_mean;
    reduce(raw.sz_a, out.sz_a, &out.sz_a_err);
    reduce(raw.sz_b, out.sz_b, &out.sz_b_err);
    reduce(raw.szsq_a, szsq_a_mean, nullptr);
    reduce(raw.szsq_b, szsq_b_mean, nullptr);
    std::vector<double> sx_err, sy_err;
    reduce(raw.sx_a, out.sx_a, &sx_err);
    reduce(raw.sy_a, out.sy_a, &sy_err);

    out.var_sz_a.resize(n_times);
    out.var_sz_b.resize(n_times);
    out.s_perp.resize(n_times);
    out.s_perp_err.resize(n_times);
    for (long k = 0; k < n_times; ++k) {
        out.var_sz_a[k] = szsq_a_mean[k] - out.sz_a[k] * out.sz_a[k];
        out.var_sz_b[k] = szsq_b_mean[k] - out.sz_b[k] * out.sz_b[k];
        double sp = std::hypot(out.sx_a[k], out.sy_a[k]);
        out.s_perp[k] = sp;
        if (sp > 1e-300) {
            out.s_perp_err[k] = std::sqrt(std::pow(out.sx_a[k] * sx_err[k], 2) +
                                          std::pow(out.sy_a[k] * sy_err[k], 2)) / sp;
        } else {
            out.s_perp_err[k] = std::hypot(sx_err[k], sy_err[k]);
        }
    }

    if (raw.n_sep > 0) {
        out.corr_aa.assign(n_times, std::vector<cplx>(raw.n_sep, cplx(0.0, 0.0)));
        for (long k = 0; k < n_times; ++k)
            for (int s = 0; s < raw.n_sep; ++s) {
                cplx acc(0.0, 0.0);
                for (int tr = 0; tr < raw.n_traj; ++tr)
                    if (!raw.excluded[tr]) acc += raw.corr[raw.idx(tr, k) * raw.n_sep + s];
                out.corr_aa[k][s] = acc / static_cast<double>(n_inc);
            }
    }
    return out;
}

CorrelationFit correlation_fit(const ObservableSeries& series, double window_fraction) {
    if (series.corr_aa.empty())
        throw std::invalid_argument("correlation_fit: series has no correlators");
    long n_times = static_cast<long>(series.t.size());
    long w0 = static_cast<long>(std::floor(n_times * (1.0 - window_fraction)));
    w0 = std::clamp(w0, 0L, n_times - 1);

    // steady-window check: drift of the mean below its standard error
    long mid = (w0 + n_times - 1) / 2;
    double drift = std::abs(series.sz_a[n_times - 1] - series.sz_a[mid]);
    double err_scale = 2.0 * (series.sz_a_err[n_times - 1] + series.sz_a_err[mid]) + 1e-12;
    if (drift > std::max(err_scale, 1e-6 * std::abs(series.sz_a[n_times - 1])))
        throw std::runtime_error("correlation_fit: steady-state window not reached (mean still drifting)");

    int n_sep = static_cast<int>(series.corr_aa[0].size());
    std::vector<double> c(n_sep, 0.0);
    for (long k = w0; k < n_times; ++k)
        for (int s = 0; s < n_sep; ++s) c[s] += std::abs(series.corr_aa[k][s]);
    for (double& v : c) v /= static_cast<double>(n_times - w0);

    CorrelationFit fit;
    int max_s = n_sep;
    // fit window 1..N/4: n_sep was built up to N/2
    max_s = std::max(2, std::min(n_sep, (n_sep + 1) / 2));
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    for (int s = 1; s <= max_s; ++s) {
        double v = c[s - 1];
        if (v <= 0.0) break;
        double x = s, y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        ++m;
    }
    if (m < 3) throw std::runtime_error("correlation_fit: not enough usable separations");
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / m;
    double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    for (int s = 1; s <= m; ++s) {
        double y = std::log(c[s - 1]);
        double d = y - (intercept + slope * s);
        ss_res += d * d;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.n_points = m;
    fit.amplitude = std::exp(intercept);
    if (slope >= 0.0)
        throw std::runtime_error("correlation_fit: correlator does not decay");
    fit.xi = -1.0 / slope;
    if (fit.r_squared < 0.9)
        throw std::runtime_error("correlation_fit: non-exponential profile (R^2 = " +
                                 std::to_string(fit.r_squared) + ")");
    return fit;
}

RestorationTime symmetry_restoration_time(const TwaConfig& config, const InitialSpec& initial) {
    RawEnsemble raw = run_raw(config, initial);
    long n_times = static_cast<long>(raw.t.size());
    int n_inc = 0;
    for (char e : raw.excluded) n_inc += (e == 0);
    if (n_inc < 2) throw std::runtime_error("symmetry_restoration_time: no surviving trajectories");

    auto tau_of = [&](const std::vector<int>& traj_set) {
        double tau = raw.t.back();
        bool crossed = false;
        double s0 = 0.0;
        for (long k = 0; k < n_times; ++k) {
            double sx = 0, sy = 0;
            for (int tr : traj_set) {
                sx += raw.sx_a[raw.idx(tr, k)];
                sy += raw.sy_a[raw.idx(tr, k)];
            }
            double sp = std::hypot(sx, sy) / traj_set.size();
            if (k == 0) {
                s0 = sp;
                continue;
            }
            if (!crossed && sp < 0.1 * s0) {
                tau = raw.t[k];
                crossed = true;
                break;
            }
        }
        return std::make_pair(tau, crossed);
    };

    std::vector<int> all;
    for (int tr = 0; tr < raw.n_traj; ++tr)
        if (!raw.excluded[tr]) all.push_back(tr);
    auto [tau, crossed] = tau_of(all);

    RestorationTime out;
    out.tau = tau;
    out.censored = !crossed;
    // bootstrap over trajectories
    const int n_boot = 200;
    std::vector<double> taus;
    GaussianRng rng(trajectory_seed(config.seed, 0xB007ULL));
    for (int b = 0; b < n_boot; ++b) {
        std::vector<int> sample(all.size());
        for (size_t i = 0; i < all.size(); ++i) {
            double u = 0.5 * (1.0 + std::erf(rng.next() / std::sqrt(2.0)));
            size_t j = std::min(all.size() - 1, static_cast<size_t>(u * all.size()));
            sample[i] = all[j];
        }
        taus.push_back(tau_of(sample).first);
    }
    std::sort(taus.begin(), taus.end());
    out.err_low = tau - taus[static_cast<size_t>(0.16 * n_boot)];
    out.err_high = taus[static_cast<size_t>(0.84 * n_boot)] - tau;
    return out;
}

double sz_site_rate(const SdeSpec& sde, const SchwingerField& f, int site) {
    int n = f.n_spins();
    auto p_of = [&](int j) {
        return cplx(f.ar[j] * f.br[j] + f.ai[j] * f.bi[j], f.ai[j] * f.br[j] - f.ar[j] * f.bi[j]);
    };
    int i = site;
    double jl = (i == 0) ? (sde.periodic ? sde.j_right[n - 1] : 0.0) : sde.j_right[i - 1];
    double jr = (i == n - 1 && !sde.periodic) ? 0.0 : sde.j_right[i];
    cplx k(0.0, 0.0);
    if (jl != 0.0) k += jl * p_of((i - 1 + n) % n);
    if (jr != 0.0) k += jr * p_of((i + 1) % n);
    cplx alpha(f.ar[i], f.ai[i]), beta(f.br[i], f.bi[i]);
    double na = std::norm(alpha), nb = std::norm(beta);
    double c = 1.0 / (2.0 * sde.chain.s);
    cplx da = -I_UNIT * c * beta * k + (sde.sgam[i] * nb - 0.5 * sde.gam[i]) * alpha;
    cplx db = -I_UNIT * c * alpha * std::conj(k) + (-sde.sgam[i] * na - 0.5 * sde.gam[i]) * beta;
    double drift = std::real(std::conj(alpha) * da) - std::real(std::conj(beta) * db);
    double diffusion = 0.5 * (sde.gam[i] * nb - sde.gam[i] * na);
    return drift + diffusion;
}

} // namespace spinlab
