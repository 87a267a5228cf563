#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spinlab/kernels/twa_step.hpp"
#include "spinlab/models.hpp"
#include "spinlab/types.hpp"

namespace spinlab {

// Chain parameters for the stochastic engine; unlike ChainSpec there is no
// Hilbert-space budget, S only sets field scales and 1/(2S) rates.
struct TwaChainParams {
    int n_cells = 1;
    double s = 1.0;
    double g = 1.0;
    double h = 0.0;
    double gamma_g = 0.0;
    double gamma_l = 0.0;
    Boundary boundary = Boundary::Periodic;

    int n_spins() const { return 2 * n_cells; }
};

// Drift/diffusion specification produced from the chain parameters. The
// drift is the c-number limit of the adjoint Heisenberg flow under the
// Schwinger mapping; the retained diffusion is the diagonal-positive
// gain/loss part, sqrt(gam)|beta| on alpha and sqrt(gam)|alpha| on beta.
struct SdeSpec {
    TwaChainParams chain;
    std::vector<double> j_right; // bond strengths, site i -> i+1
    std::vector<double> gam;     // Gamma/(2S) per site
    std::vector<double> sgam;    // +gam gain sites, -gam loss sites
    bool periodic = true;

    kernels::TwaStepParams step_params(double dt, bool with_noise) const;
};

SdeSpec derive_sde(const TwaChainParams& chain);

// One trajectory of Schwinger fields, SoA layout.
struct SchwingerField {
    std::vector<double> ar, ai, br, bi;
    int n_spins() const { return static_cast<int>(ar.size()); }
    double weight(int i) const {
        return ar[i] * ar[i] + ai[i] * ai[i] + br[i] * br[i] + bi[i] * bi[i];
    }
};

// Deterministic per-trajectory stream: (master seed, trajectory index).
struct GaussianRng {
    explicit GaussianRng(std::uint64_t seed);
    double next();

  private:
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
    std::uint64_t next_u64();
};

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

// Per-spin orientations (theta, phi); one entry is broadcast to all spins.
struct InitialSpec {
    std::vector<std::pair<double, double>> angles;
};

// Gaussian Wigner sampling of a coherent product state: each mode gets a
// complex normal of variance 1/2 around sqrt(2S)(cos(theta/2),
// sin(theta/2) e^{i phi}).
SchwingerField sample_initial(const InitialSpec& spec, double s, GaussianRng& rng, int n_spins);

struct TwaConfig {
    TwaChainParams chain;
    int n_traj = 100;
    double dt = 0.01;
    double t_max = 10.0;
    std::uint64_t seed = 1;
    kernels::Scheme scheme = kernels::Scheme::StochasticHeun;
    bool noise_enabled = true;
    double save_interval = 0.1;
    int n_threads = 1;
    bool collect_correlators = false;
    int max_separation = 0; // 0 -> N/2
    double divergence_factor = 100.0;
    double exclusion_budget = 0.01;

    void validate() const;
};

struct ObservableSeries {
    std::vector<double> t;
    // ensemble mean and standard error per save time
    std::vector<double> sz_a, sz_a_err;
    std::vector<double> sz_b, sz_b_err;
    std::vector<double> var_sz_a, var_sz_b; // per-site (Delta S^z)^2
    std::vector<double> sx_a, sy_a;
    std::vector<double> s_perp, s_perp_err;
    // |<S+_{a,n} S-_{a,m}>| by separation, ensemble mean per save time
    std::vector<std::vector<cplx>> corr_aa;
    int n_trajectories = 0;
    int n_excluded = 0;
};

ObservableSeries run_ensemble(const TwaConfig& config, const InitialSpec& initial);

struct CorrelationFit {
    double xi = 0.0;
    double r_squared = 0.0;
    double amplitude = 0.0;
    int n_points = 0;
};

// Least-squares exponential fit of the steady-window correlator over
// separations 1..N/4. Throws if the profile is not exponential (R^2 < 0.9)
// or the window has not reached the steady state.
CorrelationFit correlation_fit(const ObservableSeries& series, double window_fraction = 0.25);

struct RestorationTime {
    double tau = 0.0;
    double err_low = 0.0;
    double err_high = 0.0;
    bool censored = false;
};

// First time the ensemble transverse polarization falls below 10% of its
// initial value; bootstrap resampling over trajectories gives the error bar.
RestorationTime symmetry_restoration_time(const TwaConfig& config, const InitialSpec& initial);

// Per-sample Ito rate of S^z_a site averages (drift plus kept-diffusion
// feed); used by the short-time moment oracle.
double sz_site_rate(const SdeSpec& sde, const SchwingerField& f, int site);

} // namespace spinlab
