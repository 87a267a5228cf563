#pragma once

#include <array>
#include <vector>

#include "spinlab/types.hpp"

namespace spinlab {

struct MfParams {
    double s = 1.0;
    double g = 1.0;
    double h = 0.0;
    double gamma_g = 0.0;
    double gamma_l = 0.0;
};

// One unit cell under translational invariance:
// (Sx_a, Sy_a, Sz_a, Sx_b, Sy_b, Sz_b), components in units of hbar.
using MfState = std::array<double, 6>;

MfState mf_rhs(const MfState& state, const MfParams& params);
Eigen::Matrix<double, 6, 6> mf_jacobian(const MfState& state, const MfParams& params);

enum class MfClass { FixedPoint, LimitCycle, Undecided };

struct MfTrajectory {
    std::vector<double> t;
    std::vector<MfState> y;
    MfClass overall = MfClass::Undecided;
    MfClass sublattice_a = MfClass::Undecided;
    MfClass sublattice_b = MfClass::Undecided;
    double cycle_period_b = 0.0;   // recurrence period estimate when b cycles
    double time_avg_sz_b = 0.0;    // over the last 20% window
    double time_avg_sz_a = 0.0;
};

// Adaptive dormand-prince integration with limit-cycle detection via
// Poincare recurrence of the transverse components over the last 20%.
MfTrajectory integrate_mf(const MfState& initial, const MfParams& params, double t_max,
                          double rel_tol = 1e-9, double abs_tol = 1e-9);

struct CmfSpec {
    int n_c = 1;
    double s = 0.5;
    double g = 1.0;
    double h = 1.0;
    double gamma_g = 1.0;
    double gamma_l = 1.0;
    bool transformed = false; // single-site chain; requires Gg = Gl and h = g
    double tolerance = 1e-5;
    int max_windows = 400;
    double window = 4.0; // duration of one propagation window, units 1/g
    double dt = 0.02;

    void validate() const;
};

struct CmfResult {
    MatC rho_c;
    double s_perp = 0.0; // sqrt(<Sx>^2 + <Sy>^2) on the a-type edge sites
    std::vector<double> sx, sy, sz; // per cluster site
    bool converged = false;
    int windows_used = 0;
    double residual = 0.0; // windowed observable change at exit
};

// Self-consistent cluster mean field: the cluster master equation is
// propagated with boundary mean fields read from the instantaneous state;
// windows are iterated until successive windowed averages agree.
CmfResult cmf_solve(const CmfSpec& spec, double bias_tilt = 0.0);

} // namespace spinlab
