#pragma once

#include <optional>
#include <string>

#include "spinlab/types.hpp"

namespace spinlab {

// Steady-state phases of the gain/loss chain in the large-S limit.
// Boundaries: Gg*Gl = (g -+ h)^2 and the Gg = Gl ray below (g-h)^2.
enum class PhaseLabel { FM_UP, FM_DOWN, AM, PT, PPT, BOUNDARY };

std::string phase_name(PhaseLabel p);

PhaseLabel classify_phase(double gamma_g, double gamma_l, double g, double h);

// For BOUNDARY points: the pair of phases meeting there.
std::pair<PhaseLabel, PhaseLabel> boundary_pair(double gamma_g, double gamma_l, double g, double h);

// k-space occupations of the linearized (bosonic) steady state.
// FM phases are number conserving, so the cross moment is <c^dag_a c_b>;
// the AM phase pairs (a,k) with (b,-k) and the cross moment is <c_a c_b>.
struct KOccupations {
    double n_a = 0.0;
    double n_b = 0.0;
    cplx cross;
};

KOccupations occupations_k(double k, double gamma_g, double gamma_l, double g, double h,
                           PhaseLabel phase);

// Site magnetization offsets in excitation-number units:
// FM_UP:  <S^z_{a,b}> = S - n_{a,b};  FM_DOWN: <S^z_{a,b}> = -S + n_{a,b};
// AM:     <S^z_a> = S - n_a, <S^z_b> = -S + n_b.
struct MagnetizationOffsets {
    double n_a = 0.0;
    double n_b = 0.0;
};

MagnetizationOffsets magnetizations(double gamma_g, double gamma_l, double g, double h,
                                    PhaseLabel phase);

// Correlation length of <S+_{a,n} S-_{a,m}> in the AM phase: the correlator
// envelope decays as |lambda|^s with lambda = (GgGl - g^2 - h^2 - C)/(2gh),
// and xi = -1/ln|lambda|. The square-root asymptote near the AM|PPT boundary
// is exposed separately. fm = true evaluates the analogous FM-side envelope
// (alternating sign, same |lambda| structure).
struct CorrelationLength {
    double lambda = 0.0;
    double xi = 0.0;
    double xi_asymptotic = 0.0;
};

CorrelationLength correlation_length(double gamma_g, double gamma_l, double g, double h,
                                     bool fm_side = false);

// Symmetrized quadrature covariance, vacuum = identity. Dimer: 4x4 over
// (X1,X2) of mode a and (X3,X4) of mode b; lattice: 4x4 block at fixed k.
struct CovarianceMatrix {
    MatR v;
    double purity() const;     // 1/sqrt(det V)
    double negativity() const; // Gaussian log-neg proxy (1/eta - 1)/2, >= 0
    KOccupations occupations(PhaseLabel phase) const;
};

CovarianceMatrix covariance(double gamma_g, double gamma_l, double g, double h, PhaseLabel phase,
                            std::optional<double> k = std::nullopt);

// Printed closed forms (dimer, h = 0).
double purity_closed_form(double gamma_g, double gamma_l, double g, PhaseLabel phase);
// Negativity closed forms: 0 in the FM phases; g/(2*Gbar) on the PT line
// inside the AM phase.
double negativity_closed_form(double gamma_g, double gamma_l, double g, PhaseLabel phase);

// C = sqrt([(g-h)^2 - GgGl][(g+h)^2 - GgGl]), real inside each stability
// region with the bracket-wise branch.
double stability_c(double gamma_g, double gamma_l, double g, double h);

} // namespace spinlab
