#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinlab/models.hpp"
#include "spinlab/types.hpp"

namespace spinlab {

// Vectorized Lindblad generator under the column-stacking convention
// vec(A X B) = (B^T (x) A) vec(X). Trace preservation shows up as
// vec(1)^dag L = 0.
struct Superoperator {
    long dim = 0; // Hilbert dimension d; matrix is d^2 x d^2
    SpMatC matrix;

    long super_dim() const { return matrix.rows(); }
    double inf_norm() const;
};

struct SteadyState {
    MatC rho;
    double residual = 0.0; // ||L vec(rho)||_2
    bool from_fallback = false;
};

struct SpectrumResult {
    std::vector<cplx> eigenvalues; // ascending |Re|
    double gap = 0.0;              // min over nonzero modes of -Re(lambda)
    int count_near_zero(double tol) const;
};

enum class SpectrumStrategy { Dense, ShiftInvert, SectorDense };

Superoperator vectorize(const ModelOperators& model);

// Bordered solve {L x = 0, tr x = 1}: one redundant row of L is replaced by
// the trace constraint. Falls back to long-time propagation when the
// factorization fails. If mz_diag is given and L is block diagonal in the
// M_z-difference sectors, the solve is restricted to the zero-difference
// block (exact, same bordered system).
SteadyState steady_state(const Superoperator& L,
                         const std::optional<VecR>& mz_diag = std::nullopt);

// k eigenvalues of smallest |Re|. Dense diagonalizes the full superoperator
// (permitted up to super_dim 4e4, practical well below); ShiftInvert runs
// Arnoldi on (L - sigma)^{-1} with sigma = 1e-6 * ||L||; SectorDense requires
// mz_diag and diagonalizes each M_z-difference block exactly.
SpectrumResult spectrum(const Superoperator& L, int k, SpectrumStrategy strategy,
                        const std::optional<VecR>& mz_diag = std::nullopt);

// Diagonal of the total-S^z operator per Hilbert basis state, used for
// sector splitting of chain Liouvillians.
VecR chain_mz_diagonal(const ChainSpec& spec);

struct ChainObservables {
    std::vector<double> sx, sy, sz; // per site, ordering (a,1),(b,1),...
    double mz_order = 0.0;          // <M_z>/(2S)
    double purity = 0.0;
    double impurity = 0.0;
    MatR joint_pmf; // P(m_a, m_b) for the dimer; empty otherwise
};

struct KerrObservables {
    double n_mean = 0.0;
    double purity = 0.0;
    VecR pn;
};

ChainObservables chain_observables(const SteadyState& state, const ChainSpec& spec);
KerrObservables kerr_observables(const SteadyState& state, const KerrSpec& spec);

// Dense RK4 propagation of rho under the model generator (test oracle and
// steady-state fallback).
MatC propagate_dense(const ModelOperators& model, const MatC& rho0, double t, int steps);

} // namespace spinlab
