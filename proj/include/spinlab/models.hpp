#pragma once

#include <string>
#include <vector>

#include "spinlab/spin_core.hpp"
#include "spinlab/types.hpp"

namespace spinlab {

enum class Boundary { Open, Periodic };

// Gain/loss spin chain of N unit cells, two spin-S sites per cell.
// All rates are in units of the intra-cell coupling unless stated otherwise.
struct ChainSpec {
    int n_cells = 1;
    double s = 0.5;
    double g = 1.0;
    double h = 0.0;
    double gamma_g = 0.0;
    double gamma_l = 0.0;
    Boundary boundary = Boundary::Open;

    void validate() const;
    int n_sites() const { return 2 * n_cells; }
    int local_dim() const { return static_cast<int>(std::lround(2.0 * s)) + 1; }
    long hilbert_dim() const;
};

// Driven dissipative Kerr oscillator; D plays the role of system size.
struct KerrSpec {
    double delta = 0.0;
    double u = 0.0;
    double f = 0.0;
    double gamma = 1.0;
    double d = 1.0;
    int cutoff = 0; // 0 -> default 4*d

    void validate() const;
    int effective_cutoff() const;
};

// Hamiltonian plus weighted jump operators. The dissipator convention is
//   D[J] rho = 2 J rho J^dag - J^dag J rho - rho J^dag J,
// and the generator is  rho_dot = -i[H,rho] + sum_k rate_k D[J_k] rho.
struct ModelOperators {
    SpMatC hamiltonian;
    std::vector<std::pair<double, SpMatC>> jumps;
    long dim() const { return hamiltonian.rows(); }
};

// Memory guard for exact builds; superoperators grow as dim^2.
inline constexpr long kMaxHilbertDim = 2500;

ModelOperators build_chain(const ChainSpec& spec);
ModelOperators build_kerr(const KerrSpec& spec);

// Total magnetization sum_n (S^z_{a,n} + S^z_{b,n}) on the chain Hilbert space.
SpMatC chain_total_sz(const ChainSpec& spec);

// Per-site spin operators embedded in the chain space; site indices follow
// the global (a,1),(b,1),(a,2),... ordering.
SpMatC chain_site_op(const ChainSpec& spec, int site, const MatC& local_op);

ProductSpace chain_space(const ChainSpec& spec);

} // namespace spinlab
