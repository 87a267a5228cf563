#pragma once

#include <vector>

#include "spinlab/types.hpp"

namespace spinlab {

// Ladder and z operators for a single spin-S site, dim = 2S+1.
// Basis ordering is m = S, S-1, ..., -S (index 0 is the fully polarized
// up state), so s_z = diag(S, S-1, ..., -S).
struct SpinMatrices {
    double s = 0.0;
    int dim = 0;
    MatC s_plus;
    MatC s_minus;
    MatC s_z;

    MatC s_x() const { return 0.5 * (s_plus + s_minus); }
    MatC s_y() const { return -0.5 * I_UNIT * (s_plus - s_minus); }
};

// Truncated bosonic mode, Fock states |0..cutoff|.
struct BosonMatrices {
    int cutoff = 0;
    MatC a;
    MatC a_dag;
    MatC number() const { return a_dag * a; }
};

// Ordered list of local dimensions; site ordering is fixed globally as
// (a,1),(b,1),(a,2),(b,2),...
struct ProductSpace {
    std::vector<int> site_dims;
    long total_dim = 1;

    explicit ProductSpace(std::vector<int> dims);
    int n_sites() const { return static_cast<int>(site_dims.size()); }
};

// s must be a non-negative half-integer.
SpinMatrices build_spin_operators(double s);

BosonMatrices build_boson_operators(int cutoff);

// Kronecker embedding of a local operator at `site`; identity elsewhere.
// Site 0 is the leftmost (slowest-varying) tensor factor.
SpMatC embed(const MatC& op, int site, const ProductSpace& space);
SpMatC embed(const SpMatC& op, int site, const ProductSpace& space);

// SU(2) coherent state |theta, phi> with <s_z> = S cos(theta).
// Amplitudes are evaluated in log space so that large S stays finite.
VecC spin_coherent_state(double s, double theta, double phi);

} // namespace spinlab
