#include <doctest.h>

#include <cmath>

#include "spinlab/liouville.hpp"
#include "spinlab/models.hpp"

using namespace spinlab;

namespace {

ChainSpec dimer(double s, double gamma_g, double gamma_l, double g = 1.0) {
    ChainSpec spec;
    spec.n_cells = 1;
    spec.s = s;
    spec.g = g;
    spec.h = 0.0;
    spec.gamma_g = gamma_g;
    spec.gamma_l = gamma_l;
    spec.boundary = Boundary::Open;
    return spec;
}

} // namespace

TEST_CASE("spin-1/2 dimer Hamiltonian has two unit off-diagonal entries") {
    ModelOperators m = build_chain(dimer(0.5, 0.0, 0.0));
    MatC h = MatC(m.hamiltonian);
    int nonzero = 0;
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j)
            if (i != j && std::abs(h(i, j)) > 1e-14) {
                ++nonzero;
                CHECK(std::abs(h(i, j)) == doctest::Approx(1.0));
            }
    CHECK(nonzero == 2);
    CHECK(h.diagonal().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("chain Hamiltonians are Hermitian") {
    for (double s : {0.5, 1.0, 2.0}) {
        ChainSpec spec;
        spec.n_cells = 2;
        spec.s = s;
        spec.g = 1.0;
        spec.h = 0.4;
        spec.gamma_g = 0.7;
        spec.gamma_l = 0.2;
        spec.boundary = Boundary::Periodic;
        ModelOperators m = build_chain(spec);
        MatC h = MatC(m.hamiltonian);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("closed dimer propagation conserves total magnetization") {
    // S = 1 dimer, no dissipation, initial |m_a = -1, m_b = +1>
    ChainSpec spec = dimer(1.0, 0.0, 0.0);
    ModelOperators m = build_chain(spec);
    SpMatC mz = chain_total_sz(spec);
    MatC rho0 = MatC::Zero(9, 9);
    int idx = 2 * 3 + 0; // site a row m=-1, site b row m=+1
    rho0(idx, idx) = 1.0;
    double m0 = (MatC(mz) * rho0).trace().real();
    MatC rho_t = propagate_dense(m, rho0, 3.7, 600);
    double m1 = (MatC(mz) * rho_t).trace().real();
    CHECK(std::abs(rho_t.trace().real() - 1.0) < 1e-9);
    CHECK(std::abs(m1 - m0) < 1e-9);
    // the state actually evolves (the bond exchanges excitations)
    CHECK((rho_t - rho0).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("[H, M_z] = 0 for dimer and chain") {
    for (int n_cells : {1, 2}) {
        ChainSpec spec;
        spec.n_cells = n_cells;
        spec.s = 1.0;
        spec.g = 1.0;
        spec.h = n_cells > 1 ? 0.5 : 0.0;
        spec.gamma_g = 0.3;
        spec.gamma_l = 0.9;
        spec.boundary = n_cells > 1 ? Boundary::Periodic : Boundary::Open;
        ModelOperators m = build_chain(spec);
        SpMatC mz = chain_total_sz(spec);
        MatC comm = MatC(m.hamiltonian * mz) - MatC(mz * m.hamiltonian);
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("jump operators shift M_z by exactly +-1") {
    ChainSpec spec;
    spec.n_cells = 2;
    spec.s = 1.5;
    spec.g = 1.0;
    spec.h = 0.3;
    spec.gamma_g = 0.4;
    spec.gamma_l = 0.8;
    spec.boundary = Boundary::Periodic;
    ModelOperators m = build_chain(spec);
    SpMatC mz = chain_total_sz(spec);
    REQUIRE(m.jumps.size() == 4);
    for (size_t k = 0; k < m.jumps.size(); ++k) {
        const SpMatC& j = m.jumps[k].second;
        // gain jumps raise M_z, loss jumps lower it: [M_z, J] = +-J
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        MatC comm = MatC(mz * j) - MatC(j * mz);
        CHECK((comm - sign * MatC(j)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("PT map: sublattice swap plus jump conjugation preserves the dimer model") {
    ChainSpec spec = dimer(1.0, 0.7, 0.7);
    ModelOperators m = build_chain(spec);
    int d = 3;
    MatC p = MatC::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) p(b * d + a, a * d + b) = 1.0;
    MatC h_sw = p * MatC(m.hamiltonian) * p.adjoint();
    CHECK((h_sw - MatC(m.hamiltonian)).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(m.jumps.size() == 2);
    // under the swap, gain on a becomes the conjugate of loss on b
    MatC j_gain_swapped = p * MatC(m.jumps[0].second) * p.adjoint();
    MatC loss_conj = MatC(m.jumps[1].second).adjoint();
    CHECK((j_gain_swapped - loss_conj).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.jumps[0].first == doctest::Approx(m.jumps[1].first));
}

TEST_CASE("dimer with open boundary rejects h != 0") {
    ChainSpec spec = dimer(0.5, 0.1, 0.1);
    spec.h = 0.3;
    CHECK_THROWS_AS(build_chain(spec), std::invalid_argument);
}

TEST_CASE("budget guard names the offending dimension") {
    ChainSpec spec;
    spec.n_cells = 2;
    spec.s = 4.0;
    spec.g = 1.0;
    spec.h = 0.5;
    spec.boundary = Boundary::Periodic;
    CHECK_THROWS_WITH_AS(build_chain(spec), doctest::Contains("6561"), std::runtime_error);
}

TEST_CASE("Kerr vacuum is the exact steady state at F = 0") {
    KerrSpec spec;
    spec.delta = 2.0;
    spec.u = 1.0;
    spec.f = 0.0;
    spec.gamma = 1.0;
    spec.d = 2.0;
    ModelOperators m = build_kerr(spec);
    int dim = spec.effective_cutoff() + 1;
    MatC rho = MatC::Zero(dim, dim);
    rho(0, 0) = 1.0;
    Superoperator liou = vectorize(m);
    Eigen::Map<VecC> v(rho.data(), dim * dim);
    CHECK((liou.matrix * v).norm() < 1e-12);
}

TEST_CASE("linear cavity steady state matches <n> = 4 D F^2 / gamma^2") {
    KerrSpec spec;
    spec.delta = 0.0;
    spec.u = 0.0;
    spec.f = 0.1;
    spec.gamma = 1.0;
    spec.d = 4.0;
    spec.cutoff = 20;
    ModelOperators m = build_kerr(spec);
    Superoperator liou = vectorize(m);
    SteadyState ss = steady_state(liou);
    KerrObservables obs = kerr_observables(ss, spec);
    double expect = 4.0 * spec.d * spec.f * spec.f / (spec.gamma * spec.gamma);
    CHECK(obs.n_mean == doctest::Approx(expect).epsilon(1e-6));
    CHECK(obs.purity == doctest::Approx(1.0).epsilon(1e-8)); // driven cavity stays coherent
}

TEST_CASE("the Fig.-4-scale Kerr model builds at cutoff 200") {
    KerrSpec spec;
    spec.delta = 10.0;
    spec.u = 10.0;
    spec.f = 1.76;
    spec.gamma = 1.0;
    spec.d = 50.0;
    spec.cutoff = 200;
    ModelOperators m = build_kerr(spec);
    CHECK(m.dim() == 201);
    MatC h = MatC(m.hamiltonian);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Kerr cutoff below 4D is rejected") {
    KerrSpec spec;
    spec.gamma = 1.0;
    spec.d = 50.0;
    spec.cutoff = 100;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
