#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
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
    spec.gamma_g = gamma_g;
    spec.gamma_l = gamma_l;
    return spec;
}

VecC vec_identity(long d) {
    MatC id = MatC::Identity(d, d);
    return Eigen::Map<VecC>(id.data(), d * d);
}

} // namespace

TEST_CASE("decaying two-level system has eigenvalues {0, -g, -g, -2g}") {
    // H = 0, single jump c = |0><1| at rate gamma
    double gamma = 0.7;
    ModelOperators m;
    MatC c = MatC::Zero(2, 2);
    c(0, 1) = 1.0;
    m.hamiltonian = SpMatC(2, 2);
    m.jumps.emplace_back(gamma, c.sparseView());
    Superoperator liou = vectorize(m);
    Eigen::ComplexEigenSolver<MatC> es(MatC(liou.matrix));
    std::vector<double> re;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-12);
        re.push_back(es.eigenvalues()(i).real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0 * gamma));
    CHECK(re[1] == doctest::Approx(-gamma));
    CHECK(re[2] == doctest::Approx(-gamma));
    CHECK(std::abs(re[3]) < 1e-12);
}

TEST_CASE("trace preservation: vec(1)^dag L = 0") {
    ChainSpec spec = dimer(1.0, 0.8, 0.3);
    Superoperator liou = vectorize(build_chain(spec));
    VecC tr = vec_identity(liou.dim);
    double viol = (tr.adjoint() * liou.matrix).norm();
    CHECK(viol < 1e-10 * liou.inf_norm());
}

TEST_CASE("L maps Hermitian matrices to Hermitian matrices") {
    ChainSpec spec = dimer(0.5, 0.4, 0.9);
    Superoperator liou = vectorize(build_chain(spec));
    long d = liou.dim;
    MatC x = MatC::Random(d, d);
    MatC herm = 0.5 * (x + x.adjoint());
    Eigen::Map<VecC> v(herm.data(), d * d);
    VecC out = liou.matrix * v;
    MatC dmat = Eigen::Map<MatC>(out.data(), d, d);
    CHECK((dmat - dmat.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectrum is closed under complex conjugation") {
    ChainSpec spec = dimer(1.0, 0.5, 1.2);
    Superoperator liou = vectorize(build_chain(spec));
    SpectrumResult res = spectrum(liou, 12, SpectrumStrategy::Dense);
    for (const auto& ev : res.eigenvalues) {
        CHECK(ev.real() < 1e-9);
        if (std::abs(ev.imag()) > 1e-9) {
            bool found = false;
            for (const auto& other : res.eigenvalues)
                if (std::abs(other - std::conj(ev)) < 1e-7 * std::max(1.0, std::abs(ev))) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("chain Liouvillian is block diagonal in M_z-difference sectors") {
    ChainSpec spec = dimer(0.5, 0.6, 0.2);
    Superoperator liou = vectorize(build_chain(spec));
    VecR mz = chain_mz_diagonal(spec);
    long d = liou.dim;
    for (int k = 0; k < liou.matrix.outerSize(); ++k)
        for (SpMatC::InnerIterator it(liou.matrix, k); it; ++it) {
            if (std::abs(it.value()) < 1e-14) continue;
            long ri = it.row() % d, rj = it.row() / d;
            long ci = it.col() % d, cj = it.col() / d;
            double qr = mz(ri) - mz(rj), qc = mz(ci) - mz(cj);
            CHECK(std::abs(qr - qc) < 1e-12);
        }
}

TEST_CASE("steady state of the deep-dissipation dimer is anti-aligned") {
    ChainSpec spec = dimer(2.0, 10.0, 10.0);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState ss = steady_state(liou, chain_mz_diagonal(spec));
    ChainObservables obs = chain_observables(ss, spec);
    CHECK(obs.sz[0] > 1.8);
    CHECK(obs.sz[1] < -1.8);
    CHECK(ss.residual < 1e-10 * liou.inf_norm());
    // steady-state invariants
    Eigen::SelfAdjointEigenSolver<MatC> es(ss.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
    CHECK(std::abs(ss.rho.trace().real() - 1.0) < 1e-10);
}

TEST_CASE("sector-reduced and full bordered solves agree") {
    ChainSpec spec = dimer(1.5, 0.8, 0.5);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState full = steady_state(liou);
    SteadyState reduced = steady_state(liou, chain_mz_diagonal(spec));
    CHECK((full.rho - reduced.rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("PT-phase dimer steady state is near maximally mixed") {
    ChainSpec spec = dimer(4.0, 0.2, 0.2);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState ss = steady_state(liou, chain_mz_diagonal(spec));
    ChainObservables obs = chain_observables(ss, spec);
    double d2 = std::pow(2.0 * spec.s + 1.0, 2.0);
    CHECK(obs.impurity / d2 > 0.5);
}

TEST_CASE("steady state carries no S^+- coherences (weak U(1) symmetry)") {
    ChainSpec spec = dimer(1.0, 0.9, 0.4);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState ss = steady_state(liou, chain_mz_diagonal(spec));
    SpinMatrices sm = build_spin_operators(spec.s);
    ProductSpace space = chain_space(spec);
    for (int site = 0; site < 2; ++site) {
        cplx sp = (MatC(embed(sm.s_plus, site, space)) * ss.rho).trace();
        CHECK(std::abs(sp) < 1e-10);
    }
}

TEST_CASE("PT symmetry of the steady state: swap + jump conjugation") {
    // S+ <-> S- in the S_z basis is the antidiagonal flip |m> -> |-m>;
    // combined with the sublattice swap it leaves rho_0 invariant on the
    // Gamma_g = Gamma_l line.
    ChainSpec spec = dimer(2.0, 0.8, 0.8);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState ss = steady_state(liou, chain_mz_diagonal(spec));
    int d = spec.local_dim();
    MatC w = MatC::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) w((d - 1 - b) * d + (d - 1 - a), a * d + b) = 1.0;
    MatC mapped = w * ss.rho * w.adjoint();
    CHECK((mapped - ss.rho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("shift-invert gap matches dense diagonalization at S = 1") {
    ChainSpec spec = dimer(1.0, 2.0, 2.0);
    Superoperator liou = vectorize(build_chain(spec));
    SpectrumResult dense = spectrum(liou, 81, SpectrumStrategy::Dense);
    SpectrumResult arn = spectrum(liou, 8, SpectrumStrategy::ShiftInvert);
    CHECK(std::abs(arn.gap - dense.gap) < 1e-8);
}

TEST_CASE("sector-dense spectrum matches dense diagonalization") {
    ChainSpec spec = dimer(1.0, 0.9, 0.7);
    Superoperator liou = vectorize(build_chain(spec));
    VecR mz = chain_mz_diagonal(spec);
    SpectrumResult dense = spectrum(liou, 81, SpectrumStrategy::Dense);
    SpectrumResult sector = spectrum(liou, 81, SpectrumStrategy::SectorDense, mz);
    REQUIRE(dense.eigenvalues.size() == sector.eigenvalues.size());
    CHECK(std::abs(dense.gap - sector.gap) < 1e-9);
    // same multiset of eigenvalues
    for (size_t i = 0; i < dense.eigenvalues.size(); ++i) {
        double best = 1e9;
        for (const auto& ev : sector.eigenvalues)
            best = std::min(best, std::abs(ev - dense.eigenvalues[i]));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("gap decreases monotonically with S at the PT transition point") {
    double prev = 1e9;
    for (double s : {2.0, 4.0, 6.0}) {
        ChainSpec spec = dimer(s, 1.0, 1.0);
        Superoperator liou = vectorize(build_chain(spec));
        SpectrumResult res = spectrum(liou, 6, SpectrumStrategy::ShiftInvert);
        CHECK(res.gap < prev);
        prev = res.gap;
    }
}

TEST_CASE("near-zero count at the dimer PT point grows with S") {
    // the multiplet collapses as 1/S, so a fixed tolerance admits more
    // eigenvalues the larger the spin
    int prev = 0;
    for (double s : {2.0, 4.0, 6.0}) {
        ChainSpec spec = dimer(s, 1.0, 1.0);
        Superoperator liou = vectorize(build_chain(spec));
        SpectrumResult res = spectrum(liou, 16, SpectrumStrategy::ShiftInvert);
        int count = res.count_near_zero(0.3 * spec.g);
        CHECK(count > prev);
        prev = count;
    }
}

TEST_CASE("fully mixed state has purity 1/d") {
    ChainSpec spec = dimer(1.0, 0.0, 0.0);
    SteadyState ss;
    ss.rho = MatC::Identity(9, 9) / 9.0;
    ChainObservables obs = chain_observables(ss, spec);
    CHECK(obs.purity == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("deep-AM joint distribution peaks at (m_a, m_b) = (S, -S)") {
    ChainSpec spec = dimer(4.0, 10.0, 10.0);
    Superoperator liou = vectorize(build_chain(spec));
    SteadyState ss = steady_state(liou, chain_mz_diagonal(spec));
    ChainObservables obs = chain_observables(ss, spec);
    // basis row 0 is m = +S, row 2S is m = -S
    CHECK(obs.joint_pmf(0, 8) > 0.8);
}
