#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "spinlab/quench_map.hpp"

using namespace spinlab;

namespace {

ChainSpec chain(int n_cells, double gamma_g, double gamma_l, double g = 1.0, double h = 0.5) {
    ChainSpec spec;
    spec.n_cells = n_cells;
    spec.s = 1.0; // irrelevant for the linearized fluctuation matrix
    spec.g = g;
    spec.h = n_cells == 1 ? 0.0 : h;
    spec.gamma_g = gamma_g;
    spec.gamma_l = gamma_l;
    spec.boundary = n_cells == 1 ? Boundary::Open : Boundary::Periodic;
    return spec;
}

std::vector<cplx> eigs(const MatC& m) {
    Eigen::ComplexEigenSolver<MatC> es(m, false);
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

} // namespace

TEST_CASE("dimer (up,up) closed form: +-sqrt(Gamma^2 - g^2)") {
    double gamma = 0.6, g = 1.0;
    ChainSpec spec = chain(1, gamma, gamma, g);
    SpinConfiguration cfg{0b11u, 2};
    auto ev = eigs(build_fluctuation_matrix(cfg, spec));
    // purely imaginary for Gamma < g, doubled spectrum
    double omega = std::sqrt(g * g - gamma * gamma);
    for (const auto& mu : ev) CHECK(std::abs(mu.real()) < 1e-12);
    std::vector<double> im;
    for (const auto& mu : ev) im.push_back(mu.imag());
    std::sort(im.begin(), im.end());
    CHECK(im[0] == doctest::Approx(-omega));
    CHECK(im[3] == doctest::Approx(omega));

    // amplified/damped pair for Gamma > g
    ChainSpec strong = chain(1, 1.5, 1.5, g);
    auto ev2 = eigs(build_fluctuation_matrix(cfg, strong));
    double r = std::sqrt(1.5 * 1.5 - g * g);
    CHECK(ev2.front().real() == doctest::Approx(-r));
    CHECK(ev2.back().real() == doctest::Approx(r));
}

TEST_CASE("dimer (up,down) closed form: -Gamma +- g") {
    double gamma = 1.4, g = 1.0;
    ChainSpec spec = chain(1, gamma, gamma, g);
    SpinConfiguration cfg{0b01u, 2}; // site 0 (a) up, site 1 (b) down
    auto ev = eigs(build_fluctuation_matrix(cfg, spec));
    CHECK(ev[0].real() == doctest::Approx(-gamma - g));
    CHECK(ev[3].real() == doctest::Approx(-gamma + g));
    for (const auto& mu : ev) CHECK(mu.real() < 0.0);
}

TEST_CASE("dimer (down,up) closed form: +Gamma +- g") {
    double gamma = 0.8, g = 1.0;
    ChainSpec spec = chain(1, gamma, gamma, g);
    SpinConfiguration cfg{0b10u, 2};
    auto ev = eigs(build_fluctuation_matrix(cfg, spec));
    CHECK(ev[0].real() == doctest::Approx(gamma - g));
    CHECK(ev[3].real() == doctest::Approx(gamma + g));
}

TEST_CASE("sublattice swap on the balanced line maps the multiset to -conj") {
    double gamma = 0.9, g = 1.0;
    ChainSpec spec = chain(1, gamma, gamma, g);
    for (std::uint32_t bits : {0b01u, 0b10u, 0b00u, 0b11u}) {
        std::uint32_t swapped = ((bits & 1u) << 1) | ((bits >> 1) & 1u);
        auto ev = eigs(build_fluctuation_matrix({bits, 2}, spec));
        auto sw = eigs(build_fluctuation_matrix({swapped, 2}, spec));
        for (const auto& mu : ev) {
            double best = 1e9;
            for (const auto& nu : sw) best = std::min(best, std::abs(mu + std::conj(nu)));
            CHECK(best < 1e-10);
        }
    }
}

TEST_CASE("spectra are closed under complex conjugation") {
    ChainSpec spec = chain(2, 0.7, 1.1);
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        auto ev = eigs(build_fluctuation_matrix({bits, 4}, spec));
        for (const auto& mu : ev) {
            double best = 1e9;
            for (const auto& nu : ev) best = std::min(best, std::abs(std::conj(mu) - nu));
            CHECK(best < 1e-9);
        }
    }
}

TEST_CASE("global flip combined with sublattice swap preserves each spectrum") {
    ChainSpec spec = chain(2, 0.7, 1.1);
    int n = 4;
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        // flip all spins and reflect the chain about a g-bond center, which
        // exchanges the sublattices while preserving the bond pattern; gain
        // on up then maps to loss on down, described by swapped rates.
        std::uint32_t mapped = 0;
        for (int i = 0; i < n; ++i) {
            int src = n - 1 - i;
            std::uint32_t flipped = 1u - ((bits >> src) & 1u);
            mapped |= flipped << i;
        }
        ChainSpec swapped_rates = spec;
        std::swap(swapped_rates.gamma_g, swapped_rates.gamma_l);
        auto ev = eigs(build_fluctuation_matrix({bits, n}, spec));
        auto ev2 = eigs(build_fluctuation_matrix({mapped, n}, swapped_rates));
        for (const auto& mu : ev) {
            double best = 1e9;
            for (const auto& nu : ev2) best = std::min(best, std::abs(mu - nu));
            CHECK(best < 1e-10);
        }
    }
}

TEST_CASE("AM-phase stability map has exactly one damped configuration") {
    ChainSpec spec = chain(4, 2.0, 2.0); // GgGl = 4 > (g+h)^2 = 2.25
    StabilityMapSummary map = stability_map(spec);
    CHECK(map.records.size() == 256);
    CHECK(map.n_stable == 1);
    for (const auto& rec : map.records)
        if (rec.cls == StabilityClass::Stable) CHECK(rec.config.to_string() == "10101010");
}

TEST_CASE("PT-phase map shows neutral oscillatory configurations") {
    ChainSpec spec = chain(4, 0.3, 0.3); // Gbar < g - h = 0.5
    StabilityMapSummary map = stability_map(spec);
    int neutral_oscillatory = 0;
    for (const auto& rec : map.records)
        if (std::abs(rec.mu_max.real()) < 1e-9 && std::abs(rec.mu_max.imag()) > 0.1) ++neutral_oscillatory;
    CHECK(neutral_oscillatory >= 2);
}

TEST_CASE("PPT-phase growth is slow for many configurations") {
    ChainSpec spec = chain(4, 1.2, 1.2); // (g-h)^2 < 1.44 < (g+h)^2
    StabilityMapSummary map = stability_map(spec);
    CHECK(map.n_stable == 0);
    int slow = 0;
    for (const auto& rec : map.records)
        if (rec.mu_max.real() > 0.0 && rec.mu_max.real() < 0.1 * 1.2) ++slow;
    CHECK(slow >= 64);
}

TEST_CASE("deterministic ordering by bitstring value") {
    ChainSpec spec = chain(2, 1.0, 1.0);
    StabilityMapSummary map = stability_map(spec);
    for (size_t i = 0; i < map.records.size(); ++i)
        CHECK(map.records[i].config.bits == i);
}

TEST_CASE("full spectra are retained on request") {
    ChainSpec spec = chain(2, 0.5, 0.5);
    StabilityMapSummary map = stability_map(spec, /*keep_spectra=*/true);
    for (const auto& rec : map.records) CHECK(rec.spectrum.size() == 8);
}
