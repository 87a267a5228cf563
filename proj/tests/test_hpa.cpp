#include <doctest.h>

#include <cmath>

#include "spinlab/hpa.hpp"

using namespace spinlab;

TEST_CASE("phase classification at the three reference points") {
    CHECK(classify_phase(2.0, 2.0, 1.0, 0.5) == PhaseLabel::AM);     // 4 > 2.25
    CHECK(classify_phase(1.0, 1.0, 1.0, 0.5) == PhaseLabel::PPT);    // 0.25 < 1 < 2.25
    CHECK(classify_phase(0.3, 0.3, 1.0, 0.5) == PhaseLabel::PT);     // 0.09 < 0.25, equal rates
    CHECK(classify_phase(0.4, 0.1, 1.0, 0.0) == PhaseLabel::FM_UP);
    CHECK(classify_phase(0.1, 0.4, 1.0, 0.0) == PhaseLabel::FM_DOWN);
}

TEST_CASE("boundary points carry the adjacent pair") {
    CHECK(classify_phase(1.5, 1.5, 1.0, 0.5) == PhaseLabel::BOUNDARY); // 2.25 = (g+h)^2
    auto pair = boundary_pair(1.5, 1.5, 1.0, 0.5);
    CHECK(pair.first == PhaseLabel::PPT);
    CHECK(pair.second == PhaseLabel::AM);
}

TEST_CASE("classification partitions a raster with label changes only at the curves") {
    double g = 1.0, h = 0.5;
    int n = 60;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double gg = 3.0 * (i + 0.5) / n, gl = 3.0 * (j + 0.5) / n;
            PhaseLabel p = classify_phase(gg, gl, g, h);
            double prod = gg * gl;
            if (prod > (g + h) * (g + h)) CHECK(p == PhaseLabel::AM);
            else if (prod > (g - h) * (g - h)) CHECK(p == PhaseLabel::PPT);
            else if (gg > gl) CHECK(p == PhaseLabel::FM_UP);
            else if (gg < gl) CHECK(p == PhaseLabel::FM_DOWN);
            else CHECK(p == PhaseLabel::PT);
        }
    }
}

TEST_CASE("dimer k-occupations are k-independent") {
    auto a = occupations_k(0.3, 0.4, 0.1, 1.0, 0.0, PhaseLabel::FM_UP);
    auto b = occupations_k(2.9, 0.4, 0.1, 1.0, 0.0, PhaseLabel::FM_UP);
    CHECK(a.n_a == doctest::Approx(b.n_a).epsilon(1e-14));
    CHECK(a.n_b == doctest::Approx(b.n_b).epsilon(1e-14));
    CHECK(std::abs(a.cross) == doctest::Approx(std::abs(b.cross)).epsilon(1e-14));
}

TEST_CASE("FM_UP occupations are real and non-negative across the k grid") {
    for (int i = 0; i < 64; ++i) {
        double k = 2.0 * M_PI * i / 64.0;
        auto occ = occupations_k(k, 0.4, 0.1, 1.0, 0.3, PhaseLabel::FM_UP);
        CHECK(occ.n_a >= 0.0);
        CHECK(occ.n_b >= 0.0);
        CHECK(std::isfinite(occ.n_a));
        CHECK(std::isfinite(occ.n_b));
    }
}

TEST_CASE("occupations diverge toward the stability boundary") {
    // gg*gl -> |g_k|^2 from below at k = 0
    double n_far = occupations_k(0.0, 0.4, 0.1, 1.0, 0.0, PhaseLabel::FM_UP).n_a;
    double n_near = occupations_k(0.0, 0.9999, 0.99, 1.0, 0.0, PhaseLabel::FM_UP).n_a;
    CHECK(n_near > 100.0 * n_far);
}

TEST_CASE("occupations_k under k -> -k conjugates g_k in the cross moment") {
    double k = 1.1;
    auto plus = occupations_k(k, 0.4, 0.1, 1.0, 0.3, PhaseLabel::FM_UP);
    auto minus = occupations_k(-k, 0.4, 0.1, 1.0, 0.3, PhaseLabel::FM_UP);
    CHECK(plus.n_a == doctest::Approx(minus.n_a).epsilon(1e-14));
    // cross = i g_k GgGl/den, so k -> -k gives -conj(cross)
    CHECK(std::abs(plus.cross + std::conj(minus.cross)) < 1e-14);
    // site-local integrals stay real by the same symmetry
    CHECK(std::abs(plus.cross.real() + minus.cross.real()) < 1e-14);
}

TEST_CASE("outside the stability region the violated inequality is named") {
    CHECK_THROWS_WITH_AS(occupations_k(0.0, 0.1, 0.4, 1.0, 0.0, PhaseLabel::FM_UP),
                         doctest::Contains("Gamma_g > Gamma_l"), std::domain_error);
    CHECK_THROWS_WITH_AS(magnetizations(0.9, 1.0, 1.0, 0.0, PhaseLabel::AM),
                         doctest::Contains("(g+h)^2"), std::domain_error);
}

TEST_CASE("AM magnetization offset at Gbar = 2g, h = 0.5g") {
    // independent evaluation of the printed closed form:
    // C = sqrt((4 - 0.25)(4 - 2.25)), offset = Gl/(Gg+Gl) (-1 + GgGl/C)
    double c_expect = std::sqrt(3.75 * 1.75);
    double offset_expect = 0.5 * (-1.0 + 4.0 / c_expect);
    CHECK(stability_c(2.0, 2.0, 1.0, 0.5) == doctest::Approx(c_expect).epsilon(1e-15));
    CHECK(c_expect == doctest::Approx(2.5617).epsilon(1e-4));
    auto mags = magnetizations(2.0, 2.0, 1.0, 0.5, PhaseLabel::AM);
    CHECK(mags.n_a == doctest::Approx(offset_expect).epsilon(1e-14));
    CHECK(mags.n_a == doctest::Approx(0.2807).epsilon(1e-3));
    CHECK(mags.n_b == doctest::Approx(mags.n_a).epsilon(1e-14)); // symmetric rates
}

TEST_CASE("FM corrections vanish as Gamma_l -> 0") {
    auto mags = magnetizations(0.5, 1e-10, 1.0, 0.2, PhaseLabel::FM_UP);
    CHECK(std::abs(mags.n_a) < 1e-8);
    CHECK(std::abs(mags.n_b) < 1e-8);
}

TEST_CASE("deep-AM magnetization saturates") {
    auto mags = magnetizations(30.0, 30.0, 1.0, 0.5, PhaseLabel::AM);
    // C -> GgGl, corrections -> Gl/(Gg+Gl) * O(small)
    CHECK(std::abs(mags.n_a) < 0.01);
}

TEST_CASE("FM real-space occupations equal the k-integral") {
    double gg = 0.4, gl = 0.1, g = 1.0, h = 0.3;
    auto mags = magnetizations(gg, gl, g, h, PhaseLabel::FM_UP);
    int n = 4096;
    double acc_a = 0.0, acc_b = 0.0;
    for (int i = 0; i < n; ++i) {
        double k = 2.0 * M_PI * i / n;
        auto occ = occupations_k(k, gg, gl, g, h, PhaseLabel::FM_UP);
        acc_a += occ.n_a;
        acc_b += occ.n_b;
    }
    CHECK(mags.n_a == doctest::Approx(acc_a / n).epsilon(1e-10));
    CHECK(mags.n_b == doctest::Approx(acc_b / n).epsilon(1e-10));
}

TEST_CASE("AM real-space occupations equal the k-integral") {
    double gg = 2.0, gl = 2.2, g = 1.0, h = 0.4;
    auto mags = magnetizations(gg, gl, g, h, PhaseLabel::AM);
    int n = 4096;
    double acc_a = 0.0, acc_b = 0.0;
    for (int i = 0; i < n; ++i) {
        double k = 2.0 * M_PI * i / n;
        auto occ = occupations_k(k, gg, gl, g, h, PhaseLabel::AM);
        acc_a += occ.n_a;
        acc_b += occ.n_b;
    }
    CHECK(mags.n_a == doctest::Approx(acc_a / n).epsilon(1e-10));
    CHECK(mags.n_b == doctest::Approx(acc_b / n).epsilon(1e-10));
}

TEST_CASE("correlation length at the reference AM point") {
    // g = 1, h = 0.5, GgGl = 2.56: C = sqrt(2.31*0.31), lambda = 1.31 - C
    double c_expect = std::sqrt(2.31 * 0.31);
    double lambda_expect = 2.56 - 1.0 - 0.25 - c_expect;
    double gbar = std::sqrt(2.56);
    CorrelationLength cl = correlation_length(gbar, gbar, 1.0, 0.5);
    CHECK(cl.lambda == doctest::Approx(lambda_expect).epsilon(1e-12));
    CHECK(cl.lambda == doctest::Approx(0.4638).epsilon(1e-3));
    CHECK(cl.xi == doctest::Approx(-1.0 / std::log(lambda_expect)).epsilon(1e-12));
    CHECK(cl.xi == doctest::Approx(1.3015).epsilon(2e-3));
    CHECK(cl.xi_asymptotic == doctest::Approx(std::sqrt(0.5 / 0.31)).epsilon(1e-12));
    CHECK(cl.xi_asymptotic == doctest::Approx(1.270).epsilon(1e-3));
}

TEST_CASE("correlation length cross-check: Fourier transform of the k-occupations") {
    double gg = 1.6, gl = 1.6, g = 1.0, h = 0.5;
    CorrelationLength cl = correlation_length(gg, gl, g, h);
    int n = 4096;
    // C(s) = (1/n) sum_k n_a(k) e^{iks}, fit the exponential tail
    std::vector<double> corr;
    for (int s = 1; s <= 8; ++s) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < n; ++i) {
            double k = 2.0 * M_PI * i / n;
            acc += occupations_k(k, gg, gl, g, h, PhaseLabel::AM).n_a *
                   std::exp(I_UNIT * (k * static_cast<double>(s)));
        }
        corr.push_back(std::abs(acc) / n);
    }
    for (int s = 0; s + 1 < 8; ++s) {
        double ratio = corr[s + 1] / corr[s];
        CHECK(ratio == doctest::Approx(std::abs(cl.lambda)).epsilon(1e-6));
    }
}

TEST_CASE("correlation-length critical exponent is 1/2 on both sides") {
    double g = 1.0, h = 0.5;
    // AM side of GgGl = (g+h)^2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (double eps = 1e-4; eps < 1.01e-2; eps *= 1.6) {
        double prod = (g + h) * (g + h) + eps;
        double gbar = std::sqrt(prod);
        double xi = correlation_length(gbar, gbar, g, h).xi;
        double x = std::log(eps), y = std::log(xi);
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.02));

    // FM side of GgGl = (g-h)^2
    sx = sy = sxx = sxy = 0; m = 0;
    for (double eps = 1e-4; eps < 1.01e-2; eps *= 1.6) {
        double prod = (g - h) * (g - h) - eps;
        double gl = prod / 0.6; // keep Gg = 0.6 > Gl
        double xi = correlation_length(0.6, gl, g, h, /*fm_side=*/true).xi;
        double x = std::log(eps), y = std::log(xi);
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
    }
    slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("correlation length refuses the dimer limit h -> 0") {
    CHECK_THROWS_AS(correlation_length(2.0, 2.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("loss-only covariance is the vacuum") {
    // no gain: both modes relax to vacuum, V = 1
    CovarianceMatrix v = covariance(0.0, 0.8, 1e-3, 0.0, PhaseLabel::FM_DOWN);
    CHECK((v.v - MatR::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(v.purity() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("unstable linearization is rejected") {
    CHECK_THROWS_AS(covariance(1.0, 1.0, 1.0, 0.0, PhaseLabel::AM), std::domain_error);
}

TEST_CASE("FM_UP covariance purity equals the printed closed form") {
    double purity_v = covariance(0.4, 0.1, 1.0, 0.0, PhaseLabel::FM_UP).purity();
    double purity_cf = purity_closed_form(0.4, 0.1, 1.0, PhaseLabel::FM_UP);
    CHECK(std::abs(purity_v - purity_cf) < 1e-10);
    // independent arithmetic: (0.3)^2 (1-0.04) / (0.04*0.09 + 0.25)
    CHECK(purity_cf == doctest::Approx(0.09 * 0.96 / 0.2536).epsilon(1e-12));
}

TEST_CASE("AM dimer purity closed form at Gbar = 2g is 0.75") {
    CHECK(purity_closed_form(2.0, 2.0, 1.0, PhaseLabel::AM) == doctest::Approx(0.75).epsilon(1e-12));
    double purity_v = covariance(2.0, 2.0, 1.0, 0.0, PhaseLabel::AM).purity();
    CHECK(std::abs(purity_v - 0.75) < 1e-10);
}

TEST_CASE("negativity vanishes in the FM phases and is g/(2 Gbar) on the PT line") {
    CHECK(covariance(0.4, 0.1, 1.0, 0.0, PhaseLabel::FM_UP).negativity() < 1e-10);
    CHECK(negativity_closed_form(0.4, 0.1, 1.0, PhaseLabel::FM_UP) == 0.0);
    for (double gbar : {1.3, 2.0, 2.9}) {
        double neg_v = covariance(gbar, gbar, 1.0, 0.0, PhaseLabel::AM).negativity();
        CHECK(std::abs(neg_v - 0.5 / gbar) < 1e-10);
    }
    // limit value at the PT transition point
    CHECK(negativity_closed_form(1.0, 1.0, 1.0, PhaseLabel::AM) == doctest::Approx(0.5));
}

TEST_CASE("purity vanishes toward the stability boundary") {
    double prev = 1.0;
    for (double gbar : {2.0, 1.5, 1.2, 1.05, 1.01}) {
        double p = purity_closed_form(gbar, gbar, 1.0, PhaseLabel::AM);
        CHECK(p < prev);
        prev = p;
    }
    CHECK(prev < 0.03);
}

TEST_CASE("k-integrated lattice covariance occupations match occupations_k") {
    double gg = 0.4, gl = 0.1, g = 1.0, h = 0.3;
    int n = 512;
    double acc_v = 0.0, acc_f = 0.0;
    for (int i = 0; i < n; ++i) {
        double k = 2.0 * M_PI * i / n;
        acc_v += covariance(gg, gl, g, h, PhaseLabel::FM_UP, k).occupations(PhaseLabel::FM_UP).n_a;
        acc_f += occupations_k(k, gg, gl, g, h, PhaseLabel::FM_UP).n_a;
    }
    CHECK(acc_v / n == doctest::Approx(acc_f / n).epsilon(1e-8));
}

TEST_CASE("per-k covariance reproduces the analytic k-occupations everywhere") {
    double gg = 2.4, gl = 2.1, g = 1.0, h = 0.4;
    for (double k : {0.0, 0.7, 2.2, 4.4}) {
        auto from_v = covariance(gg, gl, g, h, PhaseLabel::AM, k).occupations(PhaseLabel::AM);
        auto analytic = occupations_k(k, gg, gl, g, h, PhaseLabel::AM);
        CHECK(from_v.n_a == doctest::Approx(analytic.n_a).epsilon(1e-9));
        CHECK(from_v.n_b == doctest::Approx(analytic.n_b).epsilon(1e-9));
        CHECK(std::abs(from_v.cross - analytic.cross) < 1e-9);
    }
}
