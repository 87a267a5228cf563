#include "spinlab/quench_map.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

namespace spinlab {

std::string SpinConfiguration::to_string() const {
    std::string s(n_sites, '0');
    for (int i = 0; i < n_sites; ++i)
        if (up(i)) s[i] = '1';
    return s;
}

MatC build_fluctuation_matrix(const SpinConfiguration& config, const ChainSpec& params) {
    params.validate();
    int n_sites = params.n_sites();
    if (config.n_sites != n_sites)
        throw std::invalid_argument("build_fluctuation_matrix: configuration length mismatch");
    if (n_sites > 16)
        throw std::invalid_argument("build_fluctuation_matrix: limited to 2N <= 16 sites");

    // Upper-left block a: d<c_i>/dt = sum_j a_ij <c_j>; upper-right block b
    // couples to <c_j^dag>. The lower rows are the complex conjugates.
    MatC blk_a = MatC::Zero(n_sites, n_sites);
    MatC blk_b = MatC::Zero(n_sites, n_sites);

    for (int i = 0; i < n_sites; ++i) {
        bool a_site = (i % 2 == 0);
        double rate = a_site ? params.gamma_g : params.gamma_l;
        bool aligned = a_site ? config.up(i) : !config.up(i);
        blk_a(i, i) = aligned ? -rate : rate;
    }

    auto add_bond = [&](int i, int j, double coupling) {
        if (coupling == 0.0) return;
        if (config.up(i) == config.up(j)) {
            blk_a(i, j) += -I_UNIT * coupling;
            blk_a(j, i) += -I_UNIT * coupling;
        } else {
            blk_b(i, j) += -I_UNIT * coupling;
            blk_b(j, i) += -I_UNIT * coupling;
        }
    };
    for (int n = 0; n < params.n_cells; ++n) {
        add_bond(2 * n, 2 * n + 1, params.g);
        bool has_next = (n + 1 < params.n_cells) || params.boundary == Boundary::Periodic;
        if (has_next) add_bond(2 * n + 1, (2 * n + 2) % n_sites, params.h);
    }

    MatC mu = MatC::Zero(2 * n_sites, 2 * n_sites);
    mu.block(0, 0, n_sites, n_sites) = blk_a;
    mu.block(0, n_sites, n_sites, n_sites) = blk_b;
    mu.block(n_sites, 0, n_sites, n_sites) = blk_b.conjugate();
    mu.block(n_sites, n_sites, n_sites, n_sites) = blk_a.conjugate();
    return mu;
}

StabilityMapSummary stability_map(const ChainSpec& params, bool keep_spectra) {
    params.validate();
    int n_sites = params.n_sites();
    if (n_sites > 16) throw std::invalid_argument("stability_map: limited to 2N <= 16 sites");

    StabilityMapSummary out;
    out.tol = 1e-9 * std::max({params.gamma_g, params.gamma_l, params.g});
    std::uint32_t n_conf = 1u << n_sites;
    out.records.reserve(n_conf);
    for (std::uint32_t bits = 0; bits < n_conf; ++bits) {
        SpinConfiguration config{bits, n_sites};
        MatC mu = build_fluctuation_matrix(config, params);
        Eigen::ComplexEigenSolver<MatC> es(mu, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("stability_map: eigensolver failed");
        StabilityRecord rec;
        rec.config = config;
        rec.mu_max = es.eigenvalues()(0);
        for (int i = 1; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()(i).real() > rec.mu_max.real()) rec.mu_max = es.eigenvalues()(i);
        if (rec.mu_max.real() < -out.tol) {
            rec.cls = StabilityClass::Stable;
            ++out.n_stable;
        } else if (rec.mu_max.real() <= out.tol) {
            rec.cls = StabilityClass::Neutral;
            ++out.n_neutral;
        } else {
            rec.cls = StabilityClass::Unstable;
            ++out.n_unstable;
        }
        if (keep_spectra) {
            rec.spectrum.assign(es.eigenvalues().data(),
                                es.eigenvalues().data() + es.eigenvalues().size());
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace spinlab
