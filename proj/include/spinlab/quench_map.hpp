#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinlab/models.hpp"
#include "spinlab/types.hpp"

namespace spinlab {

// Polarized configuration of the 2N sites, ordered (a,1),(b,1),(a,2),...
// bit 1 = up (<S^z> = +S), bit 0 = down.
struct SpinConfiguration {
    std::uint32_t bits = 0;
    int n_sites = 0;

    bool up(int site) const { return (bits >> site) & 1u; }
    std::string to_string() const;
};

enum class StabilityClass { Stable, Neutral, Unstable };

struct StabilityRecord {
    SpinConfiguration config;
    cplx mu_max;
    StabilityClass cls = StabilityClass::Neutral;
    std::vector<cplx> spectrum; // optional, filled when requested
};

// First-moment drift of the Holstein-Primakoff fluctuations around the
// configuration, on the doubled basis (c_1..c_2N, c^dag_1..c^dag_2N).
// Pump-aligned sites are damped (-Gamma), anti-aligned amplified (+Gamma);
// equal orientations couple number conserving, opposite ones as pairs.
MatC build_fluctuation_matrix(const SpinConfiguration& config, const ChainSpec& params);

struct StabilityMapSummary {
    std::vector<StabilityRecord> records; // ordered by bitstring value
    int n_stable = 0;
    int n_neutral = 0;
    int n_unstable = 0;
    double tol = 0.0;
};

StabilityMapSummary stability_map(const ChainSpec& params, bool keep_spectra = false);

} // namespace spinlab
