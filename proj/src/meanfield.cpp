#include "spinlab/meanfield.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "spinlab/spin_core.hpp"

namespace spinlab {

MfState mf_rhs(const MfState& y, const MfParams& p) {
    const double xa = y[0], ya = y[1], za = y[2];
    const double xb = y[3], yb = y[4], zb = y[5];
    const double s = p.s;
    const double gh = (p.g + p.h) / s;
    MfState d;
    d[0] = -p.gamma_g / (2.0 * s) * xa * (1.0 + 2.0 * za) + gh * za * yb;
    d[1] = -p.gamma_g / (2.0 * s) * ya * (1.0 + 2.0 * za) - gh * za * xb;
    d[2] = p.gamma_g / s * (s * (s + 1.0) - za * (za + 1.0)) + gh * (ya * xb - xa * yb);
    d[3] = -p.gamma_l / (2.0 * s) * xb * (1.0 - 2.0 * zb) + gh * ya * zb;
    d[4] = -p.gamma_l / (2.0 * s) * yb * (1.0 - 2.0 * zb) - gh * xa * zb;
    // loss drives toward -S; the bracket mirrors the gain term under z -> -z
    d[5] = -p.gamma_l / s * (s * (s + 1.0) - zb * (zb - 1.0)) + gh * (xa * yb - ya * xb);
    return d;
}

Eigen::Matrix<double, 6, 6> mf_jacobian(const MfState& y, const MfParams& p) {
    const double xa = y[0], ya = y[1], za = y[2];
    const double xb = y[3], yb = y[4], zb = y[5];
    const double s = p.s;
    const double gh = (p.g + p.h) / s;
    const double kg = p.gamma_g / (2.0 * s);
    const double kl = p.gamma_l / (2.0 * s);
    Eigen::Matrix<double, 6, 6> j = Eigen::Matrix<double, 6, 6>::Zero();
    // d[0] = -kg xa (1+2za) + gh za yb
    j(0, 0) = -kg * (1.0 + 2.0 * za);
    j(0, 2) = -2.0 * kg * xa + gh * yb;
    j(0, 4) = gh * za;
    // d[1] = -kg ya (1+2za) - gh za xb
    j(1, 1) = -kg * (1.0 + 2.0 * za);
    j(1, 2) = -2.0 * kg * ya - gh * xb;
    j(1, 3) = -gh * za;
    // d[2] = (2 kg)(s(s+1) - za(za+1)) + gh (ya xb - xa yb)
    j(2, 0) = -gh * yb;
    j(2, 1) = gh * xb;
    j(2, 2) = -2.0 * kg * (2.0 * za + 1.0);
    j(2, 3) = gh * ya;
    j(2, 4) = -gh * xa;
    // d[3] = -kl xb (1-2zb) + gh ya zb
    j(3, 1) = gh * zb;
    j(3, 3) = -kl * (1.0 - 2.0 * zb);
    j(3, 5) = 2.0 * kl * xb + gh * ya;
    // d[4] = -kl yb (1-2zb) - gh xa zb
    j(4, 0) = -gh * zb;
    j(4, 4) = -kl * (1.0 - 2.0 * zb);
    j(4, 5) = 2.0 * kl * yb - gh * xa;
    // d[5] = -(2 kl)(s(s+1) - zb(zb-1)) + gh (xa yb - ya xb)
    j(5, 0) = gh * yb;
    j(5, 1) = -gh * xb;
    j(5, 3) = -gh * ya;
    j(5, 4) = gh * xa;
    j(5, 5) = 2.0 * kl * (2.0 * zb - 1.0);
    return j;
}

namespace {

// closest-return distance of the (x,y) pair over the last-20% window
struct RecurrenceProbe {
    double scale;
    MfClass classify(const std::vector<double>& t, const std::vector<double>& x,
                     const std::vector<double>& y, double* period) const {
        size_t n = t.size();
        size_t w0 = n - n / 5;
        double amp = 0.0;
        for (size_t i = w0; i < n; ++i) amp = std::max(amp, std::hypot(x[i] - x[w0], y[i] - y[w0]));
        if (amp < 1e-6 * scale) return MfClass::FixedPoint;
        // recurrence: leave a neighborhood of the reference point, come back
        double ref_x = x[w0], ref_y = y[w0];
        bool left = false;
        for (size_t i = w0 + 1; i < n; ++i) {
            double dist = std::hypot(x[i] - ref_x, y[i] - ref_y);
            if (!left) {
                if (dist > 0.25 * amp) left = true;
            } else if (dist < 1e-6 * scale + 1e-3 * amp) {
                if (period) *period = t[i] - t[w0];
                return MfClass::LimitCycle;
            }
        }
        return MfClass::Undecided;
    }
};

} // namespace

MfTrajectory integrate_mf(const MfState& initial, const MfParams& params, double t_max,
                          double rel_tol, double abs_tol) {
    if (t_max <= 0.0) throw std::invalid_argument("integrate_mf: t_max must be positive");
    namespace ode = boost::numeric::odeint;
    MfTrajectory out;
    auto system = [&](const MfState& y, MfState& dydt, double) { dydt = mf_rhs(y, params); };

    MfState y = initial;
    double dt_obs = t_max / 4000.0;
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<MfState>>(abs_tol, rel_tol);
    try {
        ode::integrate_const(stepper, system, y, 0.0, t_max, dt_obs,
                             [&](const MfState& state, double t) {
                                 out.t.push_back(t);
                                 out.y.push_back(state);
                             });
    } catch (const std::overflow_error&) {
        throw std::runtime_error("integrate_mf: step-size underflow (stiff flow)");
    }

    size_t n = out.t.size();
    size_t w0 = n - n / 5;
    std::vector<double> xa, ya, xb, yb;
    for (const auto& s : out.y) {
        xa.push_back(s[0]);
        ya.push_back(s[1]);
        xb.push_back(s[3]);
        yb.push_back(s[4]);
    }
    RecurrenceProbe probe{params.s};
    out.sublattice_a = probe.classify(out.t, xa, ya, nullptr);
    out.sublattice_b = probe.classify(out.t, xb, yb, &out.cycle_period_b);
    double za = 0.0, zb = 0.0;
    for (size_t i = w0; i < n; ++i) {
        za += out.y[i][2];
        zb += out.y[i][5];
    }
    out.time_avg_sz_a = za / (n - w0);
    out.time_avg_sz_b = zb / (n - w0);
    if (out.sublattice_a == MfClass::FixedPoint && out.sublattice_b == MfClass::FixedPoint)
        out.overall = MfClass::FixedPoint;
    else if (out.sublattice_a == MfClass::LimitCycle || out.sublattice_b == MfClass::LimitCycle)
        out.overall = MfClass::LimitCycle;
    return out;
}

void CmfSpec::validate() const {
    if (n_c < 1) throw std::invalid_argument("CmfSpec: n_c must be >= 1");
    double two_s = 2.0 * s;
    if (s <= 0.0 || std::abs(two_s - std::round(two_s)) > 1e-12)
        throw std::invalid_argument("CmfSpec: s must be a positive half-integer");
    if (transformed && (gamma_g != gamma_l || h != g))
        throw std::invalid_argument("CmfSpec: the transformed single-site chain requires Gamma_g = Gamma_l and h = g");
    int sites = transformed ? n_c : 2 * n_c;
    double dim = std::pow(2.0 * s + 1.0, sites);
    if (dim > 4096)
        throw std::invalid_argument("CmfSpec: cluster dimension exceeds the budget");
    if (tolerance <= 0.0 || window <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("CmfSpec: tolerance, window and dt must be positive");
}

namespace {

struct ClusterOps {
    long dim = 0;
    int n_sites = 0;
    std::vector<SpMatC> sx, sy, sz;            // per site
    SpMatC h_fixed;                            // interactions inside the cluster
    std::vector<std::pair<double, SpMatC>> jumps;
    // boundary terms: pairs (operator, which site's mean field scales it)
    struct BoundaryTerm {
        SpMatC op;       // S^x or S^y on an edge site, premultiplied by J/S
        int field_site;  // site whose <S^x>/<S^y> multiplies op
        int field_comp;  // 0 -> x, 1 -> y
        double sign;     // for the transformed model's -SySy coupling
    };
    std::vector<BoundaryTerm> boundary;
};

ClusterOps build_cluster(const CmfSpec& spec) {
    ClusterOps ops;
    ops.n_sites = spec.transformed ? spec.n_c : 2 * spec.n_c;
    SpinMatrices sm = build_spin_operators(spec.s);
    ProductSpace space(std::vector<int>(ops.n_sites, sm.dim));
    ops.dim = space.total_dim;
    MatC sx = sm.s_x(), sy = sm.s_y();
    for (int i = 0; i < ops.n_sites; ++i) {
        ops.sx.push_back(embed(sx, i, space));
        ops.sy.push_back(embed(sy, i, space));
        ops.sz.push_back(embed(sm.s_z, i, space));
    }
    double inv_s = 1.0 / spec.s;
    double inv_2s = 1.0 / (2.0 * spec.s);
    ops.h_fixed = SpMatC(ops.dim, ops.dim);

    if (spec.transformed) {
        // H = (g/S) sum (Sx_n Sx_{n+1} - Sy_n Sy_{n+1}); uniform loss
        for (int i = 0; i + 1 < ops.n_sites; ++i)
            ops.h_fixed += spec.g * inv_s *
                           (SpMatC(ops.sx[i] * ops.sx[i + 1]) - SpMatC(ops.sy[i] * ops.sy[i + 1]));
        for (int i = 0; i < ops.n_sites; ++i)
            ops.jumps.emplace_back(spec.gamma_l * inv_2s, embed(sm.s_minus, i, space));
        int last = ops.n_sites - 1;
        // edge site 1 sees <S_{n_c}>, edge site n_c sees <S_1>; for n_c = 1
        // both neighbors are the site itself and the terms add up.
        ops.boundary.push_back({spec.g * inv_s * ops.sx[0], last, 0, 1.0});
        ops.boundary.push_back({spec.g * inv_s * ops.sy[0], last, 1, -1.0});
        ops.boundary.push_back({spec.g * inv_s * ops.sx[last], 0, 0, 1.0});
        ops.boundary.push_back({spec.g * inv_s * ops.sy[last], 0, 1, -1.0});
    } else {
        // cluster of n_c unit cells: g bonds inside every cell, h bonds
        // between cells; the two cut h bonds close via mean fields.
        for (int c = 0; c < spec.n_c; ++c) {
            int a = 2 * c, b = 2 * c + 1;
            ops.h_fixed += spec.g * inv_s *
                           (SpMatC(ops.sx[a] * ops.sx[b]) + SpMatC(ops.sy[a] * ops.sy[b]));
            if (c + 1 < spec.n_c) {
                int a2 = 2 * c + 2;
                ops.h_fixed += spec.h * inv_s *
                               (SpMatC(ops.sx[b] * ops.sx[a2]) + SpMatC(ops.sy[b] * ops.sy[a2]));
            }
            ops.jumps.emplace_back(spec.gamma_g * inv_2s, embed(sm.s_plus, a, space));
            ops.jumps.emplace_back(spec.gamma_l * inv_2s, embed(sm.s_minus, b, space));
        }
        int b_last = 2 * spec.n_c - 1;
        ops.boundary.push_back({spec.h * inv_s * ops.sx[0], b_last, 0, 1.0});
        ops.boundary.push_back({spec.h * inv_s * ops.sy[0], b_last, 1, 1.0});
        ops.boundary.push_back({spec.h * inv_s * ops.sx[b_last], 0, 0, 1.0});
        ops.boundary.push_back({spec.h * inv_s * ops.sy[b_last], 0, 1, 1.0});
    }
    return ops;
}

MatC cluster_rhs(const ClusterOps& ops, const MatC& rho) {
    // mean fields from the instantaneous state
    std::vector<double> mx(ops.n_sites), my(ops.n_sites);
    for (int i = 0; i < ops.n_sites; ++i) {
        mx[i] = (ops.sx[i] * rho).eval().trace().real();
        my[i] = (ops.sy[i] * rho).eval().trace().real();
    }
    SpMatC h = ops.h_fixed;
    for (const auto& term : ops.boundary) {
        double field = term.field_comp == 0 ? mx[term.field_site] : my[term.field_site];
        h += term.sign * field * term.op;
    }
    MatC d = -I_UNIT * (h * rho - rho * h);
    for (const auto& [rate, j] : ops.jumps) {
        SpMatC jd = j.adjoint();
        SpMatC jdj = jd * j;
        d += rate * (2.0 * (j * rho * MatC(jd)) - MatC(jdj) * rho - rho * MatC(jdj));
    }
    return d;
}

} // namespace

CmfResult cmf_solve(const CmfSpec& spec, double bias_tilt) {
    spec.validate();
    ClusterOps ops = build_cluster(spec);

    // initial product state: dissipative attractor tilted by the bias
    VecC psi(1);
    psi(0) = 1.0;
    for (int i = 0; i < ops.n_sites; ++i) {
        double theta;
        if (spec.transformed) {
            theta = M_PI - bias_tilt; // loss attractor is down
        } else {
            theta = (i % 2 == 0) ? bias_tilt : M_PI - bias_tilt;
        }
        VecC local = spin_coherent_state(spec.s, theta, 0.0);
        VecC next(psi.size() * local.size());
        for (long a = 0; a < psi.size(); ++a)
            for (long b = 0; b < local.size(); ++b) next(a * local.size() + b) = psi(a) * local(b);
        psi = next;
    }
    MatC rho = psi * psi.adjoint();

    auto observables = [&](const MatC& r) {
        std::vector<double> obs;
        for (int i = 0; i < ops.n_sites; ++i) {
            obs.push_back((ops.sx[i] * r).eval().trace().real());
            obs.push_back((ops.sy[i] * r).eval().trace().real());
            obs.push_back((ops.sz[i] * r).eval().trace().real());
        }
        return obs;
    };

    long steps_per_window = std::max(1L, std::lround(spec.window / spec.dt));
    std::vector<double> prev_avg;
    CmfResult result;
    for (int w = 0; w < spec.max_windows; ++w) {
        std::vector<double> avg(3 * ops.n_sites, 0.0);
        for (long s = 0; s < steps_per_window; ++s) {
            MatC k1 = cluster_rhs(ops, rho);
            MatC k2 = cluster_rhs(ops, rho + 0.5 * spec.dt * k1);
            MatC k3 = cluster_rhs(ops, rho + 0.5 * spec.dt * k2);
            MatC k4 = cluster_rhs(ops, rho + spec.dt * k3);
            rho += (spec.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            auto obs = observables(rho);
            for (size_t i = 0; i < obs.size(); ++i) avg[i] += obs[i];
        }
        for (double& v : avg) v /= static_cast<double>(steps_per_window);
        result.windows_used = w + 1;
        if (!prev_avg.empty()) {
            double diff = 0.0;
            for (size_t i = 0; i < avg.size(); ++i) diff = std::max(diff, std::abs(avg[i] - prev_avg[i]));
            result.residual = diff;
            if (diff < spec.tolerance * std::max(1.0, spec.s)) {
                result.converged = true;
                prev_avg = avg;
                break;
            }
        }
        prev_avg = avg;
    }
    if (!result.converged)
        throw std::runtime_error("cmf_solve: self-consistency loop did not converge; oscillation " +
                                 std::to_string(result.residual));

    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    result.rho_c = rho;
    for (int i = 0; i < ops.n_sites; ++i) {
        result.sx.push_back((ops.sx[i] * rho).eval().trace().real());
        result.sy.push_back((ops.sy[i] * rho).eval().trace().real());
        result.sz.push_back((ops.sz[i] * rho).eval().trace().real());
    }
    // transverse polarization on a-type sites (all sites in the transformed model)
    double sx_acc = 0.0, sy_acc = 0.0;
    int count = 0;
    for (int i = 0; i < ops.n_sites; i += spec.transformed ? 1 : 2) {
        sx_acc += result.sx[i];
        sy_acc += result.sy[i];
        ++count;
    }
    result.s_perp = std::hypot(sx_acc / count, sy_acc / count);
    return result;
}

} // namespace spinlab
