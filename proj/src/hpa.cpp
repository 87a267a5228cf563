#include "spinlab/hpa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace spinlab {

std::string phase_name(PhaseLabel p) {
    switch (p) {
        case PhaseLabel::FM_UP: return "FM_UP";
        case PhaseLabel::FM_DOWN: return "FM_DOWN";
        case PhaseLabel::AM: return "AM";
        case PhaseLabel::PT: return "PT";
        case PhaseLabel::PPT: return "PPT";
        case PhaseLabel::BOUNDARY: return "BOUNDARY";
    }
    return "?";
}

PhaseLabel classify_phase(double gamma_g, double gamma_l, double g, double h) {
    if (gamma_g < 0.0 || gamma_l < 0.0)
        throw std::invalid_argument("classify_phase: rates must be non-negative");
    double p = gamma_g * gamma_l;
    double outer = (g + h) * (g + h);
    double inner = (g - h) * (g - h);
    if (p == outer || p == inner) return PhaseLabel::BOUNDARY;
    if (p > outer) return PhaseLabel::AM;
    if (p > inner) return PhaseLabel::PPT;
    if (gamma_g == gamma_l) return PhaseLabel::PT;
    return gamma_g > gamma_l ? PhaseLabel::FM_UP : PhaseLabel::FM_DOWN;
}

std::pair<PhaseLabel, PhaseLabel> boundary_pair(double gamma_g, double gamma_l, double g, double h) {
    double p = gamma_g * gamma_l;
    double outer = (g + h) * (g + h);
    double inner = (g - h) * (g - h);
    if (p == outer) return {PhaseLabel::PPT, PhaseLabel::AM};
    if (p == inner) {
        PhaseLabel fm = gamma_g == gamma_l ? PhaseLabel::PT
                        : (gamma_g > gamma_l ? PhaseLabel::FM_UP : PhaseLabel::FM_DOWN);
        return {fm, PhaseLabel::PPT};
    }
    throw std::invalid_argument("boundary_pair: point is not on a phase boundary");
}

double stability_c(double gamma_g, double gamma_l, double g, double h) {
    double p = gamma_g * gamma_l;
    double b1 = (g - h) * (g - h) - p;
    double b2 = (g + h) * (g + h) - p;
    double prod = b1 * b2;
    if (prod < 0.0)
        throw std::domain_error("stability_c: C is imaginary between the phase boundaries");
    return std::sqrt(prod);
}

namespace {

void require_fm_up(double gg, double gl, double g, double h) {
    if (!(gg > gl))
        throw std::domain_error("FM_UP stability violated: requires Gamma_g > Gamma_l");
    if (!((g - h) * (g - h) > gg * gl))
        throw std::domain_error("FM_UP stability violated: requires (g-h)^2 > Gamma_g*Gamma_l");
}

void require_fm_down(double gg, double gl, double g, double h) {
    if (!(gl > gg))
        throw std::domain_error("FM_DOWN stability violated: requires Gamma_l > Gamma_g");
    if (!((g - h) * (g - h) > gg * gl))
        throw std::domain_error("FM_DOWN stability violated: requires (g-h)^2 > Gamma_g*Gamma_l");
}

void require_am(double gg, double gl, double g, double h) {
    if (!(gg * gl > (g + h) * (g + h)))
        throw std::domain_error("AM stability violated: requires Gamma_g*Gamma_l > (g+h)^2");
}

} // namespace

KOccupations occupations_k(double k, double gamma_g, double gamma_l, double g, double h,
                           PhaseLabel phase) {
    cplx gk = g + h * std::exp(I_UNIT * k);
    double agk2 = std::norm(gk);
    double p = gamma_g * gamma_l;
    KOccupations out;
    switch (phase) {
        case PhaseLabel::FM_UP: {
            require_fm_up(gamma_g, gamma_l, g, h);
            double den = (gamma_g - gamma_l) * (agk2 - p);
            out.n_a = gamma_l * agk2 / den;
            out.n_b = gamma_l * (agk2 + gamma_g * (gamma_g - gamma_l)) / den;
            out.cross = I_UNIT * gk * p / den; // <c^dag_a c_b>
            break;
        }
        case PhaseLabel::FM_DOWN: {
            require_fm_down(gamma_g, gamma_l, g, h);
            double den = (gamma_l - gamma_g) * (agk2 - p);
            out.n_a = gamma_g * (agk2 + gamma_l * (gamma_l - gamma_g)) / den;
            out.n_b = gamma_g * agk2 / den;
            out.cross = -I_UNIT * gk * p / den;
            break;
        }
        case PhaseLabel::AM: {
            require_am(gamma_g, gamma_l, g, h);
            double q = p / ((gamma_g + gamma_l) * (p - agk2));
            out.n_a = agk2 * q / gamma_g;
            out.n_b = agk2 * q / gamma_l;
            out.cross = -I_UNIT * std::conj(gk) * q; // <c_{a,k} c_{b,-k}>
            break;
        }
        default:
            throw std::domain_error("occupations_k: no Holstein-Primakoff steady state in the " +
                                    phase_name(phase) + " phase");
    }
    return out;
}

MagnetizationOffsets magnetizations(double gamma_g, double gamma_l, double g, double h,
                                    PhaseLabel phase) {
    double c = stability_c(gamma_g, gamma_l, g, h);
    double p = gamma_g * gamma_l;
    MagnetizationOffsets out;
    switch (phase) {
        case PhaseLabel::FM_UP:
            require_fm_up(gamma_g, gamma_l, g, h);
            out.n_a = gamma_l / (gamma_g - gamma_l) * (1.0 + p / c);
            out.n_b = gamma_l / (gamma_g - gamma_l) * (1.0 + gamma_g * gamma_g / c);
            break;
        case PhaseLabel::FM_DOWN:
            require_fm_down(gamma_g, gamma_l, g, h);
            out.n_a = gamma_g / (gamma_l - gamma_g) * (1.0 + gamma_l * gamma_l / c);
            out.n_b = gamma_g / (gamma_l - gamma_g) * (1.0 + p / c);
            break;
        case PhaseLabel::AM:
            require_am(gamma_g, gamma_l, g, h);
            out.n_a = gamma_l / (gamma_l + gamma_g) * (-1.0 + p / c);
            out.n_b = gamma_g / (gamma_l + gamma_g) * (-1.0 + p / c);
            break;
        default:
            throw std::domain_error("magnetizations: no Holstein-Primakoff steady state in the " +
                                    phase_name(phase) + " phase");
    }
    return out;
}

CorrelationLength correlation_length(double gamma_g, double gamma_l, double g, double h,
                                     bool fm_side) {
    if (h <= 0.0)
        throw std::domain_error("correlation_length: requires h > 0 (the dimer has no spatial correlations)");
    double p = gamma_g * gamma_l;
    if (fm_side) {
        if (!(p < (g - h) * (g - h)))
            throw std::domain_error("correlation_length: FM side requires Gamma_g*Gamma_l < (g-h)^2");
    } else {
        require_am(gamma_g, gamma_l, g, h);
    }
    double c = stability_c(gamma_g, gamma_l, g, h);
    CorrelationLength out;
    out.lambda = (p - g * g - h * h + (fm_side ? c : -c)) / (2.0 * g * h);
    double al = std::abs(out.lambda);
    if (al >= 1.0)
        throw std::domain_error("correlation_length: |lambda| >= 1 at or inside the boundary");
    out.xi = -1.0 / std::log(al);
    double dist = fm_side ? ((g - h) * (g - h) - p) : (p - (g + h) * (g + h));
    out.xi_asymptotic = std::sqrt(g * h / dist);
    return out;
}

namespace {

// Doubled-basis drift on (c_a, c_b, c_a^dag, c_b^dag) for the phase's
// linearized ME, then rotated to quadratures X = T v, vacuum = identity.
MatR quadrature_drift(double gamma_g, double gamma_l, double g, double h, PhaseLabel phase,
                      std::optional<double> k) {
    cplx gk;
    if (k) {
        gk = g + h * std::exp(I_UNIT * (*k));
    } else {
        if (h != 0.0)
            throw std::invalid_argument("covariance: the k-independent case is the dimer; set h = 0 or pass k");
        gk = g;
    }
    MatC m = MatC::Zero(4, 4);
    switch (phase) {
        case PhaseLabel::FM_UP:
            require_fm_up(gamma_g, gamma_l, g, h);
            m(0, 0) = -gamma_g;
            m(1, 1) = gamma_l;
            m(0, 1) = -I_UNIT * std::conj(gk);
            m(1, 0) = -I_UNIT * gk;
            break;
        case PhaseLabel::FM_DOWN:
            require_fm_down(gamma_g, gamma_l, g, h);
            m(0, 0) = gamma_g;
            m(1, 1) = -gamma_l;
            m(0, 1) = -I_UNIT * std::conj(gk);
            m(1, 0) = -I_UNIT * gk;
            break;
        case PhaseLabel::AM:
            require_am(gamma_g, gamma_l, g, h);
            m(0, 0) = -gamma_g;
            m(1, 1) = -gamma_l;
            m(0, 3) = -I_UNIT * std::conj(gk); // c_a couples to c_b^dag
            m(1, 2) = -I_UNIT * std::conj(gk);
            break;
        default:
            throw std::domain_error("covariance: no Holstein-Primakoff steady state in the " +
                                    phase_name(phase) + " phase");
    }
    // lower-right block: conjugate dynamics of (c_a^dag, c_b^dag)
    m.block(2, 2, 2, 2) = m.block(0, 0, 2, 2).conjugate();
    m.block(2, 0, 2, 2) = m.block(0, 2, 2, 2).conjugate();

    MatC t = MatC::Zero(4, 4);
    // X1 = c_a + c_a^dag, X2 = i(c_a - c_a^dag), X3/X4 likewise for b.
    t(0, 0) = 1.0; t(0, 2) = 1.0;
    t(1, 0) = I_UNIT; t(1, 2) = -I_UNIT;
    t(2, 1) = 1.0; t(2, 3) = 1.0;
    t(3, 1) = I_UNIT; t(3, 3) = -I_UNIT;
    MatC a_quad = t * m * t.adjoint() / 2.0;
    if (a_quad.imag().cwiseAbs().maxCoeff() > 1e-12)
        throw std::runtime_error("covariance: quadrature drift is not real");
    return a_quad.real();
}

} // namespace

CovarianceMatrix covariance(double gamma_g, double gamma_l, double g, double h, PhaseLabel phase,
                            std::optional<double> k) {
    MatR a = quadrature_drift(gamma_g, gamma_l, g, h, phase, k);
    Eigen::EigenSolver<MatR> es(a);
    for (int i = 0; i < 4; ++i)
        if (es.eigenvalues()(i).real() >= -1e-12)
            throw std::domain_error("covariance: drift is not Hurwitz (marginal or unstable point)");
    MatR d = MatR::Zero(4, 4);
    d(0, 0) = d(1, 1) = 2.0 * gamma_g;
    d(2, 2) = d(3, 3) = 2.0 * gamma_l;
    // A V + V A^T + D = 0  <=>  (I (x) A + A (x) I) vec(V) = -vec(D)
    MatR kron = MatR::Zero(16, 16);
    for (int j = 0; j < 4; ++j) kron.block(4 * j, 4 * j, 4, 4) += a; // I (x) A
    for (int bi = 0; bi < 4; ++bi)
        for (int bj = 0; bj < 4; ++bj)
            for (int i = 0; i < 4; ++i) kron(4 * bi + i, 4 * bj + i) += a(bi, bj); // A (x) I
    Eigen::VectorXd rhs(16);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) rhs(4 * j + i) = -d(i, j);
    Eigen::VectorXd sol = kron.partialPivLu().solve(rhs);
    CovarianceMatrix out;
    out.v = MatR::Zero(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) out.v(i, j) = sol(4 * j + i);
    out.v = 0.5 * (out.v + out.v.transpose()).eval();
    return out;
}

double CovarianceMatrix::purity() const { return 1.0 / std::sqrt(v.determinant()); }

double CovarianceMatrix::negativity() const {
    double det_a = v.block(0, 0, 2, 2).determinant();
    double det_b = v.block(2, 2, 2, 2).determinant();
    double det_c = v.block(0, 2, 2, 2).determinant();
    double sigma = det_a + det_b - 2.0 * det_c;
    double disc = sigma * sigma - 4.0 * v.determinant();
    if (disc < 0.0) disc = 0.0;
    double eta = std::sqrt((sigma - std::sqrt(disc)) / 2.0);
    return std::max(0.0, 0.5 * (1.0 / eta - 1.0));
}

KOccupations CovarianceMatrix::occupations(PhaseLabel phase) const {
    KOccupations out;
    out.n_a = (v(0, 0) + v(1, 1) - 2.0) / 4.0;
    out.n_b = (v(2, 2) + v(3, 3) - 2.0) / 4.0;
    if (phase == PhaseLabel::AM) {
        out.cross = cplx(v(0, 2) - v(1, 3), -(v(1, 2) + v(0, 3))) / 4.0; // <c_a c_b>
    } else {
        out.cross = cplx(v(0, 2) + v(1, 3), v(1, 2) - v(0, 3)) / 4.0; // <c^dag_a c_b>
    }
    return out;
}

double purity_closed_form(double gamma_g, double gamma_l, double g, PhaseLabel phase) {
    double p = gamma_g * gamma_l;
    double sum2 = (gamma_g + gamma_l) * (gamma_g + gamma_l);
    double dif2 = (gamma_g - gamma_l) * (gamma_g - gamma_l);
    switch (phase) {
        case PhaseLabel::AM:
            require_am(gamma_g, gamma_l, g, 0.0);
            return sum2 * (p - g * g) / (g * g * dif2 + p * sum2);
        case PhaseLabel::FM_UP:
        case PhaseLabel::FM_DOWN:
            if (!(p < g * g))
                throw std::domain_error("purity_closed_form: FM phases require Gamma_g*Gamma_l < g^2");
            return dif2 * (g * g - p) / (p * dif2 + g * g * sum2);
        default:
            throw std::domain_error("purity_closed_form: no printed form for " + phase_name(phase));
    }
}

double negativity_closed_form(double gamma_g, double gamma_l, double g, PhaseLabel phase) {
    switch (phase) {
        case PhaseLabel::FM_UP:
        case PhaseLabel::FM_DOWN:
            return 0.0;
        case PhaseLabel::AM: {
            if (gamma_g != gamma_l)
                throw std::domain_error(
                    "negativity_closed_form: printed form exists only on the PT line Gamma_g = Gamma_l");
            double gbar = 0.5 * (gamma_g + gamma_l);
            if (!(gbar >= g))
                throw std::domain_error("negativity_closed_form: AM requires Gbar >= g at h = 0");
            return g / (2.0 * gbar);
        }
        default:
            throw std::domain_error("negativity_closed_form: no printed form for " + phase_name(phase));
    }
}

} // namespace spinlab
