#include "spinlab/spin_core.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinlab {

namespace {

bool is_half_integer(double s) {
    double two_s = 2.0 * s;
    return s >= 0.0 && std::abs(two_s - std::round(two_s)) < 1e-12;
}

SpMatC to_sparse(const MatC& m) {
    SpMatC out = m.sparseView(1.0, 0.0);
    out.makeCompressed();
    return out;
}

SpMatC sparse_identity(long n) {
    SpMatC id(n, n);
    id.setIdentity();
    return id;
}

SpMatC kron_sparse(const SpMatC& a, const SpMatC& b) {
    SpMatC out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SpMatC::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SpMatC::InnerIterator ib(b, kb); ib; ++ib) {
                    trips.emplace_back(ia.row() * b.rows() + ib.row(),
                                       ia.col() * b.cols() + ib.col(),
                                       ia.value() * ib.value());
                }
            }
        }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace

ProductSpace::ProductSpace(std::vector<int> dims) : site_dims(std::move(dims)) {
    if (site_dims.empty()) throw std::invalid_argument("ProductSpace: empty dimension list");
    total_dim = 1;
    for (int d : site_dims) {
        if (d < 1) throw std::invalid_argument("ProductSpace: local dimension < 1");
        total_dim *= d;
    }
}

SpinMatrices build_spin_operators(double s) {
    if (!is_half_integer(s))
        throw std::invalid_argument("build_spin_operators: s must be a non-negative half-integer");
    SpinMatrices out;
    out.s = s;
    out.dim = static_cast<int>(std::lround(2.0 * s)) + 1;
    out.s_plus = MatC::Zero(out.dim, out.dim);
    out.s_minus = MatC::Zero(out.dim, out.dim);
    out.s_z = MatC::Zero(out.dim, out.dim);
    for (int i = 0; i < out.dim; ++i) {
        double m = s - i; // row i holds m = S - i
        out.s_z(i, i) = m;
        if (i > 0) {
            // <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)), m = s - i
            out.s_plus(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
        }
    }
    out.s_minus = out.s_plus.adjoint();
    return out;
}

BosonMatrices build_boson_operators(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("build_boson_operators: cutoff must be >= 1");
    BosonMatrices out;
    out.cutoff = cutoff;
    int dim = cutoff + 1;
    out.a = MatC::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) out.a(n - 1, n) = std::sqrt(static_cast<double>(n));
    out.a_dag = out.a.adjoint();
    return out;
}

SpMatC embed(const SpMatC& op, int site, const ProductSpace& space) {
    if (site < 0 || site >= space.n_sites())
        throw std::invalid_argument("embed: site index out of range");
    if (op.rows() != space.site_dims[site] || op.cols() != space.site_dims[site])
        throw std::invalid_argument("embed: operator dimension does not match site dimension");
    long left = 1, right = 1;
    for (int i = 0; i < site; ++i) left *= space.site_dims[i];
    for (int i = site + 1; i < space.n_sites(); ++i) right *= space.site_dims[i];
    SpMatC out = kron_sparse(sparse_identity(left), op);
    if (right > 1) out = kron_sparse(out, sparse_identity(right));
    return out;
}

SpMatC embed(const MatC& op, int site, const ProductSpace& space) {
    return embed(to_sparse(op), site, space);
}

VecC spin_coherent_state(double s, double theta, double phi) {
    if (!is_half_integer(s))
        throw std::invalid_argument("spin_coherent_state: s must be a non-negative half-integer");
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw std::invalid_argument("spin_coherent_state: angles must be finite");
    int two_s = static_cast<int>(std::lround(2.0 * s));
    int dim = two_s + 1;
    VecC psi(dim);
    // |theta,phi> = sum_k sqrt(C(2S,k)) cos^(2S-k) sin^k e^{i k phi} |m = S-k>
    double lc = std::abs(std::cos(theta / 2.0));
    double ls = std::abs(std::sin(theta / 2.0));
    double sign_c = std::cos(theta / 2.0) < 0.0 ? -1.0 : 1.0;
    double sign_s = std::sin(theta / 2.0) < 0.0 ? -1.0 : 1.0;
    double log_c = lc > 0.0 ? std::log(lc) : -std::numeric_limits<double>::infinity();
    double log_s = ls > 0.0 ? std::log(ls) : -std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
        double log_binom = std::lgamma(two_s + 1.0) - std::lgamma(k + 1.0) - std::lgamma(two_s - k + 1.0);
        double log_amp = 0.5 * log_binom;
        bool vanishes = false;
        if (two_s - k > 0) {
            if (lc == 0.0) vanishes = true;
            else log_amp += (two_s - k) * log_c;
        }
        if (k > 0) {
            if (ls == 0.0) vanishes = true;
            else log_amp += k * log_s;
        }
        double amp = vanishes ? 0.0 : std::exp(log_amp);
        double sign = std::pow(sign_c, two_s - k) * std::pow(sign_s, k);
        psi(k) = amp * sign * std::exp(I_UNIT * (phi * k));
    }
    psi.normalize();
    return psi;
}

} // namespace spinlab
