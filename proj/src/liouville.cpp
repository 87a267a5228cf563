#include "spinlab/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace spinlab {

namespace {

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

void sort_by_abs_re(std::vector<cplx>& ev) {
    std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
        if (std::abs(a.real()) != std::abs(b.real())) return std::abs(a.real()) < std::abs(b.real());
        return std::abs(a.imag()) < std::abs(b.imag());
    });
}

// gap = min -Re over all modes except the single smallest-|lambda| one,
// which is the structural steady-state zero.
double gap_from_eigenvalues(const std::vector<cplx>& ev) {
    if (ev.size() < 2) return 0.0;
    size_t zero_idx = 0;
    double min_abs = std::abs(ev[0]);
    for (size_t i = 1; i < ev.size(); ++i) {
        if (std::abs(ev[i]) < min_abs) {
            min_abs = std::abs(ev[i]);
            zero_idx = i;
        }
    }
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ev.size(); ++i) {
        if (i == zero_idx) continue;
        gap = std::min(gap, -ev[i].real());
    }
    return gap;
}

} // namespace

double Superoperator::inf_norm() const {
    VecR row_sums = VecR::Zero(matrix.rows());
    for (int k = 0; k < matrix.outerSize(); ++k)
        for (SpMatC::InnerIterator it(matrix, k); it; ++it)
            row_sums(it.row()) += std::abs(it.value());
    return row_sums.maxCoeff();
}

int SpectrumResult::count_near_zero(double tol) const {
    int count = 0;
    for (const auto& ev : eigenvalues)
        if (std::abs(ev) <= tol) ++count;
    return count;
}

Superoperator vectorize(const ModelOperators& model) {
    long d = model.dim();
    if (d * d > 500000L)
        throw std::runtime_error("vectorize: superoperator dimension " + std::to_string(d * d) +
                                 " exceeds the memory budget");
    SpMatC id = sparse_identity(d);
    SpMatC ham_t = model.hamiltonian.transpose();
    SpMatC L = -I_UNIT * (kron_sparse(id, model.hamiltonian) - kron_sparse(ham_t, id));
    for (const auto& [rate, jump] : model.jumps) {
        SpMatC j_conj = jump.conjugate();
        SpMatC jdj = SpMatC(jump.adjoint()) * jump;
        SpMatC jdj_t = jdj.transpose();
        L += rate * (2.0 * kron_sparse(j_conj, jump) - kron_sparse(id, jdj) - kron_sparse(jdj_t, id));
    }
    L.prune(cplx(1.0, 0.0), 1e-16);
    L.makeCompressed();
    return Superoperator{d, std::move(L)};
}

VecR chain_mz_diagonal(const ChainSpec& spec) {
    SpMatC mz = chain_total_sz(spec);
    VecR diag = VecR::Zero(mz.rows());
    for (int k = 0; k < mz.outerSize(); ++k)
        for (SpMatC::InnerIterator it(mz, k); it; ++it)
            if (it.row() == it.col()) diag(it.row()) = it.value().real();
    return diag;
}

namespace {

// Sector key for vec index v = i + d*j: 2*(mz_i - mz_j), rounded.
long sector_key(const VecR& mz, long d, long v) {
    long i = v % d, j = v / d;
    return std::lround(2.0 * (mz(i) - mz(j)));
}

// Groups vec indices by M_z difference and verifies L never couples
// different sectors. Returns empty on failure.
std::unordered_map<long, std::vector<long>> split_sectors(const Superoperator& L, const VecR& mz) {
    long d = L.dim;
    std::unordered_map<long, std::vector<long>> sectors;
    for (long v = 0; v < L.super_dim(); ++v) sectors[sector_key(mz, d, v)].push_back(v);
    for (int k = 0; k < L.matrix.outerSize(); ++k) {
        for (SpMatC::InnerIterator it(L.matrix, k); it; ++it) {
            if (std::abs(it.value()) < 1e-14) continue;
            if (sector_key(mz, d, it.row()) != sector_key(mz, d, it.col())) return {};
        }
    }
    return sectors;
}

SpMatC extract_block(const SpMatC& m, const std::vector<long>& idx) {
    std::unordered_map<long, long> pos;
    pos.reserve(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<long>(i);
    std::vector<Eigen::Triplet<cplx>> trips;
    for (long col : idx) {
        for (SpMatC::InnerIterator it(m, col); it; ++it) {
            auto r = pos.find(it.row());
            if (r != pos.end()) trips.emplace_back(r->second, pos.at(col), it.value());
        }
    }
    SpMatC out(idx.size(), idx.size());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SteadyState bordered_solve(const SpMatC& L_block, const std::vector<long>& trace_rows_local,
                           long d, const std::vector<long>& global_of_local) {
    // Replace the row holding rho(0,0) by the trace constraint.
    long n = L_block.rows();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(L_block.nonZeros() + trace_rows_local.size());
    long replaced = trace_rows_local.front();
    for (int k = 0; k < L_block.outerSize(); ++k)
        for (SpMatC::InnerIterator it(L_block, k); it; ++it)
            if (it.row() != replaced) trips.emplace_back(it.row(), it.col(), it.value());
    for (long t : trace_rows_local) trips.emplace_back(replaced, t, cplx(1.0, 0.0));
    SpMatC bordered(n, n);
    bordered.setFromTriplets(trips.begin(), trips.end());
    bordered.makeCompressed();

    Eigen::SparseLU<SpMatC> lu;
    lu.analyzePattern(bordered);
    lu.factorize(bordered);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("steady_state: bordered factorization failed");
    VecC rhs = VecC::Zero(n);
    rhs(replaced) = 1.0;
    VecC x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("steady_state: bordered solve failed");

    MatC rho = MatC::Zero(d, d);
    for (long i = 0; i < n; ++i) {
        long v = global_of_local[i];
        rho(v % d, v / d) = x(i);
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    SteadyState out;
    out.rho = std::move(rho);
    return out;
}

} // namespace

SteadyState steady_state(const Superoperator& L, const std::optional<VecR>& mz_diag) {
    long d = L.dim;
    SteadyState result;
    bool solved = false;

    if (mz_diag) {
        auto sectors = split_sectors(L, *mz_diag);
        if (!sectors.empty()) {
            // rho_0 lives in the zero-difference block.
            const auto& idx = sectors.at(0);
            SpMatC block = extract_block(L.matrix, idx);
            std::vector<long> trace_local;
            std::unordered_map<long, long> pos;
            for (size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<long>(i);
            for (long i = 0; i < d; ++i) trace_local.push_back(pos.at(i + d * i));
            result = bordered_solve(block, trace_local, d, idx);
            solved = true;
        }
    }
    if (!solved) {
        std::vector<long> all(L.super_dim());
        std::iota(all.begin(), all.end(), 0L);
        std::vector<long> trace_rows;
        for (long i = 0; i < d; ++i) trace_rows.push_back(i + d * i);
        try {
            result = bordered_solve(L.matrix, trace_rows, d, all);
        } catch (const std::runtime_error&) {
            // Fallback: relax toward the kernel by explicit propagation.
            MatC rho = MatC::Identity(d, d) / static_cast<double>(d);
            Eigen::Map<VecC> v(rho.data(), d * d);
            double scale = L.inf_norm();
            double dt = 0.05 / scale;
            long steps = static_cast<long>(2000.0 / 0.05);
            for (long s = 0; s < steps; ++s) {
                VecC k1 = L.matrix * v;
                VecC k2 = L.matrix * (v + 0.5 * dt * k1).eval();
                VecC k3 = L.matrix * (v + 0.5 * dt * k2).eval();
                VecC k4 = L.matrix * (v + dt * k3).eval();
                v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            rho = 0.5 * (rho + rho.adjoint()).eval();
            rho /= rho.trace().real();
            result.rho = rho;
            result.from_fallback = true;
        }
    }

    Eigen::Map<const VecC> v(result.rho.data(), d * d);
    result.residual = (L.matrix * v).norm();
    return result;
}

namespace {

std::vector<cplx> dense_eigenvalues(const MatC& m) {
    Eigen::ComplexEigenSolver<MatC> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return ev;
}

// Arnoldi iteration on (L - sigma)^{-1}; returns Ritz estimates of the
// eigenvalues of L closest to sigma.
std::vector<cplx> shift_invert_eigenvalues(const SpMatC& L, cplx sigma, int k, double tol) {
    long n = L.rows();
    SpMatC shifted = L - sigma * sparse_identity(n);
    shifted.makeCompressed();
    Eigen::SparseLU<SpMatC> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("spectrum: shift-invert factorization failed");

    int m = std::min<long>(std::max(3 * k + 20, 40), n);
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int attempt = 0; attempt < 3; ++attempt) {
        MatC v_basis(n, m + 1);
        MatC hess = MatC::Zero(m + 1, m);
        VecC v0(n);
        for (long i = 0; i < n; ++i) v0(i) = cplx(gauss(rng), gauss(rng));
        v_basis.col(0) = v0 / v0.norm();
        int built = m;
        for (int j = 0; j < m; ++j) {
            VecC w = lu.solve(v_basis.col(j));
            // modified Gram-Schmidt with one re-orthogonalization pass
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    cplx hij = v_basis.col(i).dot(w);
                    hess(i, j) += hij;
                    w -= hij * v_basis.col(i);
                }
            }
            double norm_w = w.norm();
            hess(j + 1, j) = norm_w;
            if (norm_w < 1e-12) { built = j + 1; break; } // invariant subspace
            v_basis.col(j + 1) = w / norm_w;
        }
        MatC hm = hess.topLeftCorner(built, built);
        Eigen::ComplexEigenSolver<MatC> es(hm, /*computeEigenvectors=*/true);
        if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: Hessenberg eig failed");

        // Ritz pairs sorted by |theta| descending = closest to sigma.
        std::vector<int> order(built);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
        });
        double beta = std::abs(hess(built, built - 1));

        std::vector<cplx> out;
        bool converged = true;
        int take = std::min(k, built);
        for (int idx = 0; idx < take; ++idx) {
            cplx theta = es.eigenvalues()(order[idx]);
            double resid = beta * std::abs(es.eigenvectors()(built - 1, order[idx]));
            if (resid > tol * std::abs(theta)) converged = false;
            out.push_back(sigma + 1.0 / theta);
        }
        if (converged && take == k) return out;
        if (attempt == 2) {
            if (!converged)
                throw std::runtime_error(
                    "spectrum: Arnoldi did not converge (krylov=" + std::to_string(m) +
                    ", requested=" + std::to_string(k) + ")");
            return out;
        }
        m = std::min<long>(2 * m, n);
    }
    throw std::runtime_error("spectrum: Arnoldi failed");
}

} // namespace

SpectrumResult spectrum(const Superoperator& L, int k, SpectrumStrategy strategy,
                        const std::optional<VecR>& mz_diag) {
    if (k < 2) throw std::invalid_argument("spectrum: k must be >= 2");
    std::vector<cplx> ev;
    switch (strategy) {
        case SpectrumStrategy::Dense: {
            if (L.super_dim() > 40000)
                throw std::invalid_argument("spectrum: dense path limited to superoperator dim 4e4");
            ev = dense_eigenvalues(MatC(L.matrix));
            break;
        }
        case SpectrumStrategy::SectorDense: {
            if (!mz_diag) throw std::invalid_argument("spectrum: SectorDense needs mz_diag");
            auto sectors = split_sectors(L, *mz_diag);
            if (sectors.empty())
                throw std::invalid_argument("spectrum: L is not M_z-sector block diagonal");
            for (const auto& [key, idx] : sectors) {
                MatC block = MatC(extract_block(L.matrix, idx));
                auto block_ev = dense_eigenvalues(block);
                ev.insert(ev.end(), block_ev.begin(), block_ev.end());
            }
            break;
        }
        case SpectrumStrategy::ShiftInvert: {
            double scale = L.inf_norm();
            cplx sigma(1e-6 * scale, 0.0);
            ev = shift_invert_eigenvalues(L.matrix, sigma, k, 1e-9);
            break;
        }
    }
    sort_by_abs_re(ev);
    SpectrumResult out;
    out.gap = gap_from_eigenvalues(ev);
    // never cut a complex-conjugate pair in half when trimming to k
    if (static_cast<int>(ev.size()) > k) {
        int keep = k;
        while (keep < static_cast<int>(ev.size()) &&
               std::abs(std::conj(ev[keep - 1]) - ev[keep]) <
                   1e-9 * std::max(1.0, std::abs(ev[keep])))
            ++keep;
        ev.resize(keep);
    }
    out.eigenvalues = std::move(ev);
    return out;
}

ChainObservables chain_observables(const SteadyState& state, const ChainSpec& spec) {
    SpinMatrices sm = build_spin_operators(spec.s);
    ProductSpace space = chain_space(spec);
    const MatC& rho = state.rho;
    ChainObservables out;
    MatC sx = sm.s_x(), sy = sm.s_y();
    for (int site = 0; site < spec.n_sites(); ++site) {
        out.sx.push_back((embed(sx, site, space) * rho).eval().trace().real());
        out.sy.push_back((embed(sy, site, space) * rho).eval().trace().real());
        out.sz.push_back((embed(sm.s_z, site, space) * rho).eval().trace().real());
    }
    double mz = 0.0;
    for (double v : out.sz) mz += v;
    out.mz_order = mz / (2.0 * spec.s);
    out.purity = rho.squaredNorm(); // Tr rho^2 for Hermitian rho
    out.impurity = 1.0 / out.purity;
    if (spec.n_cells == 1) {
        int ld = spec.local_dim();
        out.joint_pmf = MatR::Zero(ld, ld);
        for (int ia = 0; ia < ld; ++ia)
            for (int ib = 0; ib < ld; ++ib)
                out.joint_pmf(ia, ib) = rho(ia * ld + ib, ia * ld + ib).real();
    }
    return out;
}

KerrObservables kerr_observables(const SteadyState& state, const KerrSpec& spec) {
    int dim = spec.effective_cutoff() + 1;
    const MatC& rho = state.rho;
    if (rho.rows() != dim) throw std::invalid_argument("kerr_observables: dimension mismatch");
    KerrObservables out;
    out.pn = VecR::Zero(dim);
    for (int n = 0; n < dim; ++n) out.pn(n) = rho(n, n).real();
    out.n_mean = 0.0;
    for (int n = 0; n < dim; ++n) out.n_mean += n * out.pn(n);
    out.purity = rho.squaredNorm();
    return out;
}

MatC propagate_dense(const ModelOperators& model, const MatC& rho0, double t, int steps) {
    MatC rho = rho0;
    double dt = t / steps;
    MatC h = MatC(model.hamiltonian);
    std::vector<std::pair<double, MatC>> jumps;
    for (const auto& [rate, j] : model.jumps) jumps.emplace_back(rate, MatC(j));
    auto rhs = [&](const MatC& r) {
        MatC d = -I_UNIT * (h * r - r * h);
        for (const auto& [rate, j] : jumps) {
            MatC jd = j.adjoint();
            MatC jdj = jd * j;
            d += rate * (2.0 * j * r * jd - jdj * r - r * jdj);
        }
        return d;
    };
    for (int s = 0; s < steps; ++s) {
        MatC k1 = rhs(rho);
        MatC k2 = rhs(rho + 0.5 * dt * k1);
        MatC k3 = rhs(rho + 0.5 * dt * k2);
        MatC k4 = rhs(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

} // namespace spinlab
