#include "qprog/sdp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace qprog {

std::vector<CMatrix> hermitian_basis(Index n) {
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(n * n));
    const double r = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            CMatrix s = CMatrix::Zero(n, n), a = CMatrix::Zero(n, n);
            s(i, j) = s(j, i) = r;
            a(i, j) = cplx(0.0, r);
            a(j, i) = cplx(0.0, -r);
            basis.push_back(std::move(s));
            basis.push_back(std::move(a));
        }
    return basis;
}

namespace {

// F(x) = f0 + Σ_k x_k F_k ⪰ 0, with only the nonzero F_k listed.
struct Lmi {
    CMatrix f0;
    std::vector<std::pair<Index, CMatrix>> terms;
};

struct BarrierProblem {
    RVector c;
    std::vector<Lmi> lmis;
};

CMatrix lmi_value(const Lmi& l, const RVector& x) {
    CMatrix f = l.f0;
    for (const auto& [k, a] : l.terms)
        if (x(k) != 0.0) f.noalias() += x(k) * a;
    return f;
}

// −Σ log det F_j(x), or +inf outside the interior.
double barrier_value(const BarrierProblem& p, const RVector& x) {
    double v = 0.0;
    for (const auto& l : p.lmis) {
        Eigen::LLT<CMatrix> llt(hermitian_part(lmi_value(l, x)));
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const auto diag = llt.matrixLLT().diagonal().real();
        for (Index i = 0; i < diag.size(); ++i) {
            if (!(diag(i) > 0.0)) return std::numeric_limits<double>::infinity();
            v -= 2.0 * std::log(diag(i));
        }
    }
    return v;
}

using CMatrixL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

// F(x)^{-1} / τ with F assembled and inverted in extended precision; the
// slack has eigenvalues of order 1/τ, so double rounding in F would show up
// directly in the dual multipliers.
CMatrix scaled_inverse(const Lmi& l, const RVector& x, double tau) {
    CMatrixL f = l.f0.cast<std::complex<long double>>();
    for (const auto& [k, a] : l.terms)
        if (x(k) != 0.0) f += static_cast<long double>(x(k)) * a.cast<std::complex<long double>>();
    f = (0.5L * (f + f.adjoint())).eval();
    const Index n = f.rows();
    Eigen::LLT<CMatrixL> llt(f);
    if (llt.info() != Eigen::Success) {
        const CMatrix fd = hermitian_part(lmi_value(l, x));
        return hermitian_part(fd.llt().solve(CMatrix::Identity(n, n)) / tau);
    }
    CMatrixL inv = llt.solve(CMatrixL::Identity(n, n));
    inv = (0.5L * (inv + inv.adjoint())).eval() / static_cast<long double>(tau);
    return inv.cast<cplx>();
}

struct CenterResult {
    int steps = 0;
    bool ok = true;
};

CenterResult center(const BarrierProblem& p, RVector& x, double tau, int max_steps) {
    const Index nv = x.size();
    CenterResult res;
    std::vector<CMatrix> vecs;
    for (const auto& l : p.lmis) {
        const Index n = l.f0.rows();
        CMatrix a(n * n, static_cast<Index>(l.terms.size()));
        for (std::size_t t = 0; t < l.terms.size(); ++t)
            a.col(static_cast<Index>(t)) = Eigen::Map<const CVector>(l.terms[t].second.data(), n * n);
        vecs.push_back(std::move(a));
    }
    double phi = tau * p.c.dot(x) + barrier_value(p, x);
    for (int it = 0; it < max_steps; ++it) {
        RVector g = tau * p.c;
        RMatrix h = RMatrix::Zero(nv, nv);
        for (std::size_t j = 0; j < p.lmis.size(); ++j) {
            const Lmi& l = p.lmis[j];
            const CMatrix f = hermitian_part(lmi_value(l, x));
            const Index n = f.rows();
            const CMatrix ginv = hermitian_part(f.llt().solve(CMatrix::Identity(n, n)));
            // coefficients are Hermitian, so Tr(G F_k) = vec(F_k)† vec(G) and
            // Tr(G F_k G F_l) = vec(F_k)† vec(G F_l G)
            const CMatrix& a = vecs[j];
            const Index kt = a.cols();
            CMatrix b(n * n, kt);
            for (Index t = 0; t < kt; ++t) {
                const CMatrix gfg = ginv * l.terms[t].second * ginv;
                b.col(t) = Eigen::Map<const CVector>(gfg.data(), n * n);
            }
            const RVector gl = (a.adjoint() * Eigen::Map<const CVector>(ginv.data(), n * n)).real();
            const RMatrix hl = (a.adjoint() * b).real();
            for (Index s1 = 0; s1 < kt; ++s1) {
                const Index k1 = l.terms[s1].first;
                g(k1) -= gl(s1);
                for (Index s2 = 0; s2 < kt; ++s2) h(k1, l.terms[s2].first) += hl(s1, s2);
            }
        }
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::LDLT<RMatrix> ldlt(h);
        RVector dx = ldlt.solve(-g);
        if (!dx.allFinite() || ldlt.info() != Eigen::Success) {
            res.ok = false;
            return res;
        }
        const double dec2 = -g.dot(dx);
        ++res.steps;
        if (dec2 / 2.0 <= 1e-10) return res;
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls) {
            const RVector xn = x + step * dx;
            const double phin = tau * p.c.dot(xn) + barrier_value(p, xn);
            if (std::isfinite(phin) && phin < phi && phin <= phi - 0.25 * step * dec2) {
                x = xn;
                phi = phin;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return res;  // numerically centred as far as the line search can tell
    }
    res.ok = false;
    return res;
}

// Barrier driver. `certify` maps (x, τ, inverse slack matrices) to
// (primal objective, rigorous lower bound).
template <class Certify>
SdpSolution run_barrier(const BarrierProblem& p, RVector x, const SdpOptions& opts, Certify certify,
                        const std::function<void(SdpSolution&, const RVector&)>& fill) {
    // At exact centring the gap is m/τ; the last stage aims straight at
    // 2m/tol instead of overshooting, since very large τ costs accuracy in the
    // dual multipliers.
    double m = 0.0;
    for (const auto& l : p.lmis) m += static_cast<double>(l.f0.rows());
    const double tau_target = 2.0 * m / opts.tol;
    double tau = 1.0;
    SdpSolution sol, best;
    best.duality_gap = std::numeric_limits<double>::infinity();
    int total_steps = 0;
    for (int stage = 0; stage < opts.max_stages; ++stage) {
        const CenterResult cr = center(p, x, tau, opts.max_newton_per_stage);
        total_steps += cr.steps;
        std::vector<CMatrix> inv;
        for (const auto& l : p.lmis) inv.push_back(scaled_inverse(l, x, tau));
        const auto [primal, lower] = certify(x, inv);
        sol.objective = primal;
        sol.lower_bound = lower;
        sol.duality_gap = std::max(0.0, primal - lower);
        sol.iterations = total_steps;
        fill(sol, x);
        if (sol.duality_gap <= best.duality_gap) best = sol;
        best.iterations = total_steps;
        if (best.duality_gap <= opts.tol) return best;
        if (!cr.ok && stage > 0)
            throw SdpError("barrier Newton iteration failed to converge (gap " + std::to_string(best.duality_gap) + ")",
                           best);
        tau = std::min(tau * opts.barrier_growth, std::max(tau_target, 2.0 * tau));
    }
    throw SdpError("barrier method did not reach the requested gap (gap " + std::to_string(best.duality_gap) + ")",
                   best);
}

struct Geometry {
    Index d_in, d_out, n;
    std::vector<CMatrix> basis;          // Hermitian basis on n
    std::vector<CMatrix> basis_reduced;  // Tr_out of each basis element
};

Geometry make_geometry(Index d_in, Index d_out) {
    Geometry g{d_in, d_out, d_in * d_out, hermitian_basis(d_in * d_out), {}};
    for (const auto& e : g.basis) g.basis_reduced.push_back(partial_trace(e, {d_in, d_out}, {0}));
    return g;
}

RVector coords(const std::vector<CMatrix>& basis, const CMatrix& m) {
    RVector x(static_cast<Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) x(static_cast<Index>(k)) = hs_inner(basis[k], m);
    return x;
}

CMatrix assemble(const std::vector<CMatrix>& basis, const RVector& x, Index offset, Index dim) {
    CMatrix m = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < basis.size(); ++k) m += x(offset + static_cast<Index>(k)) * basis[k];
    return m;
}

// Positive part plus a margin: strictly feasible start for Z ⪰ 0, Z ⪰ J.
CMatrix initial_z(const CMatrix& j) {
    const HermEig e = herm_eig(hermitian_part(j));
    RVector pos = e.values.cwiseMax(0.0);
    const double eps = 0.1 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
    CMatrix z = e.vectors * pos.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    z += eps * CMatrix::Identity(j.rows(), j.cols());
    return z;
}

// Dual multipliers from the barrier give W (trace ≈ 2) and Q ⪯ W ⊗ I up to
// centring error. Shift W by the violation and rescale both so that Tr W = 2
// and Q ⪯ W ⊗ I hold exactly; returns the factor applied to Q.
double dual_rescale(const CMatrix& w, const CMatrix& q, Index d_out) {
    const CMatrix big = kron(w, CMatrix::Identity(d_out, d_out));
    const double eps = std::max(0.0, max_eigenvalue(hermitian_part(q - big)));
    return 2.0 / (w.trace().real() + eps * static_cast<double>(w.rows()));
}

// Common LMIs: index 0 is tI − Tr₂Z, 1 is Z, 2 is Z − J(+ dΛ(π)).
void add_core_lmis(BarrierProblem& p, const Geometry& g, const CMatrix& j0) {
    Lmi t_lmi{CMatrix::Zero(g.d_in, g.d_in), {}};
    t_lmi.terms.emplace_back(0, CMatrix::Identity(g.d_in, g.d_in));
    Lmi z_lmi{CMatrix::Zero(g.n, g.n), {}};
    Lmi zj_lmi{-j0, {}};
    for (std::size_t k = 0; k < g.basis.size(); ++k) {
        const Index v = 1 + static_cast<Index>(k);
        t_lmi.terms.emplace_back(v, -g.basis_reduced[k]);
        z_lmi.terms.emplace_back(v, g.basis[k]);
        zj_lmi.terms.emplace_back(v, g.basis[k]);
    }
    p.lmis = {std::move(t_lmi), std::move(z_lmi), std::move(zj_lmi)};
}

double primal_objective(const CMatrix& z, Index d_in, Index d_out) {
    return 2.0 * std::max(0.0, max_eigenvalue(hermitian_part(partial_trace(z, {d_in, d_out}, {0}))));
}

}  // namespace

SdpSolution diamond_distance(const CMatrix& chi_omega, Index d_in, double tol) {
    SdpOptions o;
    o.tol = tol;
    return diamond_distance(chi_omega, d_in, o);
}

SdpSolution diamond_distance(const CMatrix& chi_omega, Index d_in, const SdpOptions& opts) {
    if (!(opts.tol > 0.0)) throw argument_error("SDP tolerance must be positive");
    if (chi_omega.rows() != chi_omega.cols() || d_in < 1 || chi_omega.rows() % d_in != 0)
        throw dimension_error("chi_omega dimension must be a multiple of d_in");
    if (!is_hermitian(chi_omega, 1e-10)) throw argument_error("chi_omega must be Hermitian");
    const Index d_out = chi_omega.rows() / d_in;
    const Geometry g = make_geometry(d_in, d_out);
    const CMatrix j = static_cast<double>(d_in) * hermitian_part(chi_omega);

    BarrierProblem p;
    p.c = RVector::Zero(1 + g.n * g.n);
    p.c(0) = 2.0;
    add_core_lmis(p, g, j);

    const CMatrix z0 = initial_z(j);
    RVector x(1 + g.n * g.n);
    x.tail(g.n * g.n) = coords(g.basis, z0);
    x(0) = max_eigenvalue(hermitian_part(partial_trace(z0, {d_in, d_out}, {0}))) + 1.0;

    auto z_of = [&](const RVector& xv) { return hermitian_part(assemble(g.basis, xv, 1, g.n)); };
    auto certify = [&](const RVector& xv, const std::vector<CMatrix>& inv) {
        const CMatrix z = z_of(xv);
        const double s = dual_rescale(inv[0], inv[2], d_out);
        const double lower = std::max(0.0, s * hs_inner(inv[2], j));
        return std::pair<double, double>(primal_objective(z, d_in, d_out), lower);
    };
    auto fill = [&](SdpSolution& sol, const RVector& xv) {
        sol.z = z_of(xv);
        sol.t = sol.objective / 2.0;
    };
    return run_barrier(p, x, opts, certify, fill);
}

namespace {

// Orthonormal basis of {H Hermitian on dA ⊗ dB : Tr H = 0} or, for the Choi
// set, {H : Tr_B H = 0}.
std::vector<CMatrix> program_directions(Index m, ProgramConstraint constraint) {
    const auto basis = hermitian_basis(m);
    std::vector<CMatrix> out;
    if (constraint == ProgramConstraint::Full) {
        // constraint functional is the first-row pattern ⟨I, ·⟩
        RMatrix a(1, static_cast<Index>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k) a(0, static_cast<Index>(k)) = basis[k].trace().real();
        Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
        const RMatrix v = svd.matrixV();
        for (Index c = 1; c < v.cols(); ++c) out.push_back(assemble(basis, v.col(c), 0, m));
        return out;
    }
    const auto da = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))));
    if (da * da != m) throw dimension_error("Choi-set programs must have square dimension d*d");
    const auto red_basis = hermitian_basis(da);
    RMatrix a(static_cast<Index>(red_basis.size()), static_cast<Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const CMatrix r = partial_trace(basis[k], {da, da}, {0});
        for (std::size_t q = 0; q < red_basis.size(); ++q)
            a(static_cast<Index>(q), static_cast<Index>(k)) = hs_inner(red_basis[q], r);
    }
    Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
    const RVector sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10) ++rank;
    const RMatrix v = svd.matrixV();
    for (Index c = rank; c < v.cols(); ++c) out.push_back(hermitian_part(assemble(basis, v.col(c), 0, m)));
    return out;
}

}  // namespace

SdpSolution optimal_program_sdp(const ProcessorMap& processor, const ChoiMatrix& target, const SdpOptions& opts,
                                ProgramConstraint constraint) {
    if (!(opts.tol > 0.0)) throw argument_error("SDP tolerance must be positive");
    if (processor.choi_d_in() != target.d_in() || processor.choi_d_out() != target.d_out())
        throw dimension_error("processor output dimensions do not match the target");
    const Index d_in = target.d_in(), d_out = target.d_out();
    const Index m = processor.program_dim();
    const auto dd = static_cast<double>(d_in);
    const Geometry g = make_geometry(d_in, d_out);
    const auto dirs = program_directions(m, constraint);
    if (dirs.empty() && constraint == ProgramConstraint::ChoiSet && m > 1)
        throw Error("infeasible", "Choi-set constraint leaves no feasible program");

    const CMatrix pi0 = CMatrix::Identity(m, m) / static_cast<double>(m);
    const CMatrix chi_e = target.matrix();
    const CMatrix j0 = dd * hermitian_part(chi_e - processor.apply(pi0));
    const Index nz = g.n * g.n;
    const Index nx = static_cast<Index>(dirs.size());

    BarrierProblem p;
    p.c = RVector::Zero(1 + nz + nx);
    p.c(0) = 2.0;
    add_core_lmis(p, g, j0);
    Lmi pi_lmi{pi0, {}};
    for (Index k = 0; k < nx; ++k) {
        const Index v = 1 + nz + k;
        p.lmis[2].terms.emplace_back(v, dd * hermitian_part(processor.apply(dirs[k])));
        pi_lmi.terms.emplace_back(v, dirs[k]);
    }
    p.lmis.push_back(std::move(pi_lmi));

    const CMatrix z0 = initial_z(j0);
    RVector x = RVector::Zero(1 + nz + nx);
    x.segment(1, nz) = coords(g.basis, z0);
    x(0) = max_eigenvalue(hermitian_part(partial_trace(z0, {d_in, d_out}, {0}))) + 1.0;

    auto z_of = [&](const RVector& xv) { return hermitian_part(assemble(g.basis, xv, 1, g.n)); };
    auto pi_of = [&](const RVector& xv) {
        CMatrix pi = pi0;
        for (Index k = 0; k < nx; ++k) pi += xv(1 + nz + k) * dirs[k];
        return CMatrix(hermitian_part(pi));
    };
    const Index da = constraint == ProgramConstraint::ChoiSet
                         ? static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))))
                         : m;
    auto certify = [&](const RVector& xv, const std::vector<CMatrix>& inv) {
        const CMatrix z = z_of(xv);
        const double s = dual_rescale(inv[0], inv[2], d_out);
        const CMatrix q = s * inv[2];
        const CMatrix mq = hermitian_part(-dd * processor.dual(q));
        double inner;
        if (constraint == ProgramConstraint::Full) {
            inner = min_eigenvalue(mq);
        } else {
            const CMatrix r = s * inv[3];
            const CMatrix y0 = partial_trace(hermitian_part(mq - r), {da, da}, {0}) / static_cast<double>(da);
            const CMatrix shifted = hermitian_part(mq - kron(y0, CMatrix::Identity(da, da)));
            inner = min_eigenvalue(shifted) + y0.trace().real() / static_cast<double>(da);
        }
        const double lower = std::max(0.0, dd * hs_inner(q, chi_e) + inner);
        return std::pair<double, double>(primal_objective(z, d_in, d_out), lower);
    };
    auto fill = [&](SdpSolution& sol, const RVector& xv) {
        sol.z = z_of(xv);
        sol.pi = pi_of(xv);
        sol.t = sol.objective / 2.0;
    };
    return run_barrier(p, x, opts, certify, fill);
}

double spectral_diamond_upper(const CMatrix& chi_e, const CMatrix& chi_pi, Index d_in) {
    if (chi_e.rows() != chi_pi.rows() || chi_e.rows() % d_in != 0)
        throw dimension_error("spectral_diamond_upper: dimension mismatch");
    const Index d_out = chi_e.rows() / d_in;
    const CMatrix absdiff = mat_func_psd(hermitian_part(chi_e - chi_pi), [](double x) { return std::abs(x); }, 0.0);
    const CMatrix red = hermitian_part(partial_trace(absdiff, {d_in, d_out}, {0}));
    return static_cast<double>(d_in) * std::max(0.0, max_eigenvalue(red));
}

double spectral_diamond_upper(const ChoiMatrix& chi_e, const ChoiMatrix& chi_pi) {
    if (chi_e.d_in() != chi_pi.d_in() || chi_e.d_out() != chi_pi.d_out())
        throw dimension_error("spectral_diamond_upper: dimension mismatch");
    return spectral_diamond_upper(chi_e.matrix(), chi_pi.matrix(), chi_e.d_in());
}

}  // namespace qprog
