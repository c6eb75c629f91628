#include "qprog/linalg.hpp"

#include "qprog/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qprog {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

CMatrix kron_all(const std::vector<CMatrix>& factors) {
    if (factors.empty()) return CMatrix::Identity(1, 1);
    CMatrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
    return out;
}

Index product(const Dims& dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

namespace {

void check_dims(Index n, const Dims& dims) {
    for (Index d : dims)
        if (d < 1) throw dimension_error("subsystem dimension must be positive");
    if (product(dims) != n)
        throw dimension_error("subsystem dimensions multiply to " + std::to_string(product(dims)) +
                              " but operator has dimension " + std::to_string(n));
}

// new_index -> old_index for a subsystem permutation
std::vector<Index> permutation_map(const Dims& dims, const std::vector<Index>& perm) {
    const std::size_t k = dims.size();
    if (perm.size() != k) throw argument_error("permutation length differs from subsystem count");
    std::vector<bool> seen(k, false);
    for (Index p : perm) {
        if (p < 0 || static_cast<std::size_t>(p) >= k || seen[p])
            throw argument_error("invalid subsystem permutation");
        seen[p] = true;
    }
    std::vector<Index> old_stride(k, 1);
    for (std::size_t s = k; s-- > 1;) old_stride[s - 1] = old_stride[s] * dims[s];

    const Index n = product(dims);
    std::vector<Index> map(n);
    std::vector<Index> digit(k, 0);
    for (Index idx = 0; idx < n; ++idx) {
        Index old = 0;
        for (std::size_t s = 0; s < k; ++s) old += digit[s] * old_stride[perm[s]];
        map[idx] = old;
        for (std::size_t s = k; s-- > 0;) {
            if (++digit[s] < dims[perm[s]]) break;
            digit[s] = 0;
        }
    }
    return map;
}

}  // namespace

CMatrix permute_subsystems(const CMatrix& m, const Dims& dims, const std::vector<Index>& perm) {
    if (m.rows() != m.cols()) throw dimension_error("permute_subsystems expects a square operator");
    check_dims(m.rows(), dims);
    const auto map = permutation_map(dims, perm);
    const Index n = m.rows();
    CMatrix out(n, n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) out(r, c) = m(map[r], map[c]);
    return out;
}

CVector permute_subsystems(const CVector& v, const Dims& dims, const std::vector<Index>& perm) {
    check_dims(v.size(), dims);
    const auto map = permutation_map(dims, perm);
    CVector out(v.size());
    for (Index r = 0; r < v.size(); ++r) out(r) = v(map[r]);
    return out;
}

CMatrix partial_trace(const CMatrix& m, const Dims& dims, std::vector<Index> keep) {
    if (m.rows() != m.cols()) throw dimension_error("partial_trace expects a square operator");
    check_dims(m.rows(), dims);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (Index k : keep)
        if (k < 0 || static_cast<std::size_t>(k) >= dims.size())
            throw dimension_error("partial_trace: kept subsystem index out of range");

    std::vector<Index> perm = keep;
    Index kept_dim = 1;
    for (Index k : keep) kept_dim *= dims[k];
    for (Index s = 0; s < static_cast<Index>(dims.size()); ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) perm.push_back(s);
    const Index traced_dim = m.rows() / kept_dim;

    const CMatrix p = permute_subsystems(m, dims, perm);
    CMatrix out = CMatrix::Zero(kept_dim, kept_dim);
    for (Index j = 0; j < kept_dim; ++j)
        for (Index i = 0; i < kept_dim; ++i) {
            cplx acc = 0.0;
            for (Index t = 0; t < traced_dim; ++t) acc += p(i * traced_dim + t, j * traced_dim + t);
            out(i, j) = acc;
        }
    return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool all_finite(const CMatrix& m) { return m.allFinite(); }

HermEig herm_eig(const CMatrix& h) {
    if (h.rows() != h.cols()) throw dimension_error("herm_eig expects a square operator");
    if (!h.allFinite()) throw argument_error("herm_eig: non-finite entries");
    const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
    if (!is_hermitian(h, kHermTol * scale)) throw argument_error("herm_eig: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
    if (es.info() != Eigen::Success) throw Error("numerical_failure", "eigendecomposition failed");
    HermEig out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

CMatrix mat_func_psd(const CMatrix& h, const std::function<double(double)>& f, double support_cutoff) {
    const HermEig e = herm_eig(h);
    const double top = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
    RVector fv(e.values.size());
    for (Index k = 0; k < e.values.size(); ++k)
        fv(k) = std::abs(e.values(k)) <= support_cutoff * top ? 0.0 : f(e.values(k));
    return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMatrix psd_sqrt(const CMatrix& h, double support_cutoff) {
    return mat_func_psd(h, [](double x) { return std::sqrt(std::max(x, 0.0)); }, support_cutoff);
}

CMatrix psd_inv_sqrt(const CMatrix& h, double support_cutoff) {
    return mat_func_psd(h, [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, support_cutoff);
}

CVector extremal_eigenvector(const CMatrix& h, bool largest, double degeneracy_tol) {
    const HermEig e = herm_eig(h);
    const Index n = e.values.size();
    const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    const double target = largest ? e.values(0) : e.values(n - 1);
    std::vector<Index> cols;
    for (Index k = 0; k < n; ++k)
        if (std::abs(e.values(k) - target) <= degeneracy_tol * scale) cols.push_back(k);
    if (cols.size() == 1) return e.vectors.col(cols.front());

    CMatrix basis(n, static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) basis.col(static_cast<Index>(c)) = e.vectors.col(cols[c]);
    for (Index i = 0; i < n; ++i) {
        const CVector proj = basis * basis.row(i).adjoint();
        if (proj.norm() > 1e-3) {
            CVector v = proj / proj.norm();
            // fix the phase so the defining component is real and positive
            return v * std::conj(v(i)) / std::abs(v(i));
        }
    }
    return basis.col(0);
}

double max_eigenvalue(const CMatrix& h) { return herm_eig(h).values(0); }

double min_eigenvalue(const CMatrix& h) {
    const HermEig e = herm_eig(h);
    return e.values(e.values.size() - 1);
}

namespace {

RVector singular_values(const CMatrix& h) {
    if (h.rows() == h.cols() && is_hermitian(h, kHermTol * std::max(1.0, h.cwiseAbs().maxCoeff())))
        return herm_eig(h).values.cwiseAbs();
    Eigen::JacobiSVD<CMatrix> svd(h);
    return svd.singularValues();
}

}  // namespace

double trace_norm(const CMatrix& h) { return singular_values(h).sum(); }

double schatten_norm(const CMatrix& h, double p) {
    if (!(p >= 1.0)) throw argument_error("Schatten norm requires p >= 1");
    const RVector s = singular_values(h);
    if (s.size() == 0) return 0.0;
    if (std::isinf(p)) return s.maxCoeff();
    const double top = s.maxCoeff();
    if (top == 0.0) return 0.0;
    // scale out the largest value to avoid overflow for large p
    double acc = 0.0;
    for (Index k = 0; k < s.size(); ++k) acc += std::pow(s(k) / top, p);
    return top * std::pow(acc, 1.0 / p);
}

CMatrix expi_hermitian(const CMatrix& h, double t) {
    const HermEig e = herm_eig(h);
    CVector phases(e.values.size());
    for (Index k = 0; k < e.values.size(); ++k) phases(k) = std::polar(1.0, t * e.values(k));
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

double hs_inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw dimension_error("hs_inner: shape mismatch");
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace qprog
