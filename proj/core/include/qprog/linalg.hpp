#pragma once

#include <Eigen/Dense>

#include <complex>
#include <concepts>
#include <functional>
#include <vector>

namespace qprog {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Dims = std::vector<Index>;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kSupportCutoff = 1e-10;

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(const std::vector<CMatrix>& factors);
CVector kron(const CVector& a, const CVector& b);

// Eigen expressions (Identity, products, ...) are evaluated first.
template <class A, class B>
    requires std::derived_from<A, Eigen::MatrixBase<A>> && std::derived_from<B, Eigen::MatrixBase<B>>
auto kron(const A& a, const B& b) {
    if constexpr (A::ColsAtCompileTime == 1 && B::ColsAtCompileTime == 1)
        return kron(CVector(a), CVector(b));
    else
        return kron(CMatrix(a), CMatrix(b));
}

Index product(const Dims& dims);

// Reduced operator on the subsystems listed in `keep`, returned in ascending
// subsystem order.
CMatrix partial_trace(const CMatrix& m, const Dims& dims, std::vector<Index> keep);

// Reorders tensor factors: subsystem k of the result is subsystem perm[k] of m.
CMatrix permute_subsystems(const CMatrix& m, const Dims& dims, const std::vector<Index>& perm);
CVector permute_subsystems(const CVector& v, const Dims& dims, const std::vector<Index>& perm);

bool is_hermitian(const CMatrix& m, double tol = kHermTol);
CMatrix hermitian_part(const CMatrix& m);
bool all_finite(const CMatrix& m);

struct HermEig {
    RVector values;   // descending
    CMatrix vectors;  // columns, orthonormal
};

// Throws on non-Hermitian input (entrywise tolerance scaled by max(1, |m|max)).
HermEig herm_eig(const CMatrix& h);

// V f(λ) V†, with |λ| <= cutoff * max|λ| sent to zero before f is applied.
CMatrix mat_func_psd(const CMatrix& h, const std::function<double(double)>& f,
                     double support_cutoff = kSupportCutoff);
CMatrix psd_sqrt(const CMatrix& h, double support_cutoff = kSupportCutoff);
CMatrix psd_inv_sqrt(const CMatrix& h, double support_cutoff = kSupportCutoff);

// Unit eigenvector for the largest (or smallest) eigenvalue. Inside a
// degenerate eigenspace the vector is canonical: the normalized projection of
// the first computational basis vector with non-negligible weight. This keeps
// the choice stable against round-off in the input.
CVector extremal_eigenvector(const CMatrix& h, bool largest, double degeneracy_tol = 1e-9);

double max_eigenvalue(const CMatrix& h);
double min_eigenvalue(const CMatrix& h);

double trace_norm(const CMatrix& h);
// p >= 1; pass std::numeric_limits<double>::infinity() for the operator norm.
double schatten_norm(const CMatrix& h, double p);

// exp(i t H) for Hermitian H.
CMatrix expi_hermitian(const CMatrix& h, double t = 1.0);

// Re Tr(a† b), the real Hilbert–Schmidt inner product.
double hs_inner(const CMatrix& a, const CMatrix& b);

}  // namespace qprog
