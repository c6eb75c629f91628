#pragma once

#include "qprog/linalg.hpp"

#include <string>
#include <vector>

namespace qprog {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kTpTol = 1e-9;

// Hermitian, PSD and unit-trace; validated once at construction.
class DensityOperator {
public:
    explicit DensityOperator(CMatrix m, double psd_tol = kPsdTol, double trace_tol = kTraceTol);

    static DensityOperator maximally_mixed(Index dim);
    static DensityOperator pure(const CVector& psi);

    const CMatrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }

private:
    CMatrix m_;
};

// Normalized Choi matrix (I ⊗ E)(Φ), reference subsystem first.
class ChoiMatrix {
public:
    ChoiMatrix(Index d_in, Index d_out, CMatrix m, double tp_tol = kTpTol);

    Index d_in() const noexcept { return d_in_; }
    Index d_out() const noexcept { return d_out_; }
    const CMatrix& matrix() const noexcept { return rho_.matrix(); }
    const DensityOperator& state() const noexcept { return rho_; }

private:
    Index d_in_;
    Index d_out_;
    DensityOperator rho_;
};

class KrausChannel {
public:
    KrausChannel(Index d_in, Index d_out, std::vector<CMatrix> ops, double tol = kTpTol);

    Index d_in() const noexcept { return d_in_; }
    Index d_out() const noexcept { return d_out_; }
    const std::vector<CMatrix>& ops() const noexcept { return ops_; }

    CMatrix apply(const CMatrix& rho) const;

private:
    Index d_in_;
    Index d_out_;
    std::vector<CMatrix> ops_;
};

CVector basis_vector(Index dim, Index k);
CVector max_entangled(Index d);
CMatrix max_entangled_projector(Index d);

// X^a Z^b at index a + d*b; for d = 2 the order is I, X, Z, XZ.
std::vector<CMatrix> weyl_heisenberg(Index d);
// (1 ⊗ U_i)|Φ⟩ in the same order as weyl_heisenberg.
std::vector<CVector> bell_basis(Index d);

ChoiMatrix choi_from_kraus(const KrausChannel& ch);
KrausChannel kraus_from_choi(const ChoiMatrix& chi, double cutoff = 1e-12);
DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);

// Choi of ρ ↦ U ρ U†; its vector (1 ⊗ U)|Φ⟩ is returned by unitary_choi_vector.
CVector unitary_choi_vector(const CMatrix& u);
ChoiMatrix unitary_choi(const CMatrix& u);

double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double fidelity(const CMatrix& rho, const CMatrix& sigma);
// In bits; +infinity when supp ρ is not contained in supp σ.
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
double relative_entropy(const CMatrix& rho, const CMatrix& sigma);

// Channel zoo.
namespace channels {
KrausChannel identity(Index d);
KrausChannel unitary(const CMatrix& u);
// exp(i θ σ_axis) with axis one of 'X', 'Y', 'Z'.
CMatrix rotation_matrix(double theta, char axis);
KrausChannel rotation_unitary(double theta, char axis);
KrausChannel pauli_channel(const std::vector<double>& probs);
KrausChannel depolarizing(double p, Index d = 2);
KrausChannel amplitude_damping(double p);
}  // namespace channels

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

}  // namespace qprog
