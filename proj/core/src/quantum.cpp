#include "qprog/quantum.hpp"

#include "qprog/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qprog {

DensityOperator::DensityOperator(CMatrix m, double psd_tol, double trace_tol) {
    if (m.rows() != m.cols() || m.rows() == 0) throw dimension_error("density operator must be square and non-empty");
    const HermEig e = herm_eig(m);  // also rejects non-Hermitian input
    const double lmin = e.values(e.values.size() - 1);
    if (lmin < -psd_tol)
        throw Error("not_psd", "density operator has eigenvalue " + std::to_string(lmin));
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > trace_tol)
        throw Error("bad_trace", "density operator has trace " + std::to_string(tr));
    m_ = hermitian_part(m);
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
    return DensityOperator(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const CVector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw argument_error("pure state from zero vector");
    const CVector v = psi / n;
    return DensityOperator(v * v.adjoint());
}

ChoiMatrix::ChoiMatrix(Index d_in, Index d_out, CMatrix m, double tp_tol)
    : d_in_(d_in), d_out_(d_out), rho_(std::move(m)) {
    if (d_in < 1 || d_out < 1 || rho_.dim() != d_in * d_out)
        throw dimension_error("Choi matrix dimension must equal d_in * d_out");
    const CMatrix red = partial_trace(rho_.matrix(), {d_in, d_out}, {0});
    const CMatrix dev = red - CMatrix::Identity(d_in, d_in) / static_cast<double>(d_in);
    if (dev.cwiseAbs().maxCoeff() > tp_tol)
        throw Error("not_trace_preserving", "Choi matrix reference marginal differs from I/d_in");
}

KrausChannel::KrausChannel(Index d_in, Index d_out, std::vector<CMatrix> ops, double tol)
    : d_in_(d_in), d_out_(d_out), ops_(std::move(ops)) {
    if (ops_.empty()) throw argument_error("Kraus channel needs at least one operator");
    CMatrix sum = CMatrix::Zero(d_in, d_in);
    for (const auto& k : ops_) {
        if (k.rows() != d_out || k.cols() != d_in) throw dimension_error("Kraus operator has wrong shape");
        if (!k.allFinite()) throw argument_error("Kraus operator has non-finite entries");
        sum += k.adjoint() * k;
    }
    if ((sum - CMatrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > tol)
        throw Error("not_trace_preserving", "Kraus operators violate completeness");
}

CMatrix KrausChannel::apply(const CMatrix& rho) const {
    if (rho.rows() != d_in_ || rho.cols() != d_in_) throw dimension_error("channel input has wrong dimension");
    CMatrix out = CMatrix::Zero(d_out_, d_out_);
    for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
    return out;
}

CVector basis_vector(Index dim, Index k) {
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    return v;
}

CVector max_entangled(Index d) {
    if (d < 2) throw argument_error("max_entangled requires d >= 2");
    CVector v = CVector::Zero(d * d);
    for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

CMatrix max_entangled_projector(Index d) {
    const CVector v = max_entangled(d);
    return v * v.adjoint();
}

std::vector<CMatrix> weyl_heisenberg(Index d) {
    if (d < 2) throw argument_error("weyl_heisenberg requires d >= 2");
    CMatrix x = CMatrix::Zero(d, d), z = CMatrix::Zero(d, d);
    for (Index j = 0; j < d; ++j) {
        x((j + 1) % d, j) = 1.0;
        z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
    }
    std::vector<CMatrix> out(d * d);
    CMatrix zb = CMatrix::Identity(d, d);
    for (Index b = 0; b < d; ++b) {
        CMatrix xa = CMatrix::Identity(d, d);
        for (Index a = 0; a < d; ++a) {
            out[a + d * b] = xa * zb;
            xa = x * xa;
        }
        zb = z * zb;
    }
    return out;
}

std::vector<CVector> bell_basis(Index d) {
    std::vector<CVector> out;
    for (const auto& u : weyl_heisenberg(d)) out.push_back(unitary_choi_vector(u));
    return out;
}

CVector unitary_choi_vector(const CMatrix& u) {
    const Index d = u.rows();
    if (u.cols() != d) throw dimension_error("unitary must be square");
    return kron(CMatrix::Identity(d, d), u) * max_entangled(d);
}

ChoiMatrix unitary_choi(const CMatrix& u) {
    const CVector v = unitary_choi_vector(u);
    return ChoiMatrix(u.rows(), u.rows(), v * v.adjoint());
}

ChoiMatrix choi_from_kraus(const KrausChannel& ch) {
    const Index din = ch.d_in(), dout = ch.d_out();
    CMatrix chi = CMatrix::Zero(din * dout, din * dout);
    // column vec of (1 ⊗ A)|Φ⟩ has entries A(o, i) at position i*dout + o
    for (const auto& a : ch.ops()) {
        CVector v(din * dout);
        for (Index i = 0; i < din; ++i)
            for (Index o = 0; o < dout; ++o) v(i * dout + o) = a(o, i);
        chi.noalias() += v * v.adjoint();
    }
    chi /= static_cast<double>(din);
    return ChoiMatrix(din, dout, chi);
}

KrausChannel kraus_from_choi(const ChoiMatrix& chi, double cutoff) {
    const Index din = chi.d_in(), dout = chi.d_out();
    const HermEig e = herm_eig(chi.matrix());
    std::vector<CMatrix> ops;
    for (Index k = 0; k < e.values.size(); ++k) {
        if (e.values(k) <= cutoff) continue;
        const double w = std::sqrt(static_cast<double>(din) * e.values(k));
        CMatrix a(dout, din);
        for (Index i = 0; i < din; ++i)
            for (Index o = 0; o < dout; ++o) a(o, i) = w * e.vectors(i * dout + o, k);
        ops.push_back(std::move(a));
    }
    return KrausChannel(din, dout, std::move(ops), 1e-8);
}

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
    return DensityOperator(ch.apply(rho.matrix()));
}

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw dimension_error("fidelity: dimension mismatch");
    const CMatrix s = psd_sqrt(rho);
    const HermEig e = herm_eig(hermitian_part(s * sigma * s));
    double f = 0.0;
    for (Index k = 0; k < e.values.size(); ++k) f += std::sqrt(std::max(e.values(k), 0.0));
    return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    return fidelity(rho.matrix(), sigma.matrix());
}

double relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows()) throw dimension_error("relative_entropy: dimension mismatch");
    const HermEig a = herm_eig(rho);
    const HermEig b = herm_eig(sigma);
    const double a_top = std::max(a.values.cwiseAbs().maxCoeff(), 0.0);
    const double b_top = std::max(b.values.cwiseAbs().maxCoeff(), 0.0);
    const RMatrix overlap = (a.vectors.adjoint() * b.vectors).cwiseAbs2();
    double s = 0.0;
    for (Index i = 0; i < a.values.size(); ++i) {
        const double li = a.values(i);
        if (li <= kSupportCutoff * a_top) continue;
        s += li * std::log2(li);
        for (Index j = 0; j < b.values.size(); ++j) {
            const double w = li * overlap(i, j);
            const double mj = b.values(j);
            if (mj <= kSupportCutoff * b_top) {
                if (w > 1e-12) return std::numeric_limits<double>::infinity();
                continue;
            }
            s -= w * std::log2(mj);
        }
    }
    return std::max(s, 0.0);
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    return relative_entropy(rho.matrix(), sigma.matrix());
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

namespace channels {

namespace {
void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw argument_error(std::string(name) + ": p must lie in [0, 1]");
}
}  // namespace

KrausChannel identity(Index d) {
    if (d < 1) throw argument_error("identity channel needs d >= 1");
    return KrausChannel(d, d, {CMatrix::Identity(d, d)});
}

KrausChannel unitary(const CMatrix& u) {
    if (u.rows() != u.cols()) throw dimension_error("unitary must be square");
    return KrausChannel(u.rows(), u.rows(), {u});
}

CMatrix rotation_matrix(double theta, char axis) {
    switch (axis) {
        case 'X': case 'x': return expi_hermitian(pauli_x(), theta);
        case 'Y': case 'y': return expi_hermitian(pauli_y(), theta);
        case 'Z': case 'z': return expi_hermitian(pauli_z(), theta);
        default: throw argument_error(std::string("rotation axis must be X, Y or Z, got '") + axis + "'");
    }
}

KrausChannel rotation_unitary(double theta, char axis) { return unitary(rotation_matrix(theta, axis)); }

KrausChannel pauli_channel(const std::vector<double>& probs) {
    const auto n = static_cast<Index>(probs.size());
    Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d < 2 || d * d != n) throw argument_error("pauli_channel needs d^2 probabilities with d >= 2");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw argument_error("pauli_channel: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw argument_error("pauli_channel: probabilities must sum to 1");
    const auto us = weyl_heisenberg(d);
    std::vector<CMatrix> ops;
    for (Index i = 0; i < n; ++i)
        if (probs[i] > 0.0) ops.push_back(std::sqrt(probs[i]) * us[i]);
    return KrausChannel(d, d, std::move(ops));
}

KrausChannel depolarizing(double p, Index d) {
    check_probability(p, "depolarizing");
    if (d < 2) throw argument_error("depolarizing needs d >= 2");
    const double dd = static_cast<double>(d * d);
    std::vector<double> probs(d * d, p / dd);
    probs[0] = 1.0 - p + p / dd;
    return pauli_channel(probs);
}

KrausChannel amplitude_damping(double p) {
    check_probability(p, "amplitude_damping");
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - p);
    k1(0, 1) = std::sqrt(p);
    return KrausChannel(2, 2, {k0, k1});
}

}  // namespace channels
}  // namespace qprog
