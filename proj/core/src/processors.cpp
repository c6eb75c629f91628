#include "qprog/processors.hpp"

#include "qprog/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>

namespace qprog {

struct ProcessorMap::Impl {
    std::string label;
    Index m = 0, d_in = 0, d_out = 0;
    LinearMap apply, dual;
    mutable std::once_flag kraus_once;
    mutable std::vector<CMatrix> kraus;
};

ProcessorMap::ProcessorMap(std::string label, Index program_dim, Index choi_d_in, Index choi_d_out,
                           LinearMap apply, LinearMap dual)
    : impl_(std::make_shared<Impl>()) {
    if (program_dim < 1 || choi_d_in < 1 || choi_d_out < 1) throw argument_error("processor dimensions must be positive");
    impl_->label = std::move(label);
    impl_->m = program_dim;
    impl_->d_in = choi_d_in;
    impl_->d_out = choi_d_out;
    impl_->apply = std::move(apply);
    impl_->dual = std::move(dual);
}

ProcessorMap ProcessorMap::from_kraus(std::string label, Index program_dim, Index choi_d_in, Index choi_d_out,
                                      std::vector<CMatrix> kraus) {
    const Index n = choi_d_in * choi_d_out;
    for (const auto& k : kraus)
        if (k.rows() != n || k.cols() != program_dim) throw dimension_error("processor Kraus operator has wrong shape");
    auto ops = std::make_shared<const std::vector<CMatrix>>(std::move(kraus));
    ProcessorMap pm(
        std::move(label), program_dim, choi_d_in, choi_d_out,
        [ops, n](const CMatrix& pi) {
            CMatrix out = CMatrix::Zero(n, n);
            for (const auto& a : *ops) out.noalias() += a * pi * a.adjoint();
            return out;
        },
        [ops, program_dim](const CMatrix& x) {
            CMatrix out = CMatrix::Zero(program_dim, program_dim);
            for (const auto& a : *ops) out.noalias() += a.adjoint() * x * a;
            return out;
        });
    std::call_once(pm.impl_->kraus_once, [&] { pm.impl_->kraus = *ops; });
    return pm;
}

const std::string& ProcessorMap::label() const { return impl_->label; }
Index ProcessorMap::program_dim() const { return impl_->m; }
Index ProcessorMap::choi_d_in() const { return impl_->d_in; }
Index ProcessorMap::choi_d_out() const { return impl_->d_out; }

CMatrix ProcessorMap::apply(const CMatrix& pi) const {
    if (pi.rows() != impl_->m || pi.cols() != impl_->m)
        throw dimension_error("program has dimension " + std::to_string(pi.rows()) + ", processor expects " +
                              std::to_string(impl_->m));
    return impl_->apply(pi);
}

CMatrix ProcessorMap::dual(const CMatrix& x) const {
    const Index n = choi_dim();
    if (x.rows() != n || x.cols() != n) throw dimension_error("dual map input has wrong dimension");
    return impl_->dual(x);
}

const std::vector<CMatrix>& ProcessorMap::kraus_ops() const {
    std::call_once(impl_->kraus_once, [this] {
        const Index m = impl_->m, n = choi_dim();
        CMatrix j = CMatrix::Zero(m * n, m * n);
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) {
                CMatrix e = CMatrix::Zero(m, m);
                e(r, c) = 1.0;
                j.block(r * n, c * n, n, n) = impl_->apply(e);
            }
        const HermEig eig = herm_eig(hermitian_part(j));
        const double top = std::max(eig.values(0), 0.0);
        for (Index k = 0; k < eig.values.size(); ++k) {
            if (eig.values(k) <= 1e-12 * std::max(top, 1.0)) continue;
            const double w = std::sqrt(eig.values(k));
            CMatrix a(n, m);
            for (Index i = 0; i < m; ++i)
                for (Index o = 0; o < n; ++o) a(o, i) = w * eig.vectors(i * n + o, k);
            impl_->kraus.push_back(std::move(a));
        }
    });
    return impl_->kraus;
}

// ---------------------------------------------------------------- teleportation

TeleSpec make_tele_spec(Index d) {
    TeleSpec s;
    s.d = d;
    s.unitaries = weyl_heisenberg(d);
    for (const auto& v : bell_basis(d)) s.bell_projectors.push_back(v * v.adjoint());
    return s;
}

ProcessorMap teleportation_processor(Index d) {
    const auto us = weyl_heisenberg(d);
    std::vector<CMatrix> kraus;
    for (const auto& u : us) kraus.push_back(kron(u.conjugate(), u) / static_cast<double>(d));
    return ProcessorMap::from_kraus("teleport(d=" + std::to_string(d) + ")", d * d, d, d, std::move(kraus));
}

// ---------------------------------------------------------------- PBT

namespace {

Index checked_pow(Index base, Index exp, Index limit, const std::string& what) {
    Index v = 1;
    for (Index k = 0; k < exp; ++k) {
        if (v > limit / base) throw limit_error(what + " exceeds the dimension limit " + std::to_string(limit));
        v *= base;
    }
    if (v > limit) throw limit_error(what + " exceeds the dimension limit " + std::to_string(limit));
    return v;
}

// Y on (A ⊗ C), P on (A ⊗ B); returns the Choi block on (D ⊗ B):
// out[(j,b),(k,b')] = (1/d) Σ Y[(a,k),(a',j)] P[(a',b),(a,b')].
CMatrix port_contract(const CMatrix& y, const CMatrix& p, Index a_dim, Index d) {
    CMatrix out = CMatrix::Zero(d * d, d * d);
    const double inv_d = 1.0 / static_cast<double>(d);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k)
            for (Index b = 0; b < d; ++b)
                for (Index b2 = 0; b2 < d; ++b2) {
                    cplx acc = 0.0;
                    for (Index a = 0; a < a_dim; ++a)
                        for (Index a2 = 0; a2 < a_dim; ++a2)
                            acc += y(a * d + k, a2 * d + j) * p(a2 * d + b, a * d + b2);
                    out(j * d + b, k * d + b2) = acc * inv_d;
                }
    return out;
}

// Adjoint of port_contract in its second argument.
CMatrix port_contract_dual(const CMatrix& y, const CMatrix& x, Index a_dim, Index d) {
    CMatrix w = CMatrix::Zero(a_dim * d, a_dim * d);
    const double inv_d = 1.0 / static_cast<double>(d);
    for (Index a = 0; a < a_dim; ++a)
        for (Index a2 = 0; a2 < a_dim; ++a2)
            for (Index b = 0; b < d; ++b)
                for (Index b2 = 0; b2 < d; ++b2) {
                    cplx acc = 0.0;
                    for (Index j = 0; j < d; ++j)
                        for (Index k = 0; k < d; ++k) acc += x(k * d + b2, j * d + b) * y(a * d + k, a2 * d + j);
                    w(a * d + b2, a2 * d + b) = acc * inv_d;
                }
    return w;
}

}  // namespace

PbtSpec make_pbt_spec(Index n_ports, Index d, Index dim_limit) {
    if (n_ports < 1) throw argument_error("PBT needs at least one port");
    if (d < 2) throw argument_error("PBT needs d >= 2");
    const Index dim = checked_pow(d, n_ports + 1, dim_limit, "PBT measurement space");
    const Index rest = dim / (d * d);
    const Dims dims(n_ports + 1, d);
    const CMatrix phi = max_entangled_projector(d);
    const CMatrix id_rest = CMatrix::Identity(rest, rest);

    std::vector<CMatrix> phis;
    for (Index i = 0; i < n_ports; ++i) {
        // built as (A_i, C, others) then moved to (A_1..A_N, C)
        const CMatrix raw = kron(phi, id_rest);
        std::vector<Index> perm(n_ports + 1);
        Index other = 2;
        for (Index s = 0; s < n_ports; ++s) perm[s] = (s == i) ? 0 : other++;
        perm[n_ports] = 1;
        phis.push_back(permute_subsystems(raw, dims, perm));
    }

    PbtSpec spec;
    spec.n_ports = n_ports;
    spec.d = d;
    spec.sigma_ac = CMatrix::Zero(dim, dim);
    for (const auto& p : phis) spec.sigma_ac += p;
    const CMatrix s = psd_inv_sqrt(spec.sigma_ac);
    CMatrix total = CMatrix::Zero(dim, dim);
    std::vector<CMatrix> tilde;
    for (const auto& p : phis) {
        tilde.push_back(hermitian_part(s * p * s));
        total += tilde.back();
    }
    spec.delta = (CMatrix::Identity(dim, dim) - total) / static_cast<double>(n_ports);
    for (const auto& t : tilde) spec.povm.push_back(t + spec.delta);
    return spec;
}

ProcessorMap pbt_processor(Index n_ports, Index d, Index dim_limit) {
    checked_pow(d, 2 * n_ports + 1, dim_limit, "PBT program and output space");
    return pbt_processor(make_pbt_spec(n_ports, d, dim_limit), dim_limit);
}

ProcessorMap pbt_processor(const PbtSpec& spec, Index dim_limit) {
    const Index n = spec.n_ports, d = spec.d;
    const Index m = checked_pow(d, 2 * n, dim_limit, "PBT program space");
    checked_pow(d, 2 * n + 1, dim_limit, "PBT program and output space");
    const Index a_dim = m / checked_pow(d, n, dim_limit, "PBT port space");
    const Dims dims(2 * n, d);

    std::vector<Index> to_sep(2 * n);  // (A1 B1 ...) -> (A1..AN, B1..BN)
    for (Index p = 0; p < n; ++p) {
        to_sep[p] = 2 * p;
        to_sep[n + p] = 2 * p + 1;
    }
    std::vector<std::vector<Index>> embed(n, std::vector<Index>(2 * n));
    for (Index i = 0; i < n; ++i)
        for (Index p = 0; p < n; ++p) {
            embed[i][2 * p] = p;
            embed[i][2 * p + 1] = (p == i) ? n : (p < i ? n + 1 + p : n + p);
        }
    auto povm = std::make_shared<const std::vector<CMatrix>>(spec.povm);

    auto apply = [=](const CMatrix& pi) {
        const CMatrix sep = permute_subsystems(pi, dims, to_sep);
        CMatrix out = CMatrix::Zero(d * d, d * d);
        std::vector<Index> keep(n + 1);
        std::iota(keep.begin(), keep.begin() + n, Index{0});
        for (Index i = 0; i < n; ++i) {
            keep[n] = n + i;
            out += port_contract((*povm)[i], partial_trace(sep, dims, keep), a_dim, d);
        }
        return out;
    };
    auto dual = [=](const CMatrix& x) {
        CMatrix out = CMatrix::Zero(m, m);
        const CMatrix id_rest = CMatrix::Identity(m / (a_dim * d), m / (a_dim * d));
        for (Index i = 0; i < n; ++i) {
            const CMatrix w = port_contract_dual((*povm)[i], x, a_dim, d);
            out += permute_subsystems(kron(w, id_rest), dims, embed[i]);
        }
        return out;
    };
    return ProcessorMap("pbt(N=" + std::to_string(n) + ",d=" + std::to_string(d) + ")", m, d, d, apply, dual);
}

ProcessorMap pbt_reduced_processor(Index n_ports, Index d, Index dim_limit) {
    return pbt_reduced_processor(make_pbt_spec(n_ports, d, dim_limit));
}

ProcessorMap pbt_reduced_processor(const PbtSpec& spec) {
    const Index n = spec.n_ports, d = spec.d;
    const Dims dims(n + 1, d);
    CMatrix t = CMatrix::Zero(d * d, d * d);
    for (Index i = 0; i < n; ++i) t += partial_trace(spec.povm[i], dims, {i, n});
    t /= std::pow(static_cast<double>(d), static_cast<double>(n - 1));
    auto apply = [t, d](const CMatrix& chi) { return port_contract(t, chi, d, d); };
    auto dual = [t, d](const CMatrix& x) { return port_contract_dual(t, x, d, d); };
    return ProcessorMap("pbt_reduced(N=" + std::to_string(n) + ",d=" + std::to_string(d) + ")", d * d, d, d, apply,
                        dual);
}

CMatrix pbt_choi_program(const CMatrix& chi, Index n_ports) {
    std::vector<CMatrix> f(n_ports, chi);
    return kron_all(f);
}

DensityOperator symmetrize_program(const DensityOperator& pi, Index n_ports, Index d) {
    if (n_ports < 1) throw argument_error("symmetrize_program needs n_ports >= 1");
    if (n_ports > 5) throw limit_error("symmetrize_program enumerates N! permutations; N must be <= 5");
    const Dims dims(n_ports, d * d);
    if (product(dims) != pi.dim()) throw dimension_error("program dimension does not match d^(2N)");
    std::vector<Index> perm(n_ports);
    std::iota(perm.begin(), perm.end(), Index{0});
    CMatrix acc = CMatrix::Zero(pi.dim(), pi.dim());
    Index count = 0;
    do {
        acc += permute_subsystems(pi.matrix(), dims, perm);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return DensityOperator(hermitian_part(acc / static_cast<double>(count)));
}

std::uint64_t symmetric_param_count(Index n_ports, Index d) {
    if (n_ports < 0 || d < 1) throw argument_error("symmetric_param_count needs N >= 0, d >= 1");
    const std::uint64_t k = static_cast<std::uint64_t>(d) * d * d * d - 1;
    const std::uint64_t top = k + static_cast<std::uint64_t>(n_ports);
    const std::uint64_t r = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(n_ports));
    std::uint64_t res = 1;
    // C(top, i+1) = C(top, i) (top - i) / (i + 1), kept exact by cancelling the gcd first
    for (std::uint64_t i = 0; i < r; ++i) {
        const std::uint64_t g = std::gcd(res, i + 1);
        const std::uint64_t factor = (top - i) / ((i + 1) / g);
        if (__builtin_mul_overflow(res / g, factor, &res)) throw limit_error("parameter count overflows 64 bits");
    }
    return static_cast<std::uint64_t>(res);
}

// ---------------------------------------------------------------- PQC

CMatrix PqcSpec::u0() const { return expi_hermitian(h0, t0); }
CMatrix PqcSpec::u1() const { return expi_hermitian(h1, t1); }

CMatrix PqcSpec::conditional_gate() const {
    CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    return kron(u0(), p0) + kron(u1(), p1);
}

std::vector<CMatrix> PqcSpec::conditional_gates() const {
    return std::vector<CMatrix>(static_cast<std::size_t>(n_registers), conditional_gate());
}

CMatrix PqcSpec::circuit_unitary(const std::vector<int>& bits) const {
    if (static_cast<Index>(bits.size()) != n_registers) throw dimension_error("one bit per register expected");
    const CMatrix a = u0(), b = u1();
    CMatrix w = CMatrix::Identity(4, 4);
    for (int bit : bits) w = (bit ? b : a) * w;
    return w;
}

CMatrix amplitude_damping_hamiltonian(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw argument_error("amplitude damping parameter must lie in [0, 1]");
    return (std::asin(std::sqrt(p)) / 2.0) * (kron(pauli_y(), pauli_x()) - kron(pauli_x(), pauli_y()));
}

PqcSpec pqc_default_gates(Index n_registers) {
    if (n_registers < 1) throw argument_error("PQC needs at least one register");
    const CMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
    PqcSpec s;
    s.h0 = std::sqrt(2.0) * (kron(y, x) - kron(x, y));
    s.h1 = kron(CMatrix(std::sqrt(2.0) * z + std::sqrt(3.0) * y + std::sqrt(5.0) * x), CMatrix(y + std::sqrt(2.0) * z));
    s.t0 = 1.0;
    s.t1 = 1.0;
    s.n_registers = n_registers;
    s.theta0 = basis_vector(2, 0);
    return s;
}

PqcAdSetup pqc_ad_default(double p, Index n_registers) {
    return {pqc_default_gates(n_registers), amplitude_damping_hamiltonian(p)};
}

CMatrix stinespring_choi(const CMatrix& u, const CMatrix& theta) {
    if (u.rows() != 4 || theta.rows() != 2) throw dimension_error("stinespring_choi expects a two-qubit unitary");
    CMatrix chi = CMatrix::Zero(4, 4);
    for (Index x = 0; x < 2; ++x)
        for (Index y = 0; y < 2; ++y) {
            CMatrix e = CMatrix::Zero(2, 2);
            e(x, y) = 1.0;
            const CMatrix out = partial_trace(u * kron(e, theta) * u.adjoint(), {2, 2}, {0});
            chi.block(x * 2, y * 2, 2, 2) = out / 2.0;
        }
    return chi;
}

ProcessorMap pqc_processor(const PqcSpec& spec, Index dim_limit) {
    const Index n = spec.n_registers;
    if (n < 1) throw argument_error("PQC needs at least one register");
    if (spec.h0.rows() != 4 || spec.h1.rows() != 4) throw dimension_error("PQC generators must be 4x4");
    checked_pow(2, n + 3, dim_limit, "PQC total space");
    const Index blocks = Index{1} << n;
    const Index m = 2 * blocks;  // R0 ⊗ R1..RN

    std::vector<CMatrix> w(blocks);
    for (Index beta = 0; beta < blocks; ++beta) {
        std::vector<int> bits(n);
        for (Index j = 1; j <= n; ++j) bits[j - 1] = static_cast<int>((beta >> (n - j)) & 1);
        w[beta] = spec.circuit_unitary(bits);
    }
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<CMatrix> kraus;
    for (Index r0 = 0; r0 < 2; ++r0)
        for (Index beta = 0; beta < blocks; ++beta) {
            CMatrix a = CMatrix::Zero(4, m);
            for (Index b = 0; b < 2; ++b)
                for (Index out = 0; out < 2; ++out)
                    for (Index r0p = 0; r0p < 2; ++r0p)
                        a(b * 2 + out, r0p * blocks + beta) = s * w[beta](out * 2 + r0, b * 2 + r0p);
            kraus.push_back(std::move(a));
        }
    return ProcessorMap::from_kraus("pqc(N=" + std::to_string(n) + ")", m, 2, 2, std::move(kraus));
}

}  // namespace qprog
