#include "doctest.h"
#include "oracles.hpp"

#include "qprog/error.hpp"
#include "qprog/processors.hpp"
#include "qprog/random.hpp"

#include <cmath>
#include <numbers>

using namespace qprog;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

void check_processor_invariants(const ProcessorMap& proc, Rng& rng, int samples = 20) {
    const Index n = proc.program_dim();
    const Index m = proc.choi_dim();
    CHECK(max_abs(proc.dual(CMatrix::Identity(m, m)) - CMatrix::Identity(n, n)) < 1e-9);
    for (int rep = 0; rep < samples; ++rep) {
        const CMatrix pi = random_state(n, rng, 1 + rep % 3).matrix();
        const CMatrix out = proc.apply(pi);
        CHECK(std::abs(out.trace() - 1.0) < 1e-9);
        CHECK(min_eigenvalue(out) > -1e-10);
    }
    const CMatrix x = random_hermitian(n, rng), y = random_hermitian(n, rng);
    const double a = 0.3, b = -1.7;
    CHECK(max_abs(proc.apply(a * x + b * y) - (a * proc.apply(x) + b * proc.apply(y))) < 1e-10);
    // adjointness ⟨Y, Λ(X)⟩ = ⟨Λ*(Y), X⟩
    const CMatrix w = random_hermitian(m, rng);
    CHECK(std::abs(hs_inner(w, proc.apply(x)) - hs_inner(proc.dual(w), x)) < 1e-10);
}

CMatrix kraus_apply(const std::vector<CMatrix>& ks, const CMatrix& pi) {
    CMatrix out = CMatrix::Zero(ks.front().rows(), ks.front().rows());
    for (const auto& k : ks) out += k * pi * k.adjoint();
    return out;
}

}  // namespace

TEST_CASE("teleportation processor") {
    const auto tele = teleportation_processor(2);
    CHECK(tele.program_dim() == 4);
    const CMatrix phi = max_entangled_projector(2);
    CHECK(max_abs(tele.apply(phi) - phi) < 1e-14);
    CHECK(max_abs(tele.dual(CMatrix::Identity(4, 4)) - CMatrix::Identity(4, 4)) < 1e-14);

    Rng rng(1);
    const auto bell = bell_basis(2);
    CMatrix b(4, 4);
    for (int i = 0; i < 4; ++i) b.col(i) = bell[i];
    for (int rep = 0; rep < 20; ++rep) {
        const CMatrix pi = random_state(4, rng).matrix();
        CMatrix in_bell = b.adjoint() * tele.apply(pi) * b;
        in_bell.diagonal().setZero();
        CHECK(max_abs(in_bell) < 1e-10);
        // self-dual
        CHECK(max_abs(tele.apply(pi) - tele.dual(pi)) < 1e-14);
    }
    check_processor_invariants(tele, rng);
    check_processor_invariants(teleportation_processor(3), rng, 5);
}

TEST_CASE("teleportation spec") {
    const auto spec = make_tele_spec(3);
    CHECK(spec.unitaries.size() == 9);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j)
            CHECK(std::abs((spec.unitaries[i].adjoint() * spec.unitaries[j]).trace() - (i == j ? 3.0 : 0.0)) < 1e-10);
    CMatrix total = CMatrix::Zero(9, 9);
    for (const auto& p : spec.bell_projectors) total += p;
    CHECK(max_abs(total - CMatrix::Identity(9, 9)) < 1e-12);
}

TEST_CASE("teleportation dual reproduces conjugated-unitary form") {
    // Λ*(|χ_U⟩⟨χ_U|) = (1/d²) Σ_i |χ_{V_i}⟩⟨χ_{V_i}| with V_i = U_i U U_i†.
    Rng rng(2);
    const auto tele = teleportation_processor(2);
    const auto us = weyl_heisenberg(2);
    for (int rep = 0; rep < 5; ++rep) {
        const CMatrix u = random_unitary(2, rng);
        const CVector chi = unitary_choi_vector(u);
        CMatrix expected = CMatrix::Zero(4, 4);
        for (const auto& ui : us) {
            const CVector v = unitary_choi_vector(ui * u * ui.adjoint());
            expected += v * v.adjoint() / 4.0;
        }
        CHECK(max_abs(tele.dual(chi * chi.adjoint()) - expected) < 1e-10);
    }
}

TEST_CASE("pbt processor: one port") {
    const auto pbt = pbt_processor(1, 2);
    CHECK(pbt.program_dim() == 4);
    CHECK(max_abs(pbt.apply(max_entangled_projector(2)) - CMatrix::Identity(4, 4) / 4.0) < 1e-12);
    // output is the reduced state of Bob's port
    Rng rng(3);
    const CMatrix pi = random_state(4, rng).matrix();
    const CMatrix bob = partial_trace(pi, {2, 2}, {1});
    CHECK(max_abs(pbt.apply(pi) - kron(CMatrix::Identity(2, 2) / 2.0, bob)) < 1e-12);
}

TEST_CASE("pbt processor matches a direct protocol simulation") {
    for (int n : {1, 2, 3}) {
        const auto pbt = pbt_processor(n, 2);
        const CMatrix prog = pbt_choi_program(max_entangled_projector(2), n);
        const CMatrix direct = oracle::pbt_protocol_choi(n, 2);
        CHECK(max_abs(pbt.apply(prog) - direct) < 1e-10);
        const CVector phi = max_entangled(2);
        const double f2 = (phi.adjoint() * pbt.apply(prog) * phi)(0, 0).real();
        CHECK(f2 == doctest::Approx(oracle::qubit_pbt_entanglement_fidelity(n)).epsilon(1e-10));
    }
}

TEST_CASE("pbt povm") {
    for (Index n : {2, 3, 4}) {
        const auto spec = make_pbt_spec(n, 2);
        REQUIRE(static_cast<Index>(spec.povm.size()) == n);
        const Index dim = spec.povm.front().rows();
        CMatrix total = CMatrix::Zero(dim, dim);
        for (const auto& p : spec.povm) {
            CHECK(min_eigenvalue(p) >= -1e-10);
            total += p;
        }
        CHECK(max_abs(total - CMatrix::Identity(dim, dim)) < 1e-9);
    }
}

TEST_CASE("pbt processor invariants and limits") {
    Rng rng(4);
    check_processor_invariants(pbt_processor(2, 2), rng);
    check_processor_invariants(pbt_processor(2, 3), rng, 3);
    CHECK_THROWS_AS(pbt_processor(7, 2), Error);
    CHECK_THROWS_AS(pbt_processor(3, 2, 64), Error);
}

TEST_CASE("pbt Kraus operators reproduce the map") {
    Rng rng(5);
    const auto pbt = pbt_processor(2, 2);
    const auto& ks = pbt.kraus_ops();
    CMatrix comp = CMatrix::Zero(16, 16);
    for (const auto& k : ks) comp += k.adjoint() * k;
    CHECK(max_abs(comp - CMatrix::Identity(16, 16)) < 1e-9);
    for (int rep = 0; rep < 5; ++rep) {
        const CMatrix pi = random_state(16, rng).matrix();
        CHECK(max_abs(kraus_apply(ks, pi) - pbt.apply(pi)) < 1e-10);
    }
}

TEST_CASE("reduced pbt agrees with the full processor") {
    Rng rng(6);
    for (Index n : {2, 3}) {
        const auto full = pbt_processor(n, 2);
        const auto red = pbt_reduced_processor(n, 2);
        CHECK(red.program_dim() == 4);
        const CMatrix phi = max_entangled_projector(2);
        CHECK(max_abs(red.apply(phi) - full.apply(pbt_choi_program(phi, n))) < 1e-9);
        for (int rep = 0; rep < 3; ++rep) {
            const CMatrix chi = random_choi(2, 2, rng).matrix();
            CHECK(max_abs(red.apply(chi) - full.apply(pbt_choi_program(chi, n))) < 1e-9);
        }
    }
    const auto red = pbt_reduced_processor(2, 2);
    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix x = random_hermitian(4, rng), y = random_hermitian(4, rng);
        CHECK(max_abs(red.apply(x + 2.0 * y) - red.apply(x) - 2.0 * red.apply(y)) < 1e-12);
        const CMatrix w = random_hermitian(4, rng);
        CHECK(std::abs(hs_inner(w, red.apply(x)) - hs_inner(red.dual(w), x)) < 1e-12);
    }
}

TEST_CASE("reduced pbt: mixtures of tensor powers") {
    Rng rng(7);
    const auto full = pbt_processor(2, 2);
    const auto red = pbt_reduced_processor(2, 2);
    const CMatrix c1 = random_choi(2, 2, rng).matrix(), c2 = random_choi(2, 2, rng).matrix();
    const double p = 0.35;
    const CMatrix mixture = p * pbt_choi_program(c1, 2) + (1 - p) * pbt_choi_program(c2, 2);
    CHECK(max_abs(full.apply(mixture) - red.apply(p * c1 + (1 - p) * c2)) < 1e-9);
}

TEST_CASE("symmetrize program") {
    Rng rng(8);
    const auto pbt = pbt_processor(2, 2);
    const CMatrix phi2 = pbt_choi_program(max_entangled_projector(2), 2);
    CHECK(max_abs(symmetrize_program(DensityOperator(phi2), 2, 2).matrix() - phi2) < 1e-12);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator pi = random_state(16, rng);
        const DensityOperator sym = symmetrize_program(pi, 2, 2);
        CHECK(max_abs(pbt.apply(sym.matrix()) - pbt.apply(pi.matrix())) < 1e-9);
        CHECK(max_abs(symmetrize_program(sym, 2, 2).matrix() - sym.matrix()) < 1e-12);
    }
    CHECK_THROWS_AS(symmetrize_program(DensityOperator::maximally_mixed(4), 6, 2), Error);
}

TEST_CASE("symmetric parameter count") {
    CHECK(symmetric_param_count(1, 2) == 16);
    CHECK(symmetric_param_count(2, 2) == 136);
    CHECK(symmetric_param_count(3, 2) == 816);
    // degree d^4 - 1 = 15 in N: the 15th forward difference is constant 1
    // (computed with wrap-around arithmetic, exact modulo 2^64)
    for (Index n0 : {1, 5, 20}) {
        std::uint64_t diff = 0;
        std::uint64_t binom = 1;
        for (int k = 0; k <= 15; ++k) {
            const std::uint64_t term = binom * symmetric_param_count(n0 + k, 2);
            diff += ((15 - k) % 2 == 0) ? term : std::uint64_t(0) - term;
            binom = binom * (15 - k) / (k + 1);
        }
        CHECK(diff == 1);
    }
    CHECK_THROWS_AS(symmetric_param_count(1000000, 3), Error);
}

TEST_CASE("pqc default gates") {
    const auto spec = pqc_default_gates(2);
    const CMatrix y = pauli_y(), x = pauli_x();
    const CMatrix u0 = expi_hermitian(std::sqrt(2.0) * (kron(y, x) - kron(x, y)));
    CHECK(max_abs(spec.u0() - u0) < 1e-12);
    CHECK(max_abs(spec.u0().adjoint() * spec.u0() - CMatrix::Identity(4, 4)) < 1e-12);
    CHECK(max_abs(spec.u1().adjoint() * spec.u1() - CMatrix::Identity(4, 4)) < 1e-12);
    const CMatrix g = spec.conditional_gate();
    CHECK(max_abs(g.adjoint() * g - CMatrix::Identity(8, 8)) < 1e-10);
    // register R_j is the last factor: block |0⟩ on even indices, |1⟩ on odd ones
    for (Index r = 0; r < 4; ++r)
        for (Index c = 0; c < 4; ++c) {
            CHECK(std::abs(g(2 * r, 2 * c) - spec.u0()(r, c)) < 1e-12);
            CHECK(std::abs(g(2 * r + 1, 2 * c + 1) - spec.u1()(r, c)) < 1e-12);
            CHECK(std::abs(g(2 * r, 2 * c + 1)) < 1e-15);
        }
}

TEST_CASE("pqc exact damping generator") {
    for (double p : {0.1, 0.3, 0.5, 0.9}) {
        const CMatrix h = amplitude_damping_hamiltonian(p);
        const CMatrix chi = stinespring_choi(expi_hermitian(h), basis_vector(2, 0) * basis_vector(2, 0).adjoint());
        CHECK(max_abs(chi - choi_from_kraus(channels::amplitude_damping(p)).matrix()) < 1e-10);
    }
}

TEST_CASE("pqc basis programs give the composed Stinespring channel") {
    Rng rng(9);
    const auto spec = pqc_default_gates(3);
    const auto proc = pqc_processor(spec);
    CHECK(proc.program_dim() == 16);
    const CMatrix theta = basis_vector(2, 0) * basis_vector(2, 0).adjoint();
    for (int bits = 0; bits < 8; ++bits) {
        std::vector<int> b{(bits >> 2) & 1, (bits >> 1) & 1, bits & 1};
        // explicit product, R1 applied first
        CMatrix u = CMatrix::Identity(4, 4);
        for (int j : b) u = (j ? spec.u1() : spec.u0()) * u;
        CHECK(max_abs(spec.circuit_unitary(b) - u) < 1e-12);
        // program |0⟩_{R0} ⊗ |b1 b2 b3⟩ with R1 most significant
        const Index idx = (b[0] << 2) | (b[1] << 1) | b[2];
        const CMatrix pi = kron(theta, basis_vector(8, idx) * basis_vector(8, idx).adjoint());
        CHECK(max_abs(proc.apply(pi) - stinespring_choi(u, theta)) < 1e-10);
    }
    check_processor_invariants(proc, rng, 5);
}

TEST_CASE("pqc measurement form equals coherent form for diagonal programs") {
    Rng rng(10);
    const auto spec = pqc_default_gates(2);
    const auto proc = pqc_processor(spec);
    for (int rep = 0; rep < 10; ++rep) {
        const auto probs = random_probabilities(8, rng);
        CMatrix pi = CMatrix::Zero(8, 8);
        CMatrix expected = CMatrix::Zero(4, 4);
        for (Index k = 0; k < 8; ++k) {
            pi(k, k) = probs[k];
            const CMatrix theta = basis_vector(2, k >> 2) * basis_vector(2, k >> 2).adjoint();
            expected += probs[k] * stinespring_choi(spec.circuit_unitary({int((k >> 1) & 1), int(k & 1)}), theta);
        }
        CHECK(max_abs(proc.apply(pi) - expected) < 1e-10);
    }
}

TEST_CASE("pqc trivial generators give the identity channel") {
    PqcSpec spec;
    spec.h0 = CMatrix::Zero(4, 4);
    spec.h1 = CMatrix::Zero(4, 4);
    spec.n_registers = 1;
    const auto proc = pqc_processor(spec);
    Rng rng(11);
    const CMatrix pi = random_state(4, rng).matrix();
    CHECK(max_abs(proc.apply(pi) - max_entangled_projector(2)) < 1e-12);
    check_processor_invariants(pqc_processor(pqc_default_gates(2)), rng, 5);
    CHECK_THROWS_AS(pqc_processor(pqc_default_gates(11)), Error);
}

TEST_CASE("from_kraus processor") {
    Rng rng(12);
    const auto ch = random_channel(3, 4, 3, rng);
    const auto proc = ProcessorMap::from_kraus("rand", 3, 2, 2, ch.ops());
    check_processor_invariants(proc, rng, 5);
    CHECK_THROWS_AS(proc.apply(CMatrix::Identity(2, 2)), Error);
}
