#pragma once

#include "qprog/linalg.hpp"
#include "qprog/quantum.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace qprog {

inline constexpr Index kDefaultDimLimit = Index{1} << 13;

// Linear map Λ from program operators to Choi operators, with its
// Hilbert–Schmidt adjoint Λ*. Both act on arbitrary (not only positive)
// operators. Copies share the immutable implementation.
class ProcessorMap {
public:
    using LinearMap = std::function<CMatrix(const CMatrix&)>;

    ProcessorMap(std::string label, Index program_dim, Index choi_d_in, Index choi_d_out,
                 LinearMap apply, LinearMap dual);

    static ProcessorMap from_kraus(std::string label, Index program_dim, Index choi_d_in, Index choi_d_out,
                                   std::vector<CMatrix> kraus);

    const std::string& label() const;
    Index program_dim() const;
    Index choi_d_in() const;
    Index choi_d_out() const;
    Index choi_dim() const { return choi_d_in() * choi_d_out(); }

    CMatrix apply(const CMatrix& pi) const;
    CMatrix dual(const CMatrix& x) const;

    // Kraus operators (choi_dim × program_dim), built on first use.
    const std::vector<CMatrix>& kraus_ops() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct TeleSpec {
    Index d = 2;
    std::vector<CMatrix> unitaries;
    std::vector<CMatrix> bell_projectors;
};

TeleSpec make_tele_spec(Index d);
ProcessorMap teleportation_processor(Index d);

// Program ordering for PBT: ports interleaved, (A1 B1)(A2 B2)...(AN BN).
// POVM operators act on A1..AN ⊗ C with C last.
struct PbtSpec {
    Index n_ports = 1;
    Index d = 2;
    std::vector<CMatrix> povm;
    CMatrix sigma_ac;
    CMatrix delta;
};

PbtSpec make_pbt_spec(Index n_ports, Index d, Index dim_limit = kDefaultDimLimit);
ProcessorMap pbt_processor(Index n_ports, Index d, Index dim_limit = kDefaultDimLimit);
ProcessorMap pbt_processor(const PbtSpec& spec, Index dim_limit = kDefaultDimLimit);

// Single-copy program χ standing for χ^{⊗N}. Built from Tr_{Ā_i} Π_i.
ProcessorMap pbt_reduced_processor(Index n_ports, Index d, Index dim_limit = kDefaultDimLimit);
ProcessorMap pbt_reduced_processor(const PbtSpec& spec);

// χ^{⊗N} in the interleaved port ordering.
CMatrix pbt_choi_program(const CMatrix& chi, Index n_ports);

DensityOperator symmetrize_program(const DensityOperator& pi, Index n_ports, Index d);
// C(N + d^4 - 1, d^4 - 1); throws when it does not fit in 64 bits.
std::uint64_t symmetric_param_count(Index n_ports, Index d);

// Layout B ⊗ A ⊗ R0 ⊗ R1 ⊗ ... ⊗ RN. Register R_j selects e^{i t0 H0}
// (|0⟩) or e^{i t1 H1} (|1⟩) on A ⊗ R0; R1's gate is applied first.
struct PqcSpec {
    CMatrix h0;
    CMatrix h1;
    double t0 = 1.0;
    double t1 = 1.0;
    Index n_registers = 1;
    CVector theta0;
    std::vector<Index> binary_powers;  // informational; not used by the map

    CMatrix u0() const;
    CMatrix u1() const;
    // Û_j on A ⊗ R0 ⊗ R_j (8 × 8).
    CMatrix conditional_gate() const;
    std::vector<CMatrix> conditional_gates() const;
    // U_{b_N} ... U_{b_1} on A ⊗ R0; bits[j-1] is the value of register R_j.
    CMatrix circuit_unitary(const std::vector<int>& bits) const;
};

CMatrix amplitude_damping_hamiltonian(double p);
PqcSpec pqc_default_gates(Index n_registers);
// Default gate set together with the exact damping generator, for checks.
struct PqcAdSetup {
    PqcSpec spec;
    CMatrix h_ad;
};
PqcAdSetup pqc_ad_default(double p, Index n_registers = 4);

ProcessorMap pqc_processor(const PqcSpec& spec, Index dim_limit = kDefaultDimLimit);

// Choi matrix (on B ⊗ A) of ρ ↦ Tr_{R0}[U (ρ ⊗ θ) U†] for U on A ⊗ R0.
CMatrix stinespring_choi(const CMatrix& u, const CMatrix& theta);

}  // namespace qprog
