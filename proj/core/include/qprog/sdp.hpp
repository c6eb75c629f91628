#pragma once

#include "qprog/error.hpp"
#include "qprog/linalg.hpp"
#include "qprog/processors.hpp"
#include "qprog/quantum.hpp"

#include <optional>

namespace qprog {

// Hermitian variables are stored as real coordinates in the orthonormal basis
// {E_ii} ∪ {(E_ij + E_ji)/√2} ∪ {i(E_ij − E_ji)/√2}, i < j.
std::vector<CMatrix> hermitian_basis(Index n);

struct SdpOptions {
    double tol = 1e-6;                // duality-gap target
    int max_newton_per_stage = 200;   // Newton steps per barrier stage
    int max_stages = 40;
    double barrier_growth = 10.0;
};

struct SdpSolution {
    double objective = 0.0;  // 2 ‖Tr₂ Z‖_∞ at the returned Z
    double lower_bound = 0.0;
    double duality_gap = 0.0;
    double t = 0.0;
    CMatrix z;
    std::optional<CMatrix> pi;
    int iterations = 0;  // Newton steps
};

class SdpError : public Error {
public:
    SdpError(const std::string& msg, SdpSolution last) : Error("sdp_not_converged", msg), last_(std::move(last)) {}
    const SdpSolution& last_iterate() const noexcept { return last_; }

private:
    SdpSolution last_;
};

// min 2t s.t. tI ⪰ Tr_out Z, Z ⪰ 0, Z ⪰ d_in χ_Ω. Equals ‖E − F‖_⋄ when
// χ_Ω = χ_E − χ_F.
SdpSolution diamond_distance(const CMatrix& chi_omega, Index d_in, const SdpOptions& opts = {});
SdpSolution diamond_distance(const CMatrix& chi_omega, Index d_in, double tol);

enum class ProgramConstraint { Full, ChoiSet };

// Joint minimization over Z and the program π.
SdpSolution optimal_program_sdp(const ProcessorMap& processor, const ChoiMatrix& target, const SdpOptions& opts = {},
                                ProgramConstraint constraint = ProgramConstraint::Full);

// d ‖Tr₂ |χ_E − χ_π|‖_∞
double spectral_diamond_upper(const CMatrix& chi_e, const CMatrix& chi_pi, Index d_in);
double spectral_diamond_upper(const ChoiMatrix& chi_e, const ChoiMatrix& chi_pi);

}  // namespace qprog
