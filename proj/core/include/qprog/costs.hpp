#pragma once

#include "qprog/linalg.hpp"
#include "qprog/processors.hpp"
#include "qprog/quantum.hpp"

#include <optional>
#include <string>

namespace qprog {

enum class CostKind { Trace, Infidelity, SmoothTrace, RelEntropy, Schatten, Diamond };

std::string to_string(CostKind kind);

// Distance between the target Choi matrix and Λ(π). Evaluation accepts any
// Hermitian π; Λ is extended linearly.
class CostFunction {
public:
    CostFunction(ProcessorMap processor, ChoiMatrix target, CostKind kind, double param = 0.0);

    CostKind kind() const noexcept { return kind_; }
    const ProcessorMap& processor() const noexcept { return processor_; }
    const ChoiMatrix& target() const noexcept { return target_; }
    double mu() const noexcept { return kind_ == CostKind::SmoothTrace ? param_ : 0.0; }
    double schatten_p() const noexcept { return kind_ == CostKind::Schatten ? param_ : 0.0; }
    // Gradient Lipschitz constant of the smooth trace cost, program_dim / μ.
    double lipschitz() const;
    // Duality-gap tolerance for the diamond kind.
    double sdp_tol() const noexcept { return sdp_tol_; }
    void set_sdp_tol(double tol) { sdp_tol_ = tol; }

    double eval(const CMatrix& pi) const;
    bool has_gradient() const noexcept;
    // A subgradient (the gradient where differentiable). Throws for
    // evaluation-only kinds.
    CMatrix gradient(const CMatrix& pi) const;

private:
    ProcessorMap processor_;
    ChoiMatrix target_;
    CostKind kind_;
    double param_;
    double sdp_tol_ = 1e-6;
    CMatrix sqrt_target_;
};

CostFunction trace_cost(const ProcessorMap& processor, const ChoiMatrix& target);
CostFunction infidelity_cost(const ProcessorMap& processor, const ChoiMatrix& target);
CostFunction smooth_trace_cost(const ProcessorMap& processor, const ChoiMatrix& target, double mu);
CostFunction rel_entropy_cost(const ProcessorMap& processor, const ChoiMatrix& target);
CostFunction schatten_cost(const ProcessorMap& processor, const ChoiMatrix& target, double p);
CostFunction diamond_cost(const ProcessorMap& processor, const ChoiMatrix& target, double tol = 1e-6);

// Huber penalty: x²/(2μ) for |x| < μ, |x| − μ/2 otherwise.
double huber(double x, double mu);
double huber_derivative(double x, double mu);

// Pinsker constant for the trace norm with entropies in bits: sqrt(2 ln 2).
double pinsker_constant();

struct BoundReport {
    double c1 = 0.0;
    double cf = 0.0;
    double cf_bound = 0.0;       // 2 sqrt(C_F), upper bound on c1
    double c_r = 0.0;            // relative-entropy cost (may be +inf)
    double pinsker_bound = 0.0;  // sqrt(2 ln 2) sqrt(C_R), upper bound on c1
    double diamond_lower = 0.0;  // c1
    double diamond_upper = 0.0;  // d * c1
    double spectral_upper = 0.0;
    std::optional<double> diamond;
    std::optional<double> diamond_gap;
};

BoundReport bound_report(const ProcessorMap& processor, const ChoiMatrix& target, const CMatrix& pi,
                         bool with_diamond = false, double sdp_tol = 1e-6);

}  // namespace qprog
