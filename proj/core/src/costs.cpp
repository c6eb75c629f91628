#include "qprog/costs.hpp"

#include "qprog/error.hpp"
#include "qprog/sdp.hpp"

#include <cmath>
#include <limits>

namespace qprog {

std::string to_string(CostKind kind) {
    switch (kind) {
        case CostKind::Trace: return "trace";
        case CostKind::Infidelity: return "infidelity";
        case CostKind::SmoothTrace: return "smooth_trace";
        case CostKind::RelEntropy: return "rel_entropy";
        case CostKind::Schatten: return "schatten";
        case CostKind::Diamond: return "diamond";
    }
    return "unknown";
}

double huber(double x, double mu) {
    const double a = std::abs(x);
    return a < mu ? x * x / (2.0 * mu) : a - mu / 2.0;
}

double huber_derivative(double x, double mu) {
    if (std::abs(x) < mu) return x / mu;
    return x > 0.0 ? 1.0 : -1.0;
}

double pinsker_constant() { return std::sqrt(2.0 * std::log(2.0)); }

CostFunction::CostFunction(ProcessorMap processor, ChoiMatrix target, CostKind kind, double param)
    : processor_(std::move(processor)), target_(std::move(target)), kind_(kind), param_(param) {
    if (processor_.choi_d_in() != target_.d_in() || processor_.choi_d_out() != target_.d_out())
        throw dimension_error("processor output dimensions do not match the target Choi matrix");
    if (kind_ == CostKind::SmoothTrace && !(param_ > 0.0)) throw argument_error("smoothing parameter mu must be > 0");
    if (kind_ == CostKind::Schatten && !(param_ >= 1.0)) throw argument_error("Schatten cost requires p >= 1");
    if (kind_ == CostKind::Infidelity) sqrt_target_ = psd_sqrt(target_.matrix());
}

double CostFunction::lipschitz() const {
    if (kind_ != CostKind::SmoothTrace) return std::numeric_limits<double>::infinity();
    return static_cast<double>(processor_.program_dim()) / param_;
}

bool CostFunction::has_gradient() const noexcept {
    return kind_ == CostKind::Trace || kind_ == CostKind::Infidelity || kind_ == CostKind::SmoothTrace;
}

namespace {

// Tr √(√χ M √χ) with negative eigenvalues (possible off the state space)
// clipped to zero.
struct FidelityParts {
    double f = 0.0;
    HermEig eig;
};

FidelityParts fidelity_parts(const CMatrix& sqrt_target, const CMatrix& chi_pi) {
    FidelityParts out;
    out.eig = herm_eig(hermitian_part(sqrt_target * chi_pi * sqrt_target));
    for (Index k = 0; k < out.eig.values.size(); ++k) out.f += std::sqrt(std::max(out.eig.values(k), 0.0));
    return out;
}

}  // namespace

double CostFunction::eval(const CMatrix& pi) const {
    const CMatrix chi_pi = processor_.apply(pi);
    const CMatrix& chi_e = target_.matrix();
    switch (kind_) {
        case CostKind::Trace: return trace_norm(hermitian_part(chi_e - chi_pi));
        case CostKind::Infidelity: {
            const double f = fidelity_parts(sqrt_target_, chi_pi).f;
            return 1.0 - f * f;
        }
        case CostKind::SmoothTrace: {
            const HermEig e = herm_eig(hermitian_part(chi_pi - chi_e));
            double s = 0.0;
            for (Index k = 0; k < e.values.size(); ++k) s += huber(e.values(k), param_);
            return s;
        }
        case CostKind::RelEntropy: {
            const CMatrix p = hermitian_part(chi_pi);
            return std::min(relative_entropy(chi_e, p), relative_entropy(p, chi_e));
        }
        case CostKind::Schatten: return schatten_norm(hermitian_part(chi_e - chi_pi), param_);
        case CostKind::Diamond: {
            SdpOptions opts;
            opts.tol = sdp_tol_;
            return diamond_distance(hermitian_part(chi_e - chi_pi), target_.d_in(), opts).objective;
        }
    }
    throw argument_error("unknown cost kind");
}

CMatrix CostFunction::gradient(const CMatrix& pi) const {
    const CMatrix chi_pi = processor_.apply(pi);
    const CMatrix& chi_e = target_.matrix();
    switch (kind_) {
        case CostKind::Trace: {
            const HermEig e = herm_eig(hermitian_part(chi_pi - chi_e));
            RVector s(e.values.size());
            const double tiny = 1e-14 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
            for (Index k = 0; k < s.size(); ++k)
                s(k) = std::abs(e.values(k)) <= tiny ? 0.0 : (e.values(k) > 0.0 ? 1.0 : -1.0);
            return hermitian_part(processor_.dual(e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint()));
        }
        case CostKind::Infidelity: {
            const FidelityParts fp = fidelity_parts(sqrt_target_, chi_pi);
            const double top = std::max(fp.eig.values.cwiseAbs().maxCoeff(), 0.0);
            RVector inv(fp.eig.values.size());
            for (Index k = 0; k < inv.size(); ++k) {
                const double l = fp.eig.values(k);
                inv(k) = (l > kSupportCutoff * top && l > 0.0) ? 1.0 / std::sqrt(l) : 0.0;
            }
            const CMatrix m_inv = fp.eig.vectors * inv.cast<cplx>().asDiagonal() * fp.eig.vectors.adjoint();
            const CMatrix grad_f = 0.5 * processor_.dual(sqrt_target_ * m_inv * sqrt_target_);
            // ∇(1 − F²) = −2F ∇F
            return hermitian_part(-2.0 * fp.f * grad_f);
        }
        case CostKind::SmoothTrace: {
            const HermEig e = herm_eig(hermitian_part(chi_pi - chi_e));
            RVector s(e.values.size());
            for (Index k = 0; k < s.size(); ++k) s(k) = huber_derivative(e.values(k), param_);
            return hermitian_part(processor_.dual(e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint()));
        }
        default: throw Error("no_gradient", "cost kind '" + to_string(kind_) + "' is evaluation-only");
    }
}

CostFunction trace_cost(const ProcessorMap& processor, const ChoiMatrix& target) {
    return CostFunction(processor, target, CostKind::Trace);
}
CostFunction infidelity_cost(const ProcessorMap& processor, const ChoiMatrix& target) {
    return CostFunction(processor, target, CostKind::Infidelity);
}
CostFunction smooth_trace_cost(const ProcessorMap& processor, const ChoiMatrix& target, double mu) {
    return CostFunction(processor, target, CostKind::SmoothTrace, mu);
}
CostFunction rel_entropy_cost(const ProcessorMap& processor, const ChoiMatrix& target) {
    return CostFunction(processor, target, CostKind::RelEntropy);
}
CostFunction schatten_cost(const ProcessorMap& processor, const ChoiMatrix& target, double p) {
    return CostFunction(processor, target, CostKind::Schatten, p);
}
CostFunction diamond_cost(const ProcessorMap& processor, const ChoiMatrix& target, double tol) {
    CostFunction c(processor, target, CostKind::Diamond);
    c.set_sdp_tol(tol);
    return c;
}

BoundReport bound_report(const ProcessorMap& processor, const ChoiMatrix& target, const CMatrix& pi,
                         bool with_diamond, double sdp_tol) {
    BoundReport r;
    const CMatrix chi_pi = hermitian_part(processor.apply(pi));
    const CMatrix diff = hermitian_part(target.matrix() - chi_pi);
    const auto d = static_cast<double>(target.d_in());
    r.c1 = trace_norm(diff);
    const double f = fidelity(target.matrix(), chi_pi);
    r.cf = std::max(0.0, 1.0 - f * f);
    r.cf_bound = 2.0 * std::sqrt(r.cf);
    r.c_r = std::min(relative_entropy(target.matrix(), chi_pi), relative_entropy(chi_pi, target.matrix()));
    r.pinsker_bound = pinsker_constant() * std::sqrt(r.c_r);
    r.diamond_lower = r.c1;
    r.diamond_upper = d * r.c1;
    r.spectral_upper = spectral_diamond_upper(target.matrix(), chi_pi, target.d_in());
    if (with_diamond) {
        SdpOptions opts;
        opts.tol = sdp_tol;
        const SdpSolution s = diamond_distance(diff, target.d_in(), opts);
        r.diamond = s.objective;
        r.diamond_gap = s.duality_gap;
    }
    return r;
}

}  // namespace qprog
