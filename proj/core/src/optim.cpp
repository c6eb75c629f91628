#include "qprog/optim.hpp"

#include "qprog/error.hpp"
#include "qprog/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace qprog {

double Schedule::step(int k) const {
    const auto kk = static_cast<double>(std::max(k, 1));
    switch (type) {
        case Type::InvSqrt: return a / std::sqrt(kk);
        case Type::Harmonic: return a / (b + kk);
        case Type::FwClassic: return 2.0 / (kk + 2.0);
        case Type::Geometric: return a * std::pow(b, kk - 1.0);
    }
    return 0.0;
}

void Schedule::validate() const {
    switch (type) {
        case Type::InvSqrt:
            if (!(a > 0.0)) throw argument_error("inv_sqrt schedule needs c > 0");
            break;
        case Type::Harmonic:
            if (!(a > 0.0) || !(b > -1.0)) throw argument_error("harmonic schedule needs a > 0 and b > -1");
            break;
        case Type::FwClassic: break;
        case Type::Geometric:
            if (!(a > 0.0) || !(b > 0.0 && b <= 1.0)) throw argument_error("geometric schedule needs a > 0, 0 < r <= 1");
            break;
    }
}

ClassicalProgramBasis::ClassicalProgramBasis(CMatrix vectors) : v_(std::move(vectors)) {
    if (v_.rows() != v_.cols() || v_.rows() == 0) throw dimension_error("classical basis must be a square matrix");
    const CMatrix gram = v_.adjoint() * v_;
    if ((gram - CMatrix::Identity(v_.cols(), v_.cols())).cwiseAbs().maxCoeff() > 1e-10)
        throw argument_error("classical basis is not orthonormal");
}

void OptimizerTrace::write_csv(std::ostream& os, bool include_timing) const {
    os << "iter,cost,step_norm,wall_ms\r\n";
    const auto old = os.precision(17);
    for (const auto& r : records) {
        os << r.iter << ',' << r.cost << ',' << r.step_norm << ',';
        if (include_timing) os << r.wall_ms;
        os << "\r\n";
    }
    os.precision(old);
}

// ---------------------------------------------------------------- projections

RVector simplex_project(const RVector& x) {
    const Index n = x.size();
    if (n == 0) return x;
    if (!x.allFinite()) throw argument_error("simplex_project: non-finite input");
    RVector u = x;
    std::sort(u.data(), u.data() + n, std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (Index k = 0; k < n; ++k) {
        cum += u(k);
        const double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (u(k) > t) theta = t;
    }
    return (x.array() - theta).cwiseMax(0.0).matrix();
}

std::vector<double> simplex_project(const std::vector<double>& x) {
    const RVector p = simplex_project(Eigen::Map<const RVector>(x.data(), static_cast<Index>(x.size())).eval());
    return {p.data(), p.data() + p.size()};
}

namespace {

CMatrix project_states_matrix(const CMatrix& x) {
    const HermEig e = herm_eig(hermitian_part(x));
    const RVector lam = simplex_project(e.values);
    return hermitian_part(e.vectors * lam.cast<cplx>().asDiagonal() * e.vectors.adjoint());
}

CMatrix project_affine_choi(const CMatrix& x, Index d) {
    const CMatrix red = partial_trace(x, {d, d}, {0});
    const CMatrix dev = red - CMatrix::Identity(d, d) / static_cast<double>(d);
    return x - kron(dev, CMatrix::Identity(d, d)) / static_cast<double>(d);
}

double choi_violation(const CMatrix& x, Index d) {
    const CMatrix red = partial_trace(x, {d, d}, {0});
    return (red - CMatrix::Identity(d, d) / static_cast<double>(d)).norm();
}

}  // namespace

DensityOperator project_to_states(const CMatrix& x) {
    if (!is_hermitian(x, 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff())))
        throw argument_error("project_to_states expects a Hermitian operator");
    return DensityOperator(project_states_matrix(x));
}

DensityOperator project_to_choi_set(const CMatrix& x, Index d, double tol, int max_sweeps) {
    if (x.rows() != d * d || x.cols() != d * d) throw dimension_error("project_to_choi_set expects a d^2 x d^2 operator");
    if (!is_hermitian(x, 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff())))
        throw argument_error("project_to_choi_set expects a Hermitian operator");
    // Dykstra: A = states, B = {Tr_B = I/d}
    CMatrix xb = hermitian_part(x);
    CMatrix p = CMatrix::Zero(x.rows(), x.cols()), q = p;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const CMatrix ya = project_states_matrix(xb + p);
        p = xb + p - ya;
        const CMatrix xn = project_affine_choi(ya + q, d);
        q = ya + q - xn;
        const double change = (xn - xb).norm();
        xb = xn;
        const double gap = (ya - xn).norm();
        if (change <= tol && gap <= tol) {
            // finish on the state set; the affine residual is at most `gap`
            const CMatrix out = project_states_matrix(xb);
            if (choi_violation(out, d) <= std::max(10.0 * tol, 1e-10)) return DensityOperator(out);
        }
    }
    throw Error("not_converged", "project_to_choi_set did not converge in " + std::to_string(max_sweeps) + " sweeps");
}

// ---------------------------------------------------------------- drivers

namespace {

using Clock = std::chrono::steady_clock;

void check_init(const DensityOperator& init, const CostFunction& cost, const ConstraintSet& c) {
    if (init.dim() != cost.processor().program_dim())
        throw dimension_error("initial program dimension does not match the processor");
    switch (c.type) {
        case ConstraintSet::Type::FullStates: return;
        case ConstraintSet::Type::ClassicalDiagonal: {
            if (c.basis.rows() != init.dim()) throw dimension_error("classical basis dimension mismatch");
            CMatrix in_basis = c.basis.adjoint() * init.matrix() * c.basis;
            in_basis.diagonal().setZero();
            if (in_basis.cwiseAbs().maxCoeff() > 1e-10)
                throw Error("infeasible_init", "initial program is not diagonal in the classical basis");
            return;
        }
        case ConstraintSet::Type::ChoiSet:
            if (c.d * c.d != init.dim()) throw dimension_error("Choi-set dimension mismatch");
            if (choi_violation(init.matrix(), c.d) > 1e-8)
                throw Error("infeasible_init", "initial program violates Tr_B = I/d");
            return;
    }
}

CMatrix project(const CMatrix& x, const ConstraintSet& c) {
    switch (c.type) {
        case ConstraintSet::Type::FullStates: return project_states_matrix(x);
        case ConstraintSet::Type::ClassicalDiagonal: {
            const CMatrix y = c.basis.adjoint() * x * c.basis;
            const RVector lam = simplex_project(RVector(y.diagonal().real()));
            return hermitian_part(c.basis * lam.cast<cplx>().asDiagonal() * c.basis.adjoint());
        }
        case ConstraintSet::Type::ChoiSet: return project_to_choi_set(x, c.d, c.tol).matrix();
    }
    return x;
}

// Minimizer of Tr(g σ) over the pure (or basis) states of the constraint set.
CMatrix linear_minimizer(const CMatrix& g, const ConstraintSet& c) {
    switch (c.type) {
        case ConstraintSet::Type::FullStates: {
            const CVector v = extremal_eigenvector(hermitian_part(g), false);
            return v * v.adjoint();
        }
        case ConstraintSet::Type::ClassicalDiagonal: {
            const CMatrix y = c.basis.adjoint() * g * c.basis;
            Index best = 0;
            for (Index i = 1; i < y.rows(); ++i)
                if (y(i, i).real() < y(best, best).real() - 1e-14) best = i;
            const CVector v = c.basis.col(best);
            return v * v.adjoint();
        }
        case ConstraintSet::Type::ChoiSet:
            throw Error("unsupported_constraint", "Frank-Wolfe needs a linear oracle; the Choi-set constraint has none");
    }
    return g;
}

class Recorder {
public:
    explicit Recorder(const OptimizerConfig& cfg) : cfg_(cfg), start_(Clock::now()) {}

    void add(int k, const CMatrix& pi, double cost, double step_norm) {
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        trace_.records.push_back({k, cost, step_norm, ms});
        if (trace_.records.size() == 1 || cost < trace_.best_cost) {
            trace_.best_cost = cost;
            trace_.best_program = pi;
        }
        trace_.final_program = pi;
        if (cfg_.observer) cfg_.observer(k, pi);
    }

    bool should_stop() const {
        if (!cfg_.early_stop || trace_.records.size() <= 50) return false;
        double older = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 50 < trace_.records.size(); ++i) older = std::min(older, trace_.records[i].cost);
        return older - trace_.best_cost < 1e-10;
    }

    OptimizerTrace finish() { return std::move(trace_); }

private:
    const OptimizerConfig& cfg_;
    Clock::time_point start_;
    OptimizerTrace trace_;
};

void require_gradient(const CostFunction& cost) {
    if (!cost.has_gradient())
        throw Error("no_gradient", "cost kind '" + to_string(cost.kind()) + "' supplies no gradient");
}

template <class Direction>
OptimizerTrace fw_driver(const CostFunction& cost, const DensityOperator& init, const OptimizerConfig& cfg,
                         bool line_search, Direction direction) {
    require_gradient(cost);
    check_init(init, cost, cfg.constraint);
    if (cfg.constraint.type == ConstraintSet::Type::ChoiSet)
        throw Error("unsupported_constraint", "Frank-Wolfe needs a linear oracle; the Choi-set constraint has none");
    const Schedule schedule = cfg.schedule.value_or(Schedule::fw_classic());
    schedule.validate();
    Recorder rec(cfg);
    CMatrix pi = init.matrix();
    double c = cost.eval(pi);
    rec.add(1, pi, c, 0.0);
    for (int i = 1; i <= cfg.iterations; ++i) {
        const CMatrix g = direction(i, pi);
        const CMatrix sigma = linear_minimizer(g, cfg.constraint);
        const CMatrix delta = sigma - pi;
        double gamma;
        double c_new;
        if (line_search) {
            // golden-section search of the true cost on [0, 1]
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double lo = 0.0, hi = 1.0;
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            double f1 = cost.eval(pi + x1 * delta), f2 = cost.eval(pi + x2 * delta);
            double best_g = f1 < f2 ? x1 : x2, best_f = std::min(f1, f2);
            for (int e = 2; e < cfg.linesearch_evals; ++e) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = cost.eval(pi + x1 * delta);
                    if (f1 < best_f) best_f = f1, best_g = x1;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = cost.eval(pi + x2 * delta);
                    if (f2 < best_f) best_f = f2, best_g = x2;
                }
            }
            if (best_f < c - 1e-14 * std::max(1.0, std::abs(c))) {
                gamma = best_g;
                c_new = best_f;
            } else {
                gamma = 0.0;
                c_new = c;
            }
        } else {
            gamma = std::clamp(schedule.type == Schedule::Type::FwClassic ? 2.0 / (i + 2.0) : schedule.step(i), 0.0,
                               1.0);
            c_new = std::numeric_limits<double>::quiet_NaN();
        }
        const CMatrix next = hermitian_part(pi + gamma * delta);
        const double step_norm = (next - pi).norm();
        pi = next;
        c = line_search ? c_new : cost.eval(pi);
        rec.add(i + 1, pi, c, step_norm);
        if (rec.should_stop()) break;
    }
    return rec.finish();
}

}  // namespace

OptimizerTrace projected_subgradient(const CostFunction& cost, const DensityOperator& init,
                                     const OptimizerConfig& cfg) {
    require_gradient(cost);
    const Schedule schedule = cfg.schedule.value_or(Schedule::harmonic(1.0, 10.0));
    schedule.validate();
    check_init(init, cost, cfg.constraint);
    Recorder rec(cfg);
    CMatrix pi = init.matrix();
    rec.add(1, pi, cost.eval(pi), 0.0);
    for (int i = 1; i <= cfg.iterations; ++i) {
        const CMatrix g = cost.gradient(pi);
        const CMatrix next = project(pi - schedule.step(i) * g, cfg.constraint);
        const double step_norm = (next - pi).norm();
        pi = next;
        rec.add(i + 1, pi, cost.eval(pi), step_norm);
        if (rec.should_stop()) break;
    }
    return rec.finish();
}

OptimizerTrace frank_wolfe(const CostFunction& cost, const DensityOperator& init, const OptimizerConfig& cfg) {
    return fw_driver(cost, init, cfg, false, [&](int, const CMatrix& pi) { return cost.gradient(pi); });
}

OptimizerTrace frank_wolfe_linesearch(const CostFunction& cost, const DensityOperator& init,
                                      const OptimizerConfig& cfg) {
    return fw_driver(cost, init, cfg, true, [&](int, const CMatrix& pi) { return cost.gradient(pi); });
}

OptimizerTrace stochastic_smoothing_fw(const CostFunction& cost, const DensityOperator& init,
                                       const OptimizerConfig& cfg) {
    if (!(cfg.smoothing_eta_scale >= 0.0)) throw argument_error("smoothing_eta_scale must be >= 0");
    Rng rng(cfg.seed);
    const Index m = init.dim();
    return fw_driver(cost, init, cfg, false, [&](int k, const CMatrix& pi) {
        const double eta = cfg.smoothing_eta_scale / std::sqrt(static_cast<double>(k));
        const int samples = cfg.max_samples_per_iter > 0 ? std::min(k, cfg.max_samples_per_iter) : k;
        CMatrix g = CMatrix::Zero(m, m);
        for (int j = 0; j < samples; ++j) {
            CMatrix sigma = random_hermitian(m, rng);
            sigma /= schatten_norm(sigma, std::numeric_limits<double>::infinity());
            g += cost.gradient(pi + eta * sigma);
        }
        return CMatrix(g / static_cast<double>(samples));
    });
}

UnitaryOptimum unitary_optimal_program(const ProcessorMap& processor, const CMatrix& u) {
    if (u.rows() != processor.choi_d_in() || u.cols() != processor.choi_d_out())
        throw dimension_error("unitary does not match the processor's channel dimensions");
    if ((u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() > 1e-10)
        throw argument_error("unitary_optimal_program: matrix is not unitary");
    const CVector chi = unitary_choi_vector(u);
    const CMatrix g = hermitian_part(processor.dual(chi * chi.adjoint()));
    const CVector v = extremal_eigenvector(g, true);
    DensityOperator program = DensityOperator::pure(v);
    const double overlap = (chi.adjoint() * processor.apply(program.matrix()) * chi)(0, 0).real();
    return {std::move(program), std::sqrt(std::max(overlap, 0.0))};
}

}  // namespace qprog
