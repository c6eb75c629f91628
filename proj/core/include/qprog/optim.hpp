#pragma once

#include "qprog/costs.hpp"
#include "qprog/linalg.hpp"
#include "qprog/quantum.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace qprog {

// Step sizes, indexed from k = 1.
struct Schedule {
    enum class Type { InvSqrt, Harmonic, FwClassic, Geometric };
    Type type = Type::Harmonic;
    double a = 1.0;  // inv_sqrt: c; harmonic: a; geometric: initial step
    double b = 10.0; // harmonic: b; geometric: ratio in (0, 1)

    static Schedule inv_sqrt(double c) { return {Type::InvSqrt, c, 0.0}; }
    static Schedule harmonic(double a, double b) { return {Type::Harmonic, a, b}; }
    static Schedule fw_classic() { return {Type::FwClassic, 2.0, 2.0}; }
    static Schedule geometric(double a0, double ratio) { return {Type::Geometric, a0, ratio}; }

    double step(int k) const;
    void validate() const;
};

// Orthonormal program basis {|φ_i⟩} (columns).
class ClassicalProgramBasis {
public:
    explicit ClassicalProgramBasis(CMatrix vectors);
    const CMatrix& vectors() const noexcept { return v_; }
    Index dim() const noexcept { return v_.rows(); }

private:
    CMatrix v_;
};

struct ConstraintSet {
    enum class Type { FullStates, ClassicalDiagonal, ChoiSet };
    Type type = Type::FullStates;
    CMatrix basis;   // classical-diagonal mode
    Index d = 0;     // Choi-set mode: programs on d ⊗ d with Tr_B π = I/d
    double tol = 1e-11;

    static ConstraintSet full_states() { return {}; }
    static ConstraintSet classical_diagonal(const ClassicalProgramBasis& b) {
        return {Type::ClassicalDiagonal, b.vectors(), 0, 1e-11};
    }
    static ConstraintSet choi_set(Index d, double tol = 1e-11) { return {Type::ChoiSet, CMatrix(), d, tol}; }
};

struct OptimizerConfig {
    int iterations = 200;
    // unset: harmonic(1, 10) for projected subgradient, fw_classic for the
    // Frank-Wolfe family
    std::optional<Schedule> schedule;
    std::uint64_t seed = 0;
    ConstraintSet constraint;
    double smoothing_eta_scale = 0.1;
    int max_samples_per_iter = 0;  // 0: k samples at iteration k
    bool early_stop = false;
    int linesearch_evals = 40;
    // Called with (k, π_k) for every iterate, k = 1 being the initial program.
    std::function<void(int, const CMatrix&)> observer;
};

struct IterationRecord {
    int iter = 0;
    double cost = 0.0;
    double step_norm = 0.0;
    double wall_ms = 0.0;
};

struct OptimizerTrace {
    std::vector<IterationRecord> records;
    double best_cost = 0.0;
    CMatrix best_program;
    CMatrix final_program;

    // Header iter,cost,step_norm,wall_ms. With include_timing = false the
    // wall_ms field is left empty so the file is reproducible byte for byte.
    void write_csv(std::ostream& os, bool include_timing = true) const;
};

RVector simplex_project(const RVector& x);
std::vector<double> simplex_project(const std::vector<double>& x);

DensityOperator project_to_states(const CMatrix& x);
DensityOperator project_to_choi_set(const CMatrix& x, Index d, double tol = 1e-11, int max_sweeps = 10000);

OptimizerTrace projected_subgradient(const CostFunction& cost, const DensityOperator& init,
                                     const OptimizerConfig& cfg);
OptimizerTrace frank_wolfe(const CostFunction& cost, const DensityOperator& init, const OptimizerConfig& cfg);
OptimizerTrace frank_wolfe_linesearch(const CostFunction& cost, const DensityOperator& init,
                                      const OptimizerConfig& cfg);
OptimizerTrace stochastic_smoothing_fw(const CostFunction& cost, const DensityOperator& init,
                                       const OptimizerConfig& cfg);

struct UnitaryOptimum {
    DensityOperator program;
    double fidelity = 0.0;
};

UnitaryOptimum unitary_optimal_program(const ProcessorMap& processor, const CMatrix& u);

}  // namespace qprog
