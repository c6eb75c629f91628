#pragma once

#include "qprog/costs.hpp"
#include "qprog/optim.hpp"
#include "qprog/processors.hpp"
#include "qprog/quantum.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qprog::cli {

using nlohmann::json;

// Resolved form of one JSON experiment document. Unknown keys are rejected so
// that typos surface as errors instead of silently falling back to defaults.
struct OptimizerSpec {
    std::string method = "subgradient";  // subgradient | frank_wolfe | frank_wolfe_linesearch | stochastic_fw | sdp
    int iterations = 200;
    std::optional<Schedule> schedule;  // per-method default when absent
    std::string constraint = "full";   // full | choi_set
    std::string init = "maximally_mixed";
    double eta_scale = 0.1;
    bool early_stop = false;
    int linesearch_evals = 40;
};

struct SweepSpec {
    std::string kind = "grid";  // grid | pbt_identity
    std::string param;          // short name or JSON pointer into the config
    std::vector<json> values;
    std::vector<int> n_list;    // pbt_identity
    Index d = 2;
};

struct ExperimentConfig {
    json raw;  // effective document after flag overrides
    json channel;
    json channel_b;
    json processor;
    std::string cost_kind = "trace";
    double cost_param = 0.0;
    OptimizerSpec optimizer;
    std::optional<SweepSpec> sweep;
    std::string output_path;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    bool diamond_in_bounds = true;
    int jobs = 0;  // 0: hardware concurrency
};

ExperimentConfig parse_config(const json& doc);

KrausChannel build_channel(const json& spec);
ProcessorMap build_processor(const json& spec);
CostFunction build_cost(const ExperimentConfig& cfg, const ProcessorMap& proc, const ChoiMatrix& target);
Schedule default_schedule(const std::string& method);

// Program that a "use the target's Choi matrix" strategy would load; empty
// for processors without such a natural choice.
std::optional<CMatrix> choi_strategy_program(const json& processor_spec, const ChoiMatrix& target);

struct OptimizeResult {
    OptimizerTrace trace;
    BoundReport bounds;
    double c1_choi_program = 0.0;
    bool has_choi_program = false;
};

OptimizeResult run_optimize(const ExperimentConfig& cfg);
json run_diamond(const ExperimentConfig& cfg);
// Rows of the sweep CSV, header first, each without the line terminator.
std::vector<std::string> run_sweep(const ExperimentConfig& cfg);

json bounds_to_json(const BoundReport& b);

// Entry point shared by the executable and the tests.
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qprog::cli
