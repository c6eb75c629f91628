#include "cli.hpp"

#include "qprog/error.hpp"
#include "qprog/json_io.hpp"
#include "qprog/sdp.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace qprog::cli {

namespace {

Error config_error(const std::string& msg) { return Error("invalid_config", msg); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw config_error(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw config_error("unknown key '" + key + "' in " + where);
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw config_error(where + " requires '" + key + "'");
    return get_or<T>(obj, key, T{});
}

Schedule parse_schedule(const json& s) {
    const auto type = require<std::string>(s, "type", "schedule");
    Schedule out;
    if (type == "inv_sqrt") {
        check_keys(s, {"type", "c"}, "schedule");
        out = Schedule::inv_sqrt(get_or(s, "c", 1.0));
    } else if (type == "harmonic") {
        check_keys(s, {"type", "a", "b"}, "schedule");
        out = Schedule::harmonic(get_or(s, "a", 1.0), get_or(s, "b", 10.0));
    } else if (type == "fw_classic") {
        check_keys(s, {"type"}, "schedule");
        out = Schedule::fw_classic();
    } else if (type == "geometric") {
        check_keys(s, {"type", "a0", "ratio"}, "schedule");
        out = Schedule::geometric(get_or(s, "a0", 0.1), get_or(s, "ratio", 0.98));
    } else {
        throw config_error("unknown schedule type '" + type + "'");
    }
    out.validate();
    return out;
}

std::string sweep_pointer(const std::string& param) {
    if (!param.empty() && param.front() == '/') return param;
    if (param == "p" || param == "theta") return "/channel/params/" + param;
    if (param == "n_ports" || param == "N") return "/processor/n_ports";
    if (param == "n_registers") return "/processor/pqc/n_registers";
    if (param == "mu") return "/cost/mu";
    throw config_error("unknown sweep parameter '" + param + "'; use a JSON pointer such as /channel/params/p");
}

SweepSpec parse_sweep(const json& s) {
    SweepSpec out;
    out.kind = get_or<std::string>(s, "kind", "grid");
    if (out.kind == "pbt_identity") {
        check_keys(s, {"kind", "n_list", "d"}, "sweep");
        out.n_list = require<std::vector<int>>(s, "n_list", "sweep");
        out.d = get_or<Index>(s, "d", 2);
        if (out.n_list.empty()) throw config_error("sweep.n_list is empty");
        return out;
    }
    if (out.kind != "grid") throw config_error("unknown sweep kind '" + out.kind + "'");
    check_keys(s, {"kind", "param", "values", "start", "stop", "step"}, "sweep");
    out.param = require<std::string>(s, "param", "sweep");
    sweep_pointer(out.param);
    if (s.contains("values")) {
        if (!s["values"].is_array() || s["values"].empty()) throw config_error("sweep.values must be a non-empty array");
        for (const auto& v : s["values"]) out.values.push_back(v);
    } else {
        const double start = require<double>(s, "start", "sweep");
        const double stop = require<double>(s, "stop", "sweep");
        const double step = require<double>(s, "step", "sweep");
        if (!(step > 0.0) || stop < start) throw config_error("sweep range needs step > 0 and stop >= start");
        // grid points computed from the index so that 0.1-style steps land on
        // the decimal values instead of accumulating rounding error
        const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) {
            const double v = start + static_cast<double>(i) * step;
            out.values.push_back(std::round(v * 1e12) / 1e12);
        }
    }
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string csv_field(const json& v) {
    if (v.is_number()) return fmt(v.get<double>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

Index processor_d(const json& spec) { return get_or<Index>(spec, "d", 2); }

CMatrix constant_output_kraus_matrix(const CMatrix& chi) { return psd_sqrt(hermitian_part(chi)); }

// Processor with a one-dimensional program register that always outputs χ.
ProcessorMap constant_processor(const ChoiMatrix& chi) {
    const CMatrix s = constant_output_kraus_matrix(chi.matrix());
    std::vector<CMatrix> kraus;
    for (Index k = 0; k < s.cols(); ++k)
        if (s.col(k).norm() > 0.0) kraus.push_back(s.col(k));
    return ProcessorMap::from_kraus("constant", 1, chi.d_in(), chi.d_out(), std::move(kraus));
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

void write_file(const std::string& path, const std::string& body) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io_error", "cannot open '" + path + "' for writing");
    f << body;
    if (!f) throw Error("io_error", "failed writing '" + path + "'");
}

void write_meta(const ExperimentConfig& cfg, const std::string& command, const std::string& started, double wall_ms) {
    json meta = {{"command", command},   {"config", cfg.raw},          {"started_at", started},
                 {"wall_ms", wall_ms},   {"seed", cfg.seed},           {"library_version", "0.1.0"}};
    write_file(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace

Schedule default_schedule(const std::string& method) {
    if (method == "subgradient") return Schedule::harmonic(1.0, 10.0);
    return Schedule::fw_classic();
}

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc,
               {"channel", "channel_b", "processor", "cost", "optimizer", "sweep", "output_path", "seed", "tol",
                "bounds", "jobs"},
               "config");
    ExperimentConfig cfg;
    cfg.raw = doc;
    cfg.channel = doc.value("channel", json());
    cfg.channel_b = doc.value("channel_b", json());
    cfg.processor = doc.value("processor", json());
    cfg.output_path = get_or<std::string>(doc, "output_path", "");
    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
    cfg.tol = get_or(doc, "tol", 1e-6);
    cfg.jobs = get_or(doc, "jobs", 0);
    if (!(cfg.tol > 0.0)) throw config_error("tol must be positive");
    if (doc.contains("bounds")) {
        check_keys(doc["bounds"], {"diamond"}, "bounds");
        cfg.diamond_in_bounds = get_or(doc["bounds"], "diamond", true);
    }
    if (doc.contains("cost")) {
        const auto& c = doc["cost"];
        check_keys(c, {"kind", "mu", "p"}, "cost");
        cfg.cost_kind = get_or<std::string>(c, "kind", "trace");
        if (cfg.cost_kind == "smooth_trace") cfg.cost_param = get_or(c, "mu", 1e-2);
        else if (cfg.cost_kind == "schatten") cfg.cost_param = get_or(c, "p", 2.0);
    }
    if (doc.contains("optimizer")) {
        const auto& o = doc["optimizer"];
        check_keys(o, {"method", "iterations", "schedule", "constraint", "init", "eta_scale", "early_stop",
                       "linesearch_evals"},
                   "optimizer");
        auto& spec = cfg.optimizer;
        spec.method = get_or<std::string>(o, "method", spec.method);
        spec.iterations = get_or(o, "iterations", spec.iterations);
        if (o.contains("schedule")) spec.schedule = parse_schedule(o["schedule"]);
        spec.constraint = get_or<std::string>(o, "constraint", spec.constraint);
        spec.init = get_or<std::string>(o, "init", spec.init);
        spec.eta_scale = get_or(o, "eta_scale", spec.eta_scale);
        spec.early_stop = get_or(o, "early_stop", spec.early_stop);
        spec.linesearch_evals = get_or(o, "linesearch_evals", spec.linesearch_evals);
    }
    static const std::set<std::string> methods{"subgradient", "frank_wolfe", "frank_wolfe_linesearch",
                                               "stochastic_fw", "sdp"};
    if (!methods.count(cfg.optimizer.method)) throw config_error("unknown optimizer method '" + cfg.optimizer.method + "'");
    if (cfg.optimizer.iterations < 0) throw config_error("optimizer.iterations must be non-negative");
    if (cfg.optimizer.constraint != "full" && cfg.optimizer.constraint != "choi_set")
        throw config_error("optimizer.constraint must be 'full' or 'choi_set'");
    if (cfg.optimizer.init != "maximally_mixed" && cfg.optimizer.init != "choi")
        throw config_error("optimizer.init must be 'maximally_mixed' or 'choi'");
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc["sweep"]);
    return cfg;
}

KrausChannel build_channel(const json& spec) {
    if (spec.is_null()) throw config_error("a channel spec is required");
    check_keys(spec, {"type", "params"}, "channel");
    const auto type = require<std::string>(spec, "type", "channel");
    const json params = spec.value("params", json::object());
    if (type == "identity") return channels::identity(get_or<Index>(params, "d", 2));
    if (type == "depolarizing")
        return channels::depolarizing(require<double>(params, "p", "depolarizing"), get_or<Index>(params, "d", 2));
    if (type == "amplitude_damping") return channels::amplitude_damping(require<double>(params, "p", "amplitude_damping"));
    if (type == "pauli") return channels::pauli_channel(require<std::vector<double>>(params, "probs", "pauli"));
    if (type == "rotation") {
        const auto axis = get_or<std::string>(params, "axis", "X");
        if (axis.size() != 1) throw config_error("rotation axis must be X, Y or Z");
        return channels::rotation_unitary(require<double>(params, "theta", "rotation"), axis[0]);
    }
    if (type == "unitary") {
        if (!params.contains("matrix")) throw config_error("unitary channel requires params.matrix");
        return channels::unitary(matrix_from_json(params["matrix"]));
    }
    if (type == "kraus") return channel_from_json(params);
    throw config_error("unknown channel type '" + type + "'");
}

ProcessorMap build_processor(const json& spec) {
    if (spec.is_null()) throw config_error("a processor spec is required");
    check_keys(spec, {"type", "d", "n_ports", "pqc", "dim_limit"}, "processor");
    const auto type = require<std::string>(spec, "type", "processor");
    const Index d = processor_d(spec);
    const Index limit = get_or<Index>(spec, "dim_limit", kDefaultDimLimit);
    if (type == "teleport") return teleportation_processor(d);
    if (type == "pbt") return pbt_processor(require<Index>(spec, "n_ports", "pbt"), d, limit);
    if (type == "pbt_reduced") return pbt_reduced_processor(require<Index>(spec, "n_ports", "pbt_reduced"), d, limit);
    if (type == "pqc") {
        const json p = spec.value("pqc", json::object());
        check_keys(p, {"n_registers", "h0", "h1", "t0", "t1", "theta0"}, "processor.pqc");
        PqcSpec s = pqc_default_gates(get_or<Index>(p, "n_registers", 4));
        if (p.contains("h0")) s.h0 = matrix_from_json(p["h0"]);
        if (p.contains("h1")) s.h1 = matrix_from_json(p["h1"]);
        s.t0 = get_or(p, "t0", s.t0);
        s.t1 = get_or(p, "t1", s.t1);
        if (p.contains("theta0")) s.theta0 = matrix_from_json(p["theta0"]).col(0);
        return pqc_processor(s, limit);
    }
    throw config_error("unknown processor type '" + type + "'");
}

CostFunction build_cost(const ExperimentConfig& cfg, const ProcessorMap& proc, const ChoiMatrix& target) {
    const auto& k = cfg.cost_kind;
    if (k == "trace") return trace_cost(proc, target);
    if (k == "infidelity") return infidelity_cost(proc, target);
    if (k == "smooth_trace") return smooth_trace_cost(proc, target, cfg.cost_param);
    if (k == "rel_entropy") return rel_entropy_cost(proc, target);
    if (k == "schatten") return schatten_cost(proc, target, cfg.cost_param);
    if (k == "diamond") return diamond_cost(proc, target, cfg.tol);
    throw config_error("unknown cost kind '" + k + "'");
}

std::optional<CMatrix> choi_strategy_program(const json& processor_spec, const ChoiMatrix& target) {
    const auto type = get_or<std::string>(processor_spec, "type", "");
    if (type == "teleport" || type == "pbt_reduced") return target.matrix();
    if (type == "pbt") return pbt_choi_program(target.matrix(), get_or<Index>(processor_spec, "n_ports", 1));
    return std::nullopt;
}

json bounds_to_json(const BoundReport& b) {
    json j = {{"c1", b.c1},
              {"cf", b.cf},
              {"cf_bound", b.cf_bound},
              {"c_r", std::isfinite(b.c_r) ? json(b.c_r) : json("inf")},
              {"pinsker_bound", std::isfinite(b.pinsker_bound) ? json(b.pinsker_bound) : json("inf")},
              {"diamond_lower", b.diamond_lower},
              {"diamond_upper", b.diamond_upper},
              {"spectral_upper", b.spectral_upper}};
    if (b.diamond) j["diamond"] = *b.diamond;
    if (b.diamond_gap) j["diamond_gap"] = *b.diamond_gap;
    return j;
}

OptimizeResult run_optimize(const ExperimentConfig& cfg) {
    const ProcessorMap proc = build_processor(cfg.processor);
    const ChoiMatrix target = choi_from_kraus(build_channel(cfg.channel));
    if (target.d_in() != proc.choi_d_in() || target.d_out() != proc.choi_d_out())
        throw dimension_error("channel dimensions do not match the processor");
    const auto& o = cfg.optimizer;
    const Index d = processor_d(cfg.processor);

    ConstraintSet constraint;
    if (o.constraint == "choi_set") {
        if (proc.program_dim() != d * d) throw config_error("choi_set constraint needs a d^2-dimensional program");
        constraint = ConstraintSet::choi_set(d);
    }

    OptimizeResult res;
    const auto choi_prog = choi_strategy_program(cfg.processor, target);
    if (choi_prog) {
        res.has_choi_program = true;
        res.c1_choi_program = trace_cost(proc, target).eval(*choi_prog);
    }

    if (o.method == "sdp") {
        SdpOptions opts;
        opts.tol = cfg.tol;
        const auto sol = optimal_program_sdp(
            proc, target, opts, o.constraint == "choi_set" ? ProgramConstraint::ChoiSet : ProgramConstraint::Full);
        const CMatrix pi = sol.pi.value_or(CMatrix::Identity(proc.program_dim(), proc.program_dim()) /
                                           static_cast<double>(proc.program_dim()));
        res.trace.records.push_back({1, sol.objective, 0.0, 0.0});
        res.trace.best_cost = sol.objective;
        res.trace.best_program = pi;
        res.trace.final_program = pi;
    } else {
        const CostFunction cost = build_cost(cfg, proc, target);
        OptimizerConfig oc;
        oc.iterations = o.iterations;
        oc.schedule = o.schedule.value_or(default_schedule(o.method));
        oc.seed = cfg.seed;
        oc.constraint = constraint;
        oc.smoothing_eta_scale = o.eta_scale;
        oc.early_stop = o.early_stop;
        oc.linesearch_evals = o.linesearch_evals;
        const DensityOperator init = o.init == "choi" && choi_prog
                                         ? DensityOperator(hermitian_part(*choi_prog), 1e-9, 1e-9)
                                         : DensityOperator::maximally_mixed(proc.program_dim());
        if (o.init == "choi" && !choi_prog) throw config_error("init 'choi' is not available for this processor");
        if (o.method == "subgradient") res.trace = projected_subgradient(cost, init, oc);
        else if (o.method == "frank_wolfe") res.trace = frank_wolfe(cost, init, oc);
        else if (o.method == "frank_wolfe_linesearch") res.trace = frank_wolfe_linesearch(cost, init, oc);
        else res.trace = stochastic_smoothing_fw(cost, init, oc);
    }
    res.bounds = bound_report(proc, target, res.trace.best_program, cfg.diamond_in_bounds, cfg.tol);
    return res;
}

json run_diamond(const ExperimentConfig& cfg) {
    const ChoiMatrix a = choi_from_kraus(build_channel(cfg.channel));
    if (cfg.channel_b.is_null()) throw config_error("diamond needs both 'channel' and 'channel_b'");
    const ChoiMatrix b = choi_from_kraus(build_channel(cfg.channel_b));
    if (a.d_in() != b.d_in() || a.d_out() != b.d_out()) throw dimension_error("channels have different dimensions");
    const ProcessorMap fixed = constant_processor(b);
    const CMatrix one = CMatrix::Identity(1, 1);
    const BoundReport r = bound_report(fixed, a, one, true, cfg.tol);
    json j = bounds_to_json(r);
    j["trace"] = r.c1;
    j["fidelity_cost"] = r.cf;
    return j;
}

std::vector<std::string> run_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw config_error("sweep command needs a 'sweep' block");
    const SweepSpec& sw = *cfg.sweep;
    const std::size_t n = sw.kind == "pbt_identity" ? sw.n_list.size() : sw.values.size();
    std::vector<std::string> rows(n);
    std::vector<std::exception_ptr> errors(n);

    auto point = [&](std::size_t i) {
        std::ostringstream row;
        if (sw.kind == "pbt_identity") {
            const Index nports = sw.n_list[i];
            const Index d = sw.d;
            const ProcessorMap proc = pbt_reduced_processor(nports, d);
            const ChoiMatrix target = choi_from_kraus(channels::identity(d));
            SdpOptions opts;
            opts.tol = cfg.tol;
            const CMatrix diff = hermitian_part(target.matrix() - proc.apply(max_entangled_projector(d)));
            const double with_choi = diamond_distance(diff, d, opts).objective;
            const SdpSolution opt = optimal_program_sdp(proc, target, opts, ProgramConstraint::ChoiSet);
            const double bound = 2.0 * static_cast<double>(d * (d - 1)) / static_cast<double>(nports);
            row << nports << ',' << fmt(with_choi) << ',' << fmt(opt.objective) << ',' << fmt(opt.duality_gap) << ','
                << fmt(bound);
        } else {
            json doc = cfg.raw;
            doc.erase("sweep");
            doc[json::json_pointer(sweep_pointer(sw.param))] = sw.values[i];
            doc["seed"] = cfg.seed + i;
            const ExperimentConfig pc = parse_config(doc);
            const OptimizeResult r = run_optimize(pc);
            row << i << ',' << csv_field(sw.values[i]) << ',' << pc.seed << ',' << fmt(r.trace.best_cost) << ','
                << fmt(r.bounds.c1) << ',' << (r.has_choi_program ? fmt(r.c1_choi_program) : "") << ','
                << (r.bounds.diamond ? fmt(*r.bounds.diamond) : "");
        }
        rows[i] = row.str();
    };

    unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    point(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::string> out;
    if (sw.kind == "pbt_identity") out.emplace_back("n_ports,diamond_choi,diamond_optimized,gap,bound");
    else out.emplace_back("index," + csv_field(json(sw.param)) + ",seed,best_cost,c1,c1_choi_program,diamond");
    out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto fail = [&](const std::string& code, const std::string& msg, int status) {
        err << json{{"error", code}, {"message", msg}}.dump() << "\n";
        return status;
    };

    CLI::App app{"Optimal program states for programmable quantum processors"};
    app.require_subcommand(1);
    struct Flags {
        std::string config, out;
        std::optional<std::uint64_t> seed;
        std::optional<int> iters, jobs;
        std::optional<double> tol;
        bool timing = false;
    } flags;
    auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON experiment document")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "overrides config.seed");
        sub->add_option("--out", flags.out, "output path prefix; overrides config.output_path");
        sub->add_option("--iters", flags.iters, "overrides config.optimizer.iterations");
        sub->add_option("--tol", flags.tol, "overrides config.tol (SDP duality gap)");
        sub->add_option("--jobs", flags.jobs, "sweep worker threads; overrides config.jobs");
        sub->add_flag("--timing", flags.timing, "fill the wall_ms column of trace CSVs");
    };
    auto* optimize = app.add_subcommand("optimize", "minimize a cost over program states");
    auto* diamond = app.add_subcommand("diamond", "distances and bounds between two channels");
    auto* sweep = app.add_subcommand("sweep", "run optimize over a parameter grid");
    for (auto* s : {optimize, diamond, sweep}) add_flags(s);

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return fail("invalid_arguments", e.what(), 2);
    }

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };

    ExperimentConfig cfg;
    try {
        json doc = json::object();
        if (!flags.config.empty()) {
            std::ifstream f(flags.config);
            if (!f) throw Error("io_error", "cannot read '" + flags.config + "'");
            try {
                doc = json::parse(f);
            } catch (const json::parse_error& e) {
                throw config_error(std::string("malformed JSON: ") + e.what());
            }
        }
        if (!doc.is_object()) throw config_error("config must be a JSON object");
        if (flags.seed) doc["seed"] = *flags.seed;
        if (!flags.out.empty()) doc["output_path"] = flags.out;
        if (flags.iters) doc["optimizer"]["iterations"] = *flags.iters;
        if (flags.tol) doc["tol"] = *flags.tol;
        if (flags.jobs) doc["jobs"] = *flags.jobs;
        cfg = parse_config(doc);
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 2);
    }

    try {
        if (optimize->parsed()) {
            const OptimizeResult r = run_optimize(cfg);
            json summary = {{"best_cost", r.trace.best_cost},
                            {"iterations", static_cast<int>(r.trace.records.size()) - 1},
                            {"bounds", bounds_to_json(r.bounds)}};
            if (r.has_choi_program) summary["c1_choi_program"] = r.c1_choi_program;
            if (!cfg.output_path.empty()) {
                std::ostringstream csv;
                r.trace.write_csv(csv, flags.timing);
                write_file(cfg.output_path + ".trace.csv", csv.str());
                write_file(cfg.output_path + ".program.json", matrix_to_json(r.trace.best_program).dump(2) + "\n");
                write_file(cfg.output_path + ".bounds.json", bounds_to_json(r.bounds).dump(2) + "\n");
                write_meta(cfg, "optimize", started, wall());
            }
            out << summary.dump(2) << "\n";
        } else if (diamond->parsed()) {
            const json r = run_diamond(cfg);
            if (!cfg.output_path.empty()) {
                write_file(cfg.output_path + ".json", r.dump(2) + "\n");
                write_meta(cfg, "diamond", started, wall());
            }
            out << r.dump(2) << "\n";
        } else {
            const auto rows = run_sweep(cfg);
            std::string body;
            for (const auto& r : rows) body += r + "\r\n";
            if (!cfg.output_path.empty()) {
                write_file(cfg.output_path + ".csv", body);
                write_meta(cfg, "sweep", started, wall());
            } else {
                out << body;
            }
        }
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 1);
    } catch (const json::exception& e) {
        return fail("invalid_config", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("internal_error", e.what(), 1);
    }
    return 0;
}

}  // namespace qprog::cli
