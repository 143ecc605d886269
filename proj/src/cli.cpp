#include "stcsp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "stcsp/automaton.hpp"
#include "stcsp/normalizer.hpp"
#include "stcsp/oracle.hpp"
#include "stcsp/parser.hpp"
#include "stcsp/unroller.hpp"

namespace stcsp::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<StCsp> load_model(const std::string& path, std::ostream& err) {
    ModelSource src;
    try {
        src = ModelSource::from_file(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return std::nullopt;
    }
    ParseResult r = parse(src);
    for (const auto& d : r.diagnostics) err << d.format(src.origin) << "\n";
    return r.model;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Cell parse_cell(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("cell", "expected r,c but got " + text);
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
}

ordered_json stats_json(const RunReport& r) {
    ordered_json j;
    j["nodesExpanded"] = r.stats.nodes_expanded;
    j["dominanceHits"] = r.stats.dominance_hits;
    j["failures"] = r.stats.failures;
    j["statesEmitted"] = r.stats.states_emitted;
    j["wallTime"] = r.stats.wall_time;
    j["statesBeforePrune"] = r.states_before;
    j["statesAfterPrune"] = r.states_after;
    j["acceptingStates"] = r.accepting;
    j["shortestAcceptingPrefix"] =
        r.shortest_accepting_prefix ? ordered_json(*r.shortest_accepting_prefix) : ordered_json(nullptr);
    return j;
}

struct SolveFlags {
    std::string model;
    std::string emit;
    std::optional<std::size_t> enumerate;
    std::string project = "user";
    bool stats = false;
    bool dump_normal = false;
    std::uint64_t node_budget = 10'000'000;
    std::uint64_t depth_budget = 10'000'000;
    double timeout = 600;
    std::uint64_t prefix_cap = 1'000'000;
};

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err) {
    std::optional<StCsp> model = load_model(f.model, err);
    if (!model) return Error;
    NormalizeResult nr = normalize(*model);
    if (f.dump_normal) out << unparse(nr.normal.to_stcsp());

    SolveOptions opt;
    opt.node_budget = f.node_budget;
    opt.depth_budget = f.depth_budget;
    if (f.timeout > 0) {
        opt.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(f.timeout));
    }
    SolveResult sr;
    try {
        sr = solve(nr.normal, opt);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Error;
    }
    BuchiAutomaton pruned = prune(sr.automaton);
    RunReport report;
    report.stats = sr.stats;
    report.states_before = sr.automaton.state_count();
    report.states_after = pruned.state_count();
    report.accepting = pruned.accepting_count();
    report.shortest_accepting_prefix = shortest_accepting_prefix(pruned);

    std::optional<std::vector<std::uint32_t>> positions;
    if (f.project == "user") positions = pruned.user_positions();

    bool quiet = true;
    if (f.emit == "json") {
        out << export_json(pruned);
    } else if (f.emit == "dot") {
        out << export_dot(pruned, positions);
    } else {
        quiet = false;
    }
    if (f.enumerate) {
        quiet = true;
        try {
            auto set = enumerate_prefixes(pruned, *f.enumerate, positions, f.prefix_cap);
            std::vector<StreamPrefix> ps(set.begin(), set.end());
            bool compact = compact_values(ps);
            for (const auto& p : ps) out << format_prefix(p, compact) << "\n";
        } catch (const PrefixCapExceeded& e) {
            err << "error: " << e.what() << "\n";
            return Error;
        }
    }
    if (f.stats) {
        quiet = true;
        out << stats_json(report).dump(2) << "\n";
    }
    if (!quiet) {
        if (pruned.empty()) {
            out << "unsatisfiable\n";
        } else {
            out << "satisfiable: " << report.states_after << " states (" << report.states_before
                << " before pruning), " << report.accepting << " accepting";
            if (report.shortest_accepting_prefix) out << ", shortest accepting prefix " << *report.shortest_accepting_prefix;
            out << "\n";
        }
    }
    return pruned.empty() ? Unsat : Sat;
}

struct VerifyFlags {
    std::string model;
    std::size_t length = 3;
    std::optional<std::size_t> horizon;
    std::string automaton;
    std::uint64_t cap = 1'000'000;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
    std::optional<StCsp> model = load_model(f.model, err);
    if (!model) return Error;
    std::vector<std::uint32_t> users;
    for (VarId v : model->user_vars()) users.push_back(v.index);

    std::set<StreamPrefix> expected;
    try {
        std::size_t h = f.horizon.value_or(oracle::default_horizon(*model, f.length));
        expected = oracle::solution_prefixes(*model, f.length, std::max(h, f.length), users, f.cap);
    } catch (const oracle::CapExceeded& e) {
        out << "SKIPPED: " << e.what() << "\n";
        return Skipped;
    } catch (const oracle::Inconclusive& e) {
        out << "SKIPPED: " << e.what() << "\n";
        return Skipped;
    }

    BuchiAutomaton a;
    try {
        if (!f.automaton.empty()) {
            a = automaton_from_json(read_file(f.automaton));
        } else {
            a = solve(normalize(*model).normal).automaton;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Error;
    }
    std::set<StreamPrefix> got;
    try {
        got = enumerate_prefixes(prune(a), f.length, a.user_positions(), f.cap);
    } catch (const PrefixCapExceeded& e) {
        out << "SKIPPED: " << e.what() << "\n";
        return Skipped;
    }

    std::vector<StreamPrefix> all;
    std::set_union(got.begin(), got.end(), expected.begin(), expected.end(), std::back_inserter(all));
    bool compact = compact_values(all);
    for (const auto& p : all) {
        bool in_solver = got.count(p) > 0;
        bool in_oracle = expected.count(p) > 0;
        if (in_solver != in_oracle) {
            out << "FAIL: prefix " << format_prefix(p, compact) << (in_solver ? " produced by the solver but not a solution prefix"
                                                                            : " is a solution prefix missing from the solver")
                << "\n";
            return Unsat;
        }
    }
    out << "PASS: " << got.size() << " prefixes of length " << f.length << " agree\n";
    return Sat;
}

Variant variant_from(std::optional<Value> at) { return at ? Variant::at(*at) : Variant::until(); }

int write_output(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty()) {
        out << text;
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot write " << path << "\n";
        return Error;
    }
    f << text;
    return 0;
}

struct UnrollFlags {
    std::string model;
    std::optional<TimeIndex> horizon;
    bool increment = false;
    TimeIndex tmax = 50;
    std::string mode = "first";
    std::uint64_t node_budget = 50'000'000;
};

int cmd_unroll(const UnrollFlags& f, std::ostream& out, std::ostream& err) {
    std::optional<StCsp> model = load_model(f.model, err);
    if (!model) return Error;
    HorizonResult r;
    if (f.increment) {
        r = increment_until_sat(*model, f.tmax, f.node_budget);
    } else if (f.horizon) {
        FdMode mode = f.mode == "all" ? FdMode::All : f.mode == "count" ? FdMode::Count : FdMode::First;
        FdCsp csp = unroll(*model, *f.horizon);
        if (csp.unsat_by_construction) out << "note: " << csp.reason << "\n";
        r = fd_solve(csp, mode, f.node_budget);
    } else {
        err << "error: give --horizon T or --increment\n";
        return Error;
    }
    switch (r.outcome) {
    case HorizonResult::Outcome::BudgetExceeded:
        err << "error: node budget exceeded at horizon " << r.horizon << "\n";
        return Error;
    case HorizonResult::Outcome::Unsat:
        out << (f.increment ? "unsat up to horizon " : "unsat at horizon ") << r.horizon << "\n";
        return Unsat;
    case HorizonResult::Outcome::Sat:
        break;
    }
    out << "sat at horizon " << r.horizon << " (" << r.nodes << " nodes)\n";
    if (f.mode == "count" && !f.increment) {
        out << "solutions: " << r.solution_count << "\n";
        return Sat;
    }
    auto show = [&](const StreamPrefix& s) {
        for (std::size_t t = 0; t < s.steps.size(); ++t) {
            out << "t=" << t << ":";
            for (std::size_t v = 0; v < s.steps[t].size(); ++v) out << " " << model->vars()[v].name << "=" << s.steps[t][v];
            out << "\n";
        }
    };
    if (f.mode == "all" && !f.increment) {
        for (const auto& s : r.solutions) {
            show(s);
            out << "--\n";
        }
        out << "solutions: " << r.solution_count << "\n";
    } else if (r.assignment) {
        show(*r.assignment);
    }
    return Sat;
}

struct BenchFlags {
    std::string suite;
    std::string output;
    double timeout = 600;
    unsigned jobs = 1;
    std::uint64_t node_budget = 10'000'000;
};

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
    std::vector<BenchInstance> suite;
    try {
        suite = parse_suite(read_file(f.suite));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Error;
    }
    std::vector<RunReport> reports(suite.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < suite.size(); i = next++) reports[i] = run_instance(suite[i], f.timeout, f.node_budget);
    };
    std::vector<std::thread> pool;
    unsigned jobs = std::max(1U, std::min<unsigned>(f.jobs, static_cast<unsigned>(std::max<std::size_t>(suite.size(), 1))));
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv = csv_header();
    bool failed = false;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        csv += csv_row(suite[i], reports[i]);
        if (reports[i].outcome == "error") {
            failed = true;
            err << "error: " << suite[i].id << ": " << reports[i].message << "\n";
        }
    }
    int rc = write_output(csv, f.output, out, err);
    if (rc != 0) return rc;
    return failed ? Error : 0;
}

// a scalar or an array of scalars
template <class T>
std::vector<T> values_of(const json& j, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

}  // namespace

std::string format_prefix(const StreamPrefix& p, bool compact) {
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (!compact && i > 0) out += ' ';
        const auto& step = p.steps[i];
        if (step.size() == 1) {
            out += std::to_string(step[0]);
        } else {
            out += '(';
            for (std::size_t k = 0; k < step.size(); ++k) {
                if (k > 0) out += ',';
                out += std::to_string(step[k]);
            }
            out += ')';
        }
    }
    return out;
}

bool compact_values(const std::vector<StreamPrefix>& ps) {
    for (const auto& p : ps) {
        for (const auto& step : p.steps) {
            for (Value v : step) {
                if (v < 0 || v > 9) return false;
            }
        }
    }
    return true;
}

std::optional<std::size_t> shortest_accepting_prefix(const BuchiAutomaton& pruned) {
    auto d = distance_to_accepting(pruned);
    if (!d) return std::nullopt;
    return *d == 0 ? 0 : *d - 1;
}

std::vector<BenchInstance> parse_suite(const std::string& json_text) {
    json j = json::parse(json_text);
    const json& list = j.is_array() ? j : j.value("instances", json::array());
    std::vector<BenchInstance> out;
    for (const auto& spec : list) {
        std::string family = spec.at("family").get<std::string>();
        std::string variant = spec.value("variant", std::string("until"));
        if (variant != "until" && variant != "at") throw std::runtime_error("unknown variant " + variant);
        auto ts = values_of<Value>(spec, "t", {1});
        if (family == "mc") {
            for (int n : values_of<int>(spec, "n", {3}))
                for (int b : values_of<int>(spec, "b", {2}))
                    for (Value t : ts) {
                        BenchInstance inst;
                        inst.family = family;
                        inst.mc = {n, b, variant == "at" ? Variant::at(t) : Variant::until()};
                        inst.id = "mc-n" + std::to_string(n) + "-b" + std::to_string(b) +
                                  (variant == "at" ? "-at" + std::to_string(t) : "-until");
                        out.push_back(inst);
                        if (variant != "at") break;
                    }
        } else if (family == "grid") {
            for (int n : values_of<int>(spec, "n", {2}))
                for (double p : values_of<double>(spec, "p", {1.0}))
                    for (std::uint64_t seed : values_of<std::uint64_t>(spec, "seed", {0}))
                        for (Value t : ts) {
                            BenchInstance inst;
                            inst.family = family;
                            inst.grid.n = n;
                            inst.grid.p = p;
                            inst.grid.seed = seed;
                            if (spec.contains("start")) inst.grid.start = Cell{spec["start"][0].get<int>(), spec["start"][1].get<int>()};
                            if (spec.contains("end")) inst.grid.end = Cell{spec["end"][0].get<int>(), spec["end"][1].get<int>()};
                            inst.grid.variant = variant == "at" ? Variant::at(t) : Variant::until();
                            inst.id = "grid-n" + std::to_string(n) + "-p" + fmt_double(p) + "-s" + std::to_string(seed) +
                                      (variant == "at" ? "-at" + std::to_string(t) : "-until");
                            out.push_back(inst);
                            if (variant != "at") break;
                        }
        } else {
            throw std::runtime_error("unknown family " + family);
        }
        if (spec.contains("id") && !out.empty()) out.back().id = spec["id"].get<std::string>();
    }
    return out;
}

RunReport run_instance(const BenchInstance& inst, double timeout_seconds, std::uint64_t node_budget) {
    RunReport r;
    r.id = inst.id;
    try {
        ModelSource src = inst.family == "mc" ? gen_mc(inst.mc) : gen_grid(inst.grid);
        NormalForm nf = normalize(parse_or_throw(src)).normal;
        SolveOptions opt;
        opt.node_budget = node_budget;
        if (timeout_seconds > 0) {
            opt.deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                                  std::chrono::duration<double>(timeout_seconds));
        }
        SolveResult sr = solve(nf, opt);
        BuchiAutomaton pruned = prune(sr.automaton);
        r.stats = sr.stats;
        r.states_before = sr.automaton.state_count();
        r.states_after = pruned.state_count();
        r.accepting = pruned.accepting_count();
        r.shortest_accepting_prefix = shortest_accepting_prefix(pruned);
        r.outcome = pruned.empty() ? "unsat" : "sat";
    } catch (const SolveInterrupted& e) {
        r.outcome = "timeout";
        r.message = e.what();
    } catch (const std::exception& e) {
        r.outcome = "error";
        r.message = e.what();
    }
    return r;
}

std::string csv_header() {
    return "schema,id,family,n,b,p,seed,variant,t,outcome,nodes_expanded,dominance_hits,failures,"
           "states_before_prune,states_after_prune,accepting_states,shortest_accepting_prefix,wall_time_s\n";
}

std::string csv_row(const BenchInstance& inst, const RunReport& r) {
    std::ostringstream os;
    const bool mc = inst.family == "mc";
    const Variant& v = mc ? inst.mc.variant : inst.grid.variant;
    os << kCsvSchema << ',' << inst.id << ',' << inst.family << ',' << (mc ? inst.mc.n : inst.grid.n) << ',';
    os << (mc ? std::to_string(inst.mc.b) : "") << ',' << (mc ? "" : fmt_double(inst.grid.p)) << ',';
    os << (mc ? "" : std::to_string(inst.grid.seed)) << ',';
    os << (v.kind == Variant::Kind::At ? "at" : "until") << ',' << (v.kind == Variant::Kind::At ? std::to_string(v.t) : "");
    os << ',' << r.outcome;
    if (r.outcome == "sat" || r.outcome == "unsat") {
        os << ',' << r.stats.nodes_expanded << ',' << r.stats.dominance_hits << ',' << r.stats.failures << ','
           << r.states_before << ',' << r.states_after << ',' << r.accepting << ','
           << (r.shortest_accepting_prefix ? std::to_string(*r.shortest_accepting_prefix) : "") << ','
           << std::fixed << std::setprecision(4) << r.stats.wall_time;
    } else {
        os << ",--,--,--,--,--,--,--,--";
    }
    os << "\n";
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stream constraint solver with until and @"};
    app.require_subcommand(1);

    SolveFlags sf;
    auto* solve_cmd = app.add_subcommand("solve", "solve a model and build its solution automaton");
    solve_cmd->add_option("model", sf.model, "model file (.stcsp)")->required();
    solve_cmd->add_option("--emit", sf.emit, "print the pruned automaton")->check(CLI::IsMember({"dot", "json"}));
    solve_cmd->add_option("--enumerate", sf.enumerate, "print all solution prefixes of length L");
    solve_cmd->add_option("--project", sf.project, "label projection for --enumerate and dot: user or all")
        ->check(CLI::IsMember({"user", "all"}));
    solve_cmd->add_flag("--stats", sf.stats, "print solver statistics as JSON");
    solve_cmd->add_flag("--dump-normal", sf.dump_normal, "print the normal form");
    solve_cmd->add_option("--node-budget", sf.node_budget);
    solve_cmd->add_option("--depth-budget", sf.depth_budget);
    solve_cmd->add_option("--timeout", sf.timeout, "seconds, 0 disables");
    solve_cmd->add_option("--prefix-cap", sf.prefix_cap);

    VerifyFlags vf;
    auto* verify_cmd = app.add_subcommand("verify", "compare solver prefixes with the brute-force oracle");
    verify_cmd->add_option("model", vf.model)->required();
    verify_cmd->add_option("-L,--length", vf.length);
    verify_cmd->add_option("-H,--horizon", vf.horizon);
    verify_cmd->add_option("--automaton", vf.automaton, "check this automaton (JSON) instead of solving");
    verify_cmd->add_option("--cap", vf.cap);

    auto* gen_cmd = app.add_subcommand("gen", "generate benchmark models");
    gen_cmd->require_subcommand(1);
    std::string gen_out;
    McParams mc;
    std::optional<Value> mc_at;
    auto* gen_mc_cmd = gen_cmd->add_subcommand("mc", "missionaries and cannibals");
    gen_mc_cmd->add_option("--n", mc.n)->check(CLI::PositiveNumber);
    gen_mc_cmd->add_option("--b", mc.b)->check(CLI::Range(2, 1 << 20));
    auto* mc_until = gen_mc_cmd->add_flag("--until", "eventual success (default)");
    gen_mc_cmd->add_option("--at", mc_at, "success exactly by step T")->excludes(mc_until);
    gen_mc_cmd->add_option("-o,--output", gen_out);

    GridParams grid;
    std::optional<Value> grid_at;
    std::string start_text, end_text;
    auto* gen_grid_cmd = gen_cmd->add_subcommand("grid", "random grid path planning");
    gen_grid_cmd->add_option("--n", grid.n)->check(CLI::PositiveNumber);
    gen_grid_cmd->add_option("--p", grid.p)->check(CLI::Range(0.0, 1.0));
    gen_grid_cmd->add_option("--seed", grid.seed);
    gen_grid_cmd->add_option("--start", start_text, "r,c");
    gen_grid_cmd->add_option("--end", end_text, "r,c");
    auto* grid_until = gen_grid_cmd->add_flag("--until");
    gen_grid_cmd->add_option("--at", grid_at)->excludes(grid_until);
    gen_grid_cmd->add_option("-o,--output", gen_out);

    UnrollFlags uf;
    auto* unroll_cmd = app.add_subcommand("unroll", "finite-horizon baseline");
    unroll_cmd->add_option("model", uf.model)->required();
    auto* horizon_opt = unroll_cmd->add_option("--horizon", uf.horizon);
    unroll_cmd->add_flag("--increment", uf.increment)->excludes(horizon_opt);
    unroll_cmd->add_option("--tmax", uf.tmax);
    unroll_cmd->add_option("--mode", uf.mode)->check(CLI::IsMember({"first", "all", "count"}));
    unroll_cmd->add_option("--node-budget", uf.node_budget);

    BenchFlags bf;
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and write CSV");
    bench_cmd->add_option("suite", bf.suite, "suite file (JSON)")->required();
    bench_cmd->add_option("-o,--output", bf.output);
    bench_cmd->add_option("--timeout", bf.timeout);
    bench_cmd->add_option("--jobs", bf.jobs)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--node-budget", bf.node_budget);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : Error;
    }

    try {
        if (*solve_cmd) return cmd_solve(sf, out, err);
        if (*verify_cmd) return cmd_verify(vf, out, err);
        if (*unroll_cmd) return cmd_unroll(uf, out, err);
        if (*bench_cmd) return cmd_bench(bf, out, err);
        if (*gen_mc_cmd) {
            mc.variant = variant_from(mc_at);
            return write_output(gen_mc(mc).text, gen_out, out, err);
        }
        if (*gen_grid_cmd) {
            if (!start_text.empty()) grid.start = parse_cell(start_text);
            if (!end_text.empty()) grid.end = parse_cell(end_text);
            grid.variant = variant_from(grid_at);
            return write_output(gen_grid(grid).text, gen_out, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Error;
    }
    return Error;
}

}  // namespace stcsp::cli
