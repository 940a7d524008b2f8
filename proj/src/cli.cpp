#include "tllreach/cli.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tllreach/errors.hpp"
#include "tllreach/exact_reach.hpp"
#include "tllreach/ltllbox.hpp"
#include "tllreach/svg.hpp"
#include "tllreach/tll_verifier.hpp"

namespace tllreach::cli {

namespace fs = std::filesystem;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

json boxes_json(const std::vector<Box>& boxes) {
    json out = json::array();
    for (const auto& b : boxes) out.push_back(to_json(b));
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Runs `work` in a forked child and returns its stdout text, or nullopt on timeout.
struct ChildOutcome {
    bool timed_out = false;
    int exit_code = 0;
    std::string output;
};

ChildOutcome run_forked(const std::function<int(std::ostream&)>& work, double timeout_s) {
    int fds[2];
    if (pipe(fds) != 0) throw Error("bench: pipe() failed");
    const pid_t pid = fork();
    if (pid < 0) throw Error("bench: fork() failed");
    if (pid == 0) {
        close(fds[0]);
        std::ostringstream buf;
        int code = kExitError;
        try {
            code = work(buf);
        } catch (const std::exception& e) {
            buf.str("");
            buf << json{{"error", e.what()}}.dump();
        }
        const std::string s = buf.str();
        std::size_t off = 0;
        while (off < s.size()) {
            const ssize_t w = write(fds[1], s.data() + off, s.size() - off);
            if (w <= 0) break;
            off += static_cast<std::size_t>(w);
        }
        close(fds[1]);
        _exit(code);
    }
    close(fds[1]);
    ChildOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    char chunk[65536];
    for (;;) {
        const double left_ms = timeout_s * 1000.0 - elapsed_ms(start);
        if (left_ms <= 0.0) {
            outcome.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        pollfd p{fds[0], POLLIN, 0};
        const int ready = poll(&p, 1, static_cast<int>(std::min(left_ms, 1000.0)) + 1);
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (ready == 0) continue;
        const ssize_t r = read(fds[0], chunk, sizeof chunk);
        if (r <= 0) break;
        outcome.output.append(chunk, static_cast<std::size_t>(r));
    }
    close(fds[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (!outcome.timed_out) outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitError;
    return outcome;
}

int cmd_generate(int n, int m, int N, int M, const std::vector<int>& sizes, int count, std::uint64_t seed, double eps,
                 int steps, const std::string& out_dir, std::ostream& out) {
    fs::create_directories(out_dir);
    std::vector<std::pair<int, int>> shapes;
    if (sizes.empty()) {
        shapes.emplace_back(N, M);
    } else {
        for (const int s : sizes) shapes.emplace_back(s, s);
    }
    json files = json::array();
    for (const auto& [sN, sM] : shapes) {
        for (int i = 0; i < count; ++i) {
            const Problem p = random_problem(n, m, sN, sM, instance_seed(seed, sN, sM, i), eps, steps);
            char name[96];
            std::snprintf(name, sizeof name, "tll_n%d_m%d_N%d_M%d_%03d.json", n, m, sN, sM, i);
            const fs::path path = fs::path(out_dir) / name;
            save(p, path);
            files.push_back(path.string());
        }
    }
    out << dump_json(json{{"files", std::move(files)}}) << '\n';
    return kExitOk;
}

int cmd_reach(const std::string& problem_path, const std::string& method, int steps, double eps,
              const std::string& out_path, const std::string& svg_path, std::ostream& out, std::ostream& err) {
    const Problem problem = load_problem(problem_path);
    const int T = steps > 0 ? steps : problem.steps;
    const double epsilon = eps > 0.0 ? eps : problem.epsilon;
    json result;
    try {
        result = reach_result_json(problem, method, T, epsilon, &err);
    } catch (const PropagationError& e) {
        out << dump_json(json{{"error", e.what()}, {"partial", {{"boxes", boxes_json(e.partial().boxes)}}}}) << '\n';
        return e.cost_guard() ? kExitCostGuard : kExitError;
    } catch (const CostError& e) {
        out << dump_json(json{{"error", e.what()}}) << '\n';
        return kExitCostGuard;
    }
    if (!out_path.empty()) write_json_file(out_path, result);
    if (!svg_path.empty()) {
        if (problem.initial_set.dim() != 2) {
            err << "warning: --svg ignored for n != 2\n";
        } else {
            std::vector<Box> boxes;
            for (const auto& b : result["boxes"]) boxes.push_back(box_from_json(b));
            std::optional<ReachSet> exact;
            if (method == "exact") exact = one_step_exact(problem.system, problem.controller, problem.initial_set);
            std::ofstream f(svg_path);
            f << render_svg(problem.initial_set, boxes, exact ? &*exact : nullptr);
        }
    }
    out << dump_json(result) << '\n';
    return kExitOk;
}

int cmd_verify(const std::string& ctrl_path, const std::string& set_path, std::optional<double> lb, bool outbox,
               double tol, std::ostream& out) {
    const TLLController ctrl = load_controller(ctrl_path);
    const HPolytope P = load_polytope(set_path);
    if (P.dim() != ctrl.input_dim()) throw ValidationError("input set dimension does not match the controller");
    if (lb) {
        json per_output = json::array();
        bool holds = true;
        for (Eigen::Index k = 0; k < ctrl.output_dim(); ++k) {
            const LowerBoundResult r = verify_lower_bound(ctrl.component(k), P, *lb);
            json entry{{"output", k + 1}, {"holds", r.holds}};
            if (!r.holds) {
                entry["counterexample"] = to_json(*r.counterexample);
                entry["value"] = ctrl.component(k).eval(*r.counterexample);
            }
            holds = holds && r.holds;
            per_output.push_back(std::move(entry));
        }
        out << dump_json(json{{"lower_bound", *lb}, {"holds", holds}, {"outputs", std::move(per_output)}}) << '\n';
        return kExitOk;
    }
    if (!outbox) throw ArgumentError("verify: pass either --lb or --outbox");
    const OutputBox box = output_box(ctrl, P, tol);
    out << dump_json(json{{"lo", to_json(box.box.lo)}, {"hi", to_json(box.box.hi)}, {"tol", tol}}) << '\n';
    return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    try {
        const json j = read_json_file(path);
        std::string kind;
        if (j.contains("components")) {
            controller_from_json(j);
            kind = "controller";
        } else if (j.contains("controller")) {
            problem_from_json(j, fs::path(path).parent_path());
            kind = "problem";
        } else if (j.contains("C")) {
            polytope_from_json(j);
            kind = "polytope";
        } else {
            throw ParseError("unrecognized document: expected a controller, problem, or polytope");
        }
        out << dump_json(json{{"valid", true}, {"kind", kind}}) << '\n';
        return kExitOk;
    } catch (const Error& e) {
        out << dump_json(json{{"valid", false}, {"error", e.what()}}) << '\n';
        return kExitError;
    }
}

int cmd_bench(const std::string& suite, const std::vector<std::string>& methods, double timeout_s,
              const std::string& report_path, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(suite)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ArgumentError("bench: no problem files in '" + suite + "'");

    json runs = json::array();
    std::map<std::string, std::map<long, std::vector<json>>> grouped;
    for (const auto& file : files) {
        const Problem problem = load_problem(file);
        for (const auto& method : methods) {
            const auto start = std::chrono::steady_clock::now();
            const ChildOutcome child = run_forked(
                [&](std::ostream& o) {
                    o << reach_result_json(problem, method, problem.steps, problem.epsilon, nullptr).dump();
                    return kExitOk;
                },
                timeout_s);
            const double wall = elapsed_ms(start);
            json run{{"file", file.filename().string()},
                     {"method", method},
                     {"N", problem.controller.num_functions()},
                     {"M", problem.controller.num_groups()},
                     {"wall_ms", wall}};
            if (child.timed_out) {
                run["status"] = "timeout";
            } else {
                json res;
                try {
                    res = json::parse(child.output);
                } catch (const json::exception&) {
                    res = json{{"error", "unreadable child output"}};
                }
                if (child.exit_code == kExitOk && res.contains("boxes")) {
                    run["status"] = "ok";
                    run["boxes"] = res["boxes"];
                    json areas = json::array();
                    for (const auto& b : res["boxes"]) areas.push_back(box_from_json(b).volume());
                    run["areas"] = areas;
                    run["final_area"] = areas.back();
                    run["lp_calls"] = res["stats"]["lp_calls"];
                    run["nodes"] = res["stats"]["nodes"];
                } else {
                    run["status"] = "error";
                    run["error"] = res.value("error", std::string("unknown failure"));
                }
            }
            err << file.filename().string() << " [" << method << "] " << run["status"].get<std::string>() << " "
                << static_cast<long>(wall) << " ms\n";
            grouped[method][problem.controller.num_functions()].push_back(run);
            runs.push_back(std::move(run));
        }
    }

    json summary = json::object();
    for (const auto& [method, by_size] : grouped) {
        json per_size = json::object();
        for (const auto& [size, list] : by_size) {
            std::vector<double> walls, areas;
            long completed = 0;
            for (const auto& r : list) {
                if (r["status"] != "ok") continue;
                ++completed;
                walls.push_back(r["wall_ms"].get<double>());
                areas.push_back(r["final_area"].get<double>());
            }
            per_size[std::to_string(size)] = json{{"completed", completed},
                                                  {"total", static_cast<long>(list.size())},
                                                  {"median_wall_ms", median(walls)},
                                                  {"median_final_area", median(areas)}};
        }
        summary[method] = std::move(per_size);
    }
    const json report{{"suite", suite}, {"timeout_s", timeout_s}, {"runs", std::move(runs)}, {"summary", summary}};
    if (!report_path.empty()) write_json_file(report_path, report);
    out << dump_json(json{{"summary", summary}}) << '\n';
    return kExitOk;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t seed, int N, int M, int index) {
    // splitmix64 over the packed identifiers
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (static_cast<std::uint64_t>(N) << 40) +
                      (static_cast<std::uint64_t>(M) << 20) + static_cast<std::uint64_t>(index);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

json reach_result_json(const Problem& problem, const std::string& method, int steps, double epsilon,
                       std::ostream* log) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t lp_before = lp_call_count();
    json result;
    const bool exact = method == "exact";
    const BoxMethod box_method = exact ? BoxMethod::ExactBox : parse_box_method(method);

    if (exact) {
        const ReachSet reach = one_step_exact(problem.system, problem.controller, problem.initial_set);
        result["reach_set"] = to_json(reach);
    }
    const PropagationResult prop =
        propagate(problem.system, problem.controller, problem.initial_set, epsilon, steps, box_method);

    json methods = json::array();
    for (const auto m : prop.methods) methods.push_back(to_string(m));
    result["boxes"] = boxes_json(prop.boxes);
    result["method_per_step"] = std::move(methods);
    result["epsilon"] = epsilon;
    if (!prop.estimates.empty()) {
        json est = json::array();
        for (std::size_t t = 0; t < prop.estimates.size(); ++t) {
            const CostEstimate& e = prop.estimates[t];
            est.push_back(json{{"step", t + 1},
                               {"exact_ops", e.exact_ops},
                               {"grid_ops", e.grid_ops},
                               {"selected", to_string(e.method)}});
            if (log) {
                *log << "step " << (t + 1) << ": exact-box cost " << e.exact_ops << ", grid cost " << e.grid_ops
                     << " -> " << to_string(e.method) << '\n';
            }
        }
        result["cost_estimates"] = std::move(est);
    }
    result["stats"] = json{{"nodes", prop.stats.ltllbox.nodes},
                           {"lp_calls", lp_call_count() - lp_before},
                           {"wall_ms", elapsed_ms(start)}};
    return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reachability analysis for LTI systems under TLL neural-network control", "tll-reach"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "write random benchmark problems");
    int g_n = 2, g_m = 1, g_N = 8, g_M = 8, g_count = 10, g_T = 3;
    std::uint64_t g_seed = 0;
    double g_eps = 0.1;
    std::vector<int> g_sizes;
    std::string g_out;
    gen->add_option("--n", g_n, "state dimension")->capture_default_str();
    gen->add_option("--m", g_m, "control dimension")->capture_default_str();
    gen->add_option("--N", g_N, "local linear functions")->capture_default_str();
    gen->add_option("--M", g_M, "selector groups")->capture_default_str();
    gen->add_option("--sizes", g_sizes, "generate N = M = s for each listed s")->delimiter(',');
    gen->add_option("--count", g_count, "instances per size")->capture_default_str();
    gen->add_option("--seed", g_seed, "base seed")->capture_default_str();
    gen->add_option("--eps", g_eps, "epsilon stored in the problems")->capture_default_str();
    gen->add_option("--T", g_T, "steps stored in the problems")->capture_default_str();
    gen->add_option("--out", g_out, "output directory")->required();

    auto* reach = app.add_subcommand("reach", "compute reach boxes for a problem");
    std::string r_problem, r_method = "ltllbox", r_out, r_svg;
    int r_steps = 0;
    double r_eps = 0.0;
    reach->add_option("--problem", r_problem, "problem JSON")->required()->check(CLI::ExistingFile);
    reach->add_option("--method", r_method, "exact|exact-box|grid|ltllbox|auto")
        ->check(CLI::IsMember({"exact", "exact-box", "grid", "ltllbox", "auto"}))
        ->capture_default_str();
    reach->add_option("--steps", r_steps, "steps T (default: from the problem)");
    reach->add_option("--eps", r_eps, "epsilon (default: from the problem)");
    reach->add_option("--out", r_out, "result JSON path");
    reach->add_option("--svg", r_svg, "SVG figure path (n = 2)");

    auto* verify = app.add_subcommand("verify", "query controller output bounds over a polytope");
    std::string v_ctrl, v_set;
    std::optional<double> v_lb;
    bool v_outbox = false;
    double v_tol = 1e-3;
    verify->add_option("--controller", v_ctrl, "controller JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--input-set", v_set, "polytope JSON")->required()->check(CLI::ExistingFile);
    auto* lb_opt = verify->add_option("--lb", v_lb, "decide NN(x) >= a on the set");
    auto* ob_opt = verify->add_flag("--outbox", v_outbox, "compute a tol-tight output box");
    verify->add_option("--tol", v_tol, "output box tolerance")->capture_default_str();
    lb_opt->excludes(ob_opt);

    auto* lip = app.add_subcommand("lipschitz", "Lipschitz bound of a controller");
    std::string l_ctrl;
    lip->add_option("--controller", l_ctrl, "controller JSON")->required()->check(CLI::ExistingFile);

    auto* validate = app.add_subcommand("validate", "check a controller, problem, or polytope file");
    std::string val_file;
    validate->add_option("file", val_file, "file to check")->required();

    auto* bench = app.add_subcommand("bench", "run methods over a suite of problems");
    std::string b_suite, b_report;
    std::vector<std::string> b_methods{"ltllbox"};
    double b_timeout = 600.0;
    bench->add_option("--suite", b_suite, "directory of problem files")->required()->check(CLI::ExistingDirectory);
    bench->add_option("--methods", b_methods, "comma-separated methods")->delimiter(',')->capture_default_str();
    bench->add_option("--timeout", b_timeout, "seconds per instance and method")->capture_default_str();
    bench->add_option("--report", b_report, "report JSON path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        if (*gen) return cmd_generate(g_n, g_m, g_N, g_M, g_sizes, g_count, g_seed, g_eps, g_T, g_out, out);
        if (*reach) return cmd_reach(r_problem, r_method, r_steps, r_eps, r_out, r_svg, out, err);
        if (*verify) return cmd_verify(v_ctrl, v_set, v_lb, v_outbox, v_tol, out);
        if (*lip) {
            const TLLController ctrl = load_controller(l_ctrl);
            out << dump_json(json{{"lipschitz", ctrl.lipschitz_bound()}}) << '\n';
            return kExitOk;
        }
        if (*validate) return cmd_validate(val_file, out);
        if (*bench) {
            for (const auto& m : b_methods) {
                if (m != "exact") parse_box_method(m);
            }
            return cmd_bench(b_suite, b_methods, b_timeout, b_report, out, err);
        }
    } catch (const CostError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCostGuard;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace tllreach::cli
