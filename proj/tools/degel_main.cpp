// degel: solves H(Du, D^2u) + lam a(x) |u|^(k-1) u = 0 for the built-in
// degenerate elliptic operator families, estimates the first eigenvalue by
// continuation, and verifies the analytic estimates on the computed fields.
//
// One JSON config per run; outputs are a summary.json plus CSV dumps in the
// output directory. Deterministic for a fixed config and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "degel/barriers.hpp"
#include "degel/eigen.hpp"
#include "degel/grid.hpp"
#include "degel/operators.hpp"
#include "degel/radial.hpp"
#include "degel/verify.hpp"

namespace fs = std::filesystem;
using degel::input_error;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 2;
constexpr int kExitConditionFail = 3;
constexpr int kExitConfig = 4;

void require_keys(const Json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
    if (!obj.is_object()) throw input_error(where + " must be a JSON object");
    for (const auto& key : required)
        if (!obj.contains(key)) throw input_error(where + " is missing key '" + key + "'");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key))
            throw input_error(where + " has unknown key '" + key + "'");
    }
}

degel::OperatorSpec parse_operator(const Json& cfg) {
    require_keys(cfg.at("operator"), {"family", "n", "params"}, {}, "operator");
    return cfg.at("operator").get<degel::OperatorSpec>();
}

degel::DomainShape parse_shape(const Json& dom) {
    const std::string type = dom.at("type").get<std::string>();
    if (type == "disk") {
        require_keys(dom, {"type", "R"}, {"cx", "cy", "h", "K", "W"}, "domain");
        return degel::DomainShape::disk(dom.at("R").get<double>(), dom.value("cx", 0.0), dom.value("cy", 0.0));
    }
    if (type == "rectangle") {
        require_keys(dom, {"type", "a", "b"}, {"h", "K", "W"}, "domain");
        return degel::DomainShape::rectangle(dom.at("a").get<double>(), dom.at("b").get<double>());
    }
    if (type == "mask") {
        require_keys(dom, {"type", "path"}, {"h", "K", "W"}, "domain");
        return degel::DomainShape::mask_from_file(dom.at("path").get<std::string>());
    }
    throw input_error("unknown domain type '" + type + "'");
}

// Scalar data fields: a constant, or the affine form c + x*dx + y*dy.
degel::ScalarField2D parse_field(const Json& j, double fallback, const std::string& where) {
    if (j.is_null()) return [fallback](double, double) { return fallback; };
    require_keys(j, {}, {"type", "value", "c", "dx", "dy"}, where);
    const std::string type = j.value("type", "constant");
    if (type == "constant") {
        const double v = j.value("value", fallback);
        return [v](double, double) { return v; };
    }
    if (type == "affine") {
        const double c = j.value("c", fallback), dx = j.value("dx", 0.0), dy = j.value("dy", 0.0);
        return [c, dx, dy](double x, double y) { return c + dx * x + dy * y; };
    }
    throw input_error(where + ": unknown field type '" + type + "'");
}

degel::GridDomain parse_grid(const Json& cfg, double delta) {
    const Json& dom = cfg.at("domain");
    const degel::DomainShape shape = parse_shape(dom);
    const double h = dom.value("h", 1.0 / 32);
    const int K = dom.value("K", 16);
    const int W = dom.value("W", 1);
    const auto boundary = parse_field(cfg.contains("boundary") ? cfg.at("boundary") : Json(), delta, "boundary");
    const auto weight = parse_field(cfg.contains("weight") ? cfg.at("weight") : Json(), 1.0, "weight");
    return degel::build_domain(shape, h, boundary, weight, K, W);
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream f(path);
    if (!f) throw input_error("cannot write " + path.string());
    f << j.dump(2) << "\n";
}

Json operator_echo(const degel::OperatorSpec& op) {
    nlohmann::json j = op;
    return Json::parse(j.dump());
}

// ---------------------------------------------------------------------------

int cmd_check_operator(const Json& cfg, const fs::path& out, std::uint64_t seed) {
    require_keys(cfg, {"command", "operator"}, {"trials", "s_grid"}, "config");
    const auto op = parse_operator(cfg);
    const int trials = cfg.value("trials", 512);
    const auto rep = degel::check_conditions(op, seed, trials);
    const auto prof = degel::coercivity_profile(op, cfg.value("s_grid", 400));

    std::ofstream csv(out / "profile.csv");
    csv.precision(17);
    csv << "s,m1,m2,m3,m4,mlow,mhigh\n";
    for (const auto& s : prof.samples)
        csv << s.s << "," << s.m1 << "," << s.m2 << "," << s.m3 << "," << s.m4 << ","
            << s.mlow << "," << s.mhigh << "\n";

    Json summary;
    summary["command"] = "check-operator";
    summary["operator"] = operator_echo(op);
    summary["seed"] = seed;
    summary["trials"] = rep.trials;
    summary["conditions"] = {{"monotonicity", rep.monotonicity},
                             {"homogeneity", rep.homogeneity},
                             {"coercivity", rep.coercivity},
                             {"rotation_symmetry", rep.symmetry}};
    summary["margins"] = {{"worst_monotonicity", rep.worst_monotonicity},
                          {"worst_homogeneity", rep.worst_homogeneity},
                          {"worst_symmetry", rep.worst_symmetry},
                          {"m1_hat", rep.m1_hat},
                          {"m4_at_s_hat", rep.m4_at_s_hat}};
    summary["case"] = {{"kind", prof.case_tag.is_case_one() ? "I" : "II"}, {"s_bar", prof.case_tag.s_bar}};
    summary["sigma"] = prof.sigma;
    write_json(out / "summary.json", summary);
    // rotation symmetry is informational: the pseudo and weighted-direction
    // families are honest members of the zoo without it
    return rep.abc_pass() ? kExitOk : kExitConditionFail;
}

int cmd_barriers(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "nu", "R"},
                 {"rho", "beta", "R_o", "sup_h", "inf_h", "sup_f_plus", "inf_f_minus", "lambda",
                  "kappa1", "kappa2"},
                 "config");
    const auto op = parse_operator(cfg);
    const double nu = cfg.at("nu").get<double>();
    const double R = cfg.at("R").get<double>();
    std::optional<double> rho, beta;
    if (cfg.contains("rho")) rho = cfg.at("rho").get<double>();
    if (cfg.contains("beta")) beta = cfg.at("beta").get<double>();

    Json summary;
    summary["command"] = "barriers";
    summary["operator"] = operator_echo(op);
    const auto thr = degel::lambda_threshold(op, nu, R, rho, beta);
    nlohmann::json jt;
    degel::to_json(jt, thr);
    summary["lambda_threshold"] = Json::parse(jt.dump());

    const double R_o = cfg.value("R_o", R / 2.0);
    const double sup_h = cfg.value("sup_h", 1.0);
    const double inf_h = cfg.value("inf_h", 1.0);
    auto [up, lo] = degel::sup_inf_bound(op, sup_h, inf_h, cfg.value("sup_f_plus", 0.0),
                                         cfg.value("inf_f_minus", 0.0), R_o);
    nlohmann::json ju, jl;
    degel::to_json(ju, up);
    degel::to_json(jl, lo);
    summary["sup_bound"] = Json::parse(ju.dump());
    summary["inf_bound"] = Json::parse(jl.dump());

    const auto sol = degel::lambda_big_and_solution_bounds(op, nu, R_o, cfg.value("lambda", 0.0),
                                                           cfg.value("kappa1", inf_h), cfg.value("kappa2", sup_h));
    summary["Lambda"] = sol.Lambda;
    summary["solution_bracket"] = {{"applicable", sol.bracket_applicable},
                                   {"theta", sol.theta},
                                   {"lower", sol.lower},
                                   {"upper", sol.upper}};
    write_json(out / "summary.json", summary);
    return kExitOk;
}

int cmd_solve_radial(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "R", "delta", "lambda"},
                 {"a0", "N", "tol", "v0_max_factor"}, "config");
    degel::RadialProblem prob;
    prob.op = parse_operator(cfg);
    prob.R = cfg.at("R").get<double>();
    prob.delta = cfg.at("delta").get<double>();
    prob.lam = cfg.at("lambda").get<double>();
    prob.a0 = cfg.value("a0", 1.0);
    prob.N = cfg.value("N", 4096);
    prob.tol = cfg.value("tol", 1e-8);
    prob.v0_max_factor = cfg.value("v0_max_factor", 1e6);

    const auto outcome = degel::solve_radial_bvp(prob);
    Json summary;
    summary["command"] = "solve-radial";
    summary["operator"] = operator_echo(prob.op);
    summary["status"] = outcome.ok() ? "converged" : "infeasible";
    if (!outcome.note.empty()) summary["note"] = outcome.note;
    if (outcome.ok()) {
        summary["solution"] = Json::parse(degel::radial_summary(outcome.sol).dump());
        degel::dump_profile_csv(outcome.sol, (out / "profile.csv").string());
    }
    write_json(out / "summary.json", summary);
    return outcome.ok() ? kExitOk : kExitNoSolution;
}

int cmd_eigen_radial(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "R"}, {"tol", "N"}, "config");
    const auto op = parse_operator(cfg);
    const double R = cfg.at("R").get<double>();
    const auto res = degel::eigen_radial(op, R, cfg.value("tol", 1e-6), cfg.value("N", 4096));
    Json summary;
    summary["command"] = "eigen-radial";
    summary["operator"] = operator_echo(op);
    summary["lambda_star"] = res.lambda_star;
    summary["integrations"] = res.integrations;
    summary["r_star_rel_err"] = res.r_star_rel_err;
    summary["residual_sup"] = res.profile.residual_sup;
    degel::dump_profile_csv(res.profile, (out / "profile.csv").string());
    write_json(out / "summary.json", summary);
    return kExitOk;
}

int cmd_solve_grid(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "domain", "delta", "lambda"},
                 {"tol", "M_cap", "max_iter", "boundary", "weight"}, "config");
    const auto op = parse_operator(cfg);
    const double delta = cfg.at("delta").get<double>();
    const double lam = cfg.at("lambda").get<double>();
    const auto dom = parse_grid(cfg, delta);
    degel::GridSolveOptions opts;
    opts.tol_abs = cfg.contains("tol") ? cfg.at("tol").get<double>()
                                       : degel::default_grid_tol(dom, op, lam, 1e-6);
    opts.M_cap = cfg.value("M_cap", 0.0);
    opts.max_iter = cfg.value("max_iter", 1000000L);
    const auto st = degel::solve_grid_bvp(op, dom, lam, opts);

    Json summary;
    summary["command"] = "solve-grid";
    summary["operator"] = operator_echo(op);
    summary["lambda"] = lam;
    summary["delta"] = delta;
    summary["status"] = degel::status_name(st.status);
    summary["iterations"] = st.iterations;
    summary["residual_sup"] = st.residual_sup;
    summary["sup_u"] = st.sup_u;
    summary["interior_nodes"] = dom.interior.size();
    if (st.status == degel::FieldState::Status::Converged) {
        degel::dump_field_csv(dom, st.u, (out / "field.csv").string());
        const auto checks = degel::run_battery(op, dom, lam, delta, st.u);
        summary["verification"] = Json::parse(degel::battery_report(checks).dump());
    }
    write_json(out / "summary.json", summary);
    return st.status == degel::FieldState::Status::Converged ? kExitOk : kExitNoSolution;
}

int cmd_eigen_grid(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "domain", "delta"},
                 {"tol", "rho", "solver_rel_tol", "max_iter", "boundary", "weight"}, "config");
    const auto op = parse_operator(cfg);
    const double delta = cfg.at("delta").get<double>();
    const auto dom = parse_grid(cfg, delta);
    degel::EstimateOptions opts;
    opts.delta = delta;
    opts.tol = cfg.value("tol", 0.02);
    if (cfg.contains("rho")) opts.rho = cfg.at("rho").get<double>();
    opts.solver_rel_tol = cfg.value("solver_rel_tol", 1e-4);
    opts.max_iter = cfg.value("max_iter", 1000000L);
    const auto br = degel::estimate_lambda(op, dom, opts);

    Json summary;
    summary["command"] = "eigen-grid";
    summary["operator"] = operator_echo(op);
    summary["bracket"] = Json::parse(degel::bracket_summary(br).dump());
    degel::dump_field_csv(dom, br.lo_field, (out / "field.csv").string());
    write_json(out / "summary.json", summary);
    return kExitOk;
}

int cmd_sweep_lambda(const Json& cfg, const fs::path& out, int jobs) {
    require_keys(cfg, {"command", "operator", "domain", "delta", "lambdas"},
                 {"probes", "slack", "solver_rel_tol", "boundary", "weight"}, "config");
    const auto op = parse_operator(cfg);
    const double delta = cfg.at("delta").get<double>();
    const auto dom = parse_grid(cfg, delta);
    const auto lambdas = cfg.at("lambdas").get<std::vector<double>>();
    const int probes = cfg.value("probes", 20);
    const double slack = cfg.value("slack", 0.1);
    const double rel_tol = cfg.value("solver_rel_tol", 1e-6);

    // independent per-lambda solves, fanned across workers with isolated state
    std::vector<degel::FieldState> fields(lambdas.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= lambdas.size()) break;
            degel::GridSolveOptions so;
            so.tol_abs = degel::default_grid_tol(dom, op, lambdas[i], rel_tol);
            fields[i] = degel::solve_grid_bvp(op, dom, lambdas[i], so);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    Json rows = Json::array();
    bool all_ok = true;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        const bool ok = fields[i].status == degel::FieldState::Status::Converged;
        all_ok = all_ok && ok;
        rows.push_back({{"lambda", lambdas[i]},
                        {"status", degel::status_name(fields[i].status)},
                        {"sup_u", fields[i].sup_u},
                        {"iterations", fields[i].iterations}});
    }

    Json summary;
    summary["command"] = "sweep-lambda";
    summary["operator"] = operator_echo(op);
    summary["solves"] = rows;
    if (all_ok && lambdas.size() >= 3) {
        const auto rep = degel::lambda_derivative_check(op, dom, delta, lambdas, probes, slack, rel_tol);
        Json jp = Json::array();
        for (const auto& p : rep.probes)
            jp.push_back({{"node", p.node}, {"lambda", p.lam}, {"slope", p.slope},
                          {"lower", p.lower}, {"upper", p.upper}, {"passed", p.passed}});
        summary["derivative_check"] = {{"passed", rep.passed}, {"slack", rep.slack}, {"probes", jp}};
    }
    write_json(out / "summary.json", summary);
    return all_ok ? kExitOk : kExitNoSolution;
}

int cmd_verify(const Json& cfg, const fs::path& out) {
    require_keys(cfg, {"command", "operator", "domain", "delta", "lambda", "field"},
                 {"boundary", "weight"}, "config");
    const auto op = parse_operator(cfg);
    const double delta = cfg.at("delta").get<double>();
    const double lam = cfg.at("lambda").get<double>();
    const auto dom = parse_grid(cfg, delta);
    const auto u = degel::load_field_csv(dom, cfg.at("field").get<std::string>());
    const auto checks = degel::run_battery(op, dom, lam, delta, u);
    const auto rep = degel::battery_report(checks);
    Json report = Json::parse(rep.dump());
    report["command"] = "verify";
    report["operator"] = operator_echo(op);
    write_json(out / "report.json", report);
    write_json(out / "summary.json", report);
    return rep.at("all_passed").get<bool>() ? kExitOk : kExitNoSolution;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenerate elliptic eigenvalue toolkit"};
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    int jobs = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed for randomized checks");
    app.add_option("--jobs", jobs, "workers for independent sweep points");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream f(config_path);
        if (!f) throw input_error("cannot open config " + config_path);
        Json cfg;
        try {
            cfg = Json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("config parse error: ") + e.what());
        }
        if (!cfg.contains("command")) throw input_error("config is missing 'command'");
        const std::string command = cfg.at("command").get<std::string>();

        fs::create_directories(out_dir);
        const fs::path out(out_dir);

        if (command == "check-operator") return cmd_check_operator(cfg, out, seed);
        if (command == "barriers") return cmd_barriers(cfg, out);
        if (command == "solve-radial") return cmd_solve_radial(cfg, out);
        if (command == "eigen-radial") return cmd_eigen_radial(cfg, out);
        if (command == "solve-grid") return cmd_solve_grid(cfg, out);
        if (command == "eigen-grid") return cmd_eigen_grid(cfg, out);
        if (command == "sweep-lambda") return cmd_sweep_lambda(cfg, out, jobs);
        if (command == "verify") return cmd_verify(cfg, out);
        throw input_error("unknown command '" + command + "'");
    } catch (const input_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const degel::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNoSolution;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoSolution;
    }
}
