#include "experiments.hpp"

#include "fsbp/advection.hpp"
#include "fsbp/construct.hpp"
#include "fsbp/diagnostics.hpp"
#include "fsbp/error_norms.hpp"
#include "fsbp/errors.hpp"
#include "fsbp/serialization.hpp"
#include "fsbp/table.hpp"
#include "fsbp/time_integration.hpp"

#include <CLI11.hpp>

#include <clocale>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace fsbp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNonExact = 2;
constexpr int kExitDiagnostics = 3;
constexpr int kExitCrash = 4;

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) values.push_back(std::stoi(tok));
    return values;
}

InitMode parse_init(const std::string& name) {
    if (name == "reference") return InitMode::Reference;
    if (name == "zero") return InitMode::Zero;
    if (name == "random") return InitMode::Random;
    throw std::invalid_argument("init must be reference, zero, or random");
}

// key=value lines; values here override command-line flags
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line '" + line + "' (expected key=value)");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

struct BuildArgs {
    std::string space = "poly:1";
    std::string nodes = "eq:-1,1,50";
    std::string pattern = "dense";
    std::string init = "reference";
    std::string norm_map = "sigmoid";
    std::string g_spec;
    std::string lambda_spec;
    std::string out = "operator.fsbp";
    std::string config_file;
    unsigned long seed = 0;
    int max_iters = 10000;
    double grad_tol = 1e-13;
    double residual_tol = 1e-10;
    bool penalty_variant = false;

    void apply_config() {
        if (config_file.empty()) return;
        auto kv = read_config_file(config_file);
        auto get = [&](const char* key, std::string& slot) {
            auto it = kv.find(key);
            if (it != kv.end()) slot = it->second;
        };
        get("space", space);
        get("nodes", nodes);
        get("pattern", pattern);
        get("init", init);
        get("norm_map", norm_map);
        get("g", g_spec);
        get("lambda", lambda_spec);
        get("out", out);
        if (kv.count("seed")) seed = std::stoul(kv.at("seed"));
        if (kv.count("max_iters")) max_iters = std::stoi(kv.at("max_iters"));
        if (kv.count("grad_tol")) grad_tol = std::stod(kv.at("grad_tol"));
        if (kv.count("residual_tol")) residual_tol = std::stod(kv.at("residual_tol"));
        if (kv.count("penalty_variant")) penalty_variant = kv.at("penalty_variant") == "true";
    }
};

int cmd_build(const BuildArgs& args) {
    auto space = parse_space_spec(args.space);
    auto nodes = parse_node_spec(args.nodes);
    auto pattern = parse_pattern_spec(args.pattern);

    OptimOptions opts;
    opts.seed = args.seed;
    opts.max_iters = args.max_iters;
    opts.grad_tol = args.grad_tol;
    opts.residual_tol = args.residual_tol;
    opts.init = parse_init(args.init);
    if (args.norm_map == "softplus")
        opts.norm_map = NormMap::Softplus;
    else if (args.norm_map != "sigmoid")
        throw std::invalid_argument("norm_map must be sigmoid or softplus");

    Construction result = [&] {
        if (args.g_spec.empty()) return construct_operator(space, nodes, pattern, opts);
        RegularizationSpec reg;
        reg.g_basis = parse_space_spec(args.g_spec);
        reg.weights = args.lambda_spec.empty()
                          ? std::vector<double>(static_cast<size_t>(reg.g_basis.size()), 1.0)
                          : parse_double_list(args.lambda_spec);
        return construct_regularized(space, reg, nodes, pattern, opts,
                                     args.penalty_variant ? RegularizedMode::WeightedPenalty
                                                          : RegularizedMode::Constrained);
    }();

    write_operator_file(result.op, args.out);
    const int rank = numerical_rank(differentiation_matrix(result.op));
    std::cout << "objective=" << format_double(result.result.objective, 6)
              << " grad_norm=" << format_double(result.result.grad_norm, 3)
              << " iters=" << result.result.iters
              << " converged=" << (result.result.converged ? "yes" : "no")
              << " exact=" << (result.result.exact ? "yes" : "no") << " rank=" << rank
              << " file=" << args.out << "\n";
    return result.result.exact ? kExitOk : kExitNonExact;
}

struct CheckArgs {
    std::string file;
    std::string space = "poly:1";
    std::string nu_spec = "0.75,1,2";
    std::string csv_out;
    std::string format = "csv";
    double rtol = kDefaultRankTol;
};

int cmd_check(const CheckArgs& args) {
    SBPOperator op = read_operator_file(args.file);
    auto space = parse_space_spec(args.space);
    auto nu = parse_double_list(args.nu_spec);
    auto report = diagnose(op, space, args.rtol, nu);

    const int n = op.size();
    std::cout << "operator: N=" << n << " pattern=" << op.pattern().description()
              << " domain=[" << op.nodes().x_left() << ", " << op.nodes().x_right() << "]\n";
    std::cout << "exactness residuals:";
    for (int j = 0; j < report.exactness_residuals.size(); ++j)
        std::cout << ' ' << format_double(report.exactness_residuals(j), 3);
    std::cout << "\nsbp defect: " << format_double(report.sbp_defect, 3)
              << "\nmin norm weight: " << format_double(report.min_norm_weight, 3)
              << "\nrank(D): " << report.rank_d << " (nullspace "
              << (report.nullspace_consistent ? "consistent" : "inconsistent") << ")\n";
    std::cout << "eigenvalue property: " << (report.eigenvalue_property ? "holds" : "fails")
              << " (min real part " << format_double(report.min_real_eig, 3) << " over nu =";
    for (double v : nu) std::cout << ' ' << v;
    std::cout << ")\n";

    if (!args.csv_out.empty()) {
        OutputTable t;
        t.headers = {"quantity", "value"};
        t.config_digest = config_digest("check:" + args.file + ":" + args.space);
        t.add_row({"max_residual", format_double(report.exactness_residuals.maxCoeff(), 6)});
        t.add_row({"sbp_defect", format_double(report.sbp_defect, 6)});
        t.add_row({"min_norm_weight", format_double(report.min_norm_weight, 6)});
        t.add_row({"rank", std::to_string(report.rank_d)});
        t.add_row({"nullspace_consistent", report.nullspace_consistent ? "yes" : "no"});
        t.add_row({"eigenvalue_property", report.eigenvalue_property ? "yes" : "no"});
        t.add_row({"min_real_eig", format_double(report.min_real_eig, 6)});
        t.write(args.csv_out, args.format);
    }

    const bool pass = report.exactness_residuals.maxCoeff() <= 1e-9 &&
                      report.sbp_defect <= 1e-14 * n && report.min_norm_weight > 0.0 &&
                      report.nullspace_consistent && report.eigenvalue_property;
    return pass ? kExitOk : kExitDiagnostics;
}

struct SolveArgs {
    std::string operator_file;
    std::string ic = "sin:1";
    std::string out_dir = ".";
    std::string format = "csv";
    int blocks = 1;
    double a = 2.0;
    double t_end = 1.75;
    double cfl = 0.5;
    double adaptive_tol = 0.0; // 0 = fixed CFL
    int snapshots = 1;
};

int cmd_solve(const SolveArgs& args) {
    SBPOperator op = read_operator_file(args.operator_file);

    std::function<double(double)> u0;
    if (args.ic.rfind("sin:", 0) == 0) {
        const int k = std::stoi(args.ic.substr(4));
        u0 = [k](double x) { return std::sin(k * M_PI * x); };
    } else if (args.ic == "gauss") {
        u0 = [](double x) { return std::exp(-x * x / 0.1); };
    } else {
        throw std::invalid_argument("ic must be sin:<k> or gauss");
    }

    BlockMesh1D mesh(-1, 1, args.blocks, op);
    Eigen::VectorXd u = mesh.sample(u0);
    RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mesh, args.a, v);
    };
    TimeIntegrationMode mode =
        args.adaptive_tol > 0.0
            ? TimeIntegrationMode::adaptive(args.adaptive_tol, args.adaptive_tol)
            : TimeIntegrationMode::fixed_cfl(args.cfl, std::abs(args.a), mesh.h_min());

    OutputTable snapshot;
    snapshot.headers = {"t", "block", "node", "x", "u"};
    snapshot.config_digest = config_digest("solve:" + args.operator_file + ":" + args.ic);

    auto record = [&](double t, const Eigen::VectorXd& state) {
        for (int b = 0; b < args.blocks; ++b)
            for (int i = 0; i < mesh.nodes_per_block(); ++i)
                snapshot.add_row({format_double(t, 6), std::to_string(b), std::to_string(i),
                                  format_double(mesh.node_x(b, i), 6),
                                  format_double(state(b * mesh.nodes_per_block() + i), 10)});
    };

    try {
        const int snaps = std::max(1, args.snapshots);
        record(0.0, u);
        for (int s = 1; s <= snaps; ++s) {
            const double t0 = args.t_end * (s - 1) / snaps;
            const double t1 = args.t_end * s / snaps;
            u = integrate(rhs, u, t0, t1, mode);
            record(t1, u);
        }
    } catch (const SimulationAbort& e) {
        std::cerr << "simulation crash: " << e.what() << "\n";
        return kExitCrash;
    } catch (const StiffnessError& e) {
        std::cerr << "simulation crash: " << e.what() << "\n";
        return kExitCrash;
    }

    Eigen::VectorXd diff(mesh.total_nodes());
    for (int b = 0; b < args.blocks; ++b)
        for (int i = 0; i < mesh.nodes_per_block(); ++i)
            diff(b * mesh.nodes_per_block() + i) =
                u(b * mesh.nodes_per_block() + i) -
                advected_exact(u0, -1, 1, args.a, mesh.node_x(b, i), args.t_end);

    const std::string snap_path = args.out_dir + "/solution." + args.format;
    snapshot.write(snap_path, args.format);

    OutputTable errors;
    errors.headers = {"t_end", "L2", "Linf"};
    errors.config_digest = snapshot.config_digest;
    errors.add_row({format_double(args.t_end, 6),
                    format_double(advection_l2_norm(mesh, diff), 6),
                    format_double(diff.cwiseAbs().maxCoeff(), 6)});
    const std::string err_path = args.out_dir + "/errors." + args.format;
    errors.write(err_path, args.format);

    std::cout << "L2=" << format_double(advection_l2_norm(mesh, diff), 6)
              << " Linf=" << format_double(diff.cwiseAbs().maxCoeff(), 6) << " wrote "
              << snap_path << ", " << err_path << "\n";
    return kExitOk;
}

struct ConvergenceArgs {
    std::string problem = "advection";
    std::string space = "poly:3";
    std::string pattern = "banded:b=3,c=6";
    std::string blocks = "2,4,8,16";
    std::string out_dir = ".";
    std::string format = "csv";
    int n = 15;
    double t_end = 1.75;
    double tol = 1e-14;
    double a = 2.0;
    unsigned long seed = 0;
    int max_iters = 10000;
};

int cmd_convergence(const ConvergenceArgs& args) {
    auto space = parse_space_spec(args.space);
    auto pattern = parse_pattern_spec(args.pattern);
    OptimOptions opts;
    opts.seed = args.seed;
    opts.max_iters = args.max_iters;
    auto built = construct_operator(space, equidistant_nodes(-1, 1, args.n), pattern, opts);
    if (!built.result.exact)
        std::cerr << "warning: reference operator is not exact (objective "
                  << format_double(built.result.objective, 3) << ")\n";

    OutputTable table;
    table.headers = {"K", "var", "L2", "Linf", "EOC"};
    table.config_digest = config_digest("convergence:" + args.problem + ":" + args.space +
                                        ":" + args.pattern + ":" + args.blocks);
    table.seed = args.seed;

    ErrorReport report;
    std::vector<double> resolutions;
    for (int k : parse_int_list(args.blocks)) {
        double l2 = 0.0, linf = 0.0;
        std::string var;
        if (args.problem == "advection") {
            var = "u";
            BlockMesh1D mesh(-1, 1, k, built.op);
            auto u0 = [](double x) { return std::exp(-x * x / 0.1); };
            Eigen::VectorXd u = mesh.sample(u0);
            RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
                dv = advection_rhs(mesh, args.a, v);
            };
            u = integrate(rhs, u, 0.0, args.t_end, TimeIntegrationMode::adaptive(args.tol, args.tol));
            Eigen::VectorXd diff(mesh.total_nodes());
            for (int b = 0; b < k; ++b)
                for (int i = 0; i < mesh.nodes_per_block(); ++i)
                    diff(b * mesh.nodes_per_block() + i) =
                        u(b * mesh.nodes_per_block() + i) -
                        advected_exact(u0, -1, 1, args.a, mesh.node_x(b, i), args.t_end);
            l2 = advection_l2_norm(mesh, diff);
            linf = diff.cwiseAbs().maxCoeff();
        } else if (args.problem == "euler") {
            var = "rho";
            ManufacturedParams params;
            Euler2DSemidiscretization semi(BlockMesh2D(k, built.op), params);
            Eigen::VectorXd u = semi.exact_state(0.0);
            RhsFn rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
                semi.rhs(t, v, dv);
            };
            u = integrate(rhs, u, 0.0, args.t_end, TimeIntegrationMode::adaptive(args.tol, args.tol));
            auto [l2v, linfv] = semi.error_norms(u, args.t_end);
            l2 = l2v(0);
            linf = linfv(0);
        } else {
            throw std::invalid_argument("problem must be advection or euler");
        }

        report.variables.push_back(var);
        report.l2.push_back(l2);
        report.linf.push_back(linf);
        resolutions.push_back(k);
        report.eoc = report.l2.size() > 1 ? eoc(report.l2, resolutions) : std::vector<double>{};
        std::string eoc_cell = "-";
        if (!report.eoc.empty()) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.3f", report.eoc.back());
            eoc_cell = buf;
        }
        table.add_row({std::to_string(k), var, format_double(l2, 6), format_double(linf, 6),
                       eoc_cell});
        std::cout << "K=" << k << " L2=" << format_double(l2, 4) << " EOC=" << eoc_cell << "\n";
    }

    const std::string path = args.out_dir + "/convergence." + args.format;
    table.write(path, args.format);
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"function-space SBP operator construction and benchmarks"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "construct an operator and write it to a file");
    build->add_option("--space", build_args.space, "function space (poly:d | trig | list)");
    build->add_option("--nodes", build_args.nodes, "node spec eq:<xL>,<xR>,<N>");
    build->add_option("--pattern", build_args.pattern, "dense | banded:b=<b>,c=<c>");
    build->add_option("--init", build_args.init, "reference | zero | random");
    build->add_option("--norm-map", build_args.norm_map, "sigmoid | softplus");
    build->add_option("--g", build_args.g_spec, "augmented basis (e.g. sin:pi,cos:pi)");
    build->add_option("--lambda", build_args.lambda_spec, "augmented weights");
    build->add_option("--out", build_args.out, "output operator file");
    build->add_option("--seed", build_args.seed, "random seed");
    build->add_option("--max-iters", build_args.max_iters, "iteration budget");
    build->add_option("--grad-tol", build_args.grad_tol, "gradient tolerance");
    build->add_option("--residual-tol", build_args.residual_tol, "exactness tolerance");
    build->add_flag("--penalty-variant", build_args.penalty_variant,
                    "weighted-sum regularization instead of the constrained form");
    build->add_option("--config", build_args.config_file, "key=value file overriding flags");

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "diagnose an operator file");
    check->add_option("file", check_args.file, "operator file")->required();
    check->add_option("--space", check_args.space, "function space to test exactness on");
    check->add_option("--rtol", check_args.rtol, "rank tolerance");
    check->add_option("--nu", check_args.nu_spec, "nu samples for the eigenvalue check");
    check->add_option("--csv", check_args.csv_out, "also write a CSV report");
    check->add_option("--format", check_args.format, "csv | tsv");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "run a periodic advection benchmark");
    solve->add_option("--operator", solve_args.operator_file, "operator file")->required();
    solve->add_option("--blocks", solve_args.blocks, "number of mesh blocks");
    solve->add_option("--a", solve_args.a, "advection velocity");
    solve->add_option("--t-end", solve_args.t_end, "final time");
    solve->add_option("--ic", solve_args.ic, "sin:<k> | gauss");
    solve->add_option("--cfl", solve_args.cfl, "CFL number (fixed-step mode)");
    solve->add_option("--adaptive", solve_args.adaptive_tol,
                      "adaptive tolerance (overrides CFL mode)");
    solve->add_option("--snapshots", solve_args.snapshots, "number of solution snapshots");
    solve->add_option("--out-dir", solve_args.out_dir, "output directory");
    solve->add_option("--format", solve_args.format, "csv | tsv");

    ConvergenceArgs conv_args;
    auto* conv = app.add_subcommand("convergence", "mesh refinement study");
    conv->add_option("--problem", conv_args.problem, "advection | euler");
    conv->add_option("--space", conv_args.space, "function space");
    conv->add_option("--pattern", conv_args.pattern, "sparsity pattern");
    conv->add_option("--blocks", conv_args.blocks, "comma list of block counts");
    conv->add_option("--n", conv_args.n, "nodes per block");
    conv->add_option("--t-end", conv_args.t_end, "final time");
    conv->add_option("--tol", conv_args.tol, "adaptive tolerance");
    conv->add_option("--a", conv_args.a, "advection velocity");
    conv->add_option("--seed", conv_args.seed, "random seed");
    conv->add_option("--max-iters", conv_args.max_iters, "construction iteration budget");
    conv->add_option("--out-dir", conv_args.out_dir, "output directory");
    conv->add_option("--format", conv_args.format, "csv | tsv");

    fsbp::tools::ExperimentConfig exp_config;
    std::string blocks_list;
    int exp_n = -1, exp_b = -1, exp_c = -1, exp_k = -1, exp_iters = -1;
    double exp_t = -1, exp_tol = -1;
    auto* rep = app.add_subcommand("reproduce", "rerun a benchmark recipe");
    rep->add_option("id", exp_config.id, "table1|table2|table4|fig2|fig3|fig4|fig5")->required();
    rep->add_option("--out-dir", exp_config.out_dir, "output directory");
    rep->add_option("--format", exp_config.format, "csv | tsv");
    rep->add_option("--seed", exp_config.seed, "random seed");
    rep->add_option("--n", exp_n, "nodes per block override");
    rep->add_option("--blocks", blocks_list, "block count override (comma list)");
    rep->add_option("--b", exp_b, "bandwidth override");
    rep->add_option("--c", exp_c, "boundary block size override");
    rep->add_option("--k", exp_k, "wavenumber override");
    rep->add_option("--t-end", exp_t, "final time override");
    rep->add_option("--tol", exp_tol, "adaptive tolerance override");
    rep->add_option("--max-iters", exp_iters, "construction iteration budget");

    try {
        app.parse(argc, argv);

        if (*build) {
            build_args.apply_config();
            return cmd_build(build_args);
        }
        if (*check) return cmd_check(check_args);
        if (*solve) return cmd_solve(solve_args);
        if (*conv) return cmd_convergence(conv_args);
        if (*rep) {
            if (exp_n > 0) exp_config.n = exp_n;
            if (exp_b > 0) exp_config.bandwidth = exp_b;
            if (exp_c > 0) exp_config.boundary_size = exp_c;
            if (exp_k > 0) exp_config.wavenumber = exp_k;
            if (exp_t > 0) exp_config.t_end = exp_t;
            if (exp_tol > 0) exp_config.tolerance = exp_tol;
            if (exp_iters > 0) exp_config.max_iters = exp_iters;
            if (!blocks_list.empty()) exp_config.blocks = parse_int_list(blocks_list);
            auto paths = fsbp::tools::run_experiment(exp_config);
            for (const auto& p : paths) std::cout << "wrote " << p << "\n";
            return kExitOk;
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const fsbp::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
