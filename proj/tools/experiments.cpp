#include "experiments.hpp"

#include "fsbp/diagnostics.hpp"
#include "fsbp/error_norms.hpp"
#include "fsbp/errors.hpp"
#include "fsbp/serialization.hpp"
#include "fsbp/svg.hpp"
#include "fsbp/time_integration.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fsbp::tools {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

std::function<double(double)> sine_ic(int k) {
    return [k](double x) { return std::sin(k * M_PI * x); };
}

std::function<double(double)> gaussian_ic() {
    return [](double x) { return std::exp(-x * x / 0.1); };
}

Construction build(const FunctionSpace& space, int n, const SparsityPattern& pattern,
                   InitMode init, unsigned long seed, int max_iters) {
    OptimOptions opts;
    opts.init = init;
    opts.seed = seed;
    opts.max_iters = max_iters;
    return construct_operator(space, equidistant_nodes(-1, 1, n), pattern, opts);
}

OutputTable make_table(std::vector<std::string> headers, const ExperimentConfig& config) {
    OutputTable t;
    t.headers = std::move(headers);
    t.config_digest = config_digest(config.canonical());
    t.seed = config.seed;
    return t;
}

void append_diagnostics_row(OutputTable& table, const std::string& label,
                            const SBPOperator& op, const FunctionSpace& space) {
    auto report = diagnose(op, space);
    table.add_row({label, format_double(report.exactness_residuals.maxCoeff(), 3),
                   format_double(report.sbp_defect, 3),
                   std::to_string(report.rank_d),
                   report.nullspace_consistent ? "yes" : "no",
                   report.eigenvalue_property ? "yes" : "no",
                   format_double(report.min_real_eig, 3)});
}

OutputTable diagnostics_sidecar(const ExperimentConfig& config) {
    return make_table({"operator", "max_residual", "sbp_defect", "rank",
                       "nullspace_consistent", "eigenvalue_property", "min_real_eig"},
                      config);
}

} // namespace

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "id=" << id << "\nseed=" << seed << "\nformat=" << format << "\n";
    if (n) out << "n=" << *n << "\n";
    if (blocks) {
        out << "blocks=";
        for (size_t i = 0; i < blocks->size(); ++i) out << (i ? "," : "") << (*blocks)[i];
        out << "\n";
    }
    if (bandwidth) out << "b=" << *bandwidth << "\n";
    if (boundary_size) out << "c=" << *boundary_size << "\n";
    if (wavenumber) out << "k=" << *wavenumber << "\n";
    if (t_end) out << "t_end=" << *t_end << "\n";
    if (tolerance) out << "tol=" << *tolerance << "\n";
    if (max_iters) out << "max_iters=" << *max_iters << "\n";
    return out.str();
}

AdvectionSeries advection_error_series(const SBPOperator& op, int blocks, double a,
                                       const std::function<double(double)>& u0, double t_end,
                                       int samples, bool fixed_cfl, double cfl, double tol) {
    BlockMesh1D mesh(-1, 1, blocks, op);
    Eigen::VectorXd u = mesh.sample(u0);
    RhsFn rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        dv = advection_rhs(mesh, a, v);
    };
    TimeIntegrationMode mode = fixed_cfl
                                   ? TimeIntegrationMode::fixed_cfl(cfl, std::abs(a), mesh.h_min())
                                   : TimeIntegrationMode::adaptive(tol, tol);
    AdvectionSeries series;
    auto record = [&](double t, const Eigen::VectorXd& state) {
        Eigen::VectorXd diff(mesh.total_nodes());
        for (int b = 0; b < blocks; ++b)
            for (int i = 0; i < mesh.nodes_per_block(); ++i)
                diff(b * mesh.nodes_per_block() + i) =
                    state(b * mesh.nodes_per_block() + i) -
                    advected_exact(u0, -1, 1, a, mesh.node_x(b, i), t);
        series.times.push_back(t);
        series.l2.push_back(advection_l2_norm(mesh, diff));
        series.linf.push_back(diff.cwiseAbs().maxCoeff());
    };
    record(0.0, u);
    for (int s = 1; s <= samples; ++s) {
        const double t0 = t_end * (s - 1) / samples;
        const double t1 = t_end * s / samples;
        u = integrate(rhs, u, t0, t1, mode);
        record(t1, u);
    }
    return series;
}

EulerSeries euler_error_series(const SBPOperator& op, int blocks_per_side,
                               const ManufacturedParams& params, double t_end, int samples,
                               double tol) {
    Euler2DSemidiscretization semi(BlockMesh2D(blocks_per_side, op), params);
    Eigen::VectorXd u = semi.exact_state(0.0);
    RhsFn rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
        semi.rhs(t, v, dv);
    };
    EulerSeries series;
    auto record = [&](double t, const Eigen::VectorXd& state) {
        auto [l2, linf] = semi.error_norms(state, t);
        series.times.push_back(t);
        series.l2.push_back(l2.sum());
        series.linf.push_back(linf.sum());
    };
    record(0.0, u);
    for (int s = 1; s <= samples; ++s) {
        const double t0 = t_end * (s - 1) / samples;
        const double t1 = t_end * s / samples;
        try {
            u = integrate(rhs, u, t0, t1, TimeIntegrationMode::adaptive(tol, tol));
        } catch (const SimulationAbort& e) {
            series.crash_time = e.time();
            return series;
        } catch (const StiffnessError&) {
            series.crash_time = t0;
            return series;
        }
        record(t1, u);
    }
    return series;
}

namespace {

std::vector<std::string> run_table1(const ExperimentConfig& config) {
    const int n = config.n.value_or(50);
    const int k = config.wavenumber.value_or(1);
    const double t_end = config.t_end.value_or(1.75);
    const int max_iters = config.max_iters.value_or(10000);

    OutputTable table = make_table({"operator", "parameter", "L2", "Linf", "exact"}, config);
    OutputTable side = diagnostics_sidecar(config);

    for (int d : {1, 3, 5, 7, 9, 11}) {
        auto c = build(polynomial_space(d), n, SparsityPattern::dense(), InitMode::Zero,
                       config.seed, max_iters);
        auto series = advection_error_series(c.op, 1, 2.0, sine_ic(k), t_end, 1, true, 0.5, 0);
        table.add_row({"fsbp_dense", std::to_string(d), format_double(series.l2.back(), 4),
                       format_double(series.linf.back(), 4), c.result.exact ? "yes" : "no"});
        append_diagnostics_row(side, "fsbp_dense_d" + std::to_string(d), c.op,
                               polynomial_space(d));
    }
    for (int p : {2, 4, 6}) {
        const int d = p / 2;
        auto c = build(polynomial_space(d), n, SparsityPattern::banded(d, 2 * d),
                       InitMode::Reference, config.seed, max_iters);
        auto series = advection_error_series(c.op, 1, 2.0, sine_ic(k), t_end, 1, true, 0.5, 0);
        table.add_row({"fd_banded", std::to_string(p), format_double(series.l2.back(), 4),
                       format_double(series.linf.back(), 4), c.result.exact ? "yes" : "no"});
        append_diagnostics_row(side, "fd_p" + std::to_string(p), c.op, polynomial_space(d));
    }

    const std::string path = join_path(config.out_dir, "table1." + config.format);
    const std::string side_path = join_path(config.out_dir, "table1_diagnostics." + config.format);
    table.write(path, config.format);
    side.write(side_path, config.format);
    return {path, side_path};
}

std::vector<std::string> run_table2(const ExperimentConfig& config) {
    const int n = config.n.value_or(50);
    const int k = config.wavenumber.value_or(2);
    const double t_end = config.t_end.value_or(1.75);
    const double tol = config.tolerance.value_or(1e-6);
    const int max_iters = config.max_iters.value_or(10000);

    OutputTable table = make_table({"space", "pattern", "L2", "Linf", "exact"}, config);
    OutputTable side = diagnostics_sidecar(config);

    struct SpaceCase {
        const char* label;
        FunctionSpace space;
    };
    const SpaceCase spaces[] = {{"P2", polynomial_space(2)}, {"T", trigonometric_space()}};
    for (const auto& sc : spaces) {
        for (int b : {3, 4, 5, 6}) {
            auto c = build(sc.space, n, SparsityPattern::banded(b, 2 * b), InitMode::Reference,
                           config.seed, max_iters);
            auto series =
                advection_error_series(c.op, 1, 2.0, sine_ic(k), t_end, 1, false, 0.5, tol);
            table.add_row({sc.label, "b=" + std::to_string(b),
                           format_double(series.l2.back(), 4),
                           format_double(series.linf.back(), 4),
                           c.result.exact ? "yes" : "no"});
            append_diagnostics_row(side, std::string(sc.label) + "_b" + std::to_string(b),
                                   c.op, sc.space);
        }
        auto c = build(sc.space, n, SparsityPattern::dense(), InitMode::Zero, config.seed,
                       max_iters);
        auto series = advection_error_series(c.op, 1, 2.0, sine_ic(k), t_end, 1, false, 0.5, tol);
        table.add_row({sc.label, "dense", format_double(series.l2.back(), 4),
                       format_double(series.linf.back(), 4), c.result.exact ? "yes" : "no"});
        append_diagnostics_row(side, std::string(sc.label) + "_dense", c.op, sc.space);
    }

    const std::string path = join_path(config.out_dir, "table2." + config.format);
    const std::string side_path = join_path(config.out_dir, "table2_diagnostics." + config.format);
    table.write(path, config.format);
    side.write(side_path, config.format);
    return {path, side_path};
}

std::vector<std::string> run_table4(const ExperimentConfig& config) {
    const int n = config.n.value_or(15);
    const int b = config.bandwidth.value_or(3);
    const int c_size = config.boundary_size.value_or(2 * b);
    const std::vector<int> blocks = config.blocks.value_or(std::vector<int>{2, 4, 8});
    const double t_end = config.t_end.value_or(1.0);
    const double tol = config.tolerance.value_or(1e-14);
    const int max_iters = config.max_iters.value_or(10000);
    ManufacturedParams params;

    OutputTable table =
        make_table({"space", "K", "rho", "rho_v1", "rho_v2", "rho_e", "EOC"}, config);
    OutputTable side = diagnostics_sidecar(config);

    struct SpaceCase {
        const char* label;
        FunctionSpace space;
    };
    const SpaceCase spaces[] = {{"P3", polynomial_space(3)}, {"T", trigonometric_space()}};
    for (const auto& sc : spaces) {
        auto built = build(sc.space, n, SparsityPattern::banded(b, c_size), InitMode::Reference,
                           config.seed, max_iters);
        append_diagnostics_row(side, sc.label, built.op, sc.space);
        std::vector<double> density_errors, resolutions;
        for (int k : blocks) {
            Euler2DSemidiscretization semi(BlockMesh2D(k, built.op), params);
            Eigen::VectorXd u = semi.exact_state(0.0);
            RhsFn rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
                semi.rhs(t, v, dv);
            };
            u = integrate(rhs, u, 0.0, t_end, TimeIntegrationMode::adaptive(tol, tol));
            auto [l2, linf] = semi.error_norms(u, t_end);
            density_errors.push_back(l2(0));
            resolutions.push_back(k);
            std::string eoc_cell = "-";
            if (density_errors.size() > 1) {
                auto orders = eoc(density_errors, resolutions);
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%.2f", orders.back());
                eoc_cell = buf;
            }
            table.add_row({sc.label, std::to_string(k), format_double(l2(0), 4),
                           format_double(l2(1), 4), format_double(l2(2), 4),
                           format_double(l2(3), 4), eoc_cell});
        }
    }

    const std::string path = join_path(config.out_dir, "table4." + config.format);
    const std::string side_path = join_path(config.out_dir, "table4_diagnostics." + config.format);
    table.write(path, config.format);
    side.write(side_path, config.format);
    return {path, side_path};
}

struct NamedAdvectionSeries {
    std::string name;
    AdvectionSeries series;
};

std::vector<std::string> write_series_outputs(const ExperimentConfig& config,
                                              const std::string& stem,
                                              const std::vector<NamedAdvectionSeries>& all) {
    OutputTable table = make_table({}, config);
    std::vector<std::string> headers = {"t"};
    for (const auto& s : all) {
        headers.push_back(s.name + "_L2");
        headers.push_back(s.name + "_Linf");
    }
    table.headers = headers;
    const size_t rows = all.front().series.times.size();
    for (size_t r = 0; r < rows; ++r) {
        std::vector<std::string> row = {format_double(all.front().series.times[r], 4)};
        for (const auto& s : all) {
            row.push_back(format_double(s.series.l2[r], 4));
            row.push_back(format_double(s.series.linf[r], 4));
        }
        table.add_row(std::move(row));
    }
    const std::string csv_path = join_path(config.out_dir, stem + "." + config.format);
    table.write(csv_path, config.format);

    auto svg_for = [&](bool linf) {
        std::vector<Series> plot;
        for (const auto& s : all) {
            Series ser;
            ser.name = s.name;
            for (size_t r = 0; r < s.series.times.size(); ++r) {
                const double value = linf ? s.series.linf[r] : s.series.l2[r];
                if (s.series.times[r] > 0.0 && value > 0.0) {
                    ser.x.push_back(s.series.times[r]);
                    ser.y.push_back(value);
                }
            }
            if (!ser.x.empty()) plot.push_back(std::move(ser));
        }
        AxesSpec axes;
        axes.title = stem + (linf ? " Linf" : " L2");
        axes.x_label = "t";
        axes.y_label = linf ? "Linf error" : "L2 error";
        axes.y_log = true;
        return emit_svg(plot, axes);
    };
    const std::string svg_l2 = join_path(config.out_dir, stem + "_l2.svg");
    const std::string svg_linf = join_path(config.out_dir, stem + "_linf.svg");
    {
        std::ofstream out(svg_l2);
        out << svg_for(false);
    }
    {
        std::ofstream out(svg_linf);
        out << svg_for(true);
    }
    return {csv_path, svg_l2, svg_linf};
}

std::vector<std::string> run_fig2(const ExperimentConfig& config) {
    const int n = config.n.value_or(15);
    const int blocks = config.blocks ? config.blocks->front() : 8;
    const int b = config.bandwidth.value_or(3);
    const double t_end = config.t_end.value_or(1.75);
    const double tol = config.tolerance.value_or(1e-6);
    const int max_iters = config.max_iters.value_or(10000);
    const int samples = 20;

    std::vector<NamedAdvectionSeries> all;
    struct SpaceCase {
        const char* label;
        FunctionSpace space;
    };
    const SpaceCase spaces[] = {{"P3", polynomial_space(3)}, {"T", trigonometric_space()}};
    for (const auto& sc : spaces) {
        auto sparse = build(sc.space, n, SparsityPattern::banded(b, 2 * b), InitMode::Reference,
                            config.seed, max_iters);
        all.push_back({std::string(sc.label) + "_sparse",
                       advection_error_series(sparse.op, blocks, 2.0, gaussian_ic(), t_end,
                                              samples, false, 0.5, tol)});
        auto dense = build(sc.space, n, SparsityPattern::dense(), InitMode::Zero, config.seed,
                           max_iters);
        all.push_back({std::string(sc.label) + "_dense",
                       advection_error_series(dense.op, blocks, 2.0, gaussian_ic(), t_end,
                                              samples, false, 0.5, tol)});
    }
    return write_series_outputs(config, "fig2", all);
}

std::vector<std::string> run_fig4(const ExperimentConfig& config) {
    const int n = config.n.value_or(15);
    const int blocks = config.blocks ? config.blocks->front() : 8;
    const double t_end = config.t_end.value_or(1.75);
    const double tol = config.tolerance.value_or(1e-6);
    const int max_iters = config.max_iters.value_or(10000);
    const int samples = 20;

    FunctionSpace g;
    g.name = "sin:pi,cos:pi";
    g.basis = {BasisFunction::sine(M_PI), BasisFunction::cosine(M_PI)};

    OptimOptions opts;
    opts.seed = config.seed;
    opts.max_iters = max_iters;
    auto regularized = construct_regularized(polynomial_space(3), RegularizationSpec::uniform(g),
                                             equidistant_nodes(-1, 1, n),
                                             SparsityPattern::dense(), opts);
    auto plain = build(polynomial_space(3), n, SparsityPattern::dense(), InitMode::Zero,
                       config.seed, max_iters);

    std::vector<NamedAdvectionSeries> all;
    all.push_back({"P3_regularized",
                   advection_error_series(regularized.op, blocks, 2.0, gaussian_ic(), t_end,
                                          samples, false, 0.5, tol)});
    all.push_back({"P3_plain", advection_error_series(plain.op, blocks, 2.0, gaussian_ic(),
                                                      t_end, samples, false, 0.5, tol)});
    return write_series_outputs(config, "fig4", all);
}

struct NamedEulerSeries {
    std::string name;
    EulerSeries series;
};

std::vector<std::string> write_euler_series_outputs(const ExperimentConfig& config,
                                                    const std::string& stem,
                                                    const std::vector<NamedEulerSeries>& all) {
    OutputTable table = make_table({"series", "t", "L2", "Linf", "event"}, config);
    for (const auto& s : all) {
        for (size_t r = 0; r < s.series.times.size(); ++r)
            table.add_row({s.name, format_double(s.series.times[r], 4),
                           format_double(s.series.l2[r], 4),
                           format_double(s.series.linf[r], 4), ""});
        if (s.series.crash_time)
            table.add_row({s.name, format_double(*s.series.crash_time, 4), "", "", "crash"});
    }
    const std::string csv_path = join_path(config.out_dir, stem + "." + config.format);
    table.write(csv_path, config.format);

    std::vector<Series> plot;
    for (const auto& s : all) {
        Series ser;
        ser.name = s.name;
        for (size_t r = 0; r < s.series.times.size(); ++r)
            if (s.series.times[r] > 0.0 && s.series.l2[r] > 0.0) {
                ser.x.push_back(s.series.times[r]);
                ser.y.push_back(s.series.l2[r]);
            }
        if (!ser.x.empty()) plot.push_back(std::move(ser));
    }
    AxesSpec axes;
    axes.title = stem + " L2";
    axes.x_label = "t";
    axes.y_label = "summed L2 error";
    axes.y_log = true;
    const std::string svg_path = join_path(config.out_dir, stem + "_l2.svg");
    {
        std::ofstream out(svg_path);
        out << emit_svg(plot, axes);
    }
    return {csv_path, svg_path};
}

std::vector<std::string> run_fig3(const ExperimentConfig& config) {
    const int n = config.n.value_or(50);
    const int b = config.bandwidth.value_or(3);
    const double t_end = config.t_end.value_or(6.0);
    const double tol = config.tolerance.value_or(1e-6);
    const int max_iters = config.max_iters.value_or(10000);
    const int samples = 24;
    ManufacturedParams params;

    std::vector<NamedEulerSeries> all;
    struct SpaceCase {
        const char* label;
        FunctionSpace space;
    };
    const SpaceCase spaces[] = {{"P3", polynomial_space(3)}, {"T", trigonometric_space()}};
    for (const auto& sc : spaces) {
        auto sparse = build(sc.space, n, SparsityPattern::banded(b, 2 * b), InitMode::Reference,
                            config.seed, max_iters);
        all.push_back({std::string(sc.label) + "_sparse",
                       euler_error_series(sparse.op, 1, params, t_end, samples, tol)});
        auto dense = build(sc.space, n, SparsityPattern::dense(), InitMode::Zero, config.seed,
                           max_iters);
        all.push_back({std::string(sc.label) + "_dense",
                       euler_error_series(dense.op, 1, params, t_end, samples, tol)});
    }
    return write_euler_series_outputs(config, "fig3", all);
}

std::vector<std::string> run_fig5(const ExperimentConfig& config) {
    const int n = config.n.value_or(15);
    const int blocks = config.blocks ? config.blocks->front() : 8;
    const double t_end = config.t_end.value_or(2.0);
    const double tol = config.tolerance.value_or(1e-6);
    const int max_iters = config.max_iters.value_or(10000);
    const int samples = 16;
    ManufacturedParams params;

    FunctionSpace g;
    g.name = "sin:pi,cos:pi";
    g.basis = {BasisFunction::sine(M_PI), BasisFunction::cosine(M_PI)};

    OptimOptions opts;
    opts.seed = config.seed;
    opts.max_iters = max_iters;
    auto regularized = construct_regularized(polynomial_space(3), RegularizationSpec::uniform(g),
                                             equidistant_nodes(-1, 1, n),
                                             SparsityPattern::dense(), opts);
    auto plain = build(polynomial_space(3), n, SparsityPattern::dense(), InitMode::Zero,
                       config.seed, max_iters);

    std::vector<NamedEulerSeries> all;
    all.push_back({"P3_regularized",
                   euler_error_series(regularized.op, blocks, params, t_end, samples, tol)});
    all.push_back({"P3_plain", euler_error_series(plain.op, blocks, params, t_end, samples, tol)});
    return write_euler_series_outputs(config, "fig5", all);
}

} // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
    if (config.id == "table1") return run_table1(config);
    if (config.id == "table2") return run_table2(config);
    if (config.id == "table4") return run_table4(config);
    if (config.id == "fig2") return run_fig2(config);
    if (config.id == "fig3") return run_fig3(config);
    if (config.id == "fig4") return run_fig4(config);
    if (config.id == "fig5") return run_fig5(config);
    throw std::invalid_argument("unknown experiment id '" + config.id + "'");
}

} // namespace fsbp::tools
