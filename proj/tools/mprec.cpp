#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mprec/harness.hpp"
#include "mprec/matrix_io.hpp"
#include "mprec/spectral.hpp"

namespace {

int cmd_generate(const std::string& out, mprec::ProblemSpec spec, double pe, double perm_sigma,
                 double span_decades, std::uint64_t seed) {
    if (pe > 0.0) spec.kappa = mprec::kappa_for_peclet(spec, pe);
    if (perm_sigma > 0.0)
        spec.perm_field = mprec::lognormal_field(spec.nx, spec.ny, spec.perm, perm_sigma, seed,
                                                 span_decades);
    const mprec::SyntheticJacobian prob = mprec::build_problem(spec, seed);
    mprec::write_problem(prob, out);
    std::printf("wrote %s.{mtx,layout,rhs,states}: %dx%d grid, dim %d, Pe %g, %s\n", out.c_str(),
                prob.nx, prob.ny, prob.a.dim(), prob.pe, prob.heterogeneity.c_str());
    return 0;
}

int cmd_solve(const std::string& matrix, const std::string& layout, const std::string& rhs,
              const std::string& method, double tol, int max_iter) {
    const mprec::SolvableSystem sys = mprec::ingest_external(matrix, layout, rhs);
    const mprec::SolveOutcome outcome =
        mprec::solve_system(sys.a, sys.b, mprec::parse_method(method), tol, max_iter);
    std::printf("method %s: %d iterations, %s, true residual %.3e (setup %.3fs, solve %.3fs)\n",
                method.c_str(), outcome.result.iterations,
                outcome.result.converged ? "converged" : "NOT converged",
                outcome.result.final_true_residual, outcome.setup_time_s,
                outcome.result.wall_time_s);
    if (!outcome.scaling_record.empty())
        std::printf("scalings: %s\n", outcome.scaling_record.c_str());
    return outcome.result.converged ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& format, std::string out) {
    const mprec::ExperimentConfig cfg = mprec::parse_config(config_path);
    const mprec::IterationReport report = mprec::run_sweep(cfg);
    if (out.empty()) out = cfg.output_dir + "/report";
    mprec::emit_report(report, format, out);
    int failures = 0;
    for (const mprec::ReportRow& r : report.rows)
        if (!r.error.empty()) {
            ++failures;
            std::fprintf(stderr, "scenario %s failed: %s\n", r.scenario.c_str(), r.error.c_str());
        }
    std::printf("%zu scenarios, %d failures, report written to %s\n", report.rows.size(), failures,
                out.c_str());
    return failures > 0 ? 1 : 0;
}

int cmd_spectral(const std::string& matrix, const std::string& layout, const std::string& method,
                 const std::string& mode, const std::string& out) {
    const mprec::BlockMatrix a = mprec::read_block_matrix(matrix, layout);
    const mprec::MethodSpec spec = mprec::parse_method(method);
    const mprec::ScaledSystem scaled =
        mprec::left_scale(a, mprec::Vector::Zero(a.dim()), spec.method);
    const auto emit = [&](const mprec::ScalarMatrix& sub, const std::string& tag) {
        if (sub.rows() == 0) return;
        const mprec::SpectrumSummary s = mprec::spectral_diagnostic(
            sub, mode == "extremal" ? mprec::SpectrumMode::Extremal
                                    : mprec::SpectrumMode::FullDense);
        const std::string path = out + "_" + tag + ".csv";
        std::ofstream f(path);
        if (!f) throw mprec::IoError("cannot write " + path);
        f << "re,im\n";
        char buf[80];
        for (const auto& e : s.eigenvalues) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", e.real(), e.imag());
            f << buf;
        }
        std::printf("%s: dim %d, real parts in [%g, %g], symmetric part %s -> %s\n", tag.c_str(),
                    sub.rows(), s.min_real, s.max_real, to_string(s.symmetric_part).c_str(),
                    path.c_str());
    };
    switch (spec.method) {
        case mprec::Method::Cpr: emit(scaled.b_pp, "bpp"); break;
        case mprec::Method::Cptr: emit(scaled.b_ee, "bee"); break;
        case mprec::Method::Cptr3:
            emit(scaled.b_pp, "bpp");
            emit(scaled.c_tt, "ctt");
            break;
        default: throw mprec::ConfigError("spectral diagnostics need cpr, cptr or cptr3");
    }
    return 0;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out) {
    mprec::emit_report(mprec::parse_report_csv(in), format, out);
    std::printf("reformatted %s -> %s (%s)\n", in.c_str(), out.c_str(), format.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-structured multi-stage preconditioner toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Generate a synthetic coupled problem");
    mprec::ProblemSpec spec;
    double gen_pe = 0.0, gen_sigma = 0.0, gen_span = 0.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "problem";
    gen->add_option("--nx", spec.nx, "grid cells in x");
    gen->add_option("--ny", spec.ny, "grid cells in y");
    gen->add_option("--pe", gen_pe, "target Peclet number (sets kappa)");
    gen->add_option("--kappa", spec.kappa, "thermal conductivity [kJ/m/day/K]");
    gen->add_option("--time-fraction", spec.time_fraction, "front position in [0,1]");
    gen->add_option("--n-c", spec.n_c, "mobile components of the equivalent layout");
    gen->add_option("--n-solid", spec.n_solid, "solid species");
    gen->add_option("--perm-sigma", gen_sigma, "lognormal permeability sigma (0 = homogeneous)");
    gen->add_option("--span-decades", gen_span, "rescale the log-field to this decade span");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output basename");

    auto* solve = app.add_subcommand("solve", "Solve one system with one method");
    std::string s_matrix, s_layout, s_rhs, s_method = "ilu0";
    double s_tol = 1e-8;
    int s_max_iter = 500;
    solve->add_option("--matrix", s_matrix, "Matrix Market file")->required();
    solve->add_option("--layout", s_layout, "field layout sidecar")->required();
    solve->add_option("--rhs", s_rhs, "right-hand side vector")->required();
    solve->add_option("--method", s_method,
                      "ilu0 | cpr-direct | cpr-amg | cptr-direct | cptr3-direct | cptr3-amg");
    solve->add_option("--tol", s_tol, "relative tolerance");
    solve->add_option("--max-iter", s_max_iter, "GMRES iteration cap");

    auto* sweep = app.add_subcommand("sweep", "Run a config-driven scenario sweep");
    std::string w_config, w_format = "csv", w_out;
    sweep->add_option("--config", w_config, "INI experiment config")->required();
    sweep->add_option("--format", w_format, "csv | text-table");
    sweep->add_option("--out", w_out, "report basename (default <output>/report)");

    auto* spectral = app.add_subcommand("spectral", "Eigenvalue diagnostics of sub-systems");
    std::string p_matrix, p_layout, p_method = "cptr3-direct", p_mode = "full", p_out = "spectrum";
    spectral->add_option("--matrix", p_matrix, "Matrix Market file")->required();
    spectral->add_option("--layout", p_layout, "field layout sidecar")->required();
    spectral->add_option("--method", p_method, "cpr-* | cptr-* | cptr3-*");
    spectral->add_option("--mode", p_mode, "full | extremal");
    spectral->add_option("--out", p_out, "output basename");

    auto* report = app.add_subcommand("report", "Reformat an existing report");
    std::string r_in, r_format = "text-table", r_out = "report";
    report->add_option("--in", r_in, "input report basename")->required();
    report->add_option("--format", r_format, "csv | text-table");
    report->add_option("--out", r_out, "output basename");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_out, spec, gen_pe, gen_sigma, gen_span, gen_seed);
        if (solve->parsed()) return cmd_solve(s_matrix, s_layout, s_rhs, s_method, s_tol, s_max_iter);
        if (sweep->parsed()) return cmd_sweep(w_config, w_format, w_out);
        if (spectral->parsed()) return cmd_spectral(p_matrix, p_layout, p_method, p_mode, p_out);
        if (report->parsed()) return cmd_report(r_in, r_format, r_out);
    } catch (const mprec::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const mprec::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 2;
}
