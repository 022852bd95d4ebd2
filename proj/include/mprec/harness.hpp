#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mprec/stages.hpp"
#include "mprec/synth.hpp"

namespace mprec {

/// One sweep entry: a generated problem (or files on disk) plus a method.
struct Scenario {
    std::string name;
    ProblemSpec spec;
    double pe = 0.0;             // target Peclet; 0 keeps spec.kappa
    double perm_sigma = 0.0;     // > 0 switches on a lognormal permeability field
    double perm_span_decades = 0.0;
    std::string basename;        // non-empty: load <basename>.{mtx,layout,rhs[,states]}
    std::string method = "ilu0";
    double tol = 1e-8;
    int max_iter = 500;
};

struct ExperimentConfig {
    std::vector<Scenario> scenarios;
    std::string output_dir = ".";
    std::uint64_t seed = 1;
};

/// INI-style config: a `[sweep]` section (seed, output) and one `[scenario]`
/// section per entry. See the repository README for the key list.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_stream(std::istream& in, const std::string& origin);

struct ReportRow {
    std::string scenario;
    std::string method;
    std::string grid;
    double pe = 0.0;
    int matrix_dim = 0;
    int nnz = 0;
    int iterations = 0;
    bool converged = false;
    double final_true_resid = 0.0;
    double setup_time = 0.0;
    double solve_time = 0.0;
    std::string error;  // error class when the scenario failed to run
};

struct CvRow {
    std::string method;
    std::string grid;
    double cv_percent = 0.0;
};

struct IterationReport {
    std::vector<ReportRow> rows;
    std::vector<CvRow> cv;  // per (method, grid) across the Pe axis
};

/// Population standard deviation / mean, in percent.
double compute_cv(const std::vector<double>& values);
/// Sample (n-1) variant, matching hand calculations on small published tables.
double compute_cv_sample(const std::vector<double>& values);

struct SolvableSystem {
    BlockMatrix a;
    Vector b;
    std::vector<PhaseState> states;
    bool has_states = false;
};

/// Matrix Market + layout + rhs (+ optional phase states). Every cell must
/// carry a pressure and a temperature unknown.
SolvableSystem ingest_external(const std::string& matrix_path, const std::string& layout_path,
                               const std::string& rhs_path, const std::string& states_path = "");

struct SolveOutcome {
    SolveResult result;
    double setup_time_s = 0.0;
    std::string scaling_record;
};

/// Left-scale per method, build the stage preconditioner, run GMRES, verify
/// the true residual against the original system.
SolveOutcome solve_system(const BlockMatrix& a, const Vector& b, const MethodSpec& method,
                          double tol = 1e-8, int max_iter = 500);

IterationReport run_sweep(const ExperimentConfig& config);

/// `<basename>.csv` (rows) + `<basename>_cv.csv`, or `<basename>.txt` for the
/// text table (Pe outer, grid inner grouping).
void emit_report(const IterationReport& report, const std::string& format,
                 const std::string& basename);
IterationReport parse_report_csv(const std::string& basename);

/// Copy with timing columns zeroed, for byte-comparison of sweep outputs.
IterationReport strip_timings(IterationReport report);

}  // namespace mprec
