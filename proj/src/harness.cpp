#include "mprec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mprec/matrix_io.hpp"

namespace mprec {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + v + "' for key " + key);
    }
}

int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    if (d != std::floor(d)) throw ConfigError("key " + key + " needs an integer");
    return static_cast<int>(d);
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

ExperimentConfig parse_config_stream(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of(";#");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section at " + where);
            section = trim(line.substr(1, line.size() - 2));
            if (section == "scenario")
                cfg.scenarios.emplace_back();
            else if (section != "sweep")
                throw ConfigError("unknown section [" + section + "] at " + where);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at " + where);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section == "sweep") {
            if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(to_double(val, key));
            else if (key == "output")
                cfg.output_dir = val;
            else
                throw ConfigError("unknown sweep key '" + key + "' at " + where);
        } else if (section == "scenario") {
            Scenario& sc = cfg.scenarios.back();
            if (key == "name")
                sc.name = val;
            else if (key == "nx")
                sc.spec.nx = to_int(val, key);
            else if (key == "ny")
                sc.spec.ny = to_int(val, key);
            else if (key == "pe")
                sc.pe = to_double(val, key);
            else if (key == "kappa")
                sc.spec.kappa = to_double(val, key);
            else if (key == "time_fraction")
                sc.spec.time_fraction = to_double(val, key);
            else if (key == "n_c")
                sc.spec.n_c = to_int(val, key);
            else if (key == "n_solid")
                sc.spec.n_solid = to_int(val, key);
            else if (key == "perm_sigma")
                sc.perm_sigma = to_double(val, key);
            else if (key == "perm_span_decades")
                sc.perm_span_decades = to_double(val, key);
            else if (key == "basename")
                sc.basename = val;
            else if (key == "method")
                sc.method = val;
            else if (key == "tol")
                sc.tol = to_double(val, key);
            else if (key == "max_iter")
                sc.max_iter = to_int(val, key);
            else
                throw ConfigError("unknown scenario key '" + key + "' at " + where);
        } else {
            throw ConfigError("key outside any section at " + where);
        }
    }
    if (cfg.scenarios.empty()) throw ConfigError("config " + origin + " defines no scenarios");
    for (const Scenario& sc : cfg.scenarios) {
        parse_method(sc.method);
        if (!(sc.tol > 0.0 && sc.tol < 1.0))
            throw ConfigError("scenario tol must lie in (0,1)");
        if (sc.max_iter <= 0) throw ConfigError("scenario max_iter must be positive");
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config_stream(in, path);
}

double compute_cv(const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("CV of an empty list");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) throw ConfigError("CV undefined for zero mean");
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size())) / mean * 100.0;
}

double compute_cv_sample(const std::vector<double>& values) {
    if (values.size() < 2) throw ConfigError("sample CV needs at least two values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) throw ConfigError("CV undefined for zero mean");
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1)) / mean * 100.0;
}

SolvableSystem ingest_external(const std::string& matrix_path, const std::string& layout_path,
                               const std::string& rhs_path, const std::string& states_path) {
    SolvableSystem sys;
    sys.a = read_block_matrix(matrix_path, layout_path);
    sys.b = read_vector(rhs_path);
    if (sys.b.size() != sys.a.dim())
        throw IoError("rhs dimension " + std::to_string(sys.b.size()) +
                      " does not match matrix dimension " + std::to_string(sys.a.dim()));
    for (int c = 0; c < sys.a.n_cells(); ++c) {
        if (!sys.a.layout().has_p(c))
            throw IoError("cell " + std::to_string(c) + " has no pressure unknown");
        if (!sys.a.layout().has_t(c))
            throw IoError("cell " + std::to_string(c) + " has no temperature unknown");
    }
    if (!states_path.empty()) {
        std::ifstream in(states_path);
        if (!in) throw IoError("cannot open states file " + states_path);
        int n = 0;
        if (!(in >> n)) throw IoError("malformed states header in " + states_path);
        // ignore optional layout metadata after the cell count
        std::string rest;
        std::getline(in, rest);
        if (n != sys.a.n_cells())
            throw IoError("states cell count does not match the layout in " + states_path);
        sys.states.assign(n, PhaseState::G);
        for (int i = 0; i < n; ++i) {
            int cell;
            std::string tag;
            if (!(in >> cell >> tag)) throw IoError("truncated states file " + states_path);
            if (cell < 0 || cell >= n) throw IoError("cell id out of range in " + states_path);
            sys.states[cell] = phase_state_from_string(tag);
        }
        sys.has_states = true;
    }
    return sys;
}

SolveOutcome solve_system(const BlockMatrix& a, const Vector& b, const MethodSpec& method,
                          double tol, int max_iter) {
    SolveOutcome out;
    const double t0 = now_seconds();
    const ScaledSystem scaled = left_scale(a, b, method.method);
    const StagePreconditioner prec = build_preconditioner(scaled, method);
    out.setup_time_s = now_seconds() - t0;
    for (const std::string& s : scaled.scaling_record) {
        if (!out.scaling_record.empty()) out.scaling_record += ", ";
        out.scaling_record += s;
    }

    GmresOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    const LinearOperator orig{a.dim(), [&a](const Vector& v) { return a.apply(v); }};
    // The scaled-system residual can understate the original-system one when
    // the scaling amplifies the right-hand side; tighten and re-solve until
    // the convergence claim holds for the original system.
    for (int attempt = 0; attempt < 3; ++attempt) {
        out.result =
            gmres(LinearOperator::from(prec.a_bar()), scaled.b_bar, prec.as_operator(), opts);
        out.result.final_true_residual = residual_check(orig, b, out.result.x);
        if (!out.result.converged || out.result.final_true_residual <= tol) break;
        opts.tol *= 0.5 * tol / out.result.final_true_residual;
    }
    if (out.result.converged && out.result.final_true_residual > tol)
        out.result.converged = false;
    return out;
}

IterationReport run_sweep(const ExperimentConfig& config) {
    IterationReport report;
    for (std::size_t idx = 0; idx < config.scenarios.size(); ++idx) {
        const Scenario& sc = config.scenarios[idx];
        ReportRow row;
        row.scenario = sc.name.empty() ? "scenario" + std::to_string(idx) : sc.name;
        row.method = sc.method;
        try {
            const MethodSpec method = parse_method(sc.method);
            BlockMatrix a;
            Vector b;
            if (!sc.basename.empty()) {
                SolvableSystem sys =
                    ingest_external(sc.basename + ".mtx", sc.basename + ".layout",
                                    sc.basename + ".rhs");
                a = std::move(sys.a);
                b = std::move(sys.b);
                row.grid = "file";
                row.pe = sc.pe;
            } else {
                ProblemSpec spec = sc.spec;
                if (sc.pe > 0.0) spec.kappa = kappa_for_peclet(spec, sc.pe);
                if (sc.perm_sigma > 0.0)
                    spec.perm_field =
                        lognormal_field(spec.nx, spec.ny, spec.perm, sc.perm_sigma,
                                        config.seed + idx, sc.perm_span_decades);
                const SyntheticJacobian prob = build_problem(spec, config.seed + idx);
                a = std::move(prob.a);
                b = std::move(prob.b);
                row.grid = std::to_string(spec.nx) + "x" + std::to_string(spec.ny);
                row.pe = prob.pe;
            }
            row.matrix_dim = a.dim();
            row.nnz = a.to_scalar().nnz();
            const SolveOutcome outcome = solve_system(a, b, method, sc.tol, sc.max_iter);
            row.iterations = outcome.result.iterations;
            row.converged = outcome.result.converged;
            row.final_true_resid = outcome.result.final_true_residual;
            row.setup_time = outcome.setup_time_s;
            row.solve_time = outcome.result.wall_time_s;
        } catch (const Error& e) {
            row.error = e.what();
        } catch (const std::exception& e) {
            row.error = std::string("unexpected: ") + e.what();
        }
        report.rows.push_back(std::move(row));
    }

    // CV per (method, grid) across the Pe axis, in first-appearance order
    std::vector<std::pair<std::string, std::string>> groups;
    for (const ReportRow& r : report.rows) {
        if (!r.error.empty()) continue;
        const auto key = std::make_pair(r.method, r.grid);
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    for (const auto& [method, grid] : groups) {
        std::vector<double> iters;
        for (const ReportRow& r : report.rows)
            if (r.error.empty() && r.method == method && r.grid == grid)
                iters.push_back(static_cast<double>(r.iterations));
        if (iters.size() < 2) continue;
        report.cv.push_back({method, grid, compute_cv(iters)});
    }
    return report;
}

namespace {

constexpr const char* kRowHeader =
    "scenario,method,grid,pe,matrix_dim,nnz,iterations,converged,final_true_resid,"
    "setup_time,solve_time,error";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void emit_report(const IterationReport& report, const std::string& format,
                 const std::string& basename) {
    if (format == "csv") {
        std::ofstream rows(basename + ".csv");
        if (!rows) throw IoError("cannot write " + basename + ".csv");
        rows << kRowHeader << '\n';
        for (const ReportRow& r : report.rows)
            rows << r.scenario << ',' << r.method << ',' << r.grid << ',' << fmt(r.pe) << ','
                 << r.matrix_dim << ',' << r.nnz << ',' << r.iterations << ','
                 << (r.converged ? 1 : 0) << ',' << fmt(r.final_true_resid) << ','
                 << fmt(r.setup_time) << ',' << fmt(r.solve_time) << ',' << r.error << '\n';
        std::ofstream cv(basename + "_cv.csv");
        if (!cv) throw IoError("cannot write " + basename + "_cv.csv");
        cv << "method,grid,cv_percent\n";
        for (const CvRow& r : report.cv)
            cv << r.method << ',' << r.grid << ',' << fmt(r.cv_percent) << '\n';
        return;
    }
    if (format != "text-table") throw ConfigError("unknown report format " + format);

    std::ofstream out(basename + ".txt");
    if (!out) throw IoError("cannot write " + basename + ".txt");
    std::vector<double> pes;
    for (const ReportRow& r : report.rows)
        if (std::find(pes.begin(), pes.end(), r.pe) == pes.end()) pes.push_back(r.pe);
    std::sort(pes.begin(), pes.end(), std::greater<>());
    char buf[256];
    for (double pe : pes) {
        std::snprintf(buf, sizeof(buf), "Pe = %g\n", pe);
        out << buf;
        out << "  grid        method        dim      nnz    iters  conv  true_resid\n";
        std::vector<const ReportRow*> group;
        for (const ReportRow& r : report.rows)
            if (r.pe == pe) group.push_back(&r);
        std::stable_sort(group.begin(), group.end(),
                         [](const ReportRow* a, const ReportRow* b) { return a->grid < b->grid; });
        for (const ReportRow* r : group) {
            if (!r->error.empty()) {
                std::snprintf(buf, sizeof(buf), "  %-10s  %-12s  failed: %s\n", r->grid.c_str(),
                              r->method.c_str(), r->error.c_str());
            } else {
                std::snprintf(buf, sizeof(buf), "  %-10s  %-12s  %7d  %7d  %5d  %4s  %10.3e\n",
                              r->grid.c_str(), r->method.c_str(), r->matrix_dim, r->nnz,
                              r->iterations, r->converged ? "yes" : "no", r->final_true_resid);
            }
            out << buf;
        }
        out << '\n';
    }
    if (!report.cv.empty()) {
        out << "CV across Pe [%]\n";
        for (const CvRow& r : report.cv) {
            std::snprintf(buf, sizeof(buf), "  %-12s  %-10s  %6.2f\n", r.method.c_str(),
                          r.grid.c_str(), r.cv_percent);
            out << buf;
        }
    }
}

IterationReport parse_report_csv(const std::string& basename) {
    IterationReport report;
    std::ifstream rows(basename + ".csv");
    if (!rows) throw IoError("cannot open " + basename + ".csv");
    std::string line;
    if (!std::getline(rows, line) || line != kRowHeader)
        throw IoError("unexpected CSV header in " + basename + ".csv");
    while (std::getline(rows, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != 12) throw IoError("malformed CSV row in " + basename + ".csv");
        ReportRow r;
        r.scenario = f[0];
        r.method = f[1];
        r.grid = f[2];
        r.pe = to_double(f[3], "pe");
        r.matrix_dim = to_int(f[4], "matrix_dim");
        r.nnz = to_int(f[5], "nnz");
        r.iterations = to_int(f[6], "iterations");
        r.converged = to_int(f[7], "converged") != 0;
        r.final_true_resid = to_double(f[8], "final_true_resid");
        r.setup_time = to_double(f[9], "setup_time");
        r.solve_time = to_double(f[10], "solve_time");
        r.error = f[11];
        report.rows.push_back(std::move(r));
    }
    std::ifstream cv(basename + "_cv.csv");
    if (cv) {
        if (!std::getline(cv, line) || line != "method,grid,cv_percent")
            throw IoError("unexpected CV header in " + basename + "_cv.csv");
        while (std::getline(cv, line)) {
            if (trim(line).empty()) continue;
            const std::vector<std::string> f = split_csv(line);
            if (f.size() != 3) throw IoError("malformed CV row in " + basename + "_cv.csv");
            report.cv.push_back({f[0], f[1], to_double(f[2], "cv_percent")});
        }
    }
    return report;
}

IterationReport strip_timings(IterationReport report) {
    for (ReportRow& r : report.rows) {
        r.setup_time = 0.0;
        r.solve_time = 0.0;
    }
    return report;
}

}  // namespace mprec
