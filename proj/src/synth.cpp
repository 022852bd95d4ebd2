#include "mprec/synth.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "mprec/amg.hpp"
#include "mprec/gmres.hpp"
#include "mprec/matrix_io.hpp"

namespace mprec {

namespace {

/// u [m/day] = DARCY * k [D] * grad P [bar/m] / mu [cP].
constexpr double kDarcy = 8.527;

}  // namespace

double ProblemSpec::visc_sens() const {
    return std::log(mu_ref / mu_hot) / (t_inj - t_init);
}

double ProblemSpec::viscosity(double t) const {
    return mu_ref * std::exp(-visc_sens() * (t - t_init));
}

double peclet(const ProblemSpec& spec) {
    if (spec.kappa <= 0.0 || spec.length <= 0.0)
        throw ConfigError("peclet needs kappa > 0 and length > 0");
    return spec.q_inj * spec.rho * spec.c_p / (spec.kappa * spec.length);
}

double kappa_for_peclet(const ProblemSpec& spec, double pe) {
    if (pe <= 0.0) throw ConfigError("target Peclet number must be positive");
    return spec.q_inj * spec.rho * spec.c_p / (pe * spec.length);
}

std::vector<double> load_field(const std::string& path, int nx, int ny) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file " + path);
    std::vector<double> field;
    field.reserve(static_cast<std::size_t>(nx) * ny);
    double v;
    while (static_cast<int>(field.size()) < nx * ny && (in >> v)) {
        if (v <= 0.0) throw IoError("non-positive value in field file " + path);
        field.push_back(v);
    }
    if (static_cast<int>(field.size()) < nx * ny)
        throw IoError("field file " + path + " holds fewer than " +
                      std::to_string(nx * ny) + " values");
    return field;
}

std::vector<double> crop_field(const std::vector<double>& field, int file_nx, int file_ny,
                               int nx, int ny, int offset_x, int offset_y) {
    if (offset_x < 0 || offset_y < 0 || offset_x + nx > file_nx || offset_y + ny > file_ny)
        throw IoError("crop window exceeds field dimensions");
    if (static_cast<int>(field.size()) < file_nx * file_ny)
        throw IoError("field shorter than its declared dimensions");
    std::vector<double> out(static_cast<std::size_t>(nx) * ny);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
            out[y * nx + x] = field[(y + offset_y) * file_nx + (x + offset_x)];
    return out;
}

std::vector<double> lognormal_field(int nx, int ny, double center, double sigma,
                                    std::uint64_t seed, double span_decades) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> logs(static_cast<std::size_t>(nx) * ny);
    for (double& l : logs) l = normal(rng);
    if (span_decades > 0.0) {
        double lo = logs[0], hi = logs[0];
        for (double l : logs) {
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        const double target = span_decades * std::log(10.0);
        const double scale = hi > lo ? target / (hi - lo) : 0.0;
        const double mid = 0.5 * (hi + lo);
        for (double& l : logs) l = (l - mid) * scale;
    }
    std::vector<double> out(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) out[i] = center * std::exp(logs[i]);
    return out;
}

FrontState front_state(const ProblemSpec& spec, double time_fraction) {
    if (time_fraction < 0.0 || time_fraction > 1.0)
        throw ConfigError("time_fraction outside [0,1]");
    const double pe = peclet(spec);
    const double width = 0.15 / std::sqrt(std::max(pe, 1e-12));
    const double xi_front = time_fraction;
    const double xi_water = std::min(1.0, 1.25 * time_fraction);
    const int diag_cells = spec.nx + spec.ny - 2;

    FrontState fs;
    fs.states.resize(spec.n_cells());
    fs.temperature = Vector::Zero(spec.n_cells());
    fs.front_width_cells = 2.0 * width * std::max(diag_cells, 1);
    for (int y = 0; y < spec.ny; ++y)
        for (int x = 0; x < spec.nx; ++x) {
            const int c = y * spec.nx + x;
            const double d = diag_cells > 0 ? double(x + y) / diag_cells : 0.0;
            fs.temperature[c] =
                spec.t_init + 0.5 * (spec.t_inj - spec.t_init) * std::erfc((d - xi_front) / width);
            if (d < xi_front)
                fs.states[c] = PhaseState::G;
            else if (d < xi_water)
                fs.states[c] = PhaseState::OG;
            else
                fs.states[c] = PhaseState::OWG;
        }
    return fs;
}

ScalarMatrix upwind_stencil(int nx, int ny, const std::vector<double>& fx,
                            const std::vector<double>& fy) {
    const int n = nx * ny;
    std::vector<Triplet> trip;
    const auto add_face = [&](int i, int j, double f) {
        const int u = f >= 0.0 ? i : j;
        trip.push_back({i, u, f});
        trip.push_back({j, u, -f});
    };
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x + 1 < nx; ++x)
            add_face(y * nx + x, y * nx + x + 1, fx[y * (nx - 1) + x]);
    for (int y = 0; y + 1 < ny; ++y)
        for (int x = 0; x < nx; ++x) add_face(y * nx + x, (y + 1) * nx + x, fy[y * nx + x]);
    return ScalarMatrix::from_triplets(n, n, std::move(trip));
}

namespace {

struct Face {
    int i, j;
    double trans;  // geometric transmissibility, Darcy constant included
};

std::vector<Face> build_faces(const ProblemSpec& spec, const std::vector<double>& perm) {
    const double hx = spec.length / spec.nx;
    const double hy = spec.length / spec.ny;
    std::vector<Face> faces;
    const auto harm = [](double a, double b) { return 2.0 * a * b / (a + b); };
    for (int y = 0; y < spec.ny; ++y)
        for (int x = 0; x + 1 < spec.nx; ++x) {
            const int i = y * spec.nx + x;
            faces.push_back({i, i + 1, kDarcy * harm(perm[i], perm[i + 1]) * hy / hx});
        }
    for (int y = 0; y + 1 < spec.ny; ++y)
        for (int x = 0; x < spec.nx; ++x) {
            const int i = y * spec.nx + x;
            faces.push_back({i, i + spec.nx, kDarcy * harm(perm[i], perm[i + spec.nx]) * hx / hy});
        }
    return faces;
}

Vector solve_base_pressure(const ScalarMatrix& ap, const Vector& rhs) {
    if (ap.rows() <= 4096) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(ap.to_dense());
        return lu.solve(rhs);
    }
    AMGHierarchy amg = AMGHierarchy::setup(ap, AMGParams{});
    GmresOptions opts;
    opts.tol = 1e-13;
    opts.max_iter = 2000;
    const SolveResult res = gmres(LinearOperator::from(ap), rhs,
                                  LinearOperator{ap.rows(), [&](const Vector& v) {
                                                     return amg.apply(v);
                                                 }},
                                  opts);
    if (!res.converged) throw SetupError("base pressure solve did not converge");
    return res.x;
}

}  // namespace

SyntheticJacobian build_problem(const ProblemSpec& spec, std::uint64_t seed) {
    if (spec.nx < 2 || spec.ny < 2) throw ConfigError("grid must be at least 2x2");
    const int n = spec.n_cells();
    std::vector<double> perm = spec.perm_field;
    if (perm.empty())
        perm.assign(n, spec.perm);
    else if (static_cast<int>(perm.size()) != n)
        throw IoError("permeability field size does not match the grid");

    const FrontState front = front_state(spec, spec.time_fraction);
    const double a_mu = spec.visc_sens();
    std::vector<double> lam(n);
    for (int c = 0; c < n; ++c) lam[c] = 1.0 / spec.viscosity(front.temperature[c]);

    const std::vector<Face> faces = build_faces(spec, perm);
    const int inj = 0;
    const int prod = n - 1;
    const double wi_prod = kDarcy * perm[prod];
    const double wi_inj = kDarcy * perm[inj];

    // Base pressure: single-phase TPFA with frozen mobilities, rate injector,
    // pressure-anchored producer.
    std::vector<Triplet> ptrip;
    for (const Face& f : faces) {
        const double tl = f.trans * 0.5 * (lam[f.i] + lam[f.j]);
        ptrip.push_back({f.i, f.i, tl});
        ptrip.push_back({f.i, f.j, -tl});
        ptrip.push_back({f.j, f.j, tl});
        ptrip.push_back({f.j, f.i, -tl});
    }
    ptrip.push_back({prod, prod, wi_prod * lam[prod]});
    Vector prhs = Vector::Zero(n);
    prhs[inj] = spec.q_inj;
    prhs[prod] = wi_prod * lam[prod] * spec.p_init;
    const Vector p_base =
        solve_base_pressure(ScalarMatrix::from_triplets(n, n, std::move(ptrip)), prhs);

    SyntheticJacobian out;
    out.nx = spec.nx;
    out.ny = spec.ny;
    out.pe = peclet(spec);
    out.states = front.states;
    if (spec.perm_field.empty()) {
        out.heterogeneity = "homogeneous";
    } else {
        double lo = perm[0], hi = perm[0];
        for (double k : perm) {
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
        out.heterogeneity = "field max/min=" + std::to_string(hi / lo);
    }

    const int ns = spec.n_s_unknowns();
    const int m = ns + 2;
    const int ip = ns;
    const int it = ns + 1;
    const FieldLayout layout = FieldLayout::uniform(n, ns, true, true);

    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
    const auto add = [&](int cr, int cc, int r, int c, double v) {
        auto pos = blocks.try_emplace(std::make_pair(cr, cc), Eigen::MatrixXd::Zero(m, m)).first;
        pos->second(r, c) += v;
    };

    const double hx = spec.length / spec.nx;
    const double hy = spec.length / spec.ny;
    const double vol = hx * hy;
    const double acc = spec.porosity * vol / spec.dt_days;
    const double cpr = spec.c_p * spec.rho;
    const double ec = spec.enthalpy_coupling;
    const double flow_sign = spec.reverse_flow ? -1.0 : 1.0;

    out.face_flux_x.assign(static_cast<std::size_t>(spec.nx - 1) * spec.ny, 0.0);
    out.face_flux_y.assign(static_cast<std::size_t>(spec.nx) * (spec.ny - 1), 0.0);
    std::size_t fxi = 0;
    const std::size_t n_xfaces = out.face_flux_x.size();

    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        const int i = f.i, j = f.j;
        const double lam_f = 0.5 * (lam[i] + lam[j]);
        const double trlam = f.trans * lam_f;
        const double dp = p_base[i] - p_base[j];
        const double flux = flow_sign * trlam * dp;
        if (fi < n_xfaces)
            out.face_flux_x[fxi++] = flux;
        else
            out.face_flux_y[fi - n_xfaces] = flux;
        const int up = flux >= 0.0 ? i : j;

        // flux derivative wrt the two cell temperatures (mobility coupling)
        const double dfti = flow_sign * f.trans * 0.5 * lam[i] * a_mu * dp;
        const double dftj = flow_sign * f.trans * 0.5 * lam[j] * a_mu * dp;
        const double dfs = flux * spec.sat_coupling;

        // pressure rows
        add(i, i, ip, ip, trlam);
        add(i, j, ip, ip, -trlam);
        add(j, j, ip, ip, trlam);
        add(j, i, ip, ip, -trlam);
        add(i, i, ip, it, dfti);
        add(i, j, ip, it, dftj);
        add(j, i, ip, it, -dfti);
        add(j, j, ip, it, -dftj);
        add(i, up, ip, 0, dfs);
        add(j, up, ip, 0, -dfs);

        // temperature rows: upwind enthalpy advection + conduction
        const double cf = spec.kappa * (fi < n_xfaces ? hy / hx : hx / hy);
        const double ca = cpr * flux;
        const double theta = front.temperature[up] - spec.t_init;
        add(i, up, it, it, ca);
        add(j, up, it, it, -ca);
        add(i, i, it, it, cf);
        add(i, j, it, it, -cf);
        add(j, j, it, it, cf);
        add(j, i, it, it, -cf);
        const double dep = ec * cpr * theta;
        add(i, i, it, ip, dep * flow_sign * trlam);
        add(i, j, it, ip, -dep * flow_sign * trlam);
        add(j, i, it, ip, -dep * flow_sign * trlam);
        add(j, j, it, ip, dep * flow_sign * trlam);
        add(i, up, it, 0, 0.1 * ca);
        add(j, up, it, 0, -0.1 * ca);

        // transported unknowns: upwind advection, flux-derivative couplings
        for (int k = 0; k < ns; ++k) {
            const double zk = 0.5 / (1.0 + k);
            add(i, up, k, k, flux);
            add(j, up, k, k, -flux);
            add(i, i, k, ip, zk * flow_sign * trlam);
            add(i, j, k, ip, -zk * flow_sign * trlam);
            add(j, i, k, ip, -zk * flow_sign * trlam);
            add(j, j, k, ip, zk * flow_sign * trlam);
            add(i, i, k, it, zk * dfti);
            add(i, j, k, it, zk * dftj);
            add(j, i, k, it, -zk * dfti);
            add(j, j, k, it, -zk * dftj);
        }
    }

    // accumulation
    for (int c = 0; c < n; ++c) {
        for (int k = 0; k < ns; ++k) add(c, c, k, k, acc);
        add(c, c, ip, ip, acc * spec.compressibility);
        add(c, c, it, it, acc * spec.rho * spec.c_p);
    }

    // producer well: outflow at base conditions
    const double wl = wi_prod * lam[prod];
    const double f_prod = std::max(wl * (p_base[prod] - spec.p_init), 0.0);
    const double theta_p = front.temperature[prod] - spec.t_init;
    add(prod, prod, ip, ip, wl);
    add(prod, prod, it, it, cpr * f_prod);
    add(prod, prod, it, ip, ec * cpr * theta_p * wl);
    for (int k = 0; k < ns; ++k) {
        add(prod, prod, k, k, f_prod);
        add(prod, prod, k, ip, 0.5 / (1.0 + k) * wl);
    }

    std::vector<BlockEntry> entries;
    entries.reserve(blocks.size());
    for (auto& [key, blk] : blocks) entries.push_back({key.first, key.second, std::move(blk)});
    out.a = BlockMatrix::assemble(entries, layout);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    out.b = Vector::NullaryExpr(layout.n_unknowns(), [&](Eigen::Index) { return u(rng); });

    // explicit well blocks for the uncondensed path
    const double li = 1.0 / spec.viscosity(spec.t_inj);
    out.wells.cell[0] = inj;
    out.wells.cell[1] = prod;
    out.wells.j_rw[0] = Eigen::VectorXd::Zero(m);
    out.wells.j_rw[0][ip] = -wi_inj * li;
    out.wells.j_wr[0] = Eigen::RowVectorXd::Zero(m);
    out.wells.j_wr[0][ip] = -wi_inj * li;
    out.wells.j_ww(0, 0) = wi_inj * li;
    out.wells.j_rw[1] = Eigen::VectorXd::Zero(m);
    out.wells.j_rw[1][ip] = -wl;
    out.wells.j_wr[1] = Eigen::RowVectorXd::Zero(m);
    out.wells.j_ww(1, 1) = 1.0;

    if (spec.with_secondary) {
        GlobalJacobian gj;
        gj.j11 = out.a;
        gj.r1 = -out.b;
        gj.partitions.reserve(n);
        for (PhaseState s : front.states)
            gj.partitions.push_back(ordering_for(s, spec.n_c, spec.n_solid));
        gj.j21.resize(n);
        gj.j22.resize(n);
        gj.r2.resize(n);
        for (int c = 0; c < n; ++c) {
            CellSecondaryBlocks sb = make_cell_secondary_blocks(gj.partitions[c], rng);
            gj.j21[c] = std::move(sb.j21);
            gj.j22[c] = std::move(sb.j22);
            gj.j12.push_back({c, c, std::move(sb.j12_own)});
            gj.r2[c] = Eigen::VectorXd::NullaryExpr(gj.partitions[c].n_secondary(),
                                                    [&](Eigen::Index) { return u(rng); });
        }
        out.full = std::move(gj);
    }
    return out;
}

void write_problem(const SyntheticJacobian& p, const std::string& basename) {
    write_block_matrix(p.a, basename + ".mtx", basename + ".layout");
    write_vector(p.b, basename + ".rhs");
    std::ofstream out(basename + ".states");
    if (!out) throw IoError("cannot open " + basename + ".states for writing");
    out << p.states.size() << '\n';
    for (std::size_t c = 0; c < p.states.size(); ++c)
        out << c << ' ' << to_string(p.states[c]) << '\n';
}

}  // namespace mprec
