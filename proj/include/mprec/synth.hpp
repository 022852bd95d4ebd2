#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mprec/block_matrix.hpp"
#include "mprec/condense.hpp"

namespace mprec {

/// Coupled pressure-temperature-transport test problem on an nx x ny grid
/// with quarter-five-spot wells. Units: m, day, bar, K, kJ, cP, Darcy.
struct ProblemSpec {
    int nx = 10;
    int ny = 10;
    double length = 0.35;        // domain edge [m]
    double porosity = 0.36;
    double perm = 10.0;          // homogeneous permeability [D]
    std::vector<double> perm_field;  // optional per-cell field [D], row-major
    double kappa = 50.0;         // thermal conductivity [kJ/m/day/K]
    double q_inj = 4.32;         // injection rate [m^3/day]
    double t_inj = 873.15;       // [K]
    double t_init = 323.15;
    double p_init = 7.8;         // [bar]
    double s_oil = 0.4791;
    double s_wat = 0.2048;
    double rho = 3.1;            // carrier density [kg/m^3]
    double c_p = 1.42;           // [kJ/kg/K]
    double mu_ref = 1.0e4;       // viscosity at t_init [cP]
    double mu_hot = 10.0;        // viscosity at t_inj [cP]
    double dt_days = 10.0 / 86400.0;
    double compressibility = 0.1;     // pressure accumulation factor
    double enthalpy_coupling = 0.002;  // scale on energy-flux P derivatives
    double sat_coupling = 0.5;        // scale on mobility saturation derivatives
    double time_fraction = 0.5;       // front position along the flow diagonal
    int n_c = 12;                // mobile components of the equivalent layout
    int n_solid = 1;
    bool with_secondary = false;     // also emit the uncondensed system
    bool reverse_flow = false;       // negate base fluxes (pattern tests)

    int n_cells() const { return nx * ny; }
    /// Transported unknowns per cell beside P and T.
    int n_s_unknowns() const { return n_c + n_solid - 1; }
    /// Viscosity decay rate so mu spans mu_ref -> mu_hot across the front.
    double visc_sens() const;
    double viscosity(double t) const;
};

/// Pe = q rho c_p / (kappa L).
double peclet(const ProblemSpec& spec);
/// Thermal conductivity that realizes the requested Peclet number.
double kappa_for_peclet(const ProblemSpec& spec, double pe);

/// Whitespace-separated positive reals, row-major; fails when the file is
/// short or contains non-positive values.
std::vector<double> load_field(const std::string& path, int nx, int ny);
/// Crop window (offset_x, offset_y) out of a row-major file_nx x file_ny field.
std::vector<double> crop_field(const std::vector<double>& field, int file_nx, int file_ny,
                               int nx, int ny, int offset_x, int offset_y);
/// Lognormal field around `center`; when span_decades > 0 the log-field is
/// rescaled affinely so max/min is exactly 10^span_decades.
std::vector<double> lognormal_field(int nx, int ny, double center, double sigma,
                                    std::uint64_t seed, double span_decades = 0.0);

/// Phase zones and base temperature along the injector-producer diagonal:
/// G nearest the injector, then OG, then OWG; the temperature front is an
/// error-function profile whose width scales with 1/sqrt(Pe).
struct FrontState {
    std::vector<PhaseState> states;
    Vector temperature;         // per cell [K]
    double front_width_cells = 0.0;
};
FrontState front_state(const ProblemSpec& spec, double time_fraction);

/// Upwind advection stencil for given face fluxes (fx: (nx-1) x ny fluxes in
/// +x direction, fy: nx x (ny-1) in +y); row i collects outflow on the
/// diagonal and inflow on the upwind neighbor.
ScalarMatrix upwind_stencil(int nx, int ny, const std::vector<double>& fx,
                            const std::vector<double>& fy);

struct SyntheticJacobian {
    BlockMatrix a;              // reduced system, canonical layout
    Vector b;
    std::vector<PhaseState> states;
    std::optional<GlobalJacobian> full;  // present when with_secondary
    WellPair wells;             // explicit well blocks for the full system
    double pe = 0.0;
    int nx = 0;
    int ny = 0;
    std::string heterogeneity;  // "homogeneous" or "field min/max=<ratio>"
    std::vector<double> face_flux_x;  // base volumetric fluxes [m^3/day]
    std::vector<double> face_flux_y;
};

SyntheticJacobian build_problem(const ProblemSpec& spec, std::uint64_t seed);

/// Problem export: matrix + layout + rhs + phase-state sidecars under a
/// common basename (<base>.mtx/.layout/.rhs/.states).
void write_problem(const SyntheticJacobian& p, const std::string& basename);

}  // namespace mprec
