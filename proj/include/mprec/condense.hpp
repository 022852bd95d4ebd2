#pragma once

#include <Eigen/LU>
#include <random>
#include <string>
#include <vector>

#include "mprec/block_matrix.hpp"

namespace mprec {

/// Phase states encountered along a hot-gas displacement front.
enum class PhaseState : char { G, OG, OWG };

std::string to_string(PhaseState s);
PhaseState phase_state_from_string(const std::string& s);

/// G if only gas, OG for oil+gas, OWG for all three phases. Gas must always
/// be present and water never appears without oil.
PhaseState classify_cell(bool has_oil, bool has_water, bool has_gas);

/// Scalar unknown label within one cell.
struct UnknownLabel {
    enum class Kind : char { Pressure, Temperature, GasSat, OilSat, VaporFrac, OilFrac, Solid };
    Kind kind;
    int index = 0;  // component index for mole fractions, species index for solids

    bool operator==(const UnknownLabel&) const = default;
};
std::string to_string(const UnknownLabel& l);

/// Secondary equation labels, aligned one-to-one with the secondary unknowns.
struct EquationLabel {
    enum class Kind : char { Fugacity, GasPhaseConstraint, OilPhaseConstraint };
    Kind kind;
    int index = 0;  // component index for fugacity rows

    bool operator==(const EquationLabel&) const = default;
};
std::string to_string(const EquationLabel& l);

/// Ordered primary/secondary unknown lists for one cell, with the
/// equation-to-unknown alignment of the secondary system and the permutation
/// from list order to the canonical (s group..., P, T) storage order.
struct VariablePartition {
    PhaseState state = PhaseState::G;
    int n_c = 0;
    int n_s = 0;
    std::vector<UnknownLabel> primary;    // list order: [flow primary..., solids, T]
    std::vector<UnknownLabel> secondary;
    std::vector<EquationLabel> secondary_equations;  // aligned with `secondary`
    std::vector<int> canonical_perm;  // canonical position -> index into `primary`

    int n_primary() const { return static_cast<int>(primary.size()); }
    int n_secondary() const { return static_cast<int>(secondary.size()); }
};

/// Primary/secondary ordering for a phase state (n_c >= 3 mobile components,
/// n_s >= 0 solid species).
VariablePartition ordering_for(PhaseState state, int n_c, int n_s);

/// Full Jacobian split into primary/secondary blocks. Secondary unknowns
/// couple only within their own cell, so J21/J22 are stored per cell; J12 may
/// carry inter-cell blocks (flux dependence on neighbor mole fractions).
struct GlobalJacobian {
    BlockMatrix j11;                      // primary block, canonical layout
    std::vector<BlockEntry> j12;          // primary rows x secondary cols
    std::vector<Eigen::MatrixXd> j21;     // per cell
    std::vector<Eigen::MatrixXd> j22;     // per cell
    Vector r1;
    std::vector<Eigen::VectorXd> r2;      // per cell
    std::vector<VariablePartition> partitions;

    int n_cells() const { return j11.n_cells(); }
    int n_secondary_total() const;

    /// Dense full system over (all primary, then all secondary) unknowns,
    /// used as the independent oracle in tests.
    void to_dense_full(Eigen::MatrixXd& j, Vector& minus_r) const;
};

/// Per-cell diagnostic of the aligned secondary blocks.
struct SecondaryBlockReport {
    int cell = 0;
    bool structural_zero_diag = false;
    bool invertible = true;
    bool pivoted = false;       // partial pivoting had to permute rows
    double condition_estimate = 0.0;
};
std::vector<SecondaryBlockReport> verify_secondary_blocks(const GlobalJacobian& j);

/// Reduced primary system A d1 = b with the per-cell factors retained for
/// back-substitution of the secondary unknowns.
struct ReducedSystem {
    BlockMatrix a;
    Vector b;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> j22_lu;
    std::vector<Eigen::MatrixXd> j21;
    std::vector<Eigen::VectorXd> r2;
};

/// A = J11 - J12 J22^-1 J21, b = -r1 + J12 J22^-1 r2.
ReducedSystem condense(const GlobalJacobian& j);

/// d2 = J22^-1 (-r2 - J21 d1), concatenated per cell.
Vector back_substitute(const ReducedSystem& r, const Vector& d1);

/// Two single-perforation wells coupled to the primary unknowns of their
/// perforated cells through one well unknown each.
struct WellPair {
    int cell[2] = {0, 0};
    Eigen::VectorXd j_rw[2];     // reservoir-equation column per well
    Eigen::RowVectorXd j_wr[2];  // well-equation row per well
    Eigen::Matrix2d j_ww = Eigen::Matrix2d::Zero();
    Eigen::Vector2d r_w = Eigen::Vector2d::Zero();
};

/// Exact Schur elimination of the two well unknowns; the reservoir sparsity
/// pattern is preserved when the wells are uncoupled from each other.
GlobalJacobian eliminate_wells(GlobalJacobian j, const WellPair& wells);

/// Synthetic per-cell secondary blocks following the structural dependency
/// patterns of the three phase states: fugacity rows touch their aligned mole
/// fraction and its phase counterpart, phase-constraint rows touch every mole
/// fraction of their phase. Magnitudes are uniform on [0.5, 2] with the
/// diagonal made dominant.
struct CellSecondaryBlocks {
    Eigen::MatrixXd j22;      // n_sec x n_sec
    Eigen::MatrixXd j21;      // n_sec x n_prim (canonical column order)
    Eigen::MatrixXd j12_own;  // n_prim x n_sec
};
CellSecondaryBlocks make_cell_secondary_blocks(const VariablePartition& vp, std::mt19937_64& rng);

/// Whole synthetic GlobalJacobian on a 1D chain of cells with the given
/// states; used by oracle tests and by the problem generator.
GlobalJacobian make_synthetic_global(const std::vector<PhaseState>& states, int n_c, int n_s,
                                     std::uint64_t seed, bool inter_cell_coupling = true);

/// On-disk exchange format: `<basename>.mtx` holds the full system in Matrix
/// Market form with all primary unknowns first (canonical cell-major order)
/// followed by the per-cell secondary unknowns, `<basename>.rhs` the stacked
/// residual, and `<basename>.states` a header `n_cells n_c n_s` followed by
/// one `<cell_id> <G|OG|OWG>` line per cell.
void write_global_jacobian(const GlobalJacobian& j, const std::string& basename);
GlobalJacobian read_global_jacobian(const std::string& basename);

}  // namespace mprec
