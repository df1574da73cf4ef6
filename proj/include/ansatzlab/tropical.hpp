#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ansatzlab/convex.hpp"
#include "ansatzlab/measure.hpp"
#include "ansatzlab/rational.hpp"

namespace ansatzlab::tropical {

// ---------------------------------------------------------------------------
// Combinatorial model of the cell complex: sections are indexed 0..m+d, the
// last d indices are distinguished, cells are the size-n index subsets with
// multiplicities. The skeleton image is
//   Delta = {X_0 = ... = X_m = 0 <= X_{m+1}, ..., X_{m+d}}.
// ---------------------------------------------------------------------------

struct Cell {
  std::vector<int> J;        // sorted, size n
  int multiplicity = 1;
  int anchor = -1;           // smallest primed index not in J
  bool contains_delta = false;
};

struct TropicalModel {
  int m = 0, n = 0, d = 0;
  std::vector<Cell> cells;

  int section_count() const { return m + d + 1; }
  bool is_distinguished(int idx) const { return idx > m; }
  long a() const;  // multiplicity-weighted count of Delta-containing cells
};

TropicalModel enumerate_cells(int m, int n, int d,
                              const std::map<std::vector<int>, int>& multiplicities = {});

// (n-d)! / a; the identity a * c = (n-d)! is exact in rational arithmetic.
Rational constant_c(const TropicalModel& model);

// ---------------------------------------------------------------------------
// v and its cell restrictions.
// ---------------------------------------------------------------------------

// v(x) = max_{0<=j<=m} u(x_{m+1} - x_j, ..., x_{m+d} - x_j) on R^{m+d+1}
// (descends modulo the diagonal; the pieces' rows are sum-zero).
convex::PiecewiseConvexMax build_v(std::shared_ptr<const convex::SmoothConvexBase> u_extended, int m,
                                   int d);

// Inner form u(max_j(x_{m+1} - x_j), ...); equals build_v by the diagonal
// monotonicity of the extension.
double eval_v_inner(const convex::SmoothConvexBase& u_extended, int m, int d,
                    const Eigen::VectorXd& x);

struct CellRestriction {
  Cell cell;
  int m = 0, n = 0, d = 0;
  int r = 0;                       // distinguished indices present in J
  std::vector<int> coords;         // J sorted: L-coordinates (X_i)_{i in J}
  std::vector<int> anchor_slots;   // slots of primed coordinates (first n - r)
  std::vector<int> dist_slots;     // slots of distinguished coordinates
  convex::PiecewiseConvexMax f;    // pieces U_0..U_{n-r-1}, U on R^n

  // Embed L-coordinates into homogeneous R^{m+d+1} coordinates (X_i = 0 off J).
  Eigen::VectorXd embed(const Eigen::VectorXd& xL) const;
};

CellRestriction cell_restriction(std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                                 const TropicalModel& model, const Cell& cell);

// ---------------------------------------------------------------------------
// Step 4 classification and verification.
// ---------------------------------------------------------------------------

enum class Step4Case { Case12, Case3, Case4 };

struct ClassifyResult {
  Step4Case tag = Step4Case::Case12;
  std::vector<int> active;
  bool on_delta_closure = false;  // anchor coordinates vanish (Case 3/4 assertion)
};

ClassifyResult step4_classify(const CellRestriction& restriction, const Eigen::VectorXd& p,
                              double act_tol);

struct Step4Config {
  double delta = 0.08;       // anchor slab width [0, delta]
  double delta_fine = 0.04;  // comparison slab for the stabilization probe
  int samples_per_axis = 256;
  double dual_resolution = 0.0;
  std::uint64_t seed = 17;
  double rel_tol = 0.05;          // oracle-based relative tolerance
  double eps_abs_factor = 1e-3;   // non-containing cells: mass <= factor * Leb(R)
  bool force_mollified_path = false;
  int mollify_k = 48;
  double mollify_radius = 0.05;
};

struct CellMassReport {
  Cell cell;
  double mass = 0.0;         // slab mass per branch, fine slab
  double mass_coarse = 0.0;  // coarse slab (stabilization probe)
  double expected = 0.0;
  double error_bound = 0.0;
  bool pass = false;
};

struct Step4Report {
  std::vector<CellMassReport> cells;
  double total = 0.0;
  double expected_total = 0.0;
  Rational c{0, 1};
  long a = 0;
  bool all_cells_pass = false;
  bool total_pass = false;
  double total_rel_tol = 0.05;
};

Step4Report verify_step4(const TropicalModel& model,
                         std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                         const measure::OrthotopeRegion& R, const Step4Config& cfg = {});

// Summed identity plus the exact count consistency a * c = (n-d)!.
struct GlobalMassReport {
  double total = 0.0;
  double expected_total = 0.0;
  bool total_pass = false;
  bool count_identity_exact = false;
  Rational c{0, 1};
  long a = 0;
};

GlobalMassReport verify_global_mass(const TropicalModel& model,
                                    std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                                    const measure::OrthotopeRegion& R, const Step4Config& cfg = {});

// ---------------------------------------------------------------------------
// Step 5: mollification no-leak and the reduced-dependence argument.
// ---------------------------------------------------------------------------

struct LeakConfig {
  double box_halfwidth = 0.6;    // bounded window around the corner of sigma
  Eigen::VectorXd dist_lo, dist_hi;  // distinguished-coordinate window on sigma
  double kernel_radius = 0.05;
  int kernel_quadrature = 10;
  double quad_tol = 2e-6;
  int max_depth = 11;
  bool centered_comparison = true;
};

struct LeakRow {
  int k = 0;
  double leak_mass = 0.0;      // off-sigma mass within the window
  double v_region_mass = 0.0;  // part with some distinguished coordinate <= 0
  double sigma_box_mass = 0.0; // mass over the sigma-side box (Step 4 comparison)
  double centered_leak = 0.0;  // same-k leak for a centered (non-shifted) kernel
};

std::vector<LeakRow> mollification_leak(const CellRestriction& restriction,
                                        const std::vector<int>& k_list, const LeakConfig& cfg);

struct ReducedDependenceReport {
  int gradient_span_rank = 0;   // expected n - 1
  bool identity_ok = false;     // w(x - y) = v|_L(x - y) on sampled U x supp
  double worst_identity_gap = 0.0;
  double mollified_mass = 0.0;  // analytic MA mass of mollified w over a box in U
  bool pass = false;
};

ReducedDependenceReport reduced_dependence_check(const CellRestriction& restriction,
                                                 const measure::OrthotopeRegion& u_box,
                                                 std::uint64_t seed = 5, int k = 16,
                                                 double kernel_radius = 0.05);

// ---------------------------------------------------------------------------
// Cellular decomposition checks on the combinatorial model.
// ---------------------------------------------------------------------------

struct DecompositionReport {
  bool pass = false;
  std::vector<std::string> failures;
  long pairs_checked = 0;
};

DecompositionReport check_decomposition(const TropicalModel& model, std::uint64_t seed = 3,
                                        long max_pairs = 4000);

}  // namespace ansatzlab::tropical
