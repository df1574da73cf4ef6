#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ansatzlab/convex.hpp"
#include "ansatzlab/geometry.hpp"
#include "ansatzlab/rational.hpp"

namespace ansatzlab::measure {

struct ScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OrthotopeRegion {
  Eigen::VectorXd lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  void validate() const;
  static OrthotopeRegion box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
};

struct MeasureEstimate {
  OrthotopeRegion region;
  double mass = 0.0;
  std::string method;  // analytic-integral | gradient-image-rasterization | exact-polytope
  double error_bound = 0.0;
  long samples = 0;
  double resolution = 0.0;
};

// ---------------------------------------------------------------------------
// Analytic mass: integral of det D^2 f over E by composite panel quadrature,
// error bound from a two-resolution comparison.
// ---------------------------------------------------------------------------

MeasureEstimate ma_measure_analytic(const convex::SmoothConvexBase& f, const OrthotopeRegion& E,
                                    int panels_per_axis = 24, int gauss_per_panel = 3);

// ---------------------------------------------------------------------------
// Gradient-image rasterization oracle for piecewise max functions, n <= 3.
// Stratified jittered primal samples; subgradient polytopes rasterized onto a
// dual grid. Full-dimensional polytopes rasterize as bodies, point gradients
// mark their cell, intermediate-dimensional polytopes are skipped unless the
// diagnostics flag requests them.
// ---------------------------------------------------------------------------

struct OracleConfig {
  int samples_per_axis = 0;      // 0: dimension-dependent default
  double dual_resolution = 0.0;  // grid cell size h; 0: auto from the image extent
  std::uint64_t seed = 1;
  bool rasterize_degenerate = false;
  double act_tol_factor = 1.5;   // activity tolerance per unit sample spacing
  double act_tol_abs = 1e-12;
  int auto_cells_per_axis = 0;   // 0: dimension-dependent default
};

MeasureEstimate ma_measure_oracle(const convex::PiecewiseConvexMax& f, const OrthotopeRegion& E,
                                  const OracleConfig& cfg = {});

// ---------------------------------------------------------------------------
// Softmax mass-trapping demo: v_k = k^{-1} log(e^{kx} + e^{ky} + 1).
// Restricted masses over E converge to 1/6 for E = [-1,0]^2; the total mass is
// 1/2 for every k. Masses are computed as gradient-image areas via a boundary
// line integral (overflow-safe shifted log-sum-exp throughout).
// ---------------------------------------------------------------------------

struct SoftmaxRow {
  int k = 0;
  double restricted_mass = 0.0;
  double restricted_error = 0.0;
  double total_mass = 0.0;
  double total_error = 0.0;
};

struct SoftmaxTrapResult {
  std::vector<SoftmaxRow> rows;
  bool trend_increasing = false;  // reported, not asserted
};

SoftmaxTrapResult softmax_trap_demo(const std::vector<int>& k_list, const OrthotopeRegion& E);

// Pointwise helpers (exposed for tests).
void softmax_gradient(int k, double x, double y, double& p, double& q);
double softmax_value(int k, double x, double y);

// ---------------------------------------------------------------------------
// Polytope volumes.
// ---------------------------------------------------------------------------

geometry::PolytopeVolume polytope_volume(const std::vector<Eigen::VectorXd>& vertices);

struct HullVolumeRow {
  Rational t;
  Rational exact_volume;   // t / n!
  double numeric_volume;   // floating-point hull volume of the actual vertices
};

struct HullVolumeReport {
  int n = 0;
  std::vector<HullVolumeRow> rows;
  bool linearity_exact = false;  // volume(2t)/volume(t) == 2 in rational arithmetic
};

// Volume of conv({0} union {t^{1/n} e_i}); the determinant of the orthogonal
// simplex telescopes to t exactly, so the exact column is rational.
HullVolumeReport hull_volume_linear_in_t(int n, const std::vector<Rational>& t_list);

}  // namespace ansatzlab::measure
