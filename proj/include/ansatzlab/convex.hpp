#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ansatzlab/geometry.hpp"
#include "ansatzlab/numerics.hpp"
#include "ansatzlab/rational.hpp"

namespace ansatzlab::convex {

// ---------------------------------------------------------------------------
// SmoothConvexBase: a convex function with evaluation, gradient and Hessian
// access. Gradient/Hessian fall back to centered finite differences with one
// Richardson level when no analytic routine is supplied.
// ---------------------------------------------------------------------------

class SmoothConvexBase {
 public:
  using EvalFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using HessFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  SmoothConvexBase() = default;
  SmoothConvexBase(int dim, EvalFn eval, GradFn grad = {}, HessFn hess = {},
                   std::optional<Rational> homogeneity = {});

  int dim() const { return dim_; }
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
  bool has_analytic_hessian() const { return static_cast<bool>(hess_); }
  const std::optional<Rational>& homogeneity_degree() const { return homogeneity_; }

 private:
  int dim_ = 0;
  EvalFn eval_;
  GradFn grad_;
  HessFn hess_;
  std::optional<Rational> homogeneity_;
};

// ---------------------------------------------------------------------------
// PiecewiseConvexMax: max over pieces of base(A x + b).
// ---------------------------------------------------------------------------

struct AffinePiece {
  Eigen::MatrixXd map;     // d x M
  Eigen::VectorXd offset;  // d
  std::shared_ptr<const SmoothConvexBase> base;
  std::string label;
};

struct SubgradientPolytope {
  Eigen::VectorXd point;
  std::vector<Eigen::VectorXd> vertices;  // gradients of active pieces
  std::vector<int> active;                // piece indices, parallel to vertices
  int affine_hull_dim = 0;
  double volume_in_hull = 0.0;
  // Full-dimensional volume convention: zero when the hull is deficient.
  double volume(int requested_dim) const {
    return affine_hull_dim < requested_dim ? 0.0 : volume_in_hull;
  }
};

class PiecewiseConvexMax {
 public:
  PiecewiseConvexMax() = default;
  PiecewiseConvexMax(int ambient_dim, std::vector<AffinePiece> pieces);

  int ambient_dim() const { return ambient_dim_; }
  int piece_count() const { return static_cast<int>(pieces_.size()); }
  const AffinePiece& piece(int i) const { return pieces_[static_cast<std::size_t>(i)]; }

  double value(const Eigen::VectorXd& x) const;
  double piece_value(int i, const Eigen::VectorXd& x) const;
  Eigen::VectorXd piece_gradient(int i, const Eigen::VectorXd& x) const;

  // Relative default: 1e-9 * (1 + |f(x)|).
  double default_act_tol(const Eigen::VectorXd& x) const;

  std::vector<int> active_pieces(const Eigen::VectorXd& x, double act_tol) const;
  SubgradientPolytope subgradient_polytope(const Eigen::VectorXd& x, double act_tol) const;

  numerics::ScalarFn as_fn() const;

 private:
  int ambient_dim_ = 0;
  std::vector<AffinePiece> pieces_;
};

double eval_max(const PiecewiseConvexMax& f, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Perspective power: t -> (rho * g(t/rho))^alpha with rho = sum_i t_i, where g
// lives on the simplex cross-section {sum = 1} in chart coordinates (first d-1
// coordinates of the simplex point). Convex, positive and alpha-homogeneous on
// {rho > 0} by construction.
// ---------------------------------------------------------------------------

SmoothConvexBase perspective_power(const SmoothConvexBase& g_chart, int d, const Rational& alpha,
                                   std::uint64_t positivity_probe_seed = 11);

// ---------------------------------------------------------------------------
// Lower convex envelope of grid samples over a box in R^dim, dim <= 3.
// dim 1 is the exact epigraph hull; dim 2,3 use full-direction midpoint
// convexification iterated to a fixed point.
// ---------------------------------------------------------------------------

struct EnvelopeFunction {
  Eigen::VectorXd lo, hi;
  std::vector<int> shape;         // nodes per axis
  std::vector<double> input;      // row-major over the grid
  std::vector<double> values;     // envelope values at nodes
  double value(const Eigen::VectorXd& w) const;  // multilinear interpolation
  double node_value(const std::vector<int>& idx) const;
};

EnvelopeFunction lower_convex_envelope(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                       const std::vector<int>& shape,
                                       const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Mollification. Kernel profile (1 - |z|^2)^4 on the unit ball, normalized in
// closed form, scaled to radius r/k and shifted by (2r/k) along the first
// `shift_dims` coordinates so the support sits strictly inside the open
// orthant O = {X_0..X_{shift_dims-1} > 0}.
// ---------------------------------------------------------------------------

struct MollifierSpec {
  double radius = 0.1;  // base support radius r (scaled to r/k)
  int shift_dims = 0;   // number of leading coordinates shifted into O
  double shift_factor = 2.0;
  int quadrature = 12;  // Gauss-Legendre nodes per axis over the support box
  bool require_strict_support = true;
};

class MollifiedFunction {
 public:
  MollifiedFunction(std::shared_ptr<const PiecewiseConvexMax> source, MollifierSpec spec, int k);

  int dim() const { return dim_; }
  int scale_index() const { return k_; }
  const MollifierSpec& spec() const { return spec_; }
  double kernel_mass_quadrature() const { return raw_mass_; }
  Eigen::VectorXd kernel_center() const { return center_; }
  double kernel_radius() const { return radius_k_; }

  // Value by quadrature of the convolution integral (an exact nonnegative
  // combination of translates, hence exactly convex).
  double value(const Eigen::VectorXd& x) const;
  // Derivatives by quadrature against kernel derivatives: robust across the
  // source's kink set.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  SmoothConvexBase as_base() const;

 private:
  std::shared_ptr<const PiecewiseConvexMax> source_;
  MollifierSpec spec_;
  int k_ = 1;
  int dim_ = 0;
  double radius_k_ = 0.0;
  Eigen::VectorXd center_;
  double norm_const_ = 1.0;  // closed-form normalization of the profile
  double raw_mass_ = 0.0;    // quadrature mass of the kernel (diagnostic)
  std::vector<Eigen::VectorXd> nodes_;
  std::vector<double> weights_;      // value weights eta(y_q) w_q / mass, sum 1
  std::vector<double> geo_weights_;  // geometric quadrature weights w_q

  double kernel_value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd kernel_gradient(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd kernel_hessian(const Eigen::VectorXd& y) const;
};

MollifiedFunction mollify(std::shared_ptr<const PiecewiseConvexMax> source, const MollifierSpec& spec,
                          int k);

// ---------------------------------------------------------------------------
// Verification helpers.
// ---------------------------------------------------------------------------

struct ConvexityReport {
  bool pass = false;
  double worst_violation = 0.0;  // positive means a convexity failure
  Eigen::VectorXd worst_x, worst_y;
  int trials = 0;
};

ConvexityReport check_convexity(const numerics::ScalarFn& f, int dim, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, int trials, std::uint64_t seed,
                                double tol = 1e-10);

struct C1Report {
  bool pass = false;
  double extrapolated_gap = 0.0;     // worst over probes after Aitken extrapolation
  double worst_raw_gap = 0.0;        // worst gap at the finest mesh
  std::vector<double> probe_gaps;    // extrapolated gap per probe
};

// One-sided derivative agreement across the hyperplane {sum t_i = 0}; probes
// must lie on the hyperplane. Directions default to the diagonal plus seeded
// random directions with positive diagonal component.
C1Report check_c1_across(const numerics::ScalarFn& f, int dim,
                         const std::vector<Eigen::VectorXd>& probes, double h0, double tol,
                         std::uint64_t seed = 7, int extra_directions = 3);

struct HomogeneityReport {
  bool pass = false;
  double worst_defect = 0.0;
};

HomogeneityReport check_homogeneity(const numerics::ScalarFn& f, int dim, double alpha,
                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int trials,
                                    std::uint64_t seed, double tol);

}  // namespace ansatzlab::convex
