#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ansatzlab/convex.hpp"
#include "ansatzlab/rational.hpp"

namespace ansatzlab::ansatz {

struct ConvergenceError : std::runtime_error {
  double last_residual;
  ConvergenceError(const std::string& msg, double res) : std::runtime_error(msg), last_residual(res) {}
};

struct ScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Problem data: det(D^2 u) (sum_i b_i du/dt_i)^{n-d} = c on the open octant,
// sum_i du/dt_i = 0 on its boundary.
// ---------------------------------------------------------------------------

struct AnsatzProblem {
  int n = 2;
  int d = 1;
  double c = 1.0;
  std::vector<double> b;  // weights, default all 1

  void validate() const;
  Eigen::VectorXd weights() const;
};

struct SolverConfig {
  int grid = 32;             // nodes per cross-section axis
  int max_iterations = 250;
  double tol_r = 1e-4;       // interior residual target (sup norm)
  double tol_b = 5e-2;       // boundary residual target at probe distance
  double rho_inner = 0.25;   // residuals assessed on [rho_inner, rho_outer]
  double rho_outer = 4.0;
  bool graded_mesh = false;  // cluster cross-section nodes toward the faces
  int poly_degree = 8;       // cross-section polynomial degree for d >= 3

  void validate() const;
};

struct Diagnostics {
  double pde_residual_sup = 0.0;
  double boundary_residual_sup = 0.0;
  double convexity_worst = 0.0;
  int newton_iterations = 0;
  bool converged = true;
};

// ---------------------------------------------------------------------------
// Representations.
// ---------------------------------------------------------------------------

struct ClosedFormD1 {
  int n = 2;
  double a1 = 1.0, a2 = 0.0, a3 = 0.0;  // u = a1 (n t + a2)^{(n+1)/n} + a3

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
};

// Cross-section function on chart coordinates w in R^{d-1} (first d-1
// barycentric coordinates of the simplex point).
class CrossSection {
 public:
  virtual ~CrossSection() = default;
  virtual int chart_dim() const = 0;
  virtual double value(const Eigen::VectorXd& w) const = 0;
  virtual Eigen::VectorXd grad(const Eigen::VectorXd& w) const = 0;
  virtual Eigen::MatrixXd hess(const Eigen::VectorXd& w) const = 0;
  virtual std::string kind() const = 0;
};

// d = 2: clamped cubic spline on [0,1]; the end slopes enforce the boundary
// condition exactly through the reconstruction.
class Spline1D : public CrossSection {
 public:
  Spline1D(std::vector<double> nodes, std::vector<double> values, double slope_lo, double slope_hi);
  int chart_dim() const override { return 1; }
  double value(const Eigen::VectorXd& w) const override { return eval(w(0), 0); }
  Eigen::VectorXd grad(const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hess(const Eigen::VectorXd& w) const override;
  std::string kind() const override { return "clamped_cubic_spline"; }

  double eval(double x, int deriv) const;
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, m_;  // nodes, values, moments (second derivatives)
  double s_lo_, s_hi_;
};

// d = 2 with the face behavior built in: a clamped spline plus singular
// enrichment terms A_lo w^beta (1-w)^3 + A_hi (1-w)^beta w^3 with
// beta = n/(n-1), the exponent forced by the equation at the faces. The
// enrichment and its first derivative vanish at both endpoints, so the
// boundary clamps act on the spline part alone.
class EnrichedSpline1D : public CrossSection {
 public:
  EnrichedSpline1D(std::shared_ptr<const Spline1D> smooth, double beta, double amp_lo, double amp_hi);
  int chart_dim() const override { return 1; }
  double value(const Eigen::VectorXd& w) const override { return eval(w(0), 0); }
  Eigen::VectorXd grad(const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hess(const Eigen::VectorXd& w) const override;
  std::string kind() const override { return "enriched_spline"; }

  double eval(double x, int deriv) const;
  const Spline1D& smooth() const { return *smooth_; }
  double beta() const { return beta_; }
  double amp_lo() const { return amp_lo_; }
  double amp_hi() const { return amp_hi_; }

 private:
  std::shared_ptr<const Spline1D> smooth_;
  double beta_, amp_lo_, amp_hi_;
};

// d >= 3: total-degree polynomial over the chart simplex.
class PolyChart : public CrossSection {
 public:
  PolyChart(int chart_dim, int degree, Eigen::VectorXd coeffs);
  int chart_dim() const override { return dim_; }
  double value(const Eigen::VectorXd& w) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hess(const Eigen::VectorXd& w) const override;
  std::string kind() const override { return "poly_total_degree"; }

  int degree() const { return degree_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  const std::vector<std::vector<int>>& exponents() const { return expo_; }
  static std::vector<std::vector<int>> exponent_set(int chart_dim, int degree);

 private:
  int dim_, degree_;
  Eigen::VectorXd coeffs_;
  std::vector<std::vector<int>> expo_;
};

// Constant cross-section (d = 1; the simplex is a point).
class PointChart : public CrossSection {
 public:
  explicit PointChart(double g0) : g0_(g0) {}
  int chart_dim() const override { return 0; }
  double value(const Eigen::VectorXd&) const override { return g0_; }
  Eigen::VectorXd grad(const Eigen::VectorXd&) const override { return Eigen::VectorXd::Zero(0); }
  Eigen::MatrixXd hess(const Eigen::VectorXd&) const override { return Eigen::MatrixXd::Zero(0, 0); }
  std::string kind() const override { return "point"; }
  double g0() const { return g0_; }

 private:
  double g0_;
};

// ---------------------------------------------------------------------------
// AnsatzSolution: u on the closed octant, u(t) = rho^alpha g(t/rho).
// ---------------------------------------------------------------------------

class AnsatzSolution {
 public:
  enum class Kind { ClosedForm, SimplexGrid };

  static AnsatzSolution closed_form(AnsatzProblem problem, ClosedFormD1 rep);
  static AnsatzSolution simplex_grid(AnsatzProblem problem, std::shared_ptr<const CrossSection> g);

  const AnsatzProblem& problem() const { return problem_; }
  Kind kind() const { return kind_; }
  const Rational& alpha() const { return alpha_; }
  const ClosedFormD1& closed_form_rep() const;
  const CrossSection& cross_section() const;
  std::shared_ptr<const CrossSection> cross_section_ptr() const { return grid_; }
  Diagnostics& diagnostics() { return diag_; }
  const Diagnostics& diagnostics() const { return diag_; }

  // Evaluation on the closed octant (rho = 0 included: value 0, gradient 0).
  double value(const Eigen::VectorXd& t) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& t) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& t) const;

  convex::SmoothConvexBase as_base() const;

 private:
  AnsatzProblem problem_;
  Kind kind_ = Kind::ClosedForm;
  Rational alpha_{3, 2};
  ClosedFormD1 cf_;
  std::shared_ptr<const CrossSection> grid_;
  Diagnostics diag_;

  void chart_coords(const Eigen::VectorXd& t, double& rho, Eigen::VectorXd& w) const;
};

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// Homogeneous representative of u'' (u')^{n-1} = c with u'(0) = 0:
// a1 = c^{1/n} / (n+1), a2 = a3 = 0.
AnsatzSolution solve_closed_form_d1(int n, double c);

AnsatzSolution solve_bvp(const AnsatzProblem& problem, const SolverConfig& cfg);

// det(D^2 u) (sum b_i du/dt_i)^{n-d} - c at each point. Analytic derivatives
// for the closed form, finite differences on the reconstruction for grids.
std::vector<double> pde_residual(const AnsatzSolution& u, const std::vector<Eigen::VectorXd>& points,
                                 const std::optional<std::vector<double>>& b = std::nullopt);

// Same residual for an arbitrary callable (test hook; allows n = d).
double ma_residual_at(const numerics::ScalarFn& f, int n, int d, double c, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& point);

// sum_i du/dt_i near coordinate faces, one-sided stencils toward the interior
// for grid-backed solutions, analytic for the closed form.
std::vector<double> boundary_residual(const AnsatzSolution& u,
                                      const std::vector<Eigen::VectorXd>& face_points);

// Stencil form for arbitrary callables (test hook).
double boundary_residual_fn(const numerics::ScalarFn& f, int d, const Eigen::VectorXd& point);

// ---------------------------------------------------------------------------
// Extension of u to all of R^d: zero on {sum t <= 0}, perspective power of the
// tangent-envelope continuation of u^{1/alpha}|_Sigma elsewhere.
// ---------------------------------------------------------------------------

struct ExtensionResult {
  convex::SmoothConvexBase extended;
  convex::EnvelopeFunction psi1;  // chart grid diagnostic of the envelope step
  double convexity_worst = 0.0;
  double c1_gap = 0.0;
  double diag_derivative_min = 0.0;
  double octant_agreement_rel = 0.0;  // worst relative deviation from u at octant samples
};

struct ExtensionConfig {
  int chart_samples = 1024;   // tangent samples per chart axis
  double chart_margin = 0.75; // box half-width beyond the simplex for psi1 grid
  int check_samples = 10000;
  std::uint64_t seed = 2026;
};

ExtensionResult extend_to_rd(const AnsatzSolution& u, const ExtensionConfig& cfg = {});

}  // namespace ansatzlab::ansatz
