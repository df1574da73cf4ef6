#include "ansatzlab/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <cstdlib>

namespace ansatzlab::ansatz {

// ---------------------------------------------------------------------------
// Problem / config
// ---------------------------------------------------------------------------

void AnsatzProblem::validate() const {
  if (n < 2) throw std::invalid_argument("AnsatzProblem: n >= 2 required");
  if (d < 1 || d >= n) throw std::invalid_argument("AnsatzProblem: 1 <= d < n required");
  if (!(c > 0.0)) throw std::invalid_argument("AnsatzProblem: c > 0 required");
  if (!b.empty()) {
    if (static_cast<int>(b.size()) != d) throw std::invalid_argument("AnsatzProblem: |b| must equal d");
    for (double bi : b) {
      if (!(bi > 0.0)) throw std::invalid_argument("AnsatzProblem: weights must be positive");
    }
  }
}

Eigen::VectorXd AnsatzProblem::weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(d);
  for (std::size_t i = 0; i < b.size(); ++i) w(static_cast<int>(i)) = b[i];
  return w;
}

void SolverConfig::validate() const {
  if (grid < 8) throw std::invalid_argument("SolverConfig: grid >= 8 required");
  if (!(tol_r > 0.0) || !(tol_b > 0.0)) throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations >= 1");
  if (!(rho_inner > 0.0) || !(rho_outer > rho_inner))
    throw std::invalid_argument("SolverConfig: need 0 < rho_inner < rho_outer");
}

// ---------------------------------------------------------------------------
// Closed form, d = 1
// ---------------------------------------------------------------------------

double ClosedFormD1::value(double t) const {
  const double s = n * t + a2;
  if (s < 0.0) throw std::domain_error("ClosedFormD1: n t + a2 < 0");
  return a1 * std::pow(s, (n + 1.0) / n) + a3;
}

double ClosedFormD1::d1(double t) const {
  const double s = n * t + a2;
  if (s < 0.0) throw std::domain_error("ClosedFormD1: n t + a2 < 0");
  return a1 * (n + 1.0) * std::pow(s, 1.0 / n);
}

double ClosedFormD1::d2(double t) const {
  const double s = n * t + a2;
  if (s <= 0.0) throw std::domain_error("ClosedFormD1: second derivative needs n t + a2 > 0");
  return a1 * (n + 1.0) * std::pow(s, (1.0 - n) / n);
}

// ---------------------------------------------------------------------------
// Spline1D (clamped)
// ---------------------------------------------------------------------------

Spline1D::Spline1D(std::vector<double> nodes, std::vector<double> values, double slope_lo,
                   double slope_hi)
    : x_(std::move(nodes)), y_(std::move(values)), s_lo_(slope_lo), s_hi_(slope_hi) {
  const int N = static_cast<int>(x_.size());
  if (N < 2 || y_.size() != x_.size()) throw std::invalid_argument("Spline1D: bad sizes");
  m_.assign(static_cast<std::size_t>(N), 0.0);
  std::vector<double> a(N, 0.0), bdiag(N, 0.0), cdiag(N, 0.0), rhs(N, 0.0);
  auto h = [&](int i) { return x_[static_cast<std::size_t>(i + 1)] - x_[static_cast<std::size_t>(i)]; };
  bdiag[0] = h(0) / 3.0;
  cdiag[0] = h(0) / 6.0;
  rhs[0] = (y_[1] - y_[0]) / h(0) - s_lo_;
  for (int i = 1; i < N - 1; ++i) {
    a[static_cast<std::size_t>(i)] = h(i - 1) / 6.0;
    bdiag[static_cast<std::size_t>(i)] = (h(i - 1) + h(i)) / 3.0;
    cdiag[static_cast<std::size_t>(i)] = h(i) / 6.0;
    rhs[static_cast<std::size_t>(i)] = (y_[static_cast<std::size_t>(i + 1)] - y_[static_cast<std::size_t>(i)]) / h(i) -
                                       (y_[static_cast<std::size_t>(i)] - y_[static_cast<std::size_t>(i - 1)]) / h(i - 1);
  }
  a[static_cast<std::size_t>(N - 1)] = h(N - 2) / 6.0;
  bdiag[static_cast<std::size_t>(N - 1)] = h(N - 2) / 3.0;
  rhs[static_cast<std::size_t>(N - 1)] = s_hi_ - (y_[static_cast<std::size_t>(N - 1)] - y_[static_cast<std::size_t>(N - 2)]) / h(N - 2);
  // Thomas solve.
  for (int i = 1; i < N; ++i) {
    const double w = a[static_cast<std::size_t>(i)] / bdiag[static_cast<std::size_t>(i - 1)];
    bdiag[static_cast<std::size_t>(i)] -= w * cdiag[static_cast<std::size_t>(i - 1)];
    rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
  }
  m_[static_cast<std::size_t>(N - 1)] = rhs[static_cast<std::size_t>(N - 1)] / bdiag[static_cast<std::size_t>(N - 1)];
  for (int i = N - 2; i >= 0; --i) {
    m_[static_cast<std::size_t>(i)] = (rhs[static_cast<std::size_t>(i)] -
                                       cdiag[static_cast<std::size_t>(i)] * m_[static_cast<std::size_t>(i + 1)]) /
                                      bdiag[static_cast<std::size_t>(i)];
  }
}

double Spline1D::eval(double x, int deriv) const {
  const int N = static_cast<int>(x_.size());
  const double lo = x_.front(), hi = x_.back();
  x = std::clamp(x, lo, hi);
  int i = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  i = std::clamp(i, 0, N - 2);
  const double hh = x_[static_cast<std::size_t>(i + 1)] - x_[static_cast<std::size_t>(i)];
  const double A = x_[static_cast<std::size_t>(i + 1)] - x;
  const double B = x - x_[static_cast<std::size_t>(i)];
  const double Mi = m_[static_cast<std::size_t>(i)], Mj = m_[static_cast<std::size_t>(i + 1)];
  const double yi = y_[static_cast<std::size_t>(i)], yj = y_[static_cast<std::size_t>(i + 1)];
  switch (deriv) {
    case 0:
      return Mi * A * A * A / (6.0 * hh) + Mj * B * B * B / (6.0 * hh) + (yi / hh - Mi * hh / 6.0) * A +
             (yj / hh - Mj * hh / 6.0) * B;
    case 1:
      return -Mi * A * A / (2.0 * hh) + Mj * B * B / (2.0 * hh) + (yj - yi) / hh - (Mj - Mi) * hh / 6.0;
    case 2:
      return Mi * A / hh + Mj * B / hh;
    default:
      throw std::invalid_argument("Spline1D: deriv in {0,1,2}");
  }
}

Eigen::VectorXd Spline1D::grad(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g(1);
  g(0) = eval(w(0), 1);
  return g;
}

Eigen::MatrixXd Spline1D::hess(const Eigen::VectorXd& w) const {
  Eigen::MatrixXd H(1, 1);
  H(0, 0) = eval(w(0), 2);
  return H;
}

// ---------------------------------------------------------------------------
// EnrichedSpline1D
// ---------------------------------------------------------------------------

namespace {

// s^beta (1-s)^3 and derivatives, evaluated with s clamped to [0, 1].
double enrich_term(double s, double beta, int deriv) {
  s = std::clamp(s, 0.0, 1.0);
  const double q = 1.0 - s;
  switch (deriv) {
    case 0:
      return std::pow(s, beta) * q * q * q;
    case 1:
      if (s == 0.0) return 0.0;
      return std::pow(s, beta - 1.0) * q * q * (beta * q - 3.0 * s);
    case 2:
      if (s == 0.0) return 0.0;
      return std::pow(s, beta - 2.0) *
             (beta * (beta - 1.0) * q * q * q - 6.0 * beta * s * q * q + 6.0 * s * s * q);
    default:
      throw std::invalid_argument("enrich_term: deriv in {0,1,2}");
  }
}

}  // namespace

EnrichedSpline1D::EnrichedSpline1D(std::shared_ptr<const Spline1D> smooth, double beta, double amp_lo,
                                   double amp_hi)
    : smooth_(std::move(smooth)), beta_(beta), amp_lo_(amp_lo), amp_hi_(amp_hi) {
  if (!(beta_ > 1.0)) throw std::invalid_argument("EnrichedSpline1D: beta > 1 required");
}

double EnrichedSpline1D::eval(double x, int deriv) const {
  const double sign = (deriv == 1) ? -1.0 : 1.0;
  return smooth_->eval(x, deriv) + amp_lo_ * enrich_term(x, beta_, deriv) +
         sign * amp_hi_ * enrich_term(1.0 - x, beta_, deriv);
}

Eigen::VectorXd EnrichedSpline1D::grad(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g(1);
  g(0) = eval(w(0), 1);
  return g;
}

Eigen::MatrixXd EnrichedSpline1D::hess(const Eigen::VectorXd& w) const {
  Eigen::MatrixXd H(1, 1);
  H(0, 0) = eval(w(0), 2);
  return H;
}

// ---------------------------------------------------------------------------
// PolyChart
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> PolyChart::exponent_set(int chart_dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(chart_dim), 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == chart_dim) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[static_cast<std::size_t>(axis)] = e;
      rec(axis + 1, remaining - e);
    }
    cur[static_cast<std::size_t>(axis)] = 0;
  };
  rec(0, degree);
  return out;
}

PolyChart::PolyChart(int chart_dim, int degree, Eigen::VectorXd coeffs)
    : dim_(chart_dim), degree_(degree), coeffs_(std::move(coeffs)), expo_(exponent_set(chart_dim, degree)) {
  if (coeffs_.size() != static_cast<Eigen::Index>(expo_.size()))
    throw std::invalid_argument("PolyChart: coefficient count mismatch");
}

double PolyChart::value(const Eigen::VectorXd& w) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < expo_.size(); ++k) {
    double term = coeffs_(static_cast<Eigen::Index>(k));
    for (int a = 0; a < dim_; ++a) {
      for (int e = 0; e < expo_[k][static_cast<std::size_t>(a)]; ++e) term *= w(a);
    }
    acc += term;
  }
  return acc;
}

Eigen::VectorXd PolyChart::grad(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (std::size_t k = 0; k < expo_.size(); ++k) {
    for (int a = 0; a < dim_; ++a) {
      const int ea = expo_[k][static_cast<std::size_t>(a)];
      if (ea == 0) continue;
      double term = coeffs_(static_cast<Eigen::Index>(k)) * ea;
      for (int b2 = 0; b2 < dim_; ++b2) {
        const int e = expo_[k][static_cast<std::size_t>(b2)] - (b2 == a ? 1 : 0);
        for (int j = 0; j < e; ++j) term *= w(b2);
      }
      g(a) += term;
    }
  }
  return g;
}

Eigen::MatrixXd PolyChart::hess(const Eigen::VectorXd& w) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::size_t k = 0; k < expo_.size(); ++k) {
    for (int a = 0; a < dim_; ++a) {
      for (int b2 = a; b2 < dim_; ++b2) {
        const int ea = expo_[k][static_cast<std::size_t>(a)];
        const int eb = expo_[k][static_cast<std::size_t>(b2)];
        double factor;
        if (a == b2) {
          if (ea < 2) continue;
          factor = static_cast<double>(ea) * (ea - 1);
        } else {
          if (ea == 0 || eb == 0) continue;
          factor = static_cast<double>(ea) * eb;
        }
        double term = coeffs_(static_cast<Eigen::Index>(k)) * factor;
        for (int c2 = 0; c2 < dim_; ++c2) {
          int e = expo_[k][static_cast<std::size_t>(c2)];
          if (c2 == a) e -= (a == b2 ? 2 : 1);
          if (c2 == b2 && a != b2) e -= 1;
          for (int j = 0; j < e; ++j) term *= w(c2);
        }
        H(a, b2) += term;
        if (a != b2) H(b2, a) += term;
      }
    }
  }
  return H;
}

// ---------------------------------------------------------------------------
// AnsatzSolution
// ---------------------------------------------------------------------------

AnsatzSolution AnsatzSolution::closed_form(AnsatzProblem problem, ClosedFormD1 rep) {
  problem.validate();
  if (problem.d != 1) throw std::invalid_argument("closed_form: d must be 1");
  AnsatzSolution s;
  s.problem_ = problem;
  s.kind_ = Kind::ClosedForm;
  s.alpha_ = Rational(problem.n + problem.d, problem.n);
  s.cf_ = rep;
  s.cf_.n = problem.n;
  return s;
}

AnsatzSolution AnsatzSolution::simplex_grid(AnsatzProblem problem,
                                            std::shared_ptr<const CrossSection> g) {
  problem.validate();
  if (g->chart_dim() != problem.d - 1)
    throw std::invalid_argument("simplex_grid: chart dimension must be d-1");
  AnsatzSolution s;
  s.problem_ = problem;
  s.kind_ = Kind::SimplexGrid;
  s.alpha_ = Rational(problem.n + problem.d, problem.n);
  s.grid_ = std::move(g);
  return s;
}

const ClosedFormD1& AnsatzSolution::closed_form_rep() const {
  if (kind_ != Kind::ClosedForm) throw std::logic_error("not a closed-form solution");
  return cf_;
}

const CrossSection& AnsatzSolution::cross_section() const {
  if (kind_ != Kind::SimplexGrid) throw std::logic_error("not a grid solution");
  return *grid_;
}

void AnsatzSolution::chart_coords(const Eigen::VectorXd& t, double& rho, Eigen::VectorXd& w) const {
  const int d = problem_.d;
  if (t.size() != d) throw std::invalid_argument("AnsatzSolution: dimension mismatch");
  const double scale = 1.0 + t.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < d; ++i) {
    if (t(i) < -1e-12 * scale) throw std::domain_error("AnsatzSolution: point outside the closed octant");
  }
  rho = 0.0;
  for (int i = 0; i < d; ++i) rho += std::max(t(i), 0.0);
  w.resize(d - 1);
  for (int c = 0; c < d - 1; ++c) w(c) = rho > 0.0 ? std::clamp(t(c) / rho, 0.0, 1.0) : 0.0;
}

double AnsatzSolution::value(const Eigen::VectorXd& t) const {
  if (kind_ == Kind::ClosedForm) return cf_.value(std::max(t(0), 0.0));
  double rho;
  Eigen::VectorXd w;
  chart_coords(t, rho, w);
  if (rho <= 0.0) return 0.0;
  return std::pow(rho, alpha_.to_double()) * grid_->value(w);
}

Eigen::VectorXd AnsatzSolution::gradient(const Eigen::VectorXd& t) const {
  const int d = problem_.d;
  if (kind_ == Kind::ClosedForm) {
    Eigen::VectorXd g(1);
    g(0) = cf_.d1(std::max(t(0), 0.0));
    return g;
  }
  double rho;
  Eigen::VectorXd w;
  chart_coords(t, rho, w);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  if (rho <= 0.0) return g;  // alpha > 1: the gradient vanishes at the origin
  const double a = alpha_.to_double();
  const double G = grid_->value(w);
  const Eigen::VectorXd Gw = grid_->grad(w);
  const double dotGw = Gw.size() ? Gw.dot(w) : 0.0;
  const double p = std::pow(rho, a - 1.0);
  for (int i = 0; i < d; ++i) {
    double Hi = a * G - dotGw;
    if (i < d - 1) Hi += Gw(i);
    g(i) = p * Hi;
  }
  return g;
}

Eigen::MatrixXd AnsatzSolution::hessian(const Eigen::VectorXd& t) const {
  const int d = problem_.d;
  if (kind_ == Kind::ClosedForm) {
    Eigen::MatrixXd H(1, 1);
    H(0, 0) = cf_.d2(std::max(t(0), 0.0));
    return H;
  }
  double rho;
  Eigen::VectorXd w;
  chart_coords(t, rho, w);
  if (rho <= 0.0) throw std::domain_error("AnsatzSolution: Hessian is singular at the origin");
  const double a = alpha_.to_double();
  const double G = grid_->value(w);
  const Eigen::VectorXd Gw = grid_->grad(w);
  const Eigen::MatrixXd Gww = grid_->hess(w);
  const double dotGw = Gw.size() ? Gw.dot(w) : 0.0;
  const Eigen::VectorXd Gww_w = Gww.size() ? Eigen::VectorXd(Gww * w) : Eigen::VectorXd::Zero(0);
  const double p = std::pow(rho, a - 2.0);
  Eigen::MatrixXd H(d, d);
  for (int i = 0; i < d; ++i) {
    const double Hi = a * G + (i < d - 1 ? Gw(i) : 0.0) - dotGw;
    for (int j = i; j < d; ++j) {
      // D_{i c} = (a-1) G_c + G_{ic} [i < d-1] - (G_ww w)_c, contracted with
      // (delta_{cj} - w_c).
      double Dij = 0.0;
      if (j < d - 1) {
        Dij += (a - 1.0) * Gw(j) - Gww_w(j);
        if (i < d - 1) Dij += Gww(i, j);
      }
      double wD = 0.0;
      for (int c = 0; c < d - 1; ++c) {
        double Dic = (a - 1.0) * Gw(c) - Gww_w(c);
        if (i < d - 1) Dic += Gww(i, c);
        wD += w(c) * Dic;
      }
      const double val = p * ((a - 1.0) * Hi + Dij - wD);
      H(i, j) = val;
      H(j, i) = val;
    }
  }
  return H;
}

convex::SmoothConvexBase AnsatzSolution::as_base() const {
  auto self = std::make_shared<AnsatzSolution>(*this);
  return convex::SmoothConvexBase(
      problem_.d, [self](const Eigen::VectorXd& t) { return self->value(t); },
      [self](const Eigen::VectorXd& t) { return self->gradient(t); },
      [self](const Eigen::VectorXd& t) { return self->hessian(t); }, alpha_);
}

// ---------------------------------------------------------------------------
// solve_closed_form_d1
// ---------------------------------------------------------------------------

AnsatzSolution solve_closed_form_d1(int n, double c) {
  if (n < 2) throw std::invalid_argument("solve_closed_form_d1: n >= 2 required");
  if (!(c > 0.0)) throw std::invalid_argument("solve_closed_form_d1: c > 0 required");
  AnsatzProblem p;
  p.n = n;
  p.d = 1;
  p.c = c;
  ClosedFormD1 rep;
  rep.n = n;
  rep.a1 = std::pow(c, 1.0 / n) / (n + 1.0);
  rep.a2 = 0.0;
  rep.a3 = 0.0;
  auto sol = AnsatzSolution::closed_form(p, rep);
  sol.diagnostics().pde_residual_sup = 0.0;
  sol.diagnostics().boundary_residual_sup = 0.0;
  sol.diagnostics().converged = true;
  return sol;
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

double ma_residual_at(const numerics::ScalarFn& f, int n, int d, double c, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& point) {
  const Eigen::VectorXd g = numerics::fd_gradient(f, point);
  const Eigen::MatrixXd H = numerics::fd_hessian(f, point);
  const double s = b.dot(g);
  return H.determinant() * std::pow(s, static_cast<double>(n - d)) - c;
}

static void check_stencil_clearance(const Eigen::VectorXd& t) {
  const double h = numerics::fd_step(t);
  for (int i = 0; i < t.size(); ++i) {
    if (t(i) < 2.0 * h)
      throw std::domain_error("pde_residual: point too close to a coordinate face for the stencil");
  }
}

std::vector<double> pde_residual(const AnsatzSolution& u, const std::vector<Eigen::VectorXd>& points,
                                 const std::optional<std::vector<double>>& b_opt) {
  const auto& prob = u.problem();
  Eigen::VectorXd b = prob.weights();
  if (b_opt) {
    if (static_cast<int>(b_opt->size()) != prob.d) throw std::invalid_argument("pde_residual: |b| != d");
    for (int i = 0; i < prob.d; ++i) b(i) = (*b_opt)[static_cast<std::size_t>(i)];
  }
  std::vector<double> out;
  out.reserve(points.size());
  if (u.kind() == AnsatzSolution::Kind::ClosedForm) {
    const auto& cf = u.closed_form_rep();
    for (const auto& t : points) {
      const double du = cf.d1(t(0));
      const double d2u = cf.d2(t(0));
      out.push_back(d2u * std::pow(b(0) * du, static_cast<double>(prob.n - 1)) - prob.c);
    }
    return out;
  }
  auto fn = [&u](const Eigen::VectorXd& t) { return u.value(t); };
  for (const auto& t : points) {
    check_stencil_clearance(t);
    out.push_back(ma_residual_at(fn, prob.n, prob.d, prob.c, b, t));
  }
  return out;
}

double boundary_residual_fn(const numerics::ScalarFn& f, int d, const Eigen::VectorXd& t) {
  const double h = numerics::fd_step(t);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(i) = 1.0;
    if (t(i) < 2.0 * h) {
      sum += numerics::one_sided_directional(f, t, e, h);
    } else {
      Eigen::VectorXd tp = t, tm = t;
      tp(i) += h;
      tm(i) -= h;
      sum += (f(tp) - f(tm)) / (2.0 * h);
    }
  }
  return sum;
}

std::vector<double> boundary_residual(const AnsatzSolution& u,
                                      const std::vector<Eigen::VectorXd>& face_points) {
  const auto& prob = u.problem();
  std::vector<double> out;
  out.reserve(face_points.size());
  auto fn = [&u](const Eigen::VectorXd& p) { return u.value(p); };
  for (const auto& t : face_points) {
    if (t.lpNorm<Eigen::Infinity>() <= 1e-14)
      throw std::domain_error("boundary_residual: the origin is a singular point");
    if (u.kind() == AnsatzSolution::Kind::ClosedForm) {
      out.push_back(u.closed_form_rep().d1(std::max(t(0), 0.0)));
      continue;
    }
    out.push_back(boundary_residual_fn(fn, prob.d, t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// solve_bvp
// ---------------------------------------------------------------------------

namespace {

double init_g0(int n, int d, double c) {
  return (std::pow(c, 1.0 / n) / (n + 1.0)) * std::pow(n * (1.0 / d), (n + 1.0) / n);
}

std::vector<double> chart_nodes(int grid, bool graded) {
  std::vector<double> nodes(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double xi = static_cast<double>(i) / (grid - 1);
    nodes[static_cast<std::size_t>(i)] = graded ? xi - 0.7 * std::sin(2.0 * M_PI * xi) / (2.0 * M_PI) : xi;
  }
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  return nodes;
}

struct NewtonSystem {
  std::function<AnsatzSolution(const Eigen::VectorXd&)> build;
  std::function<Eigen::VectorXd(const AnsatzSolution&)> residuals;
  std::function<double(const AnsatzSolution&)> min_hess_eig;
  double tol_scale = 1.0;  // residual tolerance scales with c
};

AnsatzSolution run_gauss_newton(const NewtonSystem& sys, Eigen::VectorXd params,
                                const SolverConfig& cfg, int* iterations_out) {
  const bool trace = std::getenv("ANSATZLAB_NEWTON_TRACE") != nullptr;
  AnsatzSolution sol = sys.build(params);
  Eigen::VectorXd r = sys.residuals(sol);
  double rnorm2 = r.squaredNorm();
  double min_eig = sys.min_hess_eig(sol);
  double lm = 1e-4;
  const double tol = cfg.tol_r * sys.tol_scale;
  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) break;
    // FD Jacobian over parameters. The steps and damping scale with the
    // parameter magnitude so the iteration commutes with u -> lambda u,
    // c -> lambda^n c.
    const double pscale = params.cwiseAbs().maxCoeff();
    Eigen::MatrixXd J(r.size(), params.size());
    for (int j = 0; j < params.size(); ++j) {
      const double delta = 1e-6 * (std::abs(params(j)) + 1e-2 * pscale);
      Eigen::VectorXd pj = params;
      pj(j) += delta;
      J.col(j) = (sys.residuals(sys.build(pj)) - r) / delta;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    const double diag_scale = JtJ.trace() / params.size();

    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lm * diag_scale;
      const Eigen::VectorXd cand = params + Eigen::VectorXd(A.ldlt().solve(-Jtr));
      AnsatzSolution cand_sol = sys.build(cand);
      const double cand_eig = sys.min_hess_eig(cand_sol);
      // Convexity safeguard: never let the grid Hessian drift further below
      // -1e-6 than it already is.
      if (cand_eig < -1e-6 && cand_eig < min_eig) {
        lm *= 4.0;
        continue;
      }
      Eigen::VectorXd rc = sys.residuals(cand_sol);
      const double rc2 = rc.squaredNorm();
      if (rc2 < rnorm2 * (1.0 - 1e-10) || rc.lpNorm<Eigen::Infinity>() <= tol) {
        params = cand;
        sol = std::move(cand_sol);
        r = std::move(rc);
        rnorm2 = rc2;
        min_eig = cand_eig;
        lm = std::max(lm / 4.0, 1e-12);
        accepted = true;
        break;
      }
      lm *= 4.0;
    }
    if (trace)
      std::fprintf(stderr, "lm-iter %d: |r|_inf=%.3e |r|_2=%.3e min_eig=%.3e lm=%.1e acc=%d\n", iter,
                   r.lpNorm<Eigen::Infinity>(), std::sqrt(rnorm2), min_eig, lm, accepted ? 1 : 0);
    if (!accepted) break;
  }
  if (iterations_out) *iterations_out = iter;
  if (r.lpNorm<Eigen::Infinity>() > tol) {
    throw ConvergenceError("solve_bvp: Newton did not reach the residual tolerance",
                           r.lpNorm<Eigen::Infinity>());
  }
  return sol;
}

// Chart points of the d-dimensional simplex interior for d >= 3 collocation.
std::vector<Eigen::VectorXd> simplex_lattice(int chart_dim, int per_axis, double margin) {
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(chart_dim), 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == chart_dim) {
      Eigen::VectorXd w(chart_dim);
      double s = 0.0;
      for (int a = 0; a < chart_dim; ++a) {
        w(a) = (idx[static_cast<std::size_t>(a)] + 0.5) / per_axis;
        s += w(a);
      }
      if (s <= 1.0 - margin) {
        bool ok = true;
        for (int a = 0; a < chart_dim; ++a) ok = ok && w(a) >= margin;
        if (ok) pts.push_back(w);
      }
      return;
    }
    for (int i = 0; i < per_axis; ++i) {
      idx[static_cast<std::size_t>(axis)] = i;
      rec(axis + 1);
    }
  };
  rec(0);
  return pts;
}

}  // namespace

namespace {

// Reduced cross-section ODE for d = 2 and equal weights. With
// u = rho^alpha g(w), the equation det(D^2 u) (sum du/dt_i)^{n-2} = c becomes
// an explicit second-order ODE: the Hessian blocks are linear in g''.
struct ReducedOde {
  int n;
  double c, alpha;

  double bracket(double w, double g, double gp) const { return 2.0 * alpha * g + (1.0 - 2.0 * w) * gp; }

  // Returns false when the trajectory leaves the admissible region.
  bool gpp(double w, double g, double gp, double& out) const {
    const double br = bracket(w, g, gp);
    if (!(br > 1e-14) || !(g > 0.0)) return false;
    const double am1 = alpha - 1.0;
    const double Pa = am1 * (alpha * g + 2.0 * (1.0 - w) * gp);
    const double Qa = am1 * (alpha * g - 2.0 * w * gp);
    const double Sa = am1 * (alpha * g + (1.0 - 2.0 * w) * gp);
    const double denom = Pa * w * w + Qa * (1.0 - w) * (1.0 - w) + 2.0 * Sa * w * (1.0 - w);
    if (!(denom > 1e-14)) return false;
    out = (c / std::pow(br, static_cast<double>(n - 2)) - (Pa * Qa - Sa * Sa)) / denom;
    return std::isfinite(out);
  }

  // RK4 from w0 to w1 with steps shrinking toward the singular face w = 1.
  // Returns the stop position (== w1 on success, earlier if inadmissible).
  double integrate(double w0, double w1, double& g, double& gp) const {
    double w = w0;
    while (w < w1 - 1e-15) {
      const double step = std::min({w1 - w, 0.02, 0.05 * (1.0 - w) + 1e-12});
      double k1, k2, k3, k4, l1, l2, l3, l4;
      auto f = [&](double ww, double gg, double pp, double& kg, double& kp) {
        kg = pp;
        return gpp(ww, gg, pp, kp);
      };
      if (!f(w, g, gp, k1, l1)) return w;
      if (!f(w + 0.5 * step, g + 0.5 * step * k1, gp + 0.5 * step * l1, k2, l2)) return w;
      if (!f(w + 0.5 * step, g + 0.5 * step * k2, gp + 0.5 * step * l2, k3, l3)) return w;
      if (!f(w + step, g + step * k3, gp + step * l3, k4, l4)) return w;
      g += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      gp += step * (l1 + 2.0 * l2 + 2.0 * l3 + l4) / 6.0;
      w += step;
    }
    return w1;
  }
};

// Shooting parameter: the symmetric midpoint value g(1/2) (g'(1/2) = 0).
// Too small a midpoint makes the trace 2 a g + (1-2w) g' cross zero before
// the face; too large keeps it bounded away. The zero-trace solution sits on
// the bisection boundary.
std::shared_ptr<const CrossSection> shoot_symmetric_d2(int n, double c, int grid) {
  ReducedOde ode{n, c, static_cast<double>(n + 2) / n};
  const double alpha = ode.alpha;
  const double beta = static_cast<double>(n) / (n - 1);
  const double w_end = 1.0 - 1e-9;

  auto shot = [&](double s) {
    double g = s, gp = 0.0;
    const double stop = ode.integrate(0.5, w_end, g, gp);
    if (stop < w_end) return -(1.0 - stop);  // trace crossed zero: overshoot
    return ode.bracket(w_end, g, gp);
  };

  double lo = 0.05 * init_g0(n, 2, c), hi = 4.0 * init_g0(n, 2, c);
  if (!(shot(lo) < 0.0)) throw ConvergenceError("solve_bvp: shooting bracket low end", shot(lo));
  if (!(shot(hi) > 0.0)) throw ConvergenceError("solve_bvp: shooting bracket high end", shot(hi));
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shot(mid) < 0.0 ? lo : hi) = mid;
  }
  const double s_star = 0.5 * (lo + hi);

  // Dense sample of the right half on the representation nodes; the left half
  // follows by the w -> 1 - w symmetry.
  const int rep_nodes = 4 * grid + 1;  // node count, odd so w = 1/2 is a node
  std::vector<double> nodes(static_cast<std::size_t>(rep_nodes));
  for (int i = 0; i < rep_nodes; ++i) nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / (rep_nodes - 1);
  std::vector<double> gval(static_cast<std::size_t>(rep_nodes), 0.0);
  const int mid_idx = (rep_nodes - 1) / 2;
  gval[static_cast<std::size_t>(mid_idx)] = s_star;
  {
    double g = s_star, gp = 0.0, w = 0.5;
    for (int i = mid_idx + 1; i < rep_nodes - 1; ++i) {
      const double target = nodes[static_cast<std::size_t>(i)];
      if (ode.integrate(w, target, g, gp) < target)
        throw ConvergenceError("solve_bvp: shooting trajectory left the admissible region", 0.0);
      w = target;
      gval[static_cast<std::size_t>(i)] = g;
    }
    // Face data: fit g = G0 + G1 nu + A nu^beta near nu = 1 - w from the
    // trajectory at a small offset, then place the face node value G0.
    const double nu_fit = 1e-5;
    double gf = g, gpf = gp;
    if (ode.integrate(w, 1.0 - nu_fit, gf, gpf) < 1.0 - nu_fit)
      throw ConvergenceError("solve_bvp: shooting trajectory left the admissible region", 0.0);
    double gppf;
    if (!ode.gpp(1.0 - nu_fit, gf, gpf, gppf))
      throw ConvergenceError("solve_bvp: face fit failed", 0.0);
    const double A = gppf * std::pow(nu_fit, 2.0 - beta) / (beta * (beta - 1.0));
    const double G1 = -gpf - beta * A * std::pow(nu_fit, beta - 1.0);
    const double G0 = gf - G1 * nu_fit - A * std::pow(nu_fit, beta);
    gval[static_cast<std::size_t>(rep_nodes - 1)] = G0;
    // Subtract both enrichment terms so the spline carries the smooth
    // remainder, then mirror (the remainder is symmetric for equal weights).
    for (int i = mid_idx; i <= rep_nodes - 1; ++i) {
      const double wv = nodes[static_cast<std::size_t>(i)];
      const double q = 1.0 - wv;
      gval[static_cast<std::size_t>(i)] -=
          A * (std::pow(q, beta) * wv * wv * wv + std::pow(wv, beta) * q * q * q);
    }
    for (int i = 0; i < mid_idx; ++i)
      gval[static_cast<std::size_t>(i)] = gval[static_cast<std::size_t>(rep_nodes - 1 - i)];
    const double s_lo = -2.0 * alpha * gval.front();
    const double s_hi = 2.0 * alpha * gval.back();
    auto spline = std::make_shared<Spline1D>(nodes, gval, s_lo, s_hi);
    return std::make_shared<EnrichedSpline1D>(spline, beta, A, A);
  }
}

}  // namespace

AnsatzSolution solve_bvp(const AnsatzProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  const int n = problem.n, d = problem.d;
  if (d - 1 > 3) throw ScopeError("solve_bvp: cross-section dimension d-1 > 3 is out of scope");
  const double alpha = static_cast<double>(n + d) / n;
  const Eigen::VectorXd b = problem.weights();

  // Residual collocation in octant coordinates, via finite differences on the
  // reconstructed u.
  auto residual_at = [&](const AnsatzSolution& sol, const Eigen::VectorXd& t) {
    auto fn = [&sol](const Eigen::VectorXd& p) { return sol.value(p); };
    return ma_residual_at(fn, n, d, problem.c, b, t);
  };

  NewtonSystem sys;
  sys.tol_scale = std::max(1.0, problem.c);
  int iters = 0;
  AnsatzSolution sol = [&]() {
    if (d == 2) {
      const Eigen::VectorXd bw = problem.weights();
      if (bw(0) == bw(1)) {
        // Equal weights reduce to the unweighted equation with
        // c' = c / b^{n-2}; the symmetric shooting solve is exact there.
        const double c_eff = problem.c / std::pow(bw(0), static_cast<double>(n - d));
        return AnsatzSolution::simplex_grid(problem, shoot_symmetric_d2(n, c_eff, cfg.grid));
      }
    }
    if (d == 1) {
      sys.build = [&](const Eigen::VectorXd& p) {
        return AnsatzSolution::simplex_grid(problem, std::make_shared<PointChart>(p(0)));
      };
      sys.residuals = [&](const AnsatzSolution& s) {
        Eigen::VectorXd r(2);
        Eigen::VectorXd t(1);
        t(0) = 1.0;
        r(0) = residual_at(s, t);
        t(0) = 2.0;
        r(1) = residual_at(s, t);
        return r;
      };
      sys.min_hess_eig = [&](const AnsatzSolution& s) {
        Eigen::VectorXd t(1);
        t(0) = 1.0;
        return s.hessian(t)(0, 0);
      };
      Eigen::VectorXd p0(1);
      p0(0) = init_g0(n, d, problem.c);
      return run_gauss_newton(sys, p0, cfg, &iters);
    }
    if (d == 2) {
      const auto nodes = chart_nodes(cfg.grid, cfg.graded_mesh);
      const double beta = static_cast<double>(n) / (n - 1);
      // Parameters: grid node values of the smooth part, then the two face
      // enrichment amplitudes. The enrichment carries the dist^beta face
      // behavior that the equation forces under the zero-trace boundary
      // condition; without it the scheme converges to the free-boundary
      // solution instead.
      sys.build = [&, nodes, beta](const Eigen::VectorXd& p) {
        const int R = static_cast<int>(p.size()) - 2;
        std::vector<double> vals(static_cast<std::size_t>(R));
        for (int i = 0; i < R; ++i) vals[static_cast<std::size_t>(i)] = p(i);
        // End slopes enforce sum_i du/dt_i = 0 on the faces exactly through
        // the reconstruction: g'(0) = -d a g(0), g'(1) = +d a g(1); the
        // enrichment terms have vanishing value and slope at both ends.
        const double s_lo = -d * alpha * vals.front();
        const double s_hi = d * alpha * vals.back();
        auto spline = std::make_shared<Spline1D>(nodes, vals, s_lo, s_hi);
        auto chart = std::make_shared<EnrichedSpline1D>(spline, beta, p(R), p(R + 1));
        return AnsatzSolution::simplex_grid(problem, chart);
      };
      // Collocate strictly inside spline intervals so the finite-difference
      // stencils never straddle a node (where g''' jumps), and add log-spaced
      // points tight against both faces: the boundary condition's content is
      // the equation holding uniformly up to the face, which rules out the
      // free-boundary branch that a clamped endpoint alone admits.
      std::vector<double> colloc_w;
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double span = nodes[i + 1] - nodes[i];
        colloc_w.push_back(nodes[i] + 0.25 * span);
        colloc_w.push_back(nodes[i] + 0.75 * span);
      }
      std::vector<double> face_ring = {0.006, 0.012, 0.024};
      const std::vector<double> rhos = {1.0, 2.0};
      // Rows tight against the faces select the zero-trace branch; they sit
      // at the edge of what the enriched basis can represent, so they carry
      // a reduced weight and only need to be small, not machine-small.
      const double face_weight = 0.1;
      sys.residuals = [&, colloc_w, face_ring, rhos](const AnsatzSolution& s) {
        std::vector<double> rows;
        auto fn = [&s](const Eigen::VectorXd& p) { return s.value(p); };
        auto residual_row = [&](double rho, double w) {
          Eigen::VectorXd t(2);
          t(0) = rho * w;
          t(1) = rho * (1.0 - w);
          const double h = std::min(numerics::fd_step(t), t.minCoeff() / 12.0);
          const Eigen::VectorXd g = numerics::fd_gradient(fn, t, h);
          const Eigen::MatrixXd H = numerics::fd_hessian(fn, t, h);
          return H.determinant() * std::pow(b.dot(g), static_cast<double>(n - d)) - problem.c;
        };
        for (double rho : rhos) {
          for (double w : colloc_w) {
            if (std::min(rho * w, rho * (1.0 - w)) < 1e-4) continue;
            rows.push_back(residual_row(rho, w));
          }
          for (double nu : face_ring) {
            rows.push_back(face_weight * residual_row(rho, nu));
            rows.push_back(face_weight * residual_row(rho, 1.0 - nu));
          }
        }
        return Eigen::Map<Eigen::VectorXd>(rows.data(), static_cast<Eigen::Index>(rows.size())).eval();
      };
      sys.min_hess_eig = [&](const AnsatzSolution& s) {
        double mn = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 40; ++i) {
          const double w = static_cast<double>(i) / 40.0;
          Eigen::VectorXd t(2);
          t(0) = w;
          t(1) = 1.0 - w;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.hessian(t));
          mn = std::min(mn, es.eigenvalues().minCoeff());
        }
        return mn;
      };
      const double g0 = init_g0(n, d, problem.c);
      Eigen::VectorXd p0 = Eigen::VectorXd::Constant(cfg.grid + 2, g0);
      // Face amplitude estimate: the equation ties the dist^beta coefficient
      // h to the tangential curvature through
      //   alpha (alpha-1) g(face) beta^2 (beta-1) h^{n-1} = c.
      const double h_init = std::pow(
          problem.c / (alpha * (alpha - 1.0) * g0 * beta * beta * (beta - 1.0)), 1.0 / (n - 1));
      p0(cfg.grid) = h_init;
      p0(cfg.grid + 1) = h_init;
      return run_gauss_newton(sys, p0, cfg, &iters);
    }
    // d in {3, 4}: polynomial cross-section, boundary condition as a penalty.
    const int cd = d - 1;
    const auto expo = PolyChart::exponent_set(cd, cfg.poly_degree);
    sys.build = [&](const Eigen::VectorXd& p) {
      return AnsatzSolution::simplex_grid(problem,
                                          std::make_shared<PolyChart>(cd, cfg.poly_degree, p));
    };
    const int per_axis = std::max(6, static_cast<int>(std::ceil(std::pow(3.0 * expo.size(), 1.0 / cd))));
    const auto interior = simplex_lattice(cd, per_axis, 0.04);
    sys.residuals = [&, interior](const AnsatzSolution& s) {
      std::vector<double> rows;
      for (double rho : {1.0, 2.0}) {
        for (const auto& w : interior) {
          Eigen::VectorXd t(d);
          double acc = 0.0;
          for (int c2 = 0; c2 < cd; ++c2) {
            t(c2) = rho * w(c2);
            acc += w(c2);
          }
          t(d - 1) = rho * (1.0 - acc);
          const double h = numerics::fd_step(t);
          if (t.minCoeff() < 2.5 * h) continue;
          rows.push_back(residual_at(s, t));
        }
      }
      // Weak boundary rows: weighted gradient sum at face-adjacent points.
      for (const auto& w : simplex_lattice(cd, per_axis, 0.04)) {
        for (int face = 0; face < d; ++face) {
          Eigen::VectorXd wf = w;
          if (face < cd) {
            wf(face) = 0.004;
          } else {
            double acc = wf.sum();
            wf *= (1.0 - 0.004) / acc;
          }
          Eigen::VectorXd t(d);
          double acc = 0.0;
          for (int c2 = 0; c2 < cd; ++c2) {
            t(c2) = wf(c2);
            acc += wf(c2);
          }
          t(d - 1) = 1.0 - acc;
          auto fn = [&s](const Eigen::VectorXd& p2) { return s.value(p2); };
          double sum = 0.0;
          const double h = 1e-5;
          for (int i = 0; i < d; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(i) = 1.0;
            sum += b(i) * numerics::one_sided_directional(fn, t, e, h);
          }
          rows.push_back(0.3 * sum);
        }
        break;  // one representative interior point suffices per face sweep
      }
      return Eigen::Map<Eigen::VectorXd>(rows.data(), static_cast<Eigen::Index>(rows.size())).eval();
    };
    sys.min_hess_eig = [&, interior](const AnsatzSolution& s) {
      double mn = std::numeric_limits<double>::infinity();
      for (const auto& w : interior) {
        Eigen::VectorXd t(d);
        double acc = 0.0;
        for (int c2 = 0; c2 < cd; ++c2) {
          t(c2) = w(c2);
          acc += w(c2);
        }
        t(d - 1) = 1.0 - acc;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.hessian(t));
        mn = std::min(mn, es.eigenvalues().minCoeff());
      }
      return mn;
    };
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(expo.size()));
    p0(0) = init_g0(n, d, problem.c);
    return run_gauss_newton(sys, p0, cfg, &iters);
  }();

  // Diagnostics on an independent interior test grid.
  auto& diag = sol.diagnostics();
  diag.newton_iterations = iters;
  diag.converged = true;
  {
    std::vector<Eigen::VectorXd> test_points;
    const std::vector<double> rhos = {std::max(cfg.rho_inner * 2.0, 0.5), 1.0, 2.0,
                                      std::min(cfg.rho_outer * 0.85, 3.4)};
    if (d == 1) {
      for (double rho : rhos) {
        Eigen::VectorXd t(1);
        t(0) = rho;
        test_points.push_back(t);
      }
    } else if (d == 2) {
      for (double rho : rhos) {
        for (int i = 0; i <= 32; ++i) {
          const double w = 0.1 + 0.8 * i / 32.0;
          Eigen::VectorXd t(2);
          t(0) = rho * w;
          t(1) = rho * (1.0 - w);
          test_points.push_back(t);
        }
      }
    } else {
      for (double rho : {1.0, 2.0}) {
        for (const auto& w : simplex_lattice(d - 1, 8, 0.08)) {
          Eigen::VectorXd t(d);
          double acc = 0.0;
          for (int c2 = 0; c2 < d - 1; ++c2) {
            t(c2) = rho * w(c2);
            acc += w(c2);
          }
          t(d - 1) = rho * (1.0 - acc);
          test_points.push_back(t);
        }
      }
    }
    double sup = 0.0;
    for (double r : pde_residual(sol, test_points)) sup = std::max(sup, std::abs(r));
    diag.pde_residual_sup = sup;
  }
  {
    std::vector<Eigen::VectorXd> probes;
    const double eps = 1e-2;
    for (double along : {0.5, 1.0, 2.0}) {
      for (int face = 0; face < d; ++face) {
        Eigen::VectorXd t = Eigen::VectorXd::Constant(d, along);
        t(face) = eps;
        probes.push_back(t);
      }
    }
    double sup = 0.0;
    for (double r : boundary_residual(sol, probes)) sup = std::max(sup, std::abs(r));
    diag.boundary_residual_sup = sup;
  }
  {
    auto fn = [&sol](const Eigen::VectorXd& t) { return sol.value(t); };
    auto rep = convex::check_convexity(fn, d, Eigen::VectorXd::Constant(d, 0.05),
                                       Eigen::VectorXd::Constant(d, 3.0), 600, 99, 1e-12);
    diag.convexity_worst = rep.worst_violation;
  }
  if (diag.pde_residual_sup > std::max(cfg.tol_r * 10.0, 1e-3)) diag.converged = false;
  return sol;
}

// ---------------------------------------------------------------------------
// Extension to R^d
// ---------------------------------------------------------------------------

namespace {

// Chart tangent data of q = u^{1/alpha} restricted to the simplex.
struct TangentPlane {
  double value_coeff;              // multiplies rho
  Eigen::VectorXd chart_coeff;     // multiplies t_{0..d-2}
};

}  // namespace

ExtensionResult extend_to_rd(const AnsatzSolution& u, const ExtensionConfig& cfg) {
  const auto& prob = u.problem();
  const int d = prob.d;
  if (d > 4) throw ScopeError("extend_to_rd: envelope scope is d - 1 <= 3");
  const double a = u.alpha().to_double();
  const Rational alpha = u.alpha();

  auto u_value = [&u](const Eigen::VectorXd& t) { return u.value(t); };
  auto u_grad = [&u](const Eigen::VectorXd& t) { return u.gradient(t); };

  // q(w) = u(chart(w))^{1/alpha} on the simplex; tangent data for the
  // continuation beyond it.
  auto chart_to_t = [d](const Eigen::VectorXd& w) {
    Eigen::VectorXd t(d);
    double s = 0.0;
    for (int c = 0; c < d - 1; ++c) {
      t(c) = w(c);
      s += w(c);
    }
    t(d - 1) = 1.0 - s;
    return t;
  };
  auto q_at = [&](const Eigen::VectorXd& w) { return std::pow(u_value(chart_to_t(w)), 1.0 / a); };
  auto q_grad_at = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd t = chart_to_t(w);
    const double uv = u_value(t);
    const Eigen::VectorXd g = u_grad(t);
    Eigen::VectorXd qg(d - 1);
    const double factor = (1.0 / a) * std::pow(uv, 1.0 / a - 1.0);
    for (int c = 0; c < d - 1; ++c) qg(c) = factor * (g(c) - g(d - 1));
    return qg;
  };

  // Tangent planes sampled over the simplex; each gives the affine-in-t form
  // rho * q_j + <grad q_j, t_chart - rho * s_j>.
  std::vector<TangentPlane> planes;
  double q_min = std::numeric_limits<double>::infinity();
  if (d >= 2) {
    const int per_axis = (d == 2) ? cfg.chart_samples : std::max(24, cfg.chart_samples / 32);
    std::vector<Eigen::VectorXd> samples;
    if (d == 2) {
      for (int i = 0; i <= per_axis; ++i) {
        Eigen::VectorXd w(1);
        w(0) = static_cast<double>(i) / per_axis;
        samples.push_back(w);
      }
    } else {
      for (int i = 0; i <= per_axis; ++i) {
        // lattice over the chart simplex including boundary
        std::vector<int> idx(static_cast<std::size_t>(d - 1), 0);
        std::function<void(int, int)> rec = [&](int axis, int rem) {
          if (axis == d - 1) {
            Eigen::VectorXd w(d - 1);
            for (int c = 0; c < d - 1; ++c) w(c) = static_cast<double>(idx[static_cast<std::size_t>(c)]) / per_axis;
            samples.push_back(w);
            return;
          }
          for (int k = 0; k <= rem; ++k) {
            idx[static_cast<std::size_t>(axis)] = k;
            rec(axis + 1, rem - k);
          }
        };
        rec(0, per_axis);
        break;
      }
    }
    for (const auto& w : samples) {
      TangentPlane tp;
      const double q = q_at(w);
      const Eigen::VectorXd qg = q_grad_at(w);
      q_min = std::min(q_min, q);
      tp.chart_coeff = qg;
      tp.value_coeff = q - qg.dot(w);
      planes.push_back(std::move(tp));
    }
    if (!(q_min > 0.0)) throw std::runtime_error("extend_to_rd: nonpositive cross-section detected");
  }

  const double u_at_one = [&] {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
    t(d > 1 ? d - 1 : 0) = 1.0;
    if (d == 1) t(0) = 1.0;
    return u_value(t);
  }();

  // psi1(w): native q inside the simplex, supporting-plane envelope outside.
  // Evaluation goes through the stable affine-in-t form.
  auto phi_at = [planes, d](double rho, const Eigen::VectorXd& t_chart) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& tp : planes) {
      best = std::max(best, rho * tp.value_coeff + tp.chart_coeff.dot(t_chart));
    }
    return best;
  };

  const double octant_slack = 1e-13;
  auto eval = [=](const Eigen::VectorXd& t) -> double {
    const double scale = 1.0 + t.lpNorm<Eigen::Infinity>();
    const double rho = t.sum();
    if (rho <= 0.0) return 0.0;
    if (t.minCoeff() >= -octant_slack * scale) {
      Eigen::VectorXd tc = t.cwiseMax(0.0);
      if (d == 1) return u_at_one * std::pow(tc(0), a);
      return u_value(tc);
    }
    if (d == 1) return 0.0;  // t < 0 and rho > 0 cannot happen for d = 1
    Eigen::VectorXd t_chart = t.head(d - 1);
    const double phi = phi_at(rho, t_chart);
    if (!(phi > 0.0)) throw std::runtime_error("extend_to_rd: envelope evaluated nonpositive");
    return std::pow(phi, a);
  };
  auto grad = [=](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    const double scale = 1.0 + t.lpNorm<Eigen::Infinity>();
    const double rho = t.sum();
    if (rho <= 0.0) return Eigen::VectorXd::Zero(d);
    if (t.minCoeff() >= -octant_slack * scale) {
      Eigen::VectorXd tc = t.cwiseMax(0.0);
      if (d == 1) {
        Eigen::VectorXd g(1);
        g(0) = u_at_one * a * std::pow(tc(0), a - 1.0);
        return g;
      }
      return u_grad(tc);
    }
    Eigen::VectorXd t_chart = t.head(d - 1);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < planes.size(); ++j) {
      const double v = rho * planes[j].value_coeff + planes[j].chart_coeff.dot(t_chart);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    Eigen::VectorXd gphi = Eigen::VectorXd::Constant(d, planes[best_j].value_coeff);
    for (int c = 0; c < d - 1; ++c) gphi(c) += planes[best_j].chart_coeff(c);
    return a * std::pow(best, a - 1.0) * gphi;
  };
  auto gradfn = grad;
  auto hess = [eval, gradfn, d](const Eigen::VectorXd& t) -> Eigen::MatrixXd {
    const double rho = t.sum();
    if (rho <= 0.0) return Eigen::MatrixXd::Zero(d, d);
    return numerics::fd_hessian(eval, t);
  };

  ExtensionResult out{convex::SmoothConvexBase(d, eval, grad, hess, alpha), {}, 0, 0, 0, 0};

  // Envelope diagnostic on the chart grid (exact values and their grid
  // convexification agree when the continuation is convex).
  {
    const int cd = std::max(1, d - 1);
    const int nodes_per_axis = (d <= 2) ? 129 : 17;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(cd, -cfg.chart_margin);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(cd, 1.0 + cfg.chart_margin);
    std::vector<int> shape(static_cast<std::size_t>(cd), nodes_per_axis);
    std::size_t total = 1;
    for (int s : shape) total *= static_cast<std::size_t>(s);
    std::vector<double> vals(total);
    std::vector<int> idx(static_cast<std::size_t>(cd), 0);
    for (std::size_t f = 0; f < total; ++f) {
      Eigen::VectorXd w(cd);
      for (int c2 = 0; c2 < cd; ++c2)
        w(c2) = lo(c2) + (hi(c2) - lo(c2)) * idx[static_cast<std::size_t>(c2)] / (nodes_per_axis - 1);
      if (d == 1) {
        vals[f] = std::pow(u_at_one, 1.0 / a);
      } else {
        vals[f] = phi_at(1.0, w);
      }
      for (int c2 = cd - 1; c2 >= 0; --c2) {
        if (++idx[static_cast<std::size_t>(c2)] < nodes_per_axis) break;
        idx[static_cast<std::size_t>(c2)] = 0;
      }
    }
    out.psi1 = convex::lower_convex_envelope(lo, hi, shape, vals);
  }

  // Diagnostics.
  {
    auto rng = numerics::make_rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    double diag_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.check_samples; ++s) {
      Eigen::VectorXd t(d);
      for (int i = 0; i < d; ++i) t(i) = uni(rng);
      if (t.sum() <= 0.0) {
        diag_min = std::min(diag_min, 0.0);
        continue;
      }
      diag_min = std::min(diag_min, grad(t).sum());
    }
    out.diag_derivative_min = diag_min;

    double agree = 0.0;
    std::uniform_real_distribution<double> upos(0.05, 2.5);
    for (int s = 0; s < 400; ++s) {
      Eigen::VectorXd t(d);
      for (int i = 0; i < d; ++i) t(i) = upos(rng);
      const double ue = u.value(t);
      agree = std::max(agree, std::abs(eval(t) - ue) / (1.0 + std::abs(ue)));
    }
    out.octant_agreement_rel = agree;

    auto rep = convex::check_convexity(eval, d, Eigen::VectorXd::Constant(d, -1.2),
                                       Eigen::VectorXd::Constant(d, 1.2), 2000, cfg.seed + 1, 1e-10);
    out.convexity_worst = rep.worst_violation;

    std::vector<Eigen::VectorXd> probes = {Eigen::VectorXd::Zero(d)};
    auto c1 = convex::check_c1_across(eval, d, probes, 1e-3, 1e-4, cfg.seed + 2);
    out.c1_gap = c1.extrapolated_gap;
  }
  return out;
}

}  // namespace ansatzlab::ansatz
