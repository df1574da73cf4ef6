#include "ansatzlab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ansatzlab::convex {

// ---------------------------------------------------------------------------
// SmoothConvexBase
// ---------------------------------------------------------------------------

SmoothConvexBase::SmoothConvexBase(int dim, EvalFn eval, GradFn grad, HessFn hess,
                                   std::optional<Rational> homogeneity)
    : dim_(dim), eval_(std::move(eval)), grad_(std::move(grad)), hess_(std::move(hess)),
      homogeneity_(homogeneity) {
  if (dim_ <= 0) throw std::invalid_argument("SmoothConvexBase: dim must be positive");
  if (!eval_) throw std::invalid_argument("SmoothConvexBase: eval required");
}

double SmoothConvexBase::value(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("SmoothConvexBase: dimension mismatch");
  return eval_(x);
}

Eigen::VectorXd SmoothConvexBase::gradient(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("SmoothConvexBase: dimension mismatch");
  if (grad_) return grad_(x);
  return numerics::fd_gradient(eval_, x);
}

Eigen::MatrixXd SmoothConvexBase::hessian(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("SmoothConvexBase: dimension mismatch");
  if (hess_) return hess_(x);
  return numerics::fd_hessian(eval_, x);
}

// ---------------------------------------------------------------------------
// PiecewiseConvexMax
// ---------------------------------------------------------------------------

PiecewiseConvexMax::PiecewiseConvexMax(int ambient_dim, std::vector<AffinePiece> pieces)
    : ambient_dim_(ambient_dim), pieces_(std::move(pieces)) {
  if (ambient_dim_ <= 0) throw std::invalid_argument("PiecewiseConvexMax: ambient_dim must be positive");
  if (pieces_.empty()) throw std::invalid_argument("PiecewiseConvexMax: needs at least one piece");
  const int d = pieces_[0].base->dim();
  for (const auto& p : pieces_) {
    if (p.map.rows() != d || p.base->dim() != d)
      throw std::invalid_argument("PiecewiseConvexMax: all pieces must share the base domain dimension");
    if (p.map.cols() != ambient_dim_ || p.offset.size() != d)
      throw std::invalid_argument("PiecewiseConvexMax: affine map shape mismatch");
  }
}

double PiecewiseConvexMax::piece_value(int i, const Eigen::VectorXd& x) const {
  const auto& p = pieces_[static_cast<std::size_t>(i)];
  return p.base->value(p.map * x + p.offset);
}

Eigen::VectorXd PiecewiseConvexMax::piece_gradient(int i, const Eigen::VectorXd& x) const {
  const auto& p = pieces_[static_cast<std::size_t>(i)];
  return p.map.transpose() * p.base->gradient(p.map * x + p.offset);
}

double PiecewiseConvexMax::value(const Eigen::VectorXd& x) const {
  if (x.size() != ambient_dim_) throw std::invalid_argument("PiecewiseConvexMax: dimension mismatch");
  double best = piece_value(0, x);
  for (int i = 1; i < piece_count(); ++i) best = std::max(best, piece_value(i, x));
  return best;
}

double PiecewiseConvexMax::default_act_tol(const Eigen::VectorXd& x) const {
  return 1e-9 * (1.0 + std::abs(value(x)));
}

std::vector<int> PiecewiseConvexMax::active_pieces(const Eigen::VectorXd& x, double act_tol) const {
  if (act_tol < 0.0) throw std::invalid_argument("active_pieces: act_tol must be >= 0");
  if (x.size() != ambient_dim_) throw std::invalid_argument("PiecewiseConvexMax: dimension mismatch");
  std::vector<double> vals(static_cast<std::size_t>(piece_count()));
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < piece_count(); ++i) {
    vals[static_cast<std::size_t>(i)] = piece_value(i, x);
    best = std::max(best, vals[static_cast<std::size_t>(i)]);
  }
  std::vector<int> act;
  for (int i = 0; i < piece_count(); ++i) {
    if (vals[static_cast<std::size_t>(i)] >= best - act_tol) act.push_back(i);
  }
  return act;
}

SubgradientPolytope PiecewiseConvexMax::subgradient_polytope(const Eigen::VectorXd& x,
                                                             double act_tol) const {
  SubgradientPolytope out;
  out.point = x;
  out.active = active_pieces(x, act_tol);
  for (int i : out.active) out.vertices.push_back(piece_gradient(i, x));
  const auto pv = geometry::polytope_volume(out.vertices);
  out.affine_hull_dim = pv.affine_hull_dim;
  out.volume_in_hull = pv.volume_in_hull;
  return out;
}

numerics::ScalarFn PiecewiseConvexMax::as_fn() const {
  return [this](const Eigen::VectorXd& x) { return value(x); };
}

double eval_max(const PiecewiseConvexMax& f, const Eigen::VectorXd& x) { return f.value(x); }

// ---------------------------------------------------------------------------
// Perspective power
// ---------------------------------------------------------------------------

SmoothConvexBase perspective_power(const SmoothConvexBase& g_chart, int d, const Rational& alpha,
                                   std::uint64_t positivity_probe_seed) {
  if (d < 1) throw std::invalid_argument("perspective_power: d >= 1 required");
  if (g_chart.dim() != std::max(1, d - 1) && !(d == 1 && g_chart.dim() == 1))
    throw std::invalid_argument("perspective_power: chart dimension must be d-1 (1 accepted for d=1)");
  if (!(alpha > Rational(1))) throw std::invalid_argument("perspective_power: alpha > 1 required");
  const double a = alpha.to_double();
  const int chart_dim = d - 1;

  // d = 1: the cross-section is a point; accept a 1-d g evaluated at 0.
  auto chart_value = [g_chart, chart_dim](const Eigen::VectorXd& t, double rho) {
    if (chart_dim == 0) {
      Eigen::VectorXd z(1);
      z(0) = 0.0;
      return g_chart.value(z);
    }
    Eigen::VectorXd w(chart_dim);
    for (int i = 0; i < chart_dim; ++i) w(i) = t(i) / rho;
    return g_chart.value(w);
  };

  {  // positivity probe on the simplex
    auto rng = numerics::make_rng(positivity_probe_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 64; ++trial) {
      Eigen::VectorXd t(d);
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        t(i) = -std::log(std::max(uni(rng), 1e-12));
        s += t(i);
      }
      t /= s;
      if (chart_value(t, 1.0) <= 0.0)
        throw std::domain_error("perspective_power: g must be positive on the cross-section");
    }
  }

  auto eval = [chart_value, a, d](const Eigen::VectorXd& t) {
    if (t.size() != d) throw std::invalid_argument("perspective_power: dimension mismatch");
    const double rho = t.sum();
    if (rho <= 0.0) throw std::domain_error("perspective_power: sum(t) must be positive");
    return std::pow(rho * chart_value(t, rho), a);
  };
  return SmoothConvexBase(d, eval, {}, {}, alpha);
}

// ---------------------------------------------------------------------------
// Lower convex envelope
// ---------------------------------------------------------------------------

namespace {

std::size_t flat_index(const std::vector<int>& shape, const std::vector<int>& idx) {
  std::size_t f = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) f = f * static_cast<std::size_t>(shape[a]) + static_cast<std::size_t>(idx[a]);
  return f;
}

// Exact lower hull of 1-d samples (monotone chain on the epigraph).
std::vector<double> envelope_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  std::vector<int> hull;
  auto cross = [&](int a, int b, int c) {
    return (xs[b] - xs[a]) * (ys[c] - ys[a]) - (ys[b] - ys[a]) * (xs[c] - xs[a]);
  };
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0) hull.pop_back();
    hull.push_back(i);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() - 1 && xs[hull[seg + 1]] <= xs[i]) ++seg;
    const int a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
    if (a == b) {
      out[static_cast<std::size_t>(i)] = ys[a];
    } else {
      const double lam = (xs[i] - xs[a]) / (xs[b] - xs[a]);
      out[static_cast<std::size_t>(i)] = ys[a] + lam * (ys[b] - ys[a]);
    }
  }
  return out;
}

}  // namespace

double EnvelopeFunction::node_value(const std::vector<int>& idx) const {
  return values[flat_index(shape, idx)];
}

double EnvelopeFunction::value(const Eigen::VectorXd& w) const {
  const int dim = static_cast<int>(shape.size());
  std::vector<int> base(dim);
  std::vector<double> frac(dim);
  for (int a = 0; a < dim; ++a) {
    const double step = (hi(a) - lo(a)) / (shape[a] - 1);
    double u = (w(a) - lo(a)) / step;
    u = std::clamp(u, 0.0, static_cast<double>(shape[a] - 1));
    base[a] = std::min(shape[a] - 2, static_cast<int>(std::floor(u)));
    if (shape[a] == 1) base[a] = 0;
    frac[a] = u - base[a];
  }
  double acc = 0.0;
  const int corners = 1 << dim;
  std::vector<int> idx(dim);
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = base[a] + bit;
      wgt *= bit ? frac[a] : (1.0 - frac[a]);
    }
    if (wgt != 0.0) acc += wgt * values[flat_index(shape, idx)];
  }
  return acc;
}

EnvelopeFunction lower_convex_envelope(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                       const std::vector<int>& shape,
                                       const std::vector<double>& values) {
  const int dim = static_cast<int>(shape.size());
  if (dim < 1 || dim > 3) throw std::invalid_argument("lower_convex_envelope: dimension must be in [1,3]");
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 2) throw std::invalid_argument("lower_convex_envelope: need >= 2 nodes per axis");
    total *= static_cast<std::size_t>(shape[a]);
  }
  if (values.size() != total) throw std::invalid_argument("lower_convex_envelope: grid size mismatch");

  EnvelopeFunction env;
  env.lo = lo;
  env.hi = hi;
  env.shape = shape;
  env.input = values;
  env.values = values;

  if (dim == 1) {
    std::vector<double> xs(static_cast<std::size_t>(shape[0]));
    for (int i = 0; i < shape[0]; ++i) xs[static_cast<std::size_t>(i)] = lo(0) + (hi(0) - lo(0)) * i / (shape[0] - 1);
    env.values = envelope_1d(xs, values);
    return env;
  }

  // Midpoint convexification over all symmetric grid direction pairs, iterated
  // to a fixed point. The result is the largest grid function below the input
  // that is midpoint-convex along every grid direction.
  std::vector<std::vector<int>> dirs;
  {
    std::vector<int> offs(dim, 0);
    std::function<void(int)> gen = [&](int axis) {
      if (axis == dim) {
        int first = 0;
        while (first < dim && offs[first] == 0) ++first;
        if (first == dim || offs[first] < 0) return;  // canonical orientation only
        dirs.push_back(offs);
        return;
      }
      for (int o = -(shape[axis] - 1); o <= shape[axis] - 1; ++o) {
        offs[axis] = o;
        gen(axis + 1);
      }
    };
    gen(0);
  }

  std::vector<int> strides(dim);
  {
    int s = 1;
    for (int a = dim - 1; a >= 0; --a) {
      strides[a] = s;
      s *= shape[a];
    }
  }
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-15 * scale;

  std::vector<int> idx(dim);
  bool changed = true;
  int sweeps = 0;
  while (changed && sweeps < 300) {
    changed = false;
    ++sweeps;
    std::fill(idx.begin(), idx.end(), 0);
    std::size_t flat = 0;
    while (true) {
      for (const auto& offs : dirs) {
        long ip = 0, im = 0;
        bool ok = true;
        for (int a = 0; a < dim; ++a) {
          const int p = idx[a] + offs[a];
          const int m = idx[a] - offs[a];
          if (p < 0 || p >= shape[a] || m < 0 || m >= shape[a]) {
            ok = false;
            break;
          }
          ip += static_cast<long>(p) * strides[a];
          im += static_cast<long>(m) * strides[a];
        }
        if (!ok) continue;
        const double mid = 0.5 * (env.values[static_cast<std::size_t>(ip)] +
                                  env.values[static_cast<std::size_t>(im)]);
        if (env.values[flat] > mid + tol) {
          env.values[flat] = mid;
          changed = true;
        }
      }
      int a = dim - 1;
      for (; a >= 0; --a) {
        if (++idx[a] < shape[a]) break;
        idx[a] = 0;
      }
      if (a < 0) break;
      flat = 0;
      for (int b = 0; b < dim; ++b) flat += static_cast<std::size_t>(idx[b]) * static_cast<std::size_t>(strides[b]);
    }
  }
  return env;
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

namespace {

// Integral of (1 - |z|^2)^4 over the unit ball in R^n:
//   pi^{n/2} * Gamma(5) / Gamma(n/2 + 5).
double bump_normalization(int n) {
  return std::pow(M_PI, 0.5 * n) * 24.0 / std::tgamma(0.5 * n + 5.0);
}

}  // namespace

MollifiedFunction::MollifiedFunction(std::shared_ptr<const PiecewiseConvexMax> source,
                                     MollifierSpec spec, int k)
    : source_(std::move(source)), spec_(spec), k_(k) {
  if (k_ < 1) throw std::invalid_argument("mollify: k >= 1 required");
  dim_ = source_->ambient_dim();
  if (spec_.shift_dims < 0 || spec_.shift_dims > dim_)
    throw std::invalid_argument("mollify: shift_dims out of range");
  radius_k_ = spec_.radius / static_cast<double>(k_);
  center_ = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < spec_.shift_dims; ++i) center_(i) = spec_.shift_factor * radius_k_;
  if (spec_.require_strict_support && spec_.shift_dims > 0) {
    // Support must sit strictly inside O: min coordinate of support points.
    const double margin = spec_.shift_factor * radius_k_ - radius_k_;
    if (margin <= 0.0)
      throw std::invalid_argument("mollify: kernel support touches the boundary of O");
  }
  norm_const_ = bump_normalization(dim_) * std::pow(radius_k_, dim_);

  std::vector<double> n1, w1;
  numerics::gauss_legendre(spec_.quadrature, n1, w1);
  std::vector<int> idx(dim_, 0);
  Eigen::VectorXd y(dim_);
  raw_mass_ = 0.0;
  while (true) {
    double wq = 1.0;
    for (int a = 0; a < dim_; ++a) {
      y(a) = center_(a) + radius_k_ * n1[static_cast<std::size_t>(idx[a])];
      wq *= radius_k_ * w1[static_cast<std::size_t>(idx[a])];
    }
    const double kv = kernel_value(y);
    if (kv > 0.0) {
      nodes_.push_back(y);
      geo_weights_.push_back(wq);
      raw_mass_ += wq * kv;
    }
    int a = 0;
    for (; a < dim_; ++a) {
      if (++idx[a] < spec_.quadrature) break;
      idx[a] = 0;
    }
    if (a == dim_) break;
  }
  weights_.resize(nodes_.size());
  for (std::size_t q = 0; q < nodes_.size(); ++q)
    weights_[q] = geo_weights_[q] * kernel_value(nodes_[q]) / raw_mass_;
}

double MollifiedFunction::kernel_value(const Eigen::VectorXd& y) const {
  const double r2 = ((y - center_) / radius_k_).squaredNorm();
  if (r2 >= 1.0) return 0.0;
  const double u = 1.0 - r2;
  return u * u * u * u / norm_const_;
}

Eigen::VectorXd MollifiedFunction::kernel_gradient(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd z = (y - center_) / radius_k_;
  const double r2 = z.squaredNorm();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  if (r2 >= 1.0) return g;
  const double u = 1.0 - r2;
  g = (-8.0 * u * u * u / (norm_const_ * radius_k_)) * z;
  return g;
}

Eigen::MatrixXd MollifiedFunction::kernel_hessian(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd z = (y - center_) / radius_k_;
  const double r2 = z.squaredNorm();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
  if (r2 >= 1.0) return H;
  const double u = 1.0 - r2;
  const double c = norm_const_ * radius_k_ * radius_k_;
  H = (48.0 * u * u / c) * (z * z.transpose()) - (8.0 * u * u * u / c) * Eigen::MatrixXd::Identity(dim_, dim_);
  return H;
}

double MollifiedFunction::value(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes_.size(); ++q) acc += weights_[q] * source_->value(x - nodes_[q]);
  return acc;
}

namespace {

// Local affine predictor of f(x - y) in y around the kernel center. The
// kernel derivatives annihilate affine functions, so subtracting the
// predictor removes the large cancelling part of the integrand; without it
// the 1/r^{n+2} kernel-derivative scale wipes out the quadrature accuracy.
struct AffinePredictor {
  double f0;
  Eigen::VectorXd slope;  // d f(x - y) / d y at y = center
  double operator()(const Eigen::VectorXd& y, const Eigen::VectorXd& center) const {
    return f0 + slope.dot(y - center);
  }
};

AffinePredictor local_predictor(const convex::PiecewiseConvexMax& f, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& center, double radius) {
  AffinePredictor p;
  p.f0 = f.value(x - center);
  const int n = static_cast<int>(x.size());
  p.slope.resize(n);
  const double h = 0.5 * radius;
  Eigen::VectorXd y = center;
  for (int i = 0; i < n; ++i) {
    y(i) = center(i) + h;
    const double fp = f.value(x - y);
    y(i) = center(i) - h;
    const double fm = f.value(x - y);
    y(i) = center(i);
    p.slope(i) = (fp - fm) / (2.0 * h);
  }
  return p;
}

}  // namespace

Eigen::VectorXd MollifiedFunction::gradient(const Eigen::VectorXd& x) const {
  // d/dx (f * eta) = f * (grad eta); quadrature over the support.
  const auto pred = local_predictor(*source_, x, center_, radius_k_);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (std::size_t q = 0; q < nodes_.size(); ++q) {
    const double fv = source_->value(x - nodes_[q]) - pred(nodes_[q], center_);
    g += (geo_weights_[q] / raw_mass_) * fv * kernel_gradient(nodes_[q]);
  }
  // the affine part differentiates exactly
  g -= pred.slope;
  return g;
}

Eigen::MatrixXd MollifiedFunction::hessian(const Eigen::VectorXd& x) const {
  const auto pred = local_predictor(*source_, x, center_, radius_k_);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::size_t q = 0; q < nodes_.size(); ++q) {
    const double fv = source_->value(x - nodes_[q]) - pred(nodes_[q], center_);
    H += (geo_weights_[q] / raw_mass_) * fv * kernel_hessian(nodes_[q]);
  }
  return 0.5 * (H + H.transpose());
}

SmoothConvexBase MollifiedFunction::as_base() const {
  auto self = std::make_shared<MollifiedFunction>(*this);
  return SmoothConvexBase(
      dim_, [self](const Eigen::VectorXd& x) { return self->value(x); },
      [self](const Eigen::VectorXd& x) { return self->gradient(x); },
      [self](const Eigen::VectorXd& x) { return self->hessian(x); });
}

MollifiedFunction mollify(std::shared_ptr<const PiecewiseConvexMax> source, const MollifierSpec& spec,
                          int k) {
  return MollifiedFunction(std::move(source), spec, k);
}

// ---------------------------------------------------------------------------
// Verification helpers
// ---------------------------------------------------------------------------

ConvexityReport check_convexity(const numerics::ScalarFn& f, int dim, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, int trials, std::uint64_t seed,
                                double tol) {
  if (trials < 1) throw std::invalid_argument("check_convexity: trials >= 1 required");
  ConvexityReport rep;
  rep.trials = trials;
  auto rng = numerics::make_rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double scale = 1.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x(dim), y(dim);
    for (int a = 0; a < dim; ++a) {
      x(a) = lo(a) + (hi(a) - lo(a)) * uni(rng);
      y(a) = lo(a) + (hi(a) - lo(a)) * uni(rng);
    }
    const double fx = f(x), fy = f(y), fm = f(0.5 * (x + y));
    scale = std::max({scale, std::abs(fx), std::abs(fy)});
    const double viol = fm - 0.5 * (fx + fy);
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  rep.pass = rep.worst_violation <= tol * scale;
  return rep;
}

C1Report check_c1_across(const numerics::ScalarFn& f, int dim,
                         const std::vector<Eigen::VectorXd>& probes, double h0, double tol,
                         std::uint64_t seed, int extra_directions) {
  C1Report rep;
  std::vector<Eigen::VectorXd> dirs;
  dirs.push_back(Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim)));
  auto rng = numerics::make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(dirs.size()) < 1 + extra_directions) {
    Eigen::VectorXd v(dim);
    for (int a = 0; a < dim; ++a) v(a) = gauss(rng);
    if (v.sum() < 0) v = -v;
    if (v.sum() < 0.3 * v.norm()) continue;  // keep a real transversal component
    dirs.push_back(v / v.norm());
  }
  for (const auto& p : probes) {
    if (std::abs(p.sum()) > 1e-9 * (1.0 + p.norm()))
      throw std::invalid_argument("check_c1_across: probes must lie on {sum t = 0}");
    double probe_worst = 0.0;
    for (const auto& v : dirs) {
      double gaps[3];
      for (int level = 0; level < 3; ++level) {
        const double h = h0 / std::pow(2.0, level);
        const double dp = numerics::one_sided_directional(f, p, v, h);
        const double dm = -numerics::one_sided_directional(f, p, -v, h);
        gaps[level] = dp - dm;
        rep.worst_raw_gap = std::max(rep.worst_raw_gap, std::abs(gaps[level]));
      }
      double extrap = numerics::aitken_limit(gaps[0], gaps[1], gaps[2]);
      if (std::abs(gaps[2]) < 1e-9) extrap = gaps[2];
      probe_worst = std::max(probe_worst, std::abs(extrap));
    }
    rep.probe_gaps.push_back(probe_worst);
    rep.extrapolated_gap = std::max(rep.extrapolated_gap, probe_worst);
  }
  rep.pass = rep.extrapolated_gap <= tol;
  return rep;
}

HomogeneityReport check_homogeneity(const numerics::ScalarFn& f, int dim, double alpha,
                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int trials,
                                    std::uint64_t seed, double tol) {
  HomogeneityReport rep;
  auto rng = numerics::make_rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) x(a) = lo(a) + (hi(a) - lo(a)) * uni(rng);
    const double fx = f(x);
    for (double lam : {0.5, 2.0}) {
      const double defect = std::abs(f(lam * x) - std::pow(lam, alpha) * fx) / (1.0 + std::abs(fx));
      rep.worst_defect = std::max(rep.worst_defect, defect);
    }
  }
  rep.pass = rep.worst_defect <= tol;
  return rep;
}

}  // namespace ansatzlab::convex
