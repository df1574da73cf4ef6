#include "ansatzlab/measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace ansatzlab::measure {

double OrthotopeRegion::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi(i) - lo(i);
  return v;
}

void OrthotopeRegion::validate() const {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("OrthotopeRegion: bad box");
  for (int i = 0; i < dim(); ++i) {
    if (!(lo(i) <= hi(i))) throw std::invalid_argument("OrthotopeRegion: lo <= hi required");
  }
}

OrthotopeRegion OrthotopeRegion::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  OrthotopeRegion r{lo, hi};
  r.validate();
  return r;
}

// ---------------------------------------------------------------------------
// Analytic mass
// ---------------------------------------------------------------------------

namespace {

double det_integral(const convex::SmoothConvexBase& f, const OrthotopeRegion& E, int panels,
                    int gauss) {
  const int n = E.dim();
  std::vector<double> gl_n, gl_w;
  numerics::gauss_legendre(gauss, gl_n, gl_w);
  std::vector<int> pidx(static_cast<std::size_t>(n), 0);
  double acc = 0.0;
  while (true) {
    Eigen::VectorXd plo(n), phi(n);
    for (int a = 0; a < n; ++a) {
      const double step = (E.hi(a) - E.lo(a)) / panels;
      plo(a) = E.lo(a) + step * pidx[static_cast<std::size_t>(a)];
      phi(a) = plo(a) + step;
    }
    std::vector<int> qidx(static_cast<std::size_t>(n), 0);
    while (true) {
      Eigen::VectorXd p(n);
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        const double half = 0.5 * (phi(a) - plo(a));
        p(a) = plo(a) + half * (gl_n[static_cast<std::size_t>(qidx[static_cast<std::size_t>(a)])] + 1.0);
        w *= half * gl_w[static_cast<std::size_t>(qidx[static_cast<std::size_t>(a)])];
      }
      const double det = f.hessian(p).determinant();
      acc += w * std::max(det, 0.0);
      int a = 0;
      for (; a < n; ++a) {
        if (++qidx[static_cast<std::size_t>(a)] < gauss) break;
        qidx[static_cast<std::size_t>(a)] = 0;
      }
      if (a == n) break;
    }
    int a = 0;
    for (; a < n; ++a) {
      if (++pidx[static_cast<std::size_t>(a)] < panels) break;
      pidx[static_cast<std::size_t>(a)] = 0;
    }
    if (a == n) break;
  }
  return acc;
}

}  // namespace

MeasureEstimate ma_measure_analytic(const convex::SmoothConvexBase& f, const OrthotopeRegion& E,
                                    int panels_per_axis, int gauss_per_panel) {
  E.validate();
  if (f.dim() != E.dim()) throw std::invalid_argument("ma_measure_analytic: dimension mismatch");
  MeasureEstimate est;
  est.region = E;
  est.method = "analytic-integral";
  const double coarse = det_integral(f, E, std::max(1, panels_per_axis / 2), gauss_per_panel);
  const double fine = det_integral(f, E, panels_per_axis, gauss_per_panel);
  est.mass = fine;
  est.error_bound = std::abs(fine - coarse) + 1e-12 * (1.0 + std::abs(fine));
  est.samples = static_cast<long>(std::pow(panels_per_axis * gauss_per_panel, E.dim()));
  est.resolution = (E.hi - E.lo).maxCoeff() / panels_per_axis;
  return est;
}

// ---------------------------------------------------------------------------
// Rasterization oracle
// ---------------------------------------------------------------------------

namespace {

struct DualGrid {
  Eigen::VectorXd lo;
  double h = 0.0;
  std::vector<int> shape;
  std::vector<std::atomic<std::uint8_t>>* cells = nullptr;

  long cell_index(const std::vector<int>& idx) const {
    long f = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) f = f * shape[a] + idx[a];
    return f;
  }
  bool locate(const Eigen::VectorXd& p, std::vector<int>& idx) const {
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const int i = static_cast<int>(std::floor((p(static_cast<int>(a)) - lo(static_cast<int>(a))) / h));
      if (i < 0 || i >= shape[a]) return false;
      idx[a] = i;
    }
    return true;
  }
  void mark(const Eigen::VectorXd& p) const {
    std::vector<int> idx(shape.size());
    if (locate(p, idx)) (*cells)[static_cast<std::size_t>(cell_index(idx))].store(1, std::memory_order_relaxed);
  }
};

void rasterize_body(const DualGrid& grid, const std::vector<Eigen::VectorXd>& verts, int n) {
  const auto simplices = geometry::triangulate_hull(verts, n);
  for (const auto& s : simplices) {
    geometry::SimplexTester tester(verts, s);
    if (!tester.valid()) continue;
    Eigen::VectorXd blo = verts[static_cast<std::size_t>(s[0])], bhi = blo;
    for (int vi : s) {
      blo = blo.cwiseMin(verts[static_cast<std::size_t>(vi)]);
      bhi = bhi.cwiseMax(verts[static_cast<std::size_t>(vi)]);
    }
    std::vector<int> ilo(static_cast<std::size_t>(n)), ihi(static_cast<std::size_t>(n));
    bool empty = false;
    for (int a = 0; a < n; ++a) {
      ilo[static_cast<std::size_t>(a)] =
          std::max(0, static_cast<int>(std::floor((blo(a) - grid.lo(a)) / grid.h)));
      ihi[static_cast<std::size_t>(a)] = std::min(
          grid.shape[static_cast<std::size_t>(a)] - 1,
          static_cast<int>(std::floor((bhi(a) - grid.lo(a)) / grid.h)));
      if (ilo[static_cast<std::size_t>(a)] > ihi[static_cast<std::size_t>(a)]) empty = true;
    }
    if (empty) continue;
    std::vector<int> idx = ilo;
    Eigen::VectorXd center(n);
    while (true) {
      for (int a = 0; a < n; ++a) center(a) = grid.lo(a) + (idx[static_cast<std::size_t>(a)] + 0.5) * grid.h;
      if (tester.contains(center, 1e-12))
        (*grid.cells)[static_cast<std::size_t>(grid.cell_index(idx))].store(1, std::memory_order_relaxed);
      int a = 0;
      for (; a < n; ++a) {
        if (++idx[static_cast<std::size_t>(a)] <= ihi[static_cast<std::size_t>(a)]) break;
        idx[static_cast<std::size_t>(a)] = ilo[static_cast<std::size_t>(a)];
      }
      if (a == n) break;
    }
  }
}

void rasterize_degenerate(const DualGrid& grid, const std::vector<Eigen::VectorXd>& verts,
                          int hull_dim) {
  Eigen::VectorXd base;
  Eigen::MatrixXd basis;
  geometry::affine_hull(verts, base, basis, 1e-9);
  if (basis.cols() < hull_dim) return;
  std::vector<Eigen::VectorXd> proj;
  proj.reserve(verts.size());
  for (const auto& v : verts) proj.push_back(basis.transpose() * (v - base));
  if (hull_dim == 1) {
    double lo = proj[0](0), hi = proj[0](0);
    for (const auto& p : proj) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) / (0.5 * grid.h))) + 1);
    for (int s = 0; s <= steps; ++s) {
      const double u = lo + (hi - lo) * s / steps;
      grid.mark(base + basis.col(0) * u);
    }
    return;
  }
  // hull_dim == 2 inside a 3-d dual space: sample triangles barycentrically.
  const auto tris = geometry::triangulate_hull(proj, 2);
  for (const auto& tri : tris) {
    const Eigen::VectorXd A = proj[static_cast<std::size_t>(tri[0])];
    const Eigen::VectorXd B = proj[static_cast<std::size_t>(tri[1])];
    const Eigen::VectorXd C = proj[static_cast<std::size_t>(tri[2])];
    const double extent = std::max((B - A).norm(), (C - A).norm());
    const int steps = std::max(2, static_cast<int>(std::ceil(extent / (0.5 * grid.h))));
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps - i; ++j) {
        const double u = static_cast<double>(i) / steps;
        const double v = static_cast<double>(j) / steps;
        const Eigen::VectorXd p2 = A + u * (B - A) + v * (C - A);
        grid.mark(base + basis * p2);
      }
    }
  }
}

}  // namespace

MeasureEstimate ma_measure_oracle(const convex::PiecewiseConvexMax& f, const OrthotopeRegion& E,
                                  const OracleConfig& cfg) {
  E.validate();
  const int n = f.ambient_dim();
  if (n != E.dim()) throw std::invalid_argument("ma_measure_oracle: dimension mismatch");
  if (n > 3) throw ScopeError("ma_measure_oracle: rasterization scope is n <= 3");

  const int spa = cfg.samples_per_axis > 0 ? cfg.samples_per_axis : (n == 1 ? 2048 : n == 2 ? 128 : 40);
  double min_spacing = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const double sp = (E.hi(a) - E.lo(a)) / spa;
    if (sp > 0.0) min_spacing = std::min(min_spacing, sp);
  }
  if (!std::isfinite(min_spacing)) min_spacing = 0.0;

  // Pass 1: sample points, polytopes, and the dual bounding box.
  long total_samples = 1;
  for (int a = 0; a < n; ++a) total_samples *= spa;
  std::vector<convex::SubgradientPolytope> polys(static_cast<std::size_t>(total_samples));

  auto sample_point = [&](long s) {
    Eigen::VectorXd x(n);
    auto rng = numerics::make_rng(cfg.seed, static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    long rem = s;
    for (int a = 0; a < n; ++a) {
      const long i = rem % spa;
      rem /= spa;
      const double step = (E.hi(a) - E.lo(a)) / spa;
      x(a) = E.lo(a) + (static_cast<double>(i) + uni(rng)) * step;
    }
    return x;
  };

  numerics::parallel_chunks(static_cast<std::size_t>(total_samples),
                            [&](std::size_t, std::size_t b, std::size_t e) {
                              for (std::size_t s = b; s < e; ++s) {
                                const Eigen::VectorXd x = sample_point(static_cast<long>(s));
                                double grad_scale = 1.0;
                                for (int i = 0; i < f.piece_count(); ++i)
                                  grad_scale = std::max(grad_scale, f.piece_gradient(i, x).norm());
                                const double act =
                                    cfg.act_tol_abs + f.default_act_tol(x) +
                                    cfg.act_tol_factor * min_spacing * grad_scale;
                                polys[s] = f.subgradient_polytope(x, act);
                              }
                            });

  Eigen::VectorXd dlo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd dhi = -dlo;
  for (const auto& p : polys) {
    for (const auto& v : p.vertices) {
      dlo = dlo.cwiseMin(v);
      dhi = dhi.cwiseMax(v);
    }
  }
  if (!dlo.allFinite()) {
    MeasureEstimate est;
    est.region = E;
    est.method = "gradient-image-rasterization";
    return est;
  }

  double h = cfg.dual_resolution;
  if (h <= 0.0) {
    const double extent = std::max((dhi - dlo).maxCoeff(), 1e-9);
    h = extent / (cfg.auto_cells_per_axis > 0 ? cfg.auto_cells_per_axis : (n == 3 ? 96.0 : 220.0));
  }
  dlo.array() -= 2.0 * h;
  dhi.array() += 2.0 * h;
  std::vector<int> shape(static_cast<std::size_t>(n));
  long cells_total = 1;
  for (int a = 0; a < n; ++a) {
    shape[static_cast<std::size_t>(a)] = std::max(1, static_cast<int>(std::ceil((dhi(a) - dlo(a)) / h)));
    cells_total *= shape[static_cast<std::size_t>(a)];
  }
  while (cells_total > 40'000'000) {  // coarsen rather than exhaust memory
    h *= 1.5;
    cells_total = 1;
    for (int a = 0; a < n; ++a) {
      shape[static_cast<std::size_t>(a)] = std::max(1, static_cast<int>(std::ceil((dhi(a) - dlo(a)) / h)));
      cells_total *= shape[static_cast<std::size_t>(a)];
    }
  }
  std::vector<std::atomic<std::uint8_t>> cells(static_cast<std::size_t>(cells_total));
  for (auto& c : cells) c.store(0, std::memory_order_relaxed);
  DualGrid grid{dlo, h, shape, &cells};

  std::atomic<bool> touched_degenerate{false};
  numerics::parallel_chunks(polys.size(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const auto& poly = polys[s];
      if (poly.vertices.empty()) continue;
      if (poly.affine_hull_dim == n) {
        rasterize_body(grid, poly.vertices, n);
      } else if (poly.affine_hull_dim == 0) {
        grid.mark(poly.vertices[0]);
      } else if (cfg.rasterize_degenerate) {
        rasterize_degenerate(grid, poly.vertices, poly.affine_hull_dim);
        touched_degenerate.store(true, std::memory_order_relaxed);
      }
    }
  });

  long covered = 0;
  for (const auto& c : cells) covered += c.load(std::memory_order_relaxed);

  // Boundary cells of the covered set drive the resolution error term.
  long boundary = 0;
  {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (long f_idx = 0; f_idx < cells_total; ++f_idx) {
      if (cells[static_cast<std::size_t>(f_idx)].load(std::memory_order_relaxed)) {
        bool is_boundary = false;
        for (int a = 0; a < n && !is_boundary; ++a) {
          for (int dstep : {-1, 1}) {
            std::vector<int> nb = idx;
            nb[static_cast<std::size_t>(a)] += dstep;
            if (nb[static_cast<std::size_t>(a)] < 0 ||
                nb[static_cast<std::size_t>(a)] >= shape[static_cast<std::size_t>(a)]) {
              is_boundary = true;
              break;
            }
            if (!cells[static_cast<std::size_t>(grid.cell_index(nb))].load(std::memory_order_relaxed)) {
              is_boundary = true;
              break;
            }
          }
        }
        if (is_boundary) ++boundary;
      }
      int a = n - 1;
      for (; a >= 0; --a) {
        if (++idx[static_cast<std::size_t>(a)] < shape[static_cast<std::size_t>(a)]) break;
        idx[static_cast<std::size_t>(a)] = 0;
      }
    }
  }

  MeasureEstimate est;
  est.region = E;
  est.method = "gradient-image-rasterization";
  est.mass = static_cast<double>(covered) * std::pow(h, n);
  // Touch-based marking of lower-dimensional polytopes dilates the swept
  // region by about one cell layer; take half of it back out.
  if (touched_degenerate.load(std::memory_order_relaxed)) {
    est.mass = std::max(0.0, est.mass - 0.5 * static_cast<double>(boundary) * std::pow(h, n));
  }
  est.error_bound = 0.75 * static_cast<double>(boundary) * std::pow(h, n) + std::pow(h, n);
  est.samples = total_samples;
  est.resolution = h;
  return est;
}

// ---------------------------------------------------------------------------
// Softmax demo
// ---------------------------------------------------------------------------

void softmax_gradient(int k, double x, double y, double& p, double& q) {
  const double kx = k * x, ky = k * y;
  const double m = std::max({kx, ky, 0.0});
  const double ep = std::exp(kx - m), eq = std::exp(ky - m), e0 = std::exp(-m);
  const double S = ep + eq + e0;
  p = ep / S;
  q = eq / S;
}

double softmax_value(int k, double x, double y) {
  const double kx = k * x, ky = k * y;
  const double m = std::max({kx, ky, 0.0});
  return (m + std::log(std::exp(kx - m) + std::exp(ky - m) + std::exp(-m))) / k;
}

namespace {

// Area enclosed by the image of the box boundary under the gradient map,
// by the line integral (1/2) oint (p dq - q dp).
double softmax_image_area(int k, const OrthotopeRegion& E, int panels_per_unit) {
  struct Edge {
    double x0, y0, x1, y1;
  };
  const double ax = E.lo(0), ay = E.lo(1), bx = E.hi(0), by = E.hi(1);
  const Edge edges[4] = {{ax, ay, bx, ay}, {bx, ay, bx, by}, {bx, by, ax, by}, {ax, by, ax, ay}};
  std::vector<double> gn, gw;
  numerics::gauss_legendre(6, gn, gw);
  double area2 = 0.0;
  for (const auto& e : edges) {
    const double dx = e.x1 - e.x0, dy = e.y1 - e.y0;
    const double len = std::hypot(dx, dy);
    const int panels = std::max(32, static_cast<int>(std::ceil(len * panels_per_unit)));
    for (int pi = 0; pi < panels; ++pi) {
      const double s0 = static_cast<double>(pi) / panels, s1 = static_cast<double>(pi + 1) / panels;
      for (std::size_t qi = 0; qi < gn.size(); ++qi) {
        const double s = s0 + 0.5 * (s1 - s0) * (gn[qi] + 1.0);
        const double w = 0.5 * (s1 - s0) * gw[qi];
        const double x = e.x0 + dx * s, y = e.y0 + dy * s;
        double p, q;
        softmax_gradient(k, x, y, p, q);
        // dp/ds, dq/ds via the softmax Jacobian
        const double px = k * p * (1.0 - p), py = -k * p * q;
        const double qx = -k * p * q, qy = k * q * (1.0 - q);
        const double dps = px * dx + py * dy;
        const double dqs = qx * dx + qy * dy;
        area2 += w * (p * dqs - q * dps);
      }
    }
  }
  return 0.5 * std::abs(area2);
}

}  // namespace

SoftmaxTrapResult softmax_trap_demo(const std::vector<int>& k_list, const OrthotopeRegion& E) {
  if (k_list.empty()) throw std::invalid_argument("softmax_trap_demo: k_list must be nonempty");
  E.validate();
  if (E.dim() != 2) throw std::invalid_argument("softmax_trap_demo: E must be a planar box");
  SoftmaxTrapResult out;
  for (int k : k_list) {
    if (k < 1) throw std::invalid_argument("softmax_trap_demo: k >= 1 required");
    SoftmaxRow row;
    row.k = k;
    const int ppu = std::max(64, 6 * k);
    row.restricted_mass = softmax_image_area(k, E, ppu);
    row.restricted_error =
        std::abs(row.restricted_mass - softmax_image_area(k, E, std::max(32, ppu / 2))) + 1e-10;
    const double B = 1.0 + 30.0 / k + std::max(std::abs(E.lo.minCoeff()), std::abs(E.hi.maxCoeff()));
    OrthotopeRegion big = OrthotopeRegion::box(Eigen::Vector2d(-B, -B), Eigen::Vector2d(B, B));
    row.total_mass = softmax_image_area(k, big, ppu);
    row.total_error =
        std::abs(row.total_mass - softmax_image_area(k, big, std::max(32, ppu / 2))) + 1e-10;
    out.rows.push_back(row);
  }
  out.trend_increasing = out.rows.back().restricted_mass > out.rows.front().restricted_mass;
  return out;
}

// ---------------------------------------------------------------------------
// Polytope volumes
// ---------------------------------------------------------------------------

geometry::PolytopeVolume polytope_volume(const std::vector<Eigen::VectorXd>& vertices) {
  if (vertices.empty()) throw std::invalid_argument("polytope_volume: need at least one vertex");
  return geometry::polytope_volume(vertices);
}

HullVolumeReport hull_volume_linear_in_t(int n, const std::vector<Rational>& t_list) {
  if (n < 2) throw std::invalid_argument("hull_volume_linear_in_t: n >= 2 required");
  HullVolumeReport rep;
  rep.n = n;
  const Rational fact(factorial_i64(n));
  for (const auto& t : t_list) {
    if (!(t > Rational(0))) throw std::invalid_argument("hull_volume_linear_in_t: t > 0 required");
    HullVolumeRow row;
    row.t = t;
    // The vertices are 0 and t^{1/n} e_i; the simplex determinant telescopes
    // to prod_i t^{1/n} = t, so the exact volume is t / n!.
    row.exact_volume = t / fact;
    std::vector<Eigen::VectorXd> verts;
    verts.push_back(Eigen::VectorXd::Zero(n));
    const double leg = std::pow(t.to_double(), 1.0 / n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v(i) = leg;
      verts.push_back(v);
    }
    row.numeric_volume = geometry::polytope_volume(verts).volume_in_hull;
    rep.rows.push_back(row);
  }
  rep.linearity_exact = true;
  for (const auto& row : rep.rows) {
    const Rational doubled = Rational(2) * row.t / fact;
    if (doubled != Rational(2) * row.exact_volume) rep.linearity_exact = false;
  }
  return rep;
}

}  // namespace ansatzlab::measure
