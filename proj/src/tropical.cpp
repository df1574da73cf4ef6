#include "ansatzlab/tropical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace ansatzlab::tropical {

// ---------------------------------------------------------------------------
// Model construction
// ---------------------------------------------------------------------------

long TropicalModel::a() const {
  long acc = 0;
  for (const auto& c : cells) {
    if (c.contains_delta) acc += c.multiplicity;
  }
  return acc;
}

TropicalModel enumerate_cells(int m, int n, int d,
                              const std::map<std::vector<int>, int>& multiplicities) {
  if (m < n) throw std::invalid_argument("enumerate_cells: m >= n required");
  if (d < 1 || d >= n) throw std::invalid_argument("enumerate_cells: 1 <= d < n required");
  TropicalModel model;
  model.m = m;
  model.n = n;
  model.d = d;
  const int N1 = m + d + 1;
  std::vector<int> comb(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = i;
  auto next_comb = [&]() {
    int i = n - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == N1 - n + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    return true;
  };
  do {
    Cell cell;
    cell.J = comb;
    auto it = multiplicities.find(cell.J);
    cell.multiplicity = it == multiplicities.end() ? 1 : it->second;
    if (cell.multiplicity < 1) throw std::invalid_argument("enumerate_cells: multiplicities must be >= 1");
    int anchor = -1;
    for (int j = 0; j <= m; ++j) {
      if (!std::binary_search(cell.J.begin(), cell.J.end(), j)) {
        anchor = j;
        break;
      }
    }
    cell.anchor = anchor;
    int dist_present = 0;
    for (int idx : cell.J) {
      if (idx > m) ++dist_present;
    }
    cell.contains_delta = (dist_present == d);
    model.cells.push_back(std::move(cell));
  } while (next_comb());
  return model;
}

Rational constant_c(const TropicalModel& model) {
  const long a = model.a();
  if (a < 1) throw std::domain_error("constant_c: no cell contains the skeleton");
  return Rational(factorial_i64(model.n - model.d), a);
}

// ---------------------------------------------------------------------------
// v and restrictions
// ---------------------------------------------------------------------------

convex::PiecewiseConvexMax build_v(std::shared_ptr<const convex::SmoothConvexBase> u_extended, int m,
                                   int d) {
  if (m < 1 || d < 1) throw std::invalid_argument("build_v: m, d >= 1 required");
  if (u_extended->dim() != d) throw std::invalid_argument("build_v: extension dimension must be d");
  {  // probe diagonal monotonicity; both forms of v rely on it
    auto rng = numerics::make_rng(41);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int s = 0; s < 48; ++s) {
      Eigen::VectorXd t(d);
      for (int i = 0; i < d; ++i) t(i) = uni(rng);
      if (t.sum() <= 0.0) continue;
      if (u_extended->gradient(t).sum() < -1e-7)
        throw std::domain_error("build_v: extension is not diagonally nondecreasing at a probe");
    }
  }
  const int N1 = m + d + 1;
  std::vector<convex::AffinePiece> pieces;
  pieces.reserve(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    convex::AffinePiece p;
    p.map = Eigen::MatrixXd::Zero(d, N1);
    for (int i = 0; i < d; ++i) {
      p.map(i, m + 1 + i) = 1.0;
      p.map(i, j) -= 1.0;
    }
    p.offset = Eigen::VectorXd::Zero(d);
    p.base = u_extended;
    p.label = "piece_" + std::to_string(j);
    pieces.push_back(std::move(p));
  }
  return convex::PiecewiseConvexMax(N1, std::move(pieces));
}

double eval_v_inner(const convex::SmoothConvexBase& u_extended, int m, int d,
                    const Eigen::VectorXd& x) {
  double mn = x(0);
  for (int j = 1; j <= m; ++j) mn = std::min(mn, x(j));
  Eigen::VectorXd arg(d);
  for (int i = 0; i < d; ++i) arg(i) = x(m + 1 + i) - mn;
  return u_extended.value(arg);
}

Eigen::VectorXd CellRestriction::embed(const Eigen::VectorXd& xL) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m + d + 1);
  for (std::size_t s = 0; s < coords.size(); ++s) x(coords[s]) = xL(static_cast<int>(s));
  return x;
}

CellRestriction cell_restriction(std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                                 const TropicalModel& model, const Cell& cell) {
  if (static_cast<int>(cell.J.size()) != model.n)
    throw std::invalid_argument("cell_restriction: |J| must equal n");
  if (cell.anchor < 0 || cell.anchor > model.m ||
      std::binary_search(cell.J.begin(), cell.J.end(), cell.anchor))
    throw std::invalid_argument("cell_restriction: inconsistent anchor");
  CellRestriction out;
  out.cell = cell;
  out.m = model.m;
  out.n = model.n;
  out.d = model.d;
  out.coords = cell.J;
  for (std::size_t s = 0; s < out.coords.size(); ++s) {
    if (out.coords[s] <= model.m) {
      out.anchor_slots.push_back(static_cast<int>(s));
    } else {
      out.dist_slots.push_back(static_cast<int>(s));
    }
  }
  out.r = static_cast<int>(out.dist_slots.size());
  auto slot_of = [&](int idx) -> int {
    auto it = std::lower_bound(out.coords.begin(), out.coords.end(), idx);
    if (it == out.coords.end() || *it != idx) return -1;
    return static_cast<int>(it - out.coords.begin());
  };
  const int n = model.n, d = model.d, m = model.m;
  std::vector<convex::AffinePiece> pieces;
  // U_k pieces: one per primed index in J.
  for (int s : out.anchor_slots) {
    const int j = out.coords[static_cast<std::size_t>(s)];
    convex::AffinePiece p;
    p.map = Eigen::MatrixXd::Zero(d, n);
    for (int i = 0; i < d; ++i) {
      const int ds = slot_of(m + 1 + i);
      if (ds >= 0) p.map(i, ds) += 1.0;
      p.map(i, s) -= 1.0;
    }
    p.offset = Eigen::VectorXd::Zero(d);
    p.base = u_extended;
    p.label = "U_" + std::to_string(j);
    pieces.push_back(std::move(p));
  }
  // The anchor-class piece U.
  {
    convex::AffinePiece p;
    p.map = Eigen::MatrixXd::Zero(d, n);
    for (int i = 0; i < d; ++i) {
      const int ds = slot_of(m + 1 + i);
      if (ds >= 0) p.map(i, ds) += 1.0;
    }
    p.offset = Eigen::VectorXd::Zero(d);
    p.base = u_extended;
    p.label = "U";
    pieces.push_back(std::move(p));
  }
  out.f = convex::PiecewiseConvexMax(n, std::move(pieces));
  return out;
}

// ---------------------------------------------------------------------------
// Step 4 classification
// ---------------------------------------------------------------------------

ClassifyResult step4_classify(const CellRestriction& restriction, const Eigen::VectorXd& p,
                              double act_tol) {
  ClassifyResult res;
  res.active = restriction.f.active_pieces(p, act_tol);
  const int total = restriction.f.piece_count();
  if (static_cast<int>(res.active.size()) < total) {
    res.tag = Step4Case::Case12;
  } else {
    res.tag = (restriction.r == restriction.d) ? Step4Case::Case4 : Step4Case::Case3;
  }
  double worst_anchor = 0.0;
  for (int s : restriction.anchor_slots) worst_anchor = std::max(worst_anchor, std::abs(p(s)));
  res.on_delta_closure = worst_anchor <= 1e-6 * (1.0 + p.norm()) + 10.0 * act_tol;
  return res;
}

// ---------------------------------------------------------------------------
// Adaptive box quadrature of max(det D^2 f, 0)
// ---------------------------------------------------------------------------

namespace {

using HessFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

double gl2_mass(const HessFn& hess, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double acc = 0.0;
  numerics::tensor_gauss_legendre(lo, hi, 2, [&](const Eigen::VectorXd& p, double w) {
    acc += w * std::max(hess(p).determinant(), 0.0);
  });
  return acc;
}

double adaptive_mass(const HessFn& hess, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     double tol, int depth);

// Axis edges geometrically clustered toward 0, where the mollified kink band
// of width ~feature lives; a plain adaptive split would miss it entirely.
std::vector<double> graded_axis_edges(double lo, double hi, double feature) {
  std::vector<double> edges{lo, hi};
  if (feature > 0.0) {
    for (double p = feature; p < hi; p *= 2.0) {
      if (p > lo) edges.push_back(p);
    }
    for (double p = -feature; p > lo; p *= 2.0) {
      if (p < hi) edges.push_back(p);
    }
    if (lo < 0.0 && hi > 0.0) edges.push_back(0.0);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

// Integral of det^+ over the box, with panels graded toward the coordinate
// hyperplanes before the adaptive refinement takes over.
double mollified_box_mass(const HessFn& hess, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          double feature, double tol, int depth) {
  const int n = static_cast<int>(lo.size());
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(n));
  std::size_t panels = 1;
  for (int a = 0; a < n; ++a) {
    edges[static_cast<std::size_t>(a)] = graded_axis_edges(lo(a), hi(a), feature);
    panels *= edges[static_cast<std::size_t>(a)].size() - 1;
  }
  double acc = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Eigen::VectorXd plo(n), phi(n);
    for (int a = 0; a < n; ++a) {
      plo(a) = edges[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      phi(a) = edges[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) + 1];
    }
    acc += adaptive_mass(hess, plo, phi, tol / static_cast<double>(panels), depth);
    int a = 0;
    for (; a < n; ++a) {
      if (++idx[static_cast<std::size_t>(a)] <
          static_cast<int>(edges[static_cast<std::size_t>(a)].size()) - 1)
        break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
    if (a == n) break;
  }
  return acc;
}

double adaptive_mass(const HessFn& hess, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     double tol, int depth) {
  const int n = static_cast<int>(lo.size());
  const double coarse = gl2_mass(hess, lo, hi);
  double fine = 0.0;
  const int children = 1 << n;
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> boxes;
  boxes.reserve(static_cast<std::size_t>(children));
  for (int c = 0; c < children; ++c) {
    Eigen::VectorXd clo(n), chi(n);
    for (int a = 0; a < n; ++a) {
      const double mid = 0.5 * (lo(a) + hi(a));
      if ((c >> a) & 1) {
        clo(a) = mid;
        chi(a) = hi(a);
      } else {
        clo(a) = lo(a);
        chi(a) = mid;
      }
    }
    boxes.emplace_back(clo, chi);
  }
  for (const auto& b : boxes) fine += gl2_mass(hess, b.first, b.second);
  if (depth <= 0 || std::abs(fine - coarse) <= tol) return fine;
  double acc = 0.0;
  for (const auto& b : boxes) acc += adaptive_mass(hess, b.first, b.second, tol / children * 2.0, depth - 1);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Step 4 verification
// ---------------------------------------------------------------------------

namespace {

measure::OrthotopeRegion slab_box(const CellRestriction& restr, const measure::OrthotopeRegion& R,
                                  double delta) {
  const int n = restr.n;
  Eigen::VectorXd lo(n), hi(n);
  for (int s : restr.anchor_slots) {
    lo(s) = 0.0;
    hi(s) = delta;
  }
  for (int s : restr.dist_slots) {
    const int i = restr.coords[static_cast<std::size_t>(s)] - restr.m - 1;  // distinguished index
    lo(s) = R.lo(i);
    hi(s) = R.hi(i);
  }
  return measure::OrthotopeRegion::box(lo, hi);
}

double slab_mass(const CellRestriction& restr, const measure::OrthotopeRegion& box,
                 const Step4Config& cfg, std::uint64_t stream, double* err_out) {
  if (restr.n <= 3 && !cfg.force_mollified_path) {
    measure::OracleConfig ocfg;
    ocfg.samples_per_axis = cfg.samples_per_axis;
    ocfg.dual_resolution = cfg.dual_resolution;
    ocfg.seed = numerics::splitmix64(cfg.seed ^ stream);
    ocfg.rasterize_degenerate = true;
    ocfg.auto_cells_per_axis = restr.n == 3 ? 110 : 360;
    auto est = measure::ma_measure_oracle(restr.f, box, ocfg);
    if (err_out) *err_out = est.error_bound;
    return est.mass;
  }
  // Cells of dimension n > 3: analytic path on the mollified restriction.
  auto src = std::make_shared<convex::PiecewiseConvexMax>(restr.f);
  convex::MollifierSpec spec;
  spec.radius = cfg.mollify_radius;
  spec.shift_dims = restr.n - restr.r;
  spec.quadrature = 8;
  convex::MollifiedFunction fk(src, spec, cfg.mollify_k);
  auto hess = [&fk](const Eigen::VectorXd& p) { return fk.hessian(p); };
  const double mass =
      mollified_box_mass(hess, box.lo, box.hi, fk.kernel_radius(), 1e-5, 7);
  if (err_out) *err_out = 0.05 * mass + 1e-6;
  return mass;
}

}  // namespace

Step4Report verify_step4(const TropicalModel& model,
                         std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                         const measure::OrthotopeRegion& R, const Step4Config& cfg) {
  R.validate();
  if (R.dim() != model.d) throw std::invalid_argument("verify_step4: R must be a box in Delta coordinates");
  if (!(R.lo.minCoeff() > 0.0)) throw std::invalid_argument("verify_step4: R must sit in relint(Delta)");
  Step4Report rep;
  rep.c = constant_c(model);
  rep.a = model.a();
  rep.total_rel_tol = cfg.rel_tol;
  const double lebR = R.volume();
  const double per_cell_expected = rep.c.to_double() / static_cast<double>(factorial_i64(model.n - model.d)) * lebR;

  rep.total = 0.0;
  for (std::size_t ci = 0; ci < model.cells.size(); ++ci) {
    const auto& cell = model.cells[ci];
    CellMassReport cm;
    cm.cell = cell;
    auto restr = cell_restriction(u_extended, model, cell);
    double err_fine = 0.0, err_coarse = 0.0;
    cm.mass = slab_mass(restr, slab_box(restr, R, cfg.delta_fine), cfg, 2 * ci, &err_fine);
    cm.mass_coarse = slab_mass(restr, slab_box(restr, R, cfg.delta), cfg, 2 * ci + 1, &err_coarse);
    cm.error_bound = err_fine;
    cm.expected = cell.contains_delta ? per_cell_expected : 0.0;
    if (cell.contains_delta) {
      cm.pass = std::abs(cm.mass - cm.expected) <= cfg.rel_tol * cm.expected + 0.5 * cm.error_bound;
    } else {
      cm.pass = cm.mass <= cfg.eps_abs_factor * lebR;
    }
    rep.total += cm.mass * cell.multiplicity;
    rep.cells.push_back(std::move(cm));
  }
  rep.expected_total = lebR;
  rep.all_cells_pass = std::all_of(rep.cells.begin(), rep.cells.end(),
                                   [](const CellMassReport& c) { return c.pass; });
  rep.total_pass = std::abs(rep.total - rep.expected_total) <= cfg.rel_tol * rep.expected_total;
  return rep;
}

GlobalMassReport verify_global_mass(const TropicalModel& model,
                                    std::shared_ptr<const convex::SmoothConvexBase> u_extended,
                                    const measure::OrthotopeRegion& R, const Step4Config& cfg) {
  const auto rep = verify_step4(model, u_extended, R, cfg);
  GlobalMassReport out;
  out.total = rep.total;
  out.expected_total = rep.expected_total;
  out.total_pass = rep.total_pass;
  out.c = rep.c;
  out.a = rep.a;
  out.count_identity_exact =
      Rational(out.a) * out.c == Rational(factorial_i64(model.n - model.d));
  return out;
}

// ---------------------------------------------------------------------------
// Step 5: mollification no-leak
// ---------------------------------------------------------------------------

std::vector<LeakRow> mollification_leak(const CellRestriction& restriction,
                                        const std::vector<int>& k_list, const LeakConfig& cfg) {
  if (!restriction.cell.contains_delta)
    throw std::invalid_argument("mollification_leak: the cell must contain the skeleton");
  if (k_list.empty()) throw std::invalid_argument("mollification_leak: k_list must be nonempty");
  const int n = restriction.n;
  const int shift_dims = n - restriction.d;
  if (cfg.dist_lo.size() != restriction.d || cfg.dist_hi.size() != restriction.d)
    throw std::invalid_argument("mollification_leak: dist window must have d entries");

  auto src = std::make_shared<convex::PiecewiseConvexMax>(restriction.f);
  const double W = cfg.box_halfwidth;

  // Off-sigma decomposition of the window into orthant boxes: at least one
  // coordinate on its negative side.
  struct SubBox {
    Eigen::VectorXd lo, hi;
    bool meets_v = false;  // some distinguished coordinate <= 0
  };
  std::vector<SubBox> sub_boxes;
  const int combos = 1 << n;
  for (int c = 1; c < combos; ++c) {  // c encodes which coordinates are negative
    SubBox sb;
    sb.lo.resize(n);
    sb.hi.resize(n);
    for (int a = 0; a < n; ++a) {
      const bool neg = (c >> a) & 1;
      const bool is_dist = std::find(restriction.dist_slots.begin(), restriction.dist_slots.end(), a) !=
                           restriction.dist_slots.end();
      if (neg) {
        sb.lo(a) = -W;
        sb.hi(a) = 0.0;
        if (is_dist) sb.meets_v = true;
      } else if (is_dist) {
        const int di = static_cast<int>(std::find(restriction.dist_slots.begin(),
                                                  restriction.dist_slots.end(), a) -
                                        restriction.dist_slots.begin());
        sb.lo(a) = std::max(0.0, cfg.dist_lo(di) - 0.2);
        sb.hi(a) = cfg.dist_hi(di);
      } else {
        sb.lo(a) = 0.0;
        sb.hi(a) = W;
      }
    }
    sub_boxes.push_back(std::move(sb));
  }

  std::vector<LeakRow> rows;
  for (int k : k_list) {
    LeakRow row;
    row.k = k;
    convex::MollifierSpec spec;
    spec.radius = cfg.kernel_radius;
    spec.shift_dims = shift_dims;
    spec.quadrature = cfg.kernel_quadrature;
    convex::MollifiedFunction fk(src, spec, k);
    const double feature = fk.kernel_radius();
    auto hess = [&fk](const Eigen::VectorXd& p) { return fk.hessian(p); };
    for (const auto& sb : sub_boxes) {
      const double mass = mollified_box_mass(hess, sb.lo, sb.hi, feature, cfg.quad_tol, cfg.max_depth);
      row.leak_mass += mass;
      if (sb.meets_v) row.v_region_mass += mass;
    }
    {
      Eigen::VectorXd lo(n), hi(n);
      for (int s : restriction.anchor_slots) {
        lo(s) = 0.0;
        hi(s) = std::min(W, 0.2);
      }
      for (std::size_t di = 0; di < restriction.dist_slots.size(); ++di) {
        lo(restriction.dist_slots[di]) = cfg.dist_lo(static_cast<int>(di));
        hi(restriction.dist_slots[di]) = cfg.dist_hi(static_cast<int>(di));
      }
      row.sigma_box_mass = mollified_box_mass(hess, lo, hi, feature, cfg.quad_tol, cfg.max_depth);
    }
    if (cfg.centered_comparison) {
      convex::MollifierSpec cspec = spec;
      cspec.shift_factor = 0.0;
      cspec.require_strict_support = false;
      convex::MollifiedFunction ck(src, cspec, k);
      auto chess = [&ck](const Eigen::VectorXd& p) { return ck.hessian(p); };
      for (const auto& sb : sub_boxes)
        row.centered_leak += mollified_box_mass(chess, sb.lo, sb.hi, feature, cfg.quad_tol, cfg.max_depth);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reduced-dependence check
// ---------------------------------------------------------------------------

ReducedDependenceReport reduced_dependence_check(const CellRestriction& restriction,
                                                 const measure::OrthotopeRegion& u_box,
                                                 std::uint64_t seed, int k, double kernel_radius) {
  ReducedDependenceReport rep;
  const int n = restriction.n;
  const int pieces_w = restriction.f.piece_count() - 1;  // drop the anchor-class piece U
  if (pieces_w < 1) throw std::invalid_argument("reduced_dependence_check: no U_k pieces");

  std::vector<convex::AffinePiece> wp;
  for (int i = 0; i < pieces_w; ++i) wp.push_back(restriction.f.piece(i));
  convex::PiecewiseConvexMax w(n, wp);

  {  // rank of the span of all piece linear forms
    Eigen::MatrixXd rows(pieces_w * restriction.d, n);
    for (int i = 0; i < pieces_w; ++i) rows.middleRows(i * restriction.d, restriction.d) = w.piece(i).map;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
    lu.setThreshold(1e-9);
    rep.gradient_span_rank = static_cast<int>(lu.rank());
  }

  {  // pointwise identity on U samples shifted through the kernel support
    auto rng = numerics::make_rng(seed);
    std::uniform_real_distribution<double> ua(-0.8, 0.5);
    std::uniform_real_distribution<double> ud(0.4, 1.3);
    std::uniform_real_distribution<double> uball(-1.0, 1.0);
    const double rk = kernel_radius / k;
    rep.identity_ok = true;
    int done = 0;
    while (done < 100) {
      Eigen::VectorXd x(n);
      bool some_neg = false;
      for (int s : restriction.anchor_slots) {
        x(s) = ua(rng);
        if (x(s) < -0.05) some_neg = true;
      }
      for (int s : restriction.dist_slots) x(s) = ud(rng);
      if (!some_neg) continue;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (int s : restriction.anchor_slots) y(s) = 2.0 * rk;
      for (int a = 0; a < n; ++a) y(a) += 0.9 * rk * uball(rng) / std::sqrt(static_cast<double>(n));
      const double v_val = restriction.f.value(x - y);
      const double w_val = w.value(x - y);
      const double gap = std::abs(v_val - w_val) / (1.0 + std::abs(v_val));
      rep.worst_identity_gap = std::max(rep.worst_identity_gap, gap);
      if (gap > 1e-12) rep.identity_ok = false;
      ++done;
    }
  }

  {  // analytic MA mass of the mollified w over the box in U
    auto src = std::make_shared<convex::PiecewiseConvexMax>(w);
    convex::MollifierSpec spec;
    spec.radius = kernel_radius;
    spec.shift_dims = n - restriction.r;
    spec.quadrature = 8;
    convex::MollifiedFunction wk(src, spec, k);
    auto hess = [&wk](const Eigen::VectorXd& p) { return wk.hessian(p); };
    rep.mollified_mass = mollified_box_mass(hess, u_box.lo, u_box.hi, wk.kernel_radius(), 1e-9, 6);
  }
  rep.pass = rep.gradient_span_rank == restriction.n - 1 && rep.identity_ok &&
             rep.mollified_mass <= 1e-8;
  return rep;
}

// ---------------------------------------------------------------------------
// Cellular decomposition checks
// ---------------------------------------------------------------------------

namespace {

std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Faces of the octant over index set S, capped at dimension cap: all subsets
// of S with size <= cap (the origin is the empty face).
std::set<std::vector<int>> face_set(const std::vector<int>& S, int cap) {
  std::set<std::vector<int>> faces;
  const int k = static_cast<int>(S.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<int> f;
    for (int i = 0; i < k; ++i) {
      if ((mask >> i) & 1) f.push_back(S[static_cast<std::size_t>(i)]);
    }
    if (static_cast<int>(f.size()) <= cap) faces.insert(std::move(f));
  }
  return faces;
}

}  // namespace

DecompositionReport check_decomposition(const TropicalModel& model, std::uint64_t seed,
                                        long max_pairs) {
  DecompositionReport rep;
  auto fail = [&rep](std::string msg) { rep.failures.push_back(std::move(msg)); };

  if (model.m < model.n) fail("model requires m >= n");
  if (model.d < 1 || model.d >= model.n) fail("model requires 1 <= d < n");

  std::set<std::vector<int>> seen;
  for (std::size_t ci = 0; ci < model.cells.size(); ++ci) {
    const auto& cell = model.cells[ci];
    const std::string tag = "cell #" + std::to_string(ci);
    if (static_cast<int>(cell.J.size()) != model.n) {
      fail(tag + ": |J| != n");
      continue;
    }
    if (!std::is_sorted(cell.J.begin(), cell.J.end()) ||
        std::adjacent_find(cell.J.begin(), cell.J.end()) != cell.J.end()) {
      fail(tag + ": J must be a sorted set");
      continue;
    }
    if (cell.J.front() < 0 || cell.J.back() > model.m + model.d) {
      fail(tag + ": J index out of range");
      continue;
    }
    if (cell.multiplicity < 1) fail(tag + ": multiplicity must be >= 1");
    int expected_anchor = -1;
    for (int j = 0; j <= model.m; ++j) {
      if (!std::binary_search(cell.J.begin(), cell.J.end(), j)) {
        expected_anchor = j;
        break;
      }
    }
    if (cell.anchor != expected_anchor)
      fail(tag + ": anchor must be the smallest primed index outside J");
    int dist_present = 0;
    for (int idx : cell.J) {
      if (idx > model.m) ++dist_present;
    }
    if (cell.contains_delta != (dist_present == model.d)) fail(tag + ": contains_delta flag is wrong");
    if (!seen.insert(cell.J).second) fail(tag + ": duplicate index set (use multiplicity instead)");
  }

  // Coverage: every size-n subset of sections appears.
  {
    const int N1 = model.section_count();
    const long expected = binomial_i64(N1, model.n);
    if (static_cast<long>(seen.size()) != expected)
      fail("coverage: expected " + std::to_string(expected) + " distinct cells, found " +
           std::to_string(seen.size()));
  }
  if (model.a() < 1) fail("no cell contains the skeleton (a = 0)");

  // Intersection rules on branch-expanded cells, as face-lattice identities:
  // for distinct records, C_{I,l} cap C_{J,l'} must be the union of the faces
  // C_{I'} over nonempty I' inside I cap J of size <= n-1 (plus the apex);
  // branches of one record glue along the proper faces of their shared octant.
  if (rep.failures.empty()) {
    auto rng = numerics::make_rng(seed);
    const std::size_t cell_count = model.cells.size();
    std::uniform_int_distribution<std::size_t> pick(0, cell_count - 1);
    auto check_pair = [&](std::size_t i, std::size_t j) {
      ++rep.pairs_checked;
      const Cell& A = model.cells[i];
      const Cell& B = model.cells[j];
      if (i == j) {
        // Branches over the same J: intersection is the proper face lattice.
        const auto glue = face_set(A.J, model.n - 1);
        if (static_cast<long>(glue.size()) != (1L << model.n) - 1)
          fail("branch gluing of cell #" + std::to_string(i) + " is not the proper face lattice");
        return;
      }
      const auto inter = sorted_intersection(A.J, B.J);
      if (static_cast<int>(inter.size()) >= model.n) {
        fail("cells #" + std::to_string(i) + " and #" + std::to_string(j) +
             " share a full index set; top cells may only meet in a proper face");
        return;
      }
      // Point-model intersection (subsets of both index sets) against the
      // union-of-subcell formula; both are computed from the stored data.
      const auto lhs = face_set(inter, model.n - 1);
      std::set<std::vector<int>> rhs;
      rhs.insert(std::vector<int>{});  // the apex lies in every cell
      const auto subsets = face_set(inter, static_cast<int>(inter.size()));
      for (const auto& sub : subsets) {
        if (sub.empty() || static_cast<int>(sub.size()) > model.n - 1) continue;
        for (const auto& f : face_set(sub, model.n - 1)) rhs.insert(f);
      }
      if (lhs != rhs)
        fail("intersection of cells #" + std::to_string(i) + " and #" + std::to_string(j) +
             " is not the stated union of faces");
    };
    const bool exhaustive = static_cast<long>(cell_count) * (static_cast<long>(cell_count) + 1) / 2 <= max_pairs;
    if (exhaustive) {
      for (std::size_t i = 0; i < cell_count; ++i) {
        for (std::size_t j = i; j < cell_count; ++j) {
          if (i == j && model.cells[i].multiplicity < 2) continue;
          check_pair(i, j);
        }
      }
    } else {
      for (long b = 0; b < max_pairs; ++b) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (i == j && model.cells[i].multiplicity < 2) continue;
        check_pair(i, j);
      }
    }
  }

  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace ansatzlab::tropical
