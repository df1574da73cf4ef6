#include "ansatzlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ansatzlab::geometry {

namespace {

double data_scale(const std::vector<Eigen::VectorXd>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return 1.0 + s;
}

std::vector<Eigen::VectorXd> dedupe(const std::vector<Eigen::VectorXd>& pts, double tol) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

double simplex_volume(const std::vector<Eigen::VectorXd>& pts, int dim) {
  Eigen::MatrixXd M(dim, dim);
  for (int j = 0; j < dim; ++j) M.col(j) = pts[j + 1] - pts[0];
  return std::abs(M.determinant()) / static_cast<double>([&] {
           double f = 1.0;
           for (int i = 2; i <= dim; ++i) f *= i;
           return f;
         }());
}

struct Facet {
  Eigen::VectorXd normal;  // unit
  double offset = 0.0;     // normal . x = offset on the facet
  std::vector<int> members;
};

// Supporting facets of conv(points) in R^dim, found by testing all size-dim
// subsets. Vertex counts here are small, so the combinatorial sweep is fine.
std::vector<Facet> hull_facets(const std::vector<Eigen::VectorXd>& pts, int dim, double tol) {
  const int k = static_cast<int>(pts.size());
  std::vector<Facet> facets;
  std::vector<int> comb(dim);
  for (int i = 0; i < dim; ++i) comb[i] = i;
  auto next_comb = [&]() {
    int i = dim - 1;
    while (i >= 0 && comb[i] == k - dim + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < dim; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd M(dim, dim - 1);
    for (int j = 1; j < dim; ++j) M.col(j - 1) = pts[comb[j]] - pts[comb[0]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    if (dim > 1 && svd.singularValues()(dim - 2) <= tol) continue;  // degenerate subset
    Eigen::VectorXd nrm = svd.matrixU().col(dim - 1);
    const double off = nrm.dot(pts[comb[0]]);
    int side_pos = 0, side_neg = 0;
    for (int i = 0; i < k; ++i) {
      const double s = nrm.dot(pts[i]) - off;
      if (s > tol) ++side_pos;
      if (s < -tol) ++side_neg;
    }
    if (side_pos > 0 && side_neg > 0) continue;
    Facet f;
    f.normal = (side_pos > 0) ? Eigen::VectorXd(-nrm) : nrm;
    f.offset = f.normal.dot(pts[comb[0]]);
    for (int i = 0; i < k; ++i) {
      if (std::abs(f.normal.dot(pts[i]) - f.offset) <= tol) f.members.push_back(i);
    }
    bool seen = false;
    for (const auto& g : facets) {
      if (g.members == f.members) {
        seen = true;
        break;
      }
    }
    if (!seen) facets.push_back(std::move(f));
  } while (next_comb());
  return facets;
}

double hull_volume_impl(const std::vector<Eigen::VectorXd>& pts_in, int dim, double tol) {
  std::vector<Eigen::VectorXd> pts = dedupe(pts_in, tol);
  const int k = static_cast<int>(pts.size());
  if (k <= dim) return 0.0;
  if (dim == 0) return 0.0;
  if (dim == 1) {
    double lo = pts[0](0), hi = pts[0](0);
    for (const auto& p : pts) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    return hi - lo;
  }
  if (k == dim + 1) return simplex_volume(pts, dim);

  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(k);

  double vol = 0.0;
  for (const auto& f : hull_facets(pts, dim, tol)) {
    const double height = std::abs(f.normal.dot(centroid) - f.offset);
    if (height <= tol) continue;
    // Project facet members into the facet hyperplane and recurse.
    Eigen::MatrixXd M(dim, static_cast<int>(f.members.size()));
    for (std::size_t j = 0; j < f.members.size(); ++j)
      M.col(static_cast<int>(j)) = pts[f.members[j]] - pts[f.members[0]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    Eigen::MatrixXd B = svd.matrixU().leftCols(dim - 1);
    std::vector<Eigen::VectorXd> proj;
    proj.reserve(f.members.size());
    for (int idx : f.members) proj.push_back(B.transpose() * (pts[idx] - pts[f.members[0]]));
    const double base = hull_volume_impl(proj, dim - 1, tol);
    vol += base * height / static_cast<double>(dim);
  }
  return vol;
}

}  // namespace

int affine_hull(const std::vector<Eigen::VectorXd>& points, Eigen::VectorXd& base,
                Eigen::MatrixXd& basis, double rel_tol) {
  if (points.empty()) throw std::invalid_argument("affine_hull: no points");
  const int amb = static_cast<int>(points[0].size());
  base = points[0];
  Eigen::MatrixXd M(amb, static_cast<int>(points.size()) - 1);
  for (std::size_t j = 1; j < points.size(); ++j) M.col(static_cast<int>(j - 1)) = points[j] - base;
  if (M.cols() == 0) {
    basis = Eigen::MatrixXd::Zero(amb, 0);
    return 0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
  const double tol = rel_tol * data_scale(points) * std::sqrt(static_cast<double>(amb));
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++rank;
  }
  basis = svd.matrixU().leftCols(rank);
  return rank;
}

PolytopeVolume polytope_volume(const std::vector<Eigen::VectorXd>& vertices) {
  PolytopeVolume out;
  if (vertices.empty()) return out;
  const double tol = 1e-9 * data_scale(vertices);
  std::vector<Eigen::VectorXd> pts = dedupe(vertices, tol);
  Eigen::VectorXd base;
  Eigen::MatrixXd basis;
  out.affine_hull_dim = affine_hull(pts, base, basis, 1e-9);
  if (out.affine_hull_dim == 0) {
    out.volume_in_hull = 0.0;
    return out;
  }
  std::vector<Eigen::VectorXd> proj;
  proj.reserve(pts.size());
  for (const auto& p : pts) proj.push_back(basis.transpose() * (p - base));
  out.volume_in_hull = hull_volume_impl(proj, out.affine_hull_dim, tol);
  return out;
}

double hull_volume_full_dim(const std::vector<Eigen::VectorXd>& points, int dim) {
  return hull_volume_impl(points, dim, 1e-9 * data_scale(points));
}

std::vector<std::vector<int>> triangulate_hull(const std::vector<Eigen::VectorXd>& points, int dim) {
  const double tol = 1e-9 * data_scale(points);
  const int k = static_cast<int>(points.size());
  std::vector<std::vector<int>> simplices;
  if (k < dim + 1) return simplices;
  if (k == dim + 1) {
    std::vector<int> all(k);
    for (int i = 0; i < k; ++i) all[i] = i;
    simplices.push_back(all);
    return simplices;
  }
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(k);

  // Fan from the vertex farthest from the centroid across all facets that do
  // not contain it; facets are recursively triangulated.
  int apex = 0;
  double best = -1.0;
  for (int i = 0; i < k; ++i) {
    const double d = (points[i] - centroid).norm();
    if (d > best) {
      best = d;
      apex = i;
    }
  }
  for (const auto& f : hull_facets(points, dim, tol)) {
    if (std::find(f.members.begin(), f.members.end(), apex) != f.members.end()) continue;
    if (dim == 1) {
      simplices.push_back({apex, f.members[0]});
      continue;
    }
    Eigen::MatrixXd M(dim, static_cast<int>(f.members.size()));
    for (std::size_t j = 0; j < f.members.size(); ++j)
      M.col(static_cast<int>(j)) = points[f.members[j]] - points[f.members[0]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    Eigen::MatrixXd B = svd.matrixU().leftCols(dim - 1);
    std::vector<Eigen::VectorXd> proj;
    for (int idx : f.members) proj.push_back(B.transpose() * (points[idx] - points[f.members[0]]));
    for (const auto& sub : triangulate_hull(proj, dim - 1)) {
      std::vector<int> s;
      s.push_back(apex);
      for (int local : sub) s.push_back(f.members[local]);
      simplices.push_back(std::move(s));
    }
  }
  return simplices;
}

SimplexTester::SimplexTester(const std::vector<Eigen::VectorXd>& pts, const std::vector<int>& simplex) {
  const int dim = static_cast<int>(pts[simplex[0]].size());
  if (static_cast<int>(simplex.size()) != dim + 1) return;
  v0_ = pts[simplex[0]];
  Eigen::MatrixXd M(dim, dim);
  for (int j = 0; j < dim; ++j) M.col(j) = pts[simplex[j + 1]] - v0_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) return;
  inv_ = lu.inverse();
  valid_ = true;
}

bool SimplexTester::contains(const Eigen::VectorXd& p, double tol) const {
  if (!valid_) return false;
  Eigen::VectorXd lam = inv_ * (p - v0_);
  double sum = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol) return false;
    sum += lam(i);
  }
  return sum <= 1.0 + tol;
}

}  // namespace ansatzlab::geometry
