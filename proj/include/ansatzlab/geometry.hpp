#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ansatzlab::geometry {

struct PolytopeVolume {
  int affine_hull_dim = 0;
  // Volume inside the affine hull (0 for a single point). Coordinates are
  // treated as integral-affine, so axis-aligned hulls measure in lattice units.
  double volume_in_hull = 0.0;
};

// Hull dimension and volume of conv(vertices). Exact determinant formula for
// simplices; facet/centroid fan for general hulls (small vertex counts).
PolytopeVolume polytope_volume(const std::vector<Eigen::VectorXd>& vertices);

// Volume of conv(points) where points are full-dimensional in R^dim.
double hull_volume_full_dim(const std::vector<Eigen::VectorXd>& points, int dim);

// Splits conv(points) (full-dimensional in R^dim) into simplices, each given
// as dim+1 vertex indices into `points`.
std::vector<std::vector<int>> triangulate_hull(const std::vector<Eigen::VectorXd>& points, int dim);

// Barycentric point-in-simplex test with slack tol.
class SimplexTester {
 public:
  SimplexTester(const std::vector<Eigen::VectorXd>& pts, const std::vector<int>& simplex);
  bool contains(const Eigen::VectorXd& p, double tol = 1e-10) const;
  bool valid() const { return valid_; }

 private:
  Eigen::VectorXd v0_;
  Eigen::MatrixXd inv_;
  bool valid_ = false;
};

// Orthonormal basis of the affine hull of the given points, with base point.
// Returns the hull dimension; basis columns span the hull directions.
int affine_hull(const std::vector<Eigen::VectorXd>& points, Eigen::VectorXd& base,
                Eigen::MatrixXd& basis, double rel_tol = 1e-9);

}  // namespace ansatzlab::geometry
