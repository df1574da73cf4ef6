#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "ansatzlab/convex.hpp"
#include "ansatzlab/rational.hpp"

namespace ansatzlab::hybrid {

// Archimedean potentials are modeled by their decomposition only: a leading
// homogeneous term u(z_1..z_d) plus bounded corrections |term_j| <= B_j *
// (log 1/t)^{e_j} with e_j < alpha. That is exactly the information the
// hybrid continuity arguments consume.
struct CorrectionTerm {
  double bound = 0.0;
  double exponent = 0.0;  // must stay below alpha
};

struct ModelHybridPotential {
  Rational alpha{3, 2};
  std::vector<double> leading;  // limit slopes l_i >= 0
  std::vector<CorrectionTerm> corrections;
  std::shared_ptr<const convex::SmoothConvexBase> u;  // extended ansatz on R^d

  int d() const { return static_cast<int>(leading.size()); }
  void validate() const;
};

// z(t) with z_i / log(1/t) -> l_i; the default is the exact linear family.
using PathSampler = std::function<Eigen::VectorXd(double t, double log_inv_t)>;

struct RescaledRow {
  double t = 0.0;
  double ratio = 0.0;
  double target = 0.0;
  double abs_error = 0.0;
};

struct RescaledLimitResult {
  std::vector<RescaledRow> rows;
  double target = 0.0;
  double final_error = 0.0;
  bool converged = false;
};

RescaledLimitResult rescaled_limit(const ModelHybridPotential& model,
                                   const std::vector<double>& t_list,
                                   const PathSampler& path = {}, double tol = 1e-3);

// alpha = (n+d)/n, the unique exponent with n (alpha - 1) = d.
Rational degree_from_measure_scaling(int n, int d);

struct OdakaResult {
  Rational vd{0, 1};  // 2nd/(n+d)
  bool inequality_holds = false;
  bool equality = false;               // iff d = n
  bool equivalence_with_d_le_n = false;  // (d <= vd) <=> (d <= n), exact
};

OdakaResult odaka_check(int n, int d);

struct NormalizationFactors {
  double measure_factor = 0.0;    // (2 pi log 1/t)^{-d}
  double potential_factor = 0.0;  // (log 1/t)^{-d/n}
  bool consistency_exact = false; // n (alpha - 1) = d with alpha = 1 + d/n
};

NormalizationFactors measure_normalization(int n, int d, double t);

}  // namespace ansatzlab::hybrid
