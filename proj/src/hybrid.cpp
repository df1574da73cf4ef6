#include "ansatzlab/hybrid.hpp"

#include <cmath>
#include <stdexcept>

namespace ansatzlab::hybrid {

void ModelHybridPotential::validate() const {
  if (leading.empty()) throw std::invalid_argument("ModelHybridPotential: needs at least one slope");
  for (double l : leading) {
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("ModelHybridPotential: slopes must be finite and >= 0");
  }
  const double a = alpha.to_double();
  for (const auto& c : corrections) {
    if (!std::isfinite(c.bound)) throw std::invalid_argument("ModelHybridPotential: bound must be finite");
    if (!(c.exponent < a))
      throw std::invalid_argument("ModelHybridPotential: correction exponents must stay below alpha");
  }
  if (!u || u->dim() != d()) throw std::invalid_argument("ModelHybridPotential: u must live on R^d");
}

RescaledLimitResult rescaled_limit(const ModelHybridPotential& model,
                                   const std::vector<double>& t_list, const PathSampler& path,
                                   double tol) {
  model.validate();
  if (t_list.empty()) throw std::invalid_argument("rescaled_limit: t_list must be nonempty");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0 && t_list[i] < 1.0))
      throw std::invalid_argument("rescaled_limit: t must lie in (0,1)");
    if (i > 0 && !(t_list[i] < t_list[i - 1]))
      throw std::invalid_argument("rescaled_limit: t_list must be strictly decreasing");
  }
  const int d = model.d();
  const double a = model.alpha.to_double();
  Eigen::VectorXd ell(d);
  for (int i = 0; i < d; ++i) ell(i) = model.leading[static_cast<std::size_t>(i)];

  RescaledLimitResult out;
  out.target = model.u->value(ell);
  for (double t : t_list) {
    const double lam = -std::log(t);
    Eigen::VectorXd z = path ? path(t, lam) : Eigen::VectorXd(ell * lam);
    if (z.size() != d) throw std::invalid_argument("rescaled_limit: path sampler dimension mismatch");
    double psi = model.u->value(z);
    int sign = 1;
    for (const auto& c : model.corrections) {
      psi += sign * c.bound * std::pow(lam, c.exponent);
      sign = -sign;
    }
    RescaledRow row;
    row.t = t;
    row.ratio = psi / std::pow(lam, a);
    row.target = out.target;
    row.abs_error = std::abs(row.ratio - out.target);
    out.rows.push_back(row);
  }
  out.final_error = out.rows.back().abs_error;
  out.converged = out.final_error <= tol;
  return out;
}

Rational degree_from_measure_scaling(int n, int d) {
  if (d < 1 || d > n) throw std::invalid_argument("degree_from_measure_scaling: 1 <= d <= n required");
  const Rational alpha(n + d, n);
  if (Rational(n) * (alpha - Rational(1)) != Rational(d))
    throw std::logic_error("degree_from_measure_scaling: scaling identity failed");
  return alpha;
}

OdakaResult odaka_check(int n, int d) {
  if (d < 1 || d > n) throw std::invalid_argument("odaka_check: 1 <= d <= n required");
  OdakaResult res;
  res.vd = Rational(2LL * n * d, n + d);
  res.inequality_holds = Rational(d) <= res.vd;
  res.equality = Rational(d) == res.vd;
  res.equivalence_with_d_le_n = res.inequality_holds == (d <= n);
  if (res.equality != (d == n)) throw std::logic_error("odaka_check: equality case mismatch");
  return res;
}

NormalizationFactors measure_normalization(int n, int d, double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("measure_normalization: t must lie in (0,1)");
  if (d < 1 || d > n) throw std::invalid_argument("measure_normalization: 1 <= d <= n required");
  const double lam = -std::log(t);
  NormalizationFactors f;
  f.measure_factor = std::pow(2.0 * M_PI * lam, -static_cast<double>(d));
  f.potential_factor = std::pow(lam, -static_cast<double>(d) / n);
  const Rational alpha = Rational(1) + Rational(d, n);
  f.consistency_exact = Rational(n) * (alpha - Rational(1)) == Rational(d);
  return f;
}

}  // namespace ansatzlab::hybrid
