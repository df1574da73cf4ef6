#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace ansatzlab::numerics {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

// ---------------------------------------------------------------------------
// Seeded randomness. Parallel consumers derive per-stream seeds so results do
// not depend on scheduling.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// ---------------------------------------------------------------------------
// Finite differences. Defaults follow h = 1e-4 * (1 + |x|) with one level of
// Richardson extrapolation.
// ---------------------------------------------------------------------------

double fd_step(const Eigen::VectorXd& x, double scale = 1e-4);

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h = 0.0,
                            bool richardson = true);
Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::VectorXd& x, double h = 0.0,
                           bool richardson = true);

// Second-order one-sided difference of f along direction v at x.
double one_sided_directional(const ScalarFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                             double h);

// Aitken delta-squared extrapolation of a 3-term sequence; returns the fitted
// limit (exact for geometric sequences).
double aitken_limit(double g0, double g1, double g2);

// ---------------------------------------------------------------------------
// Quadrature.
// ---------------------------------------------------------------------------

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-product Gauss-Legendre over a box; calls fn(point, weight).
void tensor_gauss_legendre(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int q_per_axis,
                           const std::function<void(const Eigen::VectorXd&, double)>& fn);

// ---------------------------------------------------------------------------
// Deterministic parallelism: fixed chunking independent of the thread cap, so
// reductions merged in chunk order give identical results for any cap.
// ---------------------------------------------------------------------------

int thread_cap();
void set_thread_cap(int cap);

// Runs fn(chunk_index, begin, end) over [0, n) split into a fixed number of
// chunks; chunks may run on different threads but outputs should be written
// to per-chunk slots.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Locale-independent float formatting, 17 significant digits (round-trips).
// ---------------------------------------------------------------------------

std::string fmt17(double v);

}  // namespace ansatzlab::numerics
