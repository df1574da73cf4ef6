#include "ansatzlab/numerics.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <thread>

namespace ansatzlab::numerics {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51a2b3c4d5e6f708ULL)));
}

double fd_step(const Eigen::VectorXd& x, double scale) { return scale * (1.0 + x.norm()); }

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h, bool richardson) {
  const int n = static_cast<int>(x.size());
  if (h <= 0.0) h = fd_step(x);
  auto central = [&](double step) {
    Eigen::VectorXd g(n);
    Eigen::VectorXd xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
      xp(i) = x(i) + step;
      xm(i) = x(i) - step;
      g(i) = (f(xp) - f(xm)) / (2.0 * step);
      xp(i) = x(i);
      xm(i) = x(i);
    }
    return g;
  };
  Eigen::VectorXd g1 = central(h);
  if (!richardson) return g1;
  Eigen::VectorXd g2 = central(h / 2.0);
  return (4.0 * g2 - g1) / 3.0;
}

static Eigen::MatrixXd hessian_once(const ScalarFn& f, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  Eigen::VectorXd xt = x;
  for (int i = 0; i < n; ++i) {
    xt(i) = x(i) + h;
    const double fp = f(xt);
    xt(i) = x(i) - h;
    const double fm = f(xt);
    xt(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      xt(i) = x(i) + h;
      xt(j) = x(j) + h;
      const double fpp = f(xt);
      xt(j) = x(j) - h;
      const double fpm = f(xt);
      xt(i) = x(i) - h;
      const double fmm = f(xt);
      xt(j) = x(j) + h;
      const double fmp = f(xt);
      xt(i) = x(i);
      xt(j) = x(j);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return H;
}

Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::VectorXd& x, double h, bool richardson) {
  if (h <= 0.0) h = fd_step(x);
  Eigen::MatrixXd H1 = hessian_once(f, x, h);
  if (!richardson) return H1;
  Eigen::MatrixXd H2 = hessian_once(f, x, h / 2.0);
  return (4.0 * H2 - H1) / 3.0;
}

double one_sided_directional(const ScalarFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                             double h) {
  const double f0 = f(x);
  const double f1 = f(x + h * v);
  const double f2 = f(x + 2.0 * h * v);
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

double aitken_limit(double g0, double g1, double g2) {
  const double denom = g2 - 2.0 * g1 + g0;
  const double scale = std::abs(g0) + std::abs(g1) + std::abs(g2);
  if (std::abs(denom) <= 1e-14 * (1.0 + scale)) return g2;
  return g2 - (g2 - g1) * (g2 - g1) / denom;
}

void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: q >= 1 required");
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  const int m = (q + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < q; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = q * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[q - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[q - 1 - i] = weights[i];
  }
}

void tensor_gauss_legendre(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int q_per_axis,
                           const std::function<void(const Eigen::VectorXd&, double)>& fn) {
  const int dim = static_cast<int>(lo.size());
  std::vector<double> n1, w1;
  gauss_legendre(q_per_axis, n1, w1);
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd p(dim);
  while (true) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double half = 0.5 * (hi(a) - lo(a));
      p(a) = lo(a) + half * (n1[idx[a]] + 1.0);
      w *= half * w1[idx[a]];
    }
    fn(p, w);
    int a = 0;
    for (; a < dim; ++a) {
      if (++idx[a] < q_per_axis) break;
      idx[a] = 0;
    }
    if (a == dim) break;
  }
}

static std::atomic<int> g_thread_cap{0};

int thread_cap() {
  int cap = g_thread_cap.load();
  if (cap > 0) return cap;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void set_thread_cap(int cap) { g_thread_cap.store(cap); }

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  // Chunk count depends only on n, never on the thread cap.
  const std::size_t chunks = std::min<std::size_t>(n, 64);
  const std::size_t per = (n + chunks - 1) / chunks;
  const int cap = thread_cap();
  if (cap <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = c * per;
      const std::size_t e = std::min(n, b + per);
      if (b < e) fn(c, b, e);
    }
    return;
  }
  std::size_t c = 0;
  while (c < chunks) {
    std::vector<std::future<void>> batch;
    for (int t = 0; t < cap && c < chunks; ++t, ++c) {
      const std::size_t b = c * per;
      const std::size_t e = std::min(n, b + per);
      if (b >= e) continue;
      batch.push_back(std::async(std::launch::async, [&fn, c, b, e] { fn(c, b, e); }));
    }
    for (auto& f : batch) f.get();
  }
}

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ansatzlab::numerics
