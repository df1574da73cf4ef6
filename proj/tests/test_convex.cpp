#include <doctest.h>

#include "ansatzlab/ansatz.hpp"
#include "ansatzlab/convex.hpp"
#include "test_helpers.hpp"

using namespace ansatzlab;
using namespace test_helpers;

TEST_CASE("eval_max and active_pieces") {
  auto f = max_xy0();
  CHECK(convex::eval_max(f, vec({1, 2})) == 2.0);
  CHECK_THROWS(f.value(vec({1, 2, 3})));

  auto single = single_piece(identity_1d());
  CHECK(convex::eval_max(single, vec({5})) == 5.0);

  CHECK(f.active_pieces(vec({0, 0}), 0.0).size() == 3);
  auto act = f.active_pieces(vec({1, 2}), 0.0);
  REQUIRE(act.size() == 1);
  CHECK(f.piece(act[0]).label == "y");
  CHECK_THROWS(f.active_pieces(vec({0, 0}), -1.0));

  // shrinking act_tol never adds active pieces
  auto rng = numerics::make_rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd x = vec({uni(rng), uni(rng)});
    auto wide = f.active_pieces(x, 0.5);
    auto narrow = f.active_pieces(x, 0.05);
    for (int i : narrow) CHECK(std::find(wide.begin(), wide.end(), i) != wide.end());
    CHECK(narrow.size() <= wide.size());
  }
}

TEST_CASE("max of convex pieces is convex (property)") {
  auto f = max_xy0();
  auto rng = numerics::make_rng(11);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd x = vec({uni(rng), uni(rng)});
    Eigen::VectorXd y = vec({uni(rng), uni(rng)});
    const double lam = 0.5 * (1.0 + std::tanh(uni(rng)));
    const double scale = 1.0 + std::abs(f.value(x)) + std::abs(f.value(y));
    CHECK(f.value(lam * x + (1 - lam) * y) <= lam * f.value(x) + (1 - lam) * f.value(y) + 1e-12 * scale);
  }
}

TEST_CASE("subgradient polytopes") {
  auto f = max_xy0();
  SUBCASE("origin of max{x,y,0} carries the half simplex") {
    auto sp = f.subgradient_polytope(vec({0, 0}), 0.0);
    REQUIRE(sp.vertices.size() == 3);
    CHECK(sp.affine_hull_dim == 2);
    CHECK(sp.volume_in_hull == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("single smooth piece gives one vertex and volume zero") {
    Eigen::MatrixXd H(2, 2);
    H << 2, 0.5, 0.5, 1;
    auto g = single_piece(quadratic_base(H, Eigen::VectorXd::Zero(2)));
    auto sp = g.subgradient_polytope(vec({0.3, -0.7}), g.default_act_tol(vec({0.3, -0.7})));
    CHECK(sp.vertices.size() == 1);
    CHECK(sp.affine_hull_dim == 0);
    CHECK(sp.volume_in_hull == 0.0);
  }
  SUBCASE("restricted v on a skeleton cell: segment of length u'(X3)") {
    // d=1, n=2, u = (2t)^{3/2}; cell coordinates (X0, X3); pieces
    // u(X3 - X0) and u(X3); at p = (0, s) the polytope is the segment from
    // (-u'(s), u'(s)) to (0, u'(s)).
    auto u = ansatz::solve_closed_form_d1(2, 9.0);
    auto ext = ansatz::extend_to_rd(u);
    auto base = std::make_shared<convex::SmoothConvexBase>(ext.extended);
    std::vector<convex::AffinePiece> pieces(2);
    pieces[0].map = Eigen::MatrixXd::Zero(1, 2);
    pieces[0].map(0, 0) = -1.0;
    pieces[0].map(0, 1) = 1.0;
    pieces[0].offset = Eigen::VectorXd::Zero(1);
    pieces[0].base = base;
    pieces[1].map = Eigen::MatrixXd::Zero(1, 2);
    pieces[1].map(0, 1) = 1.0;
    pieces[1].offset = Eigen::VectorXd::Zero(1);
    pieces[1].base = base;
    convex::PiecewiseConvexMax vL(2, pieces);
    const double s = 0.8;
    const double uprime = u.closed_form_rep().d1(s);
    auto sp = vL.subgradient_polytope(vec({0.0, s}), vL.default_act_tol(vec({0.0, s})));
    REQUIRE(sp.vertices.size() == 2);
    CHECK(sp.affine_hull_dim == 1);
    CHECK(sp.volume_in_hull == doctest::Approx(uprime).epsilon(1e-9));
  }
}

TEST_CASE("perspective power") {
  SUBCASE("constant cross-section") {
    auto g1 = std::make_shared<convex::SmoothConvexBase>(
        1, [](const Eigen::VectorXd&) { return 1.0; });
    auto h = convex::perspective_power(*g1, 2, Rational(3, 2));
    CHECK(h.value(vec({1, 1})) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
    CHECK_THROWS(h.value(vec({-1, -1})));
  }
  SUBCASE("homogeneity is forced by the construction") {
    auto g = std::make_shared<convex::SmoothConvexBase>(
        1, [](const Eigen::VectorXd& w) { return 1.0 + 0.5 * w(0) * w(0); });
    auto h = convex::perspective_power(*g, 2, Rational(3, 2));
    auto rng = numerics::make_rng(3);
    std::uniform_real_distribution<double> uni(0.1, 2.0);
    for (int t = 0; t < 32; ++t) {
      Eigen::VectorXd x = vec({uni(rng), uni(rng)});
      CHECK(h.value(2.0 * x) == doctest::Approx(std::pow(2.0, 1.5) * h.value(x)).epsilon(1e-12));
      CHECK(h.value(0.5 * x) == doctest::Approx(std::pow(0.5, 1.5) * h.value(x)).epsilon(1e-12));
    }
    auto rep = convex::check_convexity([&h](const Eigen::VectorXd& x) { return h.value(x); }, 2,
                                       vec({0.05, 0.05}), vec({2, 2}), 400, 5, 1e-9);
    CHECK(rep.pass);
  }
  SUBCASE("recovers u from u^{1/alpha} on the cross-section (d=1, n=2)") {
    auto u = ansatz::solve_closed_form_d1(2, 9.0);
    const double u1 = u.value(vec({1.0}));
    auto g = std::make_shared<convex::SmoothConvexBase>(
        1, [u1](const Eigen::VectorXd&) { return std::pow(u1, 2.0 / 3.0); });
    auto h = convex::perspective_power(*g, 1, Rational(3, 2));
    auto rng = numerics::make_rng(9);
    std::uniform_real_distribution<double> uni(0.05, 8.0);
    for (int t = 0; t < 64; ++t) {
      Eigen::VectorXd x = vec({uni(rng)});
      CHECK(h.value(x) == doctest::Approx(u.value(x)).epsilon(1e-9));
    }
  }
  SUBCASE("nonpositive cross-section is rejected") {
    auto g = std::make_shared<convex::SmoothConvexBase>(
        1, [](const Eigen::VectorXd& w) { return w(0) - 0.5; });
    CHECK_THROWS(convex::perspective_power(*g, 2, Rational(3, 2)));
  }
}

TEST_CASE("lower convex envelope") {
  const int N = 201;
  Eigen::VectorXd lo = vec({-1.0}), hi = vec({1.0});
  std::vector<int> shape{N};
  auto xs = [&](int i) { return -1.0 + 2.0 * i / (N - 1); };

  SUBCASE("envelope of a convex function is the function") {
    std::vector<double> vals(N);
    for (int i = 0; i < N; ++i) vals[i] = xs(i) * xs(i);
    auto env = convex::lower_convex_envelope(lo, hi, shape, vals);
    for (int i = 0; i < N; ++i) CHECK(std::abs(env.values[i] - vals[i]) <= 1e-9);
  }
  SUBCASE("concave input collapses to the chord") {
    std::vector<double> vals(N);
    for (int i = 0; i < N; ++i) vals[i] = -std::abs(xs(i));
    auto env = convex::lower_convex_envelope(lo, hi, shape, vals);
    for (int i = 0; i < N; ++i) CHECK(env.values[i] == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("double well convexifies to -1/4 between the minima") {
    std::vector<double> vals(N);
    for (int i = 0; i < N; ++i) vals[i] = std::pow(xs(i), 4) - xs(i) * xs(i);
    auto env = convex::lower_convex_envelope(lo, hi, shape, vals);
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < N; ++i) {
      CHECK(env.values[i] <= vals[i] + 1e-14);
      if (std::abs(xs(i)) < r - 0.02) CHECK(env.values[i] == doctest::Approx(-0.25).epsilon(2e-4));
    }
    // idempotence
    auto env2 = convex::lower_convex_envelope(lo, hi, shape, env.values);
    for (int i = 0; i < N; ++i) CHECK(std::abs(env2.values[i] - env.values[i]) <= 1e-12);
  }
  SUBCASE("2-d envelope stays below the input and is midpoint convex") {
    std::vector<int> shape2{17, 17};
    Eigen::VectorXd lo2 = vec({-1, -1}), hi2 = vec({1, 1});
    std::vector<double> vals(17 * 17);
    for (int i = 0; i < 17; ++i) {
      for (int j = 0; j < 17; ++j) {
        const double x = -1.0 + 2.0 * i / 16, y = -1.0 + 2.0 * j / 16;
        vals[i * 17 + j] = std::cos(2 * x) + y * y;
      }
    }
    auto env = convex::lower_convex_envelope(lo2, hi2, shape2, vals);
    for (std::size_t k = 0; k < vals.size(); ++k) CHECK(env.values[k] <= vals[k] + 1e-14);
    for (int i = 1; i < 16; ++i) {
      for (int j = 1; j < 16; ++j) {
        const double mid = env.values[i * 17 + j];
        CHECK(mid <= 0.5 * (env.values[(i - 1) * 17 + j] + env.values[(i + 1) * 17 + j]) + 1e-12);
        CHECK(mid <= 0.5 * (env.values[i * 17 + j - 1] + env.values[i * 17 + j + 1]) + 1e-12);
      }
    }
  }
  SUBCASE("grid too coarse is rejected") {
    CHECK_THROWS(convex::lower_convex_envelope(lo, hi, {1}, {0.0}));
  }
}

TEST_CASE("mollification") {
  SUBCASE("kernel integrates to one and affine functions are reproduced") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(1, 1);
    auto lin = std::make_shared<convex::SmoothConvexBase>(
        1, [](const Eigen::VectorXd& z) { return 3.0 * z(0) + 2.0; });
    convex::AffinePiece p{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), lin, "aff"};
    auto src = std::make_shared<convex::PiecewiseConvexMax>(1, std::vector<convex::AffinePiece>{p});
    convex::MollifierSpec spec;
    spec.radius = 0.2;
    spec.shift_dims = 1;
    auto fk = convex::mollify(src, spec, 4);
    CHECK(fk.kernel_mass_quadrature() == doctest::Approx(1.0).epsilon(1e-3));
    const Eigen::VectorXd center = fk.kernel_center();
    for (double x : {-0.4, 0.0, 1.3}) {
      CHECK(fk.value(vec({x})) ==
            doctest::Approx(3.0 * (x - center(0)) + 2.0).epsilon(1e-12));
    }
  }
  SUBCASE("support arithmetic for max(x,0): values left of the support vanish") {
    auto id1 = identity_1d();
    std::vector<convex::AffinePiece> pieces(2);
    pieces[0].map = Eigen::MatrixXd::Identity(1, 1);
    pieces[0].offset = Eigen::VectorXd::Zero(1);
    pieces[0].base = id1;
    pieces[1].map = Eigen::MatrixXd::Zero(1, 1);
    pieces[1].offset = Eigen::VectorXd::Zero(1);
    pieces[1].base = id1;
    auto src = std::make_shared<convex::PiecewiseConvexMax>(1, pieces);
    convex::MollifierSpec spec;
    spec.radius = 1.0 / 3.0;  // support of eta_k inside (0, 1/k)
    spec.shift_dims = 1;
    const int k = 8;
    auto fk = convex::mollify(src, spec, k);
    CHECK(fk.value(vec({-1.5 / k})) == 0.0);
    CHECK(fk.value(vec({-1.0 / k})) == 0.0);

    // pointwise convergence: the sup error halves (within 20%) when k doubles
    auto sup_err = [&](int kk) {
      auto fkk = convex::mollify(src, spec, kk);
      double worst = 0.0;
      for (int i = 0; i <= 40; ++i) {
        const double x = -0.5 + i / 40.0;
        worst = std::max(worst, std::abs(fkk.value(vec({x})) - src->value(vec({x}))));
      }
      return worst;
    };
    const double e1 = sup_err(8), e2 = sup_err(16);
    CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.2));

    // mollified value never drops below the source minus the Lipschitz bound
    auto fk8 = convex::mollify(src, spec, 8);
    const double reach = 3.0 * spec.radius / 8.0;  // max |y| over the support
    for (int i = 0; i <= 60; ++i) {
      const double x = -1.0 + i / 30.0;
      CHECK(fk8.value(vec({x})) >= src->value(vec({x})) - reach - 1e-12);
    }
  }
  SUBCASE("mollification of a convex function stays convex") {
    auto src = std::make_shared<convex::PiecewiseConvexMax>(max_xy0());
    convex::MollifierSpec spec;
    spec.radius = 0.1;
    spec.shift_dims = 1;
    spec.quadrature = 8;
    auto fk = convex::mollify(src, spec, 4);
    auto rep = convex::check_convexity([&fk](const Eigen::VectorXd& x) { return fk.value(x); }, 2,
                                       vec({-1, -1}), vec({1, 1}), 300, 21, 1e-12);
    CHECK(rep.pass);
  }
  SUBCASE("support touching the boundary of O is rejected") {
    auto src = std::make_shared<convex::PiecewiseConvexMax>(max_xy0());
    convex::MollifierSpec spec;
    spec.radius = 0.1;
    spec.shift_dims = 1;
    spec.shift_factor = 1.0;  // support reaches X_0 = 0
    CHECK_THROWS(convex::mollify(src, spec, 4));
  }
}

TEST_CASE("convexity verdicts") {
  auto norm2 = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  auto rep = convex::check_convexity(norm2, 2, vec({-1, -1}), vec({1, 1}), 200, 1);
  CHECK(rep.pass);
  CHECK(rep.worst_violation <= 0.0);

  auto neg = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
  auto rep2 = convex::check_convexity(neg, 2, vec({-1, -1}), vec({1, 1}), 200, 1);
  CHECK_FALSE(rep2.pass);
  CHECK(rep2.worst_violation > 0.0);

  auto u = ansatz::solve_closed_form_d1(2, 9.0);
  auto ext = ansatz::extend_to_rd(u);
  auto rep3 = convex::check_convexity([&](const Eigen::VectorXd& x) { return ext.extended.value(x); },
                                      1, vec({-1}), vec({1}), 400, 2);
  CHECK(rep3.pass);
}

TEST_CASE("one-sided C1 verdicts across {sum t = 0}") {
  SUBCASE("exponent above one kills the kink") {
    auto f = [](const Eigen::VectorXd& t) { return std::pow(std::max(t.sum(), 0.0), 1.5); };
    auto rep = convex::check_c1_across(f, 2, {vec({0, 0})}, 1e-3, 1e-4);
    CHECK(rep.pass);
  }
  SUBCASE("|sum t| fails with gap 2") {
    auto f = [](const Eigen::VectorXd& t) { return std::abs(t.sum()); };
    auto rep = convex::check_c1_across(f, 2, {vec({0.5, -0.5})}, 1e-3, 1e-4, 7, 0);
    CHECK_FALSE(rep.pass);
    CHECK(rep.extrapolated_gap == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("extended closed form passes at the cone point") {
    auto u = ansatz::solve_closed_form_d1(2, 9.0);
    auto ext = ansatz::extend_to_rd(u);
    auto rep = convex::check_c1_across(
        [&](const Eigen::VectorXd& x) { return ext.extended.value(x); }, 1, {vec({0.0})}, 1e-3, 1e-4);
    CHECK(rep.pass);
    CHECK(rep.extrapolated_gap <= 1e-4);
  }
  SUBCASE("probes off the hyperplane are rejected") {
    auto f = [](const Eigen::VectorXd& t) { return t.squaredNorm(); };
    CHECK_THROWS(convex::check_c1_across(f, 2, {vec({1.0, 0.0})}, 1e-3, 1e-4));
  }
}
