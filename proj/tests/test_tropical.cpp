#include <doctest.h>

#include "ansatzlab/ansatz.hpp"
#include "ansatzlab/tropical.hpp"
#include "test_helpers.hpp"

using namespace ansatzlab;
using test_helpers::vec;

namespace {

std::shared_ptr<convex::SmoothConvexBase> extended_closed_form(int n, double c) {
  auto u = ansatz::solve_closed_form_d1(n, c);
  auto ext = ansatz::extend_to_rd(u);
  return std::make_shared<convex::SmoothConvexBase>(ext.extended);
}

}  // namespace

TEST_CASE("cell enumeration and the constant c") {
  SUBCASE("m=2, n=2, d=1: six cells, a = 3, c = 1/3") {
    auto model = tropical::enumerate_cells(2, 2, 1);
    CHECK(model.cells.size() == 6);
    CHECK(model.a() == 3);
    CHECK(tropical::constant_c(model) == Rational(1, 3));
    for (const auto& cell : model.cells) {
      CHECK(cell.anchor >= 0);
      CHECK(cell.anchor <= model.m);
      CHECK_FALSE(std::binary_search(cell.J.begin(), cell.J.end(), cell.anchor));
    }
  }
  SUBCASE("skeleton count matches the closed-form binomial") {
    for (int n : {2, 3, 4}) {
      for (int m : {n, n + 1, n + 3}) {
        for (int d = 1; d < n; ++d) {
          auto model = tropical::enumerate_cells(m, n, d);
          CHECK(model.a() == binomial_i64(m + 1, n - d));
          CHECK(static_cast<long>(model.cells.size()) == binomial_i64(m + d + 1, n));
        }
      }
    }
  }
  SUBCASE("multiplicities scale a linearly") {
    std::map<std::vector<int>, int> mult;
    auto base = tropical::enumerate_cells(2, 2, 1);
    for (const auto& cell : base.cells) mult[cell.J] = 2;
    auto doubled = tropical::enumerate_cells(2, 2, 1, mult);
    CHECK(doubled.a() == 2 * base.a());
    CHECK(tropical::constant_c(doubled) == Rational(1, 6));
  }
  SUBCASE("direct formula values") {
    auto one = tropical::enumerate_cells(4, 4, 2);
    (void)one;
    tropical::TropicalModel fake;
    fake.n = 4;
    fake.d = 2;
    fake.m = 4;
    tropical::Cell c;
    c.J = {0, 1, 5, 6};
    c.multiplicity = 5;
    c.anchor = 2;
    c.contains_delta = true;
    fake.cells.push_back(c);
    CHECK(tropical::constant_c(fake) == Rational(2, 5));
    fake.cells[0].contains_delta = false;
    CHECK_THROWS(tropical::constant_c(fake));
  }
}

TEST_CASE("build_v and its two forms") {
  auto u_ext = extended_closed_form(2, 9.0);
  const int m = 2, d = 1;
  auto v = tropical::build_v(u_ext, m, d);
  SUBCASE("all primed coordinates zero reduces to u of the distinguished block") {
    Eigen::VectorXd x = vec({0, 0, 0, 0.7});
    CHECK(v.value(x) == doctest::Approx(u_ext->value(vec({0.7}))).epsilon(1e-14));
  }
  SUBCASE("reference value 2^{3/2} at (0,0,0,1)") {
    CHECK(v.value(vec({0, 0, 0, 1})) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
  }
  SUBCASE("outer and inner forms agree at 1000 random points") {
    auto rng = numerics::make_rng(13);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int s = 0; s < 1000; ++s) {
      Eigen::VectorXd x(4);
      for (int i = 0; i < 4; ++i) x(i) = uni(rng);
      const double outer = v.value(x);
      const double inner = tropical::eval_v_inner(*u_ext, m, d, x);
      CHECK(std::abs(outer - inner) <= 1e-12 * (1.0 + std::abs(outer)));
    }
  }
  SUBCASE("v descends modulo the diagonal") {
    auto rng = numerics::make_rng(14);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int s = 0; s < 64; ++s) {
      Eigen::VectorXd x(4);
      for (int i = 0; i < 4; ++i) x(i) = uni(rng);
      const double shift = uni(rng);
      CHECK(v.value(x + Eigen::VectorXd::Constant(4, shift)) ==
            doctest::Approx(v.value(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cell restrictions") {
  auto u_ext = extended_closed_form(2, 1.0 / 3.0);
  auto model = tropical::enumerate_cells(2, 2, 1);
  auto v = tropical::build_v(u_ext, model.m, model.d);

  for (const auto& cell : model.cells) {
    auto restr = tropical::cell_restriction(u_ext, model, cell);
    CHECK(restr.f.piece_count() == model.n - restr.r + 1);
    // evaluation agrees with the embedded full v
    auto rng = numerics::make_rng(100 + cell.J[0] * 10 + cell.J[1]);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int s = 0; s < 100; ++s) {
      Eigen::VectorXd xL(model.n);
      for (int i = 0; i < model.n; ++i) xL(i) = uni(rng);
      const double a = restr.f.value(xL);
      const double b = v.value(restr.embed(xL));
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
  }
  SUBCASE("piece counts by r") {
    // r = d cell
    auto rd = std::find_if(model.cells.begin(), model.cells.end(),
                           [](const tropical::Cell& c) { return c.contains_delta; });
    REQUIRE(rd != model.cells.end());
    CHECK(tropical::cell_restriction(u_ext, model, *rd).f.piece_count() == model.n - model.d + 1);
    // r = 0 cell
    auto r0 = std::find_if(model.cells.begin(), model.cells.end(),
                           [&](const tropical::Cell& c) { return !c.contains_delta; });
    REQUIRE(r0 != model.cells.end());
    CHECK(tropical::cell_restriction(u_ext, model, *r0).f.piece_count() == model.n + 1);
  }
  SUBCASE("inconsistent anchors are rejected") {
    tropical::Cell bad = model.cells.front();
    bad.anchor = bad.J[0];
    CHECK_THROWS(tropical::cell_restriction(u_ext, model, bad));
  }
}

TEST_CASE("step 4 classification") {
  auto u_ext = extended_closed_form(2, 1.0 / 3.0);
  auto model = tropical::enumerate_cells(2, 2, 1);
  const auto& delta_cell = *std::find_if(model.cells.begin(), model.cells.end(),
                                         [](const tropical::Cell& c) { return c.contains_delta; });
  auto restr = tropical::cell_restriction(u_ext, model, delta_cell);

  SUBCASE("anchor coordinate active alone gives Case 1-2") {
    auto res = tropical::step4_classify(restr, vec({1.0, 0.5}), 1e-9);
    CHECK(res.tag == tropical::Step4Case::Case12);
  }
  SUBCASE("relint of the skeleton gives Case 4") {
    auto res = tropical::step4_classify(restr, vec({0.0, 0.8}), 1e-9);
    CHECK(res.tag == tropical::Step4Case::Case4);
    CHECK(res.on_delta_closure);
    CHECK(res.active.size() == static_cast<std::size_t>(restr.f.piece_count()));
  }
  SUBCASE("r < d cells classify boundary points as Case 3") {
    ansatz::AnsatzProblem prob;
    prob.n = 3;
    prob.d = 2;
    prob.c = 1.0;
    ansatz::SolverConfig cfg;
    cfg.grid = 16;
    auto sol = ansatz::solve_bvp(prob, cfg);
    auto ext = ansatz::extend_to_rd(sol);
    auto u3 = std::make_shared<convex::SmoothConvexBase>(ext.extended);
    auto model3 = tropical::enumerate_cells(3, 3, 2);
    const auto r1 = std::find_if(model3.cells.begin(), model3.cells.end(), [&](const tropical::Cell& c) {
      int dist = 0;
      for (int j : c.J) {
        if (j > model3.m) ++dist;
      }
      return dist == 1;
    });
    REQUIRE(r1 != model3.cells.end());
    auto restr3 = tropical::cell_restriction(u3, model3, *r1);
    CHECK(restr3.r == 1);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
    p(restr3.dist_slots[0]) = 0.9;
    auto res = tropical::step4_classify(restr3, p, 1e-9);
    CHECK(res.tag == tropical::Step4Case::Case3);
    CHECK(res.on_delta_closure);
  }
  SUBCASE("Case 1-2 polytopes lie in the inactive coordinate hyperplanes") {
    auto rng = numerics::make_rng(77);
    std::uniform_real_distribution<double> uni(-1.0, 1.5);
    int observed = 0;
    for (int s = 0; s < 200; ++s) {
      Eigen::VectorXd p = vec({uni(rng), uni(rng)});
      const double act = restr.f.default_act_tol(p);
      auto res = tropical::step4_classify(restr, p, act);
      if (res.tag != tropical::Step4Case::Case12) continue;
      ++observed;
      auto sp = restr.f.subgradient_polytope(p, act);
      // every inactive U_k forces the polytope into {X_k^dual = 0}
      for (int k = 0; k < restr.f.piece_count() - 1; ++k) {
        if (std::find(res.active.begin(), res.active.end(), k) != res.active.end()) continue;
        for (const auto& vtx : sp.vertices) {
          CHECK(std::abs(vtx(restr.anchor_slots[static_cast<std::size_t>(k)])) <= 1e-10);
        }
      }
    }
    CHECK(observed > 50);
  }
}

TEST_CASE("step 4 verification on the reference model") {
  auto u_ext = extended_closed_form(2, 1.0 / 3.0);
  auto model = tropical::enumerate_cells(2, 2, 1);
  auto R = measure::OrthotopeRegion::box(vec({0.5}), vec({1.5}));
  tropical::Step4Config cfg;
  auto rep = tropical::verify_step4(model, u_ext, R, cfg);
  const double lebR = 1.0;
  for (const auto& cm : rep.cells) {
    if (cm.cell.contains_delta) {
      CHECK(std::abs(cm.mass - lebR / 3.0) <= 0.03 * (lebR / 3.0));
      // slab stabilization: the two widths agree
      CHECK(std::abs(cm.mass - cm.mass_coarse) <= 0.02 * (lebR / 3.0));
    } else {
      CHECK(cm.mass <= 1e-3 * lebR);
    }
    CHECK(cm.pass);
  }
  CHECK(std::abs(rep.total - lebR) <= 0.05 * lebR);
  CHECK(rep.all_cells_pass);
  CHECK(rep.total_pass);

  SUBCASE("global mass summary and exact count identity") {
    auto g = tropical::verify_global_mass(model, u_ext, R, cfg);
    CHECK(g.total_pass);
    CHECK(g.count_identity_exact);
    CHECK(g.a == 3);
  }
  SUBCASE("doubled multiplicities halve c and keep the sum") {
    std::map<std::vector<int>, int> mult;
    for (const auto& cell : model.cells) mult[cell.J] = 2;
    auto doubled = tropical::enumerate_cells(2, 2, 1, mult);
    // u must solve the BVP for the halved constant
    auto u_half = extended_closed_form(2, 1.0 / 6.0);
    auto g = tropical::verify_global_mass(doubled, u_half, R, cfg);
    CHECK(g.count_identity_exact);
    CHECK(std::abs(g.total - lebR) <= 0.05 * lebR);
  }
  SUBCASE("R must sit inside the open skeleton") {
    CHECK_THROWS(tropical::verify_step4(model, u_ext,
                                        measure::OrthotopeRegion::box(vec({-0.5}), vec({1.5})), cfg));
  }
}

TEST_CASE("mollification no-leak") {
  auto u_ext = extended_closed_form(2, 1.0 / 3.0);
  auto model = tropical::enumerate_cells(2, 2, 1);
  const auto& delta_cell = *std::find_if(model.cells.begin(), model.cells.end(),
                                         [](const tropical::Cell& c) { return c.contains_delta; });
  auto restr = tropical::cell_restriction(u_ext, model, delta_cell);
  tropical::LeakConfig cfg;
  cfg.dist_lo = vec({0.5});
  cfg.dist_hi = vec({1.5});
  auto rows = tropical::mollification_leak(restr, {4, 16, 64}, cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].leak_mass <= 1e-3);
  CHECK(rows[1].leak_mass <= rows[0].leak_mass);
  CHECK(rows[2].leak_mass <= rows[1].leak_mass);
  for (const auto& r : rows) {
    CHECK(r.centered_leak > r.leak_mass);  // the shift is what stops the leak
  }
  // mass over the sigma-side box approaches the Step 4 value c * Leb(R)
  CHECK(std::abs(rows[2].sigma_box_mass - 1.0 / 3.0) <= 0.05 / 3.0);

  SUBCASE("non-skeleton cells are rejected") {
    const auto& other = *std::find_if(model.cells.begin(), model.cells.end(),
                                      [](const tropical::Cell& c) { return !c.contains_delta; });
    auto restr2 = tropical::cell_restriction(u_ext, model, other);
    CHECK_THROWS(tropical::mollification_leak(restr2, {4}, cfg));
  }
}

TEST_CASE("reduced dependence of w") {
  auto u_ext = extended_closed_form(2, 1.0 / 3.0);
  auto model = tropical::enumerate_cells(2, 2, 1);
  const auto& delta_cell = *std::find_if(model.cells.begin(), model.cells.end(),
                                         [](const tropical::Cell& c) { return c.contains_delta; });
  auto restr = tropical::cell_restriction(u_ext, model, delta_cell);
  auto box = measure::OrthotopeRegion::box(vec({-0.8, 0.5}), vec({-0.4, 1.0}));
  auto rep = tropical::reduced_dependence_check(restr, box);
  CHECK(rep.gradient_span_rank == model.n - 1);
  CHECK(rep.identity_ok);
  CHECK(rep.worst_identity_gap <= 1e-12);
  CHECK(rep.mollified_mass <= 1e-8);
  CHECK(rep.pass);
}

TEST_CASE("decomposition checks and corrupted mutants") {
  SUBCASE("reference model passes") {
    auto model = tropical::enumerate_cells(2, 2, 1);
    auto rep = tropical::check_decomposition(model);
    CHECK(rep.pass);
    CHECK(rep.pairs_checked > 0);
  }
  SUBCASE("two top cells sharing n-1 indices meet in the shared face lattice") {
    auto model = tropical::enumerate_cells(3, 3, 1);
    auto rep = tropical::check_decomposition(model, 3, 100000);
    CHECK(rep.pass);
  }
  SUBCASE("each corruption is detected") {
    auto fresh = [] { return tropical::enumerate_cells(2, 2, 1); };
    {
      auto m = fresh();
      m.cells[0].anchor = m.cells[0].J[0];
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells[0].J.pop_back();
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells[0].contains_delta = !m.cells[0].contains_delta;
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells.push_back(m.cells[0]);
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells.erase(m.cells.begin());
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells[0].J.back() = 99;
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
    {
      auto m = fresh();
      m.cells[0].multiplicity = 0;
      CHECK_FALSE(tropical::check_decomposition(m).pass);
    }
  }
}
