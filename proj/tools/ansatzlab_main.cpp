// Command-line front end: solver, measure, verification and scaling commands
// with seeded reproducible runs and machine-readable outputs.
//
// Exit codes: 0 pass, 1 usage error, 2 verification failure, 3 numerical
// non-convergence.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ansatzlab/ansatz.hpp"
#include "ansatzlab/hybrid.hpp"
#include "ansatzlab/io.hpp"
#include "ansatzlab/measure.hpp"
#include "ansatzlab/tropical.hpp"

using namespace ansatzlab;

namespace {

struct CommonOpts {
  std::string out;
  std::uint64_t seed = 12345;
  int threads = 0;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out, "output path (JSON payload; .csv and .manifest.json siblings)");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--threads", c.threads, "worker cap (default: ANSATZLAB_THREADS or hardware)");
  cmd->add_flag("--dry-run", c.dry_run, "validate flags without computing");
}

int apply_threads(const CommonOpts& c) {
  int threads = c.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("ANSATZLAB_THREADS")) threads = std::atoi(env);
  }
  if (threads <= 0) threads = numerics::thread_cap();
  numerics::set_thread_cap(threads);
  return threads;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    const std::string tok = s.substr(pos, next - pos);
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("malformed number: " + tok);
    out.push_back(v);
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(s)) {
    if (v != std::floor(v)) throw std::invalid_argument("expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Rational parse_rational(const std::string& tok) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(tok));
  return Rational(std::stoll(tok.substr(0, slash)), std::stoll(tok.substr(slash + 1)));
}

measure::OrthotopeRegion parse_box(const std::string& s, int expected_dim = 0) {
  const auto vals = parse_csv_doubles(s);
  if (vals.size() % 2 != 0) throw std::invalid_argument("--box needs lo,hi pairs");
  const int dim = static_cast<int>(vals.size() / 2);
  if (expected_dim > 0 && dim != expected_dim) throw std::invalid_argument("--box dimension mismatch");
  Eigen::VectorXd lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo(i) = vals[static_cast<std::size_t>(2 * i)];
    hi(i) = vals[static_cast<std::size_t>(2 * i + 1)];
  }
  return measure::OrthotopeRegion::box(lo, hi);
}

struct RunEmitter {
  CommonOpts opts;
  std::string command;
  io::JValue params = io::JValue::object();
  io::JValue verdicts = io::JValue::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  int threads = 1;

  void emit(io::JValue payload, const std::string& csv = "") const {
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    io::ManifestInfo mi;
    mi.command = command;
    mi.parameters = params;
    mi.seed = opts.seed;
    mi.threads = threads;
    mi.verdicts = verdicts;
    mi.wall_time_ms = wall;
    if (opts.out.empty()) {
      io::JValue root = io::JValue::object();
      root.set("payload", std::move(payload));
      io::JValue man = io::JValue::object();
      man.set("command", io::JValue::str(mi.command));
      man.set("tool_version", io::JValue::str(io::kToolVersion));
      man.set("seed", io::JValue::integer(static_cast<long long>(mi.seed)));
      man.set("threads", io::JValue::integer(mi.threads));
      man.set("verdicts", mi.verdicts);
      man.set("wall_time_ms", io::JValue::num(wall));
      root.set("manifest", std::move(man));
      std::cout << root.dump();
    } else {
      io::write_text_file(opts.out, payload.dump());
      if (!csv.empty()) io::write_text_file(opts.out + ".csv", csv);
      io::write_manifest(opts.out + ".manifest.json", mi);
    }
  }
};

ansatz::AnsatzSolution load_or_override(const std::string& path, std::optional<double> c_override) {
  auto sol = io::load_solution(path);
  if (c_override) {
    if (sol.problem().d != 1 || sol.kind() != ansatz::AnsatzSolution::Kind::ClosedForm)
      throw std::invalid_argument("--c-override is supported for closed-form d=1 solutions");
    return ansatz::solve_closed_form_d1(sol.problem().n, *c_override);
  }
  return sol;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ansatzlab: generalized Calabi-ansatz solver and Alexandrov measure laboratory"};
  app.require_subcommand(1);

  // ---- solve ----------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "solve the boundary value problem");
  int s_n = 2, s_d = 1, s_grid = 32, s_maxit = 60;
  double s_c = 1.0, s_tol = 1e-4;
  std::string s_b;
  CommonOpts s_opts;
  solve->add_option("--n", s_n, "ambient dimension")->required();
  solve->add_option("--d", s_d, "divisor components")->required();
  solve->add_option("--c", s_c, "positive constant")->required();
  solve->add_option("--b", s_b, "weights b_1..b_d (csv)");
  solve->add_option("--grid", s_grid, "cross-section grid resolution");
  solve->add_option("--tol", s_tol, "residual tolerance");
  solve->add_option("--max-iter", s_maxit, "Newton iteration cap");
  add_common(solve, s_opts);

  // ---- verify-step4 ---------------------------------------------------------
  auto* vstep = app.add_subcommand("verify-step4", "per-cell skeleton mass identities");
  std::string v_solution, v_box;
  int v_m = 0, v_samples = 256;
  double v_delta = 0.08;
  std::optional<double> v_c_override;
  double v_c_override_val = 0.0;
  CommonOpts v_opts;
  vstep->add_option("--solution", v_solution, "solution JSON path")->required();
  vstep->add_option("--m", v_m, "primed section count is m+1")->required();
  vstep->add_option("--box", v_box, "box R in skeleton coordinates: lo1,hi1[,lo2,hi2..]")->required();
  vstep->add_option("--samples", v_samples, "oracle samples per axis");
  vstep->add_option("--delta", v_delta, "anchor slab width");
  auto* ov = vstep->add_option("--c-override", v_c_override_val, "negative control: solve u with this c");
  add_common(vstep, v_opts);

  // ---- extend ---------------------------------------------------------------
  auto* ext = app.add_subcommand("extend", "extend the solution to all of R^d");
  std::string e_solution;
  CommonOpts e_opts;
  ext->add_option("--solution", e_solution, "solution JSON path")->required();
  add_common(ext, e_opts);

  // ---- ma-measure -----------------------------------------------------------
  auto* mam = app.add_subcommand("ma-measure", "Alexandrov Monge-Ampere mass over a box");
  std::string m_demo = "maxxy0", m_box = "-1,1,-1,1", m_quadratic;
  int m_samples = 0;
  double m_resolution = 0.0;
  CommonOpts m_opts;
  mam->add_option("--demo", m_demo, "built-in function: maxxy0");
  mam->add_option("--quadratic", m_quadratic, "h11,h12,h22: compare oracle vs analytic");
  mam->add_option("--box", m_box, "region lo1,hi1,lo2,hi2");
  mam->add_option("--samples", m_samples, "oracle samples per axis");
  mam->add_option("--resolution", m_resolution, "dual grid cell size");
  add_common(mam, m_opts);

  // ---- softmax-demo ---------------------------------------------------------
  auto* sm = app.add_subcommand("softmax-demo", "mass trapping of the softmax family");
  std::string sm_klist = "4,16,64,256", sm_box = "-1,0,-1,0";
  CommonOpts sm_opts;
  sm->add_option("--k-list", sm_klist, "softmax sharpness values (csv)");
  sm->add_option("--box", sm_box, "restriction box");
  add_common(sm, sm_opts);

  // ---- hull-volume ----------------------------------------------------------
  auto* hv = app.add_subcommand("hull-volume", "volume of conv({0} u {t^{1/n} e_i})");
  int h_n = 3;
  std::string h_t = "1,2,4";
  CommonOpts h_opts;
  hv->add_option("--n", h_n, "dimension")->required();
  hv->add_option("--t", h_t, "t values (csv; rationals p/q allowed)");
  add_common(hv, h_opts);

  // ---- mollify-leak ---------------------------------------------------------
  auto* ml = app.add_subcommand("mollify-leak", "off-skeleton mass of mollified restrictions");
  std::string ml_solution, ml_klist = "4,16,64";
  int ml_m = 2;
  CommonOpts ml_opts;
  ml->add_option("--solution", ml_solution, "solution JSON path")->required();
  ml->add_option("--m", ml_m, "primed section count is m+1");
  ml->add_option("--k-list", ml_klist, "mollifier scale indices (csv)");
  add_common(ml, ml_opts);

  // ---- hybrid-limit ---------------------------------------------------------
  auto* hl = app.add_subcommand("hybrid-limit", "rescaled potential limits");
  int hl_n = 2, hl_d = 1;
  std::string hl_l = "1", hl_B, hl_e, hl_t = "1e-2,1e-4,1e-8,1e-16,1e-32";
  double hl_c = 1.0;
  CommonOpts hl_opts;
  hl->add_option("--n", hl_n)->required();
  hl->add_option("--d", hl_d, "divisor components (1 uses the closed form)");
  hl->add_option("--c", hl_c, "ansatz constant");
  hl->add_option("--l", hl_l, "limit slopes (csv)");
  hl->add_option("--B", hl_B, "correction bounds (csv)");
  hl->add_option("--e", hl_e, "correction exponents (csv)");
  hl->add_option("--t-list", hl_t, "strictly decreasing t values");
  add_common(hl, hl_opts);

  // ---- odaka ----------------------------------------------------------------
  auto* od = app.add_subcommand("odaka", "volume growth dimension inequality");
  int o_n = 3, o_d = 2, o_sweep = 0;
  CommonOpts o_opts;
  od->add_option("--n", o_n)->required();
  od->add_option("--d", o_d)->required();
  od->add_option("--sweep-max", o_sweep, "also check all 1 <= d <= n <= N");
  add_common(od, o_opts);

  // ---- check-decomposition --------------------------------------------------
  auto* cd = app.add_subcommand("check-decomposition", "cell complex intersection rules");
  int c_m = 2, c_n = 2, c_d = 1, c_mult = 1;
  std::string c_corrupt;
  CommonOpts c_opts;
  cd->add_option("--m", c_m)->required();
  cd->add_option("--n", c_n)->required();
  cd->add_option("--d", c_d)->required();
  cd->add_option("--mult-all", c_mult, "multiplicity for every cell");
  cd->add_option("--corrupt", c_corrupt,
                 "negative test: anchor|size|flag|duplicate|drop|range|multiplicity");
  add_common(cd, c_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    // ---- solve ---------------------------------------------------------
    if (solve->parsed()) {
      RunEmitter run{s_opts, "solve"};
      run.threads = apply_threads(s_opts);
      ansatz::AnsatzProblem prob;
      prob.n = s_n;
      prob.d = s_d;
      prob.c = s_c;
      if (!s_b.empty()) prob.b = parse_csv_doubles(s_b);
      prob.validate();
      ansatz::SolverConfig cfg;
      cfg.grid = s_grid;
      cfg.tol_r = s_tol;
      cfg.max_iterations = s_maxit;
      cfg.validate();
      run.params.set("n", io::JValue::integer(s_n)).set("d", io::JValue::integer(s_d));
      run.params.set("c", io::JValue::num(s_c)).set("grid", io::JValue::integer(s_grid));
      run.params.set("tol", io::JValue::num(s_tol));
      if (s_opts.dry_run) return 0;
      auto sol = (s_d == 1) ? ansatz::solve_closed_form_d1(s_n, s_c) : ansatz::solve_bvp(prob, cfg);
      if (s_d == 1) {
        std::vector<Eigen::VectorXd> pts;
        for (int i = 1; i <= 32; ++i) {
          Eigen::VectorXd t(1);
          t(0) = 0.1 + (10.0 - 0.1) * i / 32.0;
          pts.push_back(t);
        }
        double sup = 0.0;
        for (double r : ansatz::pde_residual(sol, pts)) sup = std::max(sup, std::abs(r));
        sol.diagnostics().pde_residual_sup = sup;
      }
      const bool residual_ok = sol.diagnostics().pde_residual_sup <= std::max(cfg.tol_r * 10.0, 1e-3);
      run.verdicts.set("converged", io::JValue::boolean(residual_ok));
      std::cout << "pde_residual_sup = " << sol.diagnostics().pde_residual_sup
                << "\nboundary_residual_sup = " << sol.diagnostics().boundary_residual_sup
                << "\nconvexity_worst = " << sol.diagnostics().convexity_worst << "\n";
      if (!s_opts.out.empty()) {
        io::save_solution(s_opts.out, sol);
        io::ManifestInfo mi;
        mi.command = "solve";
        mi.parameters = run.params;
        mi.seed = s_opts.seed;
        mi.threads = run.threads;
        mi.verdicts = run.verdicts;
        mi.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                    run.start)
                              .count();
        io::write_manifest(s_opts.out + ".manifest.json", mi);
      } else {
        run.emit(io::solution_to_json(sol));
      }
      return residual_ok ? 0 : 2;
    }

    // ---- verify-step4 ---------------------------------------------------
    if (vstep->parsed()) {
      if (ov->count() > 0) v_c_override = v_c_override_val;
      RunEmitter run{v_opts, "verify-step4"};
      run.threads = apply_threads(v_opts);
      run.params.set("solution", io::JValue::str(v_solution)).set("m", io::JValue::integer(v_m));
      run.params.set("box", io::JValue::str(v_box)).set("samples", io::JValue::integer(v_samples));
      auto sol = load_or_override(v_solution, v_c_override);
      const auto R = parse_box(v_box, sol.problem().d);
      if (v_opts.dry_run) return 0;
      auto extension = ansatz::extend_to_rd(sol);
      auto u_ext = std::make_shared<convex::SmoothConvexBase>(extension.extended);
      auto model = tropical::enumerate_cells(v_m, sol.problem().n, sol.problem().d);
      tropical::Step4Config cfg;
      cfg.samples_per_axis = v_samples;
      cfg.delta = v_delta;
      cfg.delta_fine = v_delta / 2.0;
      cfg.seed = v_opts.seed;
      auto rep = tropical::verify_step4(model, u_ext, R, cfg);

      io::JValue cells = io::JValue::array();
      io::CsvWriter csv({"J", "multiplicity", "contains_delta", "mass", "expected", "verdict"});
      for (const auto& cm : rep.cells) {
        io::JValue c = io::JValue::object();
        io::JValue J = io::JValue::array();
        std::string jstr;
        for (int j : cm.cell.J) {
          J.push(io::JValue::integer(j));
          jstr += (jstr.empty() ? "" : " ") + std::to_string(j);
        }
        c.set("J", std::move(J));
        c.set("multiplicity", io::JValue::integer(cm.cell.multiplicity));
        c.set("contains_delta", io::JValue::boolean(cm.cell.contains_delta));
        c.set("mass", io::JValue::num(cm.mass));
        c.set("expected", io::JValue::num(cm.expected));
        c.set("verdict", io::JValue::boolean(cm.pass));
        cells.push(std::move(c));
        csv.row({jstr, io::CsvWriter::cell(static_cast<long long>(cm.cell.multiplicity)),
                 cm.cell.contains_delta ? "1" : "0", io::CsvWriter::cell(cm.mass),
                 io::CsvWriter::cell(cm.expected), cm.pass ? "1" : "0"});
      }
      io::JValue payload = io::JValue::object();
      payload.set("cells", std::move(cells));
      payload.set("total", io::JValue::num(rep.total));
      payload.set("expected_total", io::JValue::num(rep.expected_total));
      payload.set("c", io::JValue::str(rep.c.str()));
      payload.set("a", io::JValue::integer(rep.a));
      const bool pass = rep.all_cells_pass && rep.total_pass;
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("all_cells_pass", io::JValue::boolean(rep.all_cells_pass));
      run.verdicts.set("total_pass", io::JValue::boolean(rep.total_pass));
      run.emit(std::move(payload), csv.str());
      return pass ? 0 : 2;
    }

    // ---- extend ---------------------------------------------------------
    if (ext->parsed()) {
      RunEmitter run{e_opts, "extend"};
      run.threads = apply_threads(e_opts);
      run.params.set("solution", io::JValue::str(e_solution));
      auto sol = io::load_solution(e_solution);
      if (e_opts.dry_run) return 0;
      auto res = ansatz::extend_to_rd(sol);
      auto rng = numerics::make_rng(e_opts.seed);
      std::uniform_real_distribution<double> uni(-2.0, 2.0);
      bool zero_exact = true;
      const int d = sol.problem().d;
      for (int s = 0; s < 1000; ++s) {
        Eigen::VectorXd t(d);
        for (int i = 0; i < d; ++i) t(i) = uni(rng);
        if (t.sum() > 0.0) t -= Eigen::VectorXd::Constant(d, (t.sum() + 0.1) / d);
        if (res.extended.value(t) != 0.0) zero_exact = false;
      }
      const double agree_tol = (d == 1) ? 1e-6 : 1e-3;
      const bool pass = zero_exact && res.octant_agreement_rel <= agree_tol &&
                        res.c1_gap <= 1e-4 && res.diag_derivative_min >= -1e-8;
      io::JValue payload = io::JValue::object();
      payload.set("zero_half_space_exact", io::JValue::boolean(zero_exact));
      payload.set("octant_agreement_rel", io::JValue::num(res.octant_agreement_rel));
      payload.set("c1_gap", io::JValue::num(res.c1_gap));
      payload.set("diag_derivative_min", io::JValue::num(res.diag_derivative_min));
      payload.set("convexity_worst", io::JValue::num(res.convexity_worst));
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload));
      return pass ? 0 : 2;
    }

    // ---- ma-measure -----------------------------------------------------
    if (mam->parsed()) {
      RunEmitter run{m_opts, "ma-measure"};
      run.threads = apply_threads(m_opts);
      const auto E = parse_box(m_box, 2);
      run.params.set("box", io::JValue::str(m_box));
      if (m_opts.dry_run) return 0;
      io::JValue payload = io::JValue::object();
      bool pass = true;
      if (!m_quadratic.empty()) {
        const auto hs = parse_csv_doubles(m_quadratic);
        if (hs.size() != 3) throw std::invalid_argument("--quadratic needs h11,h12,h22");
        Eigen::Matrix2d H;
        H << hs[0], hs[1], hs[1], hs[2];
        if (H(0, 0) <= 0 || H.determinant() <= 0)
          throw std::invalid_argument("--quadratic must be positive definite");
        auto base = std::make_shared<convex::SmoothConvexBase>(
            2, [H](const Eigen::VectorXd& x) { return 0.5 * x.dot(H * x); },
            [H](const Eigen::VectorXd& x) { return Eigen::VectorXd(H * x); },
            [H](const Eigen::VectorXd&) { return Eigen::MatrixXd(H); });
        convex::AffinePiece p{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), base, "q"};
        convex::PiecewiseConvexMax f(2, {p});
        measure::OracleConfig ocfg;
        ocfg.seed = m_opts.seed;
        if (m_samples > 0) ocfg.samples_per_axis = m_samples;
        if (m_resolution > 0) ocfg.dual_resolution = m_resolution;
        auto oracle = measure::ma_measure_oracle(f, E, ocfg);
        auto analytic = measure::ma_measure_analytic(*base, E);
        pass = std::abs(oracle.mass - analytic.mass) <=
               3.0 * (oracle.error_bound + analytic.error_bound);
        payload.set("oracle_mass", io::JValue::num(oracle.mass));
        payload.set("oracle_error", io::JValue::num(oracle.error_bound));
        payload.set("analytic_mass", io::JValue::num(analytic.mass));
        payload.set("analytic_error", io::JValue::num(analytic.error_bound));
      } else if (m_demo == "maxxy0") {
        auto id1 = std::make_shared<convex::SmoothConvexBase>(
            1, [](const Eigen::VectorXd& z) { return z(0); },
            [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); },
            [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); });
        std::vector<convex::AffinePiece> pieces;
        const double rows[3][2] = {{1, 0}, {0, 1}, {0, 0}};
        for (const auto& rw : rows) {
          convex::AffinePiece p;
          p.map = Eigen::MatrixXd::Zero(1, 2);
          p.map(0, 0) = rw[0];
          p.map(0, 1) = rw[1];
          p.offset = Eigen::VectorXd::Zero(1);
          p.base = id1;
          pieces.push_back(p);
        }
        convex::PiecewiseConvexMax f(2, pieces);
        measure::OracleConfig ocfg;
        ocfg.seed = m_opts.seed;
        if (m_samples > 0) ocfg.samples_per_axis = m_samples;
        if (m_resolution > 0) ocfg.dual_resolution = m_resolution;
        auto est = measure::ma_measure_oracle(f, E, ocfg);
        payload.set("mass", io::JValue::num(est.mass));
        payload.set("error_bound", io::JValue::num(est.error_bound));
        payload.set("method", io::JValue::str(est.method));
      } else {
        throw std::invalid_argument("unknown --demo: " + m_demo);
      }
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload));
      return pass ? 0 : 2;
    }

    // ---- softmax-demo ---------------------------------------------------
    if (sm->parsed()) {
      RunEmitter run{sm_opts, "softmax-demo"};
      run.threads = apply_threads(sm_opts);
      const auto E = parse_box(sm_box, 2);
      const auto ks = parse_csv_ints(sm_klist);
      run.params.set("k_list", io::JValue::str(sm_klist)).set("box", io::JValue::str(sm_box));
      if (sm_opts.dry_run) return 0;
      auto res = measure::softmax_trap_demo(ks, E);
      io::JValue rows = io::JValue::array();
      io::CsvWriter csv({"k", "restricted_mass", "restricted_error", "total_mass", "total_error"});
      bool totals_ok = true;
      for (const auto& r : res.rows) {
        io::JValue row = io::JValue::object();
        row.set("k", io::JValue::integer(r.k));
        row.set("restricted_mass", io::JValue::num(r.restricted_mass));
        row.set("total_mass", io::JValue::num(r.total_mass));
        rows.push(std::move(row));
        csv.row({io::CsvWriter::cell(static_cast<long long>(r.k)),
                 io::CsvWriter::cell(r.restricted_mass), io::CsvWriter::cell(r.restricted_error),
                 io::CsvWriter::cell(r.total_mass), io::CsvWriter::cell(r.total_error)});
        totals_ok = totals_ok && std::abs(r.total_mass - 0.5) <= 0.01;
      }
      const bool limit_ok = std::abs(res.rows.back().restricted_mass - 1.0 / 6.0) <= 0.01;
      const bool pass = totals_ok && limit_ok;
      io::JValue payload = io::JValue::object();
      payload.set("rows", std::move(rows));
      payload.set("trend_increasing", io::JValue::boolean(res.trend_increasing));
      payload.set("limit_within_tol", io::JValue::boolean(limit_ok));
      payload.set("totals_within_tol", io::JValue::boolean(totals_ok));
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload), csv.str());
      return pass ? 0 : 2;
    }

    // ---- hull-volume ----------------------------------------------------
    if (hv->parsed()) {
      RunEmitter run{h_opts, "hull-volume"};
      run.threads = apply_threads(h_opts);
      std::vector<Rational> ts;
      {
        std::size_t pos = 0;
        while (pos < h_t.size()) {
          std::size_t next = h_t.find(',', pos);
          if (next == std::string::npos) next = h_t.size();
          ts.push_back(parse_rational(h_t.substr(pos, next - pos)));
          pos = next + 1;
        }
      }
      run.params.set("n", io::JValue::integer(h_n)).set("t", io::JValue::str(h_t));
      if (h_opts.dry_run) return 0;
      auto rep = measure::hull_volume_linear_in_t(h_n, ts);
      io::JValue rows = io::JValue::array();
      io::CsvWriter csv({"t", "exact_volume", "numeric_volume"});
      bool numeric_ok = true;
      for (const auto& r : rep.rows) {
        io::JValue row = io::JValue::object();
        row.set("t", io::JValue::str(r.t.str()));
        row.set("exact_volume", io::JValue::str(r.exact_volume.str()));
        row.set("numeric_volume", io::JValue::num(r.numeric_volume));
        rows.push(std::move(row));
        csv.row({r.t.str(), r.exact_volume.str(), io::CsvWriter::cell(r.numeric_volume)});
        numeric_ok = numeric_ok && std::abs(r.numeric_volume - r.exact_volume.to_double()) <=
                                       1e-9 * (1.0 + r.exact_volume.to_double());
      }
      const bool pass = rep.linearity_exact && numeric_ok;
      io::JValue payload = io::JValue::object();
      payload.set("n", io::JValue::integer(h_n));
      payload.set("rows", std::move(rows));
      payload.set("linearity_exact", io::JValue::boolean(rep.linearity_exact));
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload), csv.str());
      return pass ? 0 : 2;
    }

    // ---- mollify-leak ---------------------------------------------------
    if (ml->parsed()) {
      RunEmitter run{ml_opts, "mollify-leak"};
      run.threads = apply_threads(ml_opts);
      auto sol = io::load_solution(ml_solution);
      const auto ks = parse_csv_ints(ml_klist);
      run.params.set("solution", io::JValue::str(ml_solution)).set("k_list", io::JValue::str(ml_klist));
      if (ml_opts.dry_run) return 0;
      auto extension = ansatz::extend_to_rd(sol);
      auto u_ext = std::make_shared<convex::SmoothConvexBase>(extension.extended);
      auto model = tropical::enumerate_cells(ml_m, sol.problem().n, sol.problem().d);
      const tropical::Cell* delta_cell = nullptr;
      for (const auto& c : model.cells) {
        if (c.contains_delta) {
          delta_cell = &c;
          break;
        }
      }
      if (!delta_cell) throw std::runtime_error("no skeleton cell in the model");
      auto restr = tropical::cell_restriction(u_ext, model, *delta_cell);
      tropical::LeakConfig cfg;
      cfg.dist_lo = Eigen::VectorXd::Constant(sol.problem().d, 0.5);
      cfg.dist_hi = Eigen::VectorXd::Constant(sol.problem().d, 1.5);
      auto rows = tropical::mollification_leak(restr, ks, cfg);
      io::CsvWriter csv({"k", "leak_mass", "v_region_mass", "sigma_box_mass", "centered_leak"});
      io::JValue jrows = io::JValue::array();
      bool monotone = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (i > 0 && !(r.leak_mass <= rows[i - 1].leak_mass)) monotone = false;
        io::JValue row = io::JValue::object();
        row.set("k", io::JValue::integer(r.k));
        row.set("leak_mass", io::JValue::num(r.leak_mass));
        row.set("v_region_mass", io::JValue::num(r.v_region_mass));
        row.set("sigma_box_mass", io::JValue::num(r.sigma_box_mass));
        row.set("centered_leak", io::JValue::num(r.centered_leak));
        jrows.push(std::move(row));
        csv.row({io::CsvWriter::cell(static_cast<long long>(r.k)), io::CsvWriter::cell(r.leak_mass),
                 io::CsvWriter::cell(r.v_region_mass), io::CsvWriter::cell(r.sigma_box_mass),
                 io::CsvWriter::cell(r.centered_leak)});
      }
      const bool small = rows.back().leak_mass <= 1e-3;
      const bool contrast = rows.back().centered_leak > rows.back().leak_mass;
      const bool pass = small && monotone && contrast;
      io::JValue payload = io::JValue::object();
      payload.set("rows", std::move(jrows));
      payload.set("final_leak_small", io::JValue::boolean(small));
      payload.set("monotone_decreasing", io::JValue::boolean(monotone));
      payload.set("centered_strictly_larger", io::JValue::boolean(contrast));
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload), csv.str());
      return pass ? 0 : 2;
    }

    // ---- hybrid-limit ---------------------------------------------------
    if (hl->parsed()) {
      RunEmitter run{hl_opts, "hybrid-limit"};
      run.threads = apply_threads(hl_opts);
      if (hl_d != 1) throw std::invalid_argument("hybrid-limit: the built-in ansatz supports d=1");
      run.params.set("n", io::JValue::integer(hl_n)).set("d", io::JValue::integer(hl_d));
      if (hl_opts.dry_run) return 0;
      auto sol = ansatz::solve_closed_form_d1(hl_n, hl_c);
      auto extr = ansatz::extend_to_rd(sol);
      hybrid::ModelHybridPotential model;
      model.alpha = sol.alpha();
      for (double l : parse_csv_doubles(hl_l)) model.leading.push_back(l);
      if (!hl_B.empty()) {
        const auto Bs = parse_csv_doubles(hl_B);
        const auto es = hl_e.empty() ? std::vector<double>(Bs.size(), 0.0) : parse_csv_doubles(hl_e);
        if (es.size() != Bs.size()) throw std::invalid_argument("--B and --e sizes differ");
        for (std::size_t i = 0; i < Bs.size(); ++i) model.corrections.push_back({Bs[i], es[i]});
      }
      model.u = std::make_shared<convex::SmoothConvexBase>(extr.extended);
      auto res = hybrid::rescaled_limit(model, parse_csv_doubles(hl_t));
      io::CsvWriter csv({"t", "ratio", "target", "abs_error"});
      io::JValue rows = io::JValue::array();
      for (const auto& r : res.rows) {
        io::JValue row = io::JValue::object();
        row.set("t", io::JValue::num(r.t));
        row.set("ratio", io::JValue::num(r.ratio));
        row.set("target", io::JValue::num(r.target));
        row.set("abs_error", io::JValue::num(r.abs_error));
        rows.push(std::move(row));
        csv.row({io::CsvWriter::cell(r.t), io::CsvWriter::cell(r.ratio),
                 io::CsvWriter::cell(r.target), io::CsvWriter::cell(r.abs_error)});
      }
      io::JValue payload = io::JValue::object();
      payload.set("rows", std::move(rows));
      payload.set("target", io::JValue::num(res.target));
      payload.set("final_error", io::JValue::num(res.final_error));
      payload.set("pass", io::JValue::boolean(res.converged));
      run.verdicts.set("pass", io::JValue::boolean(res.converged));
      run.emit(std::move(payload), csv.str());
      return res.converged ? 0 : 2;
    }

    // ---- odaka ----------------------------------------------------------
    if (od->parsed()) {
      RunEmitter run{o_opts, "odaka"};
      run.threads = apply_threads(o_opts);
      run.params.set("n", io::JValue::integer(o_n)).set("d", io::JValue::integer(o_d));
      if (o_opts.dry_run) return 0;
      auto res = hybrid::odaka_check(o_n, o_d);
      bool sweep_ok = true;
      if (o_sweep > 0) {
        for (int n = 1; n <= o_sweep; ++n) {
          for (int d = 1; d <= n; ++d) {
            auto r = hybrid::odaka_check(n, d);
            sweep_ok = sweep_ok && r.inequality_holds && (r.equality == (d == n));
          }
        }
      }
      const bool pass = res.inequality_holds && sweep_ok;
      io::JValue payload = io::JValue::object();
      payload.set("vd", io::JValue::str(res.vd.str()));
      payload.set("holds", io::JValue::boolean(res.inequality_holds));
      payload.set("equality", io::JValue::boolean(res.equality));
      if (o_sweep > 0) payload.set("sweep_ok", io::JValue::boolean(sweep_ok));
      payload.set("pass", io::JValue::boolean(pass));
      run.verdicts.set("pass", io::JValue::boolean(pass));
      run.emit(std::move(payload));
      return pass ? 0 : 2;
    }

    // ---- check-decomposition ---------------------------------------------
    if (cd->parsed()) {
      RunEmitter run{c_opts, "check-decomposition"};
      run.threads = apply_threads(c_opts);
      run.params.set("m", io::JValue::integer(c_m)).set("n", io::JValue::integer(c_n));
      run.params.set("d", io::JValue::integer(c_d));
      if (c_opts.dry_run) return 0;
      auto model = tropical::enumerate_cells(c_m, c_n, c_d);
      if (c_mult != 1) {
        for (auto& cell : model.cells) cell.multiplicity = c_mult;
      }
      if (!c_corrupt.empty()) {
        auto& cell = model.cells.front();
        if (c_corrupt == "anchor") {
          cell.anchor = cell.J[0];
        } else if (c_corrupt == "size") {
          cell.J.pop_back();
        } else if (c_corrupt == "flag") {
          cell.contains_delta = !cell.contains_delta;
        } else if (c_corrupt == "duplicate") {
          model.cells.push_back(cell);
        } else if (c_corrupt == "drop") {
          model.cells.erase(model.cells.begin());
        } else if (c_corrupt == "range") {
          cell.J.back() = model.section_count() + 3;
        } else if (c_corrupt == "multiplicity") {
          cell.multiplicity = 0;
        } else {
          throw std::invalid_argument("unknown --corrupt mode: " + c_corrupt);
        }
      }
      auto rep = tropical::check_decomposition(model, c_opts.seed);
      io::JValue payload = io::JValue::object();
      payload.set("pass", io::JValue::boolean(rep.pass));
      payload.set("pairs_checked", io::JValue::integer(rep.pairs_checked));
      io::JValue fails = io::JValue::array();
      for (const auto& f : rep.failures) fails.push(io::JValue::str(f));
      payload.set("failures", std::move(fails));
      run.verdicts.set("pass", io::JValue::boolean(rep.pass));
      run.emit(std::move(payload));
      return rep.pass ? 0 : 2;
    }
  } catch (const ansatz::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last residual " << e.last_residual << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
