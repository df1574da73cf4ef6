#include "ansatzlab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ansatzlab/numerics.hpp"

namespace ansatzlab::io {

const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// JValue
// ---------------------------------------------------------------------------

JValue JValue::object() {
  JValue v;
  v.kind_ = Kind::Object;
  return v;
}
JValue JValue::array() {
  JValue v;
  v.kind_ = Kind::Array;
  return v;
}
JValue JValue::num(double d) {
  JValue v;
  v.kind_ = Kind::Number;
  v.num_ = d;
  return v;
}
JValue JValue::integer(long long i) {
  JValue v;
  v.kind_ = Kind::Integer;
  v.int_ = i;
  return v;
}
JValue JValue::str(std::string s) {
  JValue v;
  v.kind_ = Kind::String;
  v.str_ = std::move(s);
  return v;
}
JValue JValue::boolean(bool b) {
  JValue v;
  v.kind_ = Kind::Bool;
  v.bool_ = b;
  return v;
}

JValue& JValue::set(const std::string& key, JValue v) {
  if (kind_ != Kind::Object) throw std::logic_error("JValue::set on non-object");
  members_.emplace_back(key, std::move(v));
  return *this;
}

JValue& JValue::push(JValue v) {
  if (kind_ != Kind::Array) throw std::logic_error("JValue::push on non-array");
  items_.push_back(std::move(v));
  return *this;
}

namespace {
std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace

void JValue::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  switch (kind_) {
    case Kind::Number:
      out += numerics::fmt17(num_);
      break;
    case Kind::Integer:
      out += std::to_string(int_);
      break;
    case Kind::String:
      out += '"' + escape(str_) + '"';
      break;
    case Kind::Bool:
      out += bool_ ? "true" : "false";
      break;
    case Kind::Object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad + '"' + escape(members_[i].first) + "\": ";
        members_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += pad_close + "}";
      break;
    }
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += pad_close + "]";
      break;
    }
  }
}

std::string JValue::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ += header[i];
    out_ += (i + 1 < header.size()) ? "," : "\n";
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out_ += cells[i];
    out_ += (i + 1 < cells.size()) ? "," : "\n";
  }
}

std::string CsvWriter::cell(double v) { return numerics::fmt17(v); }
std::string CsvWriter::cell(long long v) { return std::to_string(v); }

void CsvWriter::save(const std::string& path) const { write_text_file(path, out_); }

// ---------------------------------------------------------------------------
// Solution files
// ---------------------------------------------------------------------------

JValue solution_to_json(const ansatz::AnsatzSolution& sol) {
  const auto& prob = sol.problem();
  JValue root = JValue::object();
  root.set("schema_version", JValue::integer(1));
  {
    JValue p = JValue::object();
    p.set("n", JValue::integer(prob.n));
    p.set("d", JValue::integer(prob.d));
    p.set("c", JValue::num(prob.c));
    JValue b = JValue::array();
    for (double bi : prob.b) b.push(JValue::num(bi));
    p.set("b", std::move(b));
    root.set("problem", std::move(p));
  }
  root.set("alpha", JValue::num(sol.alpha().to_double()));
  root.set("alpha_rational", JValue::str(sol.alpha().str()));
  {
    JValue rep = JValue::object();
    if (sol.kind() == ansatz::AnsatzSolution::Kind::ClosedForm) {
      const auto& cf = sol.closed_form_rep();
      rep.set("kind", JValue::str("closed_form_d1"));
      rep.set("a1", JValue::num(cf.a1));
      rep.set("a2", JValue::num(cf.a2));
      rep.set("a3", JValue::num(cf.a3));
    } else {
      rep.set("kind", JValue::str("simplex_grid"));
      const auto& cs = sol.cross_section();
      rep.set("chart", JValue::str(cs.kind()));
      if (cs.kind() == "point") {
        rep.set("value", JValue::num(static_cast<const ansatz::PointChart&>(cs).g0()));
      } else if (cs.kind() == "clamped_cubic_spline" || cs.kind() == "enriched_spline") {
        const ansatz::Spline1D* sp = nullptr;
        if (cs.kind() == "enriched_spline") {
          const auto& en = static_cast<const ansatz::EnrichedSpline1D&>(cs);
          sp = &en.smooth();
          rep.set("beta", JValue::num(en.beta()));
          rep.set("amp_lo", JValue::num(en.amp_lo()));
          rep.set("amp_hi", JValue::num(en.amp_hi()));
        } else {
          sp = &static_cast<const ansatz::Spline1D&>(cs);
        }
        JValue nodes = JValue::array(), values = JValue::array();
        for (double x : sp->nodes()) nodes.push(JValue::num(x));
        for (double y : sp->values()) values.push(JValue::num(y));
        rep.set("resolution", JValue::integer(static_cast<long long>(sp->nodes().size())));
        rep.set("nodes", std::move(nodes));
        rep.set("values", std::move(values));
      } else {
        const auto& pc = static_cast<const ansatz::PolyChart&>(cs);
        rep.set("degree", JValue::integer(pc.degree()));
        JValue coeffs = JValue::array();
        for (int i = 0; i < pc.coeffs().size(); ++i) coeffs.push(JValue::num(pc.coeffs()(i)));
        rep.set("coeffs", std::move(coeffs));
      }
      rep.set("interpolation", JValue::str(cs.kind()));
    }
    root.set("representation", std::move(rep));
  }
  {
    const auto& dg = sol.diagnostics();
    JValue d = JValue::object();
    d.set("pde_residual_sup", JValue::num(dg.pde_residual_sup));
    d.set("boundary_residual_sup", JValue::num(dg.boundary_residual_sup));
    d.set("convexity_worst", JValue::num(dg.convexity_worst));
    d.set("newton_iterations", JValue::integer(dg.newton_iterations));
    d.set("converged", JValue::boolean(dg.converged));
    root.set("diagnostics", std::move(d));
  }
  return root;
}

void save_solution(const std::string& path, const ansatz::AnsatzSolution& sol) {
  write_text_file(path, solution_to_json(sol).dump());
}

ansatz::AnsatzSolution load_solution(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open solution file: " + path);
  nlohmann::json j;
  f >> j;
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("unsupported solution schema_version");
  ansatz::AnsatzProblem prob;
  prob.n = j.at("problem").at("n").get<int>();
  prob.d = j.at("problem").at("d").get<int>();
  prob.c = j.at("problem").at("c").get<double>();
  for (const auto& bi : j.at("problem").at("b")) prob.b.push_back(bi.get<double>());

  const auto& rep = j.at("representation");
  const std::string kind = rep.at("kind").get<std::string>();
  ansatz::AnsatzSolution sol = [&]() {
    if (kind == "closed_form_d1") {
      ansatz::ClosedFormD1 cf;
      cf.n = prob.n;
      cf.a1 = rep.at("a1").get<double>();
      cf.a2 = rep.at("a2").get<double>();
      cf.a3 = rep.at("a3").get<double>();
      return ansatz::AnsatzSolution::closed_form(prob, cf);
    }
    const std::string chart = rep.at("chart").get<std::string>();
    if (chart == "point") {
      return ansatz::AnsatzSolution::simplex_grid(
          prob, std::make_shared<ansatz::PointChart>(rep.at("value").get<double>()));
    }
    if (chart == "clamped_cubic_spline" || chart == "enriched_spline") {
      std::vector<double> nodes, values;
      for (const auto& x : rep.at("nodes")) nodes.push_back(x.get<double>());
      for (const auto& y : rep.at("values")) values.push_back(y.get<double>());
      const double alpha = static_cast<double>(prob.n + prob.d) / prob.n;
      const double s_lo = -prob.d * alpha * values.front();
      const double s_hi = prob.d * alpha * values.back();
      auto spline = std::make_shared<ansatz::Spline1D>(nodes, values, s_lo, s_hi);
      if (chart == "enriched_spline") {
        return ansatz::AnsatzSolution::simplex_grid(
            prob, std::make_shared<ansatz::EnrichedSpline1D>(spline, rep.at("beta").get<double>(),
                                                             rep.at("amp_lo").get<double>(),
                                                             rep.at("amp_hi").get<double>()));
      }
      return ansatz::AnsatzSolution::simplex_grid(prob, spline);
    }
    if (chart == "poly_total_degree") {
      const int degree = rep.at("degree").get<int>();
      std::vector<double> cs;
      for (const auto& c : rep.at("coeffs")) cs.push_back(c.get<double>());
      Eigen::VectorXd coeffs = Eigen::Map<Eigen::VectorXd>(cs.data(), static_cast<Eigen::Index>(cs.size()));
      return ansatz::AnsatzSolution::simplex_grid(
          prob, std::make_shared<ansatz::PolyChart>(prob.d - 1, degree, coeffs));
    }
    throw std::runtime_error("unknown chart kind: " + chart);
  }();
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    sol.diagnostics().pde_residual_sup = d.value("pde_residual_sup", 0.0);
    sol.diagnostics().boundary_residual_sup = d.value("boundary_residual_sup", 0.0);
    sol.diagnostics().convexity_worst = d.value("convexity_worst", 0.0);
    sol.diagnostics().newton_iterations = d.value("newton_iterations", 0);
    sol.diagnostics().converged = d.value("converged", true);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

void write_manifest(const std::string& path, const ManifestInfo& info) {
  JValue root = JValue::object();
  root.set("schema_version", JValue::integer(1));
  root.set("command", JValue::str(info.command));
  root.set("tool_version", JValue::str(kToolVersion));
  root.set("seed", JValue::integer(static_cast<long long>(info.seed)));
  root.set("threads", JValue::integer(info.threads));
  root.set("parameters", info.parameters);
  root.set("verdicts", info.verdicts);
  root.set("wall_time_ms", JValue::num(info.wall_time_ms));
  write_text_file(path, root.dump());
}

}  // namespace ansatzlab::io
