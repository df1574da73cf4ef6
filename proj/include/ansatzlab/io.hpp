#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ansatzlab/ansatz.hpp"

namespace ansatzlab::io {

// ---------------------------------------------------------------------------
// Ordered JSON writer. Keys keep insertion order; doubles are written with 17
// significant digits (bit-exact round trips), locale-independent.
// ---------------------------------------------------------------------------

class JValue {
 public:
  static JValue object();
  static JValue array();
  static JValue num(double v);
  static JValue integer(long long v);
  static JValue str(std::string v);
  static JValue boolean(bool v);

  JValue& set(const std::string& key, JValue v);  // object only
  JValue& push(JValue v);                         // array only

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { Object, Array, Number, Integer, String, Bool };
  Kind kind_ = Kind::Object;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JValue>> members_;
  std::vector<JValue> items_;

  void dump_to(std::string& out, int indent, int depth) const;
};

void write_text_file(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// CSV ('.' decimals, LF endings, 17 significant digits).
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  static std::string cell(double v);
  static std::string cell(long long v);
  std::string str() const { return out_; }
  void save(const std::string& path) const;

 private:
  std::size_t width_;
  std::string out_;
};

// ---------------------------------------------------------------------------
// Solution files (schema_version 1).
// ---------------------------------------------------------------------------

JValue solution_to_json(const ansatz::AnsatzSolution& sol);
void save_solution(const std::string& path, const ansatz::AnsatzSolution& sol);
ansatz::AnsatzSolution load_solution(const std::string& path);

// ---------------------------------------------------------------------------
// Run manifests.
// ---------------------------------------------------------------------------

struct ManifestInfo {
  std::string command;
  JValue parameters = JValue::object();
  std::uint64_t seed = 0;
  int threads = 1;
  JValue verdicts = JValue::object();
  double wall_time_ms = 0.0;
};

extern const char* kToolVersion;

void write_manifest(const std::string& path, const ManifestInfo& info);

}  // namespace ansatzlab::io
