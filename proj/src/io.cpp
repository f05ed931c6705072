#include "kinex/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kinex/error.hpp"

namespace kinex::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// nlohmann refuses NaN/inf; store them as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

ConfigMap parse_config(std::string_view text) {
  ConfigMap out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(ErrorCode::config, "config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail(ErrorCode::config, "config line " + std::to_string(line_no) + ": empty key");
    for (auto& ch : key) {
      if (ch == '-') ch = '_';
    }
    out[key] = value;
    if (end == text.size()) break;
  }
  return out;
}

std::string canonical_config(const ConfigMap& config) {
  std::string s;
  for (const auto& [k, v] : config) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

double get_double(const ConfigMap& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const auto& s = it->second;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    fail(ErrorCode::config, "config: '" + key + "' expects a finite number, got '" + s + "'");
  }
  return v;
}

std::uint64_t get_u64(const ConfigMap& c, const std::string& key, std::uint64_t fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const auto& s = it->second;
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    fail(ErrorCode::config, "config: '" + key + "' expects a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool get_bool(const ConfigMap& c, const std::string& key, bool fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const auto& s = it->second;
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  fail(ErrorCode::config, "config: '" + key + "' expects a boolean, got '" + s + "'");
}

std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

std::vector<double> get_double_list(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ConfigMap one{{key, trim(item)}};
    out.push_back(get_double(one, key, 0.0));
  }
  if (out.empty()) fail(ErrorCode::config, "config: '" + key + "' is an empty list");
  return out;
}

void require_known(const ConfigMap& c, const std::vector<std::string>& allowed, const std::string& who) {
  for (const auto& [k, v] : c) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) fail(ErrorCode::config, who + ": unknown config key '" + k + "'");
  }
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string table_csv(const experiments::Table& table) {
  std::string s;
  for (std::size_t k = 0; k < table.columns.size(); ++k) s += (k ? "," : "") + table.columns[k];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) s += ",";
      s += number(row[k]);
    }
    s += "\n";
  }
  return s;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
  ensure_directory(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  return name;
}

void write_density(const std::string& dir, const std::string& name, const GridDensity1D& q) {
  experiments::Table t;
  t.columns = {"x", "value"};
  for (std::size_t k = 0; k < q.size(); ++k) t.rows.push_back({q.grid().node(k), q[k]});
  write_file(dir, name + ".csv", table_csv(t));
  nlohmann::ordered_json j;
  j["x_max"] = q.grid().x_max();
  j["cells"] = q.size();
  j["dx"] = q.grid().dx();
  j["mass"] = num(q.mass());
  j["mean"] = num(q.mean());
  write_file(dir, name + ".json", j.dump(2) + "\n");
}

void write_manifest(const std::string& dir, const Manifest& m) {
  nlohmann::ordered_json j;
  j["version"] = "kinex 1.0.0";
  j["command"] = m.command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  j["config_hash"] = hex64(fnv1a(canonical_config(m.config)));
  j["seed"] = m.seed;
  j["events"] = m.events;
  j["outputs"] = m.outputs;
  write_file(dir, "manifest.json", j.dump(2) + "\n");
}

std::vector<std::string> write_report(const std::string& dir, const experiments::StudyReport& r) {
  nlohmann::ordered_json j;
  j["study"] = r.study;
  j["pass"] = r.passed();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.passed;
    e["value"] = num(c.value);
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  auto rates = nlohmann::ordered_json::array();
  for (const auto& rt : r.rates) {
    nlohmann::ordered_json e;
    e["name"] = rt.name;
    e["rate"] = num(rt.rate);
    e["ci95"] = {num(rt.ci_low), num(rt.ci_high)};
    rates.push_back(e);
  }
  j["rates"] = rates;
  nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = num(v);
  j["scalars"] = scalars;

  std::vector<std::string> files;
  files.push_back(write_file(dir, "report.json", j.dump(2) + "\n"));
  files.push_back(write_file(dir, "series.csv", table_csv(r.series)));
  for (const auto& [name, table] : r.extra) files.push_back(write_file(dir, name + ".csv", table_csv(table)));
  return files;
}

}  // namespace kinex::io
