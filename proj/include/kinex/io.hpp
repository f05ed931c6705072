#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kinex/experiments.hpp"
#include "kinex/grid.hpp"

namespace kinex::io {

/// key -> value, keys sorted; later assignments win.
using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment; blank lines ignored. A line
/// without '=' or with an empty key is a config error.
ConfigMap parse_config(std::string_view text);
/// "key=value\n" lines in key order; hashed into manifests.
std::string canonical_config(const ConfigMap& config);
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Typed lookups with defaults; malformed values are config errors.
double get_double(const ConfigMap& c, const std::string& key, double fallback);
std::uint64_t get_u64(const ConfigMap& c, const std::string& key, std::uint64_t fallback);
bool get_bool(const ConfigMap& c, const std::string& key, bool fallback);
std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback);
std::vector<double> get_double_list(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback);
/// Rejects keys outside `allowed` (config error naming the first one).
void require_known(const ConfigMap& c, const std::vector<std::string>& allowed, const std::string& who);

/// Shortest round-trip text for a double ("%.17g").
std::string number(double v);
std::string table_csv(const experiments::Table& table);

void ensure_directory(const std::string& dir);
/// Writes bytes to dir/name; i/o error on failure. Returns the file name.
std::string write_file(const std::string& dir, const std::string& name, const std::string& content);

/// `x,value` rows at the cell midpoints plus a JSON sidecar (<name>.json)
/// holding x_max, cells, dx, mass and mean.
void write_density(const std::string& dir, const std::string& name, const GridDensity1D& q);

struct Manifest {
  std::string command;
  ConfigMap config;  // merged flags and config file
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  std::vector<std::string> outputs;
};

/// manifest.json: command, merged config, its FNV-1a hash, seed, event
/// count and output files. No timestamps, so reruns are byte-identical.
void write_manifest(const std::string& dir, const Manifest& manifest);

/// report.json, series.csv and one CSV per extra table. Returns file names.
std::vector<std::string> write_report(const std::string& dir, const experiments::StudyReport& report);

}  // namespace kinex::io
