#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kinex/experiments.hpp"
#include "kinex/io.hpp"
#include "kinex/runs.hpp"
#include "test_helpers.hpp"

using namespace kinex;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("kinex_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = io::parse_config("# header\nn = 10\n\nbin-width=0.5  # trailing\nn = 12\n  t =  3 \n");
  CHECK(c.size() == 3);
  CHECK(c.at("n") == "12");
  CHECK(c.at("bin_width") == "0.5");
  CHECK(c.at("t") == "3");
  CHECK(io::parse_config("").empty());
  CHECK_KX_ERROR(io::parse_config("n 10"), ErrorCode::config);
  CHECK_KX_ERROR(io::parse_config(" = 4"), ErrorCode::config);
}

TEST_CASE("typed getters") {
  const auto c = io::parse_config("a = 1.5\nb = x\nk = 42\nneg = -3\nflag = yes\nlist = 1, 2.5,4\n");
  CHECK(io::get_double(c, "a", 0.0) == 1.5);
  CHECK(io::get_double(c, "missing", 7.0) == 7.0);
  CHECK_KX_ERROR(io::get_double(c, "b", 0.0), ErrorCode::config);
  CHECK(io::get_u64(c, "k", 0) == 42);
  CHECK_KX_ERROR(io::get_u64(c, "neg", 0), ErrorCode::config);
  CHECK(io::get_bool(c, "flag", false));
  CHECK_KX_ERROR(io::get_bool(c, "a", false), ErrorCode::config);
  CHECK(io::get_double_list(c, "list", {}) == std::vector<double>{1.0, 2.5, 4.0});
  CHECK_KX_ERROR(io::require_known(c, {"a", "b"}, "test"), ErrorCode::config);
  io::require_known(io::parse_config("a = 1"), {"a", "b"}, "test");
}

TEST_CASE("hashing and number formatting") {
  CHECK(io::hex64(io::fnv1a("")) == "cbf29ce484222325");
  CHECK(io::hex64(io::fnv1a("a")) == "af63dc4c8601ec8c");
  CHECK(io::canonical_config(io::parse_config("b=2\na=1")) == "a=1\nb=2\n");
  CHECK(io::number(0.1) == "0.10000000000000001");
  CHECK(io::number(3.0) == "3");
  CHECK(io::number(NAN) == "nan");
  CHECK(io::number(-INFINITY) == "-inf");
}

TEST_CASE("report files") {
  experiments::StudyReport r;
  r.study = "demo";
  r.checks.push_back({"ok", true, 1.0, "fine"});
  r.checks.push_back({"bad", false, NAN, "not fine"});
  r.rates.push_back({"decay", 0.33, 0.32, 0.34});
  r.scalars["x"] = 2.0;
  r.series.columns = {"t", "y"};
  r.series.rows = {{0.0, 1.0}, {1.0, 0.5}};
  r.extra["more"] = r.series;
  CHECK_FALSE(r.passed());

  const auto dir = scratch("report");
  const auto files = io::write_report(dir.string(), r);
  CHECK(files == std::vector<std::string>{"report.json", "series.csv", "more.csv"});
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["study"] == "demo");
  CHECK(j["pass"] == false);
  CHECK(j["checks"][1]["value"].is_null());
  CHECK(j["rates"][0]["ci95"][1] == 0.34);
  CHECK(slurp(dir / "series.csv") == "t,y\n0,1\n1,0.5\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest has no wall-clock fields") {
  const auto dir = scratch("manifest");
  io::Manifest m{"simulate", io::parse_config("n = 4"), 9, 100, {"a.csv"}};
  io::write_manifest(dir.string(), m);
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(j["config_hash"] == io::hex64(io::fnv1a("n=4\n")));
  CHECK(j["seed"] == 9);
  CHECK(j.size() == 7);
  std::filesystem::remove_all(dir);
}

TEST_CASE("chaos study configuration errors") {
  const auto q0 = Equilibrium(1.0).on_grid(Grid1D(20.0, 400));
  experiments::ChaosStudyConfig c;
  c.n_list = {100, 100};
  CHECK_KX_ERROR(experiments::chaos_scaling(c, q0), ErrorCode::config);
  c.n_list = {10, 100};
  c.replicas = 5;
  CHECK_KX_ERROR(experiments::chaos_scaling(c, q0), ErrorCode::config);
  c.replicas = 20;
  c.declared_mean = 1.01;
  CHECK_KX_ERROR(experiments::chaos_scaling(c, q0), ErrorCode::config);
}

TEST_CASE("small chaos study is reproducible") {
  const auto q0 = Equilibrium(1.0).on_grid(Grid1D(20.0, 400));
  experiments::ChaosStudyConfig c;
  c.n_list = {20, 200};
  c.horizon = 1.0;
  c.snapshot_times = {0.0, 1.0};
  c.replicas = 10;
  c.seed = 3;
  const auto a = experiments::chaos_scaling(c, q0);
  const auto b = experiments::chaos_scaling(c, q0);
  CHECK(io::table_csv(a.series) == io::table_csv(b.series));
  CHECK(a.series.rows.size() == 4);
}

TEST_CASE("random bumps hit the requested mean") {
  Grid1D g(100.0, 10000);
  const auto q = experiments::random_bumps(g, 5.0, 42);
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(q.mean() == doctest::Approx(5.0).epsilon(1e-9));
  const auto r = experiments::random_bumps(g, 5.0, 43);
  CHECK(io::number(r[500]) != io::number(q[500]));
}

TEST_CASE("short histogram run conserves the mean") {
  const auto r = experiments::figure1_reproduction(5, 500, 50.0, 10.0);
  bool mean_ok = false;
  for (const auto& c : r.checks) {
    if (c.name == "mean_conserved") mean_ok = c.passed;
  }
  CHECK(mean_ok);
  CHECK(r.extra.count("overlay") == 1);
}

TEST_CASE("simulate run writes identical artifacts twice") {
  const auto cfg = io::parse_config("n = 50\nt = 5\ninit = constant:2\nseed = 11\nsnapshots = 1,5\n");
  const auto d1 = scratch("sim1"), d2 = scratch("sim2");
  const auto r1 = runs::run_simulate(cfg, d1.string());
  runs::run_simulate(cfg, d2.string());
  for (const auto& f : r1.outputs) CHECK(slurp(d1 / f) == slurp(d2 / f));
  CHECK(std::filesystem::exists(d1 / "manifest.json"));
  CHECK_KX_ERROR(runs::run_simulate(io::parse_config("n = 1"), d1.string()), ErrorCode::config);
  CHECK_KX_ERROR(runs::run_simulate(io::parse_config("bogus = 1"), d1.string()), ErrorCode::config);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("pde run rejects unstable steps and unknown studies") {
  const auto d = scratch("pde");
  CHECK_KX_ERROR(runs::run_pde(io::parse_config("dt = 1.5"), d.string()), ErrorCode::stability);
  CHECK_KX_ERROR(runs::run_study("nope", {}, d.string()), ErrorCode::invalid_argument);
  CHECK(runs::is_study("entropy"));
  CHECK_FALSE(runs::is_study("nope"));
  std::filesystem::remove_all(d);
}
