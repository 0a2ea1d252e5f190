#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlslab/cli.hpp"
#include "nlslab/config.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/serialization.hpp"
#include "test_util.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh scratch directory per call, under the system temp dir.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nlslab_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(RunConfig c, const fs::path& out) {
  c.set("out", out.string());
  std::ostringstream log;
  return run_command(c, log);
}

std::string error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key().empty() ? "<none>" : e.key();
  }
  return "<no error>";
}

EstimateReport sample_report() {
  EstimateReport r;
  r.id = "demo";
  r.sweep_name = "lambda";
  r.sweep = {8, 16, 32};
  r.ratios = {0.5, 0.35, 0.25};
  r.fit_abscissa = "lambda";
  r.fit_x = r.sweep;
  r.fit_y = r.ratios;
  r.fit = fit_power_law(r.fit_x, r.fit_y);
  r.checks.push_back(make_check("c", 0.1, "<=", 1));
  set_bounded_verdict(r);
  return r;
}

}  // namespace

TEST_CASE("config text: sections, comments and whitespace") {
  const auto c = RunConfig::parse(
      "# run\n"
      "seed = 42\n"
      "\n"
      "[grid]\n"
      "  N = 1024   ; trailing comment\n"
      "m=8\n"
      "[data]\n"
      "family = flat_band\n");
  CHECK(c.get_u64("seed", 0) == 42);
  CHECK(c.get_int("grid.N", 0) == 1024);
  CHECK(c.get_int("grid.m", 0) == 8);
  CHECK(c.get_string("data.family", "") == "flat_band");
  CHECK(c.values().size() == 4);
}

TEST_CASE("config text: malformed input names the key") {
  CHECK(error_key([] { RunConfig::parse("a = 1\na = 2\n"); }) == "a");
  CHECK(error_key([] { RunConfig::parse("[g]\nN = 1\n[g]\nN = 2\n"); }) == "g.N");
  CHECK(error_key([] { RunConfig::parse("no equals sign\n"); }) == "<none>");
  CHECK(error_key([] { RunConfig::parse("[open\n"); }) == "<none>");
  CHECK(error_key([] { RunConfig::parse("bad key! = 3\n"); }) == "bad key!");
}

TEST_CASE("config values: typed access") {
  auto c = RunConfig::parse("x = 2.5\nn = 12\nbad = 1.5e\nflag = yes\nlist = 1, 2.5 ,inf\nseed = -1\nk = 3.5\n");
  CHECK(c.get_double("x", 0) == 2.5);
  CHECK(c.get_double("missing", 7) == 7);
  CHECK(c.get_int("n", 0) == 12);
  CHECK(c.get_bool("flag", false));
  const auto list = c.get_list("list", {});
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);
  CHECK(std::isinf(list[2]));
  CHECK(error_key([&] { c.get_double("bad", 0); }) == "bad");
  CHECK(error_key([&] { c.get_u64("seed", 0); }) == "seed");
  CHECK(error_key([&] { c.get_int("k", 0); }) == "k");
  CHECK(error_key([&] { c.get_bool("x", false); }) == "x");
}

TEST_CASE("config hash: FNV-1a reference values and order independence") {
  // published FNV-1a 64-bit test vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);

  const auto a = RunConfig::parse("x = 1\n[grid]\nN = 64\n");
  const auto b = RunConfig::parse("grid.N = 64\nx = 1 # same\n");
  const auto c = RunConfig::parse("grid.N = 64\nx = 2\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.canonical() == "grid.N = 64\nx = 1\n");

  RunConfig d = a;
  d.set("out", "/somewhere");
  d.set("threads", "3");
  CHECK(output_hash(d) == output_hash(a));
}

TEST_CASE("field text and JSON round trips are exact") {
  std::mt19937_64 rng(5);
  const FrequencyGrid g(256, 8);
  const Field u = testutil::random_field(g, rng, -3, 3);

  std::stringstream text;
  write_field_text(text, u);
  const Field back = read_field_text(text);
  CHECK(back.grid() == g);
  CHECK((back.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() == 0.0);

  const auto j = nlohmann::json::parse(field_to_json(u).dump());
  const Field from_json = field_from_json(j);
  CHECK((from_json.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(j["encoding"] == "text");
}

TEST_CASE("field text: malformed input is rejected") {
  std::istringstream no_header("1 0 0\n");
  CHECK_THROWS_AS(read_field_text(no_header), PreconditionError);
  std::istringstream outside("# nlslab-field N 16 m 1\n100 1 0\n");
  CHECK_THROWS_AS(read_field_text(outside), PreconditionError);
  std::istringstream bad_row("# nlslab-field N 16 m 1\n1 x\n");
  CHECK_THROWS_AS(read_field_text(bad_row), PreconditionError);
}

TEST_CASE("non-finite numbers stay valid JSON") {
  CHECK(number_to_json(INFINITY) == "inf");
  CHECK(number_to_json(-INFINITY) == "-inf");
  CHECK(number_to_json(NAN) == "nan");
  CHECK(number_to_json(1.5) == 1.5);
}

TEST_CASE("report formats embed the hash and are deterministic") {
  const auto r = sample_report();
  std::ostringstream j1, j2, csv, plot;
  j1 << report_to_json(r, "0123456789abcdef").dump(2);
  j2 << report_to_json(sample_report(), "0123456789abcdef").dump(2);
  CHECK(j1.str() == j2.str());
  CHECK(j1.str().find("0123456789abcdef") != std::string::npos);

  write_report_csv(csv, r, "0123456789abcdef");
  CHECK(csv.str().find("# config_hash 0123456789abcdef") == 0);
  CHECK(csv.str().find("index,lambda,ratio\n0,8,0.5\n") != std::string::npos);

  write_report_plot(plot, r, "0123456789abcdef");
  std::istringstream lines(plot.str());
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cols(line);
    double x, y, fit;
    REQUIRE(bool(cols >> x >> y >> fit));
    CHECK(x == r.fit_x[rows]);
    CHECK(fit == doctest::Approx(std::exp(r.fit->intercept) * std::pow(x, r.fit->exponent)));
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(plot.str().find("config_hash 0123456789abcdef") != std::string::npos);
}

TEST_CASE("norms on the unit flat band: M_{2,4} = 1") {
  const auto dir = scratch("norms");
  RunConfig c;
  c.set("command", "norms");
  c.set("data.family", "flat_band");
  c.set("norms.list", "modulation:4, lebesgue:2");
  CHECK(run(c, dir) == kExitPass);
  const auto j = nlohmann::json::parse(slurp(dir / "norms.json"));
  CHECK(j["norms"]["modulation:4"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["norms"]["lebesgue:2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(slurp(dir / "norms.csv").find(j["config_hash"].get<std::string>()) != std::string::npos);
}

TEST_CASE("evolve with zero data gives a zero trajectory") {
  const auto dir = scratch("zero");
  RunConfig c;
  c.set("command", "evolve");
  c.set("data.family", "zero");
  c.set("time.M", "100");
  CHECK(run(c, dir) == kExitPass);
  const auto j = nlohmann::json::parse(slurp(dir / "evolve.json"));
  for (const auto& m : j["mass"]) CHECK(m.get<double>() == 0.0);
  std::ifstream field(dir / "evolve_final.field");
  CHECK(read_field_text(field).coeffs().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("repeated runs are byte-identical and carry the hash") {
  RunConfig c;
  c.set("command", "evolve");
  c.set("data.family", "random_phase");
  c.set("data.band_lo", "-2");
  c.set("data.band_hi", "2");
  c.set("seed", "11");
  c.set("time.M", "200");
  c.set("evolve.stride", "20");
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run(c, a) == kExitPass);
  REQUIRE(run(c, b) == kExitPass);
  for (const char* name : {"evolve.json", "evolve.csv", "evolve_final.field"}) CHECK(slurp(a / name) == slurp(b / name));
  const auto hash = nlohmann::json::parse(slurp(a / "evolve.json"))["config_hash"].get<std::string>();
  for (const char* name : {"evolve.csv", "evolve_final.field"}) CHECK(slurp(a / name).find(hash) != std::string::npos);

  c.set("seed", "12");
  const auto other = scratch("det_c");
  REQUIRE(run(c, other) == kExitPass);
  CHECK(slurp(other / "evolve.json") != slurp(a / "evolve.json"));
}

TEST_CASE("a saved field feeds back in as data") {
  const auto dir = scratch("file");
  RunConfig c;
  c.set("command", "evolve");
  c.set("data.family", "gaussian");
  c.set("time.M", "50");
  c.set("evolve.stride", "50");
  REQUIRE(run(c, dir) == kExitPass);

  RunConfig n;
  n.set("command", "norms");
  n.set("data.file", (dir / "evolve_final.field").string());
  n.set("norms.list", "lebesgue:2");
  REQUIRE(run(n, dir / "again") == kExitPass);
  const auto evolved = nlohmann::json::parse(slurp(dir / "evolve.json"));
  const auto norms = nlohmann::json::parse(slurp(dir / "again" / "norms.json"));
  const double mass = evolved["mass"].back().get<double>();
  CHECK(norms["norms"]["lebesgue:2"].get<double>() == doctest::Approx(std::sqrt(mass)).epsilon(1e-12));
}

TEST_CASE("invalid configs are rejected before any work, naming the key") {
  const auto dir = scratch("invalid");
  auto with = [&](std::initializer_list<std::pair<const char*, const char*>> kv) {
    RunConfig c;
    for (const auto& [k, v] : kv) c.set(k, v);
    return error_key([&] { run(c, dir); });
  };
  CHECK(with({}) == "command");
  CHECK(with({{"command", "frobnicate"}}) == "command");
  CHECK(with({{"command", "norms"}, {"typo.key", "1"}}) == "typo.key");
  CHECK(with({{"command", "norms"}, {"grid.N", "1000"}}) == "grid.N");
  CHECK(with({{"command", "norms"}, {"data.family", "sawtooth"}}) == "data.family");
  CHECK(with({{"command", "norms"}, {"norms.list", "besov:2"}}) == "norms.list");
  CHECK(with({{"command", "evolve"}, {"time.M", "ten"}}) == "time.M");
  CHECK(with({{"command", "evolve"}, {"evolve.stride", "7"}}) == "evolve.stride");
  CHECK(with({{"command", "verify-strichartz"}, {"strichartz.p", "5"}}) == "strichartz.p");
  CHECK(with({{"command", "vpnorm"}, {"vpnorm.p", "0.5"}}) == "vpnorm.p");
  CHECK(with({{"command", "acceptance"}, {"acceptance.only", "12"}}) == "acceptance.only");
  CHECK(error_json("config", "grid.N", "bad") == R"({"error":"config","key":"grid.N","message":"bad"})");
}

TEST_CASE("vpnorm: DP agrees with brute force on short paths") {
  const auto dir = scratch("vp");
  RunConfig c;
  c.set("command", "vpnorm");
  c.set("seed", "3");
  c.set("vpnorm.samples", "10");
  c.set("vpnorm.tail", "true");
  CHECK(run(c, dir) == kExitPass);
  const auto j = nlohmann::json::parse(slurp(dir / "vpnorm.json"));
  CHECK(j["bruteforce_agrees"].get<bool>());
  CHECK(j["variation"]["value"].get<double>() == j["bruteforce"].get<double>());
}

TEST_CASE("every command has a key table and a handler") {
  for (const auto& name : command_names()) {
    const auto keys = command_keys(name);
    CHECK(keys.size() >= 4);
    RunConfig c;
    c.set("command", name);
    c.set("no.such.key", "1");
    CHECK(error_key([&] { run(c, scratch("keys")); }) == "no.such.key");
  }
}
