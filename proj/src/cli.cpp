#include "nlslab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nlslab/acceptance.hpp"
#include "nlslab/data.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/estimates.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/orlicz.hpp"
#include "nlslab/serialization.hpp"
#include "nlslab/variation.hpp"

namespace nlslab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- key tables

const std::vector<KeyInfo> kCommon{
    {"command", "", "subcommand to run when none is given on the command line"},
    {"seed", "0", "seed for every random draw of the run"},
    {"out", ".", "output directory"},
    {"threads", "0", "worker threads for sweeps (0: hardware concurrency)"},
};

std::vector<KeyInfo> grid_keys(const std::string& N, const std::string& m) {
  return {{"grid.N", N, "number of Fourier modes (power of two)"}, {"grid.m", m, "modes per unit frequency"}};
}

std::vector<KeyInfo> time_keys(const std::string& steps) {
  return {{"time.T", "1", "time horizon"}, {"time.M", steps, "time steps"}};
}

const std::vector<KeyInfo> kData{
    {"data.family", "gaussian", "flat_band, gaussian, power_decay, log_decay, random_phase, random_bumps or zero"},
    {"data.band_lo", "0", "band start for flat_band and random_phase"},
    {"data.band_hi", "1", "band end for flat_band and random_phase"},
    {"data.beta", "1", "power_decay exponent"},
    {"data.gamma", "3", "log_decay exponent"},
    {"data.width", "1", "gaussian width in x"},
    {"data.amplitude", "1", "overall amplitude"},
    {"data.random_amplitude", "false", "random_phase: random block amplitudes"},
    {"data.scale_to", "0", "rescale the data to this M_{2,4} norm (0: keep)"},
    {"data.file", "", "read the initial field from a field text file instead"},
};

std::vector<KeyInfo> concat(std::initializer_list<std::vector<KeyInfo>> parts) {
  std::vector<KeyInfo> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, std::vector<KeyInfo>>& key_table() {
  static const std::map<std::string, std::vector<KeyInfo>> table{
      {"norms",
       concat({grid_keys("1024", "8"), kData,
               {{"norms.list", "lebesgue:2 lebesgue:inf modulation:2 modulation:4 fourier_lebesgue:inf orlicz:3",
                 "norm specs kind:param; kinds lebesgue, sobolev, hsobolev, fourier_lebesgue, modulation, orlicz, "
                 "modulation_orlicz"}}})},
      {"evolve",
       concat({grid_keys("1024", "8"), time_keys("1000"), kData,
               {{"evolve.stride", "10", "record every stride-th step"},
                {"evolve.sign", "1", "+1 defocusing, -1 focusing"},
                {"evolve.dealias", "true", "2/3 rule on the cubic term"}}})},
      {"picard",
       concat({grid_keys("1024", "8"), time_keys("1000"), kData,
               {{"picard.iterations", "8", "Picard iterations"},
                {"picard.p", "4", "modulation index of the monitored norm"},
                {"picard.sign", "1", "+1 defocusing, -1 focusing"},
                {"picard.dealias", "true", "2/3 rule on the cubic term"}}})},
      {"verify-strichartz",
       concat({grid_keys("512", "16"), time_keys("1000"),
               {{"strichartz.p", "6", "time exponent (inf allowed)"},
                {"strichartz.q", "6", "space exponent"},
                {"strichartz.fields", "10", "random-phase fields"}}})},
      {"verify-bilinear",
       {{"bilinear.lambdas", "8,16,32,64,128", "lambda sweep"},
        {"bilinear.m", "32", "grid m of the sweep"},
        {"bilinear.window_scale", "20", "sweep window T_w = scale / (lambda + 2.5)"},
        {"bilinear.identity_N", "4096", "grid N of the identity check"},
        {"bilinear.identity_m", "64", "grid m of the identity check"},
        {"bilinear.identity_lambda", "10", "lambda of the identity check"}}},
      {"verify-restriction",
       {{"restriction.sizes", "4,8,16,32,64,128,256", "interval lengths |I|"},
        {"restriction.seeds", "20", "random-phase draws per size"}}},
      {"verify-embeddings",
       concat({grid_keys("512", "8"),
               {{"embeddings.samples", "50", "random fields"},
                {"embeddings.indices", "2,4,8", "modulation indices p"},
                {"embeddings.gamma", "3", "Orlicz parameter"}}})},
      {"verify-scaling",
       {{"scaling.gamma", "3", "log-decay exponent"},
        {"scaling.log_lambdas", "1,2,4,8", "ln lambda sweep"},
        {"scaling.band", "4", "allowed ratio ceiling"},
        {"scaling.sharp_N", "2", "sharpness example height"},
        {"scaling.sharp_M", "8", "sharpness example: lambda = e^{e^M}"}}},
      {"verify-persistence",
       concat({grid_keys("1024", "8"), time_keys("1000"),
               {{"persistence.stride", "10", "record every stride-th step"},
                {"persistence.gamma", "3", "Orlicz parameter"},
                {"persistence.target_norm", "0.1", "size of the data"},
                {"persistence.band", "4", "allowed ratio"},
                {"persistence.zero_data", "false", "use zero data"}}})},
      {"vpnorm",
       concat({grid_keys("128", "8"), time_keys("100"), kData,
               {{"vpnorm.p", "2", "variation exponent, >= 1"},
                {"vpnorm.source", "random", "random (seeded path) or evolve (adapted split-step path)"},
                {"vpnorm.samples", "12", "samples of a random path"},
                {"vpnorm.stride", "10", "evolve: keep every stride-th step"},
                {"vpnorm.tail", "false", "append the zero limit at +inf"},
                {"vpnorm.refine", "false", "evolve: double the sampling until the value changes < 1%"}}})},
      {"orlicz-conjugate",
       {{"orlicz.gamma", "3", "Orlicz parameter"},
        {"orlicz.level", "0", "0: Phi, 1: Phi-bar, 2: Phi_3"},
        {"orlicz.x_max", "10", "convexity scan range"},
        {"orlicz.sqrt_convex", "false", "choose C so that Phi(sqrt t) is convex"},
        {"orlicz.t", "1e-10,1e-8,1e-6,1e-4,1e-2,0.5", "arguments of the conjugate"},
        {"orlicz.sequence", "", "optional sequence for Luxemburg and conjugate norms"}}},
      {"acceptance", {{"acceptance.only", "", "criterion numbers to run (empty: all)"}}},
  };
  return table;
}

// Effective parameters: defaults overlaid with the given config.
class Params {
 public:
  Params(const RunConfig& given, const std::string& command) : command_(command) {
    for (const auto& k : command_keys(command)) values_.set(k.key, k.default_value);
    for (const auto& [k, v] : given.values()) {
      if (!values_.has(k)) throw ConfigError(k, "unknown key '" + k + "' for command " + command);
      values_.set(k, v);
    }
    values_.set("command", command);
  }
  const RunConfig& config() const { return values_; }
  std::string str(const std::string& k) const { return values_.get_string(k, ""); }
  double num(const std::string& k) const { return values_.get_double(k, 0); }
  int integer(const std::string& k) const {
    const long long v = values_.get_int(k, 0);
    if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(k, k + ": out of range");
    return static_cast<int>(v);
  }
  std::uint64_t u64(const std::string& k) const { return values_.get_u64(k, 0); }
  bool flag(const std::string& k) const { return values_.get_bool(k, false); }
  std::vector<double> list(const std::string& k) const { return values_.get_list(k, {}); }

  // Runs `f`, turning a violated module precondition into a ConfigError naming `key`.
  template <typename F>
  auto checked(const std::string& key, F&& f) const {
    try {
      return f();
    } catch (const PreconditionError& e) {
      throw ConfigError(key, e.what());
    } catch (const DomainError& e) {
      throw ConfigError(key, e.what());
    } catch (const RangeError& e) {
      throw ConfigError(key, e.what());
    }
  }

  FrequencyGrid grid() const {
    return checked("grid.N", [&] { return FrequencyGrid(integer("grid.N"), integer("grid.m")); });
  }
  EvolutionConfig evolution(const std::string& stride_key, const std::string& sign_key,
                            const std::string& dealias_key) const {
    EvolutionConfig c;
    c.horizon = num("time.T");
    c.steps = integer("time.M");
    c.output_stride = stride_key.empty() ? 1 : integer(stride_key);
    c.sign = sign_key.empty() ? 1.0 : num(sign_key);
    c.dealias = dealias_key.empty() ? true : flag(dealias_key);
    if (!(c.horizon > 0)) throw ConfigError("time.T", "time.T must be positive");
    if (c.steps < 1) throw ConfigError("time.M", "time.M must be at least 1");
    if (c.output_stride < 1 || c.steps % c.output_stride != 0)
      throw ConfigError(stride_key, stride_key + " must be positive and divide time.M");
    if (c.sign != 1.0 && c.sign != -1.0) throw ConfigError(sign_key, sign_key + " must be +1 or -1");
    return c;
  }

 private:
  std::string command_;
  RunConfig values_;
};

// ---------------------------------------------------------------- output

class Outputs {
 public:
  Outputs(const Params& params, std::ostream& log)
      : dir_(params.str("out")), hash_(output_hash(params.config())), log_(log), params_(params) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("out", "cannot create output directory " + dir_.string() + ": " + ec.message());
  }
  const std::string& hash() const { return hash_; }

  json envelope() const {
    json j;
    j["config_hash"] = hash_;
    j["command"] = params_.str("command");
    json p = json::object();
    for (const auto& [k, v] : params_.config().values())
      if (k != "out" && k != "threads" && k != "command") p[k] = v;
    j["parameters"] = p;
    return j;
  }
  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot write " + path.string());
    body(out);
    log_ << "wrote " << path.string() << "\n";
  }
  void write_json(const std::string& name, const json& j) {
    write(name, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  }
  void write_field(const std::string& name, const Field& u) {
    write(name, [&](std::ostream& o) {
      std::ostringstream text;
      write_field_text(text, u);
      const std::string s = text.str();
      const auto eol = s.find('\n');
      o << s.substr(0, eol + 1) << "# config_hash " << hash_ << "\n" << s.substr(eol + 1);
    });
  }
  void write_report(const EstimateReport& r) {
    auto j = report_to_json(r, hash_);
    j["parameters"] = envelope()["parameters"];
    write_json(r.id + ".json", j);
    write(r.id + ".csv", [&](std::ostream& o) { write_report_csv(o, r, hash_); });
    write(r.id + ".plot", [&](std::ostream& o) { write_report_plot(o, r, hash_); });
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::ostream& log_;
  const Params& params_;
};

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

// ---------------------------------------------------------------- data

Field initial_data(const Params& P) {
  Field u = [&] {
    if (const auto file = P.str("data.file"); !file.empty()) {
      std::ifstream in(file);
      if (!in) throw ConfigError("data.file", "cannot read " + file);
      return P.checked("data.file", [&] { return read_field_text(in); });
    }
    const FrequencyGrid grid = P.grid();
    const std::string family = P.str("data.family");
    if (family == "zero" || P.num("data.amplitude") == 0) return Field(grid);
    DataSpec spec;
    spec.family = P.checked("data.family", [&] { return parse_family(family); });
    spec.band_lo = P.num("data.band_lo");
    spec.band_hi = P.num("data.band_hi");
    spec.beta = P.num("data.beta");
    spec.gamma = P.num("data.gamma");
    spec.width = P.num("data.width");
    spec.amplitude = P.num("data.amplitude");
    spec.random_amplitude = P.flag("data.random_amplitude");
    spec.seed = P.u64("seed");
    return P.checked("data.family", [&] { return generate_data(grid, spec); });
  }();
  if (const double target = P.num("data.scale_to"); target != 0) {
    if (!(target > 0)) throw ConfigError("data.scale_to", "data.scale_to must be positive");
    const double norm = modulation_norm(u, 4.0);
    if (norm == 0) throw ConfigError("data.scale_to", "cannot rescale zero data");
    u *= target / norm;
  }
  return u;
}

// ---------------------------------------------------------------- norms

struct NamedNorm {
  std::string spec;
  std::function<double(const Field&)> eval;
};

std::vector<NamedNorm> parse_norm_list(const std::string& text) {
  std::vector<NamedNorm> out;
  std::string item;
  std::istringstream in(text);
  while (in >> item) {
    if (item.back() == ',') item.pop_back();
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("norms.list", "norm spec '" + item + "' needs kind:param");
    const std::string kind = item.substr(0, colon);
    const double a = parse_number("norms.list", item.substr(colon + 1));
    std::function<double(const Field&)> f;
    if (kind == "lebesgue") {
      f = [a](const Field& u) { return lebesgue_norm(u, a); };
    } else if (kind == "sobolev" || kind == "hsobolev") {
      const bool homogeneous = kind == "hsobolev";
      f = [a, homogeneous](const Field& u) { return sobolev_norm(u, a, homogeneous); };
    } else if (kind == "fourier_lebesgue") {
      f = [a](const Field& u) { return fourier_lebesgue_norm(u, a); };
    } else if (kind == "modulation") {
      f = [a](const Field& u) { return modulation_norm(u, a); };
    } else if (kind == "orlicz" || kind == "modulation_orlicz") {
      const auto phi = std::make_shared<YoungFunction>(YoungFunction::standard_instance(a, 0));
      if (kind == "orlicz")
        f = [phi](const Field& u) { return luxemburg_frequency_norm(u, *phi); };
      else
        f = [phi](const Field& u) { return modulation_orlicz_norm(u, *phi); };
    } else {
      throw ConfigError("norms.list", "unknown norm kind '" + kind + "'");
    }
    out.push_back({item, f});
  }
  if (out.empty()) throw ConfigError("norms.list", "norms.list is empty");
  return out;
}

int cmd_norms(const Params& P, Outputs& out, std::ostream& log) {
  const auto specs = parse_norm_list(P.str("norms.list"));
  const Field u = initial_data(P);
  json values = json::object();
  for (const auto& n : specs) {
    const double v = P.checked("norms.list", [&] { return n.eval(u); });
    values[n.spec] = number_to_json(v);
    log << n.spec << " = " << format_number(v) << "\n";
  }
  auto j = out.envelope();
  j["grid"] = {{"N", u.grid().num_modes()}, {"m", u.grid().modes_per_unit()}};
  j["norms"] = values;
  out.write_json("norms.json", j);
  out.write("norms.csv", [&](std::ostream& o) {
    o << "# config_hash " << out.hash() << "\nnorm,value\n";
    for (const auto& n : specs) o << n.spec << ',' << format_number(n.eval(u)) << '\n';
  });
  return kExitPass;
}

// ---------------------------------------------------------------- evolve / picard

int cmd_evolve(const Params& P, Outputs& out, std::ostream& log) {
  const auto cfg = P.evolution("evolve.stride", "evolve.sign", "evolve.dealias");
  const Field u0 = initial_data(P);
  const auto traj = splitstep_evolve(u0, cfg);
  std::vector<double> times, masses, energies, m24;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    times.push_back(traj.times()[k]);
    masses.push_back(mass(traj.frame(k)));
    energies.push_back(energy(traj.frame(k), cfg.sign));
    m24.push_back(modulation_norm(traj.frame(k), 4.0));
  }
  double mass_drift = 0, energy_drift = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    mass_drift = std::max(mass_drift, std::abs(masses[k] - masses[0]) / (masses[0] > 0 ? masses[0] : 1.0));
    energy_drift = std::max(energy_drift, std::abs(energies[k] - energies[0]) /
                                              (std::abs(energies[0]) > 0 ? std::abs(energies[0]) : 1.0));
  }
  auto j = out.envelope();
  j["times"] = numbers(times);
  j["mass"] = numbers(masses);
  j["energy"] = numbers(energies);
  j["modulation_2_4"] = numbers(m24);
  j["max_relative_mass_drift"] = number_to_json(mass_drift);
  j["max_relative_energy_drift"] = number_to_json(energy_drift);
  out.write_json("evolve.json", j);
  out.write("evolve.csv", [&](std::ostream& o) {
    o << "# config_hash " << out.hash() << "\nt,mass,energy,modulation_2_4\n";
    for (std::size_t k = 0; k < times.size(); ++k)
      o << format_number(times[k]) << ',' << format_number(masses[k]) << ',' << format_number(energies[k]) << ','
        << format_number(m24[k]) << '\n';
  });
  out.write_field("evolve_final.field", traj.frames().back());
  log << "frames " << traj.size() << ", mass drift " << format_number(mass_drift) << "\n";
  return kExitPass;
}

int cmd_picard(const Params& P, Outputs& out, std::ostream& log) {
  const auto cfg = P.evolution("", "picard.sign", "picard.dealias");
  PicardOptions o;
  o.horizon = cfg.horizon;
  o.steps = cfg.steps;
  o.iterations = P.integer("picard.iterations");
  o.sign = cfg.sign;
  o.dealias = cfg.dealias;
  o.modulation_index = P.num("picard.p");
  if (o.iterations < 2) throw ConfigError("picard.iterations", "picard.iterations must be at least 2");
  if (!(o.modulation_index >= 1)) throw ConfigError("picard.p", "picard.p must be at least 1");
  const Field u0 = initial_data(P);
  const auto result = picard_iterate(u0, o, modulation_monitor<double>(o.modulation_index));
  const auto reference = splitstep_evolve(u0, cfg);
  double gap = 0;
  for (std::size_t k = 0; k < reference.size(); ++k)
    gap = std::max(gap, modulation_norm(result.final_iterate.frame(k) - reference.frame(k), o.modulation_index));
  auto j = out.envelope();
  j["differences"] = numbers(result.differences);
  j["ratios"] = numbers(result.ratios);
  j["coefficient"] = number_to_json(result.coefficient);
  j["diverged"] = result.diverged;
  j["splitstep_gap"] = number_to_json(gap);
  out.write_json("picard.json", j);
  out.write("picard.csv", [&](std::ostream& os) {
    os << "# config_hash " << out.hash() << "\nn,difference,ratio\n";
    for (std::size_t n = 0; n < result.differences.size(); ++n)
      os << n << ',' << format_number(result.differences[n]) << ','
         << format_number(n == 0 ? NAN : result.ratios[n - 1]) << '\n';
  });
  out.write_field("picard_final.field", result.final_iterate.frames().back());
  log << "picard: " << (result.diverged ? "diverged" : "contracting") << ", gap to split-step "
      << format_number(gap) << "\n";
  return result.diverged ? kExitCriterionFailure : kExitPass;
}

// ---------------------------------------------------------------- verifiers

int finish(const EstimateReport& r, Outputs& out, std::ostream& log) {
  out.write_report(r);
  for (const auto& c : r.checks)
    log << (c.passed ? "  ok    " : "  FAIL  ") << c.name << ' ' << format_number(c.value) << ' ' << c.relation
        << ' ' << format_number(c.threshold) << "\n";
  log << r.id << ": " << verdict_name(r.verdict) << "\n";
  return r.passed() ? kExitPass : kExitCriterionFailure;
}

int cmd_strichartz(const Params& P, Outputs& out, std::ostream& log) {
  StrichartzOptions o;
  o.p = P.num("strichartz.p");
  o.q = P.num("strichartz.q");
  P.checked("strichartz.p", [&] {
    check_admissible(o.p, o.q);
    return 0;
  });
  o.N = P.integer("grid.N");
  o.m = P.integer("grid.m");
  P.grid();
  o.T = P.num("time.T");
  o.steps = P.integer("time.M");
  o.random_fields = P.integer("strichartz.fields");
  if (P.u64("seed") != 0) o.seed = P.u64("seed");
  o.threads = static_cast<unsigned>(P.integer("threads"));
  return finish(P.checked("strichartz.p", [&] { return verify_strichartz(o); }), out, log);
}

int cmd_bilinear(const Params& P, Outputs& out, std::ostream& log) {
  BilinearOptions o;
  o.lambdas = P.list("bilinear.lambdas");
  o.sweep_m = P.integer("bilinear.m");
  o.window_scale = P.num("bilinear.window_scale");
  o.identity_N = P.integer("bilinear.identity_N");
  o.identity_m = P.integer("bilinear.identity_m");
  o.identity_lambda = P.num("bilinear.identity_lambda");
  o.threads = static_cast<unsigned>(P.integer("threads"));
  return finish(P.checked("bilinear.lambdas", [&] { return verify_bilinear_inequality(o); }), out, log);
}

int cmd_restriction(const Params& P, Outputs& out, std::ostream& log) {
  RestrictionOptions o;
  o.sizes.clear();
  for (double s : P.list("restriction.sizes")) {
    if (s != std::floor(s) || s < 2) throw ConfigError("restriction.sizes", "sizes must be integers >= 2");
    o.sizes.push_back(static_cast<int>(s));
  }
  o.seeds = P.integer("restriction.seeds");
  if (P.u64("seed") != 0) o.first_seed = P.u64("seed");
  o.threads = static_cast<unsigned>(P.integer("threads"));
  return finish(P.checked("restriction.sizes", [&] { return verify_restriction_L4(o); }), out, log);
}

int cmd_embeddings(const Params& P, Outputs& out, std::ostream& log) {
  EmbeddingOptions o;
  P.grid();
  o.N = P.integer("grid.N");
  o.m = P.integer("grid.m");
  o.samples = P.integer("embeddings.samples");
  o.modulation_indices = P.list("embeddings.indices");
  o.gamma = P.num("embeddings.gamma");
  if (P.u64("seed") != 0) o.seed = P.u64("seed");
  return finish(P.checked("embeddings.indices", [&] { return verify_embeddings(o); }), out, log);
}

int cmd_scaling(const Params& P, Outputs& out, std::ostream& log) {
  ScalingOptions o;
  o.gamma = P.num("scaling.gamma");
  o.log_lambdas = P.list("scaling.log_lambdas");
  o.band = P.num("scaling.band");
  o.sharp_N = P.num("scaling.sharp_N");
  o.sharp_M = P.num("scaling.sharp_M");
  return finish(P.checked("scaling.gamma", [&] { return verify_scaling_law(o); }), out, log);
}

int cmd_persistence(const Params& P, Outputs& out, std::ostream& log) {
  const auto cfg = P.evolution("persistence.stride", "", "");
  PersistenceOptions o;
  P.grid();
  o.N = P.integer("grid.N");
  o.m = P.integer("grid.m");
  o.T = cfg.horizon;
  o.steps = cfg.steps;
  o.stride = cfg.output_stride;
  o.gamma = P.num("persistence.gamma");
  o.target_norm = P.num("persistence.target_norm");
  o.band = P.num("persistence.band");
  o.zero_data = P.flag("persistence.zero_data");
  return finish(P.checked("persistence.gamma", [&] { return verify_norm_persistence(o); }), out, log);
}

// ---------------------------------------------------------------- vpnorm / orlicz

int cmd_vpnorm(const Params& P, Outputs& out, std::ostream& log) {
  const double p = P.num("vpnorm.p");
  if (!(p >= 1) || std::isinf(p)) throw ConfigError("vpnorm.p", "vpnorm.p must lie in [1, inf)");
  const bool tail = P.flag("vpnorm.tail");
  const std::string source = P.str("vpnorm.source");
  const TimeSampledPath path = [&] {
    if (source == "random") {
      const int n = P.integer("vpnorm.samples");
      if (n < 1) throw ConfigError("vpnorm.samples", "vpnorm.samples must be positive");
      const FrequencyGrid grid = P.grid();
      std::mt19937_64 rng(P.u64("seed"));
      std::normal_distribution<double> normal(0, 1);
      std::uniform_real_distribution<double> gap(0.01, 1);
      std::vector<double> times;
      std::vector<Field> values;
      double t = 0;
      for (int k = 0; k < n; ++k) {
        times.push_back(t += gap(rng));
        Field f(grid);
        for (Eigen::Index s = 0; s < f.size(); ++s)
          if (std::abs(f.xi(s)) < 2) f.coeffs()[s] = {normal(rng), normal(rng)};
        values.push_back(std::move(f));
      }
      return TimeSampledPath(times, values, tail);
    }
    if (source == "evolve") {
      const auto cfg = P.evolution("vpnorm.stride", "", "");
      return adapted_path(splitstep_evolve(initial_data(P), cfg), tail);
    }
    throw ConfigError("vpnorm.source", "vpnorm.source must be random or evolve");
  }();
  const auto result = vp_norm_detailed(path, p);
  auto j = out.envelope();
  j["samples"] = path.size();
  j["variation"] = variation_to_json(result);
  {
    TimeSampledPath other = path;
    other.tail = !tail;
    const double flipped = vp_norm(other, p);
    j["tail_variants"] = {{"with_tail", number_to_json(tail ? result.value : flipped)},
                          {"without_tail", number_to_json(tail ? flipped : result.value)}};
  }
  bool agrees = true;
  if (path.size() <= 12) {
    const double brute = vp_norm_bruteforce(path, p);
    agrees = brute == result.value;
    j["bruteforce"] = number_to_json(brute);
    j["bruteforce_agrees"] = agrees;
  }
  if (source == "evolve" && P.flag("vpnorm.refine")) {
    const auto cfg = P.evolution("vpnorm.stride", "", "");
    const Field u0 = initial_data(P);
    const auto refined = vp_norm_refined(
        [&](int level) {
          EvolutionConfig c = cfg;
          c.steps = cfg.steps << level;
          return adapted_path(splitstep_evolve(u0, c), tail);
        },
        p);
    j["refined"] = {{"value", number_to_json(refined.value)},
                    {"levels", refined.levels},
                    {"last_change", number_to_json(refined.last_change)},
                    {"converged", refined.converged}};
  }
  out.write_json("vpnorm.json", j);
  log << "V^" << format_number(p) << " norm " << format_number(result.value) << " over " << path.size()
      << " samples\n";
  return agrees ? kExitPass : kExitCriterionFailure;
}

int cmd_orlicz(const Params& P, Outputs& out, std::ostream& log) {
  const double gamma = P.num("orlicz.gamma");
  const int level = P.integer("orlicz.level");
  if (!(gamma > 0)) throw ConfigError("orlicz.gamma", "orlicz.gamma must be positive");
  if (level < 0 || level > 2) throw ConfigError("orlicz.level", "orlicz.level must be 0, 1 or 2");
  const auto phi = P.checked("orlicz.gamma", [&] {
    return YoungFunction::standard_instance(gamma, level, P.num("orlicz.x_max"), P.flag("orlicz.sqrt_convex"));
  });
  const auto ts = P.list("orlicz.t");
  std::vector<double> values, ratios;
  for (double t : ts) {
    if (!(t > 0)) throw ConfigError("orlicz.t", "orlicz.t entries must be positive");
    const double v = P.checked("orlicz.t", [&] { return phi.conjugate(t); });
    values.push_back(v);
    // small-t behaviour t (ln 1/t)^{-1/alpha}
    ratios.push_back(t < 1 ? v / (t * std::pow(std::log(1 / t), -1 / phi.alpha())) : NAN);
  }
  auto j = out.envelope();
  j["young_function"] = young_function_to_json(phi);
  j["t"] = numbers(ts);
  j["conjugate"] = numbers(values);
  j["asymptotic_ratio"] = numbers(ratios);
  if (!P.str("orlicz.sequence").empty()) {
    const auto a = P.list("orlicz.sequence");
    j["sequence"] = {{"luxemburg", number_to_json(P.checked("orlicz.sequence", [&] {
                        return luxemburg_sequence_norm(a, phi);
                      }))},
                     {"conjugate", number_to_json(P.checked("orlicz.sequence", [&] {
                        return conjugate_sequence_norm(a, phi);
                      }))}};
  }
  out.write_json("orlicz_conjugate.json", j);
  out.write("orlicz_conjugate.csv", [&](std::ostream& o) {
    o << "# config_hash " << out.hash() << "\nt,conjugate,asymptotic_ratio\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
      o << format_number(ts[i]) << ',' << format_number(values[i]) << ',' << format_number(ratios[i]) << '\n';
  });
  log << "Phi: alpha " << format_number(phi.alpha()) << " beta " << format_number(phi.beta()) << " C "
      << format_number(phi.C()) << "\n";
  return kExitPass;
}

// ---------------------------------------------------------------- acceptance

int cmd_acceptance(const Params& P, Outputs& out, std::ostream& log) {
  AcceptanceOptions o;
  o.threads = static_cast<unsigned>(P.integer("threads"));
  for (double v : P.list("acceptance.only")) {
    if (v != std::floor(v) || v < 1 || v > 11) throw ConfigError("acceptance.only", "criteria are numbered 1 to 11");
    o.only.push_back(static_cast<int>(v));
  }
  log << "criterion                                 result\n";
  const auto results = run_acceptance(o, [&](const CriterionResult& r) { log << format_criterion(r) << "\n"; });
  int failed = 0;
  json rows = json::array();
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
    // no timings: the file must not change between identical runs
    rows.push_back({{"number", r.number}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  auto j = out.envelope();
  j["criteria"] = rows;
  j["failed"] = failed;
  out.write_json("acceptance.json", j);
  log << results.size() << " criteria, " << failed << " failed\n";
  return failed == 0 ? kExitPass : kExitCriterionFailure;
}

using Handler = int (*)(const Params&, Outputs&, std::ostream&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"norms", cmd_norms},
      {"evolve", cmd_evolve},
      {"picard", cmd_picard},
      {"verify-strichartz", cmd_strichartz},
      {"verify-bilinear", cmd_bilinear},
      {"verify-restriction", cmd_restriction},
      {"verify-embeddings", cmd_embeddings},
      {"verify-scaling", cmd_scaling},
      {"verify-persistence", cmd_persistence},
      {"vpnorm", cmd_vpnorm},
      {"orlicz-conjugate", cmd_orlicz},
      {"acceptance", cmd_acceptance},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"norms",
                                              "evolve",
                                              "picard",
                                              "verify-strichartz",
                                              "verify-bilinear",
                                              "verify-restriction",
                                              "verify-embeddings",
                                              "verify-scaling",
                                              "verify-persistence",
                                              "vpnorm",
                                              "orlicz-conjugate",
                                              "acceptance"};
  return names;
}

std::vector<KeyInfo> command_keys(const std::string& command) {
  const auto it = key_table().find(command);
  if (it == key_table().end()) throw ConfigError("command", "unknown command '" + command + "'");
  return concat({kCommon, it->second});
}

std::string output_hash(const RunConfig& config) {
  RunConfig trimmed;
  for (const auto& [k, v] : config.values())
    if (k != "out" && k != "threads") trimmed.set(k, v);
  return trimmed.hash();
}

int run_command(const RunConfig& config, std::ostream& log) {
  const std::string command = config.get_string("command", "");
  if (command.empty()) throw ConfigError("command", "no command given");
  const auto handler = handlers().find(command);
  if (handler == handlers().end()) throw ConfigError("command", "unknown command '" + command + "'");
  const Params params(config, command);
  Outputs out(params, log);
  return handler->second(params, out, log);
}

std::string error_json(const std::string& kind, const std::string& key, const std::string& message) {
  return json{{"error", kind}, {"key", key}, {"message", message}}.dump();
}

}  // namespace nlslab
