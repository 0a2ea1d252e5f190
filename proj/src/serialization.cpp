#include "nlslab/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nlslab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

void write_field_text(std::ostream& out, const Field& u) {
  const auto& g = u.grid();
  out << "# nlslab-field N " << g.num_modes() << " m " << g.modes_per_unit() << "\n";
  out << "# j re im, xi_j = j / m\n";
  for (Eigen::Index s = 0; s < u.size(); ++s) {
    const auto c = u.coeffs()[s];
    if (c == 0.0) continue;
    out << g.index_of(s) << ' ' << format_number(c.real()) << ' ' << format_number(c.imag()) << '\n';
  }
}

Field read_field_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError("field text: empty input");
  std::istringstream head(line);
  std::string hash, tag, nkey, mkey;
  int N = 0, m = 0;
  head >> hash >> tag >> nkey >> N >> mkey >> m;
  if (hash != "#" || tag != "nlslab-field" || nkey != "N" || mkey != "m")
    throw PreconditionError("field text: missing '# nlslab-field N <N> m <m>' header");
  Field u{FrequencyGrid(N, m)};
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long j = 0;
    std::string re, im;
    if (!(row >> j >> re >> im)) throw PreconditionError("field text: bad line " + std::to_string(number));
    if (j < u.grid().min_index() || j > u.grid().max_index())
      throw PreconditionError("field text: mode " + std::to_string(j) + " outside the grid");
    u.at(static_cast<int>(j)) = {std::stod(re), std::stod(im)};
  }
  return u;
}

nlohmann::json field_to_json(const Field& u) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index s = 0; s < u.size(); ++s) {
    const auto c = u.coeffs()[s];
    if (c != 0.0) coeffs.push_back({u.grid().index_of(s), c.real(), c.imag()});
  }
  return {{"grid", {{"N", u.grid().num_modes()}, {"m", u.grid().modes_per_unit()}}},
          {"encoding", "text"},
          {"coeffs", coeffs}};
}

Field field_from_json(const nlohmann::json& j) {
  try {
    Field u{FrequencyGrid(j.at("grid").at("N").get<int>(), j.at("grid").at("m").get<int>())};
    for (const auto& row : j.at("coeffs")) {
      const int index = row.at(0).get<int>();
      if (index < u.grid().min_index() || index > u.grid().max_index())
        throw PreconditionError("field json: mode " + std::to_string(index) + " outside the grid");
      u.at(index) = {row.at(1).get<double>(), row.at(2).get<double>()};
    }
    return u;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("field json: ") + e.what());
  }
}

nlohmann::json young_function_to_json(const YoungFunction& phi) {
  return {{"alpha", phi.alpha()}, {"beta", phi.beta()}, {"C", phi.C()}, {"x_max", phi.x_max()}};
}

nlohmann::json variation_to_json(const VariationResult& r) {
  return {{"value", r.value}, {"argmax_partition", r.partition}};
}

nlohmann::json report_to_json(const EstimateReport& report, const std::string& config_hash) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["estimate_id"] = report.id;
  j["sweep_name"] = report.sweep_name;
  nlohmann::json sweep = nlohmann::json::array(), ratios = nlohmann::json::array();
  for (double v : report.sweep) sweep.push_back(number_to_json(v));
  for (double v : report.ratios) ratios.push_back(number_to_json(v));
  j["sweep"] = sweep;
  j["ratios"] = ratios;
  if (report.fit) {
    j["fit"] = {{"abscissa", report.fit_abscissa},
                {"exponent", number_to_json(report.fit->exponent)},
                {"intercept", number_to_json(report.fit->intercept)},
                {"residual", number_to_json(report.fit->residual)}};
  } else {
    j["fit"] = nullptr;
  }
  j["predicted_law"] = report.predicted_law;
  j["predicted_exponent"] = report.predicted_exponent;
  j["band"] = number_to_json(report.band);
  j["verdict"] = verdict_name(report.verdict);
  j["passed"] = report.passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"value", number_to_json(c.value)},
                      {"relation", c.relation},
                      {"threshold", number_to_json(c.threshold)},
                      {"passed", c.passed}});
  j["checks"] = checks;
  nlohmann::json grid = nlohmann::json::object();
  for (const auto& [k, v] : report.grid) grid[k] = number_to_json(v);
  j["grid"] = grid;
  j["seeds"] = report.seeds;
  j["notes"] = report.notes;
  return j;
}

void write_report_csv(std::ostream& out, const EstimateReport& report, const std::string& config_hash) {
  out << "# config_hash " << config_hash << "\n";
  out << "# estimate_id " << report.id << "\n";
  out << "index," << (report.sweep_name.empty() ? "sweep" : report.sweep_name) << ",ratio\n";
  for (std::size_t i = 0; i < report.sweep.size(); ++i)
    out << i << ',' << format_number(report.sweep[i]) << ',' << format_number(report.ratios[i]) << '\n';
}

void write_report_plot(std::ostream& out, const EstimateReport& report, const std::string& config_hash) {
  const bool fitted = report.fit && !report.fit_x.empty();
  const auto& xs = fitted ? report.fit_x : report.sweep;
  const auto& ys = fitted ? report.fit_y : report.ratios;
  out << "# nlslab plot data: " << report.id << "\n";
  out << "# config_hash " << config_hash << "\n";
  out << "# columns: x (" << (fitted ? report.fit_abscissa : report.sweep_name) << ") y fit\n";
  out << "# gnuplot: set logscale xy; plot 'FILE' using 1:2 with points title 'measured'"
      << (fitted ? ", '' using 1:3 with lines title 'fit'" : "") << "\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = fitted ? std::exp(report.fit->intercept) * std::pow(xs[i], report.fit->exponent) : NAN;
    out << format_number(xs[i]) << ' ' << format_number(ys[i]) << ' ' << format_number(fit) << '\n';
  }
}

}  // namespace nlslab
