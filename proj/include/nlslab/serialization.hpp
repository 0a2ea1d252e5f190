#pragma once

// Text and JSON formats.
//
// Field text format: comment lines start with '#'; the first must read
// "# nlslab-field N <N> m <m>", followed by one "j re im" line per nonzero mode,
// j the signed mode index (xi_j = j / m), values in %.17g.
//
// JSON envelope: {"grid": {"N": .., "m": ..}, "encoding": "text", "coeffs": [[j, re, im], ...]}.
//
// Plot files hold three whitespace separated columns x, y, fit; a header of '#'
// comments carries the config hash and a gnuplot command that draws the file.

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "nlslab/estimates.hpp"
#include "nlslab/orlicz.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/variation.hpp"

namespace nlslab {

void write_field_text(std::ostream& out, const Field& u);
Field read_field_text(std::istream& in);

nlohmann::json field_to_json(const Field& u);
Field field_from_json(const nlohmann::json& j);

nlohmann::json young_function_to_json(const YoungFunction& phi);
nlohmann::json variation_to_json(const VariationResult& r);

/// Non-finite numbers become strings ("inf", "-inf", "nan") so the output stays valid JSON.
nlohmann::json number_to_json(double v);

nlohmann::json report_to_json(const EstimateReport& report, const std::string& config_hash);
/// One row per sweep point: index, sweep value, ratio.
void write_report_csv(std::ostream& out, const EstimateReport& report, const std::string& config_hash);
/// x, y, fit; fit is "nan" when the report has no fit.
void write_report_plot(std::ostream& out, const EstimateReport& report, const std::string& config_hash);

/// %.17g
std::string format_number(double v);

}  // namespace nlslab
