#pragma once

#include <string>

#include <json.hpp>

#include "hco/cycles.hpp"
#include "hco/equilibria.hpp"
#include "hco/integrator.hpp"
#include "hco/portrait.hpp"
#include "hco/regimes.hpp"

namespace hco {

using ordered_json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip any double.
std::string format_g17(double v);

/// Plain radians ("1.234") or the exact pi-rational form "a*pi+b" (also
/// "pi", "-pi", "0.75*pi-0.1"). Throws ConfigError on anything else.
double parse_angle(const std::string& text);

void write_trajectory_csv(const std::string& path, const Trajectory& tr);
void write_events_csv(const std::string& path, const Trajectory& tr);
std::string event_kind_name(EventKind k);

ordered_json equilibria_to_json(const std::vector<Equilibrium>& eqs);
ordered_json cycle_to_json(const LimitCycle& c);
ordered_json regime_report_to_json(const RegimeReport& rep);

void write_sweep_csv(const std::string& path, const SweepGrid& grid);
void write_separatrix_csv(const std::string& path, const Separatrix& sep);

void write_text_file(const std::string& path, const std::string& content);

} // namespace hco
