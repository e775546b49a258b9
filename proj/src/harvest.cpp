#include "reap/harvest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "text_util.hpp"

namespace reap {

TraceError::TraceError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

TraceMode mode_from_units(const std::string& units, int line) {
  const std::string u = to_lower(units);
  if (u == "w/m2" || u == "w/m^2") return TraceMode::kIrradiance;
  if (u == "j") return TraceMode::kBudget;
  throw TraceError("unknown trace units '" + units + "'", line);
}

TraceMode mode_from_name(const std::string& name, int line) {
  const std::string m = to_lower(name);
  if (m == "irradiance") return TraceMode::kIrradiance;
  if (m == "budget") return TraceMode::kBudget;
  throw TraceError("unknown trace mode '" + name + "'", line);
}

std::string value_after_colon(const std::string& body, std::size_t key_len) {
  std::string rest = trim(body.substr(key_len));
  if (!rest.empty() && (rest.front() == ':' || rest.front() == '=')) rest = trim(rest.substr(1));
  return rest;
}

}  // namespace

HarvestTrace load_trace(std::istream& in, TraceMode mode) {
  HarvestTrace trace;
  trace.mode = mode;
  std::optional<TraceMode> declared_mode;
  std::optional<TraceMode> declared_units;
  bool seen_data = false;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string body = trim(text.substr(1));
      const std::string lower = to_lower(body);
      if (lower.rfind("mode", 0) == 0) {
        declared_mode = mode_from_name(value_after_colon(body, 4), line);
      } else if (lower.rfind("units", 0) == 0) {
        declared_units = mode_from_units(value_after_colon(body, 5), line);
      }
      continue;
    }

    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
      throw TraceError("expected two fields 'timestamp,value'", line);
    }
    const std::string first = trim(text.substr(0, comma));
    const std::string second = trim(text.substr(comma + 1));
    if (!seen_data && to_lower(first) == "timestamp") {
      seen_data = true;
      continue;
    }
    seen_data = true;

    const auto ts = parse_double(first);
    const auto value = parse_double(second);
    if (!ts) throw TraceError("bad timestamp '" + first + "'", line);
    if (!value) throw TraceError("bad value '" + second + "'", line);
    if (*value < 0.0) throw TraceError("negative value " + second, line);
    if (!trace.samples.empty() && !(*ts > trace.samples.back().timestamp)) {
      throw TraceError("timestamp " + first + " is not after the previous sample", line);
    }
    trace.samples.push_back({*ts, *value});
  }

  if (declared_mode && declared_units && *declared_mode != *declared_units) {
    throw TraceError("#mode and #units disagree");
  }
  if (declared_mode) trace.mode = *declared_mode;
  else if (declared_units) trace.mode = *declared_units;
  return trace;
}

HarvestTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace '" + path + "'");
  return load_trace(in);
}

void check_trace(const HarvestTrace& trace) {
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    if (!std::isfinite(s.timestamp) || !std::isfinite(s.value) || s.value < 0.0) {
      throw TraceError("sample " + std::to_string(i) + " is not finite and non-negative");
    }
    if (i > 0 && !(s.timestamp > trace.samples[i - 1].timestamp)) {
      throw TraceError("timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
    }
  }
}

void check_panel(const PanelModel& panel) {
  if (!(std::isfinite(panel.area) && panel.area > 0.0)) throw TraceError("panel area must be > 0");
  if (!(panel.efficiency > 0.0 && panel.efficiency <= 1.0)) {
    throw TraceError("panel efficiency must be in (0, 1]");
  }
  if (panel.budget_cap && !(*panel.budget_cap >= 0.0 && std::isfinite(*panel.budget_cap))) {
    throw TraceError("budget cap must be finite and >= 0");
  }
}

double sample_resolution(const HarvestTrace& trace, double fallback) {
  double res = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    res = std::min(res, trace.samples[i].timestamp - trace.samples[i - 1].timestamp);
  }
  return std::isfinite(res) ? res : fallback;
}

namespace {

std::size_t period_count(double span, double period_length) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(span / period_length - 1e-9)));
}

void check_period(double period_length) {
  if (!(std::isfinite(period_length) && period_length > 0.0)) {
    throw TraceError("period length must be > 0");
  }
}

BudgetSeries empty_series(double start, std::size_t n, double period_length) {
  BudgetSeries series;
  series.period_length = period_length;
  series.entries.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    series.entries[p].period_start = start + static_cast<double>(p) * period_length;
  }
  return series;
}

}  // namespace

BudgetSeries irradiance_to_budget(const HarvestTrace& trace, const PanelModel& panel,
                                  double period_length) {
  if (trace.mode != TraceMode::kIrradiance) throw TraceError("trace is not in irradiance mode");
  if (trace.samples.empty()) throw TraceError("empty trace");
  check_trace(trace);
  check_panel(panel);
  check_period(period_length);

  const auto& s = trace.samples;
  const double res = sample_resolution(trace, period_length);
  const double start = s.front().timestamp;
  const double span = s.back().timestamp + res - start;
  BudgetSeries series = empty_series(start, period_count(span, period_length), period_length);
  const std::size_t last_period = series.entries.size() - 1;

  const double gain = panel.area * panel.efficiency;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double hold = i + 1 < s.size() ? std::min(s[i + 1].timestamp - s[i].timestamp, res) : res;
    const double a = s[i].timestamp - start;
    const double b = a + hold;
    const double watts = s[i].value * gain;
    if (watts == 0.0) continue;
    auto p = std::min(static_cast<std::size_t>(a / period_length), last_period);
    for (; p <= last_period; ++p) {
      const double lo = static_cast<double>(p) * period_length;
      const double hi = p == last_period ? std::max(b, lo + period_length) : lo + period_length;
      const double overlap = std::min(b, hi) - std::max(a, lo);
      if (overlap > 0.0) series.entries[p].budget += watts * overlap;
      if (hi >= b) break;
    }
  }

  if (panel.budget_cap) {
    for (auto& e : series.entries) e.budget = std::min(e.budget, *panel.budget_cap);
  }
  return series;
}

BudgetSeries budgets_from_trace(const HarvestTrace& trace, double period_length) {
  if (trace.mode != TraceMode::kBudget) throw TraceError("trace is not in budget mode");
  if (trace.samples.empty()) throw TraceError("empty trace");
  check_trace(trace);
  check_period(period_length);

  const auto& s = trace.samples;
  const double start = s.front().timestamp;
  const double span = s.back().timestamp + sample_resolution(trace, period_length) - start;
  BudgetSeries series = empty_series(start, period_count(span, period_length), period_length);
  const std::size_t last_period = series.entries.size() - 1;
  for (const auto& sample : s) {
    const auto p = std::min(static_cast<std::size_t>((sample.timestamp - start) / period_length), last_period);
    series.entries[p].budget += sample.value;
  }
  return series;
}

BudgetSeries to_budget_series(const HarvestTrace& trace, const PanelModel& panel,
                              double period_length) {
  return trace.mode == TraceMode::kBudget ? budgets_from_trace(trace, period_length)
                                          : irradiance_to_budget(trace, panel, period_length);
}

HarvestTrace synth_trace(const SynthOptions& o) {
  if (o.days < 1) throw TraceError("synthetic trace needs at least one day");
  if (!(o.peak_irradiance > 0.0)) throw TraceError("peak irradiance must be > 0");
  if (!(o.day_length_fraction > 0.0 && o.day_length_fraction <= 1.0)) {
    throw TraceError("day length fraction must be in (0, 1]");
  }
  if (!(o.noise >= 0.0 && o.noise <= 1.0)) throw TraceError("noise must be in [0, 1]");

  constexpr double kHour = 3600.0;
  const double day_hours = 24.0 * o.day_length_fraction;
  const double sunrise = 12.0 - day_hours / 2.0;
  const double sunset = 12.0 + day_hours / 2.0;
  const double pi = std::numbers::pi;

  // mean of peak * sin(pi * (h - sunrise) / day_hours) over [h0, h1]
  auto hour_mean = [&](double h0, double h1) {
    const double lo = std::max(h0, sunrise);
    const double hi = std::min(h1, sunset);
    if (hi <= lo) return 0.0;
    const double integral = day_hours / pi *
                            (std::cos(pi * (lo - sunrise) / day_hours) - std::cos(pi * (hi - sunrise) / day_hours));
    return o.peak_irradiance * integral / (h1 - h0);
  };

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  HarvestTrace trace;
  trace.mode = TraceMode::kIrradiance;
  trace.samples.reserve(static_cast<std::size_t>(o.days) * 24);
  for (int d = 0; d < o.days; ++d) {
    const double clearness = o.noise > 0.0 ? 1.0 - o.noise * unit(rng) : 1.0;
    for (int h = 0; h < 24; ++h) {
      const double ts = (static_cast<double>(d) * 24.0 + h) * kHour;
      trace.samples.push_back({ts, clearness * hour_mean(h, h + 1.0)});
    }
  }
  return trace;
}

HarvestTrace synth_trace(int days, double peak_irradiance, double day_length_fraction,
                         std::uint64_t seed, double noise) {
  SynthOptions o;
  o.days = days;
  o.peak_irradiance = peak_irradiance;
  o.day_length_fraction = day_length_fraction;
  o.seed = seed;
  o.noise = noise;
  return synth_trace(o);
}

bool is_synth_uri(const std::string& source) { return source.rfind("synth:", 0) == 0; }

SynthOptions parse_synth_uri(const std::string& uri) {
  if (!is_synth_uri(uri)) throw TraceError("not a synth: URI '" + uri + "'");
  SynthOptions o;
  o.noise = 0.5;

  std::stringstream ss(uri.substr(6));
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (first) {
      first = false;
      if (item.empty() || item.back() != 'd') throw TraceError("synth: URI must start with <days>d");
      const auto days = parse_int(item.substr(0, item.size() - 1));
      if (!days || *days < 1) throw TraceError("bad day count '" + item + "'");
      o.days = *days;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw TraceError("bad synth option '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    if (key == "seed") {
      const auto v = parse_integer(value);
      if (!v || *v < 0) throw TraceError("bad seed '" + value + "'");
      o.seed = static_cast<std::uint64_t>(*v);
      continue;
    }
    const auto v = parse_double(value);
    if (!v) throw TraceError("bad value for " + key + ": '" + value + "'");
    if (key == "peak") o.peak_irradiance = *v;
    else if (key == "frac") o.day_length_fraction = *v;
    else if (key == "noise") o.noise = *v;
    else throw TraceError("unknown synth option '" + key + "'");
  }
  if (first) throw TraceError("synth: URI must start with <days>d");
  return o;
}

void write_trace_csv(std::ostream& out, const HarvestTrace& trace) {
  const bool irradiance = trace.mode == TraceMode::kIrradiance;
  out << "#mode: " << (irradiance ? "irradiance" : "budget") << '\n';
  out << "#units: " << (irradiance ? "W/m2" : "J") << '\n';
  out << "timestamp,value\n";
  for (const auto& s : trace.samples) out << format_shortest(s.timestamp) << ',' << format_shortest(s.value) << '\n';
}

void write_budget_csv(std::ostream& out, const BudgetSeries& series) {
  out << "period_start,budget_joules\n";
  for (const auto& e : series.entries) {
    out << format_shortest(e.period_start) << ',' << format_shortest(e.budget) << '\n';
  }
}

}  // namespace reap
