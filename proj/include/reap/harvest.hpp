#pragma once

// Solar traces and their conversion to per-period energy budgets.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reap {

enum class TraceMode { kIrradiance, kBudget };

struct TraceSample {
  double timestamp = 0.0;  // seconds since epoch
  double value = 0.0;      // W/m^2 or J depending on mode
};

struct HarvestTrace {
  TraceMode mode = TraceMode::kIrradiance;
  std::vector<TraceSample> samples;
};

struct PanelModel {
  double area = 2e-3;        // m^2
  double efficiency = 0.15;  // fraction in (0, 1]
  std::optional<double> budget_cap;  // joules per period
};

struct BudgetEntry {
  double period_start = 0.0;
  double budget = 0.0;
};

struct BudgetSeries {
  double period_length = 3600.0;
  std::vector<BudgetEntry> entries;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads `timestamp,value` CSV. `#mode:` and `#units:` metadata lines
/// override `mode`; the header line is optional. Throws TraceError.
HarvestTrace load_trace(std::istream& in, TraceMode mode = TraceMode::kIrradiance);
HarvestTrace load_trace_file(const std::string& path);

/// Strictly increasing timestamps, finite non-negative values.
void check_trace(const HarvestTrace& trace);

void check_panel(const PanelModel& panel);

/// Smallest spacing between consecutive samples; `fallback` for one sample.
double sample_resolution(const HarvestTrace& trace, double fallback);

/// Integrates piecewise-constant irradiance over fixed periods starting at
/// the first timestamp. Each sample holds for min(gap to next, resolution);
/// anything beyond is a gap at zero irradiance. The last sample holds for
/// one resolution step.
BudgetSeries irradiance_to_budget(const HarvestTrace& trace, const PanelModel& panel,
                                  double period_length);

/// Direct-mode traces: sums sample joules into the period containing each
/// timestamp.
BudgetSeries budgets_from_trace(const HarvestTrace& trace, double period_length);

/// Either conversion, chosen by the trace mode.
BudgetSeries to_budget_series(const HarvestTrace& trace, const PanelModel& panel,
                              double period_length);

struct SynthOptions {
  int days = 30;
  double peak_irradiance = 10.0;  // W/m^2 at solar noon on a clear day
  double day_length_fraction = 0.5;
  // Daily clearness is drawn from [1 - noise, 1]; 0 disables noise.
  double noise = 0.0;
  std::uint64_t seed = 1;
};

/// Hourly half-sine diurnal profile centred on noon, zero at night. Each
/// sample is the mean irradiance over its hour.
HarvestTrace synth_trace(const SynthOptions& options);
HarvestTrace synth_trace(int days, double peak_irradiance, double day_length_fraction,
                         std::uint64_t seed, double noise = 0.0);

/// Parses `synth:30d[,peak=10][,frac=0.5][,noise=0.5][,seed=1]`.
SynthOptions parse_synth_uri(const std::string& uri);
bool is_synth_uri(const std::string& source);

void write_trace_csv(std::ostream& out, const HarvestTrace& trace);
void write_budget_csv(std::ostream& out, const BudgetSeries& series);

}  // namespace reap
