#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "reap/allocator.hpp"
#include "reap/catalog.hpp"
#include "reap/lp_core.hpp"
#include "reap/simulator.hpp"

namespace reap::cli {

namespace {

const std::vector<double> kDefaultAlphas = {0.5, 1.0, 2.0, 4.0, 8.0};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError("bad --alpha-list entry '" + item + "'");
    if (!(v >= 0.0)) throw UsageError("alpha values must be >= 0");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--alpha-list is empty");
  return out;
}

Catalog load_config_catalog(const RunConfig& c) {
  Catalog catalog = resolve_catalog(c.catalog);
  if (c.off_power) catalog.off_power = *c.off_power;
  const auto violations = validate(catalog);
  if (!violations.empty()) throw UsageError("invalid catalog: " + violations.front().message);
  return catalog;
}

BudgetSeries load_budgets(const RunConfig& c) {
  const HarvestTrace trace = is_synth_uri(*c.trace) ? synth_trace(parse_synth_uri(*c.trace))
                                                    : load_trace_file(*c.trace);
  return to_budget_series(trace, c.panel, c.period);
}

void check_common(const RunConfig& c) {
  if (!(c.period > 0.0)) throw UsageError("--period must be > 0");
  if (!(c.alpha >= 0.0)) throw UsageError("--alpha must be >= 0");
  if (c.off_power && !(*c.off_power >= 0.0)) throw UsageError("--off-power must be >= 0");
}

int sources_given(const RunConfig& c) {
  return static_cast<int>(c.budget.has_value()) + static_cast<int>(c.budget_range.has_value()) +
         static_cast<int>(c.trace.has_value());
}

// Writes the table to --output (summary to `out`) or to `out` (summary to `err`).
void emit(const RunConfig& c, std::ostream& out, std::ostream& err,
          const std::function<void(std::ostream&)>& table,
          const std::function<void(std::ostream&)>& summary = nullptr) {
  if (c.output) {
    std::ofstream file(*c.output);
    if (!file) throw std::runtime_error("cannot open output '" + *c.output + "'");
    table(file);
    file.flush();
    if (!file) throw std::runtime_error("failed writing '" + *c.output + "'");
    if (summary) summary(out);
  } else {
    table(out);
    if (summary) summary(err);
  }
}

OutputFormat format_or(const RunConfig& c, OutputFormat fallback) { return c.format.value_or(fallback); }

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace

std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim_copy(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
    }
    std::string key = trim_copy(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    args.push_back("--" + key + "=" + trim_copy(line.substr(eq + 1)));
  }
  return args;
}

int cmd_optimize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        check_common(c);
        if (!c.budget || sources_given(c) != 1) throw UsageError("optimize needs exactly one --budget");
        const AllocationProblem problem{c.period, *c.budget, c.alpha, load_config_catalog(c)};

        SolveOptions options;
        if (c.pivot_trace) {
          options.record_trace = true;
          if (!below_keep_alive(problem.budget, problem.catalog.off_power, problem.period)) {
            write_trace(err, solve_lp(build_problem(problem), options).trace);
          }
        }
        const Allocation a = optimize_allocation(problem);

        emit(c, out, err, [&](std::ostream& os) {
          if (format_or(c, OutputFormat::kJson) == OutputFormat::kJson) {
            os << to_json(a).dump(2) << '\n';
            return;
          }
          os << "status,objective,expected_accuracy,active_fraction,energy_used,off_time";
          for (const auto& t : a.times) os << ",t_dp" << t.id;
          os << '\n'
             << to_string(a.status) << ',' << a.objective << ',' << a.expected_accuracy << ','
             << a.active_fraction << ',' << a.energy_used << ',' << a.off_time;
          for (const auto& t : a.times) os << ',' << t.seconds;
          os << '\n';
        });

        if (a.status == LpStatus::kInfeasible) {
          err << "infeasible: budget " << problem.budget << " J is below the keep-alive energy "
              << keep_alive_energy(problem.catalog.off_power, problem.period) << " J\n";
          return static_cast<int>(kInfeasible);
        }
        if (!a.ok()) {
          err << "error: solver returned " << to_string(a.status) << '\n';
          return static_cast<int>(kUsageError);
        }
        return static_cast<int>(kSuccess);
      },
      err);
}

int cmd_pareto(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const ParetoSplit split = pareto_split(load_config_catalog(c));
        emit(c, out, err, [&](std::ostream& os) {
          if (format_or(c, OutputFormat::kJson) == OutputFormat::kCsv) {
            write_catalog(os, split.retained);
            for (const auto& r : split.removed) {
              os << "#removed id=" << r.point.id << " label=" << r.point.label << " dominated_by=";
              for (std::size_t i = 0; i < r.dominators.size(); ++i) os << (i ? " " : "") << r.dominators[i];
              if (r.duplicate) os << " duplicate";
              os << '\n';
            }
            return;
          }
          nlohmann::ordered_json retained = nlohmann::ordered_json::array();
          for (const auto& dp : split.retained.design_points) {
            retained.push_back({{"id", dp.id},
                                {"label", dp.label},
                                {"accuracy", dp.accuracy},
                                {"power", dp.power},
                                {"energy_per_activity", dp.energy_per_activity},
                                {"description", dp.description}});
          }
          nlohmann::ordered_json removed = nlohmann::ordered_json::array();
          for (const auto& r : split.removed) {
            removed.push_back({{"id", r.point.id},
                               {"label", r.point.label},
                               {"accuracy", r.point.accuracy},
                               {"power", r.point.power},
                               {"dominated_by", r.dominators},
                               {"duplicate", r.duplicate}});
          }
          nlohmann::ordered_json j;
          j["off_power"] = split.retained.off_power;
          j["retained"] = std::move(retained);
          j["removed"] = std::move(removed);
          os << j.dump(2) << '\n';
        });
        return static_cast<int>(kSuccess);
      },
      err);
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        check_common(c);
        if (sources_given(c) != 1 || c.budget) {
          throw UsageError("sweep needs exactly one of --budget-range or --trace");
        }
        const Catalog catalog = load_config_catalog(c);
        const bool json = format_or(c, OutputFormat::kCsv) == OutputFormat::kJson;

        if (c.budget_range) {
          if (!c.alpha_list.empty()) throw UsageError("--alpha-list needs --trace");
          const BudgetSweep sweep = sweep_budget(catalog, c.alpha, parse_budget_range(*c.budget_range), c.period);
          emit(
              c, out, err,
              [&](std::ostream& os) {
                if (json) os << to_json(sweep).dump(2) << '\n';
                else write_csv(os, sweep);
              },
              [&](std::ostream& os) { write_summary(os, catalog, sweep.aggregates); });
          return static_cast<int>(kSuccess);
        }

        const auto& alphas = c.alpha_list.empty() ? kDefaultAlphas : c.alpha_list;
        const AlphaSweep sweep = sweep_alpha(catalog, load_budgets(c), alphas, c.period);
        emit(
            c, out, err,
            [&](std::ostream& os) {
              if (json) os << to_json(sweep).dump(2) << '\n';
              else write_csv(os, sweep);
            },
            [&](std::ostream& os) {
              for (const auto& row : sweep.rows) {
                os << "alpha " << row.alpha << ": ";
                write_summary(os, catalog, row.aggregates);
              }
            });
        return static_cast<int>(kSuccess);
      },
      err);
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        check_common(c);
        if (!c.trace || sources_given(c) != 1) throw UsageError("simulate needs exactly one --trace");
        if (!c.alpha_list.empty()) throw UsageError("simulate takes --alpha, not --alpha-list");
        const Catalog catalog = load_config_catalog(c);
        const SimulationReport report = simulate(load_budgets(c), catalog, c.alpha, c.period);
        emit(
            c, out, err,
            [&](std::ostream& os) {
              if (format_or(c, OutputFormat::kCsv) == OutputFormat::kJson) os << to_json(report).dump(2) << '\n';
              else write_csv(os, report);
            },
            [&](std::ostream& os) {
              os << report.records.size() << " periods, alpha " << report.alpha << '\n';
              write_summary(os, catalog, report.aggregates);
            });
        return static_cast<int>(kSuccess);
      },
      err);
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kCommands = {"optimize", "pareto", "sweep", "simulate"};

  // Config file arguments go right after the subcommand so explicit flags,
  // which come later, win.
  std::vector<std::string> args;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args_in.size(); ++i) {
    const std::string& a = args_in[i];
    if (a == "--config") {
      if (i + 1 >= args_in.size()) {
        err << "error: --config needs a path\n";
        return kUsageError;
      }
      config_path = args_in[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      args.push_back(a);
    }
  }
  if (config_path) {
    const auto sub = std::find_first_of(args.begin(), args.end(), kCommands.begin(), kCommands.end());
    if (sub == args.end()) {
      err << "error: --config needs a subcommand\n";
      return kUsageError;
    }
    try {
      const auto extra = read_config_file(*config_path);
      args.insert(sub + 1, extra.begin(), extra.end());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kUsageError;
    }
  }

  RunConfig config;
  std::string format;
  std::optional<std::string> alpha_list;
  std::optional<double> panel_cap;

  CLI::App app{"Energy-accuracy time allocation across design points"};
  app.name("reap");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--catalog", config.catalog, "Catalog CSV path or builtin:table1")->capture_default_str();
    sub->add_option("--period", config.period, "Activity period in seconds")->capture_default_str();
    sub->add_option("--off-power", config.off_power, "Off-state power in watts (default 5e-5)");
    sub->add_option("--alpha", config.alpha, "Accuracy / active-time trade-off exponent")->capture_default_str();
    sub->add_option("--budget", config.budget, "Energy budget in joules for one period");
    sub->add_option("--budget-range", config.budget_range, "Budget sweep start:stop:step in joules");
    sub->add_option("--trace", config.trace, "Trace CSV path or synth:<days>d[,peak=..][,frac=..][,noise=..][,seed=..]");
    sub->add_option("--alpha-list", alpha_list, "Comma-separated alpha values");
    sub->add_option("--panel-area", config.panel.area, "Panel area in m^2")->capture_default_str();
    sub->add_option("--panel-efficiency", config.panel.efficiency, "Panel efficiency in (0, 1]")->capture_default_str();
    sub->add_option("--panel-cap", panel_cap, "Per-period budget ceiling in joules");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output,-o", config.output, "Write results to this file");
  };

  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"optimize", "Solve one period's allocation"},
           {"pareto", "Filter a catalog to its Pareto-optimal design points"},
           {"sweep", "Sweep budgets (--budget-range) or alphas over a trace (--trace)"},
           {"simulate", "Compare against static design points over a trace"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (name == "optimize") sub->add_flag("--pivot-trace", config.pivot_trace, "Dump simplex pivots to stderr");
  }

  std::vector<const char*> argv{"reap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kSuccess) : static_cast<int>(kUsageError);
  }

  try {
    if (!format.empty()) config.format = format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
    if (alpha_list) config.alpha_list = parse_alpha_list(*alpha_list);
    if (panel_cap) config.panel.budget_cap = *panel_cap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  for (const std::string& name : kCommands) {
    if (!app.got_subcommand(name)) continue;
    config.command = name;
    if (name == "optimize") return cmd_optimize(config, out, err);
    if (name == "pareto") return cmd_pareto(config, out, err);
    if (name == "sweep") return cmd_sweep(config, out, err);
    return cmd_simulate(config, out, err);
  }
  return kUsageError;
}

}  // namespace reap::cli
