#include "reap/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <boost/tokenizer.hpp>

#include "text_util.hpp"

namespace reap {

CatalogError::CatalogError(const std::string& message, int row)
    : std::runtime_error(row > 0 ? "line " + std::to_string(row) + ": " + message : message),
      row_(row) {}

Catalog builtin_table1() {
  // accuracy, power (W), energy per activity (J)
  Catalog c;
  c.off_power = kDefaultOffPower;
  c.design_points = {
      {1, "DP1", 0.94, 2.76e-3, 4.48e-3, "Statistical acceleration, 16-FFT stretch"},
      {2, "DP2", 0.93, 2.30e-3, 3.72e-3, "Statistical y-axis accel., 16-FFT stretch"},
      {3, "DP3", 0.92, 1.82e-3, 2.94e-3, "Statistical x- and y-axis accel. (0.8 s), 16-FFT stretch"},
      {4, "DP4", 0.90, 1.64e-3, 2.66e-3, "Statistical y-axis accel. (0.6 s), 16-FFT stretch"},
      {5, "DP5", 0.76, 1.20e-3, 1.93e-3, "16-FFT stretch"},
  };
  return c;
}

std::vector<Violation> validate(const Catalog& catalog) {
  std::vector<Violation> out;
  const auto name = [](const DesignPoint& dp) {
    return dp.label.empty() ? "DP id " + std::to_string(dp.id) : dp.label;
  };

  if (!std::isfinite(catalog.off_power) || catalog.off_power < 0.0) {
    out.push_back({"off_power", "off_power must be finite and >= 0"});
  }
  if (catalog.design_points.empty()) {
    out.push_back({"design_points", "no design points"});
    return out;
  }

  std::map<int, int> seen;
  for (const auto& dp : catalog.design_points) {
    if (++seen[dp.id] == 2) out.push_back({"id", "duplicate id " + std::to_string(dp.id)});
    if (!(dp.accuracy > 0.0 && dp.accuracy <= 1.0)) {
      out.push_back({"accuracy", name(dp) + " accuracy " + format_number(dp.accuracy) +
                                     " outside (0, 1]"});
    }
    if (!(std::isfinite(dp.power) && dp.power > 0.0)) {
      out.push_back({"power", name(dp) + " power must be finite and > 0"});
    }
    if (!(std::isfinite(dp.energy_per_activity) && dp.energy_per_activity >= 0.0)) {
      out.push_back({"energy_per_activity", name(dp) + " energy_per_activity must be >= 0"});
    }
  }

  const auto lowest = std::min_element(
      catalog.design_points.begin(), catalog.design_points.end(),
      [](const DesignPoint& a, const DesignPoint& b) { return a.power < b.power; });
  if (catalog.off_power >= lowest->power) {
    out.push_back({"off_power", "off_power exceeds " + name(*lowest) + " power"});
  }
  return out;
}

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::vector<std::string> split_csv(const std::string& line, int row) {
  std::vector<std::string> fields;
  try {
    for (const auto& tok : Tokenizer(line)) fields.push_back(trim(tok));
  } catch (const boost::escaped_list_error& e) {
    throw CatalogError(std::string("malformed CSV: ") + e.what(), row);
  }
  return fields;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\\") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void parse_units(const std::string& body, CatalogFormat& format, int row) {
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CatalogError("malformed unit declaration '" + item + "'", row);
    const std::string key = to_lower(trim(item.substr(0, eq)));
    const std::string value = to_lower(trim(item.substr(eq + 1)));
    if (key == "accuracy") {
      if (value == "percent" || value == "%") {
        format.accuracy = AccuracyUnit::kPercent;
      } else if (value == "fraction") {
        format.accuracy = AccuracyUnit::kFraction;
      } else {
        throw CatalogError("unknown accuracy unit '" + value + "'", row);
      }
    } else if (key == "power") {
      if (value == "mw") {
        format.power = PowerUnit::kMilliwatt;
      } else if (value == "w") {
        format.power = PowerUnit::kWatt;
      } else {
        throw CatalogError("unknown power unit '" + value + "'", row);
      }
    } else {
      throw CatalogError("unknown unit key '" + key + "'", row);
    }
  }
}

struct Columns {
  int id = -1;
  int label = -1;
  int accuracy = -1;
  int power = -1;
  int energy = -1;
  int description = -1;
};

Columns parse_header(const std::vector<std::string>& fields, int row) {
  Columns c;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    const std::string name = to_lower(fields[i]);
    int* slot = nullptr;
    if (name == "id") slot = &c.id;
    if (name == "label") slot = &c.label;
    if (name == "accuracy") slot = &c.accuracy;
    if (name == "power") slot = &c.power;
    if (name == "energy_per_activity" || name == "energy") slot = &c.energy;
    if (name == "description") slot = &c.description;
    if (slot == nullptr) throw CatalogError("unknown column '" + fields[i] + "'", row);
    if (*slot >= 0) throw CatalogError("repeated column '" + fields[i] + "'", row);
    *slot = i;
  }
  if (c.id < 0 || c.label < 0 || c.accuracy < 0 || c.power < 0) {
    throw CatalogError("header must name id, label, accuracy and power columns", row);
  }
  return c;
}

double field_number(const std::vector<std::string>& fields, int col, const char* what, int row) {
  const auto value = parse_double(fields[col]);
  if (!value) throw CatalogError(std::string("bad ") + what + " '" + fields[col] + "'", row);
  return *value;
}

}  // namespace

Catalog load_catalog(std::istream& in, CatalogFormat format) {
  Catalog catalog;
  std::optional<double> off_power_raw;
  std::optional<Columns> columns;
  std::vector<std::pair<int, DesignPoint>> raw_rows;

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string body = trim(text.substr(1));
      const std::string lower = to_lower(body);
      if (lower.rfind("units:", 0) == 0) {
        if (columns) throw CatalogError("#units must precede the header", row);
        parse_units(body.substr(6), format, row);
      } else if (lower.rfind("off_power", 0) == 0) {
        std::string value = trim(body.substr(9));
        if (!value.empty() && (value.front() == '=' || value.front() == ':')) value = trim(value.substr(1));
        const auto v = parse_double(value);
        if (!v) throw CatalogError("bad off_power '" + value + "'", row);
        off_power_raw = *v;
      }
      continue;
    }

    const auto fields = split_csv(text, row);
    if (!columns) {
      columns = parse_header(fields, row);
      continue;
    }
    const Columns& c = *columns;
    const int needed = std::max({c.id, c.label, c.accuracy, c.power, c.energy, c.description}) + 1;
    if (static_cast<int>(fields.size()) < needed) {
      throw CatalogError("expected " + std::to_string(needed) + " fields, found " +
                             std::to_string(fields.size()),
                         row);
    }
    DesignPoint dp;
    const auto id = parse_int(fields[c.id]);
    if (!id) throw CatalogError("bad id '" + fields[c.id] + "'", row);
    dp.id = *id;
    dp.label = fields[c.label];
    dp.accuracy = field_number(fields, c.accuracy, "accuracy", row);
    dp.power = field_number(fields, c.power, "power", row);
    if (c.energy >= 0 && !fields[c.energy].empty()) {
      dp.energy_per_activity = field_number(fields, c.energy, "energy_per_activity", row);
    }
    if (c.description >= 0) dp.description = fields[c.description];
    raw_rows.emplace_back(row, dp);
  }

  if (raw_rows.empty()) throw CatalogError("no design points");

  const double accuracy_scale = format.accuracy == AccuracyUnit::kPercent ? 0.01 : 1.0;
  const double power_scale = format.power == PowerUnit::kMilliwatt ? 1e-3 : 1.0;
  for (auto& [r, dp] : raw_rows) {
    dp.accuracy *= accuracy_scale;
    dp.power *= power_scale;
    dp.energy_per_activity *= power_scale;
    if (!(dp.accuracy > 0.0 && dp.accuracy <= 1.0)) {
      throw CatalogError("accuracy " + format_number(dp.accuracy) + " outside (0, 1]", r);
    }
    if (!(dp.power > 0.0) || !std::isfinite(dp.power)) {
      throw CatalogError("power must be positive", r);
    }
    catalog.design_points.push_back(dp);
  }
  catalog.off_power = off_power_raw ? *off_power_raw * power_scale : kDefaultOffPower;

  const auto violations = validate(catalog);
  if (!violations.empty()) {
    std::string msg = violations.front().message;
    for (std::size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i].message;
    throw CatalogError(msg);
  }
  return catalog;
}

Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog '" + path + "'");
  return load_catalog(in);
}

Catalog resolve_catalog(const std::string& source) {
  if (source == "builtin:table1") return builtin_table1();
  if (source.rfind("builtin:", 0) == 0) throw CatalogError("unknown builtin catalog '" + source + "'");
  return load_catalog_file(source);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  out << "#units: accuracy=fraction, power=W\n";
  out << "#off_power=" << format_number(catalog.off_power) << '\n';
  out << "id,label,accuracy,power,energy_per_activity,description\n";
  for (const auto& dp : catalog.design_points) {
    out << dp.id << ',' << quote_csv(dp.label) << ',' << format_number(dp.accuracy) << ','
        << format_number(dp.power) << ',' << format_number(dp.energy_per_activity) << ','
        << quote_csv(dp.description) << '\n';
  }
}

std::string serialize_catalog(const Catalog& catalog) {
  std::ostringstream os;
  write_catalog(os, catalog);
  return os.str();
}

bool dominates(const DesignPoint& a, const DesignPoint& b) {
  return a.power <= b.power && a.accuracy >= b.accuracy &&
         (a.power < b.power || a.accuracy > b.accuracy);
}

ParetoSplit pareto_split(const Catalog& catalog) {
  ParetoSplit split;
  split.retained.off_power = catalog.off_power;
  const auto& dps = catalog.design_points;

  std::vector<bool> keep(dps.size(), true);
  std::vector<int> first_copy(dps.size(), -1);
  for (std::size_t i = 0; i < dps.size(); ++i) {
    for (std::size_t j = 0; j < dps.size() && keep[i]; ++j) {
      if (j != i && dominates(dps[j], dps[i])) keep[i] = false;
    }
    for (std::size_t j = 0; j < i && keep[i]; ++j) {
      if (dps[j].power == dps[i].power && dps[j].accuracy == dps[i].accuracy) {
        keep[i] = false;
        first_copy[i] = static_cast<int>(j);
      }
    }
  }

  for (std::size_t i = 0; i < dps.size(); ++i) {
    if (keep[i]) {
      split.retained.design_points.push_back(dps[i]);
      continue;
    }
    DominatedPoint removed{dps[i], {}, first_copy[i] >= 0};
    if (removed.duplicate) {
      removed.dominators.push_back(dps[first_copy[i]].id);
    } else {
      for (std::size_t j = 0; j < dps.size(); ++j) {
        if (keep[j] && dominates(dps[j], dps[i])) removed.dominators.push_back(dps[j].id);
      }
    }
    split.removed.push_back(std::move(removed));
  }
  return split;
}

Catalog pareto_filter(const Catalog& catalog) { return pareto_split(catalog).retained; }

}  // namespace reap
