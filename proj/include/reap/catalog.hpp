#pragma once

// Design points and catalogs. All quantities are SI internally: accuracy is a
// fraction in (0, 1], power in watts, energy in joules.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace reap {

/// Keep-alive draw of the harvesting circuitry: 0.18 J per hour.
inline constexpr double kDefaultOffPower = 5.0e-5;

struct DesignPoint {
  int id = 0;
  std::string label;
  double accuracy = 0.0;
  double power = 0.0;
  // Carried for reporting only; the optimizer works from average power.
  double energy_per_activity = 0.0;
  std::string description;

  bool operator==(const DesignPoint&) const = default;
};

struct Catalog {
  std::vector<DesignPoint> design_points;
  double off_power = 0.0;

  bool operator==(const Catalog&) const = default;

  std::size_t size() const { return design_points.size(); }
  bool empty() const { return design_points.empty(); }
};

/// Parse or validation failure while reading a catalog file. `row()` is the
/// 1-based line number, or 0 when the failure is not tied to a line.
class CatalogError : public std::runtime_error {
 public:
  CatalogError(const std::string& message, int row = 0);
  int row() const { return row_; }

 private:
  int row_;
};

/// Five Pareto-optimal HAR design points with a 0.05 mW keep-alive draw.
Catalog builtin_table1();

struct Violation {
  std::string field;
  std::string message;
};

/// Every broken Catalog / DesignPoint invariant; empty when the catalog is valid.
std::vector<Violation> validate(const Catalog& catalog);

enum class AccuracyUnit { kFraction, kPercent };
enum class PowerUnit { kWatt, kMilliwatt };

// Unit declaration used when a file has no `#units:` line.
struct CatalogFormat {
  AccuracyUnit accuracy = AccuracyUnit::kFraction;
  PowerUnit power = PowerUnit::kWatt;
};

/// Reads the catalog CSV:
///
///   #units: accuracy=percent, power=mW
///   #off_power=0.05
///   id,label,accuracy,power[,energy_per_activity][,description]
///   1,DP1,94,2.76
///
/// `#off_power` and the optional energy column use the declared power unit
/// (mW pairs with mJ); a missing `#off_power` means kDefaultOffPower. Throws
/// CatalogError on parse or validation failure.
Catalog load_catalog(std::istream& in, CatalogFormat format = {});
Catalog load_catalog_file(const std::string& path);

/// Resolves `builtin:table1` or a file path.
Catalog resolve_catalog(const std::string& source);

/// Canonical form: fractions and watts, 9 significant digits.
void write_catalog(std::ostream& out, const Catalog& catalog);
std::string serialize_catalog(const Catalog& catalog);

/// True when `a` has power <= and accuracy >= `b` with one inequality strict.
bool dominates(const DesignPoint& a, const DesignPoint& b);

struct DominatedPoint {
  DesignPoint point;
  std::vector<int> dominators;  // ids of retained dominators, or the retained twin of a duplicate
  bool duplicate = false;       // same (power, accuracy) as an earlier point
};

struct ParetoSplit {
  Catalog retained;
  std::vector<DominatedPoint> removed;
};

/// Keeps non-dominated points in input order. Exact (power, accuracy)
/// duplicates keep their first occurrence.
Catalog pareto_filter(const Catalog& catalog);
ParetoSplit pareto_split(const Catalog& catalog);

}  // namespace reap
