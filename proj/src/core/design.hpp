#pragma once

#include <span>
#include <string>
#include <vector>

namespace ogtt {

// A measurement schedule.  Times are whole minutes after ingestion so that
// schedules compare exactly and serialize losslessly; model code works in
// hours (minutes/60, exact for the quarter-hour grid we use).
struct Design {
  std::vector<int> minutes;

  // Validating constructors; max_minutes is the scheduling horizon.
  static Design of(std::vector<int> m, int max_minutes = 120);
  static Design parse(const std::string& csv, int max_minutes = 120);
  static Design from_hours(std::span<const double> hours,
                           int max_minutes = 120);

  std::vector<double> hours() const;
  std::string csv() const;  // "0,45,75,105,120"
  std::string key() const;  // "0-45-75-105-120"; stable id for seeds/stores
  size_t size() const { return minutes.size(); }

  bool operator==(const Design&) const = default;
};

// Throws InputError unless: nonempty, starts at 0, strictly increasing,
// within [0, max_minutes].
void validate_design(const Design& d, int max_minutes = 120);

// Quarter-hour candidate grid {0, 15, ..., 120}.
std::vector<int> quarter_hour_grid();

// Named schedules used throughout.
Design conventional_design();  // 0:00, 1:00, 2:00
Design proposed_design();      // 0:00, 0:45, 1:15, 1:45, 2:00
Design full_grid_design();     // every quarter hour

}  // namespace ogtt
