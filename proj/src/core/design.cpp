#include "core/design.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "core/errors.hpp"

namespace ogtt {

void validate_design(const Design& d, int max_minutes) {
  if (d.minutes.empty()) throw InputError("design: no measurement times");
  if (d.minutes.front() != 0)
    throw InputError("design: first measurement must be at t=0");
  for (size_t i = 0; i < d.minutes.size(); ++i) {
    if (d.minutes[i] < 0 || d.minutes[i] > max_minutes)
      throw InputError("design: time " + std::to_string(d.minutes[i]) +
                       " outside [0," + std::to_string(max_minutes) + "] min");
    if (i > 0 && d.minutes[i] <= d.minutes[i - 1])
      throw InputError("design: times must be strictly increasing");
  }
}

Design Design::of(std::vector<int> m, int max_minutes) {
  Design d{std::move(m)};
  validate_design(d, max_minutes);
  return d;
}

Design Design::parse(const std::string& csv, int max_minutes) {
  std::vector<int> m;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    int v;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      throw InputError("design: cannot parse '" + tok + "' as minutes");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
      ++pos;
    if (pos != tok.size())
      throw InputError("design: cannot parse '" + tok + "' as minutes");
    m.push_back(v);
  }
  return of(std::move(m), max_minutes);
}

Design Design::from_hours(std::span<const double> hours, int max_minutes) {
  std::vector<int> m;
  m.reserve(hours.size());
  for (double h : hours) {
    const double mins = h * 60.0;
    const double r = std::round(mins);
    if (std::abs(mins - r) > 1e-6)
      throw InputError("design: time " + std::to_string(h) +
                       " h is not a whole minute");
    m.push_back(static_cast<int>(r));
  }
  return of(std::move(m), max_minutes);
}

std::vector<double> Design::hours() const {
  std::vector<double> h;
  h.reserve(minutes.size());
  for (int m : minutes) h.push_back(static_cast<double>(m) / 60.0);
  return h;
}

std::string Design::csv() const {
  std::string s;
  for (size_t i = 0; i < minutes.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(minutes[i]);
  }
  return s;
}

std::string Design::key() const {
  std::string s;
  for (size_t i = 0; i < minutes.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(minutes[i]);
  }
  return s;
}

std::vector<int> quarter_hour_grid() {
  std::vector<int> g;
  for (int m = 0; m <= 120; m += 15) g.push_back(m);
  return g;
}

Design conventional_design() { return Design::of({0, 60, 120}); }

Design proposed_design() { return Design::of({0, 45, 75, 105, 120}); }

Design full_grid_design() { return Design::of(quarter_hour_grid()); }

}  // namespace ogtt
