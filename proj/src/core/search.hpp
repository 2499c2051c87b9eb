#pragma once

#include <map>
#include <span>
#include <vector>

#include "core/compare.hpp"

namespace ogtt {

// All k-point schedules {0} + S with S a (k-1)-subset of the candidate grid
// (grid excludes 0), in deterministic lexicographic order.
std::vector<Design> enumerate_designs(int k, std::span<const int> grid_minutes);

// Candidate measurement times for the search: every quarter hour in (0, 2h].
std::vector<int> default_search_grid();

struct TournamentOptions {
  GrowthSchedule growth;
  int t2 = 100;
  uint64_t root_seed = 0;
  // Optional cheap ranking pass: estimate every design at prefilter_t1 and
  // ladder only the best keep_fraction of them (their samples are reused).
  bool prefilter = false;
  int prefilter_t1 = 50;
  double prefilter_keep = 0.2;
  int workers = 1;
};

struct MatchRecord {
  ComparisonResult result;
  bool champion_replaced = false;
  int samples_reused = 0;    // samples either arm brought into the match
  int samples_computed = 0;  // fresh samples drawn during the match
};

struct TournamentReport {
  Design champion;
  DesignUtilityEstimate champion_estimate;
  std::vector<MatchRecord> matches;
  std::vector<Design> ladder_order;  // designs actually laddered
  bool default_champion = false;     // every match inconclusive
  long samples_computed = 0;
  long samples_reused = 0;
};

// Incumbent ladder: the current champion meets each challenger via
// compare_with_growth; a challenger takes over only on a conclusive win.
// The champion's samples ride along from match to match.
TournamentReport tournament(const NestedMcProblem& problem,
                            std::span<const Design> designs,
                            const TournamentOptions& opt);

struct KComparison {
  int k_low = 0, k_high = 0;  // champions compared: champion(k_high) as A
  ComparisonResult result;
};

struct SearchReport {
  std::vector<int> k_values;
  std::map<int, TournamentReport> tournaments;
  std::vector<KComparison> k_comparisons;
  int chosen_k = 0;
  bool stopped = false;  // true when adding a measurement stopped helping
  long samples_computed = 0;
  long samples_reused = 0;
};

// Tournament per k (ascending), then the stopping rule: the chosen k is the
// smallest one whose (k+1)-champion fails to beat the k-champion
// conclusively at the full T1 budget.  If every added measurement keeps
// winning, the largest k is returned with stopped = false.
SearchReport search_over_k(const NestedMcProblem& problem,
                           std::span<const int> k_values,
                           std::span<const int> grid_minutes,
                           const TournamentOptions& opt);

}  // namespace ogtt
