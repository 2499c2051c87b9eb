#include "core/search.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace ogtt {

std::vector<int> default_search_grid() {
  std::vector<int> g;
  for (int m = 15; m <= 120; m += 15) g.push_back(m);
  return g;
}

std::vector<Design> enumerate_designs(int k,
                                      std::span<const int> grid_minutes) {
  if (k < 1) throw InputError("enumerate_designs: k must be >= 1");
  std::vector<int> grid(grid_minutes.begin(), grid_minutes.end());
  std::sort(grid.begin(), grid.end());
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0 || (i > 0 && grid[i] == grid[i - 1]))
      throw InputError("enumerate_designs: grid must be positive and unique");
  }
  const int m = static_cast<int>(grid.size());
  const int r = k - 1;
  if (r > m)
    throw InputError("enumerate_designs: k-1 exceeds the grid size");

  std::vector<Design> out;
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    std::vector<int> mins{0};
    for (int i : idx) mins.push_back(grid[i]);
    out.push_back(Design::of(std::move(mins)));
    if (r == 0) break;
    // Next lexicographic combination.
    int i = r - 1;
    while (i >= 0 && idx[i] == m - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

TournamentReport tournament(const NestedMcProblem& problem,
                            std::span<const Design> designs,
                            const TournamentOptions& opt) {
  if (designs.empty()) throw InputError("tournament: no designs");

  TournamentReport rep;
  std::vector<Design> ladder(designs.begin(), designs.end());
  std::map<std::string, DesignUtilityEstimate> cache;  // by design key

  if (opt.prefilter && ladder.size() > 2) {
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t i = 0; i < ladder.size(); ++i) {
      DesignUtilityEstimate e =
          estimate_utility(problem, ladder[i], opt.prefilter_t1, opt.t2,
                           opt.root_seed, "s", opt.workers);
      rep.samples_computed += e.t1();
      ranked.emplace_back(e.mean, i);
      cache[ladder[i].key()] = std::move(e);
    }
    // Best mean first; key as deterministic tie-break.
    std::sort(ranked.begin(), ranked.end(),
              [&](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return ladder[a.second].key() < ladder[b.second].key();
              });
    const size_t keep = std::max<size_t>(
        2, static_cast<size_t>(
               std::ceil(opt.prefilter_keep *
                         static_cast<double>(ladder.size()))));
    std::vector<Design> kept;
    for (size_t i = 0; i < std::min(keep, ranked.size()); ++i)
      kept.push_back(ladder[ranked[i].second]);
    ladder = std::move(kept);
  }
  rep.ladder_order = ladder;

  Design champion = ladder[0];
  DesignUtilityEstimate champ_est;
  if (auto it = cache.find(champion.key()); it != cache.end())
    champ_est = it->second;
  bool any_conclusive = false;

  for (size_t i = 1; i < ladder.size(); ++i) {
    const Design& challenger = ladder[i];
    const DesignUtilityEstimate* base_b = nullptr;
    if (auto it = cache.find(challenger.key()); it != cache.end())
      base_b = &it->second;

    MatchRecord match;
    match.samples_reused =
        champ_est.t1() + (base_b != nullptr ? base_b->t1() : 0);
    GrowthComparison g = compare_with_growth(
        problem, champion, challenger, opt.t2, opt.root_seed, opt.growth,
        "s", "s", champ_est.samples.empty() ? nullptr : &champ_est, base_b,
        opt.workers);
    match.result = g.result;
    match.samples_computed = g.samples_computed;
    rep.samples_computed += g.samples_computed;
    rep.samples_reused += match.samples_reused;

    if (g.result.verdict == Verdict::kBBetter) {
      champion = challenger;
      champ_est = std::move(g.est_b);
      match.champion_replaced = true;
      any_conclusive = true;
    } else {
      champ_est = std::move(g.est_a);
      if (g.result.verdict == Verdict::kABetter) any_conclusive = true;
    }
    rep.matches.push_back(std::move(match));
  }

  if (champ_est.samples.empty()) {
    // Single-design field: give the champion an estimate at the first-look
    // budget so downstream comparisons have something to work with.
    champ_est = estimate_utility(problem, champion, opt.growth.t1_initial,
                                 opt.t2, opt.root_seed, "s", opt.workers);
    rep.samples_computed += champ_est.t1();
  }
  rep.champion = champion;
  rep.champion_estimate = std::move(champ_est);
  rep.default_champion = !rep.matches.empty() && !any_conclusive;
  return rep;
}

SearchReport search_over_k(const NestedMcProblem& problem,
                           std::span<const int> k_values,
                           std::span<const int> grid_minutes,
                           const TournamentOptions& opt) {
  if (k_values.empty()) throw InputError("search: no k values");
  std::vector<int> ks(k_values.begin(), k_values.end());
  std::sort(ks.begin(), ks.end());
  for (size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] != ks[i - 1] + 1)
      throw InputError("search: k values must be consecutive");
  }

  SearchReport rep;
  rep.k_values = ks;
  for (int k : ks) {
    const std::vector<Design> designs = enumerate_designs(k, grid_minutes);
    TournamentReport tr = tournament(problem, designs, opt);
    rep.samples_computed += tr.samples_computed;
    rep.samples_reused += tr.samples_reused;
    rep.tournaments.emplace(k, std::move(tr));
  }

  rep.chosen_k = ks.back();
  rep.stopped = false;
  for (size_t i = 0; i + 1 < ks.size(); ++i) {
    const int k = ks[i], k1 = ks[i + 1];
    TournamentReport& low = rep.tournaments.at(k);
    TournamentReport& high = rep.tournaments.at(k1);
    GrowthComparison g = compare_with_growth(
        problem, high.champion, low.champion, opt.t2, opt.root_seed,
        opt.growth, "s", "s", &high.champion_estimate,
        &low.champion_estimate, opt.workers);
    rep.samples_computed += g.samples_computed;
    rep.samples_reused += high.champion_estimate.t1() +
                          low.champion_estimate.t1();
    // Keep the grown estimates for any later comparison.
    high.champion_estimate = std::move(g.est_a);
    low.champion_estimate = std::move(g.est_b);
    rep.k_comparisons.push_back(KComparison{k, k1, g.result});
    if (g.result.verdict != Verdict::kABetter) {
      // Adding the (k+1)-th measurement did not conclusively help: stop.
      rep.chosen_k = k;
      rep.stopped = true;
      break;
    }
    rep.chosen_k = k1;
  }
  return rep;
}

}  // namespace ogtt
