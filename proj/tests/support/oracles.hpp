#pragma once

// Independent reference computations used to check the library. None of these
// call the code paths they verify.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "swsds/eval.hpp"
#include "swsds/kb.hpp"
#include "swsds/scorer.hpp"
#include "swsds/wsd.hpp"

namespace swsds::oracle {

// ---- annotation equality by unordered-tree isomorphism ----------------------

inline bool same_tree(const AnnotationNode& a, const AnnotationNode& b) {
  if (a.sememe != b.sememe || a.relation != b.relation || a.children.size() != b.children.size()) return false;
  std::vector<bool> used(b.children.size(), false);
  for (const auto& ca : a.children) {
    bool matched = false;
    for (std::size_t k = 0; k < b.children.size(); ++k) {
      if (!used[k] && same_tree(ca, b.children[k])) {
        used[k] = matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

// Numeric comparison of decimal ids, written out digit by digit.
inline bool id_less(const std::string& a, const std::string& b) {
  auto strip = [](const std::string& s) {
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i] == '0') ++i;
    return s.substr(i);
  };
  const bool da = std::all_of(a.begin(), a.end(), ::isdigit) && !a.empty();
  const bool db = std::all_of(b.begin(), b.end(), ::isdigit) && !b.empty();
  if (da && db) {
    auto x = strip(a), y = strip(b);
    if (x.size() != y.size()) return x.size() < y.size();
    if (x != y) return x < y;
  }
  return a < b;
}

// Brute-force SememeWSD over a flat sense list: linear scans, isomorphism
// instead of canonical keys, fresh averaging.
inline std::optional<std::string> brute_force_wsd(const std::vector<Sense>& senses, const WsdInstance& inst,
                                                  Scorer& scorer, std::size_t max_substitutes) {
  std::vector<const Sense*> candidates;
  for (const auto& s : senses) {
    if (s.lemma == inst.target_word && s.pos == inst.target_pos) candidates.push_back(&s);
  }
  if (candidates.empty()) return std::nullopt;
  std::sort(candidates.begin(), candidates.end(),
            [](const Sense* x, const Sense* y) { return id_less(x->sense_id, y->sense_id); });
  if (candidates.size() == 1) return candidates[0]->sense_id;

  MaskedQuery query{inst.context, inst.target_position};
  query.tokens[inst.target_position] = std::string(kMaskToken);

  std::optional<double> best;
  std::string chosen;
  for (const Sense* cand : candidates) {
    std::vector<std::string> subs;
    for (const auto& other : senses) {
      if (subs.size() == max_substitutes) break;
      if (other.lemma == cand->lemma) continue;
      if (std::find(subs.begin(), subs.end(), other.lemma) != subs.end()) continue;
      if (!scorer.in_vocabulary(other.lemma)) continue;
      if (same_tree(other.annotation.tree(), cand->annotation.tree())) subs.push_back(other.lemma);
    }
    if (subs.empty()) continue;
    double total = 0;
    for (const auto& lemma : subs) {
      const std::vector<std::string> one{lemma};
      total += scorer.score(query, one).scores.at(lemma);
    }
    const double avg = total / static_cast<double>(subs.size());
    const bool tied = best && std::abs(avg - *best) <= 1e-12;
    if (!best || (!tied && avg > *best) || (tied && id_less(cand->sense_id, chosen))) {
      best = avg;
      chosen = cand->sense_id;
    }
  }
  if (!best) return candidates[0]->sense_id;  // first-sense fallback
  return chosen;
}

// ---- transport LP by exhaustive vertex enumeration ---------------------------

// Every basic feasible solution of the m x n transportation polytope is
// supported on a spanning tree of K_{m,n} (m+n-1 cells). Enumerate all cell
// subsets of that size, keep the spanning trees, solve each by leaf peeling,
// and return the cheapest non-negative one.
inline double transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::vector<std::vector<double>>& cost) {
  const int m = static_cast<int>(supply.size()), n = static_cast<int>(demand.size());
  const int cells = m * n, pick = m + n - 1;
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> chosen(pick);
  std::iota(chosen.begin(), chosen.end(), 0);
  while (true) {
    // spanning-tree test via union-find
    std::vector<int> parent(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool acyclic = true;
    for (int c : chosen) {
      int a = find(c / n), b = find(m + c % n);
      if (a == b) {
        acyclic = false;
        break;
      }
      parent[a] = b;
    }
    if (acyclic) {
      // leaf peeling
      std::vector<double> s = supply, d = demand;
      std::vector<bool> done(pick, false);
      std::vector<double> flow(pick, 0.0);
      bool feasible = true;
      for (int round = 0; round < pick; ++round) {
        std::vector<int> row_deg(m, 0), col_deg(n, 0);
        for (int k = 0; k < pick; ++k) {
          if (done[k]) continue;
          ++row_deg[chosen[k] / n];
          ++col_deg[chosen[k] % n];
        }
        int leaf = -1;
        for (int k = 0; k < pick && leaf < 0; ++k) {
          if (!done[k] && (row_deg[chosen[k] / n] == 1 || col_deg[chosen[k] % n] == 1)) leaf = k;
        }
        const int i = chosen[leaf] / n, j = chosen[leaf] % n;
        // a row leaf takes the row's remaining supply, else the column's demand
        const double x = row_deg[i] == 1 ? s[i] : d[j];
        flow[leaf] = x;
        s[i] -= x;
        d[j] -= x;
        done[leaf] = true;
      }
      double total = 0;
      for (int k = 0; k < pick; ++k) {
        if (flow[k] < -1e-12) feasible = false;
        total += flow[k] * cost[chosen[k] / n][chosen[k] % n];
      }
      if (feasible) best = std::min(best, total);
    }
    // next combination
    int k = pick - 1;
    while (k >= 0 && chosen[k] == cells - pick + k) --k;
    if (k < 0) break;
    ++chosen[k];
    for (int t = k + 1; t < pick; ++t) chosen[t] = chosen[t - 1] + 1;
  }
  return best;
}

// ---- plain-loop mean ----------------------------------------------------------

inline std::vector<double> mean_of(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out[i] += r[i];
  }
  for (auto& x : out) x /= static_cast<double>(rows.size());
  return out;
}

// ---- threshold sweep ------------------------------------------------------------

// Tries every midpoint between consecutive distinct distances, smallest first.
inline std::pair<double, double> best_threshold(const std::vector<double>& d, const std::vector<int>& labels) {
  std::vector<double> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  double best_t = 0, best_acc = -1;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) continue;
    const double t = (sorted[i] + sorted[i + 1]) / 2;
    int correct = 0;
    for (std::size_t k = 0; k < d.size(); ++k) correct += ((d[k] <= t ? 1 : 0) == labels[k]);
    const double acc = static_cast<double>(correct) / static_cast<double>(d.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_t = t;
    }
  }
  return {best_t, best_acc};
}

// ---- macro-F1 from confusion counts ---------------------------------------------

// Precision/recall F1 per label, averaged over labels, then over (lemma, pos).
// Single-label items only.
inline double macro_f1(const std::vector<WsdPrediction>& items) {
  std::map<std::string, std::vector<const WsdPrediction*>> targets;
  for (const auto& p : items) targets[p.lemma + "/" + to_string(p.pos)].push_back(&p);
  double total = 0;
  for (const auto& [_, group] : targets) {
    std::set<std::string> labels;
    for (const auto* p : group) {
      labels.insert(p->gold);
      if (p->predicted) labels.insert(*p->predicted);
    }
    double per_target = 0;
    for (const auto& label : labels) {
      double tp = 0, fp = 0, fn = 0;
      for (const auto* p : group) {
        if (p->predicted && *p->predicted == label && p->gold == label) tp += 1;
        if (p->predicted && *p->predicted == label && p->gold != label) fp += 1;
        if (p->gold == label && !(p->predicted && *p->predicted == label)) fn += 1;
      }
      const double precision = tp + fp > 0 ? tp / (tp + fp) : 0;
      const double recall = tp + fn > 0 ? tp / (tp + fn) : 0;
      per_target += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    }
    total += per_target / static_cast<double>(labels.size());
  }
  return total / static_cast<double>(targets.size());
}

}  // namespace swsds::oracle
