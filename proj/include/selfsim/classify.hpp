#pragma once

// Activity growth of automatic automorphisms.
//
// Gamma_g(n) counts the words w of length n with g_w != 1. For automatic g it
// grows either polynomially or exponentially; the class is read off the
// digraph whose vertices are the nontrivial states of g and whose edges are
// x-labelled section maps p -> p_x (p_x != 1):
//
//   * no cycle                         finitary
//   * cycles, pairwise disjoint, none
//     reachable from another           bounded
//   * chains of k+1 disjoint cycles    polynomial of degree k
//   * two cycles sharing a vertex      exponential
//
// Cycles are only meaningful on minimized machines, which is why everything
// here runs over canonical states from the store.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "selfsim/element.hpp"

namespace selfsim {

struct ActivityClass {
  enum class Kind { Finitary, Bounded, Polynomial, Exponential };
  Kind        kind  = Kind::Finitary;
  std::size_t value = 0;  // finitary depth, bounded depth, or degree

  bool is_bounded() const noexcept {
    return kind == Kind::Finitary || kind == Kind::Bounded;
  }

  std::string name() const {
    switch (kind) {
      case Kind::Finitary: return "Finitary";
      case Kind::Bounded: return "Bounded";
      case Kind::Polynomial: return "Polynomial";
      case Kind::Exponential: return "Exponential";
    }
    return "?";
  }

  std::string to_string() const {
    return kind == Kind::Exponential ? name()
                                     : name() + "(" + std::to_string(value) + ")";
  }

  bool operator==(ActivityClass const&) const = default;
};

struct DirectedInfo {
  std::size_t period = 0;
  Word        spine;
};

namespace detail {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) {
    return kSaturated;
  }
  return a * b;
}

// The nontrivial part of S(g) with strongly connected components.
struct ActivityGraph {
  std::vector<Element>                   nodes;  // nontrivial states, BFS order
  std::unordered_map<ElementId, std::size_t> index;
  std::vector<std::vector<std::size_t>>  out;    // one entry per letter edge
  std::vector<std::size_t>               comp;   // SCC id per node
  std::vector<bool>                      cyclic; // per SCC
  std::vector<bool>                      simple; // per SCC: a single cycle
  std::size_t                            ncomp = 0;

  explicit ActivityGraph(Element g) {
    Element one = identity(g.degree());
    for (Element s : states_set(g)) {
      if (s != one) {
        index.emplace(s.id(), nodes.size());
        nodes.push_back(s);
      }
    }
    std::size_t const n = nodes.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (ElementId t : nodes[i].node().sections) {
        if (auto it = index.find(t); it != index.end()) {
          out[i].push_back(it->second);
        }
      }
    }
    // Reachability closure; state sets are small.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> stack(out[i].begin(), out[i].end());
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        if (reach[i][v]) {
          continue;
        }
        reach[i][v] = true;
        for (std::size_t w : out[v]) {
          stack.push_back(w);
        }
      }
    }
    comp.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (comp[i] != n) {
        continue;
      }
      comp[i] = ncomp;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (reach[i][j] && reach[j][i]) {
          comp[j] = ncomp;
        }
      }
      ++ncomp;
    }
    cyclic.assign(ncomp, false);
    simple.assign(ncomp, true);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t inside = 0;
      for (std::size_t w : out[i]) {
        if (comp[w] == comp[i]) {
          ++inside;
        }
      }
      if (inside > 0) {
        cyclic[comp[i]] = true;
      }
      if (inside > 1) {
        simple[comp[i]] = false;
      }
    }
  }

  bool on_cycle(std::size_t v) const { return cyclic[comp[v]]; }

  // Largest number of cyclic components on a path from the root.
  std::size_t cycle_chain() const {
    if (nodes.empty()) {
      return 0;
    }
    std::vector<std::int64_t> memo(ncomp, -1);
    std::vector<std::vector<std::size_t>> members(ncomp);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      members[comp[i]].push_back(i);
    }
    // Components are numbered so that edges between distinct components
    // can point either way; recurse with memoization.
    auto rec = [&](auto&& self, std::size_t c) -> std::size_t {
      if (memo[c] >= 0) {
        return static_cast<std::size_t>(memo[c]);
      }
      std::size_t best = 0;
      for (std::size_t v : members[c]) {
        for (std::size_t w : out[v]) {
          if (comp[w] != c) {
            best = std::max(best, self(self, comp[w]));
          }
        }
      }
      std::size_t r = best + (cyclic[c] ? 1 : 0);
      memo[c]       = static_cast<std::int64_t>(r);
      return r;
    };
    return rec(rec, comp[0]);
  }

  bool has_nonsimple_cycle() const {
    for (std::size_t c = 0; c < ncomp; ++c) {
      if (cyclic[c] && !simple[c]) {
        return true;
      }
    }
    return false;
  }
};

}  // namespace detail

// Gamma_g(n), by recursion over the section tree memoized on (state, level).
inline std::uint64_t growth_function(Element g, std::size_t n) {
  double const bits = static_cast<double>(n) * std::log2(static_cast<double>(g.degree()));
  if (bits >= 63.0) {
    throw BudgetExceeded("growth horizon too large: d^n must stay below 2^63");
  }
  ElementId const one = identity(g.degree()).id();
  std::unordered_map<std::uint64_t, std::uint64_t> memo;
  auto rec = [&](auto&& self, ElementId s, std::size_t level) -> std::uint64_t {
    if (s == one) {
      return 0;
    }
    if (level == 0) {
      return 1;
    }
    std::uint64_t key = (static_cast<std::uint64_t>(s) << 24) | level;
    if (auto it = memo.find(key); it != memo.end()) {
      return it->second;
    }
    std::uint64_t total = 0;
    for (ElementId t : Store::global().node(s).sections) {
      total += self(self, t, level - 1);
    }
    memo.emplace(key, total);
    return total;
  };
  return rec(rec, g.id(), n);
}

inline std::vector<std::uint64_t> growth_table(Element g, std::size_t nmax) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 0; n <= nmax; ++n) {
    out.push_back(growth_function(g, n));
  }
  return out;
}

// Smallest m with every level-m state trivial, or nullopt if g lies above a
// cycle of nontrivial states.
inline std::optional<std::size_t> is_finitary(Element g) {
  detail::ActivityGraph graph(g);
  if (graph.nodes.empty()) {
    return 0;
  }
  for (std::size_t c = 0; c < graph.ncomp; ++c) {
    if (graph.cyclic[c]) {
      return std::nullopt;
    }
  }
  std::vector<std::int64_t> depth(graph.nodes.size(), -1);
  auto rec = [&](auto&& self, std::size_t v) -> std::size_t {
    if (depth[v] >= 0) {
      return static_cast<std::size_t>(depth[v]);
    }
    std::size_t best = 0;
    for (std::size_t w : graph.out[v]) {
      best = std::max(best, self(self, w));
    }
    depth[v] = static_cast<std::int64_t>(best + 1);
    return best + 1;
  };
  return rec(rec, 0);
}

// Minimal period l and spine w0 in X^l with g_{w0} = g and every other level-l
// state finitary. Finitary elements (including 1) are never directed.
inline std::optional<DirectedInfo> is_directed(Element g) {
  if (is_finitary(g)) {
    return std::nullopt;
  }
  std::vector<Element> states = states_set(g);
  std::unordered_map<ElementId, bool> finitary;
  for (Element s : states) {
    finitary[s.id()] = is_finitary(s).has_value();
  }
  // Number of level-l words with non-finitary state, saturating at 2.
  std::unordered_map<std::uint64_t, std::uint8_t> memo;
  auto count = [&](auto&& self, ElementId s, std::size_t level) -> std::uint8_t {
    if (finitary.at(s)) {
      return 0;
    }
    if (level == 0) {
      return 1;
    }
    std::uint64_t key = (static_cast<std::uint64_t>(s) << 24) | level;
    if (auto it = memo.find(key); it != memo.end()) {
      return it->second;
    }
    unsigned total = 0;
    for (ElementId t : Store::global().node(s).sections) {
      total = std::min(2U, total + self(self, t, level - 1));
    }
    memo.emplace(key, static_cast<std::uint8_t>(total));
    return static_cast<std::uint8_t>(total);
  };
  for (std::size_t l = 1; l <= states.size(); ++l) {
    if (count(count, g.id(), l) != 1) {
      continue;
    }
    Word      spine;
    ElementId s = g.id();
    for (std::size_t k = l; k > 0; --k) {
      auto const& secs = Store::global().node(s).sections;
      for (Letter x = 0; x < secs.size(); ++x) {
        if (count(count, secs[x], k - 1) == 1) {
          spine.push_back(x);
          s = secs[x];
          break;
        }
      }
    }
    if (s == g.id()) {
      return DirectedInfo{l, std::move(spine)};
    }
  }
  return std::nullopt;
}

// For a bounded, non-finitary g: the smallest m such that every non-finitary
// level-m state is directed.
inline std::size_t bounded_depth(Element g) {
  std::unordered_map<ElementId, bool> directed;
  auto is_dir = [&](Element s) {
    auto [it, fresh] = directed.try_emplace(s.id(), false);
    if (fresh) {
      it->second = is_directed(s).has_value();
    }
    return it->second;
  };
  std::vector<Element> level{g};
  std::size_t const    limit = g.state_count();
  for (std::size_t m = 0; m <= limit; ++m) {
    bool ok = true;
    for (Element s : level) {
      if (!is_finitary(s) && !is_dir(s)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return m;
    }
    std::vector<Element> next;
    std::unordered_map<ElementId, bool> seen;
    for (Element s : level) {
      for (ElementId t : s.node().sections) {
        if (seen.try_emplace(t, true).second) {
          next.emplace_back(t);
        }
      }
    }
    level.swap(next);
  }
  throw VerificationFailure("bounded_depth: no depth found for a bounded element");
}

inline ActivityClass classify(Element g) {
  if (auto m = is_finitary(g)) {
    return {ActivityClass::Kind::Finitary, *m};
  }
  detail::ActivityGraph graph(g);
  if (graph.has_nonsimple_cycle()) {
    return {ActivityClass::Kind::Exponential, 0};
  }
  std::size_t chain = graph.cycle_chain();
  if (chain == 1) {
    return {ActivityClass::Kind::Bounded, bounded_depth(g)};
  }
  return {ActivityClass::Kind::Polynomial, chain - 1};
}

// Number of loop-free skeletons of paths from g in the activity digraph (full
// turns around a cycle removed). For polynomial degree k,
// Gamma_g(n) <= skeletons * (n+1)^k. Saturates on overflow.
inline std::uint64_t activity_skeletons(Element g) {
  detail::ActivityGraph graph(g);
  std::size_t const n = graph.nodes.size();
  if (n == 0) {
    return 0;
  }
  std::vector<std::vector<std::size_t>> members(graph.ncomp);
  for (std::size_t i = 0; i < n; ++i) {
    members[graph.comp[i]].push_back(i);
  }
  std::vector<std::uint64_t> entry(graph.ncomp, 0);
  std::vector<bool>          done(graph.ncomp, false);
  // entry[c]: skeleton continuations from any vertex where a path enters c.
  auto rec = [&](auto&& self, std::size_t c) -> std::uint64_t {
    if (done[c]) {
      return entry[c];
    }
    std::uint64_t total = 0;
    for (std::size_t v : members[c]) {
      std::uint64_t here = 1;
      for (std::size_t w : graph.out[v]) {
        if (graph.comp[w] != c) {
          here = detail::sat_add(here, self(self, graph.comp[w]));
        }
      }
      total = detail::sat_add(total, here);
    }
    done[c]  = true;
    entry[c] = total;
    return total;
  };
  return rec(rec, graph.comp[0]);
}

struct GrowthReport {
  bool                       consistent = true;
  ActivityClass              activity;
  std::vector<std::uint64_t> growth;
  std::uint64_t              skeleton_bound = 0;
  double                     fitted_rate    = 0.0;  // exp(slope of log Gamma)
  std::vector<std::string>   violations;
};

// Cross-checks the growth function against its structural properties:
// symmetry under inversion, subadditivity against each partner, and
// agreement of the sampled values with the classify() tag.
inline GrowthReport check_growth_consistency(Element g, std::size_t nmax,
                                             std::vector<Element> const& partners = {}) {
  GrowthReport rep;
  rep.activity = classify(g);
  rep.growth   = growth_table(g, nmax);
  auto fail    = [&rep](std::string msg) {
    rep.consistent = false;
    rep.violations.push_back(std::move(msg));
  };
  auto inv_growth = growth_table(inverse(g), nmax);
  for (std::size_t n = 0; n <= nmax; ++n) {
    if (inv_growth[n] != rep.growth[n]) {
      fail("Gamma(g) != Gamma(g^-1) at n=" + std::to_string(n));
    }
  }
  for (Element h : partners) {
    auto gh = growth_table(g * h, nmax);
    auto hg = growth_table(h * g, nmax);
    auto hh = growth_table(h, nmax);
    for (std::size_t n = 0; n <= nmax; ++n) {
      if (gh[n] > rep.growth[n] + hh[n] || hg[n] > rep.growth[n] + hh[n]) {
        fail("subadditivity violated at n=" + std::to_string(n));
      }
    }
  }
  using K = ActivityClass::Kind;
  switch (rep.activity.kind) {
    case K::Finitary: {
      std::size_t m = rep.activity.value;
      for (std::size_t n = 0; n <= nmax; ++n) {
        bool zero = rep.growth[n] == 0;
        if (zero != (n >= m)) {
          fail("finitary depth disagrees with Gamma at n=" + std::to_string(n));
        }
      }
      break;
    }
    case K::Bounded:
    case K::Polynomial: {
      std::size_t k      = rep.activity.kind == K::Bounded ? 0 : rep.activity.value;
      rep.skeleton_bound = activity_skeletons(g);
      for (std::size_t n = 0; n <= nmax; ++n) {
        std::uint64_t bound = rep.skeleton_bound;
        for (std::size_t i = 0; i < k; ++i) {
          bound = detail::sat_mul(bound, n + 1);
        }
        if (rep.growth[n] > bound) {
          fail("Gamma exceeds structural bound at n=" + std::to_string(n));
        }
      }
      break;
    }
    case K::Exponential: {
      // Least-squares slope of log Gamma over the upper half of the range.
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int    cnt = 0;
      for (std::size_t n = nmax / 2; n <= nmax; ++n) {
        if (rep.growth[n] == 0) {
          continue;
        }
        double x = static_cast<double>(n);
        double y = std::log(static_cast<double>(rep.growth[n]));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++cnt;
      }
      if (cnt >= 2) {
        double slope    = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        rep.fitted_rate = std::exp(slope);
      }
      if (!(rep.fitted_rate > 1.0)) {
        fail("exponential tag but fitted growth rate <= 1");
      }
      break;
    }
  }
  return rep;
}

}  // namespace selfsim
