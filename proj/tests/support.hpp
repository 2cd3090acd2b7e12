#pragma once

// Test-only helpers and oracles. The oracles here work on raw, unminimized
// Mealy machines and never touch the canonical store, so they check the
// library along an independent path.

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfsim/format.hpp"

namespace selfsim::test {

inline std::string read_file(std::string const& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string group_path(std::string const& name) {
  return std::string(SELFSIM_GROUPS_DIR) + "/" + name + ".aut";
}

inline Automaton load_group(std::string const& name) {
  return parse_machine(read_file(group_path(name)));
}

// All words of length n over {0..d-1}, lexicographic.
inline std::vector<Word> all_words(std::size_t d, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    next.reserve(out.size() * d);
    for (auto const& w : out) {
      for (Letter x = 0; x < d; ++x) {
        Word v = w;
        v.push_back(x);
        next.push_back(std::move(v));
      }
    }
    out.swap(next);
  }
  return out;
}

// A raw automorphism: some state of some (possibly redundant) machine.
struct RawElement {
  MealyMachine machine;
  StateId      root = 0;

  Word act(Word const& w) const { return machine.act(root, w); }
};

inline RawElement raw_from(Automaton const& a, std::string const& name) {
  return {a.machine, a.state(name)};
}

inline RawElement raw_identity(std::size_t d) {
  MealyMachine m(d);
  m.add_state(Perm::identity(d), std::vector<StateId>(d, 0));
  return {m, 0};
}

// Product automaton on pairs, left-to-right action; no minimization.
inline RawElement raw_compose(RawElement const& g, RawElement const& h) {
  std::size_t const d = g.machine.degree();
  std::map<std::pair<StateId, StateId>, StateId> idx;
  std::vector<std::pair<StateId, StateId>>      queue;
  auto visit = [&](StateId p, StateId q) {
    auto [it, fresh] = idx.try_emplace({p, q}, static_cast<StateId>(queue.size()));
    if (fresh) {
      queue.emplace_back(p, q);
    }
    return it->second;
  };
  visit(g.root, h.root);
  MealyMachine m(d);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto [p, q] = queue[i];
    std::vector<Letter> img(d);
    std::vector<StateId> next(d);
    for (Letter x = 0; x < d; ++x) {
      Letter y = g.machine.output(p)(x);
      img[x]   = h.machine.output(q)(y);
      next[x]  = visit(g.machine.next(p, x), h.machine.next(q, y));
    }
    m.add_state(Perm(img), next);
  }
  return {m, 0};
}

inline RawElement raw_inverse(RawElement const& g) {
  std::size_t const d = g.machine.degree();
  MealyMachine m(d);
  for (StateId q = 0; q < g.machine.size(); ++q) {
    Perm inv = g.machine.output(q).inverse();
    std::vector<StateId> next(d);
    for (Letter y = 0; y < d; ++y) {
      next[y] = g.machine.next(q, inv(y));
    }
    m.add_state(inv, next);
  }
  return {m, g.root};
}

// Exact equality of two raw automorphisms: explore the joint state space of
// (g, h) over all input words and compare outputs letter by letter. Every word
// is covered because any word drives the pair through reachable states only.
inline bool raw_equal(RawElement const& g, RawElement const& h) {
  std::size_t const d = g.machine.degree();
  std::map<std::pair<StateId, StateId>, bool> seen;
  std::vector<std::pair<StateId, StateId>>   stack{{g.root, h.root}};
  while (!stack.empty()) {
    auto [p, q] = stack.back();
    stack.pop_back();
    if (!seen.try_emplace({p, q}, true).second) {
      continue;
    }
    if (g.machine.output(p) != h.machine.output(q)) {
      return false;
    }
    for (Letter x = 0; x < d; ++x) {
      stack.emplace_back(g.machine.next(p, x), h.machine.next(q, x));
    }
  }
  return true;
}

// Random product of generators (drawn with replacement) of length <= maxlen.
struct WordSampler {
  std::vector<Element>    gens;
  std::vector<RawElement> raw;
  std::mt19937_64         rng;

  WordSampler(std::vector<Element> g, std::vector<RawElement> r, std::uint64_t seed)
      : gens(std::move(g)), raw(std::move(r)), rng(seed) {}

  std::vector<std::size_t> word(std::size_t maxlen) {
    std::uniform_int_distribution<std::size_t> len(0, maxlen);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    std::vector<std::size_t> w(len(rng));
    for (auto& i : w) {
      i = pick(rng);
    }
    return w;
  }

  Element element(std::vector<std::size_t> const& w) const {
    Element e = identity(gens.front().degree());
    for (std::size_t i : w) {
      e = e * gens[i];
    }
    return e;
  }

  RawElement raw_element(std::vector<std::size_t> const& w) const {
    RawElement e = raw_identity(gens.front().degree());
    for (std::size_t i : w) {
      e = raw_compose(e, raw[i]);
    }
    return e;
  }
};

// Generators of a definition file together with their inverses, as both
// canonical elements and raw machines.
inline WordSampler sampler_for(Automaton const& a, std::vector<std::string> const& names,
                               std::uint64_t seed) {
  std::vector<Element>    g;
  std::vector<RawElement> r;
  for (auto const& n : names) {
    RawElement e = raw_from(a, n);
    g.push_back(a.element(n));
    r.push_back(e);
    g.push_back(inverse(a.element(n)));
    r.push_back(raw_inverse(e));
  }
  return WordSampler(std::move(g), std::move(r), seed);
}

}  // namespace selfsim::test
