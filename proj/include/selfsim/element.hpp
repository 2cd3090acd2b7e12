#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "selfsim/machine.hpp"
#include "selfsim/store.hpp"

namespace selfsim {

// An automatic automorphism of the rooted tree over {0..d-1}, held as a handle
// into the global canonical store. Handles are equal iff the automorphisms
// are equal, so comparison is the word problem.
//
// Composition is left to right: (g * h)(w) = h(g(w)).
class Element {
 public:
  static constexpr ElementId kInvalid = std::numeric_limits<ElementId>::max();

  Element() = default;
  explicit Element(ElementId id) : id_(id) {}

  ElementId   id() const noexcept { return id_; }
  bool        valid() const noexcept { return id_ != kInvalid; }
  Node const& node() const { return Store::global().node(id_); }
  std::size_t degree() const { return node().degree; }
  Perm const& root_perm() const { return node().perm; }
  Element     section(Letter x) const { return Element(node().sections[x]); }
  // Number of states of the canonical machine, i.e. |states_set|.
  std::size_t state_count() const { return node().states; }

  auto operator<=>(Element const&) const = default;
  bool operator==(Element const&) const  = default;

 private:
  ElementId id_ = kInvalid;
};

struct Decomposition {
  Perm                 root_perm;
  std::vector<Element> sections;
};

inline Element canonicalize(MealyMachine const& m, StateId state) {
  return Element(Store::global().intern(m, state));
}

inline Element identity(std::size_t degree) {
  return Element(Store::global().identity(degree));
}

inline Decomposition decompose(Element g) {
  Node const& n = g.node();
  Decomposition dec{n.perm, {}};
  dec.sections.reserve(n.sections.size());
  for (ElementId s : n.sections) {
    dec.sections.emplace_back(s);
  }
  return dec;
}

// Builds a machine whose states are the states of the given roots (ids from
// the store). Returns the machine and the local index of each root.
inline MealyMachine machine_of(std::vector<Element> const& roots,
                               std::vector<StateId>*       root_index = nullptr,
                               std::vector<Element>*       states     = nullptr) {
  if (roots.empty()) {
    throw Error("machine_of: no roots");
  }
  std::size_t const d = roots.front().degree();
  std::unordered_map<ElementId, StateId> local;
  std::vector<ElementId> order;
  auto visit = [&](ElementId id) {
    auto [it, fresh] = local.try_emplace(id, static_cast<StateId>(order.size()));
    if (fresh) {
      order.push_back(id);
    }
    return it->second;
  };
  for (Element r : roots) {
    if (r.degree() != d) {
      throw AlphabetMismatch(d, r.degree());
    }
    StateId q = visit(r.id());
    if (root_index != nullptr) {
      root_index->push_back(q);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (ElementId s : Store::global().node(order[i]).sections) {
      visit(s);
    }
  }
  MealyMachine m(d);
  for (ElementId id : order) {
    Node const& n = Store::global().node(id);
    std::vector<StateId> next(d);
    for (Letter x = 0; x < d; ++x) {
      next[x] = local.at(n.sections[x]);
    }
    m.add_state(n.perm, std::move(next));
  }
  if (states != nullptr) {
    states->clear();
    for (ElementId id : order) {
      states->emplace_back(id);
    }
  }
  return m;
}

inline Element recompose(Decomposition const& dec) {
  std::size_t const d = dec.root_perm.degree();
  if (dec.sections.size() != d) {
    throw Error("recompose: need one section per letter");
  }
  for (Element s : dec.sections) {
    if (s.degree() != d) {
      throw AlphabetMismatch(d, s.degree());
    }
  }
  std::vector<StateId> idx;
  MealyMachine sub = machine_of(dec.sections, &idx);
  MealyMachine m(d);
  std::vector<StateId> next(d);
  for (Letter x = 0; x < d; ++x) {
    next[x] = idx[x] + 1;
  }
  m.add_state(dec.root_perm, next);
  for (StateId q = 0; q < sub.size(); ++q) {
    std::vector<StateId> row(d);
    for (Letter x = 0; x < d; ++x) {
      row[x] = sub.next(q, x) + 1;
    }
    m.add_state(sub.output(q), std::move(row));
  }
  return canonicalize(m, 0);
}

// The rooted automorphism <1,...,1>sigma.
inline Element rooted(Perm const& sigma) {
  std::size_t const d = sigma.degree();
  return recompose({sigma, std::vector<Element>(d, identity(d))});
}

namespace detail {

inline ElementId compose_uncached(ElementId g, ElementId h) {
  Store&      st = Store::global();
  std::size_t d  = st.node(g).degree;
  std::unordered_map<std::uint64_t, StateId> index;
  std::vector<std::pair<ElementId, ElementId>> queue;
  auto visit = [&](ElementId p, ElementId q) {
    std::uint64_t key = (static_cast<std::uint64_t>(p) << 32) | q;
    auto [it, fresh]  = index.try_emplace(key, static_cast<StateId>(queue.size()));
    if (fresh) {
      queue.emplace_back(p, q);
    }
    return it->second;
  };
  visit(g, h);
  MealyMachine m(d);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto [p, q]    = queue[i];
    Node const& np = st.node(p);
    Node const& nq = st.node(q);
    std::vector<StateId> next(d);
    for (Letter x = 0; x < d; ++x) {
      next[x] = visit(np.sections[x], nq.sections[np.perm(x)]);
    }
    m.add_state(np.perm.then(nq.perm), std::move(next));
  }
  return st.intern(m, 0);
}

}  // namespace detail

// Wreath product: the section of g*h at x is g_x * h_{sigma_g(x)} and its root
// permutation is sigma_g then sigma_h.
inline Element compose(Element g, Element h) {
  if (g.degree() != h.degree()) {
    throw AlphabetMismatch(g.degree(), h.degree());
  }
  thread_local std::unordered_map<std::uint64_t, ElementId> l1;
  std::uint64_t key = (static_cast<std::uint64_t>(g.id()) << 32) | h.id();
  if (auto it = l1.find(key); it != l1.end()) {
    return Element(it->second);
  }
  Store&    st = Store::global();
  ElementId out;
  if (!st.lookup_product(g.id(), h.id(), out)) {
    out = detail::compose_uncached(g.id(), h.id());
    st.remember_product(g.id(), h.id(), out);
  }
  if (l1.size() > (std::size_t{1} << 22)) {
    l1.clear();
  }
  l1.emplace(key, out);
  return Element(out);
}

inline Element operator*(Element g, Element h) { return compose(g, h); }

inline Element inverse(Element g) {
  Store&    st = Store::global();
  ElementId out;
  if (st.lookup_inverse(g.id(), out)) {
    return Element(out);
  }
  std::vector<Element> states;
  MealyMachine m = machine_of({g}, nullptr, &states);
  std::size_t const d = m.degree();
  MealyMachine inv(d);
  for (StateId q = 0; q < m.size(); ++q) {
    Perm pinv = m.output(q).inverse();
    std::vector<StateId> next(d);
    // (g^-1)_y = (g_{sigma^-1(y)})^-1
    for (Letter y = 0; y < d; ++y) {
      next[y] = m.next(q, pinv(y));
    }
    inv.add_state(std::move(pinv), std::move(next));
  }
  out = st.intern(inv, 0);
  st.remember_inverse(g.id(), out);
  return Element(out);
}

// g^k for any integer k.
inline Element power(Element g, long k) {
  Element base = k < 0 ? inverse(g) : g;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k)
                          : static_cast<unsigned long>(k);
  Element r = identity(g.degree());
  while (e > 0) {
    if (e & 1U) {
      r = r * base;
    }
    base = base * base;
    e >>= 1U;
  }
  return r;
}

inline Word act_word(Element g, Word const& w) {
  Store&            st = Store::global();
  std::size_t const d  = g.degree();
  Word out(w.size());
  ElementId q = g.id();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= d) {
      throw Error("letter out of range");
    }
    Node const& n = st.node(q);
    out[i]        = n.perm(w[i]);
    q             = n.sections[w[i]];
  }
  return out;
}

inline Element state_at(Element g, Word const& w) {
  Store&    st = Store::global();
  ElementId q  = g.id();
  for (Letter x : w) {
    if (x >= g.degree()) {
      throw Error("letter out of range");
    }
    q = st.node(q).sections[x];
  }
  return Element(q);
}

// S(g): all states reachable from g, in breadth-first order from g.
inline std::vector<Element> states_set(Element g) {
  std::vector<Element> order{g};
  std::unordered_map<ElementId, bool> seen{{g.id(), true}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (ElementId s : order[i].node().sections) {
      if (seen.try_emplace(s, true).second) {
        order.emplace_back(s);
      }
    }
  }
  return order;
}

inline bool is_trivial(Element g) {
  for (Element s : states_set(g)) {
    if (!s.root_perm().is_identity()) {
      return false;
    }
  }
  return true;
}

inline bool equal(Element g, Element h) {
  if (g.degree() != h.degree()) {
    throw AlphabetMismatch(g.degree(), h.degree());
  }
  return g == h;
}

}  // namespace selfsim

template <>
struct std::hash<selfsim::Element> {
  std::size_t operator()(selfsim::Element const& e) const noexcept {
    return std::hash<selfsim::ElementId>{}(e.id());
  }
};
