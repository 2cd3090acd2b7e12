#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "selfsim/error.hpp"
#include "selfsim/perm.hpp"

namespace selfsim {

using StateId = std::uint32_t;

// A finite invertible Mealy automaton over the alphabet {0..degree-1}.
//
// State q reading letter x writes output(q)(x) and moves to next(q, x).
class MealyMachine {
 public:
  MealyMachine() = default;
  explicit MealyMachine(std::size_t degree) : degree_(degree) {
    if (degree < 1) {
      throw Error("alphabet must be nonempty");
    }
  }

  std::size_t degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return output_.size(); }

  StateId add_state(Perm output, std::vector<StateId> next) {
    if (output.degree() != degree_) {
      throw AlphabetMismatch(degree_, output.degree());
    }
    if (next.size() != degree_) {
      throw Error("transition row has wrong length");
    }
    output_.push_back(std::move(output));
    next_.insert(next_.end(), next.begin(), next.end());
    return static_cast<StateId>(output_.size() - 1);
  }

  Perm const& output(StateId q) const { return output_[q]; }
  StateId next(StateId q, Letter x) const { return next_[q * degree_ + x]; }
  void set_next(StateId q, Letter x, StateId t) { next_[q * degree_ + x] = t; }

  // Transitions must be total and land on existing states.
  void validate() const {
    for (StateId t : next_) {
      if (t >= size()) {
        throw Error("transition to nonexistent state " + std::to_string(t));
      }
    }
  }

  // Pi*_box(w, q): the image of w under state q.
  Word act(StateId q, Word const& w) const {
    Word out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] >= degree_) {
        throw Error("letter out of range");
      }
      out[i] = output_[q](w[i]);
      q      = next(q, w[i]);
    }
    return out;
  }

  // Pi*_bullet(w, q).
  StateId follow(StateId q, Word const& w) const {
    for (Letter x : w) {
      q = next(q, x);
    }
    return q;
  }

 private:
  std::size_t       degree_ = 0;
  std::vector<Perm> output_;
  std::vector<StateId> next_;
};

// Result of restricting to the reachable part and merging equivalent states.
struct MinimizedMachine {
  MealyMachine machine;
  StateId      root = 0;
};

// Restricts to states reachable from `root` and merges behaviourally
// equivalent ones by Moore partition refinement: the initial partition is by
// output permutation, refined by the classes of transition targets.
inline MinimizedMachine minimize(MealyMachine const& m, StateId root) {
  std::size_t const d = m.degree();
  std::vector<StateId> reach;
  std::vector<std::int64_t> local(m.size(), -1);
  reach.push_back(root);
  local[root] = 0;
  for (std::size_t i = 0; i < reach.size(); ++i) {
    for (Letter x = 0; x < d; ++x) {
      StateId t = m.next(reach[i], x);
      if (local[t] < 0) {
        local[t] = static_cast<std::int64_t>(reach.size());
        reach.push_back(t);
      }
    }
  }
  std::size_t const n = reach.size();

  std::vector<std::uint32_t> cls(n);
  std::size_t nclasses = 0;
  {
    std::map<Perm, std::uint32_t> by_perm;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = by_perm.try_emplace(
          m.output(reach[i]), static_cast<std::uint32_t>(by_perm.size()));
      cls[i] = it->second;
    }
    nclasses = by_perm.size();
  }
  while (true) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> by_sig;
    std::vector<std::uint32_t> next_cls(n);
    std::vector<std::uint32_t> sig(d + 1);
    for (std::size_t i = 0; i < n; ++i) {
      sig[0] = cls[i];
      for (Letter x = 0; x < d; ++x) {
        sig[x + 1] = cls[local[m.next(reach[i], x)]];
      }
      auto [it, fresh] =
          by_sig.try_emplace(sig, static_cast<std::uint32_t>(by_sig.size()));
      next_cls[i] = it->second;
    }
    cls.swap(next_cls);
    if (by_sig.size() == nclasses) {
      break;
    }
    nclasses = by_sig.size();
  }

  MinimizedMachine out{MealyMachine(d), 0};
  std::vector<bool> built(nclasses, false);
  std::vector<std::size_t> rep(nclasses);
  for (std::size_t i = 0; i < n; ++i) {
    if (!built[cls[i]]) {
      built[cls[i]] = true;
      rep[cls[i]]   = i;
    }
  }
  for (std::size_t c = 0; c < nclasses; ++c) {
    StateId q = reach[rep[c]];
    std::vector<StateId> next(d);
    for (Letter x = 0; x < d; ++x) {
      next[x] = cls[local[m.next(q, x)]];
    }
    out.machine.add_state(m.output(q), std::move(next));
  }
  out.root = cls[0];
  return out;
}

// Breadth-first relabelling from `root` with letters in increasing order.
// Returns old-state -> new-state (or -1 if unreachable).
inline std::vector<std::int64_t> bfs_order(MealyMachine const& m, StateId root) {
  std::vector<std::int64_t> label(m.size(), -1);
  std::vector<StateId> queue{root};
  label[root] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (Letter x = 0; x < m.degree(); ++x) {
      StateId t = m.next(queue[i], x);
      if (label[t] < 0) {
        label[t] = static_cast<std::int64_t>(queue.size());
        queue.push_back(t);
      }
    }
  }
  return label;
}

// Byte encoding of a minimized machine relabelled from `root`. Two minimized
// machines define the same automorphism at their roots iff the keys agree.
inline std::string canonical_key(MealyMachine const& m, StateId root) {
  auto label = bfs_order(m, root);
  std::vector<StateId> order(m.size());
  std::size_t n = 0;
  for (StateId q = 0; q < m.size(); ++q) {
    if (label[q] >= 0) {
      order[label[q]] = q;
      ++n;
    }
  }
  std::string key;
  auto put = [&key](std::uint32_t v) {
    key.append(reinterpret_cast<char const*>(&v), sizeof v);
  };
  put(static_cast<std::uint32_t>(m.degree()));
  put(static_cast<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    StateId q = order[i];
    for (Letter y : m.output(q).images()) {
      key.append(reinterpret_cast<char const*>(&y), sizeof y);
    }
    for (Letter x = 0; x < m.degree(); ++x) {
      put(static_cast<std::uint32_t>(label[m.next(q, x)]));
    }
  }
  return key;
}

}  // namespace selfsim
