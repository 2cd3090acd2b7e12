#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "selfsim/machine.hpp"

namespace selfsim {

using ElementId = std::uint32_t;

// One interned automorphism: its root permutation and the ids of its
// sections. Together the nodes form a single (growing) minimal automaton
// whose states are all automorphisms seen so far.
struct Node {
  std::uint32_t          degree = 0;
  std::uint32_t          states = 0;  // size of the canonical machine
  Perm                   perm;
  std::vector<ElementId> sections;
};

// Append-only hash-consing table of canonical machines.
//
// Interning a machine interns every one of its states at once, so section
// ids are always available and two ids are equal iff the automorphisms are.
// Lookups of existing nodes are lock-free; inserts are serialized and
// idempotent. Nodes never move once created.
class Store {
 public:
  Store() = default;
  Store(Store const&)            = delete;
  Store& operator=(Store const&) = delete;

  static Store& global() {
    static Store s;
    return s;
  }

  Node const& node(ElementId id) const {
    return chunks_[id >> kChunkBits][id & kChunkMask];
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return count_;
  }

  ElementId intern(MealyMachine const& m, StateId root) {
    m.validate();
    MinimizedMachine mm = minimize(m, root);
    std::string      key = canonical_key(mm.machine, mm.root);
    {
      std::shared_lock lock(mu_);
      if (auto it = index_.find(key); it != index_.end()) {
        return it->second;
      }
    }
    std::unique_lock lock(mu_);
    if (auto it = index_.find(key); it != index_.end()) {
      return it->second;
    }
    MealyMachine const& mach = mm.machine;
    std::size_t const   n    = mach.size();
    std::vector<ElementId> ids(n);
    std::vector<bool>      fresh(n, false);
    std::vector<std::uint32_t> nstates(n, 0);
    for (StateId q = 0; q < n; ++q) {
      std::string k = q == mm.root ? key : canonical_key(mach, q);
      if (auto it = index_.find(k); it != index_.end()) {
        ids[q] = it->second;
      } else {
        ids[q]     = allocate();
        fresh[q]   = true;
        std::memcpy(&nstates[q], k.data() + 4, sizeof(std::uint32_t));
        index_.emplace(std::move(k), ids[q]);
      }
    }
    for (StateId q = 0; q < n; ++q) {
      if (!fresh[q]) {
        continue;
      }
      Node& nd  = mutable_node(ids[q]);
      nd.degree = static_cast<std::uint32_t>(mach.degree());
      nd.states = nstates[q];
      nd.perm   = mach.output(q);
      nd.sections.resize(mach.degree());
      for (Letter x = 0; x < mach.degree(); ++x) {
        nd.sections[x] = ids[mach.next(q, x)];
      }
    }
    return ids[mm.root];
  }

  ElementId identity(std::size_t degree) {
    {
      std::shared_lock lock(mu_);
      if (auto it = identities_.find(degree); it != identities_.end()) {
        return it->second;
      }
    }
    MealyMachine m(degree);
    m.add_state(Perm::identity(degree), std::vector<StateId>(degree, 0));
    ElementId id = intern(m, 0);
    std::unique_lock lock(mu_);
    identities_.emplace(degree, id);
    return id;
  }

  // Memo tables for binary/unary operations keyed by operand ids.
  bool lookup_product(ElementId g, ElementId h, ElementId& out) const {
    std::shared_lock lock(mu_);
    auto it = products_.find(pair_key(g, h));
    if (it == products_.end()) {
      return false;
    }
    out = it->second;
    return true;
  }
  void remember_product(ElementId g, ElementId h, ElementId gh) {
    std::unique_lock lock(mu_);
    products_.emplace(pair_key(g, h), gh);
  }
  bool lookup_inverse(ElementId g, ElementId& out) const {
    std::shared_lock lock(mu_);
    auto it = inverses_.find(g);
    if (it == inverses_.end()) {
      return false;
    }
    out = it->second;
    return true;
  }
  void remember_inverse(ElementId g, ElementId inv) {
    std::unique_lock lock(mu_);
    inverses_.emplace(g, inv);
    inverses_.emplace(inv, g);
  }

 private:
  static constexpr unsigned    kChunkBits = 12;
  static constexpr ElementId   kChunkMask = (1U << kChunkBits) - 1;
  static constexpr std::size_t kMaxChunks = std::size_t{1} << 16;

  static std::uint64_t pair_key(ElementId g, ElementId h) {
    return (static_cast<std::uint64_t>(g) << 32) | h;
  }

  // Caller holds the unique lock.
  ElementId allocate() {
    std::size_t c = count_ >> kChunkBits;
    if (c >= kMaxChunks) {
      throw BudgetExceeded("element store is full");
    }
    if (!chunks_[c]) {
      chunks_[c] = std::make_unique<Node[]>(std::size_t{1} << kChunkBits);
    }
    return static_cast<ElementId>(count_++);
  }
  Node& mutable_node(ElementId id) {
    return chunks_[id >> kChunkBits][id & kChunkMask];
  }

  mutable std::shared_mutex mu_;
  std::array<std::unique_ptr<Node[]>, kMaxChunks> chunks_;
  std::size_t count_ = 0;
  std::unordered_map<std::string, ElementId>     index_;
  std::unordered_map<std::size_t, ElementId>     identities_;
  std::unordered_map<std::uint64_t, ElementId>   products_;
  std::unordered_map<ElementId, ElementId>       inverses_;
};

}  // namespace selfsim
