#pragma once

// The Mother group M(X) = <A, B> over X = {0..d-1} with distinguished letter
// o = 0, generalized permutation matrices, alphabet powers and the
// delta-conjugation used to embed bounded-automata groups into M(X^N).
//
//   A = Sym(X),                 a -> <1, ..., 1>a
//   B = Sym(X \ o; A),          b = (b_x)_{x != o} rho -> <b, b_1, ..., b_{d-1}>rho

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/classify.hpp"

namespace selfsim {

// An element (b_x)_{x != o} rho of the finite group B = Sym(X \ o; A).
struct BDatum {
  Perm              rho;       // fixes o
  std::vector<Perm> sections;  // indexed by letter; sections[o] is ignored
};

inline Element mother_a(Perm const& a) { return rooted(a); }

// <b, b_1, ..., b_{d-1}>rho as a machine with states {b} u A u {1}.
inline Element mother_b(BDatum const& datum, Letter o = 0) {
  std::size_t const d = datum.rho.degree();
  if (datum.sections.size() != d) {
    throw Error("mother_b: need one section per letter");
  }
  if (datum.rho(o) != o) {
    throw Error("mother_b: rho must fix the distinguished letter");
  }
  // 0: identity, 1..d-1: the rooted sections in letter order, d: b itself.
  MealyMachine m(d);
  m.add_state(Perm::identity(d), std::vector<StateId>(d, 0));
  StateId const        b = static_cast<StateId>(d);
  std::vector<StateId> next(d, b);
  for (Letter x = 0; x < d; ++x) {
    if (x == o) {
      continue;
    }
    if (datum.sections[x].degree() != d) {
      throw AlphabetMismatch(d, datum.sections[x].degree());
    }
    next[x] = static_cast<StateId>(m.size());
    m.add_state(datum.sections[x], std::vector<StateId>(d, 0));
  }
  m.add_state(datum.rho, next);
  return canonicalize(m, b);
}

struct MotherGenerators {
  std::size_t          degree = 0;
  Letter               o      = 0;
  bool                 full   = true;  // false when only generating subsets are listed
  std::vector<Perm>    a_data;
  std::vector<BDatum>  b_data;
  std::vector<Element> a_elements;
  std::vector<Element> b_elements;
};

namespace detail {

inline std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
  }
  return f;
}

// Permutations of {0..d-1} fixing o, lexicographic.
inline std::vector<Perm> perms_fixing(std::size_t d, Letter o) {
  std::vector<Perm> out;
  for (Perm const& p : all_perms(d)) {
    if (p(o) == o) {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace detail

// |B| = d!^(d-1) (d-1)!
inline std::uint64_t mother_b_order(std::size_t d) {
  std::uint64_t r = detail::factorial(d - 1);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    r *= detail::factorial(d);
  }
  return r;
}

// Enumerates A and B in full for d <= max_full_degree; above that, lists a
// generating set of each: a transposition and a d-cycle for A, and for B the
// elements with one nontrivial section at the first letter after o together
// with generators of Sym(X \ o).
inline MotherGenerators mother_generators(std::size_t d, std::size_t max_full_degree = 4) {
  if (d < 2) {
    throw Error("mother group needs an alphabet of at least two letters");
  }
  if (d > 255) {
    throw Error("mother group degree too large");
  }
  MotherGenerators mg;
  mg.degree = d;
  mg.o      = 0;
  mg.full   = d <= 2 || d <= max_full_degree;
  Letter const o = 0;
  if (mg.full) {
    mg.a_data = all_perms(d);
    std::vector<Perm> const sa   = all_perms(d);
    std::vector<Perm> const rhos = detail::perms_fixing(d, o);
    // Odometer over the (d-1) section slots, last slot fastest.
    for (Perm const& rho : rhos) {
      std::vector<std::size_t> idx(d - 1, 0);
      while (true) {
        BDatum b{rho, std::vector<Perm>(d, Perm::identity(d))};
        for (std::size_t i = 0; i + 1 < d; ++i) {
          b.sections[i + 1] = sa[idx[i]];
        }
        mg.b_data.push_back(std::move(b));
        std::size_t k = d - 1;
        while (k > 0 && ++idx[k - 1] == sa.size()) {
          idx[k - 1] = 0;
          --k;
        }
        if (k == 0) {
          break;
        }
      }
    }
  } else {
    mg.a_data = {Perm::transposition(d, 0, 1), Perm::successor_cycle(d)};
    for (Perm const& a : mg.a_data) {
      BDatum b{Perm::identity(d), std::vector<Perm>(d, Perm::identity(d))};
      b.sections[1] = a;
      mg.b_data.push_back(std::move(b));
    }
    // Sym({1..d-1}): transposition (1 2) and the cycle 1 -> 2 -> ... -> d-1 -> 1.
    std::vector<Letter> t(d), c(d);
    for (Letter x = 0; x < d; ++x) {
      t[x] = c[x] = x;
    }
    std::swap(t[1], t[2]);
    for (Letter x = 1; x < d; ++x) {
      c[x] = static_cast<Letter>(x + 1U < d ? x + 1U : 1U);
    }
    for (Perm const& rho : {Perm(t), Perm(c)}) {
      mg.b_data.push_back({rho, std::vector<Perm>(d, Perm::identity(d))});
    }
  }
  for (Perm const& a : mg.a_data) {
    mg.a_elements.push_back(mother_a(a));
  }
  for (BDatum const& b : mg.b_data) {
    mg.b_elements.push_back(mother_b(b, o));
  }
  return mg;
}

// Generalized permutation matrix: row x holds the single entry g_x in column
// sigma_g(x).
struct GenPermMatrix {
  struct Entry {
    Element value;
    Letter  column = 0;
    bool    operator==(Entry const&) const = default;
  };
  std::vector<Entry> rows;

  std::size_t order() const noexcept { return rows.size(); }

  // Entry (x, y), or nullopt for a zero entry.
  std::optional<Element> at(Letter x, Letter y) const {
    if (rows.at(x).column == y) {
      return rows[x].value;
    }
    return std::nullopt;
  }

  // Replace every nonzero entry by 1.
  Perm augmentation() const {
    std::vector<Letter> img;
    for (auto const& e : rows) {
      img.push_back(e.column);
    }
    return Perm(std::move(img));
  }

  bool operator==(GenPermMatrix const&) const = default;
};

inline GenPermMatrix gen_perm_matrix(Element g) {
  GenPermMatrix M;
  Node const&   n = g.node();
  for (Letter x = 0; x < n.degree; ++x) {
    M.rows.push_back({Element(n.sections[x]), n.perm(x)});
  }
  return M;
}

inline GenPermMatrix matrix_product(GenPermMatrix const& M1, GenPermMatrix const& M2) {
  if (M1.order() != M2.order()) {
    throw AlphabetMismatch(M1.order(), M2.order());
  }
  GenPermMatrix P;
  for (auto const& e : M1.rows) {
    auto const& f = M2.rows[e.column];
    P.rows.push_back({e.value * f.value, f.column});
  }
  return P;
}

// Index of a block word over X^k, most significant letter first.
inline std::size_t block_index(Word const& w, std::size_t d) {
  std::size_t i = 0;
  for (Letter x : w) {
    i = i * d + x;
  }
  return i;
}

inline Word block_word(std::size_t index, std::size_t d, std::size_t k) {
  Word w(k);
  for (std::size_t i = k; i > 0; --i) {
    w[i - 1] = static_cast<Letter>(index % d);
    index /= d;
  }
  return w;
}

// Splits each letter of X^k into its k letters over X.
inline Word flatten_blocks(Word const& w, std::size_t d, std::size_t k) {
  Word out;
  out.reserve(w.size() * k);
  for (Letter b : w) {
    Word part = block_word(b, d, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Groups a word over X (length divisible by k) into letters of X^k.
inline Word group_blocks(Word const& w, std::size_t d, std::size_t k) {
  if (w.size() % k != 0) {
    throw Error("group_blocks: length not divisible by block size");
  }
  Word out;
  for (std::size_t i = 0; i < w.size(); i += k) {
    out.push_back(static_cast<Letter>(
        block_index(Word(w.begin() + static_cast<std::ptrdiff_t>(i),
                         w.begin() + static_cast<std::ptrdiff_t>(i + k)),
                    d)));
  }
  return out;
}

inline std::size_t power_degree(std::size_t d, std::size_t k) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) {
    n *= d;
    if (n > 65535) {
      throw Error("alphabet power too large (more than 65535 letters)");
    }
  }
  return n;
}

// The same automorphism read over the alphabet X^k.
inline Element alphabet_power(Element g, std::size_t k) {
  if (k == 0) {
    throw Error("alphabet_power: k must be at least 1");
  }
  if (k == 1) {
    return g;
  }
  std::size_t const d  = g.degree();
  std::size_t const dk = power_degree(d, k);
  std::vector<Element> states;
  MealyMachine base = machine_of({g}, nullptr, &states);
  MealyMachine m(dk);
  std::vector<Word> blocks;
  blocks.reserve(dk);
  for (std::size_t u = 0; u < dk; ++u) {
    blocks.push_back(block_word(u, d, k));
  }
  for (StateId q = 0; q < base.size(); ++q) {
    std::vector<Letter>  img(dk);
    std::vector<StateId> next(dk);
    for (std::size_t u = 0; u < dk; ++u) {
      img[u]  = static_cast<Letter>(block_index(base.act(q, blocks[u]), d));
      next[u] = base.follow(q, blocks[u]);
    }
    m.add_state(Perm(std::move(img)), std::move(next));
  }
  return canonicalize(m, 0);
}

// Root permutation and states of g on level k, indexed by block_index.
struct LevelData {
  Perm                 perm;
  std::vector<Element> states;
};

inline LevelData level_data(Element g, std::size_t k) {
  std::size_t const d  = g.degree();
  std::size_t const dk = power_degree(d, k);
  std::vector<Letter> img(dk);
  LevelData out{Perm::identity(1), std::vector<Element>(dk)};
  for (std::size_t u = 0; u < dk; ++u) {
    Word w     = block_word(u, d, k);
    img[u]     = static_cast<Letter>(block_index(act_word(g, w), d));
    out.states[u] = state_at(g, w);
  }
  out.perm = Perm(std::move(img));
  return out;
}

// delta = <delta vs_x^-1>_x over an alphabet of size n, where vs is a
// transitive cycle and vs_x = vs^i for x = vs^i(o). The machine has the n
// states delta vs^-i; state i outputs vs^-i and moves to state j on the
// letter vs^j(o).
inline Element build_delta(std::size_t n, Letter o, Perm const& cycle) {
  if (cycle.degree() != n || o >= n) {
    throw Error("build_delta: cycle or base letter does not match the alphabet");
  }
  std::vector<std::size_t> exponent(n, n);
  Letter x = o;
  for (std::size_t i = 0; i < n; ++i) {
    if (exponent[x] != n) {
      break;
    }
    exponent[x] = i;
    x           = cycle(x);
  }
  for (std::size_t e : exponent) {
    if (e == n) {
      throw Error("build_delta: cycle is not transitive");
    }
  }
  MealyMachine m(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<StateId> next(n);
    for (Letter y = 0; y < n; ++y) {
      next[y] = static_cast<StateId>(exponent[y]);
    }
    m.add_state(cycle.pow(-static_cast<long>(i)), std::move(next));
  }
  return canonicalize(m, 0);
}

// c^-1 g c.
inline Element conjugate(Element g, Element c) {
  return inverse(c) * g * c;
}

}  // namespace selfsim
