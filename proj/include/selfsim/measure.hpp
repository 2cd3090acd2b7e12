#pragma once

// Finitely supported measures on automorphism groups with exact rational
// weights. Entropy is the only quantity computed in floating point.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfsim/element.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

using Rational = mpq_class;

// a/b in lowest terms; mpq_class(a, b) alone does not reduce.
inline Rational ratio(unsigned long a, unsigned long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

class Measure {
 public:
  using Atom = std::pair<Element, Rational>;

  Measure() = default;

  // Zero weights are dropped; equal elements are merged.
  Measure(std::size_t degree, std::vector<Atom> atoms) : degree_(degree) {
    std::sort(atoms.begin(), atoms.end(),
              [](Atom const& a, Atom const& b) { return a.first.id() < b.first.id(); });
    for (auto& [g, w] : atoms) {
      w.canonicalize();
      if (g.degree() != degree) {
        throw AlphabetMismatch(degree, g.degree());
      }
      if (w < 0) {
        throw Error("measure: negative weight");
      }
      if (!atoms_.empty() && atoms_.back().first == g) {
        atoms_.back().second += w;
      } else {
        atoms_.emplace_back(g, std::move(w));
      }
    }
    std::erase_if(atoms_, [](Atom const& a) { return a.second == 0; });
    for (auto const& a : atoms_) {
      mass_ += a.second;
    }
  }

  std::size_t              degree() const noexcept { return degree_; }
  std::vector<Atom> const& atoms() const noexcept { return atoms_; }
  std::size_t              support_size() const noexcept { return atoms_.size(); }
  Rational const&          mass() const noexcept { return mass_; }
  bool                     is_probability() const { return mass_ == 1; }
  bool                     empty() const noexcept { return atoms_.empty(); }

  Rational weight(Element g) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), g.id(),
                               [](Atom const& a, ElementId id) { return a.first.id() < id; });
    if (it != atoms_.end() && it->first == g) {
      return it->second;
    }
    return 0;
  }

  bool operator==(Measure const& o) const {
    return degree_ == o.degree_ && atoms_ == o.atoms_;
  }

 private:
  std::size_t       degree_ = 0;
  std::vector<Atom> atoms_;  // sorted by element id
  Rational          mass_   = 0;
};

inline Measure dirac(Element g) { return Measure(g.degree(), {{g, Rational(1)}}); }

inline Measure uniform_on(std::vector<Element> const& elements) {
  if (elements.empty()) {
    throw Error("uniform_on: empty set");
  }
  std::vector<Element> uniq = elements;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  Rational          w(1, uniq.size());
  std::vector<Measure::Atom> atoms;
  for (Element g : uniq) {
    atoms.emplace_back(g, w);
  }
  return Measure(elements.front().degree(), std::move(atoms));
}

inline Measure scale(Measure const& m, Rational const& c) {
  std::vector<Measure::Atom> atoms;
  for (auto const& [g, w] : m.atoms()) {
    atoms.emplace_back(g, w * c);
  }
  return Measure(m.degree(), std::move(atoms));
}

inline Measure add(Measure const& a, Measure const& b) {
  if (a.empty()) {
    return b;
  }
  if (b.empty()) {
    return a;
  }
  if (a.degree() != b.degree()) {
    throw AlphabetMismatch(a.degree(), b.degree());
  }
  std::vector<Measure::Atom> atoms(a.atoms());
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return Measure(a.degree(), std::move(atoms));
}

// (m1 m2)(g) = sum_h m1(h) m2(h^-1 g): the law of x1 * x2 for independent
// x1 ~ m1, x2 ~ m2. Throws BudgetExceeded if more than max_atoms products
// would be formed.
inline Measure convolve(Measure const& m1, Measure const& m2,
                        std::size_t max_atoms = static_cast<std::size_t>(-1)) {
  if (m1.empty() || m2.empty()) {
    return Measure(std::max(m1.degree(), m2.degree()), {});
  }
  if (m1.degree() != m2.degree()) {
    throw AlphabetMismatch(m1.degree(), m2.degree());
  }
  if (m1.support_size() > 0 && m2.support_size() > max_atoms / m1.support_size()) {
    throw BudgetExceeded("convolution exceeds the atom budget");
  }
  std::unordered_map<ElementId, Rational> acc;
  acc.reserve(m1.support_size() * m2.support_size());
  for (auto const& [g, wg] : m1.atoms()) {
    for (auto const& [h, wh] : m2.atoms()) {
      acc[(g * h).id()] += wg * wh;
    }
  }
  std::vector<Measure::Atom> atoms;
  atoms.reserve(acc.size());
  for (auto& [id, w] : acc) {
    atoms.emplace_back(Element(id), std::move(w));
  }
  return Measure(m1.degree(), std::move(atoms));
}

inline Measure convolution_power(Measure const& m, std::size_t n) {
  if (m.empty()) {
    throw Error("convolution_power: empty measure");
  }
  Measure r = dirac(identity(m.degree()));
  for (std::size_t i = 0; i < n; ++i) {
    r = convolve(r, m);
  }
  return r;
}

// mu-check(g) = mu(g^-1)
inline Measure reflect(Measure const& m) {
  std::vector<Measure::Atom> atoms;
  for (auto const& [g, w] : m.atoms()) {
    atoms.emplace_back(inverse(g), w);
  }
  return Measure(m.degree(), std::move(atoms));
}

// Shannon entropy in nats of a list of probabilities. Terms are summed in
// sorted order so the result does not depend on the order of the input.
inline double entropy_of(std::vector<double> probs) {
  std::vector<double> terms;
  terms.reserve(probs.size());
  for (double p : probs) {
    if (p > 0) {
      terms.push_back(-p * std::log(p));
    }
  }
  std::sort(terms.begin(), terms.end());
  double h = 0;
  for (double t : terms) {
    h += t;
  }
  return h;
}

inline double entropy(Measure const& m) {
  std::vector<double> probs;
  probs.reserve(m.support_size());
  for (auto const& [g, w] : m.atoms()) {
    probs.push_back(w.get_d());
  }
  return entropy_of(std::move(probs));
}

// Total variation distance sup_A |a(A) - b(A)| = (1/2) sum |a - b|.
inline Rational total_variation(Measure const& a, Measure const& b) {
  std::unordered_map<ElementId, Rational> diff;
  for (auto const& [g, w] : a.atoms()) {
    diff[g.id()] += w;
  }
  for (auto const& [g, w] : b.atoms()) {
    diff[g.id()] -= w;
  }
  Rational s = 0;
  for (auto const& [id, w] : diff) {
    s += abs(w);
  }
  return s / 2;
}

// Byte encoding of an element that does not depend on store ids.
inline std::string element_key(Element g) { return canonical_key(machine_of({g}), 0); }

// Draws from a finite list of weighted outcomes. Outcomes are ordered by a
// caller-supplied key that is independent of store ids, so draws are
// reproducible across processes and thread schedules.
template <class T>
class Categorical {
 public:
  Categorical() = default;

  // items: (key, weight, value). Weights need not be normalized.
  explicit Categorical(std::vector<std::tuple<std::string, Rational, T>> items) {
    std::sort(items.begin(), items.end(),
              [](auto const& a, auto const& b) { return std::get<0>(a) < std::get<0>(b); });
    Rational total = 0;
    for (auto const& it : items) {
      total += std::get<1>(it);
    }
    if (total <= 0) {
      throw Error("categorical: no mass");
    }
    Rational run = 0;
    for (auto& it : items) {
      run += std::get<1>(it);
      cumulative_.push_back(Rational(run / total).get_d());
      values_.push_back(std::move(std::get<2>(it)));
    }
    cumulative_.back() = 1.0;
  }

  T const& draw(RandomStream& rng) const {
    double u  = rng.uniform();
    auto   it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return values_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> cumulative_;
  std::vector<T>      values_;
};

inline Categorical<Element> sampler(Measure const& m) {
  std::vector<std::tuple<std::string, Rational, Element>> items;
  for (auto const& [g, w] : m.atoms()) {
    items.emplace_back(element_key(g), w, g);
  }
  return Categorical<Element>(std::move(items));
}

}  // namespace selfsim
