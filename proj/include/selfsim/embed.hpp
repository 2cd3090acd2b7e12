#pragma once

// Embedding a finitely generated group of bounded automatic automorphisms
// into M(X'') wr Sym(X^m), X'' = X^N.
//
// Pipeline, for generators S over X with o = 0:
//   Q  = union of the state sets of S, F its finitary part
//   m  = 1 + largest depth (finitary or bounded) over Q
//   R  = states of Q on level m
//   l  = lcm of the periods of the directed elements of Q
//   X' = X^l with o' = 0 and vs the successor cycle, delta over X'
//   for non-finitary a in R: z with a'_z = a,
//        beta = vs_z a^delta vs_{sigma(z)}^-1, so a^delta = vs_z^-1 beta vs_{sigma(z)}
//   m' = largest finitary depth among the off-spine sections of every beta and
//        among the conjugates f^delta of finitary f in R (at least 1)
//   X'' = (X')^m', where beta is a B-element and vs, f^delta are A-elements.
// A generator g = <g_u>_{u in X^m} pi maps to (pi, u -> image of g_u^delta).

#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "selfsim/classify.hpp"
#include "selfsim/mother.hpp"

namespace selfsim {

class NotBounded : public Error {
 public:
  NotBounded(std::size_t index, ActivityClass tag)
      : Error("generator " + std::to_string(index) + " is not bounded: " + tag.to_string()),
        index_(index),
        tag_(tag) {}
  std::size_t   index() const noexcept { return index_; }
  ActivityClass tag() const noexcept { return tag_; }

 private:
  std::size_t   index_;
  ActivityClass tag_;
};

// An element of M(X'') wr Sym(X^m): head permutation of X^m, one tail
// element over X'' per vertex of level m. Products are left to right.
struct WreathElement {
  Perm                 head;
  std::vector<Element> tail;

  bool operator==(WreathElement const&) const = default;
};

inline WreathElement wreath_compose(WreathElement const& g, WreathElement const& h) {
  WreathElement out{g.head.then(h.head), std::vector<Element>(g.tail.size())};
  for (std::size_t u = 0; u < g.tail.size(); ++u) {
    out.tail[u] = g.tail[u] * h.tail[g.head(static_cast<Letter>(u))];
  }
  return out;
}

inline WreathElement wreath_inverse(WreathElement const& g) {
  Perm          inv = g.head.inverse();
  WreathElement out{inv, std::vector<Element>(g.tail.size())};
  for (std::size_t u = 0; u < g.tail.size(); ++u) {
    out.tail[u] = inverse(g.tail[inv(static_cast<Letter>(u))]);
  }
  return out;
}

struct EmbeddingPlan {
  struct StateImage {
    Element alpha;        // element of R over X
    bool    finitary = false;
    Element conjugate;    // alpha^delta over X'
    // non-finitary only
    Letter  z = 0;
    Perm    sigma;        // root permutation of alpha over X'
    Element beta;         // over X'
    BDatum  datum;        // beta as an element of B over X''
    // over X''
    Element image;        // vs_z^-1 beta vs_{sigma(z)}, or a rooted permutation
  };

  std::size_t          degree = 0;
  std::vector<Element> generators;
  std::vector<Element> states;    // Q
  std::vector<Element> finitary;  // F
  std::size_t          m = 0;
  std::vector<Element> level_states;  // R
  std::size_t          ell = 1;
  std::size_t          degree1 = 0;  // |X'|
  Letter               o1      = 0;
  Perm                 cycle;
  Element              delta;
  std::size_t          m2      = 1;  // m'
  std::size_t          degree2 = 0;  // |X''|
  std::size_t          N       = 0;
  std::vector<StateImage>                 images;
  std::unordered_map<ElementId, std::size_t> image_index;
  std::vector<LevelData>                  heads;  // per generator, level m

  StateImage const& image_of(Element alpha) const {
    auto it = image_index.find(alpha.id());
    if (it == image_index.end()) {
      throw Error("embedding: element is not a level-m state");
    }
    return images[it->second];
  }

  WreathElement generator_image(std::size_t i) const {
    WreathElement w{heads.at(i).perm, {}};
    for (Element s : heads[i].states) {
      w.tail.push_back(image_of(s).image);
    }
    return w;
  }

  std::size_t directed_count() const {
    std::size_t n = 0;
    for (auto const& s : images) {
      n += s.finitary ? 0 : 1;
    }
    return n;
  }
};

namespace detail {

inline std::vector<Element> level_set(std::vector<Element> const& from, std::size_t k) {
  std::vector<Element> cur = from;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Element>          next;
    std::unordered_set<ElementId> seen;
    for (Element s : cur) {
      for (ElementId t : s.node().sections) {
        if (seen.insert(t).second) {
          next.emplace_back(t);
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

inline std::size_t finitary_depth_or_throw(Element g, char const* what) {
  auto d = is_finitary(g);
  if (!d) {
    throw VerificationFailure(std::string("embedding: ") + what + " is not finitary");
  }
  return *d;
}

}  // namespace detail

inline EmbeddingPlan embed_bounded_subgroup(std::vector<Element> const& generators) {
  if (generators.empty()) {
    throw Error("embedding: no generators");
  }
  EmbeddingPlan plan;
  plan.degree     = generators.front().degree();
  plan.generators = generators;
  std::size_t const d = plan.degree;

  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].degree() != d) {
      throw AlphabetMismatch(d, generators[i].degree());
    }
    ActivityClass c = classify(generators[i]);
    if (!c.is_bounded()) {
      throw NotBounded(i, c);
    }
  }

  std::unordered_set<ElementId> seen;
  for (Element g : generators) {
    for (Element s : states_set(g)) {
      if (seen.insert(s.id()).second) {
        plan.states.push_back(s);
      }
    }
  }
  std::size_t max_depth = 0;
  std::size_t ell       = 1;
  for (Element q : plan.states) {
    ActivityClass c = classify(q);
    max_depth       = std::max(max_depth, c.value);
    if (c.kind == ActivityClass::Kind::Finitary) {
      plan.finitary.push_back(q);
    } else if (auto dir = is_directed(q)) {
      ell = std::lcm(ell, dir->period);
    }
  }
  plan.m            = max_depth + 1;
  plan.ell          = ell;
  plan.level_states = detail::level_set(plan.states, plan.m);

  plan.degree1 = power_degree(d, ell);
  plan.o1      = 0;
  plan.cycle   = Perm::successor_cycle(plan.degree1);
  plan.delta   = build_delta(plan.degree1, plan.o1, plan.cycle);
  // With o' = 0 and the successor cycle, vs_x = vs^x.
  auto vs = [&](long e) { return rooted(plan.cycle.pow(e)); };

  std::size_t m2 = 1;
  for (Element alpha : plan.level_states) {
    EmbeddingPlan::StateImage si;
    si.alpha     = alpha;
    Element a1   = alphabet_power(alpha, ell);
    si.conjugate = conjugate(a1, plan.delta);
    si.finitary  = is_finitary(alpha).has_value();
    if (si.finitary) {
      m2 = std::max(m2, detail::finitary_depth_or_throw(si.conjugate, "finitary conjugate"));
    } else {
      std::size_t hits = 0;
      for (Letter x = 0; x < plan.degree1; ++x) {
        Element s = a1.section(x);
        if (s == a1) {
          si.z = x;
          ++hits;
        } else {
          detail::finitary_depth_or_throw(s, "off-spine section");
        }
      }
      if (hits != 1) {
        throw VerificationFailure("embedding: level-m state does not reproduce itself "
                                  "at exactly one letter of X'");
      }
      si.sigma = a1.root_perm();
      si.beta  = vs(si.z) * si.conjugate * vs(-static_cast<long>(si.sigma(si.z)));
      if (si.beta.root_perm()(plan.o1) != plan.o1 || si.beta.section(plan.o1) != si.beta) {
        throw VerificationFailure("embedding: beta does not fix o' with section beta");
      }
      for (Letter x = 0; x < plan.degree1; ++x) {
        if (x != plan.o1) {
          m2 = std::max(m2, detail::finitary_depth_or_throw(si.beta.section(x),
                                                            "section of beta"));
        }
      }
    }
    plan.image_index.emplace(alpha.id(), plan.images.size());
    plan.images.push_back(std::move(si));
  }
  plan.m2      = m2;
  plan.degree2 = power_degree(plan.degree1, m2);
  plan.N       = ell * m2;
  Letter const o2 = 0;

  for (auto& si : plan.images) {
    Element target = alphabet_power(si.conjugate, m2);
    if (si.finitary) {
      if (detail::finitary_depth_or_throw(target, "finitary image") > 1) {
        throw VerificationFailure("embedding: finitary conjugate is not rooted over X''");
      }
      si.image = mother_a(target.root_perm());
    } else {
      Element b2 = alphabet_power(si.beta, m2);
      if (b2.root_perm()(o2) != o2 || b2.section(o2) != b2) {
        throw VerificationFailure("embedding: beta over X'' does not fix o''");
      }
      si.datum = BDatum{b2.root_perm(), std::vector<Perm>(plan.degree2,
                                                          Perm::identity(plan.degree2))};
      for (Letter x = 0; x < plan.degree2; ++x) {
        if (x == o2) {
          continue;
        }
        Element s = b2.section(x);
        if (detail::finitary_depth_or_throw(s, "section of beta over X''") > 1) {
          throw VerificationFailure("embedding: section of beta over X'' is not rooted");
        }
        si.datum.sections[x] = s.root_perm();
      }
      Element b = mother_b(si.datum, o2);
      if (b != b2) {
        throw VerificationFailure("embedding: beta is not the B-element of its datum");
      }
      Element left  = alphabet_power(vs(-static_cast<long>(si.z)), m2);
      Element right = alphabet_power(vs(static_cast<long>(si.sigma(si.z))), m2);
      si.image      = left * b * right;
    }
    if (si.image != target) {
      throw VerificationFailure("embedding: image differs from the delta-conjugate");
    }
  }

  for (Element g : generators) {
    plan.heads.push_back(level_data(g, plan.m));
  }
  return plan;
}

// The delta-conjugate of g (an element over X), applied to a word over X''
// directly from the rewriting rule for delta: delta^-1 takes prefix sums of
// the vs-exponents, delta takes differences.
inline Word conjugate_action(EmbeddingPlan const& plan, Element g, Word const& w2) {
  std::size_t const n1 = plan.degree1;
  Word v = flatten_blocks(w2, n1, plan.m2);
  std::size_t acc = 0;
  for (Letter& x : v) {
    acc = (acc + x) % n1;
    x   = static_cast<Letter>(acc);
  }
  Word over_x = flatten_blocks(v, plan.degree, plan.ell);
  Word moved  = act_word(g, over_x);
  Word back   = group_blocks(moved, plan.degree, plan.ell);
  std::size_t prev = 0;
  for (Letter& x : back) {
    std::size_t cur = x;
    x               = static_cast<Letter>((cur + n1 - prev) % n1);
    prev            = cur;
  }
  return group_blocks(back, n1, plan.m2);
}

struct EmbeddingReport {
  bool                     passed = true;
  std::size_t              words_checked     = 0;
  std::size_t              distinct_elements = 0;
  std::size_t              action_checks     = 0;
  std::vector<std::string> failures;
  std::string              witness;  // generator word of the first failure
};

// Runs over all freely reduced words in the generators and their inverses up
// to word_length and checks, for each:
//   * the head equals the level-m permutation of the original product;
//   * each tail element acts on (X'')^depth as the delta-conjugate of the
//     corresponding level-m state, and equals it exactly;
//   * distinct products have distinct images and equal products equal images.
inline EmbeddingReport verify_embedding(EmbeddingPlan const& plan, std::size_t word_length,
                                        std::size_t depth) {
  EmbeddingReport rep;
  std::size_t const ng = plan.generators.size();
  std::vector<Element>       gens;
  std::vector<WreathElement> images;
  for (std::size_t i = 0; i < ng; ++i) {
    WreathElement w = plan.generator_image(i);
    gens.push_back(plan.generators[i]);
    images.push_back(w);
    gens.push_back(inverse(plan.generators[i]));
    images.push_back(wreath_inverse(w));
  }
  std::size_t const dm = power_degree(plan.degree, plan.m);

  std::size_t np = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    np *= plan.degree2;
    if (np > (std::size_t{1} << 24)) {
      throw BudgetExceeded("verify_embedding: (X'')^depth has more than 2^24 words");
    }
  }
  std::vector<Word>  probes;
  for (std::size_t i = 0; i < np; ++i) {
    probes.push_back(block_word(i, plan.degree2, depth));
  }

  // Cache of already verified (state, tail image) pairs.
  std::unordered_set<std::uint64_t>                 checked;
  std::unordered_map<ElementId, std::string>        signature_of;
  std::unordered_map<std::string, ElementId>        owner;
  auto fail = [&](std::vector<std::size_t> const& word, std::string msg) {
    if (rep.passed) {
      std::ostringstream os;
      for (std::size_t i = 0; i < word.size(); ++i) {
        os << (i ? " " : "") << (word[i] % 2 ? "g" + std::to_string(word[i] / 2) + "^-1"
                                             : "g" + std::to_string(word[i] / 2));
      }
      rep.witness = word.empty() ? "(empty word)" : os.str();
    }
    rep.passed = false;
    rep.failures.push_back(std::move(msg));
  };

  struct Item {
    std::vector<std::size_t> word;
    Element                  orig;
    WreathElement            img;
  };
  WreathElement one_img{Perm::identity(dm), std::vector<Element>(dm, identity(plan.degree2))};
  std::vector<Item> frontier{{{}, identity(plan.degree), one_img}};
  for (std::size_t len = 0; len <= word_length; ++len) {
    std::vector<Item> next;
    for (Item const& it : frontier) {
      ++rep.words_checked;
      LevelData lv = level_data(it.orig, plan.m);
      if (lv.perm != it.img.head) {
        fail(it.word, "head permutation differs from the level-m action");
      }
      for (std::size_t u = 0; u < dm; ++u) {
        Element s   = lv.states[u];
        Element img = it.img.tail[u];
        std::uint64_t key = (static_cast<std::uint64_t>(s.id()) << 32) | img.id();
        if (!checked.insert(key).second) {
          continue;
        }
        Element target =
            alphabet_power(conjugate(alphabet_power(s, plan.ell), plan.delta), plan.m2);
        if (target != img) {
          fail(it.word, "tail image differs from the delta-conjugate at vertex "
                            + std::to_string(u));
        }
        for (Word const& w : probes) {
          ++rep.action_checks;
          if (act_word(img, w) != conjugate_action(plan, s, w)) {
            fail(it.word, "tail image acts differently from the delta-conjugate at vertex "
                              + std::to_string(u));
            break;
          }
        }
      }
      std::string sig;
      for (Letter y : it.img.head.images()) {
        sig.append(reinterpret_cast<char const*>(&y), sizeof y);
      }
      for (Element e : it.img.tail) {
        ElementId id = e.id();
        sig.append(reinterpret_cast<char const*>(&id), sizeof id);
      }
      if (auto f = signature_of.find(it.orig.id()); f != signature_of.end()) {
        if (f->second != sig) {
          fail(it.word, "equal products have different images");
        }
      } else {
        signature_of.emplace(it.orig.id(), sig);
        auto [o, fresh] = owner.emplace(sig, it.orig.id());
        if (!fresh && o->second != it.orig.id()) {
          fail(it.word, "distinct products have the same image");
        }
      }
      if (len == word_length) {
        continue;
      }
      for (std::size_t g = 0; g < gens.size(); ++g) {
        if (!it.word.empty() && (it.word.back() ^ 1U) == g) {
          continue;
        }
        Item child{it.word, it.orig * gens[g], wreath_compose(it.img, images[g])};
        child.word.push_back(g);
        next.push_back(std::move(child));
      }
    }
    frontier.swap(next);
  }
  rep.distinct_elements = signature_of.size();
  return rep;
}

}  // namespace selfsim
