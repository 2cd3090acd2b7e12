#include <catch_amalgamated.hpp>

#include <set>
#include <thread>

#include "selfsim/format.hpp"
#include "support.hpp"

using namespace selfsim;
using selfsim::test::all_words;
using selfsim::test::load_group;

namespace {

Word W(std::initializer_list<int> xs) {
  Word w;
  for (int x : xs) {
    w.push_back(static_cast<Letter>(x));
  }
  return w;
}

struct Basilica {
  Automaton a = load_group("basilica");
  Element   ea = a.element("a");
  Element   eb = a.element("b");
  Element   one = identity(2);
};

}  // namespace

TEST_CASE("perm: product order and inverse", "[core][perm]") {
  Perm s({1, 2, 0});
  Perm t({1, 0, 2});
  // perm_product(s, t)(x) = t(s(x))
  Perm st = perm_product(s, t);
  for (Letter x = 0; x < 3; ++x) {
    REQUIRE(st(x) == t(s(x)));
  }
  REQUIRE(s.then(s.inverse()).is_identity());
  REQUIRE(s.pow(3).is_identity());
  REQUIRE(s.pow(-1) == s.inverse());
  REQUIRE(s.is_single_cycle());
  REQUIRE_FALSE(t.is_single_cycle());
  REQUIRE_THROWS_AS(Perm({0, 0}), Error);
  REQUIRE(all_perms(3).size() == 6);
}

TEST_CASE("parse_machine: Basilica", "[core][parse]") {
  Automaton a = load_group("basilica");
  REQUIRE(a.degree() == 2);
  REQUIRE(a.declared() == std::vector<std::string>{"a", "b"});
  REQUIRE(a.has("1"));
  auto const& m = a.machine;
  REQUIRE(m.output(a.state("a")).is_identity());
  REQUIRE(m.output(a.state("b")) == Perm({1, 0}));
  REQUIRE(m.next(a.state("a"), 0) == a.state("b"));
  REQUIRE(m.next(a.state("a"), 1) == a.state("1"));
  REQUIRE(m.next(a.state("b"), 0) == a.state("a"));
}

TEST_CASE("parse_machine: identity-only file", "[core][parse]") {
  Automaton a = parse_machine("alphabet: 0 1\nstate 1 [1 1] perm 0 1\n");
  REQUIRE(a.machine.size() == 1);
  REQUIRE(a.machine.output(0).is_identity());
  REQUIRE(a.machine.next(0, 0) == 0);
  REQUIRE(a.machine.next(0, 1) == 0);
  REQUIRE(a.element("1") == identity(2));
}

TEST_CASE("parse_machine: errors", "[core][parse]") {
  SECTION("non-bijective output row") {
    try {
      parse_machine("alphabet: 0 1\nstate a [1 1] perm 0 0\n");
      FAIL("expected a parse error");
    } catch (ParseError const& e) {
      REQUIRE(e.line() == 2);
      REQUIRE(std::string(e.what()).find("not a permutation") != std::string::npos);
    }
  }
  SECTION("unknown letter") {
    REQUIRE_THROWS_AS(parse_machine("alphabet: 0 1\nstate a [1 1] perm 0 2\n"), ParseError);
  }
  SECTION("undeclared state") {
    try {
      parse_machine("alphabet: 0 1\n# c\nstate a [z 1] perm 1 0\n");
      FAIL("expected a parse error");
    } catch (ParseError const& e) {
      REQUIRE(e.line() == 3);
    }
  }
  SECTION("syntax") {
    REQUIRE_THROWS_AS(parse_machine("alphabet: 0 1\nstat a [1 1] perm 0 1\n"), ParseError);
    REQUIRE_THROWS_AS(parse_machine("state a [1 1] perm 0 1\n"), ParseError);
    REQUIRE_THROWS_AS(parse_machine("alphabet: 0 1\nstate a [1] perm 0 1\n"), ParseError);
    REQUIRE_THROWS_AS(parse_machine("alphabet: 0\n"), ParseError);
    REQUIRE_THROWS_AS(parse_machine("alphabet: 0 1\nstate 1 [1 1] perm 1 0\n"), ParseError);
    REQUIRE_THROWS_AS(
        parse_machine("alphabet: 0 1\nstate a [1 1] perm 0 1\nstate a [1 1] perm 0 1\n"),
        ParseError);
  }
}

TEST_CASE("write_machine round-trips through parse_machine", "[core][parse]") {
  Basilica B;
  Element ab = B.ea * B.eb;
  std::string text =
      write_machine(B.a.symbols, {{"a", B.ea}, {"b", B.eb}, {"ab", ab}, {"one", B.one}});
  Automaton back = parse_machine(text);
  REQUIRE(back.element("a") == B.ea);
  REQUIRE(back.element("b") == B.eb);
  REQUIRE(back.element("ab") == ab);
  REQUIRE(back.element("one") == B.one);
}

TEST_CASE("canonicalize", "[core]") {
  Basilica B;
  // a, b, 1 are pairwise distinct: their actions on X^3 differ.
  auto table = [&](StateId q) {
    std::vector<Word> out;
    for (auto const& w : all_words(2, 3)) {
      out.push_back(B.a.machine.act(q, w));
    }
    return out;
  };
  std::set<std::vector<Word>> tables{table(B.a.state("a")), table(B.a.state("b")),
                                     table(B.a.state("1"))};
  REQUIRE(tables.size() == 3);
  REQUIRE(B.ea.state_count() == 3);

  SECTION("duplicated identity states collapse") {
    MealyMachine m(2);
    m.add_state(Perm::identity(2), {1, 0});
    m.add_state(Perm::identity(2), {0, 1});
    Element e = canonicalize(m, 0);
    REQUIRE(e == identity(2));
    REQUIRE(e.state_count() == 1);
  }
  SECTION("redundant copy of <e,e>s") {
    MealyMachine m(2);
    m.add_state(Perm({1, 0}), {0, 1});
    m.add_state(Perm({1, 0}), {1, 0});
    Element e = canonicalize(m, 0);
    REQUIRE(e.state_count() == 1);
    REQUIRE(canonicalize(m, 1) == e);
  }
  SECTION("idempotent and independent of the behavioural representative") {
    for (Element g : {B.ea, B.eb, B.ea * B.eb, inverse(B.eb) * B.ea}) {
      std::vector<StateId> idx;
      MealyMachine m = machine_of({g}, &idx);
      REQUIRE(canonicalize(m, idx[0]) == g);
      REQUIRE(canonicalize(machine_of({canonicalize(m, idx[0])}), 0) == g);
    }
  }
}

TEST_CASE("identity", "[core]") {
  Basilica B;
  for (auto const& w : all_words(2, 5)) {
    REQUIRE(act_word(B.one, w) == w);
  }
  REQUIRE(decompose(B.one).root_perm.is_identity());
  REQUIRE(decompose(B.one).sections == std::vector<Element>{B.one, B.one});
  REQUIRE(B.one * B.eb == B.eb);
  REQUIRE(B.eb * B.one == B.eb);
}

TEST_CASE("decompose and recompose", "[core]") {
  Basilica B;
  auto da = decompose(B.ea);
  REQUIRE(da.root_perm.is_identity());
  REQUIRE(da.sections == std::vector<Element>{B.eb, B.one});
  auto db = decompose(B.eb);
  REQUIRE(db.root_perm == Perm({1, 0}));
  REQUIRE(db.sections == std::vector<Element>{B.ea, B.one});

  for (Element g : {B.ea, B.eb, B.ea * B.eb}) {
    REQUIRE(recompose(decompose(g)) == g);
  }
  REQUIRE(recompose({Perm::identity(2), {B.one, B.one}}) == B.one);
  Element swap = recompose({Perm({1, 0}), {B.one, B.one}});
  REQUIRE(act_word(swap, W({0, 0, 1})) == W({1, 0, 1}));
  REQUIRE(swap == rooted(Perm({1, 0})));
  REQUIRE_THROWS_AS(recompose({Perm::identity(3), {B.one, B.one, B.one}}), AlphabetMismatch);
}

TEST_CASE("compose follows the wreath formula", "[core]") {
  Basilica B;
  Element ab  = B.ea * B.eb;
  auto    dec = decompose(ab);
  REQUIRE(dec.root_perm == Perm({1, 0}));
  REQUIRE(dec.sections == std::vector<Element>{B.eb * B.ea, B.one});
  // Confirm against the raw product machine on X^4.
  auto raw = test::raw_compose(test::raw_from(B.a, "a"), test::raw_from(B.a, "b"));
  for (auto const& w : all_words(2, 4)) {
    REQUIRE(act_word(ab, w) == raw.act(w));
  }
  REQUIRE(B.eb * inverse(B.eb) == B.one);
  REQUIRE_THROWS_AS(B.ea * identity(3), AlphabetMismatch);
}

TEST_CASE("inverse", "[core]") {
  Basilica B;
  REQUIRE(inverse(B.one) == B.one);
  REQUIRE(inverse(inverse(B.eb)) == B.eb);
  Element binv = inverse(B.eb);
  for (auto const& w : all_words(2, 6)) {
    REQUIRE(act_word(binv, act_word(B.eb, w)) == w);
  }
  REQUIRE(power(B.eb, -3) == inverse(power(B.eb, 3)));
}

TEST_CASE("act_word", "[core]") {
  Basilica B;
  REQUIRE(act_word(B.eb, W({0, 0})) == W({1, 0}));
  REQUIRE(act_word(B.ea, W({1, 0})) == W({1, 0}));
  REQUIRE(act_word(B.ea, Word{}).empty());
  REQUIRE_THROWS_AS(act_word(B.ea, W({2})), Error);
  // Agrees with running the parsed machine directly.
  for (auto const& w : all_words(2, 7)) {
    REQUIRE(act_word(B.ea, w) == B.a.machine.act(B.a.state("a"), w));
    REQUIRE(act_word(B.eb, w) == B.a.machine.act(B.a.state("b"), w));
  }
}

TEST_CASE("state_at and states_set", "[core]") {
  Basilica B;
  REQUIRE(state_at(B.ea, W({0})) == B.eb);
  REQUIRE(state_at(B.eb, W({0})) == B.ea);
  REQUIRE(state_at(B.ea, Word{}) == B.ea);

  auto S = states_set(B.ea);
  REQUIRE(std::set<Element>(S.begin(), S.end()) == std::set<Element>{B.ea, B.eb, B.one});
  REQUIRE(states_set(B.one) == std::vector<Element>{B.one});
  REQUIRE(S.size() <= B.ea.state_count());
}

TEST_CASE("equal and is_trivial", "[core]") {
  Basilica B;
  REQUIRE(equal(B.eb * inverse(B.eb), B.one));
  REQUIRE_FALSE(equal(B.ea, B.eb));
  REQUIRE(act_word(B.ea, W({0})) != act_word(B.eb, W({0})));
  // Re-parsing yields the same handles.
  Automaton again = load_group("basilica");
  REQUIRE(equal(again.element("a"), B.ea));
  REQUIRE(is_trivial(B.one));
  REQUIRE_FALSE(is_trivial(B.ea));
  REQUIRE_FALSE(is_trivial(load_group("exponential").element("e")));
}

TEST_CASE("properties on random elements", "[core][property]") {
  for (auto const& [file, gens] :
       std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"basilica", {"a", "b"}},
           {"gupta_sidki", {"a", "b"}},
           {"grigorchuk", {"a", "b", "c", "d"}},
           {"bsv", {"a", "b"}}}) {
    Automaton a = load_group(file);
    auto      sampler = test::sampler_for(a, gens, 12345);
    std::size_t const d = a.degree();
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> letter(0, static_cast<int>(d) - 1);
    auto random_word = [&](std::size_t n) {
      Word w(n);
      for (auto& x : w) {
        x = static_cast<Letter>(letter(rng));
      }
      return w;
    };
    for (int trial = 0; trial < 60; ++trial) {
      auto    wg = sampler.word(5);
      auto    wh = sampler.word(5);
      Element g  = sampler.element(wg);
      Element h  = sampler.element(wh);
      Element gh = g * h;

      REQUIRE(recompose(decompose(g)) == g);

      for (int k = 0; k < 20; ++k) {
        Word w = random_word(8);
        REQUIRE(act_word(gh, w) == act_word(h, act_word(g, w)));
        REQUIRE(act_word(g, w) == sampler.raw_element(wg).act(w));
      }

      auto dg = decompose(g), dh = decompose(h), dgh = decompose(gh);
      REQUIRE(dgh.root_perm == perm_product(dg.root_perm, dh.root_perm));
      for (Letter x = 0; x < d; ++x) {
        REQUIRE(dgh.sections[x] == dg.sections[x] * dh.sections[dg.root_perm(x)]);
      }

      Word u = random_word(3), v = random_word(4);
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      REQUIRE(state_at(g, uv) == state_at(state_at(g, u), v));

      bool same = test::raw_equal(sampler.raw_element(wg), sampler.raw_element(wh));
      REQUIRE(equal(g, h) == same);
      REQUIRE(equal(g, h) == is_trivial(g * inverse(h)));
    }
  }
}

TEST_CASE("concurrent interning resolves to one handle", "[core][concurrency]") {
  // A machine not seen elsewhere in this binary: a long directed chain.
  MealyMachine m(3);
  for (StateId q = 0; q < 40; ++q) {
    m.add_state(Perm({static_cast<Letter>(q % 3 == 0 ? 1 : 0),
                      static_cast<Letter>(q % 3 == 0 ? 0 : 1), 2}),
                {(q + 1) % 40, 40, 40});
  }
  m.add_state(Perm::identity(3), {40, 40, 40});
  std::vector<ElementId> got(8);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < got.size(); ++t) {
    pool.emplace_back([&, t] { got[t] = canonicalize(m, static_cast<StateId>(t % 2)).id(); });
  }
  for (auto& th : pool) {
    th.join();
  }
  for (std::size_t t = 0; t < got.size(); ++t) {
    REQUIRE(got[t] == got[t % 2]);
  }
  REQUIRE(got[0] != got[1]);
  REQUIRE(Element(got[0]).state_count() == 41);
}
