#include <catch_amalgamated.hpp>

#include "selfsim/embed.hpp"
#include "support.hpp"

using namespace selfsim;
using selfsim::test::load_group;

namespace {

std::vector<Element> gens_of(std::string const& file, std::vector<std::string> const& names) {
  Automaton            aut = load_group(file);
  std::vector<Element> out;
  for (auto const& n : names) {
    out.push_back(aut.element(n));
  }
  return out;
}

void check_plan_shape(EmbeddingPlan const& plan) {
  REQUIRE(plan.cycle.is_single_cycle());
  REQUIRE(plan.delta.state_count() == plan.degree1);
  REQUIRE(plan.degree2 == power_degree(plan.degree, plan.N));
  for (auto const& si : plan.images) {
    REQUIRE(si.image.degree() == plan.degree2);
    if (si.finitary) {
      REQUIRE(si.image == rooted(si.image.root_perm()));
      continue;
    }
    REQUIRE(si.beta.root_perm()(plan.o1) == plan.o1);
    REQUIRE(si.beta.section(plan.o1) == si.beta);
    REQUIRE(si.datum.rho(0) == 0);
    Element b = mother_b(si.datum);
    REQUIRE(b.section(0) == b);
    REQUIRE(b == alphabet_power(si.beta, plan.m2));
  }
}

}  // namespace

TEST_CASE("embedding: Basilica", "[embed]") {
  auto plan = embed_bounded_subgroup(gens_of("basilica", {"a", "b"}));
  REQUIRE(plan.m == 1);
  REQUIRE(plan.ell == 2);
  REQUIRE(plan.degree1 == 4);
  REQUIRE(plan.N == plan.ell * plan.m2);
  REQUIRE(plan.directed_count() == 2);
  check_plan_shape(plan);
  auto rep = verify_embedding(plan, 6, 3);
  INFO(rep.witness);
  REQUIRE(rep.passed);
  REQUIRE(rep.words_checked == 1 + 4 + 12 + 36 + 108 + 324 + 972);
  REQUIRE(rep.distinct_elements > 100);
}

TEST_CASE("embedding: Gupta-Sidki", "[embed]") {
  auto plan = embed_bounded_subgroup(gens_of("gupta_sidki", {"a", "b"}));
  REQUIRE(plan.ell == 1);
  REQUIRE(plan.m == 2);
  check_plan_shape(plan);
  auto rep = verify_embedding(plan, 6, 3);
  INFO(rep.witness);
  REQUIRE(rep.passed);
}

TEST_CASE("embedding: other bounded groups", "[embed]") {
  for (auto const& [file, names] :
       std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"grigorchuk", {"a", "b", "c", "d"}},
           {"adding_machine", {"t"}},
           {"bsv", {"a", "b"}},
           {"neumann", {"t2", "c2"}},
           {"fabrykowski_gupta", {"a", "b"}}}) {
    INFO(file);
    auto plan = embed_bounded_subgroup(gens_of(file, names));
    check_plan_shape(plan);
    auto rep = verify_embedding(plan, 4, 2);
    INFO(rep.witness);
    REQUIRE(rep.passed);
  }
}

TEST_CASE("embedding: finitary generators only", "[embed]") {
  auto plan = embed_bounded_subgroup({rooted(Perm({1, 0}))});
  REQUIRE(plan.m == 2);
  REQUIRE(plan.directed_count() == 0);
  REQUIRE(plan.level_states == std::vector<Element>{identity(2)});
  REQUIRE(plan.ell == 1);
  REQUIRE(plan.heads[0].perm == Perm({2, 3, 0, 1}));
  auto rep = verify_embedding(plan, 3, 3);
  REQUIRE(rep.passed);
  REQUIRE(rep.distinct_elements == 2);
}

TEST_CASE("embedding: empty word maps to the identity", "[embed]") {
  auto plan = embed_bounded_subgroup(gens_of("basilica", {"a", "b"}));
  auto rep  = verify_embedding(plan, 0, 2);
  REQUIRE(rep.passed);
  REQUIRE(rep.words_checked == 1);
  REQUIRE(rep.distinct_elements == 1);
}

TEST_CASE("embedding: rejects unbounded generators", "[embed]") {
  try {
    embed_bounded_subgroup(gens_of("exponential", {"e"}));
    FAIL("expected NotBounded");
  } catch (NotBounded const& e) {
    REQUIRE(e.tag().kind == ActivityClass::Kind::Exponential);
    REQUIRE(e.index() == 0);
  }
}

TEST_CASE("embedding: corrupted image is caught", "[embed]") {
  auto plan = embed_bounded_subgroup(gens_of("basilica", {"a", "b"}));
  for (auto& si : plan.images) {
    if (!si.finitary) {
      si.image = si.image * rooted(Perm::transposition(plan.degree2, 1, 2));
      break;
    }
  }
  auto rep = verify_embedding(plan, 2, 2);
  REQUIRE_FALSE(rep.passed);
  REQUIRE_FALSE(rep.witness.empty());
  REQUIRE_FALSE(rep.failures.empty());
}
