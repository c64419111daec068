#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "rio/error.hpp"
#include "rio/logic.hpp"

using namespace rio;

namespace {
int count(const ConstructCounts& c, Construct k) { return c[static_cast<std::size_t>(k)]; }
}  // namespace

TEST_CASE("parse a single axiom with prior") {
  const KnowledgeBase kb = parse_kb("axiom ax1 [p=0.001] : PhD -> Researcher\n");
  REQUIRE(kb.size() == 1);
  const Axiom& ax = kb.axiom(0);
  CHECK(ax.id == "ax1");
  CHECK(ax.formula == Formula::implication(Formula::atom("PhD"), Formula::atom("Researcher")));
  REQUIRE(ax.prior.has_value());
  CHECK(*ax.prior == doctest::Approx(0.001));
}

TEST_CASE("empty text gives empty KB") {
  CHECK(parse_kb("").empty());
  CHECK(parse_kb("# only a comment\n\n").empty());
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_kb("axiom a : X -> ");
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 16);
    CHECK(std::string(e.what()).find("missing operand") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_kb("axiom a : X\naxiom a : Y\n"), InputError);
  CHECK_THROWS_AS(parse_kb("axiom a [p=1.5] : X\n"), InputError);
  CHECK_THROWS_AS(parse_kb("axiom a [p=0] : X\n"), InputError);
  CHECK_THROWS_AS(parse_kb("axiom a : (X & Y\n"), InputError);
  CHECK_THROWS_AS(parse_kb("@background nope\naxiom a : X\n"), InputError);
  CHECK_THROWS_AS(parse_kb("@coherent Z\naxiom a : X\n"), InputError);
  CHECK_THROWS_AS(parse_kb("@frobnicate\n"), InputError);
  CHECK_THROWS_AS(parse_kb("axiom a : X $ Y\n"), InputError);
}

TEST_CASE("precedence and associativity") {
  const auto a = Formula::atom("A"), b = Formula::atom("B"), c = Formula::atom("C");
  auto f = [](const char* text) { return parse_kb(std::string("axiom x : ") + text).axiom(0).formula; };
  CHECK(f("A -> B -> C") == Formula::implication(a, Formula::implication(b, c)));
  CHECK(f("A | B & C") == Formula::disjunction(a, Formula::conjunction(b, c)));
  CHECK(f("!A & B") == Formula::conjunction(Formula::negation(a), b));
  CHECK(f("A <-> B -> C") == Formula::biconditional(a, Formula::implication(b, c)));
  CHECK(f("A | B -> C") == Formula::implication(Formula::disjunction(a, b), c));
  CHECK(f("(A -> B) -> C") == Formula::implication(Formula::implication(a, b), c));
}

TEST_CASE("directives and background") {
  const KnowledgeBase kb = parse_kb("@coherent A, B\n@background s\naxiom s : A\naxiom t : A -> B\n");
  CHECK(kb.background() == AxiomSet{0});
  CHECK(kb.diagnosable() == AxiomSet{1});
  CHECK(kb.coherency_atoms().size() == 2);
  CHECK(kb.is_background(0));
}

TEST_CASE("signature is sorted by name") {
  const KnowledgeBase kb = parse_kb("axiom a : Zeta -> Alpha | Mid\n");
  CHECK(kb.signature() == std::vector<std::string>{"Alpha", "Mid", "Zeta"});
  CHECK(*kb.atom_id("Zeta") == 2);
}

TEST_CASE("count_constructs") {
  auto counts = [](const char* text) { return count_constructs(parse_kb(std::string("axiom x : ") + text).axiom(0)); };
  const auto c1 = counts("PhD -> Researcher");
  CHECK(count(c1, Construct::Implication) == 1);
  CHECK(count(c1, Construct::Negation) == 0);
  const auto c2 = counts("Student -> !DeptMember");
  CHECK(count(c2, Construct::Implication) == 1);
  CHECK(count(c2, Construct::Negation) == 1);
  const auto c3 = counts("(A & B) | (A & C)");
  CHECK(count(c3, Construct::Conjunction) == 2);
  CHECK(count(c3, Construct::Disjunction) == 1);
  const auto c4 = counts("A <-> B");
  CHECK(count(c4, Construct::Biconditional) == 1);
  CHECK(count(c4, Construct::Implication) == 0);
}

TEST_CASE("construct totals equal connective count") {
  const KnowledgeBase kb = parse_kb("axiom x : !(A <-> B) | (C -> !D) & E\n");
  const auto c = count_constructs(kb.axiom(0));
  int total = 0;
  for (int n : c) total += n;
  CHECK(static_cast<std::size_t>(total) == kb.axiom(0).formula.connective_count());
}

TEST_CASE("axiom_fault_probability") {
  FaultModel fm = FaultModel::uniform(0.02);
  fm[Construct::Implication] = 0.05;
  fm[Construct::Negation] = 0.01;
  const KnowledgeBase kb = parse_kb(
      "axiom e [p=0.1] : A -> B\n"
      "axiom bare : A\n"
      "axiom neg : Student -> !DeptMember\n");
  CHECK(axiom_fault_probability(kb.axiom(0), fm) == doctest::Approx(0.1));
  CHECK(axiom_fault_probability(kb.axiom(1), fm) == 0.0);
  CHECK(axiom_fault_probability(kb.axiom(2), fm) == doctest::Approx(1.0 - 0.95 * 0.99));
}

TEST_CASE("fault probability is monotone in p_t") {
  const KnowledgeBase kb = parse_kb("axiom x : (A & B) -> !(C | D)\n");
  FaultModel lo = FaultModel::uniform(0.01);
  for (Construct c : kAllConstructs) {
    FaultModel hi = lo;
    hi[c] = 0.2;
    CHECK(axiom_fault_probability(kb.axiom(0), hi) >= axiom_fault_probability(kb.axiom(0), lo));
  }
}

TEST_CASE("fault model validation") {
  CHECK_NOTHROW(FaultModel::uniform(0.3).validate());
  CHECK_THROWS_AS(FaultModel::uniform(0.0).validate(), InputError);
  CHECK_THROWS_AS(FaultModel::uniform(1.0).validate(), InputError);
}

TEST_CASE("serialize round trip") {
  const auto kb = fixture::example_kb();
  const KnowledgeBase again = parse_kb(serialize_kb(*kb));
  REQUIRE(again.size() == kb->size());
  for (std::size_t i = 0; i < kb->size(); ++i) {
    CHECK(again.axiom(i).id == kb->axiom(i).id);
    CHECK(again.axiom(i).formula == kb->axiom(i).formula);
    CHECK(again.axiom(i).prior == kb->axiom(i).prior);
  }
  CHECK(again.background() == kb->background());

  const KnowledgeBase nested = parse_kb("@coherent A\naxiom x : !(A <-> B) | (C -> !D) & E\naxiom y : A -> (B -> C)\naxiom z : (A -> B) -> C\n");
  const KnowledgeBase back = parse_kb(serialize_kb(nested));
  for (std::size_t i = 0; i < nested.size(); ++i) CHECK(back.axiom(i).formula == nested.axiom(i).formula);
  CHECK(back.coherency_atoms() == nested.coherency_atoms());
}

TEST_CASE("KB constructor rejects out-of-range priors") {
  std::vector<Axiom> axioms{{"a", Formula::atom("X"), 1.5}};
  CHECK_THROWS_AS(KnowledgeBase(axioms, {}), InputError);
}
