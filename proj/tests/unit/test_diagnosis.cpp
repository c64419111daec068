#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "rio/diagnosis.hpp"
#include "rio/error.hpp"
#include "rio/generators.hpp"

using namespace rio;
using fixture::ids;
using fixture::single;

namespace {

std::vector<AxiomSet> axiom_sets(const std::vector<Diagnosis>& ds) {
  std::vector<AxiomSet> out;
  for (const auto& d : ds) out.push_back(d.axioms);
  return out;
}

}  // namespace

TEST_CASE("is_faulty on the example") {
  const Dpi dpi = fixture::example_dpi();
  CHECK(is_faulty(dpi, dpi.candidates()));
  CHECK_FALSE(is_faulty(dpi, {}));
  CHECK_FALSE(is_faulty(dpi, ids(dpi.kb(), {"ax3", "ax4"})));
}

TEST_CASE("quickxplain on the example") {
  const Dpi dpi = fixture::example_dpi();
  CHECK(quickxplain(dpi, dpi.candidates()) == dpi.candidates());
  CHECK_FALSE(quickxplain(dpi, ids(dpi.kb(), {"ax1", "ax2"})).has_value());
  const auto kb = std::make_shared<const KnowledgeBase>(parse_kb("axiom a : X\naxiom b : !X | Y\naxiom c : X & !X\n"));
  const Dpi small = Dpi::from_kb(kb);
  CHECK(quickxplain(small, AxiomSet{2}) == AxiomSet{2});
  CHECK(quickxplain(small, AxiomSet{0, 1, 2}) == AxiomSet{2});
}

TEST_CASE("leading diagnoses on the example") {
  const Dpi dpi = fixture::example_dpi();
  const auto p = fixture::example_axiom_p();
  const auto& kb = dpi.kb();

  auto all = leading_diagnoses(dpi, p, 9);
  sort_canonical(all);
  CHECK(axiom_sets(all) == std::vector<AxiomSet>{single(kb, "ax1"), single(kb, "ax2"), single(kb, "ax3"),
                                                 single(kb, "ax4"), single(kb, "ax5"), single(kb, "ax6")});

  const auto two = leading_diagnoses(dpi, p, 2);
  CHECK(axiom_sets(two) == std::vector<AxiomSet>{single(kb, "ax6"), single(kb, "ax5")});
}

TEST_CASE("diagnosis priors on the example") {
  const Dpi dpi = fixture::example_dpi();
  const auto p = fixture::example_axiom_p();
  auto ds = leading_diagnoses(dpi, p, 9);
  sort_canonical(ds);
  const auto pr = diagnosis_priors(ds);
  CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pr[5] == doctest::Approx(0.605).epsilon(0.002));
  CHECK(pr[4] == doctest::Approx(0.381).epsilon(0.002));
  for (int i = 0; i < 4; ++i) CHECK(pr[static_cast<std::size_t>(i)] == doctest::Approx(0.0034).epsilon(0.02));

  // literal product form agrees after normalization
  double total = 0;
  std::vector<double> lit;
  for (const auto& d : ds) {
    lit.push_back(diagnosis_probability(d.axioms, dpi.candidates(), p));
    total += lit.back();
  }
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(lit[i] / total == doctest::Approx(pr[i]).epsilon(1e-9));

  const std::vector<Diagnosis> one{{single(dpi.kb(), "ax1"), 0.3}};
  CHECK(diagnosis_priors(one)[0] == 1.0);
  const std::vector<AxiomSet> sets{AxiomSet{0}, AxiomSet{1}};
  const std::vector<double> flat(6, 0.2);
  const auto u = diagnosis_priors(sets, flat);
  CHECK(u[0] == doctest::Approx(0.5));
}

TEST_CASE("single faulty axiom") {
  const auto kb = std::make_shared<const KnowledgeBase>(parse_kb("@background s\naxiom s : A\naxiom bad [p=0.2] : !A\n"));
  const Dpi dpi = Dpi::from_kb(kb);
  const std::vector<double> p{0.5, 0.2};
  const auto ds = leading_diagnoses(dpi, p, 9);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].axioms == AxiomSet{1});
}

TEST_CASE("non-faulty instance is rejected") {
  const auto kb = std::make_shared<const KnowledgeBase>(parse_kb("axiom a : A -> B\naxiom b : B -> C\n"));
  const Dpi dpi = Dpi::from_kb(kb);
  CHECK_THROWS_AS(leading_diagnoses(dpi, std::vector<double>{0.1, 0.1}, 9), NoDiagnosisError);
}

TEST_CASE("faulty background is rejected") {
  const auto kb = std::make_shared<const KnowledgeBase>(parse_kb("@background s t\naxiom s : A\naxiom t : !A\naxiom u : B\n"));
  const Dpi dpi = Dpi::from_kb(kb);
  CHECK_THROWS_AS(leading_diagnoses(dpi, std::vector<double>{0.1, 0.1, 0.1}, 9), NoDiagnosisError);
}

TEST_CASE("dpi rejects negative cases entailed by background") {
  const auto kb = fixture::example_kb();
  const auto r = std::make_shared<const Reasoner>(kb);
  CHECK_THROWS_AS(Dpi(r, Requirements{}, {}, {fixture::lits(*kb, {"PhDStudent"})}), InputError);
  CHECK_NOTHROW(Dpi(r, Requirements{}, {}, {fixture::lits(*kb, {"PhD"})}));
}

TEST_CASE("test cases shape the diagnoses") {
  const Dpi base = fixture::example_dpi();
  const auto& kb = base.kb();
  const auto p = fixture::example_axiom_p();
  // Requiring that DeptMember is not entailed keeps only diagnoses breaking the chain to it.
  const Dpi neg = base.with_negative(fixture::lits(kb, {"DeptMember"}));
  auto ds = leading_diagnoses(neg, p, 20);
  sort_canonical(ds);
  const oracle::TruthTable tt(kb);
  oracle::Problem prob;
  prob.negative = neg.negative_cases();
  CHECK(axiom_sets(ds) == oracle::minimal_diagnoses(tt, prob));
  // Positive case: Researcher holds, so ax1 and ax5 are not to blame.
  const Dpi pos = base.with_positive(fixture::lits(kb, {"Researcher"}));
  auto dp = leading_diagnoses(pos, p, 20);
  sort_canonical(dp);
  oracle::Problem prob2;
  prob2.positive = pos.positive_cases();
  CHECK(axiom_sets(dp) == oracle::minimal_diagnoses(tt, prob2));
}

TEST_CASE("random KBs: hitting-set search equals brute force") {
  int checked = 0;
  for (std::uint64_t seed = 1000; seed < 1150; ++seed) {
    const auto kb = std::make_shared<const KnowledgeBase>(random_small_kb(seed));
    const Dpi dpi = Dpi::from_kb(kb);
    const oracle::TruthTable tt(*kb);
    oracle::Problem prob;
    prob.coherency = dpi.requirements().coherency;
    const auto expected = oracle::minimal_diagnoses(tt, prob);
    const auto p = axiom_probabilities(*kb, FaultModel::uniform(0.05));

    auto got = leading_diagnoses(dpi, p, 1024);
    sort_canonical(got);
    REQUIRE(axiom_sets(got) == expected);

    // best-n prefix: nothing left out is strictly more probable than something kept
    const auto top = leading_diagnoses(dpi, p, 3);
    double weakest = 1e300;
    for (const auto& d : top) weakest = std::min(weakest, d.weight);
    for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].weight >= top[i].weight);
    for (const auto& d : expected) {
      const bool kept = std::any_of(top.begin(), top.end(), [&](const Diagnosis& t) { return t.axioms == d; });
      if (!kept) CHECK(diagnosis_weight(d, p) <= weakest * (1 + 1e-12));
    }

    // conflicts: quickxplain minimal, and diagnoses hit every minimal conflict
    const auto conflict = quickxplain(dpi, dpi.candidates());
    REQUIRE(conflict.has_value());
    CHECK(is_faulty(dpi, *conflict));
    for (AxiomIndex ax : *conflict) {
      AxiomSet smaller = *conflict;
      smaller.erase(ax);
      CHECK_FALSE(is_faulty(dpi, smaller));
    }
    for (const auto& c : oracle::minimal_conflicts(tt, prob)) {
      for (const auto& d : expected) CHECK(d.intersects(c));
    }
    ++checked;
  }
  CHECK(checked == 150);
}
