#include "rio/generators.hpp"

#include <algorithm>
#include <memory>
#include <random>

#include "rio/reasoner.hpp"

namespace rio {

namespace {

// Modulo draws keep instances identical across standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

class SmallKbBuilder {
 public:
  SmallKbBuilder(Draw& draw, int atoms) : draw_(draw), atoms_(atoms) {}

  Formula atom() { return Formula::atom("P" + std::to_string(draw_.below(static_cast<std::uint64_t>(atoms_)))); }
  Formula literal() { return draw_.chance(0.3) ? Formula::negation(atom()) : atom(); }
  Formula literal_or(Formula::Kind kind) {
    Formula f = literal();
    return draw_.chance(0.25) ? Formula::binary(kind, f, literal()) : f;
  }

  Formula diagnosable() {
    switch (draw_.below(10)) {
      case 0: case 1: case 2: case 3: case 4:
        return Formula::implication(literal_or(Formula::Kind::And), literal_or(Formula::Kind::Or));
      case 5: return Formula::disjunction(literal(), literal());
      case 6: return literal();
      case 7: return Formula::biconditional(literal(), literal());
      case 8: return Formula::negation(Formula::conjunction(literal(), literal()));
      default: return Formula::implication(atom(), Formula::negation(atom()));
    }
  }

  Formula background() { return draw_.chance(0.7) ? literal() : Formula::implication(literal(), literal()); }

 private:
  Draw& draw_;
  int atoms_;
};

}  // namespace

KnowledgeBase random_small_kb(std::uint64_t seed, const RandomKbOptions& opts) {
  Draw draw(seed);
  for (;;) {
    const int atoms = draw.between(opts.min_atoms, opts.max_atoms);
    const int total = draw.between(opts.min_axioms, opts.max_axioms);
    const int n_background = std::min(total - 2, static_cast<int>(draw.below(3)));
    SmallKbBuilder gen(draw, atoms);

    std::vector<Axiom> axioms;
    std::vector<std::string> background;
    for (int i = 0; i < total - n_background; ++i) {
      axioms.push_back({"a" + std::to_string(i + 1), gen.diagnosable(), draw.uniform(0.01, 0.4)});
    }
    for (int i = 0; i < n_background; ++i) {
      axioms.push_back({"b" + std::to_string(i + 1), gen.background(), std::nullopt});
      background.push_back(axioms.back().id);
    }
    std::vector<std::string> coherent;
    if (draw.chance(opts.coherency_chance)) coherent.push_back("P" + std::to_string(draw.below(static_cast<std::uint64_t>(atoms))));

    std::shared_ptr<const KnowledgeBase> kb;
    try {
      kb = std::make_shared<const KnowledgeBase>(axioms, background, coherent);
    } catch (const std::exception&) {
      continue;  // coherency atom absent from the drawn signature
    }
    const Requirements rq{true, !coherent.empty()};
    const Reasoner r(kb);
    if (!r.meets_requirements(Theory{kb->background(), {}}, rq)) continue;
    if (r.meets_requirements(Theory{kb->background() | kb->diagnosable(), {}}, rq)) continue;
    return *kb;
  }
}

PlantedInstance chain_clash_kb(std::uint64_t seed, const ChainClashOptions& opts) {
  Draw draw(seed);
  const int chains = std::max(2, opts.chains);
  const int chain_axioms = opts.axioms - 1 - opts.target_size;
  std::vector<int> lengths(static_cast<std::size_t>(chains), chain_axioms / chains);
  for (int i = 0; i < chain_axioms % chains; ++i) ++lengths[static_cast<std::size_t>(i)];

  auto node = [](int chain, int step) { return "C" + std::to_string(chain) + "_" + std::to_string(step); };
  std::vector<Axiom> axioms;
  for (int c = 0; c < chains; ++c) {
    const int len = lengths[static_cast<std::size_t>(c)];
    // A couple of steps per chain look like alignment axioms: correct, but with target-like priors.
    const int decoy_a = static_cast<int>(draw.below(static_cast<std::uint64_t>(len)));
    const int decoy_b = static_cast<int>(draw.below(static_cast<std::uint64_t>(len)));
    for (int k = 0; k < len; ++k) {
      const Formula from = Formula::atom(k == 0 ? "Root" : node(c, k - 1));
      const double p = (k == decoy_a || k == decoy_b) ? draw.uniform(0.05, 0.4) : draw.uniform(0.001, 0.01);
      axioms.push_back({"k" + std::to_string(c) + "_" + std::to_string(k), Formula::implication(from, Formula::atom(node(c, k))), p});
    }
  }

  PlantedInstance out;
  for (int j = 0; j < opts.target_size; ++j) {
    const int a = (2 * j) % chains;
    int b = (2 * j + 1) % chains;
    if (b == a) b = (a + 1) % chains;
    const int a_end = lengths[static_cast<std::size_t>(a)] - 1;
    const int b_at = static_cast<int>(draw.below(static_cast<std::uint64_t>(lengths[static_cast<std::size_t>(b)])));
    const std::string id = "m" + std::to_string(j + 1);
    axioms.push_back({id, Formula::implication(Formula::atom(node(a, a_end)), Formula::negation(Formula::atom(node(b, b_at)))),
                      draw.uniform(0.05, 0.4)});
    out.target.push_back(id);
  }
  for (std::size_t i = axioms.size(); i > 1; --i) std::swap(axioms[i - 1], axioms[draw.below(i)]);
  axioms.push_back({"root", Formula::atom("Root"), std::nullopt});
  out.kb = KnowledgeBase(std::move(axioms), {"root"});
  return out;
}

}  // namespace rio
