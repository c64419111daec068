#include "rio/query.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace rio {

namespace {

std::vector<AtomId> vocabulary_of(const KnowledgeBase& kb, const QueryOptions& opts) {
  if (opts.vocabulary) return *opts.vocabulary;
  std::vector<AtomId> all(kb.signature().size());
  for (AtomId a = 0; a < all.size(); ++a) all[a] = a;
  return all;
}

// Per-diagnosis theories and their full backbones. Cheap to rebuild: the
// reasoner memoizes backbones per theory.
class Leading {
 public:
  Leading(const Dpi& dpi, std::span<const Diagnosis> leading) : dpi_(dpi) {
    std::vector<AtomId> all(dpi.kb().signature().size());
    for (AtomId a = 0; a < all.size(); ++a) all[a] = a;
    theories_.reserve(leading.size());
    backbones_.reserve(leading.size());
    for (const Diagnosis& d : leading) {
      theories_.push_back(dpi.theory_without(d.axioms));
      if (!dpi.reasoner().is_consistent(theories_.back())) {
        throw std::logic_error("leading diagnosis does not repair the knowledge base");
      }
      backbones_.push_back(dpi.reasoner().entailed_literals(theories_.back(), all, Signs::Both));
    }
  }

  std::size_t size() const { return theories_.size(); }
  const LiteralSet& backbone(std::size_t i) const { return backbones_[i]; }

  Partition classify(const LiteralSet& x) const {
    Partition p;
    for (std::size_t i = 0; i < theories_.size(); ++i) {
      if (x.is_subset_of(backbones_[i])) {
        p.dx.push_back(i);
      } else if (contradicts_backbone(x, i) || !dpi_.reasoner().is_consistent(theories_[i], x)) {
        p.dnx.push_back(i);
      } else {
        p.dz.push_back(i);
      }
    }
    return p;
  }

  LiteralSet minimize(const LiteralSet& x, const Partition& target) const {
    LiteralSet cur = x;
    for (const Literal& l : x) {
      if (cur.size() == 1) break;
      LiteralSet trial = cur;
      trial.erase(l);
      if (classify(trial) == target) cur = std::move(trial);
    }
    return cur;
  }

 private:
  bool contradicts_backbone(const LiteralSet& x, std::size_t i) const {
    return std::any_of(x.begin(), x.end(), [&](const Literal& l) { return backbones_[i].contains(l.negated()); });
  }

  const Dpi& dpi_;
  std::vector<Theory> theories_;
  std::vector<LiteralSet> backbones_;
};

LiteralSet restrict(const LiteralSet& backbone, std::span<const AtomId> vocab, Signs signs) {
  std::vector<Literal> out;
  for (AtomId a : vocab) {
    if (backbone.contains(Literal{a, true})) out.push_back({a, true});
    if (signs == Signs::Both && backbone.contains(Literal{a, false})) out.push_back({a, false});
  }
  return LiteralSet(std::move(out));
}

LiteralSet background_entailments(const Dpi& dpi, std::span<const AtomId> vocab, Signs signs) {
  return dpi.reasoner().entailed_literals(dpi.background_theory(), vocab, signs);
}

struct PartitionHash {
  std::size_t operator()(const Partition& p) const {
    std::size_t h = 1469598103934665603ULL;
    auto mix = [&h](std::size_t v) { h = (h ^ v) * 1099511628211ULL; };
    for (auto i : p.dx) mix(i);
    mix(~std::size_t{0});
    for (auto i : p.dnx) mix(i);
    mix(~std::size_t{1});
    for (auto i : p.dz) mix(i);
    return h;
  }
};

// Visits the nonempty proper subsets of {0..n-1} in lexicographic order of
// their sorted index tuples: (0), (0,1), (0,1,2), ..., (0,2), ...
template <class F>
void for_each_proper_subset(std::size_t n, F&& visit) {
  std::vector<std::size_t> stack;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    for (std::size_t i = from; i < n; ++i) {
      stack.push_back(i);
      if (stack.size() < n) visit(std::span<const std::size_t>(stack));
      self(self, i + 1);
      stack.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

LiteralSet common_entailments(const Dpi& dpi, std::span<const Diagnosis> leading, std::span<const std::size_t> seed,
                              const QueryOptions& opts) {
  if (seed.empty()) throw std::invalid_argument("common_entailments needs a nonempty seed");
  const auto vocab = vocabulary_of(dpi.kb(), opts);
  std::optional<LiteralSet> acc;
  for (std::size_t i : seed) {
    const LiteralSet e = dpi.reasoner().entailed_literals(dpi.theory_without(leading[i].axioms), vocab, opts.signs);
    acc = acc ? (*acc & e) : e;
  }
  return *acc - background_entailments(dpi, vocab, opts.signs);
}

Partition classify(const Dpi& dpi, const LiteralSet& literals, std::span<const Diagnosis> leading) {
  return Leading(dpi, leading).classify(literals);
}

Query minimize_query(const Dpi& dpi, const Query& q, std::span<const Diagnosis> leading) {
  const Leading ctx(dpi, leading);
  return Query{ctx.minimize(q.literals, q.partition), q.partition};
}

std::vector<Query> generate_queries(const Dpi& dpi, std::span<const Diagnosis> leading, const QueryOptions& opts) {
  std::vector<Query> out;
  if (leading.size() < 2) return out;
  const Leading ctx(dpi, leading);
  const auto vocab = vocabulary_of(dpi.kb(), opts);
  const LiteralSet from_background = background_entailments(dpi, vocab, opts.signs);
  std::vector<LiteralSet> entailed;
  entailed.reserve(leading.size());
  for (std::size_t i = 0; i < leading.size(); ++i) entailed.push_back(restrict(ctx.backbone(i), vocab, opts.signs) - from_background);

  std::unordered_set<Partition, PartitionHash> seen;
  std::unordered_set<LiteralSet> tried;
  for_each_proper_subset(leading.size(), [&](std::span<const std::size_t> seed) {
    LiteralSet x = entailed[seed[0]];
    for (std::size_t k = 1; k < seed.size() && !x.empty(); ++k) x = x & entailed[seed[k]];
    if (x.empty() || !tried.insert(x).second) return;
    Partition p = ctx.classify(x);
    if (p.dnx.empty() && p.dz.empty()) return;
    if (!seen.insert(p).second) return;
    LiteralSet m = ctx.minimize(x, p);
    out.push_back(Query{std::move(m), std::move(p)});
  });
  return out;
}

double query_cautiousness(const Partition& p) {
  if (p.total() == 0) return 0.0;
  return static_cast<double>(std::min(p.dx.size(), p.dnx.size())) / static_cast<double>(p.total());
}

double elimination_rate(const Partition& p, Answer a) {
  if (p.total() == 0) return 0.0;
  const std::size_t gone = a == Answer::Yes ? p.dnx.size() : p.dx.size();
  return static_cast<double>(gone) / static_cast<double>(p.total());
}

double worst_case_elimination_rate(const Partition& p) {
  return std::min(elimination_rate(p, Answer::Yes), elimination_rate(p, Answer::No));
}

bool is_high_risk(const Partition& p, double c) { return query_cautiousness(p) < c; }

}  // namespace rio
