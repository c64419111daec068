#include "rio/diagnosis.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "rio/error.hpp"

namespace rio {

// ---------------------------------------------------------------- Dpi

Dpi::Dpi(std::shared_ptr<const Reasoner> reasoner, Requirements requirements, std::vector<LiteralSet> positive,
         std::vector<LiteralSet> negative)
    : reasoner_(std::move(reasoner)),
      requirements_(requirements),
      positive_(std::move(positive)),
      negative_(std::move(negative)) {
  for (const LiteralSet& tp : positive_) positive_units_ = positive_units_ | tp;
  const Theory base = background_theory();
  for (const LiteralSet& tn : negative_) {
    if (reasoner_->is_consistent(base) && reasoner_->entails(base, tn)) {
      throw InputError("background knowledge and positive test cases entail negative test case " + kb().render(tn));
    }
  }
}

Dpi Dpi::from_kb(std::shared_ptr<const KnowledgeBase> kb, ReasonerLimits limits) {
  Requirements rq;
  rq.coherency = !kb->coherency_atoms().empty();
  return Dpi(std::make_shared<const Reasoner>(std::move(kb), limits), rq);
}

Theory Dpi::theory_of(const AxiomSet& candidate) const { return Theory{candidate | background(), positive_units_}; }

Theory Dpi::theory_without(const AxiomSet& diagnosis) const { return theory_of(candidates() - diagnosis); }

Dpi Dpi::with_positive(LiteralSet test_case) const {
  auto tp = positive_;
  tp.push_back(std::move(test_case));
  return Dpi(reasoner_, requirements_, std::move(tp), negative_);
}

Dpi Dpi::with_negative(LiteralSet test_case) const {
  auto tn = negative_;
  tn.push_back(std::move(test_case));
  return Dpi(reasoner_, requirements_, positive_, std::move(tn));
}

// ---------------------------------------------------------------- faults and conflicts

bool is_faulty(const Dpi& dpi, const AxiomSet& candidate) {
  const Theory k = dpi.theory_of(candidate);
  if (!dpi.reasoner().meets_requirements(k, dpi.requirements())) return true;
  for (const LiteralSet& tn : dpi.negative_cases()) {
    if (dpi.reasoner().entails(k, tn)) return true;
  }
  return false;
}

bool is_minimal_diagnosis(const Dpi& dpi, const AxiomSet& diagnosis) {
  if (!is_diagnosis(dpi, diagnosis)) return false;
  for (AxiomIndex ax : diagnosis) {
    AxiomSet smaller = diagnosis;
    smaller.erase(ax);
    if (is_diagnosis(dpi, smaller)) return false;
  }
  return true;
}

namespace {

AxiomSet quickxplain_rec(const Dpi& dpi, const AxiomSet& base, bool base_changed, std::span<const AxiomIndex> items) {
  if (base_changed && is_faulty(dpi, base)) return {};
  if (items.size() == 1) return AxiomSet{items[0]};
  const std::size_t half = items.size() / 2;
  const auto first = items.subspan(0, half);
  const auto second = items.subspan(half);
  const AxiomSet first_set(std::vector<AxiomIndex>(first.begin(), first.end()));
  const AxiomSet d2 = quickxplain_rec(dpi, base | first_set, !first.empty(), second);
  const AxiomSet d1 = quickxplain_rec(dpi, base | d2, !d2.empty(), first);
  return d1 | d2;
}

}  // namespace

std::optional<AxiomSet> quickxplain(const Dpi& dpi, const AxiomSet& candidate) {
  if (!is_faulty(dpi, candidate)) return std::nullopt;
  if (candidate.empty() || is_faulty(dpi, {})) return AxiomSet{};
  return quickxplain_rec(dpi, {}, false, candidate.items());
}

// ---------------------------------------------------------------- probabilities

std::vector<double> axiom_probabilities(const KnowledgeBase& kb, const FaultModel& fm) {
  std::vector<double> p;
  p.reserve(kb.size());
  for (const Axiom& ax : kb.axioms()) {
    p.push_back(std::clamp(axiom_fault_probability(ax, fm), kMinAxiomProbability, kMaxAxiomProbability));
  }
  return p;
}

double diagnosis_probability(const AxiomSet& diagnosis, const AxiomSet& candidates, std::span<const double> axiom_p) {
  double prob = 1.0;
  for (AxiomIndex ax : candidates) {
    prob *= diagnosis.contains(ax) ? axiom_p[ax] : 1.0 - axiom_p[ax];
  }
  return prob;
}

double diagnosis_weight(const AxiomSet& diagnosis, std::span<const double> axiom_p) {
  double w = 1.0;
  for (AxiomIndex ax : diagnosis) w *= axiom_p[ax] / (1.0 - axiom_p[ax]);
  return w;
}

std::vector<double> diagnosis_priors(std::span<const Diagnosis> diagnoses) {
  double total = 0.0;
  for (const Diagnosis& d : diagnoses) total += d.weight;
  std::vector<double> out;
  out.reserve(diagnoses.size());
  for (const Diagnosis& d : diagnoses) out.push_back(d.weight / total);
  return out;
}

std::vector<double> diagnosis_priors(std::span<const AxiomSet> diagnoses, std::span<const double> axiom_p) {
  std::vector<Diagnosis> ds;
  ds.reserve(diagnoses.size());
  for (const AxiomSet& d : diagnoses) ds.push_back({d, diagnosis_weight(d, axiom_p)});
  return diagnosis_priors(ds);
}

void sort_canonical(std::vector<Diagnosis>& diagnoses) {
  std::sort(diagnoses.begin(), diagnoses.end(), [](const Diagnosis& a, const Diagnosis& b) { return a.axioms < b.axioms; });
}

// ---------------------------------------------------------------- hitting-set tree

namespace {

struct SearchNode {
  AxiomSet path;
  double priority;
  bool complete;  // a verified minimal diagnosis waiting to be emitted
};

struct NodeOrder {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.complete != b.complete) return !a.complete;
    return a.path > b.path;
  }
};

}  // namespace

std::vector<Diagnosis> leading_diagnoses(const Dpi& dpi, std::span<const double> axiom_p, std::size_t n,
                                         SearchLimits limits) {
  const AxiomSet& candidates = dpi.candidates();
  if (!is_faulty(dpi, candidates)) throw NoDiagnosisError("the knowledge base is not faulty; nothing to diagnose");

  // Admissible bound: extensions can only gain from axioms with odds above 1.
  std::vector<double> odds(axiom_p.size(), 1.0);
  double gain_all = 1.0;
  for (AxiomIndex ax : candidates) {
    odds[ax] = axiom_p[ax] / (1.0 - axiom_p[ax]);
    if (odds[ax] > 1.0) gain_all *= odds[ax];
  }
  auto bound = [&](const AxiomSet& path) {
    double b = gain_all;
    for (AxiomIndex ax : path) b *= odds[ax] > 1.0 ? 1.0 : odds[ax];
    return b;
  };

  std::priority_queue<SearchNode, std::vector<SearchNode>, NodeOrder> open;
  std::unordered_set<AxiomSet> seen;
  std::vector<AxiomSet> conflicts;
  std::vector<Diagnosis> found;
  open.push({AxiomSet{}, bound(AxiomSet{}), false});
  seen.insert(AxiomSet{});
  std::uint64_t expansions = 0;

  auto covers_found = [&found](const AxiomSet& path) {
    return std::any_of(found.begin(), found.end(), [&path](const Diagnosis& d) { return d.axioms.is_subset_of(path); });
  };

  while (!open.empty() && found.size() < n) {
    SearchNode node = open.top();
    open.pop();
    if (node.complete) {
      found.push_back({node.path, diagnosis_weight(node.path, axiom_p)});
      continue;
    }
    if (covers_found(node.path)) continue;
    if (++expansions > limits.max_expansions) {
      throw ResourceLimitError("hitting-set search exceeded " + std::to_string(limits.max_expansions) + " expansions");
    }

    const AxiomSet* label = nullptr;
    for (const AxiomSet& c : conflicts) {
      if (!c.intersects(node.path)) {
        label = &c;
        break;
      }
    }
    if (label == nullptr) {
      if (auto c = quickxplain(dpi, candidates - node.path)) {
        if (c->empty()) {
          throw NoDiagnosisError("background knowledge and test cases violate the requirements on their own");
        }
        conflicts.push_back(std::move(*c));
        label = &conflicts.back();
      }
    }
    if (label == nullptr) {
      if (is_minimal_diagnosis(dpi, node.path)) {
        open.push({node.path, diagnosis_weight(node.path, axiom_p), true});
      }
      continue;
    }
    const AxiomSet conflict = *label;
    for (AxiomIndex ax : conflict) {
      AxiomSet child = node.path;
      child.insert(ax);
      if (!seen.insert(child).second) continue;
      if (covers_found(child)) continue;
      open.push({child, bound(child), false});
    }
  }
  if (found.empty()) throw NoDiagnosisError("no diagnosis exists for this instance");
  return found;
}

}  // namespace rio
