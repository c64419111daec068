#include "rio/reasoner.hpp"

#include <stdexcept>

namespace rio {

namespace {

using sat::Lit;

class Clausifier {
 public:
  Clausifier(sat::Solver& solver, const KnowledgeBase& kb) : solver_(solver), kb_(kb) {}

  // Asserts `f` under `guard`: every emitted top-level clause carries ~guard.
  void assert_guarded(const Formula& f, Lit guard) {
    if (f.kind() == Formula::Kind::And) {
      assert_guarded(f.lhs(), guard);
      assert_guarded(f.rhs(), guard);
      return;
    }
    std::vector<Lit> clause;
    if (!as_clause(f, true, clause)) {
      clause.assign(1, define(f));
    }
    clause.push_back(~guard);
    solver_.add_clause(clause);
  }

 private:
  Lit atom(const Formula& f) const { return Lit::make(*kb_.atom_id(f.name())); }

  // Appends the literals of a single clause equivalent to f (or to !f when
  // positive is false). Returns false when no such flat clause exists.
  bool as_clause(const Formula& f, bool positive, std::vector<Lit>& out) {
    const std::size_t mark = out.size();
    bool ok = false;
    switch (f.kind()) {
      case Formula::Kind::Atom:
        out.push_back(positive ? atom(f) : ~atom(f));
        return true;
      case Formula::Kind::Not: ok = as_clause(f.lhs(), !positive, out); break;
      case Formula::Kind::Or: ok = positive && as_clause(f.lhs(), true, out) && as_clause(f.rhs(), true, out); break;
      case Formula::Kind::And: ok = !positive && as_clause(f.lhs(), false, out) && as_clause(f.rhs(), false, out); break;
      case Formula::Kind::Implies:
        ok = positive && as_clause(f.lhs(), false, out) && as_clause(f.rhs(), true, out);
        break;
      case Formula::Kind::Iff: ok = false; break;
    }
    if (!ok) out.resize(mark);
    return ok;
  }

  // Tseitin definition: returns a literal equivalent to f.
  Lit define(const Formula& f) {
    if (f.kind() == Formula::Kind::Atom) return atom(f);
    if (f.kind() == Formula::Kind::Not) return ~define(f.lhs());
    const Lit a = define(f.lhs());
    const Lit b = define(f.rhs());
    const Lit x = Lit::make(solver_.new_var());
    switch (f.kind()) {
      case Formula::Kind::And:
        solver_.add_clause({~x, a});
        solver_.add_clause({~x, b});
        solver_.add_clause({x, ~a, ~b});
        break;
      case Formula::Kind::Or:
        solver_.add_clause({~x, a, b});
        solver_.add_clause({x, ~a});
        solver_.add_clause({x, ~b});
        break;
      case Formula::Kind::Implies:
        solver_.add_clause({~x, ~a, b});
        solver_.add_clause({x, a});
        solver_.add_clause({x, ~b});
        break;
      case Formula::Kind::Iff:
        solver_.add_clause({~x, ~a, b});
        solver_.add_clause({~x, a, ~b});
        solver_.add_clause({x, a, b});
        solver_.add_clause({x, ~a, ~b});
        break;
      default: break;
    }
    return x;
  }

  sat::Solver& solver_;
  const KnowledgeBase& kb_;
};

Lit to_sat(const Literal& l) { return Lit::make(l.atom, !l.positive); }

}  // namespace

Reasoner::Reasoner(std::shared_ptr<const KnowledgeBase> kb, ReasonerLimits limits)
    : kb_(std::move(kb)), limits_(limits) {
  for (std::size_t a = 0; a < kb_->signature().size(); ++a) solver_.new_var();
  selectors_.reserve(kb_->size());
  for (std::size_t i = 0; i < kb_->size(); ++i) selectors_.push_back(solver_.new_var());
  for (std::size_t i = 0; i < kb_->size(); ++i) encode_axiom(static_cast<AxiomIndex>(i));
}

void Reasoner::encode_axiom(AxiomIndex index) {
  Clausifier(solver_, *kb_).assert_guarded(kb_->axiom(index).formula, Lit::make(selectors_[index]));
}

bool Reasoner::solve_uncached(const Theory& theory, const LiteralSet& extra) const {
  std::vector<Lit> assumptions;
  assumptions.reserve(selectors_.size() + theory.units.size() + extra.size());
  for (AxiomIndex i : theory.axioms) assumptions.push_back(Lit::make(selectors_.at(i)));
  for (const Literal& l : theory.units) assumptions.push_back(to_sat(l));
  for (const Literal& l : extra) assumptions.push_back(to_sat(l));
  for (std::size_t i = 0; i < selectors_.size(); ++i) {
    if (!theory.axioms.contains(static_cast<AxiomIndex>(i))) assumptions.push_back(~Lit::make(selectors_[i]));
  }
  ++stats_.sat_calls;
  return solver_.solve(assumptions, limits_.conflict_budget);
}

bool Reasoner::solve_locked(const Theory& theory, const LiteralSet& extra) const {
  Theory key{theory.axioms, extra.empty() ? theory.units : theory.units | extra};
  if (auto it = sat_cache_.find(key); it != sat_cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  if (auto it = backbone_cache_.find(key); it != backbone_cache_.end()) {
    ++stats_.cache_hits;
    return it->second.has_value();
  }
  const bool result = solve_uncached(key, {});
  if (sat_cache_.size() >= limits_.cache_capacity) sat_cache_.clear();
  sat_cache_.emplace(std::move(key), result);
  return result;
}

bool Reasoner::is_consistent(const Theory& theory) const {
  std::lock_guard lock(mutex_);
  return solve_locked(theory, {});
}

bool Reasoner::is_consistent(const Theory& theory, const LiteralSet& extra) const {
  std::lock_guard lock(mutex_);
  return solve_locked(theory, extra);
}

bool Reasoner::entails(const Theory& theory, const LiteralSet& conj) const {
  std::lock_guard lock(mutex_);
  if (auto it = backbone_cache_.find(theory); it != backbone_cache_.end()) {
    ++stats_.cache_hits;
    if (!it->second) return true;
    return conj.is_subset_of(*it->second);
  }
  // Refutation: theory |= l iff theory + !l is inconsistent.
  for (const Literal& l : conj) {
    if (theory.units.contains(l)) continue;
    if (solve_locked(theory, LiteralSet{l.negated()})) return false;
  }
  return true;
}

const std::optional<LiteralSet>& Reasoner::backbone_locked(const Theory& theory) const {
  if (auto it = backbone_cache_.find(theory); it != backbone_cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  std::optional<LiteralSet> result;
  if (solve_uncached(theory, {})) {
    const std::size_t atoms = kb_->signature().size();
    std::vector<std::uint8_t> candidate(atoms, 1);
    std::vector<std::uint8_t> polarity(atoms, 0);
    for (std::size_t a = 0; a < atoms; ++a) polarity[a] = solver_.model_value(static_cast<sat::Var>(a)) ? 1 : 0;
    std::vector<Literal> entailed;
    for (std::size_t a = 0; a < atoms; ++a) {
      if (!candidate[a]) continue;
      const Literal lit{static_cast<AtomId>(a), polarity[a] != 0};
      if (solve_uncached(theory, LiteralSet{lit.negated()})) {
        // The counter-model also refutes every other candidate it flips.
        for (std::size_t b = a; b < atoms; ++b) {
          if (candidate[b] && (solver_.model_value(static_cast<sat::Var>(b)) ? 1 : 0) != polarity[b]) candidate[b] = 0;
        }
      } else {
        entailed.push_back(lit);
      }
    }
    result = LiteralSet(std::move(entailed));
  }
  if (backbone_cache_.size() >= limits_.cache_capacity) backbone_cache_.clear();
  return backbone_cache_.emplace(theory, std::move(result)).first->second;
}

LiteralSet Reasoner::entailed_literals(const Theory& theory, std::span<const AtomId> vocab, Signs signs) const {
  std::lock_guard lock(mutex_);
  const std::optional<LiteralSet>& backbone = backbone_locked(theory);
  if (!backbone) throw std::logic_error("entailed_literals called on an inconsistent theory");
  std::vector<Literal> out;
  for (AtomId a : vocab) {
    if (backbone->contains(Literal{a, true})) out.push_back({a, true});
    if (signs == Signs::Both && backbone->contains(Literal{a, false})) out.push_back({a, false});
  }
  return LiteralSet(std::move(out));
}

bool Reasoner::meets_requirements(const Theory& theory, Requirements rq) const {
  return meets_requirements(theory, rq, kb_->coherency_atoms());
}

bool Reasoner::meets_requirements(const Theory& theory, Requirements rq, std::span<const AtomId> coherency_atoms) const {
  std::lock_guard lock(mutex_);
  if (!solve_locked(theory, {})) return false;
  if (rq.coherency) {
    for (AtomId a : coherency_atoms) {
      if (!solve_locked(theory, LiteralSet{Literal{a, true}})) return false;
    }
  }
  return true;
}

ReasonerStats Reasoner::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

}  // namespace rio
