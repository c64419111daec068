#include "oracle.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace oracle {

TruthTable::TruthTable(const KnowledgeBase& kb) : kb_(kb), atoms_(kb.signature().size()) {
  if (atoms_ > 20) throw std::invalid_argument("truth table oracle limited to 20 atoms");
  const std::uint64_t rows = std::uint64_t{1} << atoms_;
  words_ = static_cast<std::size_t>((rows + 63) / 64);
  tail_mask_ = rows % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (rows % 64)) - 1;
  for (std::size_t a = 0; a < atoms_; ++a) {
    Models m(words_, 0);
    for (std::uint64_t row = 0; row < rows; ++row) {
      if ((row >> a) & 1U) m[row / 64] |= std::uint64_t{1} << (row % 64);
    }
    atom_models_.push_back(std::move(m));
  }
  for (const rio::Axiom& ax : kb.axioms()) axiom_models_.push_back(eval(ax.formula));
}

TruthTable::Models TruthTable::eval(const Formula& f) const {
  using K = Formula::Kind;
  if (f.kind() == K::Atom) return atom_models_.at(*kb_.atom_id(f.name()));
  Models a = eval(f.lhs());
  if (f.kind() == K::Not) {
    for (auto& w : a) w = ~w;
    a.back() &= tail_mask_;
    return a;
  }
  const Models b = eval(f.rhs());
  for (std::size_t i = 0; i < words_; ++i) {
    switch (f.kind()) {
      case K::And: a[i] &= b[i]; break;
      case K::Or: a[i] |= b[i]; break;
      case K::Implies: a[i] = ~a[i] | b[i]; break;
      case K::Iff: a[i] = ~(a[i] ^ b[i]); break;
      default: break;
    }
  }
  a.back() &= tail_mask_;
  return a;
}

TruthTable::Models TruthTable::literal_models(const rio::Literal& l) const {
  Models m = atom_models_.at(l.atom);
  if (!l.positive) {
    for (auto& w : m) w = ~w;
    m.back() &= tail_mask_;
  }
  return m;
}

bool TruthTable::empty(const Models& m) {
  return std::all_of(m.begin(), m.end(), [](std::uint64_t w) { return w == 0; });
}

TruthTable::Models TruthTable::models(const AxiomSet& axioms, const LiteralSet& units) const {
  Models m(words_, ~std::uint64_t{0});
  m.back() &= tail_mask_;
  for (auto i : axioms) {
    for (std::size_t w = 0; w < words_; ++w) m[w] &= axiom_models_[i][w];
  }
  for (const auto& l : units) {
    const Models lm = literal_models(l);
    for (std::size_t w = 0; w < words_; ++w) m[w] &= lm[w];
  }
  return m;
}

bool TruthTable::satisfiable(const AxiomSet& axioms, const LiteralSet& units) const {
  return !empty(models(axioms, units));
}

bool TruthTable::entails(const AxiomSet& axioms, const LiteralSet& units, const LiteralSet& conj) const {
  const Models m = models(axioms, units);
  for (const auto& l : conj) {
    const Models lm = literal_models(l);
    for (std::size_t w = 0; w < words_; ++w) {
      if (m[w] & ~lm[w]) return false;
    }
  }
  return true;
}

LiteralSet TruthTable::entailed(const AxiomSet& axioms, const LiteralSet& units, std::span<const AtomId> vocab,
                                bool both_signs) const {
  std::vector<rio::Literal> out;
  for (AtomId a : vocab) {
    if (entails(axioms, units, LiteralSet{rio::Literal{a, true}})) out.push_back({a, true});
    if (both_signs && entails(axioms, units, LiteralSet{rio::Literal{a, false}})) out.push_back({a, false});
  }
  return LiteralSet(std::move(out));
}

namespace {

LiteralSet units_of(const Problem& p) {
  LiteralSet u;
  for (const auto& tp : p.positive) u = u | tp;
  return u;
}

AxiomSet from_mask(const std::vector<rio::AxiomIndex>& pool, std::uint32_t mask) {
  std::vector<rio::AxiomIndex> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if ((mask >> i) & 1U) out.push_back(pool[i]);
  }
  return AxiomSet(std::move(out));
}

}  // namespace

bool faulty(const TruthTable& tt, const Problem& p, const AxiomSet& candidate) {
  const AxiomSet k = candidate | tt.kb().background();
  const LiteralSet units = units_of(p);
  if (!tt.satisfiable(k, units)) return true;
  if (p.coherency) {
    for (AtomId a : tt.kb().coherency_atoms()) {
      if (!tt.satisfiable(k, units | LiteralSet{rio::Literal{a, true}})) return true;
    }
  }
  for (const auto& tn : p.negative) {
    if (tt.entails(k, units, tn)) return true;
  }
  return false;
}

std::vector<AxiomSet> minimal_diagnoses(const TruthTable& tt, const Problem& p) {
  const auto& pool = tt.kb().diagnosable().items();
  if (pool.size() > 20) throw std::invalid_argument("too many candidate axioms for brute force");
  const std::uint32_t full = (std::uint32_t{1} << pool.size()) - 1;
  std::vector<char> diag(std::size_t{full} + 1);
  for (std::uint32_t m = 0; m <= full; ++m) diag[m] = faulty(tt, p, from_mask(pool, full & ~m)) ? 0 : 1;
  std::vector<AxiomSet> out;
  for (std::uint32_t m = 0; m <= full; ++m) {
    if (!diag[m]) continue;
    bool minimal = true;
    for (std::size_t i = 0; i < pool.size() && minimal; ++i) {
      if (((m >> i) & 1U) && diag[m & ~(std::uint32_t{1} << i)]) minimal = false;
    }
    if (minimal) out.push_back(from_mask(pool, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AxiomSet> minimal_conflicts(const TruthTable& tt, const Problem& p) {
  const auto& pool = tt.kb().diagnosable().items();
  if (pool.size() > 20) throw std::invalid_argument("too many candidate axioms for brute force");
  const std::uint32_t full = (std::uint32_t{1} << pool.size()) - 1;
  std::vector<char> bad(std::size_t{full} + 1);
  for (std::uint32_t m = 0; m <= full; ++m) bad[m] = faulty(tt, p, from_mask(pool, m)) ? 1 : 0;
  std::vector<AxiomSet> out;
  for (std::uint32_t m = 0; m <= full; ++m) {
    if (!bad[m]) continue;
    bool minimal = true;
    for (std::size_t i = 0; i < pool.size() && minimal; ++i) {
      if (((m >> i) & 1U) && bad[m & ~(std::uint32_t{1} << i)]) minimal = false;
    }
    if (minimal) out.push_back(from_mask(pool, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Side classify(const TruthTable& tt, const Problem& p, const AxiomSet& diagnosis, const LiteralSet& query) {
  const AxiomSet k = (tt.kb().diagnosable() - diagnosis) | tt.kb().background();
  const LiteralSet units = units_of(p);
  if (tt.entails(k, units, query)) return Side::X;
  if (!tt.satisfiable(k, units | query)) return Side::NotX;
  return Side::Zero;
}

std::vector<rio::Partition> partitions(const TruthTable& tt, const Problem& p, std::span<const AxiomSet> leading) {
  const KnowledgeBase& kb = tt.kb();
  std::vector<AtomId> vocab;
  for (AtomId a = 0; a < kb.signature().size(); ++a) vocab.push_back(a);
  const LiteralSet units = units_of(p);
  const LiteralSet bg = tt.entailed(kb.background(), units, vocab, false);
  std::vector<LiteralSet> ent;
  for (const auto& d : leading) ent.push_back(tt.entailed((kb.diagnosable() - d) | kb.background(), units, vocab, false) - bg);
  std::vector<rio::Partition> out;
  const std::size_t n = leading.size();
  if (n > 20) throw std::invalid_argument("too many diagnoses for brute force");
  for (std::uint32_t m = 1; m + 1 < (std::uint32_t{1} << n); ++m) {
    std::optional<LiteralSet> x;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1U) x = x ? (*x & ent[i]) : ent[i];
    }
    if (x->empty()) continue;
    rio::Partition part;
    for (std::size_t i = 0; i < n; ++i) {
      switch (classify(tt, p, leading[i], *x)) {
        case Side::X: part.dx.push_back(i); break;
        case Side::NotX: part.dnx.push_back(i); break;
        case Side::Zero: part.dz.push_back(i); break;
      }
    }
    if (part.dnx.empty() && part.dz.empty()) continue;
    if (std::find(out.begin(), out.end(), part) == out.end()) out.push_back(part);
  }
  return out;
}

bool separable(const TruthTable& tt, const Problem& p, const AxiomSet& a, const AxiomSet& b) {
  const KnowledgeBase& kb = tt.kb();
  std::vector<AtomId> vocab;
  for (AtomId x = 0; x < kb.signature().size(); ++x) vocab.push_back(x);
  const LiteralSet units = units_of(p);
  // Any separating conjunction is implied by the full set of positive
  // entailments of one side, so checking those two sets is enough.
  auto contradicts = [&](const AxiomSet& d, const AxiomSet& other) {
    const LiteralSet e = tt.entailed((kb.diagnosable() - d) | kb.background(), units, vocab, false);
    return !e.empty() && classify(tt, p, other, e) == Side::NotX;
  };
  return contradicts(a, b) || contradicts(b, a);
}

}  // namespace oracle
