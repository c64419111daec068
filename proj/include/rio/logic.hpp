#pragma once

// Propositional axiom language: formulas, axioms, knowledge bases, construct
// counting and the construct-based fault model.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rio/sorted_set.hpp"

namespace rio {

using AtomId = std::uint32_t;
using AxiomIndex = std::uint32_t;

/// Set of axiom positions in a KnowledgeBase (file order).
using AxiomSet = SortedSet<AxiomIndex>;

struct Literal {
  AtomId atom = 0;
  bool positive = true;

  Literal negated() const { return {atom, !positive}; }

  friend bool operator==(const Literal&, const Literal&) = default;
  // Atom order first; the positive literal precedes its negation.
  friend auto operator<=>(const Literal& a, const Literal& b) {
    if (auto c = a.atom <=> b.atom; c != 0) return c;
    return b.positive <=> a.positive;
  }
};

}  // namespace rio

template <>
struct std::hash<rio::Literal> {
  std::size_t operator()(const rio::Literal& l) const { return (static_cast<std::size_t>(l.atom) << 1) | (l.positive ? 1U : 0U); }
};

namespace rio {

/// Conjunction of literals (query content, test cases).
using LiteralSet = SortedSet<Literal>;

enum class Construct : std::uint8_t { Negation, Conjunction, Disjunction, Implication, Biconditional };

inline constexpr std::array<Construct, 5> kAllConstructs = {Construct::Negation, Construct::Conjunction,
                                                           Construct::Disjunction, Construct::Implication,
                                                           Construct::Biconditional};
inline constexpr std::size_t kConstructCount = kAllConstructs.size();

std::string_view construct_name(Construct c);

/// n(t) per construct type, indexed by the Construct value.
using ConstructCounts = std::array<int, kConstructCount>;

class Formula {
 public:
  enum class Kind : std::uint8_t { Atom, Not, And, Or, Implies, Iff };

  static Formula atom(std::string name);
  static Formula negation(Formula operand);
  static Formula binary(Kind kind, Formula lhs, Formula rhs);
  static Formula conjunction(Formula lhs, Formula rhs) { return binary(Kind::And, std::move(lhs), std::move(rhs)); }
  static Formula disjunction(Formula lhs, Formula rhs) { return binary(Kind::Or, std::move(lhs), std::move(rhs)); }
  static Formula implication(Formula lhs, Formula rhs) { return binary(Kind::Implies, std::move(lhs), std::move(rhs)); }
  static Formula biconditional(Formula lhs, Formula rhs) { return binary(Kind::Iff, std::move(lhs), std::move(rhs)); }

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return node_->kind == Kind::Atom; }
  /// Atom name; only valid for Kind::Atom.
  const std::string& name() const { return node_->name; }
  /// Sole operand of a negation, left operand of a binary connective.
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }

  /// Number of internal (connective) nodes.
  std::size_t connective_count() const;
  void collect_atoms(std::vector<std::string>& out) const;

  /// Minimal-parenthesis rendering in the KB file syntax.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Axiom {
  std::string id;
  Formula formula;
  /// Overrides the construct-derived fault probability when set.
  std::optional<double> prior;
};

/// Ordered axioms, a background partition and optional coherency atoms.
/// Immutable after construction. The signature is kept sorted by name so that
/// AtomId order is lexicographic name order.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  /// Throws InputError on duplicate ids, unknown background ids, unknown
  /// coherency atoms or priors outside [0, 1].
  KnowledgeBase(std::vector<Axiom> axioms, std::vector<std::string> background_ids,
                std::vector<std::string> coherency_atoms = {});

  std::size_t size() const { return axioms_.size(); }
  bool empty() const { return axioms_.empty(); }
  std::span<const Axiom> axioms() const { return axioms_; }
  const Axiom& axiom(AxiomIndex i) const { return axioms_.at(i); }
  std::optional<AxiomIndex> index_of(std::string_view id) const;
  /// Throws InputError for unknown ids.
  AxiomSet indices_of(std::span<const std::string> ids) const;
  std::vector<std::string> ids_of(const AxiomSet& set) const;

  const std::vector<std::string>& signature() const { return signature_; }
  std::optional<AtomId> atom_id(std::string_view name) const;
  const std::string& atom_name(AtomId id) const { return signature_.at(id); }

  bool is_background(AxiomIndex i) const { return background_.contains(i); }
  const AxiomSet& background() const { return background_; }
  /// O \ B: the axioms a diagnosis may contain.
  const AxiomSet& diagnosable() const { return diagnosable_; }
  const std::vector<AtomId>& coherency_atoms() const { return coherency_; }

  /// Atoms occurring in `f`, as ids of this KB's signature.
  std::vector<AtomId> atoms_of(const Formula& f) const;

  std::string render(const LiteralSet& literals) const;

 private:
  std::vector<Axiom> axioms_;
  std::unordered_map<std::string, AxiomIndex> by_id_;
  std::vector<std::string> signature_;
  std::unordered_map<std::string, AtomId> atom_index_;
  AxiomSet background_;
  AxiomSet diagnosable_;
  std::vector<AtomId> coherency_;
};

/// Fault probability p_t per construct type.
struct FaultModel {
  std::array<double, kConstructCount> construct_priors{};

  static FaultModel uniform(double p);
  double operator[](Construct c) const { return construct_priors[static_cast<std::size_t>(c)]; }
  double& operator[](Construct c) { return construct_priors[static_cast<std::size_t>(c)]; }
  /// Throws InputError unless every entry lies in (0, 1).
  void validate() const;
};

/// Parses the line-oriented KB format. Throws InputError with line/column.
KnowledgeBase parse_kb(std::string_view text);
KnowledgeBase load_kb(const std::string& path);
std::string serialize_kb(const KnowledgeBase& kb);

ConstructCounts count_constructs(const Formula& formula);
inline ConstructCounts count_constructs(const Axiom& axiom) { return count_constructs(axiom.formula); }

/// 1 - prod_t (1 - p_t)^n(t), or the explicit prior when the axiom has one.
double axiom_fault_probability(const Axiom& axiom, const FaultModel& fm);

}  // namespace rio
