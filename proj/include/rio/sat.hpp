#pragma once

// Incremental CNF satisfiability: backtracking search with two-watched-literal
// unit propagation, first-UIP clause learning and solving under assumptions.

#include <cstdint>
#include <span>
#include <vector>

namespace rio::sat {

using Var = std::uint32_t;

class Lit {
 public:
  constexpr Lit() = default;
  static constexpr Lit make(Var v, bool negated = false) { return Lit((v << 1) | (negated ? 1U : 0U)); }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negated() const { return (code_ & 1U) != 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Lit operator~() const { return Lit(code_ ^ 1U); }

  friend constexpr bool operator==(Lit, Lit) = default;

 private:
  constexpr explicit Lit(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

struct SolverStats {
  std::uint64_t solves = 0;
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
};

class Solver {
 public:
  Var new_var();
  std::size_t num_vars() const { return values_.size(); }

  /// Adds a permanent clause. Returns false once the clause database is
  /// unsatisfiable on its own.
  bool add_clause(std::span<const Lit> clause);
  bool add_clause(std::initializer_list<Lit> clause) { return add_clause(std::span<const Lit>(clause.begin(), clause.size())); }

  /// Decides satisfiability of the database under `assumptions`. Throws
  /// ResourceLimitError when more than `conflict_budget` conflicts occur.
  bool solve(std::span<const Lit> assumptions = {}, std::uint64_t conflict_budget = 10'000'000);

  /// Value of `v` in the model found by the last successful solve.
  bool model_value(Var v) const { return model_[v] == kTrue; }

  const SolverStats& stats() const { return stats_; }

 private:
  static constexpr std::uint8_t kFalse = 0;
  static constexpr std::uint8_t kTrue = 1;
  static constexpr std::uint8_t kUndef = 2;
  static constexpr std::int32_t kNoReason = -1;

  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
  };

  std::uint8_t value(Lit l) const {
    const std::uint8_t v = values_[l.var()];
    if (v == kUndef) return kUndef;
    return static_cast<std::uint8_t>(v ^ static_cast<std::uint8_t>(l.negated()));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, std::int32_t reason);
  std::int32_t propagate();
  void analyze(std::int32_t conflict, std::vector<Lit>& learnt, int& backjump_level);
  void cancel_until(int level);
  void attach(std::int32_t clause_index);
  void bump(Var v);
  Lit pick_branch() const;
  void drop_learnts();

  std::vector<Clause> clauses_;
  std::vector<std::vector<std::int32_t>> watches_;  // by literal code
  std::vector<std::uint8_t> values_;
  std::vector<std::uint8_t> phase_;
  std::vector<int> levels_;
  std::vector<std::int32_t> reasons_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::size_t learnt_count_ = 0;
  double bump_increment_ = 1.0;
  bool ok_ = true;
  std::vector<std::uint8_t> model_;
  SolverStats stats_;
};

}  // namespace rio::sat
