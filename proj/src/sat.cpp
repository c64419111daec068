#include "rio/sat.hpp"

#include <algorithm>

#include "rio/error.hpp"

namespace rio::sat {

namespace {
constexpr std::size_t kLearntLimit = 20000;
constexpr double kActivityDecay = 0.95;
}  // namespace

Var Solver::new_var() {
  const Var v = static_cast<Var>(values_.size());
  values_.push_back(kUndef);
  phase_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(kNoReason);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  return v;
}

void Solver::enqueue(Lit l, std::int32_t reason) {
  values_[l.var()] = l.negated() ? kFalse : kTrue;
  levels_[l.var()] = decision_level();
  reasons_[l.var()] = reason;
  trail_.push_back(l);
}

void Solver::attach(std::int32_t ci) {
  const Clause& c = clauses_[static_cast<std::size_t>(ci)];
  watches_[c.lits[0].code()].push_back(ci);
  watches_[c.lits[1].code()].push_back(ci);
}

bool Solver::add_clause(std::span<const Lit> clause) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits(clause.begin(), clause.end());
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.code() < b.code(); });
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return true;  // tautology
    const std::uint8_t v = value(lits[i]);
    if (v == kTrue) return true;
    if (v == kUndef) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  clauses_.push_back({std::move(kept), false});
  attach(static_cast<std::int32_t>(clauses_.size() - 1));
  return true;
}

std::int32_t Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    std::vector<std::int32_t>& ws = watches_[false_lit.code()];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::int32_t ci = ws[i];
      Clause& c = clauses_[static_cast<std::size_t>(ci)];
      ++stats_.propagations;
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      if (value(c.lits[0]) == kTrue) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != kFalse) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[c.lits[1].code()].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = ci;
      if (value(c.lits[0]) == kFalse) {
        for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c.lits[0], ci);
    }
    ws.resize(keep);
  }
  return kNoReason;
}

void Solver::bump(Var v) {
  activity_[v] += bump_increment_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    bump_increment_ *= 1e-100;
  }
}

void Solver::analyze(std::int32_t conflict, std::vector<Lit>& learnt, int& backjump_level) {
  learnt.assign(1, Lit());
  int pending = 0;
  Lit p;
  bool have_p = false;
  std::size_t index = trail_.size();
  std::int32_t reason = conflict;
  do {
    const Clause& c = clauses_[static_cast<std::size_t>(reason)];
    for (std::size_t j = have_p ? 1 : 0; j < c.lits.size(); ++j) {
      const Lit q = c.lits[j];
      const Var v = q.var();
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (levels_[v] >= decision_level()) {
        ++pending;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      p = trail_[--index];
    } while (!seen_[p.var()]);
    have_p = true;
    reason = reasons_[p.var()];
    seen_[p.var()] = 0;
    --pending;
    // The reason clause of p has p as its first literal.
    if (pending > 0 && reason != kNoReason) {
      Clause& rc = clauses_[static_cast<std::size_t>(reason)];
      if (!(rc.lits[0] == p)) {
        auto it = std::find(rc.lits.begin(), rc.lits.end(), p);
        std::iter_swap(rc.lits.begin(), it);
      }
    }
  } while (pending > 0);
  learnt[0] = ~p;

  backjump_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (levels_[learnt[i].var()] > levels_[learnt[max_i].var()]) max_i = i;
    }
    std::swap(learnt[1], learnt[max_i]);
    backjump_level = levels_[learnt[1].var()];
  }
  for (const Lit l : learnt) seen_[l.var()] = 0;
  bump_increment_ /= kActivityDecay;
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i > trail_lim_[static_cast<std::size_t>(level)]; --i) {
    const Var v = trail_[i - 1].var();
    phase_[v] = values_[v];
    values_[v] = kUndef;
    reasons_[v] = kNoReason;
  }
  trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() const {
  Var best = 0;
  double best_activity = -1.0;
  bool found = false;
  for (Var v = 0; v < values_.size(); ++v) {
    if (values_[v] == kUndef && activity_[v] > best_activity) {
      best = v;
      best_activity = activity_[v];
      found = true;
    }
  }
  if (!found) return Lit::make(0);
  return Lit::make(best, phase_[best] != kTrue);
}

void Solver::drop_learnts() {
  cancel_until(0);
  std::vector<Clause> kept;
  kept.reserve(clauses_.size() - learnt_count_);
  for (Clause& c : clauses_) {
    if (!c.learnt) kept.push_back(std::move(c));
  }
  clauses_ = std::move(kept);
  for (auto& w : watches_) w.clear();
  for (std::int32_t r = 0; r < static_cast<std::int32_t>(reasons_.size()); ++r) reasons_[static_cast<std::size_t>(r)] = kNoReason;
  for (std::size_t i = 0; i < clauses_.size(); ++i) attach(static_cast<std::int32_t>(i));
  learnt_count_ = 0;
}

bool Solver::solve(std::span<const Lit> assumptions, std::uint64_t conflict_budget) {
  ++stats_.solves;
  if (!ok_) return false;
  if (learnt_count_ > kLearntLimit) drop_learnts();
  cancel_until(0);
  if (propagate() != kNoReason) {
    ok_ = false;
    return false;
  }

  std::uint64_t conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const std::int32_t conflict = propagate();
    if (conflict != kNoReason) {
      ++stats_.conflicts;
      if (++conflicts > conflict_budget) {
        cancel_until(0);
        throw ResourceLimitError("satisfiability search exceeded its conflict budget");
      }
      if (decision_level() == 0) {
        ok_ = false;
        return false;
      }
      int backjump = 0;
      analyze(conflict, learnt, backjump);
      cancel_until(backjump);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        clauses_.push_back({learnt, true});
        ++learnt_count_;
        const auto ci = static_cast<std::int32_t>(clauses_.size() - 1);
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }

    Lit next;
    bool have_next = false;
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      const std::uint8_t v = value(a);
      if (v == kTrue) {
        trail_lim_.push_back(trail_.size());
      } else if (v == kFalse) {
        cancel_until(0);
        return false;
      } else {
        next = a;
        have_next = true;
        break;
      }
    }
    if (!have_next) {
      if (trail_.size() == values_.size()) {
        model_ = values_;
        cancel_until(0);
        return true;
      }
      next = pick_branch();
      ++stats_.decisions;
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

}  // namespace rio::sat
