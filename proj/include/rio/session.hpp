#pragma once

// The interactive debugging loop: leading diagnoses, beliefs, query selection,
// answers turned into test cases, stop rules, and a JSON transcript.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rio/diagnosis.hpp"
#include "rio/query.hpp"
#include "rio/strategy.hpp"

namespace rio {

enum class StopMode { Singleton, Threshold, Both };

std::string_view stop_mode_name(StopMode m);
std::optional<StopMode> parse_stop_mode(std::string_view text);
std::string_view answer_name(Answer a);
std::optional<Answer> parse_answer(std::string_view text);

struct SessionConfig {
  Strategy strategy = Strategy::Rio;
  std::size_t n = 9;
  double sigma = 85.0;
  CautiousnessParams cautiousness{};
  StopMode stop = StopMode::Threshold;
  QueryOptions query{};
  /// Used for axioms without an explicit prior.
  FaultModel fault_model = FaultModel::uniform(0.01);
  SearchLimits search{};

  /// Throws InputError: n in [2, 16], sigma in (0, 100], valid cautiousness and fault model.
  void validate() const;
};

nlohmann::json to_json(const SessionConfig& cfg, const KnowledgeBase& kb);
/// Reads the keys written by to_json; missing keys keep their defaults.
SessionConfig session_config_from_json(const nlohmann::json& j, const KnowledgeBase& kb);

struct Round {
  std::size_t number = 0;  // 1-based
  Query query;
  std::vector<Diagnosis> leading;  // canonical order, as partitioned
  std::vector<double> beliefs;     // before the answer
  double score_entropy = 0.0;
  int score_split = 0;
  double c_before = 0.0;
  double c_after = 0.0;
  std::optional<Answer> answer;
  std::vector<AxiomSet> eliminated;
  double react_ms = 0.0;
};

enum class SessionStatus { AwaitingAnswer, Finished };

class Session {
 public:
  /// Computes the leading diagnoses and the first query. Throws
  /// NoDiagnosisError when the instance is not faulty.
  Session(Dpi dpi, SessionConfig cfg);

  SessionStatus status() const { return status_; }
  bool finished() const { return status_ == SessionStatus::Finished; }
  const SessionConfig& config() const { return cfg_; }
  const Dpi& dpi() const { return dpi_; }

  /// The query awaiting an answer, if any.
  const Query* pending() const;
  /// Number of the pending round, or of the last answered round once finished.
  std::size_t round_number() const;
  const std::vector<Round>& rounds() const { return rounds_; }
  std::size_t queries_answered() const;

  const std::vector<Diagnosis>& leading() const { return leading_; }
  const std::vector<double>& beliefs() const { return beliefs_; }
  const CautiousnessParams& cautiousness() const { return cp_; }
  const std::vector<double>& axiom_probabilities() const { return axiom_p_; }

  /// Throws std::logic_error when the session is finished.
  void submit(Answer a);

  /// Most probable current diagnosis; the final result once finished.
  const Diagnosis& best() const;
  double best_probability() const;
  const std::string& finish_reason() const { return finish_reason_; }

  double debug_ms() const { return debug_ms_; }

 private:
  void prepare_round(double& elapsed_ms);
  void recompute_leading();
  void finish(std::string reason);
  std::vector<int> history_counts() const;

  Dpi dpi_;
  SessionConfig cfg_;
  std::vector<double> axiom_p_;
  std::vector<Diagnosis> leading_;
  std::vector<double> beliefs_;
  CautiousnessParams cp_;
  SessionStatus status_ = SessionStatus::AwaitingAnswer;
  std::vector<Round> rounds_;
  std::vector<Dpi> asked_under_;  // DPI in effect when each round was asked
  std::string finish_reason_;
  double debug_ms_ = 0.0;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Answer answer(const Session& s, const Query& q) = 0;
  /// Called after each answer; throws when the oracle's own invariants break.
  virtual void check(const Session&) const {}
};

/// yes iff (O \ target) + B + union(Tp) entails the query.
Answer simulated_oracle_answer(const Dpi& dpi, const AxiomSet& target, const LiteralSet& query);

class SimulatedOracle : public Oracle {
 public:
  /// Throws InputError unless `target` is a diagnosis of `dpi`.
  SimulatedOracle(const Dpi& dpi, AxiomSet target);
  Answer answer(const Session& s, const Query& q) override;
  void check(const Session& s) const override;
  const AxiomSet& target() const { return target_; }

 private:
  AxiomSet target_;
};

/// Prints each query to `out` and reads yes/no from `in`.
class InteractiveOracle : public Oracle {
 public:
  InteractiveOracle(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  Answer answer(const Session& s, const Query& q) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

void run_to_completion(Session& s, Oracle& oracle);

struct TranscriptOptions {
  /// Timing fields are left out so identical runs serialize identically.
  bool timing = true;
};

nlohmann::json transcript(const Session& s, const TranscriptOptions& opts = {});

/// Atom names, negative literals prefixed with "!".
nlohmann::json literals_json(const KnowledgeBase& kb, const LiteralSet& literals);

/// Answers recorded in a transcript, in round order.
std::vector<Answer> recorded_answers(const nlohmann::json& transcript);

/// A fresh session driven through `answers`; stops early if it finishes.
Session replay(const Dpi& dpi, const SessionConfig& cfg, const std::vector<Answer>& answers);

}  // namespace rio
