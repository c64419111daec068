#include "rio/session.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <stdexcept>

#include "rio/error.hpp"

namespace rio {

using nlohmann::json;

std::string_view stop_mode_name(StopMode m) {
  switch (m) {
    case StopMode::Singleton: return "singleton";
    case StopMode::Threshold: return "threshold";
    case StopMode::Both: return "both";
  }
  return "?";
}

std::optional<StopMode> parse_stop_mode(std::string_view text) {
  if (text == "singleton") return StopMode::Singleton;
  if (text == "threshold") return StopMode::Threshold;
  if (text == "both") return StopMode::Both;
  return std::nullopt;
}

std::string_view answer_name(Answer a) { return a == Answer::Yes ? "yes" : "no"; }

std::optional<Answer> parse_answer(std::string_view text) {
  if (text == "yes" || text == "y") return Answer::Yes;
  if (text == "no" || text == "n") return Answer::No;
  return std::nullopt;
}

// ---------------------------------------------------------------- config

void SessionConfig::validate() const {
  if (n < 2 || n > 16) throw InputError("n must lie in [2, 16]");
  if (!(sigma > 0.0 && sigma <= 100.0)) throw InputError("sigma must lie in (0, 100]");
  cautiousness.validate();
  fault_model.validate();
}

json to_json(const SessionConfig& cfg, const KnowledgeBase& kb) {
  json fm = json::object();
  for (Construct c : kAllConstructs) fm[std::string(construct_name(c))] = cfg.fault_model[c];
  json j{{"strategy", strategy_name(cfg.strategy)},
         {"n", cfg.n},
         {"sigma", cfg.sigma},
         {"c", cfg.cautiousness.c},
         {"c_min", cfg.cautiousness.c_min},
         {"c_max", cfg.cautiousness.c_max},
         {"epsilon", cfg.cautiousness.epsilon},
         {"stop", stop_mode_name(cfg.stop)},
         {"signs", cfg.query.signs == Signs::Both ? "both" : "positive"},
         {"fault_model", fm}};
  if (cfg.query.vocabulary) {
    json v = json::array();
    for (AtomId a : *cfg.query.vocabulary) v.push_back(kb.atom_name(a));
    j["vocabulary"] = v;
  }
  return j;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

SessionConfig session_config_from_json(const json& j, const KnowledgeBase& kb) {
  if (!j.is_object()) throw InputError("session config must be a JSON object");
  SessionConfig cfg;
  if (j.contains("strategy")) {
    const auto s = parse_strategy(get_or<std::string>(j, "strategy", ""));
    if (!s) throw InputError("unknown strategy '" + j["strategy"].dump() + "'");
    cfg.strategy = *s;
  }
  if (j.contains("stop")) {
    const auto m = parse_stop_mode(get_or<std::string>(j, "stop", ""));
    if (!m) throw InputError("unknown stop mode " + j["stop"].dump());
    cfg.stop = *m;
  }
  const long long n = get_or<long long>(j, "n", static_cast<long long>(cfg.n));
  if (n < 0) throw InputError("n must lie in [2, 16]");
  cfg.n = static_cast<std::size_t>(n);
  cfg.sigma = get_or<double>(j, "sigma", cfg.sigma);
  cfg.cautiousness.c = get_or<double>(j, "c", cfg.cautiousness.c);
  cfg.cautiousness.c_min = get_or<double>(j, "c_min", cfg.cautiousness.c_min);
  cfg.cautiousness.c_max = get_or<double>(j, "c_max", cfg.cautiousness.c_max);
  cfg.cautiousness.epsilon = get_or<double>(j, "epsilon", cfg.cautiousness.epsilon);
  const std::string signs = get_or<std::string>(j, "signs", "positive");
  if (signs == "both") {
    cfg.query.signs = Signs::Both;
  } else if (signs != "positive") {
    throw InputError("signs must be 'positive' or 'both'");
  }
  if (j.contains("vocabulary")) {
    std::vector<AtomId> v;
    for (const auto& name : get_or<std::vector<std::string>>(j, "vocabulary", {})) {
      const auto id = kb.atom_id(name);
      if (!id) throw InputError("vocabulary atom '" + name + "' is not in the KB");
      v.push_back(*id);
    }
    cfg.query.vocabulary = std::move(v);
  }
  if (j.contains("fault_model")) {
    const json& fm = j["fault_model"];
    if (fm.is_number()) {
      cfg.fault_model = FaultModel::uniform(fm.get<double>());
    } else if (fm.is_object()) {
      for (Construct c : kAllConstructs) cfg.fault_model[c] = get_or<double>(fm, std::string(construct_name(c)).c_str(), cfg.fault_model[c]);
    } else {
      throw InputError("fault_model must be a number or an object");
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- session

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

Session::Session(Dpi dpi, SessionConfig cfg) : dpi_(std::move(dpi)), cfg_(std::move(cfg)), cp_(cfg_.cautiousness) {
  cfg_.validate();
  const auto t0 = Clock::now();
  axiom_p_ = rio::axiom_probabilities(dpi_.kb(), cfg_.fault_model);
  leading_ = leading_diagnoses(dpi_, axiom_p_, cfg_.n, cfg_.search);
  sort_canonical(leading_);
  std::vector<double> w;
  for (const auto& d : leading_) w.push_back(d.weight);
  beliefs_ = adjust_for_history(w, std::vector<int>(leading_.size(), 0));
  double elapsed = 0.0;
  prepare_round(elapsed);
  debug_ms_ = ms_since(t0);
}

const Query* Session::pending() const {
  if (finished() || rounds_.empty() || rounds_.back().answer) return nullptr;
  return &rounds_.back().query;
}

std::size_t Session::round_number() const { return rounds_.size(); }

std::size_t Session::queries_answered() const {
  return static_cast<std::size_t>(std::count_if(rounds_.begin(), rounds_.end(), [](const Round& r) { return r.answer.has_value(); }));
}

const Diagnosis& Session::best() const { return leading_[argmax(beliefs_)]; }

double Session::best_probability() const { return beliefs_[argmax(beliefs_)]; }

void Session::finish(std::string reason) {
  status_ = SessionStatus::Finished;
  finish_reason_ = std::move(reason);
}

void Session::prepare_round(double& elapsed_ms) {
  const auto t0 = Clock::now();
  if (leading_.size() == 1) {
    finish("single diagnosis");
    return;
  }
  const auto queries = generate_queries(dpi_, leading_, cfg_.query);
  if (queries.empty()) {
    finish("no discriminating query");
    return;
  }
  const std::size_t pick = select_query(cfg_.strategy, queries, beliefs_, cp_.c);
  Round r;
  r.number = rounds_.size() + 1;
  r.query = queries[pick];
  r.leading = leading_;
  r.beliefs = beliefs_;
  r.score_entropy = score_entropy(r.query.partition, beliefs_);
  r.score_split = score_split(r.query.partition);
  r.c_before = cp_.c;
  r.c_after = cp_.c;
  elapsed_ms += ms_since(t0);
  r.react_ms = elapsed_ms;
  rounds_.push_back(std::move(r));
  asked_under_.push_back(dpi_);
  status_ = SessionStatus::AwaitingAnswer;
}

std::vector<int> Session::history_counts() const {
  std::vector<int> z(leading_.size(), 0);
  for (std::size_t k = 0; k < rounds_.size(); ++k) {
    const Round& r = rounds_[k];
    if (!r.answer) continue;
    for (std::size_t i = 0; i < leading_.size(); ++i) {
      const auto known = std::find(r.leading.begin(), r.leading.end(), leading_[i]);
      if (known != r.leading.end()) {
        const std::size_t idx = static_cast<std::size_t>(known - r.leading.begin());
        if (std::count(r.query.partition.dz.begin(), r.query.partition.dz.end(), idx)) ++z[i];
      } else {
        const std::vector<Diagnosis> one{leading_[i]};
        if (!classify(asked_under_[k], r.query.literals, one).dz.empty()) ++z[i];
      }
    }
  }
  return z;
}

void Session::recompute_leading() {
  std::vector<Diagnosis> next;
  for (const Diagnosis& d : leading_) {
    if (is_diagnosis(dpi_, d.axioms)) next.push_back(d);
  }
  for (Diagnosis& d : leading_diagnoses(dpi_, axiom_p_, cfg_.n, cfg_.search)) {
    if (next.size() >= cfg_.n) break;
    if (std::find(next.begin(), next.end(), d) == next.end()) next.push_back(std::move(d));
  }
  sort_canonical(next);
  leading_ = std::move(next);
  std::vector<double> w;
  for (const auto& d : leading_) w.push_back(d.weight);
  beliefs_ = adjust_for_history(w, history_counts());
}

void Session::submit(Answer a) {
  if (finished() || pending() == nullptr) throw std::logic_error("session is not awaiting an answer");
  const auto t0 = Clock::now();
  Round& r = rounds_.back();
  r.answer = a;
  const Partition& p = r.query.partition;
  const std::size_t before = leading_.size();
  const double e = elimination_rate(p, a);

  dpi_ = a == Answer::Yes ? dpi_.with_positive(r.query.literals) : dpi_.with_negative(r.query.literals);

  const auto post = posterior_update(beliefs_, p, a);
  const auto& rejected = a == Answer::Yes ? p.dnx : p.dx;
  std::vector<Diagnosis> kept;
  std::vector<double> kept_p;
  for (std::size_t i = 0; i < leading_.size(); ++i) {
    if (std::find(rejected.begin(), rejected.end(), i) != rejected.end()) {
      r.eliminated.push_back(leading_[i].axioms);
    } else {
      kept.push_back(leading_[i]);
      kept_p.push_back(post[i]);
    }
  }
  leading_ = std::move(kept);
  beliefs_ = std::move(kept_p);
  if (cfg_.strategy == Strategy::Rio) cp_ = update_cautiousness(cp_, p, a, before);
  r.c_after = cp_.c;

  const bool threshold_mode = cfg_.stop != StopMode::Singleton;
  const bool singleton_mode = cfg_.stop != StopMode::Threshold;
  double elapsed = 0.0;
  if (threshold_mode && (above_threshold(beliefs_, cfg_.sigma) || e == 0.0)) {
    finish(e == 0.0 ? "nothing eliminated" : "above threshold");
  } else {
    const auto t1 = Clock::now();
    recompute_leading();
    elapsed = ms_since(t1);
    if (singleton_mode && leading_.size() == 1) {
      finish("single diagnosis");
    } else {
      prepare_round(elapsed);
    }
  }
  debug_ms_ += ms_since(t0);
}

// ---------------------------------------------------------------- oracles

Answer simulated_oracle_answer(const Dpi& dpi, const AxiomSet& target, const LiteralSet& query) {
  return dpi.reasoner().entails(dpi.theory_without(target), query) ? Answer::Yes : Answer::No;
}

SimulatedOracle::SimulatedOracle(const Dpi& dpi, AxiomSet target) : target_(std::move(target)) {
  if (!target_.is_subset_of(dpi.candidates())) throw InputError("target contains background or unknown axioms");
  if (!is_diagnosis(dpi, target_)) throw InputError("target is not a diagnosis of the instance");
}

Answer SimulatedOracle::answer(const Session& s, const Query& q) { return simulated_oracle_answer(s.dpi(), target_, q.literals); }

void SimulatedOracle::check(const Session& s) const {
  if (!is_diagnosis(s.dpi(), target_)) throw std::logic_error("simulated oracle's target was eliminated");
}

Answer InteractiveOracle::answer(const Session& s, const Query& q) {
  for (;;) {
    out_ << "Round " << s.round_number() << ": does the intended KB entail " << s.dpi().kb().render(q.literals)
         << "? [yes/no] " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw InputError("input ended before the session finished");
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    while (!line.empty() && line.front() == ' ') line.erase(0, 1);
    if (auto a = parse_answer(line)) return *a;
    out_ << "please answer yes or no\n";
  }
}

void run_to_completion(Session& s, Oracle& oracle) {
  while (const Query* q = s.pending()) {
    const Query copy = *q;
    s.submit(oracle.answer(s, copy));
    oracle.check(s);
  }
}

// ---------------------------------------------------------------- transcript

json literals_json(const KnowledgeBase& kb, const LiteralSet& l) {
  json out = json::array();
  for (const Literal& x : l) out.push_back((x.positive ? "" : "!") + kb.atom_name(x.atom));
  return out;
}

namespace {

json ids_json(const KnowledgeBase& kb, const AxiomSet& s) { return kb.ids_of(s); }

json side_json(const KnowledgeBase& kb, const std::vector<Diagnosis>& leading, const std::vector<std::size_t>& side) {
  json out = json::array();
  for (std::size_t i : side) out.push_back(ids_json(kb, leading[i].axioms));
  return out;
}

}  // namespace

json transcript(const Session& s, const TranscriptOptions& opts) {
  const KnowledgeBase& kb = s.dpi().kb();
  json rounds = json::array();
  double react_total = 0.0;
  for (const Round& r : s.rounds()) {
    json leading = json::array();
    for (std::size_t i = 0; i < r.leading.size(); ++i) {
      leading.push_back({{"axioms", ids_json(kb, r.leading[i].axioms)}, {"probability", r.beliefs[i]}});
    }
    json eliminated = json::array();
    for (const auto& d : r.eliminated) eliminated.push_back(ids_json(kb, d));
    json row{{"round", r.number},
             {"query_literals", literals_json(kb, r.query.literals)},
             {"partition",
              {{"dx", side_json(kb, r.leading, r.query.partition.dx)},
               {"dnx", side_json(kb, r.leading, r.query.partition.dnx)},
               {"dz", side_json(kb, r.leading, r.query.partition.dz)}}},
             {"scores",
              {{"entropy", r.score_entropy},
               {"split", r.score_split},
               {"cautiousness", query_cautiousness(r.query.partition)}}},
             {"leading", leading},
             {"answer", r.answer ? json(answer_name(*r.answer)) : json(nullptr)},
             {"c_before", r.c_before},
             {"c_after", r.c_after},
             {"eliminated", eliminated}};
    if (opts.timing) row["react_ms"] = r.react_ms;
    react_total += r.react_ms;
    rounds.push_back(std::move(row));
  }
  json result = nullptr;
  if (s.finished()) {
    result = {{"diagnosis", ids_json(kb, s.best().axioms)},
              {"probability", s.best_probability()},
              {"reason", s.finish_reason()}};
  }
  json metrics{{"queries", s.queries_answered()}};
  if (opts.timing) {
    metrics["debug_ms"] = s.debug_ms();
    metrics["react_ms_mean"] = s.rounds().empty() ? 0.0 : react_total / static_cast<double>(s.rounds().size());
  }
  return json{{"config", to_json(s.config(), kb)},
              {"kb", serialize_kb(kb)},
              {"status", s.finished() ? "finished" : "awaiting-answer"},
              {"rounds", rounds},
              {"result", result},
              {"metrics", metrics}};
}

std::vector<Answer> recorded_answers(const json& t) {
  std::vector<Answer> out;
  if (!t.contains("rounds") || !t["rounds"].is_array()) throw InputError("transcript has no rounds array");
  for (const auto& r : t["rounds"]) {
    if (!r.contains("answer") || r["answer"].is_null()) break;
    const auto a = parse_answer(r["answer"].get<std::string>());
    if (!a) throw InputError("transcript answer must be yes or no");
    out.push_back(*a);
  }
  return out;
}

Session replay(const Dpi& dpi, const SessionConfig& cfg, const std::vector<Answer>& answers) {
  Session s(dpi, cfg);
  for (Answer a : answers) {
    if (s.finished()) break;
    s.submit(a);
  }
  return s;
}

}  // namespace rio
