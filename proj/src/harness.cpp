#include "rio/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "rio/error.hpp"
#include "rio/generators.hpp"

namespace rio {

using nlohmann::json;

// ---------------------------------------------------------------- alignment CSV

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<Relation> parse_relation(std::string_view r) {
  if (r == "<") return Relation::Subsumed;
  if (r == ">") return Relation::Subsumes;
  if (r == "=") return Relation::Equivalent;
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Alignment parse_alignment_csv(std::string_view text) {
  Alignment out;
  std::size_t line_no = 0;
  bool first_data = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto f = split_fields(line);
    const bool header = first_data && std::find(f.begin(), f.end(), "relation") != f.end();
    first_data = false;
    if (header) continue;
    Correspondence c;
    if (f.size() == 5) {
      c.id = f[0];
      f.erase(f.begin());
    } else if (f.size() != 4) {
      throw InputError("expected left,right,relation,confidence", line_no, 1);
    }
    c.left = f[0];
    c.right = f[1];
    if (c.left.empty() || c.right.empty()) throw InputError("empty correspondence endpoint", line_no, 1);
    const auto rel = parse_relation(f[2]);
    if (!rel) throw InputError("relation must be one of < > =, got '" + f[2] + "'", line_no, 1);
    c.relation = *rel;
    try {
      std::size_t used = 0;
      c.confidence = std::stod(f[3], &used);
      if (used != f[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw InputError("confidence '" + f[3] + "' is not a number", line_no, 1);
    }
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
      throw InputError("confidence must lie in [0, 1]", line_no, 1);
    }
    if (c.id.empty()) c.id = "m" + std::to_string(out.correspondences.size() + 1);
    out.correspondences.push_back(std::move(c));
  }
  return out;
}

Alignment load_alignment(const std::string& path) {
  try {
    return parse_alignment_csv(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- aligned KB

AlignedKb build_aligned_kb(const KnowledgeBase& kb1, const KnowledgeBase& kb2, const Alignment& alignment,
                           const AlignOptions& opts) {
  std::vector<Axiom> axioms;
  std::vector<std::string> background;
  std::vector<std::string> coherent;
  for (const KnowledgeBase* kb : {&kb1, &kb2}) {
    for (std::size_t i = 0; i < kb->size(); ++i) {
      Axiom ax = kb->axiom(static_cast<AxiomIndex>(i));
      if (!ax.prior && !kb->is_background(static_cast<AxiomIndex>(i))) ax.prior = opts.kb_prior;
      if (opts.kbs_in_background || kb->is_background(static_cast<AxiomIndex>(i))) background.push_back(ax.id);
      axioms.push_back(std::move(ax));
    }
    for (AtomId a : kb->coherency_atoms()) coherent.push_back(kb->atom_name(a));
  }
  const std::size_t first_mapping = axioms.size();
  for (const Correspondence& c : alignment.correspondences) {
    if (!kb1.atom_id(c.left)) throw InputError("correspondence " + c.id + ": '" + c.left + "' is not in the first KB");
    if (!kb2.atom_id(c.right)) throw InputError("correspondence " + c.id + ": '" + c.right + "' is not in the second KB");
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
      throw InputError("correspondence " + c.id + ": confidence must lie in [0, 1]");
    }
    Formula l = Formula::atom(c.left);
    Formula r = Formula::atom(c.right);
    Formula f = c.relation == Relation::Subsumed   ? Formula::implication(l, r)
                : c.relation == Relation::Subsumes ? Formula::implication(r, l)
                                                   : Formula::biconditional(l, r);
    axioms.push_back({c.id, std::move(f), 1.0 - c.confidence});
  }
  std::sort(coherent.begin(), coherent.end());
  coherent.erase(std::unique(coherent.begin(), coherent.end()), coherent.end());

  AlignedKb out;
  out.kb = std::make_shared<const KnowledgeBase>(std::move(axioms), std::move(background), std::move(coherent));
  std::vector<AxiomIndex> m;
  for (std::size_t i = first_mapping; i < out.kb->size(); ++i) m.push_back(static_cast<AxiomIndex>(i));
  out.alignment = AxiomSet(std::move(m));
  return out;
}

AxiomSet alignment_axioms(const AlignedKb& aligned, const Alignment& alignment, const Alignment& subset) {
  std::vector<AxiomIndex> out;
  for (const Correspondence& s : subset.correspondences) {
    auto it = std::find_if(alignment.correspondences.begin(), alignment.correspondences.end(), [&](const Correspondence& c) {
      return c.left == s.left && c.right == s.right && c.relation == s.relation;
    });
    if (it == alignment.correspondences.end()) {
      throw InputError("reference correspondence " + s.left + "," + s.right + " is not in the alignment");
    }
    out.push_back(aligned.alignment.items()[static_cast<std::size_t>(it - alignment.correspondences.begin())]);
  }
  return AxiomSet(std::move(out));
}

// ---------------------------------------------------------------- targets

namespace {

// Lexicographic comparison of sorted id lists.
bool ids_less(const KnowledgeBase& kb, const AxiomSet& a, const AxiomSet& b) {
  auto ia = kb.ids_of(a);
  auto ib = kb.ids_of(b);
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  return ia < ib;
}

}  // namespace

AxiomSet fix_target_diagnosis(const Dpi& dpi, const AxiomSet& pool, std::size_t search_width) {
  const KnowledgeBase& kb = dpi.kb();
  const AxiomSet usable = pool & dpi.candidates();
  if (usable.empty()) throw NoDiagnosisError("no candidate axioms outside the reference alignment");

  // Minimal diagnoses inside the pool are exactly the minimal diagnoses of the
  // instance whose other axioms are moved into the background.
  std::vector<std::string> background = kb.ids_of(kb.background() | (dpi.candidates() - usable));
  std::vector<Axiom> axioms(kb.axioms().begin(), kb.axioms().end());
  std::vector<std::string> coherent;
  for (AtomId a : kb.coherency_atoms()) coherent.push_back(kb.atom_name(a));
  auto restricted_kb = std::make_shared<const KnowledgeBase>(std::move(axioms), std::move(background), std::move(coherent));
  Dpi restricted(std::make_shared<const Reasoner>(restricted_kb), dpi.requirements(), dpi.positive_cases(),
                 dpi.negative_cases());

  // Equal priors below 1/2 make the best-first order ascending in cardinality.
  const std::vector<double> p(kb.size(), 0.1);
  std::vector<Diagnosis> found;
  try {
    found = leading_diagnoses(restricted, p, search_width);
  } catch (const NoDiagnosisError&) {
    throw NoDiagnosisError("no diagnosis lies within the non-reference alignment axioms");
  }
  const std::size_t k = found.front().axioms.size();
  AxiomSet best = found.front().axioms;
  for (const Diagnosis& d : found) {
    if (d.axioms.size() == k && ids_less(kb, d.axioms, best)) best = d.axioms;
  }
  return best;
}

AxiomSet max_nonalignment_target(const Dpi& dpi, std::span<const double> axiom_p, const AxiomSet& alignment,
                                 std::size_t n) {
  const auto found = leading_diagnoses(dpi, axiom_p, n);
  const Diagnosis* best = nullptr;
  std::size_t best_count = 0;
  for (const Diagnosis& d : found) {
    const std::size_t count = (d.axioms - alignment).size();
    if (best == nullptr || count > best_count || (count == best_count && ids_less(dpi.kb(), d.axioms, best->axioms))) {
      best = &d;
      best_count = count;
    }
  }
  return best->axioms;
}

// ---------------------------------------------------------------- benchmark

namespace {

struct Instance {
  std::string label;
  std::shared_ptr<const KnowledgeBase> kb;
  std::vector<std::string> target;
  json session;
  std::string error;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string need_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw InputError(std::string("instance needs a string '") + key + "'");
  return j[key].get<std::string>();
}

std::uint64_t need_seed(const json& j) {
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) throw InputError("generated instance needs a non-negative 'seed'");
  return j["seed"].get<std::uint64_t>();
}

json merged_session(const json& shared, const json& inst) {
  json s = shared;
  if (inst.contains("session")) {
    if (!inst["session"].is_object()) throw InputError("instance 'session' must be an object");
    s.merge_patch(inst["session"]);
  }
  return s;
}

std::vector<std::string> random_target(const std::shared_ptr<const KnowledgeBase>& kb, std::uint64_t seed) {
  const Dpi dpi = Dpi::from_kb(kb);
  const auto p = axiom_probabilities(*kb, FaultModel::uniform(0.01));
  auto all = leading_diagnoses(dpi, p, 4096);
  sort_canonical(all);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return kb->ids_of(all[rng() % all.size()].axioms);
}

// Expands one config entry into instances. Errors while building an instance
// are kept on the instance so that the run continues.
void expand(const json& entry, const json& shared_session, const std::filesystem::path& base, std::vector<Instance>& out) {
  if (!entry.is_object()) throw InputError("each instance must be a JSON object");
  const std::string label = need_string(entry, "label");
  const json session = merged_session(shared_session, entry);

  if (entry.contains("generator")) {
    const std::string gen = need_string(entry, "generator");
    const std::uint64_t seed = need_seed(entry);
    const long long count = entry.value("count", 1LL);
    if (count < 1) throw InputError("instance '" + label + "': count must be positive");
    if (gen != "chain_clash" && gen != "random_small") throw InputError("unknown generator '" + gen + "'");
    for (long long i = 0; i < count; ++i) {
      Instance inst;
      inst.label = count == 1 ? label : label + "-" + std::to_string(i + 1);
      inst.session = session;
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      try {
        if (gen == "chain_clash") {
          ChainClashOptions o;
          o.axioms = entry.value("axioms", o.axioms);
          o.target_size = entry.value("target_size", o.target_size);
          o.chains = entry.value("chains", o.chains);
          auto planted = chain_clash_kb(s, o);
          inst.kb = std::make_shared<const KnowledgeBase>(std::move(planted.kb));
          inst.target = std::move(planted.target);
        } else {
          inst.kb = std::make_shared<const KnowledgeBase>(random_small_kb(s));
          inst.target = random_target(inst.kb, s);
        }
      } catch (const Error& e) {
        inst.error = e.what();
      }
      out.push_back(std::move(inst));
    }
    return;
  }

  Instance inst;
  inst.label = label;
  inst.session = session;
  try {
    if (entry.contains("kb")) {
      inst.kb = std::make_shared<const KnowledgeBase>(load_kb(resolve(base, need_string(entry, "kb")).string()));
      if (!entry.contains("target") || !entry["target"].is_array()) throw InputError("instance '" + label + "' needs a target id list");
      inst.target = entry["target"].get<std::vector<std::string>>();
      inst.kb->indices_of(inst.target);
    } else if (entry.contains("kb1")) {
      const KnowledgeBase kb1 = load_kb(resolve(base, need_string(entry, "kb1")).string());
      const KnowledgeBase kb2 = load_kb(resolve(base, need_string(entry, "kb2")).string());
      const Alignment m = load_alignment(resolve(base, need_string(entry, "mapping")).string());
      AlignOptions ao;
      ao.kbs_in_background = entry.value("kbs_in_background", false);
      const AlignedKb aligned = build_aligned_kb(kb1, kb2, m, ao);
      inst.kb = aligned.kb;
      const Dpi dpi = Dpi::from_kb(inst.kb);
      const json policy = entry.value("target_policy", json("reference"));
      if (policy.is_array()) {
        inst.target = policy.get<std::vector<std::string>>();
        inst.kb->indices_of(inst.target);
      } else if (policy == "reference") {
        const Alignment r = entry.contains("reference")
                                ? load_alignment(resolve(base, need_string(entry, "reference")).string())
                                : Alignment{};
        inst.target = inst.kb->ids_of(fix_target_diagnosis(dpi, aligned.alignment - alignment_axioms(aligned, m, r)));
      } else if (policy == "max-nonalignment") {
        const SessionConfig cfg = session_config_from_json(session, *inst.kb);
        const auto p = axiom_probabilities(*inst.kb, cfg.fault_model);
        inst.target = inst.kb->ids_of(max_nonalignment_target(dpi, p, aligned.alignment, cfg.n));
      } else {
        throw InputError("unknown target_policy " + policy.dump());
      }
    } else {
      throw InputError("instance '" + label + "' needs 'kb', 'kb1'/'kb2' or 'generator'");
    }
  } catch (const NoDiagnosisError& e) {
    inst.error = e.what();
  } catch (const ResourceLimitError& e) {
    inst.error = e.what();
  }
  out.push_back(std::move(inst));
}

BenchmarkRow run_one(const Instance& inst, Strategy strategy) {
  BenchmarkRow row;
  row.instance = inst.label;
  row.strategy = std::string(strategy_name(strategy));
  row.target = inst.target;
  if (!inst.error.empty()) {
    row.error = inst.error;
    return row;
  }
  try {
    SessionConfig cfg = session_config_from_json(inst.session, *inst.kb);
    cfg.strategy = strategy;
    const Dpi dpi = Dpi::from_kb(inst.kb);
    SimulatedOracle oracle(dpi, inst.kb->indices_of(inst.target));
    Session s(dpi, cfg);
    run_to_completion(s, oracle);
    row.queries = s.queries_answered();
    row.debug_ms = s.debug_ms();
    double react = 0.0;
    for (const Round& r : s.rounds()) react += r.react_ms;
    row.react_ms = s.rounds().empty() ? 0.0 : react / static_cast<double>(s.rounds().size());
    row.result = inst.kb->ids_of(s.best().axioms);
    row.target_found = s.best().axioms == oracle.target();
  } catch (const Error& e) {
    row.error = e.what();
  } catch (const std::logic_error& e) {
    row.error = std::string("internal: ") + e.what();
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ' ';
    out += id;
  }
  return out;
}

std::string fmt(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

}  // namespace

BenchmarkReport run_benchmark(const json& config, const std::filesystem::path& base_dir,
                              std::optional<BenchmarkOptions> overrides) {
  if (!config.is_object()) throw InputError("benchmark config must be a JSON object");
  BenchmarkOptions opts;
  if (config.contains("workers")) {
    if (!config["workers"].is_number_unsigned() || config["workers"].get<std::size_t>() == 0) {
      throw InputError("workers must be a positive integer");
    }
    opts.workers = config["workers"].get<std::size_t>();
  }
  opts.timing = config.value("timing", true);
  if (overrides) opts = *overrides;
  opts.workers = std::max<std::size_t>(opts.workers, 1);

  std::vector<Strategy> strategies;
  for (const auto& name : config.value("strategies", std::vector<std::string>{"split", "entropy", "rio"})) {
    const auto s = parse_strategy(name);
    if (!s) throw InputError("unknown strategy '" + name + "'");
    strategies.push_back(*s);
  }
  if (strategies.empty()) throw InputError("no strategies configured");
  const json shared = config.value("session", json::object());
  if (!shared.is_object()) throw InputError("'session' must be an object");
  if (!config.contains("instances") || !config["instances"].is_array()) throw InputError("config needs an 'instances' array");

  std::vector<Instance> instances;
  for (const json& entry : config["instances"]) expand(entry, shared, base_dir, instances);
  // Config errors surface before any work is done.
  for (const Instance& inst : instances) {
    if (inst.kb) session_config_from_json(inst.session, *inst.kb);
  }

  BenchmarkReport report;
  report.rows.resize(instances.size() * strategies.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < report.rows.size(); job = next++) {
      report.rows[job] = run_one(instances[job / strategies.size()], strategies[job % strategies.size()]);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t threads = std::min(opts.workers, report.rows.size());
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (Strategy st : strategies) {
    StrategySummary sum;
    sum.strategy = std::string(strategy_name(st));
    for (const BenchmarkRow& r : report.rows) {
      if (r.strategy != sum.strategy || !r.error.empty()) continue;
      ++sum.runs;
      sum.mean_queries += static_cast<double>(r.queries);
      sum.mean_debug_ms += r.debug_ms;
      sum.mean_react_ms += r.react_ms;
    }
    if (sum.runs > 0) {
      const auto k = static_cast<double>(sum.runs);
      sum.mean_queries /= k;
      sum.mean_debug_ms /= k;
      sum.mean_react_ms /= k;
    }
    report.summary.push_back(sum);
  }

  const auto rio = std::find(strategies.begin(), strategies.end(), Strategy::Rio);
  if (rio != strategies.end() && strategies.size() > 1) {
    const std::size_t k = strategies.size();
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const BenchmarkRow& r = report.rows[i * k + static_cast<std::size_t>(rio - strategies.begin())];
      if (!r.error.empty()) continue;
      Comparison c{instances[i].label, r.queries, 0, 0};
      bool any = false;
      for (std::size_t j = 0; j < k; ++j) {
        const BenchmarkRow& o = report.rows[i * k + j];
        if (strategies[j] == Strategy::Rio || !o.error.empty()) continue;
        c.q_min_other = any ? std::min(c.q_min_other, o.queries) : o.queries;
        c.q_max_other = any ? std::max(c.q_max_other, o.queries) : o.queries;
        any = true;
      }
      if (any) report.comparisons.push_back(c);
    }
  }
  return report;
}

std::string report_csv(const BenchmarkReport& report, bool timing) {
  std::string out = "instance,strategy,queries,debug_ms,react_ms,target_found,target,result,error\n";
  for (const BenchmarkRow& r : report.rows) {
    const bool ok = r.error.empty();
    out += csv_field(r.instance) + ',' + r.strategy + ',' + (ok ? std::to_string(r.queries) : "") + ',' +
           (ok && timing ? fmt(r.debug_ms, 3) : "") + ',' + (ok && timing ? fmt(r.react_ms, 3) : "") + ',' +
           (ok ? (r.target_found ? "true" : "false") : "") + ',' + csv_field(join(r.target)) + ',' +
           csv_field(join(r.result)) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::string summary_csv(const BenchmarkReport& report, bool timing) {
  std::string out = "strategy,runs,mean_queries,mean_debug_ms,mean_react_ms\n";
  for (const StrategySummary& s : report.summary) {
    out += s.strategy + ',' + std::to_string(s.runs) + ',' + fmt(s.mean_queries, 3) + ',' +
           (timing ? fmt(s.mean_debug_ms, 3) : "") + ',' + (timing ? fmt(s.mean_react_ms, 3) : "") + '\n';
  }
  return out;
}

std::string comparison_csv(const BenchmarkReport& report) {
  std::string out = "instance,q_rio,q_min_other,q_max_other\n";
  for (const Comparison& c : report.comparisons) {
    out += csv_field(c.instance) + ',' + std::to_string(c.q_rio) + ',' + std::to_string(c.q_min_other) + ',' +
           std::to_string(c.q_max_other) + '\n';
  }
  return out;
}

}  // namespace rio
