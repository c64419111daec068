// rio: interactive KB debugging from the command line.
//
//   rio debug --kb F [session options] [--oracle target:ax2,... | interactive] [--transcript OUT.json]
//   rio align --kb1 F1 --kb2 F2 --mapping M.csv [--reference R.csv] [session options]
//   rio bench --config B.json --out report.csv
//   rio serve --port P
//
// Exit codes: 0 success, 1 internal error, 2 input error, 3 no diagnosis, 4 resource limit.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rio/error.hpp"
#include "rio/harness.hpp"
#include "rio/service.hpp"

using namespace rio;
using nlohmann::json;

namespace {

struct SessionFlags {
  std::string config_file;
  std::string strategy;
  std::size_t n = 0;
  double sigma = 0, c = 0, c_min = 0, c_max = 0, epsilon = 0, fault_prob = 0;
  std::string stop;
  std::string signs;
  CLI::Option *o_strategy, *o_n, *o_sigma, *o_c, *o_cmin, *o_cmax, *o_eps, *o_stop, *o_signs, *o_fault;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "session config JSON; flags override its keys")->check(CLI::ExistingFile);
    o_strategy = app->add_option("--strategy", strategy, "split | entropy | rio (default rio)");
    o_n = app->add_option("--n", n, "number of leading diagnoses (default 9)");
    o_sigma = app->add_option("--sigma", sigma, "stop threshold in percent (default 85)");
    o_c = app->add_option("--c", c, "initial cautiousness (default 0.25)");
    o_cmin = app->add_option("--c-min", c_min, "lower cautiousness bound (default 0)");
    o_cmax = app->add_option("--c-max", c_max, "upper cautiousness bound (default 4/9)");
    o_eps = app->add_option("--epsilon", epsilon, "query generation epsilon (default 0.25)");
    o_stop = app->add_option("--stop", stop, "singleton | threshold | both (default threshold)");
    o_signs = app->add_option("--signs", signs, "positive | both: literal signs allowed in queries");
    o_fault = app->add_option("--fault-prob", fault_prob, "fault probability per construct for axioms without a prior");
  }

  SessionConfig build(const KnowledgeBase& kb) const {
    json j = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InputError(config_file + ": " + e.what());
      }
    }
    if (o_strategy->count()) j["strategy"] = strategy;
    if (o_n->count()) j["n"] = n;
    if (o_sigma->count()) j["sigma"] = sigma;
    if (o_c->count()) j["c"] = c;
    if (o_cmin->count()) j["c_min"] = c_min;
    if (o_cmax->count()) j["c_max"] = c_max;
    if (o_eps->count()) j["epsilon"] = epsilon;
    if (o_stop->count()) j["stop"] = stop;
    if (o_signs->count()) j["signs"] = signs;
    if (o_fault->count()) j["fault_model"] = fault_prob;
    return session_config_from_json(j, kb);
  }
};

struct RunFlags {
  std::string oracle = "interactive";
  std::string transcript_out;
  bool no_timing = false;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("--oracle", oracle, "interactive, or target:ID,ID,... for a simulated user");
    app->add_option("--transcript", transcript_out, "write the session transcript as JSON");
    app->add_flag("--no-timing", no_timing, "leave timings out of the transcript");
    app->add_flag("-q,--quiet", quiet, "print only the result");
  }
};

std::string ids_text(const KnowledgeBase& kb, const AxiomSet& s) {
  std::string out;
  for (const auto& id : kb.ids_of(s)) out += (out.empty() ? "" : " ") + id;
  return out.empty() ? "(none)" : out;
}

int run_session(const Dpi& dpi, const SessionConfig& cfg, const RunFlags& rf, std::optional<AxiomSet> target) {
  const KnowledgeBase& kb = dpi.kb();
  Session s(dpi, cfg);
  std::unique_ptr<Oracle> oracle;
  if (target) {
    oracle = std::make_unique<SimulatedOracle>(dpi, *target);
  } else {
    oracle = std::make_unique<InteractiveOracle>(std::cin, std::cout);
  }
  while (!s.finished()) {
    const Query q = *s.pending();
    const Answer a = oracle->answer(s, q);
    if (!rf.quiet && target) std::cout << "round " << s.round_number() << ": " << kb.render(q.literals) << " ? " << answer_name(a) << '\n';
    s.submit(a);
    oracle->check(s);
  }
  std::cout << "diagnosis: " << ids_text(kb, s.best().axioms) << '\n';
  if (!rf.quiet) {
    std::cout << "probability: " << s.best_probability() << '\n'
              << "queries: " << s.queries_answered() << '\n'
              << "reason: " << s.finish_reason() << '\n';
    if (target) std::cout << "target found: " << (s.best().axioms == *target ? "yes" : "no") << '\n';
  }
  if (!rf.transcript_out.empty()) {
    std::ofstream out(rf.transcript_out, std::ios::binary);
    if (!out) throw InputError("cannot write '" + rf.transcript_out + "'");
    out << transcript(s, TranscriptOptions{!rf.no_timing}).dump(2) << '\n';
  }
  return 0;
}

std::optional<AxiomSet> parse_oracle(const KnowledgeBase& kb, const std::string& spec) {
  if (spec == "interactive") return std::nullopt;
  if (spec.rfind("target:", 0) != 0) throw InputError("--oracle must be 'interactive' or 'target:ID,...'");
  std::vector<std::string> ids;
  std::stringstream ss(spec.substr(7));
  for (std::string id; std::getline(ss, id, ',');) {
    if (!id.empty()) ids.push_back(id);
  }
  return kb.indices_of(ids);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive debugging of faulty knowledge bases"};
  app.require_subcommand(1);

  // debug
  auto* debug = app.add_subcommand("debug", "debug one KB file");
  std::string kb_file;
  SessionFlags debug_sf;
  RunFlags debug_rf;
  debug->add_option("--kb", kb_file, "KB file")->required()->check(CLI::ExistingFile);
  debug_sf.attach(debug);
  debug_rf.attach(debug);

  // align
  auto* align = app.add_subcommand("align", "debug the union of two KBs joined by an alignment");
  std::string kb1, kb2, mapping, reference, aligned_out, policy = "reference";
  bool kbs_in_background = false;
  SessionFlags align_sf;
  RunFlags align_rf;
  align_rf.oracle = "";
  align->add_option("--kb1", kb1, "first KB")->required()->check(CLI::ExistingFile);
  align->add_option("--kb2", kb2, "second KB")->required()->check(CLI::ExistingFile);
  align->add_option("--mapping", mapping, "alignment CSV: left,right,relation(<|>|=),confidence")
      ->required()
      ->check(CLI::ExistingFile);
  align->add_option("--reference", reference, "reference alignment CSV; fixes the simulated target")
      ->check(CLI::ExistingFile);
  align->add_option("--target-policy", policy, "reference | max-nonalignment")
      ->check(CLI::IsMember({"reference", "max-nonalignment"}));
  align->add_flag("--kbs-in-background", kbs_in_background, "treat both KBs as correct background knowledge");
  align->add_option("--write-kb", aligned_out, "also write the aligned KB to this file");
  align_sf.attach(align);
  align_rf.attach(align);

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark configuration");
  std::string bench_config, bench_out, summary_out, comparison_out;
  std::size_t workers = 0;
  bool bench_no_timing = false;
  bench->add_option("--config", bench_config, "benchmark JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "report CSV")->required();
  bench->add_option("--summary", summary_out, "per-strategy means CSV");
  bench->add_option("--comparison", comparison_out, "q_rio against the other strategies, per instance");
  bench->add_option("--workers", workers, "parallel sessions (overrides the config)");
  bench->add_flag("--no-timing", bench_no_timing, "leave timing columns empty (reproducible output)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1", transcripts, kb_root;
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--transcripts", transcripts, "write finished transcripts here");
  serve_cmd->add_option("--kb-root", kb_root, "directory of KBs clients may reference by name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*debug) {
      auto kb = std::make_shared<const KnowledgeBase>(load_kb(kb_file));
      const SessionConfig cfg = debug_sf.build(*kb);
      const Dpi dpi = Dpi::from_kb(kb);
      return run_session(dpi, cfg, debug_rf, parse_oracle(*kb, debug_rf.oracle));
    }
    if (*align) {
      const KnowledgeBase k1 = load_kb(kb1);
      const KnowledgeBase k2 = load_kb(kb2);
      const Alignment m = load_alignment(mapping);
      AlignOptions ao;
      ao.kbs_in_background = kbs_in_background;
      const AlignedKb aligned = build_aligned_kb(k1, k2, m, ao);
      if (!aligned_out.empty()) write_file(aligned_out, serialize_kb(*aligned.kb));
      const SessionConfig cfg = align_sf.build(*aligned.kb);
      const Dpi dpi = Dpi::from_kb(aligned.kb);
      std::optional<AxiomSet> target;
      if (!align_rf.oracle.empty()) {
        target = parse_oracle(*aligned.kb, align_rf.oracle);
      } else if (policy == "max-nonalignment") {
        target = max_nonalignment_target(dpi, axiom_probabilities(*aligned.kb, cfg.fault_model), aligned.alignment, cfg.n);
      } else if (!reference.empty()) {
        const AxiomSet r = alignment_axioms(aligned, m, load_alignment(reference));
        target = fix_target_diagnosis(dpi, aligned.alignment - r);
      }
      if (target && !align_rf.quiet) std::cout << "target: " << ids_text(*aligned.kb, *target) << '\n';
      return run_session(dpi, cfg, align_rf, target);
    }
    if (*bench) {
      std::ifstream in(bench_config);
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InputError(bench_config + ": " + e.what());
      }
      BenchmarkOptions bo;
      bo.workers = workers > 0 ? workers : cfg.value("workers", std::size_t{1});
      bo.timing = !bench_no_timing && cfg.value("timing", true);
      const auto base = std::filesystem::path(bench_config).parent_path();
      const BenchmarkReport report = run_benchmark(cfg, base, bo);
      write_file(bench_out, report_csv(report, bo.timing));
      if (!summary_out.empty()) write_file(summary_out, summary_csv(report, bo.timing));
      if (!comparison_out.empty()) write_file(comparison_out, comparison_csv(report));
      std::cout << summary_csv(report, bo.timing);
      std::size_t failed = 0;
      for (const auto& r : report.rows) failed += r.error.empty() ? 0 : 1;
      if (failed > 0) std::cerr << failed << " run(s) failed; see the error column of " << bench_out << '\n';
      return 0;
    }
    if (*serve_cmd) {
      ServiceOptions so;
      if (!transcripts.empty()) so.transcript_dir = transcripts;
      if (!kb_root.empty()) so.kb_root = kb_root;
      ServiceApi api(so);
      HttpServer server(api);
      const int bound = server.bind(host, port);
      std::cout << "listening on http://" << host << ':' << bound << std::endl;
      server.run();
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NoDiagnosisError& e) {
    std::cerr << "no diagnosis: " << e.what() << '\n';
    return 3;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
