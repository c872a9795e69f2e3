// swsds: command-line front end.
//
//   swsds kb dict        --kb KB --out DICT.tsv
//   swsds wsd annotate   --kb KB --in SENTENCES.jsonl --out ANNOTATED.txt
//   swsds wsd annotate-pairs --kb KB --pairs PAIRS.jsonl --out ANNOTATED.jsonl
//   swsds embed senses   --kb KB --vectors VEC.txt --annotated FILE --out VEC.txt
//   swsds sim wmd        --vectors VEC.txt --pairs PAIRS.jsonl --out DIST.jsonl
//   swsds eval wsd       --kb KB --gold GOLD.jsonl --out REPORT.json
//   swsds eval sim       --vectors VEC.txt --pairs PAIRS.jsonl --seed N --out REPORT.json
//   swsds eval compare   --kb KB --vectors VEC.txt --pairs PAIRS.jsonl --seed N --out REPORT.json
//
// Exit codes: 0 ok, 1 malformed input, 2 I/O failure, 3 scorer failure, 64 usage.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swsds/embedding_store.hpp"
#include "swsds/eval.hpp"
#include "swsds/io.hpp"
#include "swsds/kb.hpp"
#include "swsds/log.hpp"
#include "swsds/scorer.hpp"
#include "swsds/sense_embedding.hpp"
#include "swsds/wmd.hpp"
#include "swsds/wsd.hpp"

namespace {

using namespace swsds;
using nlohmann::json;

enum Exit { ok = 0, bad_input = 1, io_failure = 2, scorer_failure = 3, usage = 64 };

std::string env_name(const std::string& flag) {
  std::string out = "SWSDS_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
CLI::Option* opt(CLI::App* app, const std::string& flag, T& target, const std::string& help) {
  return app->add_option("--" + flag, target, help)->envname(env_name(flag));
}

struct ScorerOptions {
  std::string kind = "stub";
  std::string endpoint;
  std::string cache;
  std::string stub_table;
  std::uint64_t stub_seed = 0;
  int timeout_ms = 30000;
  std::size_t max_substitutes = 10;
  std::string fallback = "first-sense";

  void attach(CLI::App* app) {
    opt(app, "scorer", kind, "stub or remote")->check(CLI::IsMember({"stub", "remote"}));
    opt(app, "endpoint", endpoint, "scoring service base URL (remote scorer)");
    opt(app, "cache", cache, "persistent score cache (JSONL)");
    opt(app, "stub-table", stub_table, "stub score table (JSON)");
    opt(app, "stub-seed", stub_seed, "stub hash seed");
    opt(app, "timeout-ms", timeout_ms, "remote request timeout")->check(CLI::PositiveNumber);
    opt(app, "max-substitutes", max_substitutes, "substitutes scored per sense")->check(CLI::PositiveNumber);
    opt(app, "fallback", fallback, "when no sense has substitutes: first-sense or base-word-score")
        ->check(CLI::IsMember({"first-sense", "base-word-score"}));
  }

  WsdConfig wsd_config() const {
    WsdConfig c;
    c.max_substitutes = max_substitutes;
    c.fallback = fallback == "base-word-score" ? Fallback::base_word_score : Fallback::first_sense;
    return c;
  }
};

// Scorer stack with handles kept for the end-of-run statistics event.
struct ScorerStack {
  std::shared_ptr<Scorer> top;
  std::shared_ptr<RemoteScorer> remote;
  std::shared_ptr<CachedScorer> cache;

  explicit ScorerStack(const ScorerOptions& o) {
    if (o.kind == "remote") {
      if (o.endpoint.empty()) throw InvalidArgument("--endpoint is required with --scorer remote");
      remote = std::make_shared<RemoteScorer>(o.endpoint, std::chrono::milliseconds(o.timeout_ms));
      top = remote;
    } else {
      top = std::make_shared<StubScorer>(o.stub_table.empty() ? StubTable{} : StubTable::load(o.stub_table),
                                         o.stub_seed);
    }
    if (!o.cache.empty()) {
      cache = std::make_shared<CachedScorer>(top, o.cache);
      top = cache;
    }
  }

  void report() const {
    json fields = json::object();
    if (remote) fields["remote_requests"] = remote->requests();
    if (cache) {
      fields["cache_hits"] = cache->hits();
      fields["cache_misses"] = cache->misses();
      fields["cache_entries"] = cache->entries();
    }
    log::info("scorer.stats", fields);
  }
};

PolysemyDictionary dictionary_for(const KnowledgeBase& kb, const std::string& dict_path) {
  return dict_path.empty() ? build_polysemy_dict(kb) : read_polysemy_tsv(dict_path);
}

PosTagMap pos_map(const std::string& path) { return path.empty() ? PosTagMap{} : PosTagMap::from_json_file(path); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  write_text_file(path, j.dump(2) + "\n");
}

// ---- commands -----------------------------------------------------------------

struct KbDict {
  std::string kb, out;
  int run() const {
    auto base = load_kb(kb);
    auto dict = build_polysemy_dict(base);
    auto out_file = open_out(out);
    write_polysemy_tsv(dict, out_file);
    close_out(out_file, out);
    log::info("kb.dict", {{"kb", kb}, {"senses", base.senses().size()}, {"polysemous", dict.entries().size()}});
    return ok;
  }
};

struct WsdAnnotate {
  std::string kb, dict, in, out, results, pos_map_path;
  unsigned threads = 1;
  ScorerOptions scorer;

  int run() const {
    auto base = load_kb(kb);
    auto poly = dictionary_for(base, dict);
    auto tags = pos_map(pos_map_path);
    ScorerStack stack(scorer);

    std::ifstream input(in);
    if (!input) throw IoError("cannot open " + in);
    // Lines that fail to parse keep their slot so output stays aligned with input.
    std::vector<std::optional<TaggedSentence>> parsed;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
      ++line_no;
      if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
      try {
        parsed.push_back(tagged_sentence_from_json(json::parse(line), tags));
      } catch (const std::exception& e) {
        log::warn("wsd.line_failed", {{"path", in}, {"line", line_no}, {"error", e.what()}});
        parsed.emplace_back();
      }
    }
    std::vector<TaggedSentence> sentences;
    for (const auto& p : parsed)
      if (p) sentences.push_back(*p);
    auto annotated = annotate_corpus(sentences, base, poly, *stack.top, scorer.wsd_config(), threads);

    auto out_file = open_out(out);
    std::optional<std::ofstream> results_file;
    if (!results.empty()) results_file = open_out(results);
    std::size_t next = 0, failed_lines = 0;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (!parsed[i]) {
        ++failed_lines;
        out_file << '\n';
        continue;
      }
      const auto& a = annotated[next++];
      for (const auto& f : a.failures)
        log::warn("wsd.token_failed", {{"sentence", i}, {"position", f.position}, {"error", f.message}});
      if (a.results.empty() && !a.failures.empty()) ++failed_lines;
      out_file << a.text() << '\n';
      if (results_file) {
        for (const auto& [pos, r] : a.results) {
          json row = r.to_json();
          row["sentence"] = i;
          row["position"] = pos;
          row["token"] = parsed[i]->tokens[pos];
          *results_file << row.dump() << '\n';
        }
      }
    }
    close_out(out_file, out);
    if (results_file) close_out(*results_file, results);
    stack.report();
    log::info("wsd.annotate", {{"lines", parsed.size()}, {"failed_lines", failed_lines}});
    return !parsed.empty() && failed_lines == parsed.size() ? bad_input : ok;
  }
};

struct WsdAnnotatePairs {
  std::string kb, dict, pairs, out, pos_map_path;
  ScorerOptions scorer;

  int run() const {
    auto base = load_kb(kb);
    auto poly = dictionary_for(base, dict);
    auto input = read_pairs(pairs, pos_map(pos_map_path));
    ScorerStack stack(scorer);
    auto annotated = annotate_pairs(input, base, poly, *stack.top, scorer.wsd_config());
    write_pairs(annotated.pairs, out);
    stack.report();
    log::info("wsd.annotate_pairs", {{"pairs", input.size()},
                                      {"annotated_tokens", annotated.annotated_tokens},
                                      {"failed_tokens", annotated.failed_tokens}});
    return ok;
  }
};

struct EmbedSenses {
  std::string kb, vectors, out, report;
  std::vector<std::string> annotated;
  std::size_t k = 10;
  bool strict = false;

  int run() const {
    auto base = load_kb(kb);
    auto store = load_word2vec_text<double>(vectors);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& path : annotated) {
      // Pair files contribute both sides; anything else is read as token lines.
      if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0) {
        for (auto& p : read_pairs(path)) {
          corpus.push_back(std::move(p.a));
          corpus.push_back(std::move(p.b));
        }
      } else {
        auto lines = read_token_lines(path);
        corpus.insert(corpus.end(), lines.begin(), lines.end());
      }
    }
    auto result = embed_senses<double>(corpus, base, store, {k, strict});
    for (const auto& f : result.failures) log::warn("embed.sense_failed", {{"key", f.sense_key}, {"error", f.message}});
    save_word2vec_text(store, out);
    if (!report.empty()) {
      json rows = json::array();
      for (const auto& r : result.reports) rows.push_back(r.to_json());
      write_json({{"inserted", result.inserted}, {"failures", result.failures.size()}, {"senses", rows}}, report);
    }
    log::info("embed.senses", {{"inserted", result.inserted}, {"failures", result.failures.size()}});
    return ok;
  }
};

struct SimWmd {
  std::string vectors, pairs, out;
  bool plan = false;

  int run() const {
    auto store = load_word2vec_text<double>(vectors);
    auto input = read_pairs(pairs);
    auto out_file = open_out(out);
    std::size_t failed = 0;
    for (const auto& p : input) {
      json row = {{"id", p.id}};
      try {
        auto r = wmd<double>(p.a, p.b, store);
        row["distance"] = r.distance;
        row["rwmd"] = rwmd<double>(p.a, p.b, store);
        row["wcd"] = wcd<double>(p.a, p.b, store);
        if (plan) {
          json flows = json::array();
          for (const auto& f : r.plan.flows) flows.push_back({{"from", f.from}, {"to", f.to}, {"mass", f.mass}});
          row["plan"] = flows;
        }
      } catch (const EmptyDocumentError& e) {
        ++failed;
        row["distance"] = nullptr;
        row["error"] = e.what();
        log::warn("sim.pair_failed", {{"id", p.id}, {"error", e.what()}});
      }
      if (p.label) row["label"] = *p.label;
      out_file << row.dump() << '\n';
    }
    close_out(out_file, out);
    log::info("sim.wmd", {{"pairs", input.size()}, {"failed", failed}});
    return ok;
  }
};

struct EvalWsd {
  std::string kb, gold, out, results, pos_map_path;
  ScorerOptions scorer;

  int run() const {
    auto base = load_kb(kb);
    auto items = read_gold_items(gold, pos_map(pos_map_path));
    ScorerStack stack(scorer);
    std::vector<WsdResult> per_item;
    auto metrics = eval_wsd(items, base, *stack.top, scorer.wsd_config(), &per_item);
    json report = metrics.to_json();
    report["config"] = {{"max_substitutes", scorer.max_substitutes}, {"fallback", scorer.fallback},
                        {"scorer", scorer.kind}};
    write_json(report, out);
    if (!results.empty()) {
      auto f = open_out(results);
      for (std::size_t i = 0; i < per_item.size(); ++i) {
        json row = per_item[i].to_json();
        row["id"] = items[i].instance.id;
        row["gold"] = items[i].gold_sense_id;
        f << row.dump() << '\n';
      }
      close_out(f, results);
    }
    stack.report();
    return ok;
  }
};

struct EvalSim {
  std::string vectors, pairs, out;
  std::uint64_t seed = 0;
  double split = 0.2;

  int run() const {
    auto store = load_word2vec_text<double>(vectors);
    auto input = read_pairs(pairs);
    write_json(eval_similarity(input, store, split, seed).to_json(), out);
    return ok;
  }
};

struct EvalCompare {
  std::string kb, dict, vectors, pairs, out, pos_map_path;
  std::uint64_t seed = 0;
  double split = 0.2;
  std::size_t k = 10;
  bool strict = false;
  ScorerOptions scorer;

  int run() const {
    auto base = load_kb(kb);
    auto poly = dictionary_for(base, dict);
    auto store = load_word2vec_text<double>(vectors);
    auto input = read_pairs(pairs, pos_map(pos_map_path));
    ScorerStack stack(scorer);
    SensePipeline pipeline{base, poly, *stack.top, scorer.wsd_config(), {k, strict}};
    write_json(compare_pipelines(input, store, pipeline, split, seed).to_json(), out);
    stack.report();
    return ok;
  }
};

void add_seed_split(CLI::App* app, std::uint64_t& seed, double& split) {
  opt(app, "seed", seed, "split seed")->required();
  opt(app, "split", split, "dev split ratio")->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sememe-based word sense disambiguation and sense-aware similarity"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug, info, warn or error")
      ->envname("SWSDS_LOG_LEVEL")
      ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

  int status = ok;
  auto command = [&status](auto& cmd) {
    return [&status, &cmd] { status = cmd.run(); };
  };

  auto* kb = app.add_subcommand("kb", "knowledge base tools")->require_subcommand(1);
  KbDict kb_dict;
  {
    auto* c = kb->add_subcommand("dict", "write the polysemous-word dictionary");
    opt(c, "kb", kb_dict.kb, "knowledge base (JSONL)")->required();
    opt(c, "out", kb_dict.out, "output TSV")->required();
    c->callback(command(kb_dict));
  }

  auto* wsd = app.add_subcommand("wsd", "word sense disambiguation")->require_subcommand(1);
  WsdAnnotate annotate;
  {
    auto* c = wsd->add_subcommand("annotate", "annotate polysemous words with sense keys");
    opt(c, "kb", annotate.kb, "knowledge base (JSONL)")->required();
    opt(c, "dict", annotate.dict, "polysemy dictionary TSV (default: derived from the KB)");
    opt(c, "in", annotate.in, "tagged sentences (JSONL)")->required();
    opt(c, "out", annotate.out, "annotated text, one sentence per line")->required();
    opt(c, "results", annotate.results, "per-token decision log (JSONL)");
    opt(c, "pos-map", annotate.pos_map_path, "external POS tag map (JSON)");
    opt(c, "threads", annotate.threads, "worker threads")->check(CLI::PositiveNumber);
    annotate.scorer.attach(c);
    c->callback(command(annotate));
  }
  WsdAnnotatePairs annotate_pairs_cmd;
  {
    auto* c = wsd->add_subcommand("annotate-pairs", "annotate both sides of a sentence-pair file");
    opt(c, "kb", annotate_pairs_cmd.kb, "knowledge base (JSONL)")->required();
    opt(c, "dict", annotate_pairs_cmd.dict, "polysemy dictionary TSV (default: derived from the KB)");
    opt(c, "pairs", annotate_pairs_cmd.pairs, "pair file (JSONL)")->required();
    opt(c, "out", annotate_pairs_cmd.out, "annotated pair file (JSONL)")->required();
    opt(c, "pos-map", annotate_pairs_cmd.pos_map_path, "external POS tag map (JSON)");
    annotate_pairs_cmd.scorer.attach(c);
    c->callback(command(annotate_pairs_cmd));
  }

  auto* embed = app.add_subcommand("embed", "sense embeddings")->require_subcommand(1);
  EmbedSenses embed_cmd;
  {
    auto* c = embed->add_subcommand("senses", "add sense vectors for annotated sense keys");
    opt(c, "kb", embed_cmd.kb, "knowledge base (JSONL)")->required();
    opt(c, "vectors", embed_cmd.vectors, "word vectors (word2vec text)")->required();
    opt(c, "annotated", embed_cmd.annotated, "annotated text or pair file (.jsonl); repeatable")->required();
    opt(c, "out", embed_cmd.out, "output vectors (word2vec text)")->required();
    opt(c, "k", embed_cmd.k, "synonyms per sense")->check(CLI::PositiveNumber);
    c->add_flag("--strict", embed_cmd.strict, "divide by k instead of the synonyms found")->envname("SWSDS_STRICT");
    opt(c, "report", embed_cmd.report, "per-sense report (JSON)");
    c->callback(command(embed_cmd));
  }

  auto* sim = app.add_subcommand("sim", "document similarity")->require_subcommand(1);
  SimWmd sim_cmd;
  {
    auto* c = sim->add_subcommand("wmd", "word mover's distance per pair");
    opt(c, "vectors", sim_cmd.vectors, "vectors (word2vec text)")->required();
    opt(c, "pairs", sim_cmd.pairs, "pair file (JSONL)")->required();
    opt(c, "out", sim_cmd.out, "distances (JSONL)")->required();
    c->add_flag("--plan", sim_cmd.plan, "include transport plans")->envname("SWSDS_PLAN");
    c->callback(command(sim_cmd));
  }

  auto* ev = app.add_subcommand("eval", "evaluation")->require_subcommand(1);
  EvalWsd eval_wsd_cmd;
  {
    auto* c = ev->add_subcommand("wsd", "score WSD against gold items");
    opt(c, "kb", eval_wsd_cmd.kb, "knowledge base (JSONL)")->required();
    opt(c, "gold", eval_wsd_cmd.gold, "gold items (JSONL)")->required();
    opt(c, "out", eval_wsd_cmd.out, "report (JSON, '-' for stdout)")->required();
    opt(c, "results", eval_wsd_cmd.results, "per-item decisions (JSONL)");
    opt(c, "pos-map", eval_wsd_cmd.pos_map_path, "external POS tag map (JSON)");
    eval_wsd_cmd.scorer.attach(c);
    c->callback(command(eval_wsd_cmd));
  }
  EvalSim eval_sim_cmd;
  {
    auto* c = ev->add_subcommand("sim", "threshold classification accuracy of WMD");
    opt(c, "vectors", eval_sim_cmd.vectors, "vectors (word2vec text)")->required();
    opt(c, "pairs", eval_sim_cmd.pairs, "labelled pair file (JSONL)")->required();
    opt(c, "out", eval_sim_cmd.out, "report (JSON, '-' for stdout)")->required();
    add_seed_split(c, eval_sim_cmd.seed, eval_sim_cmd.split);
    c->callback(command(eval_sim_cmd));
  }
  EvalCompare compare_cmd;
  {
    auto* c = ev->add_subcommand("compare", "baseline vs sense-annotated similarity");
    opt(c, "kb", compare_cmd.kb, "knowledge base (JSONL)")->required();
    opt(c, "dict", compare_cmd.dict, "polysemy dictionary TSV (default: derived from the KB)");
    opt(c, "vectors", compare_cmd.vectors, "word vectors (word2vec text)")->required();
    opt(c, "pairs", compare_cmd.pairs, "labelled pair file with POS tags (JSONL)")->required();
    opt(c, "out", compare_cmd.out, "report (JSON, '-' for stdout)")->required();
    opt(c, "pos-map", compare_cmd.pos_map_path, "external POS tag map (JSON)");
    opt(c, "k", compare_cmd.k, "synonyms per sense")->check(CLI::PositiveNumber);
    c->add_flag("--strict", compare_cmd.strict, "divide by k instead of the synonyms found")->envname("SWSDS_STRICT");
    add_seed_split(c, compare_cmd.seed, compare_cmd.split);
    compare_cmd.scorer.attach(c);
    c->callback(command(compare_cmd));
  }

  app.parse_complete_callback([&] {
    const std::map<std::string, log::Level> levels = {
        {"debug", log::Level::debug}, {"info", log::Level::info}, {"warn", log::Level::warn}, {"error", log::Level::error}};
    log::set_min_level(levels.at(log_level));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  } catch (const IoError& e) {
    log::event(log::Level::error, "io_error", {{"error", e.what()}});
    return io_failure;
  } catch (const ScorerError& e) {
    log::event(log::Level::error, "scorer_error", {{"error", e.what()}});
    return scorer_failure;
  } catch (const Error& e) {
    log::event(log::Level::error, "input_error", {{"error", e.what()}});
    return bad_input;
  } catch (const nlohmann::json::exception& e) {
    log::event(log::Level::error, "input_error", {{"error", e.what()}});
    return bad_input;
  }
  return status;
}
