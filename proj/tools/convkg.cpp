// convkg: command line front end over the convkg library.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/edges.hpp"
#include "convkg/embedding.hpp"
#include "convkg/error.hpp"
#include "convkg/eval_matching.hpp"
#include "convkg/extract.hpp"
#include "convkg/graph.hpp"
#include "convkg/io.hpp"
#include "convkg/kb.hpp"
#include "convkg/link.hpp"
#include "convkg/service.hpp"
#include "convkg/tasks.hpp"
#include "convkg/text.hpp"
#include "convkg/translation.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct ProviderFlags {
  std::string vectors;
  std::string endpoint;
  std::size_t dim = 64;
  std::string token_env = "CONVKG_EMBEDDING_TOKEN";

  void Register(CLI::App* app) {
    app->add_option("--vectors", vectors, "Vector table file (dim N header, key<TAB>values)");
    app->add_option("--endpoint", endpoint, "Embedding service URL (http://...)");
    app->add_option("--dim", dim, "Embedding dimension for --endpoint or the hashing fallback");
    app->add_option("--token-env", token_env, "Environment variable holding the embedding token");
  }

  // Falls back to the deterministic hashing embedder when neither a table
  // nor an endpoint is given.
  std::unique_ptr<convkg::embed::EmbeddingProvider> Make() const {
    if (!vectors.empty() && !endpoint.empty()) {
      throw convkg::ValidationError("--vectors", "give either --vectors or --endpoint, not both");
    }
    if (!vectors.empty()) {
      return std::make_unique<convkg::embed::VectorTable>(convkg::embed::LoadVectors(vectors));
    }
    if (!endpoint.empty()) {
      const char* token = std::getenv(token_env.c_str());
      return std::make_unique<convkg::embed::HttpEmbeddingProvider>(endpoint, dim,
                                                                   token ? token : "");
    }
    return std::make_unique<convkg::embed::HashingEmbeddingProvider>(dim);
  }
};

convkg::extract::ExtractorConfig ExtractorConfigFrom(const std::string& path) {
  return path.empty() ? convkg::extract::ExtractorConfig{}
                      : convkg::extract::LoadExtractorConfig(path);
}

std::vector<convkg::link::MentionHeadMatch> LoadMatches(const std::string& path) {
  std::vector<convkg::link::MentionHeadMatch> out;
  const auto records = convkg::io::ReadJsonLines(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(convkg::link::MatchFromJson(records[i]));
    } catch (const convkg::ValidationError& e) {
      throw convkg::ParseError(path, i + 1, e.field(), e.what());
    }
  }
  return out;
}

std::vector<convkg::extract::EventMention> LoadMentions(const std::string& path) {
  std::vector<convkg::extract::EventMention> out;
  const auto records = convkg::io::ReadJsonLines(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(convkg::extract::MentionFromJson(records[i]));
    } catch (const convkg::ValidationError& e) {
      throw convkg::ParseError(path, i + 1, e.field(), e.what());
    }
  }
  return out;
}

template <typename T>
void WriteRecords(const std::string& path, const std::vector<T>& items) {
  std::vector<json> records;
  records.reserve(items.size());
  for (const auto& item : items) records.push_back(ToJson(item));
  convkg::io::WriteJsonLines(path, records);
}

void Print(const json& j) { std::cout << j.dump(2) << '\n'; }

convkg::kb::TailIdentity ParseIdentity(const std::string& s) {
  if (s == "graph") return convkg::kb::TailIdentity::kGraphWide;
  if (s == "head") return convkg::kb::TailIdentity::kPerHead;
  throw convkg::ValidationError("--tail-identity", "expected graph or head");
}

// Event-level head index built from the graph's own head nodes.
convkg::link::HeadIndex GraphHeadIndex(const convkg::graph::Graph& g,
                                       convkg::embed::EmbeddingProvider& provider) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const auto& [id, node] : g.nodes()) {
    if (node.kind != convkg::graph::NodeKind::kEventHead) continue;
    ids.push_back(id);
    texts.push_back(node.text);
  }
  const auto vectors = provider.Embed(texts);
  std::vector<convkg::link::HeadIndex::Entry> entries;
  for (std::size_t i = 0; i < ids.size(); ++i) entries.push_back({ids[i], texts[i], vectors[i]});
  return convkg::link::HeadIndex(std::move(entries));
}

convkg::kb::ConnectorMap LoadConnectors(const std::string& path) {
  convkg::kb::ConnectorMap map = convkg::kb::DefaultConnectors();
  const auto lines = convkg::io::ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (convkg::text::Trim(lines[i]).empty() || lines[i][0] == '#') continue;
    const auto cols = convkg::text::Split(lines[i], '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw convkg::ParseError(path, i + 1, "", "expected relation<TAB>connector[<TAB>translated]");
    }
    auto r = convkg::kb::ParseRelation(convkg::text::Trim(cols[0]));
    if (!r) throw convkg::ParseError(path, i + 1, "relation", "unknown relation '" + cols[0] + "'");
    convkg::kb::Connector c{cols[1], std::nullopt};
    if (cols.size() == 3) c.translated = cols[2];
    map[*r] = c;
  }
  return map;
}

convkg::service::HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational commonsense knowledge graph toolkit"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // extract
  auto* extract = app.add_subcommand("extract", "Extract event mentions from parsed utterances");
  std::string ex_corpus, ex_parses, ex_method = "parsing", ex_out, ex_config;
  extract->add_option("--corpus", ex_corpus)->required();
  extract->add_option("--parses", ex_parses, "CoNLL-U parse file")->required();
  extract->add_option("--method", ex_method, "parsing, pos or simple");
  extract->add_option("--config", ex_config, "Extractor JSON config");
  extract->add_option("--out", ex_out)->required();

  // link
  auto* link = app.add_subcommand("link", "Link mentions (or concepts) to knowledge-base heads");
  std::string ln_mentions, ln_kb, ln_out, ln_corpus, ln_parses;
  double ln_threshold = convkg::link::kDefaultThreshold;
  bool ln_concepts = false;
  ProviderFlags ln_provider;
  link->add_option("--mentions", ln_mentions, "Mention file from extract");
  link->add_option("--kb", ln_kb)->required();
  link->add_option("--threshold", ln_threshold);
  link->add_flag("--concepts", ln_concepts, "Link v/n/a tokens of --corpus/--parses to entity heads");
  link->add_option("--corpus", ln_corpus);
  link->add_option("--parses", ln_parses);
  link->add_option("--out", ln_out)->required();
  ln_provider.Register(link);

  // export-pairs
  auto* pairs = app.add_subcommand("export-pairs", "Sample unlabeled mention/head pairs");
  std::string ep_matches, ep_out;
  std::size_t ep_k = 100;
  std::uint64_t ep_seed = 7;
  pairs->add_option("--matches", ep_matches)->required();
  pairs->add_option("-k,--count", ep_k);
  pairs->add_option("--seed", ep_seed);
  pairs->add_option("--out", ep_out)->required();

  // build-edges
  auto* build = app.add_subcommand("build-edges", "Build dialog flow edges");
  std::string be_linked, be_concepts, be_corpus, be_parses, be_kb, be_lexicon, be_out;
  std::string be_identity = "graph";
  convkg::edges::EdgeBuildConfig be_cfg;
  ProviderFlags be_provider;
  build->add_option("--linked", be_linked, "Event matches from link")->required();
  build->add_option("--concepts", be_concepts, "Concept matches from link --concepts");
  build->add_option("--corpus", be_corpus)->required();
  build->add_option("--parses", be_parses);
  build->add_option("--kb", be_kb)->required();
  build->add_option("--lexicon", be_lexicon, "Emotion lexicon TSV");
  build->add_option("--min-weight-event", be_cfg.min_weight_event);
  build->add_option("--min-weight-concept", be_cfg.min_weight_concept);
  build->add_option("--min-weight-emotion", be_cfg.min_weight_emotion);
  build->add_option("--surprise-threshold", be_cfg.surprise_threshold);
  build->add_flag("--cross-product", be_cfg.flow.cross_product,
                  "Connect every mention of adjacent utterances, not just last to first");
  build->add_option("--tail-identity", be_identity, "graph or head");
  build->add_option("--out", be_out)->required();
  be_provider.Register(build);

  // assemble
  auto* assemble = app.add_subcommand("assemble", "Assemble knowledge base and edges into a graph");
  std::string as_kb, as_edges, as_out, as_identity = "graph";
  assemble->add_option("--kb", as_kb)->required();
  assemble->add_option("--edges", as_edges);
  assemble->add_option("--tail-identity", as_identity, "graph or head");
  assemble->add_option("--out", as_out)->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Print graph statistics");
  std::string st_graph;
  stats->add_option("--graph", st_graph)->required();

  // eval-edges
  auto* eval_edges = app.add_subcommand("eval-edges", "Connectivity and average distance");
  std::string ee_graph, ee_pairs, ee_subkind, ee_kinds;
  eval_edges->add_option("--graph", ee_graph)->required();
  eval_edges->add_option("--pairs", ee_pairs, "TSV: head<TAB>head[<TAB>subkind]")->required();
  eval_edges->add_option("--subkind", ee_subkind, "Keep only pairs tagged with this subkind");
  eval_edges->add_option("--kinds", ee_kinds, "Edge families to traverse (default all)");

  // scenario
  auto* scenario = app.add_subcommand("scenario", "Scenario subgraphs from matched heads");
  std::string sc_graph, sc_matches, sc_corpus, sc_out;
  double sc_fraction = 0.005;
  scenario->add_option("--graph", sc_graph)->required();
  scenario->add_option("--matches", sc_matches)->required();
  scenario->add_option("--corpus", sc_corpus)->required();
  scenario->add_option("--fraction", sc_fraction);
  scenario->add_option("--out", sc_out, "Write JSONL instead of printing");

  // eval-matching
  auto* eval_matching = app.add_subcommand("eval-matching", "Compare extraction methods by matching");
  std::string em_corpus, em_parses, em_kb, em_method = "parsing", em_config;
  std::size_t em_sample = 100;
  std::uint64_t em_seed = 7;
  double em_threshold = convkg::link::kDefaultThreshold;
  ProviderFlags em_provider;
  eval_matching->add_option("--corpus", em_corpus)->required();
  eval_matching->add_option("--parses", em_parses)->required();
  eval_matching->add_option("--kb", em_kb)->required();
  eval_matching->add_option("--method", em_method);
  eval_matching->add_option("--config", em_config);
  eval_matching->add_option("--sample", em_sample);
  eval_matching->add_option("--seed", em_seed);
  eval_matching->add_option("--threshold", em_threshold);
  em_provider.Register(eval_matching);

  // bench
  auto* bench = app.add_subcommand("bench", "Graph-grounded emotion or intent benchmark");
  std::string bn_graph, bn_corpus, bn_parses, bn_task = "emotion", bn_mode = "knowledge",
                                              bn_export, bn_config;
  double bn_train = 0.8;
  std::uint64_t bn_seed = 7;
  convkg::tasks::KnowledgeConfig bn_cfg;
  ProviderFlags bn_provider;
  bench->add_option("--graph", bn_graph)->required();
  bench->add_option("--corpus", bn_corpus)->required();
  bench->add_option("--parses", bn_parses);
  bench->add_option("--task", bn_task, "emotion or intent");
  bench->add_option("--mode", bn_mode, "base, history, knowledge or knowledge+history");
  bench->add_option("--threshold", bn_cfg.threshold);
  bench->add_option("--per-relation", bn_cfg.per_relation);
  bench->add_option("--config", bn_config, "Extractor JSON config");
  bench->add_option("--train-fraction", bn_train);
  bench->add_option("--seed", bn_seed);
  bench->add_option("--export", bn_export, "Write instances as JSONL and skip evaluation");
  bn_provider.Register(bench);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the browse/edit HTTP API");
  std::string sv_graph, sv_corpus, sv_matches, sv_log, sv_host = "127.0.0.1",
                                                        sv_token_env = "CONVKG_TOKEN",
                                                        sv_identity = "graph";
  int sv_port = 8080;
  double sv_fraction = 0.005;
  serve->add_option("--graph", sv_graph)->required();
  serve->add_option("--corpus", sv_corpus, "Corpus for scenario grouping");
  serve->add_option("--matches", sv_matches, "Event matches for scenario graphs");
  serve->add_option("--fraction", sv_fraction);
  serve->add_option("--audit-log", sv_log);
  serve->add_option("--host", sv_host);
  serve->add_option("--port", sv_port);
  serve->add_option("--token-env", sv_token_env, "Environment variable holding the edit token");
  serve->add_option("--tail-identity", sv_identity, "graph or head");

  // translate
  auto* translate = app.add_subcommand("translate", "Translate a knowledge base");
  std::string tr_kb, tr_out, tr_endpoint, tr_table, tr_connectors,
      tr_token_env = "CONVKG_TRANSLATION_TOKEN", tr_report;
  translate->add_option("--kb", tr_kb)->required();
  translate->add_option("--out", tr_out)->required();
  translate->add_option("--endpoint", tr_endpoint, "Translation service URL (http://...)");
  translate->add_option("--table", tr_table, "TSV source<TAB>translation lookup table");
  translate->add_option("--connectors", tr_connectors, "TSV relation<TAB>connector[<TAB>translated]");
  translate->add_option("--token-env", tr_token_env);
  translate->add_option("--report", tr_report, "Write per-triple results as JSONL");

  // translation-report
  auto* quality = app.add_subcommand("translation-report", "Mean fluency and logic of labels");
  std::string tq_labels;
  quality->add_option("--labels", tq_labels, "TSV: triple_id<TAB>fluency<TAB>logic")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      auto method = convkg::extract::ParseMethod(ex_method);
      if (!method || *method == convkg::extract::Method::kConcept) {
        throw convkg::ValidationError("--method", "expected parsing, pos or simple");
      }
      const auto corpus = convkg::corpus::LoadCorpus(ex_corpus, fs::path(ex_parses));
      const auto mentions = convkg::extract::ExtractCorpus(corpus, *method,
                                                           ExtractorConfigFrom(ex_config), threads);
      WriteRecords(ex_out, mentions);
      std::cerr << "wrote " << mentions.size() << " mentions to " << ex_out << '\n';
    } else if (*link) {
      const auto kb = convkg::kb::LoadKb(ln_kb);
      auto provider = ln_provider.Make();
      std::vector<convkg::link::MentionHeadMatch> matches;
      if (ln_concepts) {
        if (ln_corpus.empty() || ln_parses.empty()) {
          throw convkg::ValidationError("--concepts", "requires --corpus and --parses");
        }
        const auto corpus = convkg::corpus::LoadCorpus(ln_corpus, fs::path(ln_parses));
        convkg::link::HeadIndex heads(kb, convkg::kb::HeadLevel::kEntity, *provider);
        for (const auto& [key, utt] : corpus.parses) {
          auto found = convkg::link::LinkConcepts(utt, heads, *provider, ln_threshold);
          matches.insert(matches.end(), found.begin(), found.end());
        }
      } else {
        if (ln_mentions.empty()) throw convkg::ValidationError("--mentions", "required");
        convkg::link::HeadIndex heads(kb, convkg::kb::HeadLevel::kEvent, *provider);
        matches = convkg::link::LinkMentions(LoadMentions(ln_mentions), heads, *provider,
                                             ln_threshold, threads);
      }
      WriteRecords(ln_out, matches);
      std::cerr << "wrote " << matches.size() << " matches to " << ln_out << '\n';
    } else if (*pairs) {
      WriteRecords(ep_out, convkg::link::ExportFinetunePairs(LoadMatches(ep_matches), ep_k, ep_seed));
    } else if (*build) {
      const auto corpus = convkg::corpus::LoadCorpus(
          be_corpus, be_parses.empty() ? std::nullopt : std::optional<fs::path>(be_parses));
      const auto kb = convkg::kb::LoadKb(be_kb);
      be_cfg.tail_identity = ParseIdentity(be_identity);
      auto provider = be_provider.Make();
      convkg::edges::LexiconSentimentClassifier classifier(
          be_lexicon.empty() ? convkg::edges::DefaultEmotionLexicon()
                             : convkg::edges::LoadEmotionLexicon(be_lexicon));
      convkg::edges::KeywordExtractor keywords;
      keywords.AddVocabulary(corpus);
      const auto edges = convkg::edges::BuildAllEdges(
          corpus, kb, LoadMatches(be_linked),
          be_concepts.empty() ? std::vector<convkg::link::MentionHeadMatch>{}
                              : LoadMatches(be_concepts),
          classifier, *provider, keywords, be_cfg);
      convkg::edges::WriteEdges(be_out, edges);
      std::cerr << "wrote " << edges.size() << " edges to " << be_out << '\n';
    } else if (*assemble) {
      const auto kb = convkg::kb::LoadKb(as_kb);
      const auto flows = as_edges.empty() ? std::vector<convkg::edges::FlowEdge>{}
                                          : convkg::edges::LoadEdges(as_edges);
      const auto g = convkg::graph::Assemble(kb, flows, {ParseIdentity(as_identity)});
      convkg::graph::SaveGraph(g, as_out);
      Print(convkg::graph::ToJson(g.stats()));
    } else if (*stats) {
      Print(convkg::graph::ToJson(convkg::graph::LoadGraph(st_graph).stats()));
    } else if (*eval_edges) {
      if (!ee_subkind.empty() && !convkg::edges::ParseFlowSubkind(ee_subkind)) {
        throw convkg::ValidationError("--subkind", "expected next_utterance or next_sub_utterance");
      }
      const auto g = convkg::graph::LoadGraph(ee_graph);
      std::vector<std::pair<std::string, std::string>> list;
      const auto lines = convkg::io::ReadLines(ee_pairs);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (convkg::text::Trim(lines[i]).empty() || lines[i][0] == '#') continue;
        const auto cols = convkg::text::Split(lines[i], '\t');
        if (cols.size() < 2 || cols.size() > 3) {
          throw convkg::ParseError(ee_pairs, i + 1, "", "expected head<TAB>head[<TAB>subkind]");
        }
        if (cols.size() == 3 && !ee_subkind.empty() && convkg::text::Trim(cols[2]) != ee_subkind) {
          continue;
        }
        list.emplace_back(convkg::text::Trim(cols[0]), convkg::text::Trim(cols[1]));
      }
      const auto r = convkg::graph::EvaluateEdges(g, list, convkg::graph::FamilySet::Parse(ee_kinds));
      Print({{"connectivity", r.connectivity},
             {"avg_distance", r.avg_distance},
             {"pairs", r.pairs},
             {"connected", r.connected},
             {"disconnected", r.disconnected},
             {"skipped_identical", r.skipped_identical},
             {"subkind", ee_subkind.empty() ? json(nullptr) : json(ee_subkind)}});
    } else if (*scenario) {
      const auto g = convkg::graph::LoadGraph(sc_graph);
      const auto corpus = convkg::corpus::LoadCorpus(sc_corpus);
      const auto graphs =
          convkg::graph::ScenarioSubgraphs(g, corpus, LoadMatches(sc_matches), sc_fraction);
      if (sc_out.empty()) {
        for (const auto& s : graphs) std::cout << convkg::io::DumpLine(ToJson(s)) << '\n';
      } else {
        WriteRecords(sc_out, graphs);
      }
    } else if (*eval_matching) {
      auto method = convkg::extract::ParseMethod(em_method);
      if (!method || *method == convkg::extract::Method::kConcept) {
        throw convkg::ValidationError("--method", "expected parsing, pos or simple");
      }
      const auto corpus = convkg::corpus::LoadCorpus(em_corpus, fs::path(em_parses));
      const auto kb = convkg::kb::LoadKb(em_kb);
      auto provider = em_provider.Make();
      convkg::link::HeadIndex heads(kb, convkg::kb::HeadLevel::kEvent, *provider);
      const auto sample = convkg::eval::SampleUtterances(corpus, em_sample, em_seed);
      auto report = convkg::eval::MatchingEvaluation(sample, *method, heads, *provider,
                                                     ExtractorConfigFrom(em_config), em_threshold,
                                                     threads);
      report.seed = em_seed;
      Print(convkg::eval::ToJson(report));
    } else if (*bench) {
      auto task = convkg::tasks::ParseTask(bn_task);
      if (!task) throw convkg::ValidationError("--task", "expected emotion or intent");
      auto mode = convkg::tasks::ParseInputMode(bn_mode);
      if (!mode) throw convkg::ValidationError("--mode", "unknown input mode '" + bn_mode + "'");
      const auto g = convkg::graph::LoadGraph(bn_graph);
      const auto corpus = convkg::corpus::LoadCorpus(
          bn_corpus, bn_parses.empty() ? std::nullopt : std::optional<fs::path>(bn_parses));
      auto provider = bn_provider.Make();
      bn_cfg.extractor = ExtractorConfigFrom(bn_config);
      const auto heads = GraphHeadIndex(g, *provider);
      auto instances =
          convkg::tasks::BuildInstances(corpus, *task, g, heads, *provider, bn_cfg, threads);
      if (!bn_export.empty()) {
        std::vector<json> records;
        for (const auto& inst : instances) records.push_back(convkg::tasks::ToJson(inst, *mode));
        convkg::io::WriteJsonLines(bn_export, records);
        std::cerr << "wrote " << records.size() << " instances to " << bn_export << '\n';
        return 0;
      }
      auto [train, test] = convkg::tasks::SplitInstances(std::move(instances), bn_train, bn_seed);
      std::vector<std::pair<std::string, std::string>> examples;
      for (const auto& inst : train) {
        examples.emplace_back(convkg::tasks::AssembleInput(inst, *mode), inst.label);
      }
      convkg::tasks::NearestCentroidClassifier classifier(*provider);
      classifier.Train(examples);
      json out = convkg::tasks::ToJson(convkg::tasks::EvaluateTask(test, classifier, *mode, threads));
      out["task"] = bn_task;
      out["mode"] = std::string(convkg::tasks::ToString(*mode));
      out["train"] = train.size();
      out["seed"] = bn_seed;
      Print(out);
    } else if (*serve) {
      convkg::service::ServiceOptions options;
      options.tail_identity = ParseIdentity(sv_identity);
      options.scenario_fraction = sv_fraction;
      if (!sv_log.empty()) options.audit_log = sv_log;
      if (!sv_matches.empty()) {
        if (sv_corpus.empty()) throw convkg::ValidationError("--matches", "requires --corpus");
        const auto corpus = convkg::corpus::LoadCorpus(sv_corpus);
        for (auto& m : LoadMatches(sv_matches)) {
          const auto* conv = corpus.FindConversation(m.mention.source.conversation_id);
          if (conv == nullptr) continue;
          options.scenario_matches[conv->scenario_id].push_back(std::move(m));
        }
      }
      convkg::service::GraphService service(convkg::graph::LoadGraph(sv_graph), std::move(options));
      const char* token = std::getenv(sv_token_env.c_str());
      convkg::service::HttpServer server(service, {token ? token : ""});
      const int port = server.Bind(sv_host, sv_port);
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::cerr << "listening on " << sv_host << ':' << port << " at version " << service.version()
                << '\n';
      server.Listen();
      g_server = nullptr;
    } else if (*translate) {
      const auto kb = convkg::kb::LoadKb(tr_kb);
      std::unique_ptr<convkg::kb::TranslationClient> client;
      if (!tr_endpoint.empty() && !tr_table.empty()) {
        throw convkg::ValidationError("--endpoint", "give either --endpoint or --table, not both");
      }
      if (!tr_endpoint.empty()) {
        const char* token = std::getenv(tr_token_env.c_str());
        client = std::make_unique<convkg::kb::HttpTranslationClient>(tr_endpoint, token ? token : "");
      } else if (!tr_table.empty()) {
        std::map<std::string, std::string> table;
        for (const auto& line : convkg::io::ReadLines(tr_table)) {
          const auto cols = convkg::text::Split(line, '\t');
          if (cols.size() == 2) table[cols[0]] = cols[1];
        }
        client = std::make_unique<convkg::kb::TableTranslationClient>(std::move(table));
      } else {
        client = std::make_unique<convkg::kb::IdentityTranslationClient>();
      }
      const auto connectors =
          tr_connectors.empty() ? convkg::kb::DefaultConnectors() : LoadConnectors(tr_connectors);
      const auto result = convkg::kb::TranslateKb(kb, convkg::kb::DefaultReplacementRules(),
                                                  connectors, *client, threads);
      convkg::io::WriteFile(tr_out, convkg::kb::WriteKb(result.kb));
      if (!tr_report.empty()) {
        std::vector<json> records;
        for (const auto& t : result.triples) {
          records.push_back({{"head", t.head},
                             {"relation", std::string(convkg::kb::ToString(t.relation))},
                             {"tail", t.tail},
                             {"split_failed", t.split_failed}});
        }
        convkg::io::WriteJsonLines(tr_report, records);
      }
      Print({{"triples", result.triples.size()}, {"split_failures", result.split_failures}});
    } else if (*quality) {
      std::vector<convkg::kb::QualityLabel> labels;
      const auto lines = convkg::io::ReadLines(tq_labels);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (convkg::text::Trim(lines[i]).empty() || lines[i][0] == '#') continue;
        const auto cols = convkg::text::Split(lines[i], '\t');
        if (cols.size() != 3) {
          throw convkg::ParseError(tq_labels, i + 1, "", "expected triple_id<TAB>fluency<TAB>logic");
        }
        auto flag = [&](const std::string& s, const char* field) {
          const std::string v = convkg::text::Trim(s);
          if (v != "0" && v != "1") throw convkg::ParseError(tq_labels, i + 1, field, "expected 0 or 1");
          return v == "1" ? 1 : 0;
        };
        labels.push_back({cols[0], flag(cols[1], "fluency"), flag(cols[2], "logic")});
      }
      const auto r = convkg::kb::TranslationQualityReport(labels);
      Print({{"fluency", r.fluency}, {"logic", r.logic}, {"count", r.count}});
    }
  } catch (const convkg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
