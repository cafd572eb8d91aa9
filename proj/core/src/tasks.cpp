#include "convkg/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::tasks {

using nlohmann::json;

std::string_view ToString(Task t) { return t == Task::kEmotion ? "emotion" : "intent"; }

std::string_view ToString(InputMode m) {
  switch (m) {
    case InputMode::kBase: return "base";
    case InputMode::kHistory: return "history";
    case InputMode::kKnowledge: return "knowledge";
    case InputMode::kKnowledgeHistory: return "knowledge+history";
  }
  return "";
}

std::optional<Task> ParseTask(std::string_view s) {
  if (s == "emotion") return Task::kEmotion;
  if (s == "intent") return Task::kIntent;
  return std::nullopt;
}

std::optional<InputMode> ParseInputMode(std::string_view s) {
  for (auto m : kAllModes) {
    if (ToString(m) == s) return m;
  }
  return std::nullopt;
}

std::vector<kb::Relation> KnowledgeRelations(Task t) {
  if (t == Task::kEmotion) return {kb::Relation::kXAttr, kb::Relation::kXReact};
  return {kb::Relation::kOReact, kb::Relation::kOEffect};
}

std::vector<KnowledgeTail> SampleKnowledge(const corpus::ParsedUtterance& utt, Task task,
                                           const graph::Graph& g, const link::HeadIndex& heads,
                                           embed::EmbeddingProvider& provider,
                                           const KnowledgeConfig& cfg) {
  std::map<std::string, double> best;
  for (const auto& m : extract::ExtractParsing(utt, cfg.extractor)) {
    auto match = link::LinkMention(m, heads, provider, cfg.threshold);
    if (!match || !g.HasNode(match->head_id)) continue;
    auto [it, inserted] = best.emplace(match->head_id, match->score);
    if (!inserted) it->second = std::max(it->second, match->score);
  }
  std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<KnowledgeTail> out;
  std::set<std::string> seen;
  const auto atomic = graph::FamilySet::Of({graph::EdgeFamily::kAtomic});
  for (kb::Relation r : KnowledgeRelations(task)) {
    std::size_t taken = 0;
    for (const auto& [head, score] : ranked) {
      for (const auto& n : g.Neighbors(head, atomic, graph::Direction::kOut)) {
        if (taken >= cfg.per_relation) break;
        if (n.edge->relation != r) continue;
        if (!seen.insert(n.node->text).second) continue;
        out.push_back(KnowledgeTail{n.node->text, r, head, score});
        ++taken;
      }
      if (taken >= cfg.per_relation) break;
    }
  }
  return out;
}

std::string AssembleInput(const TaskInstance& instance, InputMode mode) {
  std::vector<std::string> parts;
  auto push = [&](const std::string& s) {
    std::string t = text::Trim(s);
    if (!t.empty()) parts.push_back(std::move(t));
  };
  const bool history = mode == InputMode::kHistory || mode == InputMode::kKnowledgeHistory;
  const bool knowledge = mode == InputMode::kKnowledge || mode == InputMode::kKnowledgeHistory;
  if (history) {
    const std::size_t n = instance.history.size();
    for (std::size_t i = n > 2 ? n - 2 : 0; i < n; ++i) push(instance.history[i]);
  }
  push(instance.current);
  if (knowledge) {
    for (const auto& k : instance.knowledge) push(k.text);
  }
  return text::Join(parts, kSeparator);
}

std::vector<TaskInstance> BuildInstances(const corpus::Corpus& corpus, Task task,
                                         const graph::Graph& g, const link::HeadIndex& heads,
                                         embed::EmbeddingProvider& provider,
                                         const KnowledgeConfig& cfg, std::size_t threads) {
  std::vector<std::vector<TaskInstance>> per_conv(corpus.conversations.size());
  io::ParallelFor(corpus.conversations.size(), threads, [&](std::size_t c) {
    const auto& conv = corpus.conversations[c];
    for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
      const auto& u = conv.utterances[i];
      TaskInstance inst;
      inst.conversation_id = conv.id;
      inst.utterance_index = u.index;
      for (std::size_t h = i >= 2 ? i - 2 : 0; h < i; ++h) {
        inst.history.push_back(conv.utterances[h].text);
      }
      inst.current = u.text;
      if (const auto* pu = corpus.FindParse(conv.id, u.index)) {
        inst.knowledge = SampleKnowledge(*pu, task, g, heads, provider, cfg);
      }
      inst.label = std::string(task == Task::kEmotion ? ToString(u.emotion) : ToString(u.intent));
      per_conv[c].push_back(std::move(inst));
    }
  });
  std::vector<TaskInstance> out;
  for (auto& v : per_conv) {
    for (auto& inst : v) out.push_back(std::move(inst));
  }
  return out;
}

void NearestCentroidClassifier::Train(
    const std::vector<std::pair<std::string, std::string>>& examples) {
  if (examples.empty()) throw ValidationError("examples", "training set is empty");
  std::vector<std::string> texts;
  for (const auto& [input, label] : examples) texts.push_back(input);
  const auto vectors = provider_.Embed(texts);
  std::map<std::string, std::size_t> counts;
  centroids_.clear();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto& c = centroids_[examples[i].second];
    if (c.empty()) c.assign(vectors[i].size(), 0.0);
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += vectors[i][d];
    ++counts[examples[i].second];
  }
  for (auto& [label, c] : centroids_) {
    for (double& x : c) x /= static_cast<double>(counts[label]);
  }
}

std::string NearestCentroidClassifier::Predict(const std::string& input) {
  if (centroids_.empty()) throw ValidationError("classifier", "not trained");
  const auto v = provider_.EmbedOne(input);
  std::string best;
  double best_score = -2.0;
  for (const auto& [label, c] : centroids_) {
    double s = -1.0;
    try {
      s = embed::Cosine(v, c);
    } catch (const ValidationError&) {
      // A centroid of opposing vectors can cancel to zero.
    }
    if (s > best_score) {
      best_score = s;
      best = label;
    }
  }
  return best;
}

TaskResult EvaluateTask(const std::vector<TaskInstance>& instances, TextClassifier& classifier,
                        InputMode mode, std::size_t threads) {
  if (instances.empty()) throw ValidationError("instances", "at least one instance is required");
  std::vector<char> correct(instances.size(), 0);
  io::ParallelFor(instances.size(), classifier.thread_safe() ? threads : 1, [&](std::size_t i) {
    correct[i] = classifier.Predict(AssembleInput(instances[i], mode)) == instances[i].label;
  });
  TaskResult r;
  r.total = instances.size();
  r.correct = static_cast<std::size_t>(std::count(correct.begin(), correct.end(), 1));
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

std::pair<std::vector<TaskInstance>, std::vector<TaskInstance>> SplitInstances(
    std::vector<TaskInstance> instances, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("fraction", "must be in [0, 1]");
  std::mt19937_64 rng(seed);
  for (std::size_t i = instances.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(instances[i - 1], instances[pick(rng)]);
  }
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(instances.size())));
  std::vector<TaskInstance> second(std::make_move_iterator(instances.begin() + static_cast<std::ptrdiff_t>(cut)),
                                   std::make_move_iterator(instances.end()));
  instances.resize(cut);
  return {std::move(instances), std::move(second)};
}

json ToJson(const TaskInstance& instance, InputMode mode) {
  json knowledge = json::array();
  for (const auto& k : instance.knowledge) {
    knowledge.push_back({{"text", k.text},
                         {"relation", kb::ToString(k.relation)},
                         {"head_id", k.head_id},
                         {"score", k.score}});
  }
  return json{{"conversation", instance.conversation_id},
              {"utterance", instance.utterance_index},
              {"history", instance.history},
              {"current", instance.current},
              {"knowledge", std::move(knowledge)},
              {"label", instance.label},
              {"mode", ToString(mode)},
              {"input", AssembleInput(instance, mode)}};
}

json ToJson(const TaskResult& r) {
  return json{{"accuracy", r.accuracy}, {"correct", r.correct}, {"total", r.total}};
}

}  // namespace convkg::tasks
