#ifndef CONVKG_TASKS_HPP_
#define CONVKG_TASKS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/embedding.hpp"
#include "convkg/extract.hpp"
#include "convkg/graph.hpp"
#include "convkg/kb.hpp"
#include "convkg/link.hpp"

// Knowledge sampling, input assembly and evaluation for the emotion
// classification and intent prediction benchmarks.
namespace convkg::tasks {

enum class Task { kEmotion, kIntent };
enum class InputMode { kBase, kHistory, kKnowledge, kKnowledgeHistory };

inline constexpr std::array<InputMode, 4> kAllModes = {
    InputMode::kBase, InputMode::kHistory, InputMode::kKnowledge, InputMode::kKnowledgeHistory};

std::string_view ToString(Task t);
std::string_view ToString(InputMode m);
std::optional<Task> ParseTask(std::string_view s);
std::optional<InputMode> ParseInputMode(std::string_view s);

// xAttr, xReact for emotion; oReact, oEffect for intent.
std::vector<kb::Relation> KnowledgeRelations(Task t);

inline constexpr std::string_view kSeparator = " [SEP] ";

struct KnowledgeTail {
  std::string text;
  kb::Relation relation = kb::Relation::kXAttr;
  std::string head_id;
  double score = 0.0;  // match score of head_id for this utterance
};

struct KnowledgeConfig {
  double threshold = link::kDefaultThreshold;
  std::size_t per_relation = 3;
  extract::ExtractorConfig extractor;
};

// Mentions are extracted by parsing, each linked to its best head; heads
// scoring >= threshold contribute their tails of the task's relations via
// atomic graph edges. Heads are visited by score desc, then id; tails are
// deduplicated and capped per relation. Grouped by relation in
// KnowledgeRelations order.
std::vector<KnowledgeTail> SampleKnowledge(const corpus::ParsedUtterance& utt, Task task,
                                           const graph::Graph& g, const link::HeadIndex& heads,
                                           embed::EmbeddingProvider& provider,
                                           const KnowledgeConfig& cfg = {});

inline std::vector<KnowledgeTail> SampleEmotionKnowledge(const corpus::ParsedUtterance& utt,
                                                         const graph::Graph& g,
                                                         const link::HeadIndex& heads,
                                                         embed::EmbeddingProvider& provider,
                                                         const KnowledgeConfig& cfg = {}) {
  return SampleKnowledge(utt, Task::kEmotion, g, heads, provider, cfg);
}

inline std::vector<KnowledgeTail> SampleIntentKnowledge(const corpus::ParsedUtterance& utt,
                                                        const graph::Graph& g,
                                                        const link::HeadIndex& heads,
                                                        embed::EmbeddingProvider& provider,
                                                        const KnowledgeConfig& cfg = {}) {
  return SampleKnowledge(utt, Task::kIntent, g, heads, provider, cfg);
}

struct TaskInstance {
  std::string conversation_id;
  std::size_t utterance_index = 0;
  std::vector<std::string> history;  // up to two prior utterances, oldest first
  std::string current;
  std::vector<KnowledgeTail> knowledge;
  std::string label;
};

// Non-empty parts joined with " [SEP] ": history, current, knowledge tails,
// as selected by the mode.
std::string AssembleInput(const TaskInstance& instance, InputMode mode);

// One instance per utterance of every conversation, labeled with the
// utterance's own emotion or intent. Utterances without a parse get no
// knowledge.
std::vector<TaskInstance> BuildInstances(const corpus::Corpus& corpus, Task task,
                                         const graph::Graph& g, const link::HeadIndex& heads,
                                         embed::EmbeddingProvider& provider,
                                         const KnowledgeConfig& cfg = {}, std::size_t threads = 1);

class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual std::string Predict(const std::string& input) = 0;
  // False makes the harness call Predict from one thread only.
  virtual bool thread_safe() const { return true; }
};

// Nearest centroid over provider embeddings; equal similarities go to the
// label that sorts first.
class NearestCentroidClassifier final : public TextClassifier {
 public:
  explicit NearestCentroidClassifier(embed::EmbeddingProvider& provider) : provider_(provider) {}
  // Throws ValidationError on an empty training set.
  void Train(const std::vector<std::pair<std::string, std::string>>& examples);
  std::string Predict(const std::string& input) override;

 private:
  embed::EmbeddingProvider& provider_;
  std::map<std::string, embed::Vector> centroids_;
};

struct TaskResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Throws ValidationError on an empty instance set.
TaskResult EvaluateTask(const std::vector<TaskInstance>& instances, TextClassifier& classifier,
                        InputMode mode, std::size_t threads = 1);

// Deterministic shuffle then split; the first part gets
// round(fraction * size) instances.
std::pair<std::vector<TaskInstance>, std::vector<TaskInstance>> SplitInstances(
    std::vector<TaskInstance> instances, double fraction, std::uint64_t seed);

nlohmann::json ToJson(const TaskInstance& instance, InputMode mode);
nlohmann::json ToJson(const TaskResult& r);

}  // namespace convkg::tasks

#endif  // CONVKG_TASKS_HPP_
