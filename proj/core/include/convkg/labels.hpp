#ifndef CONVKG_LABELS_HPP_
#define CONVKG_LABELS_HPP_

#include <array>
#include <optional>
#include <string_view>

namespace convkg {

// Speaker emotion annotated on every utterance.
enum class Emotion { kJoy, kAngry, kSad, kSurprising, kOther };

// Response intent annotated on every utterance.
enum class Intent { kAsk, kAdvise, kDescribe, kOpinion, kConsole, kOther };

inline constexpr std::array<Emotion, 5> kAllEmotions = {
    Emotion::kJoy, Emotion::kAngry, Emotion::kSad, Emotion::kSurprising,
    Emotion::kOther};

inline constexpr std::array<Intent, 6> kAllIntents = {
    Intent::kAsk,     Intent::kAdvise,  Intent::kDescribe,
    Intent::kOpinion, Intent::kConsole, Intent::kOther};

std::string_view ToString(Emotion e);
std::string_view ToString(Intent i);

// Accepts the canonical names ("joy", "angry", ...) and "others".
std::optional<Emotion> ParseEmotion(std::string_view s);
// Accepts the canonical names and "description" as a synonym of describe.
std::optional<Intent> ParseIntent(std::string_view s);

// Labels allowed on an emotion_intent edge: every intent except other.
inline bool IsEdgeIntent(Intent i) { return i != Intent::kOther; }

}  // namespace convkg

#endif  // CONVKG_LABELS_HPP_
