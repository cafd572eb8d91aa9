#include "convkg/labels.hpp"

namespace convkg {

std::string_view ToString(Emotion e) {
  switch (e) {
    case Emotion::kJoy: return "joy";
    case Emotion::kAngry: return "angry";
    case Emotion::kSad: return "sad";
    case Emotion::kSurprising: return "surprising";
    case Emotion::kOther: return "other";
  }
  return "other";
}

std::string_view ToString(Intent i) {
  switch (i) {
    case Intent::kAsk: return "ask";
    case Intent::kAdvise: return "advise";
    case Intent::kDescribe: return "describe";
    case Intent::kOpinion: return "opinion";
    case Intent::kConsole: return "console";
    case Intent::kOther: return "other";
  }
  return "other";
}

std::optional<Emotion> ParseEmotion(std::string_view s) {
  for (Emotion e : kAllEmotions) {
    if (ToString(e) == s) return e;
  }
  if (s == "others") return Emotion::kOther;
  return std::nullopt;
}

std::optional<Intent> ParseIntent(std::string_view s) {
  for (Intent i : kAllIntents) {
    if (ToString(i) == s) return i;
  }
  if (s == "description") return Intent::kDescribe;
  return std::nullopt;
}

}  // namespace convkg
