#include "emoidx/emotion.hpp"

#include <string>

#include "emoidx/error.hpp"

namespace emoidx {

std::string_view to_string(Emotion e) {
    switch (e) {
    case Emotion::Anger: return "Anger";
    case Emotion::Confusion: return "Confusion";
    case Emotion::Depression: return "Depression";
    case Emotion::Fatigue: return "Fatigue";
    case Emotion::Friendliness: return "Friendliness";
    case Emotion::Tension: return "Tension";
    case Emotion::Vigor: return "Vigor";
    }
    return "?";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
    for (Emotion e : kAllEmotions) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

Emotion emotion_from_string(std::string_view name) {
    if (auto e = parse_emotion(name)) return *e;
    throw DataError("unknown emotion category '" + std::string(name) + "'");
}

} // namespace emoidx
