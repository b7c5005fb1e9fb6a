#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace emoidx {

// The seven POMS2 mood categories. Enumerators are declared in name order so
// that comparing enum values orders by English label.
enum class Emotion {
    Anger,
    Confusion,
    Depression,
    Fatigue,
    Friendliness,
    Tension,
    Vigor,
};

inline constexpr std::array<Emotion, 7> kAllEmotions = {
    Emotion::Anger,   Emotion::Confusion, Emotion::Depression, Emotion::Fatigue,
    Emotion::Friendliness, Emotion::Tension, Emotion::Vigor,
};

std::string_view to_string(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view name);
// Like parse_emotion but throws DataError on unknown labels.
Emotion emotion_from_string(std::string_view name);

inline constexpr std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }

} // namespace emoidx
