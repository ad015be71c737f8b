#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace vibemoji {

enum class Modality { Sticker, Animation, Vibration };

inline constexpr std::array<Modality, 3> kAllModalities{Modality::Sticker, Modality::Animation,
                                                         Modality::Vibration};

std::string_view to_string(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view text) noexcept;

inline constexpr double kScaleMin = 1.0;
inline constexpr double kScaleMax = 7.0;

/// Valence/arousal coordinates on the 7-point rating scale.
struct EmotionPoint {
  double valence = 4.0;
  double arousal = 4.0;

  bool in_range() const noexcept;

  friend bool operator==(const EmotionPoint&, const EmotionPoint&) = default;
};

/// Euclidean distance in the valence-arousal plane.
double distance(const EmotionPoint& a, const EmotionPoint& b) noexcept;

}  // namespace vibemoji
