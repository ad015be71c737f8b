#include "vibemoji/emotion.hpp"

#include <cmath>

namespace vibemoji {

std::string_view to_string(Modality m) noexcept {
  switch (m) {
    case Modality::Sticker:
      return "sticker";
    case Modality::Animation:
      return "animation";
    case Modality::Vibration:
      return "vibration";
  }
  return "unknown";
}

std::optional<Modality> parse_modality(std::string_view text) noexcept {
  for (Modality m : kAllModalities) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

bool EmotionPoint::in_range() const noexcept {
  auto ok = [](double x) { return std::isfinite(x) && x >= kScaleMin && x <= kScaleMax; };
  return ok(valence) && ok(arousal);
}

double distance(const EmotionPoint& a, const EmotionPoint& b) noexcept {
  const double dv = a.valence - b.valence;
  const double da = a.arousal - b.arousal;
  return std::sqrt(dv * dv + da * da);
}

}  // namespace vibemoji
