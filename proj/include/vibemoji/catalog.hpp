#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vibemoji/emotion.hpp"

namespace vibemoji {

inline constexpr int kCatalogVersion = 1;
inline constexpr std::int64_t kMaxVibrationExtentMs = 10'000;

struct StickerAsset {
  std::vector<char32_t> codepoints;

  friend bool operator==(const StickerAsset&, const StickerAsset&) = default;
};

struct AnimationAsset {
  std::string behavior;
  std::int64_t period_ms = 0;
  double amplitude = 0.0;

  friend bool operator==(const AnimationAsset&, const AnimationAsset&) = default;
};

/// One keyframe of a vibrotactile pattern.
struct VibrationEvent {
  std::int64_t offset_ms = 0;
  std::int64_t duration_ms = 0;
  double intensity = 0.0;
  double sharpness = 0.0;

  friend bool operator==(const VibrationEvent&, const VibrationEvent&) = default;
};

struct VibrationAsset {
  std::vector<VibrationEvent> events;

  /// Last offset + duration; 0 for an empty pattern.
  std::int64_t extent_ms() const noexcept;

  friend bool operator==(const VibrationAsset&, const VibrationAsset&) = default;
};

using AssetSpec = std::variant<StickerAsset, AnimationAsset, VibrationAsset>;

Modality asset_modality(const AssetSpec& asset) noexcept;

struct Element {
  std::string id;
  Modality modality = Modality::Sticker;
  std::string label;
  EmotionPoint emotion;
  AssetSpec asset;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Element ids must survive the emoticon wire token and the tab-separated
/// event log untouched.
bool is_valid_element_id(std::string_view id) noexcept;

/// Immutable after construction; the element order of each modality is its
/// default display order.
class Catalog {
 public:
  Catalog() = default;

  /// Validates every invariant and throws ValidationError listing all
  /// violations.
  Catalog(std::vector<std::string> behaviors, std::vector<Element> stickers,
          std::vector<Element> animations, std::vector<Element> vibrations);

  std::span<const Element> elements(Modality m) const noexcept;
  std::size_t size(Modality m) const noexcept { return elements(m).size(); }
  const std::vector<std::string>& behaviors() const noexcept { return behaviors_; }

  /// nullptr when absent.
  const Element* find(Modality m, std::string_view id) const noexcept;
  /// Position in the default display order.
  std::size_t index_of(Modality m, std::string_view id) const;

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.behaviors_ == b.behaviors_ && a.by_modality_ == b.by_modality_;
  }

 private:
  std::vector<std::string> behaviors_;
  std::array<std::vector<Element>, 3> by_modality_;
  std::array<std::map<std::string, std::size_t, std::less<>>, 3> index_;
};

/// Parses and validates a catalog document. Throws ParseError for malformed
/// text and ValidationError for invariant violations.
Catalog parse_catalog(std::string_view text);
Catalog load_catalog(const std::filesystem::path& path);
std::string serialize_catalog(const Catalog& catalog);

/// Every violation in the document, one line each, or a single parse-error
/// line. Empty means the document loads.
std::vector<std::string> validate_catalog_document(std::string_view text);

struct RatingRecord {
  std::string element_id;
  std::string respondent_id;
  int valence = 0;
  int arousal = 0;
};

/// One JSON object per line; blank lines ignored.
std::vector<RatingRecord> parse_ratings(std::string_view text);

/// Mean valence and arousal per element id.
std::map<std::string, EmotionPoint> aggregate_ratings(std::span<const RatingRecord> records);

/// Same, additionally requiring a record for every id in `required`.
std::map<std::string, EmotionPoint> aggregate_ratings(std::span<const RatingRecord> records,
                                                      std::span<const std::string> required);

/// The k vibrations closest to the sticker in the valence-arousal plane,
/// nearest first; equal distances keep input order.
std::vector<std::string> nearest_vibrations(const Element& sticker,
                                            std::span<const Element> vibrations, std::size_t k);

/// Marks the k nearest vibrations of every sticker and keeps those marked
/// more than once, in input order.
std::vector<std::string> mark_frequency_filter(std::span<const Element> stickers,
                                               std::span<const Element> vibrations, std::size_t k);

}  // namespace vibemoji
