#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vibemoji {

/// Token grammar, bit-exact on the wire:
///   [[VE1:<sticker>:<vibration or ->:<animation or ->]]
inline constexpr std::string_view kTokenOpen = "[[VE1:";
inline constexpr std::string_view kTokenClose = "]]";
inline constexpr std::string_view kAbsent = "-";

struct MultimodalEmoticon {
  std::string sticker_id;
  std::optional<std::string> vibration_id;
  std::optional<std::string> animation_id;

  /// Number of present elements (1 to 3).
  std::size_t element_count() const noexcept {
    return 1 + (vibration_id ? 1 : 0) + (animation_id ? 1 : 0);
  }

  friend bool operator==(const MultimodalEmoticon&, const MultimodalEmoticon&) = default;
};

struct TextSegment {
  std::string text;
  friend bool operator==(const TextSegment&, const TextSegment&) = default;
};

using Segment = std::variant<TextSegment, MultimodalEmoticon>;

struct MessageBody {
  std::vector<Segment> segments;

  bool has_emoticon() const noexcept;
  std::vector<MultimodalEmoticon> emoticons() const;

  friend bool operator==(const MessageBody&, const MessageBody&) = default;
};

/// Throws Error when an id would break the token grammar.
std::string encode_emoticon(const MultimodalEmoticon& e);

/// Total: never throws. Anything that is not a well-formed VE1 token stays
/// literal text; adjacent text is merged into one segment.
MessageBody decode_body(std::string_view text);

/// Inverse of decode_body. Throws Error when a text segment would itself
/// decode as a token, since that body cannot survive the wire.
std::string encode_body(const MessageBody& body);

}  // namespace vibemoji
