#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace vibemoji {

/// Sender-scoped message identity; sequence numbers grow strictly per sender.
struct MessageId {
  std::string sender;
  std::uint64_t seq = 0;

  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

enum class EnvelopeKind { Message, Replay };

struct Envelope {
  MessageId id;
  std::string recipient;
  std::int64_t sent_ts = 0;
  /// Codec-format text, verbatim.
  std::string body;
  EnvelopeKind kind = EnvelopeKind::Message;
  /// Set for replays: the emoticon message being re-rendered.
  std::optional<MessageId> replay_of;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

inline constexpr std::size_t kMaxBodyBytes = 64 * 1024;

}  // namespace vibemoji
