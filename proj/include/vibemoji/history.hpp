#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vibemoji/catalog.hpp"
#include "vibemoji/codec.hpp"
#include "vibemoji/emotion.hpp"

namespace vibemoji {

/// Ids are unique only within a modality, so pair keys carry both.
struct ElementRef {
  Modality modality = Modality::Sticker;
  std::string id;

  friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

/// Combination counts F(u, s) for one user. Keys are unordered pairs.
class PairCounts {
 public:
  using Key = std::pair<ElementRef, ElementRef>;

  std::uint64_t count(const ElementRef& a, const ElementRef& b) const;
  void add(const ElementRef& a, const ElementRef& b, std::uint64_t n = 1);
  const std::map<Key, std::uint64_t>& entries() const noexcept { return counts_; }

  friend bool operator==(const PairCounts&, const PairCounts&) = default;

 private:
  static Key key(const ElementRef& a, const ElementRef& b);

  std::map<Key, std::uint64_t> counts_;
};

/// Cross-modality pairs present in an emoticon: k elements give k(k-1)/2.
std::vector<std::pair<ElementRef, ElementRef>> emoticon_pairs(const MultimodalEmoticon& e);

/// Throws Error naming the first id missing from the catalog.
void check_emoticon_ids(const MultimodalEmoticon& e, const Catalog& catalog);

class UsageHistory {
 public:
  /// Increments every cross-modality pair of the emoticon by one. With a
  /// catalog, unknown ids are rejected before anything changes.
  void record_send(const std::string& user_id, const MultimodalEmoticon& e,
                   const Catalog* catalog = nullptr);
  std::uint64_t pair_count(const std::string& user_id, const ElementRef& a,
                           const ElementRef& b) const;
  PairCounts snapshot(const std::string& user_id) const;

  friend bool operator==(const UsageHistory&, const UsageHistory&) = default;

 private:
  std::map<std::string, PairCounts, std::less<>> by_user_;
};

enum class EventKind { OpenKeyboard, Select, Deselect, Send, Replay };

std::string_view to_string(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

/// One line of the interaction log. `payload` holds the element id for
/// select/deselect, the emoticon token(s) or `#<length>` for sends, and is
/// empty otherwise.
struct InteractionEvent {
  std::int64_t timestamp_ms = 0;
  std::string user_id;
  EventKind kind = EventKind::OpenKeyboard;
  std::string payload;

  std::optional<std::string> element_id() const;
  /// Decoded emoticons of a send; empty for text-only sends and other kinds.
  std::vector<MultimodalEmoticon> emoticons() const;
  bool is_emoticon_send() const;

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

/// Builds the send event for a message. Text content is reduced to its
/// length.
InteractionEvent make_send_event(std::int64_t ts, std::string user_id, const MessageBody& body);

/// `timestamp<TAB>user<TAB>kind<TAB>payload`, no trailing newline.
std::string format_event(const InteractionEvent& e);
/// Throws ParseError on a malformed line.
InteractionEvent parse_event(std::string_view line);

struct AuthoringTimeframe {
  std::string user_id;
  std::int64_t start_ts = 0;
  std::int64_t send_ts = 0;

  std::int64_t duration_ms() const noexcept { return send_ts - start_ts; }

  friend bool operator==(const AuthoringTimeframe&, const AuthoringTimeframe&) = default;
};

/// One timeframe per emoticon send of `user_id`, measured from the first
/// keyboard operation since the previous emoticon send. Events must be
/// sorted by timestamp.
std::vector<AuthoringTimeframe> authoring_timeframes(const std::string& user_id,
                                                     std::span<const InteractionEvent> events);

struct UsageSummary {
  std::uint64_t messages_sent = 0;
  std::uint64_t emoticons_sent = 0;
  std::optional<std::int64_t> median_timeframe_ms;

  friend bool operator==(const UsageSummary&, const UsageSummary&) = default;
};

/// Lower middle for even counts.
std::optional<std::int64_t> lower_median(std::vector<std::int64_t> values);

UsageSummary summarize(const std::string& user_id, std::span<const InteractionEvent> events);

/// Append-only interaction log with in-memory pair counts rebuilt on open.
/// An empty path keeps everything in memory.
class HistoryStore {
 public:
  explicit HistoryStore(std::filesystem::path log_path = {}, const Catalog* catalog = nullptr);
  ~HistoryStore();

  HistoryStore(const HistoryStore&) = delete;
  HistoryStore& operator=(const HistoryStore&) = delete;

  /// Persists the event, then applies emoticon sends to the counts.
  void append(const InteractionEvent& e);

  PairCounts snapshot(const std::string& user_id) const;
  std::uint64_t pair_count(const std::string& user_id, const ElementRef& a,
                           const ElementRef& b) const;
  std::vector<InteractionEvent> events(const std::string& user_id) const;
  UsageSummary usage_summary(const std::string& user_id) const;
  std::vector<std::string> users() const;

  void flush();

 private:
  const Catalog* catalog_;
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  mutable std::shared_mutex mu_;
  UsageHistory counts_;
  std::map<std::string, std::vector<InteractionEvent>, std::less<>> events_;
};

}  // namespace vibemoji
