#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vibemoji/catalog.hpp"
#include "vibemoji/envelope.hpp"
#include "vibemoji/error.hpp"
#include "vibemoji/history.hpp"
#include "vibemoji/journal.hpp"
#include "vibemoji/notifier.hpp"
#include "vibemoji/reco.hpp"

namespace vibemoji {

enum class RelayErrorCode {
  UnknownUser,
  BadToken,
  NotAuthenticated,
  Superseded,
  NotPartner,
  BodyTooLarge,
  StaleSequence,
  UnknownElement,
  UnknownMessage,
  NoEmoticon,
  BadSelection,
};

std::string_view to_string(RelayErrorCode code) noexcept;

class RelayError : public Error {
 public:
  RelayError(RelayErrorCode code, const std::string& message) : Error(message), code_(code) {}
  RelayErrorCode code() const noexcept { return code_; }

 private:
  RelayErrorCode code_;
};

/// A live connection as seen by the relay. Calls arrive with the recipient's
/// queue locked, so implementations must only enqueue work.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void deliver(const Envelope& envelope) = 0;
  /// The connection was superseded by a newer one for the same user.
  virtual void close() = 0;
};

struct UserPair {
  std::string first;
  std::string second;
  std::string first_token;
  std::string second_token;
};

struct RelayOptions {
  /// Holds relay.journal and events.log; empty keeps everything in memory.
  std::filesystem::path data_dir;
  Weights weights;
  std::function<std::int64_t()> clock;
  std::shared_ptr<Notifier> notifier;
};

struct Session {
  std::string user;
  std::uint64_t epoch = 0;
};

struct HelloResult {
  Session session;
  std::string partner;
  /// Highest message sequence the relay accepted from this user.
  std::uint64_t last_seq = 0;
};

struct SendAck {
  MessageId id;
  std::int64_t sent_ts = 0;
  /// The sequence was already accepted; nothing new was queued.
  bool duplicate = false;
};

/// Per (sender, recipient) accounting.
struct QueueStats {
  std::uint64_t accepted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t queued = 0;
};

std::int64_t system_clock_ms();

/// Pairs users, relays envelopes with at-least-once delivery, and answers
/// recommendation and replay requests. Every queue mutation is journaled
/// before the call returns, and a new Relay over the same data_dir resumes
/// where the previous one stopped.
///
/// Envelopes stay queued until the recipient acknowledges them; each
/// (re)connection redelivers everything still queued, so clients de-duplicate
/// by message id.
class Relay {
 public:
  Relay(const Catalog& catalog, std::vector<UserPair> pairs, RelayOptions options = {});
  ~Relay();

  Relay(const Relay&) = delete;
  Relay& operator=(const Relay&) = delete;

  /// Authenticates and installs `sink` as the user's only connection. The
  /// previous sink, if any, is closed first. `before_flush` runs before the
  /// queue is redelivered, so a greeting can precede queued traffic.
  HelloResult connect(const std::string& user, const std::string& token, std::shared_ptr<Sink> sink,
                      const std::function<void(const HelloResult&)>& before_flush = {});
  /// No-op for superseded sessions.
  void disconnect(const Session& session);

  SendAck send(const Session& session, const std::string& recipient, std::uint64_t seq,
               const std::string& body);
  /// Recipient confirms an envelope; unknown ids are ignored.
  void acknowledge(const Session& session, const MessageId& id);
  std::vector<std::string> recommend(const Session& session, const std::vector<ElementRef>& selected,
                                     Modality target);
  /// Re-renders an emoticon message on both devices. The initiator gets the
  /// event immediately; the partner's copy is queued like a message.
  SendAck replay(const Session& session, std::uint64_t seq, const MessageId& target);

  QueueStats stats(const std::string& sender, const std::string& recipient) const;
  std::size_t queue_length(const std::string& user) const;
  std::vector<Envelope> queued(const std::string& user) const;
  bool online(const std::string& user) const;
  std::vector<std::string> users() const;

  const Catalog& catalog() const noexcept { return catalog_; }
  HistoryStore& history() noexcept { return *history_; }

  /// Forces the journal and event log to stable storage.
  void flush();

 private:
  struct Inbound {
    std::uint64_t accepted = 0;
    std::uint64_t delivered = 0;
  };

  struct UserState {
    mutable std::mutex mu;
    std::string partner;
    std::string token;
    std::shared_ptr<Sink> sink;
    std::uint64_t epoch = 0;
    std::uint64_t high_water = 0;
    std::deque<Envelope> pending;
    std::map<std::string, Inbound> inbound;
    /// Envelopes this user sent or received, for replay and de-duplication.
    std::map<MessageId, Envelope> archive;
    std::vector<ElementRef> last_selection;
  };

  UserState& state(const std::string& user) const;
  void require_current(const UserState& st, const Session& session) const;
  void recover();
  SendAck accept(UserState& me, UserState& peer, const Session& session, Envelope envelope);
  /// Ack for a sequence at or below the high-water mark. Throws when it
  /// names no accepted envelope.
  SendAck duplicate_ack(const UserState& me, const Session& session, std::uint64_t seq) const;

  const Catalog& catalog_;
  RelayOptions options_;
  std::map<std::string, std::unique_ptr<UserState>, std::less<>> users_;
  std::unique_ptr<Journal> journal_;
  std::unique_ptr<HistoryStore> history_;
};

}  // namespace vibemoji
