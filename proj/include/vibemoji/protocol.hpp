#pragma once

// Newline-delimited JSON frames. Every frame has `type` and `seq`.
//
// client -> server
//   hello      {user, token}
//   msg        {to, body}              seq becomes the message sequence
//   ack        {sender}                acknowledges delivered (sender, seq)
//   recommend  {select: {modality: id, ...}, target}
//   replay     {message_id: {sender, seq}}
// server -> client
//   hello_ok      {user, partner, last_seq}          seq echoes hello
//   ack           {message_id, sent_ts, duplicate}   seq echoes msg/replay
//   msg           {sender, recipient, sent_ts, body} seq is the message seq
//   replay_event  {sender, recipient, sent_ts, message_id, body}
//   recommend_ok  {target, order}
//   error         {code, message}                    seq echoes the request

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vibemoji/emotion.hpp"
#include "vibemoji/envelope.hpp"
#include "vibemoji/error.hpp"
#include "vibemoji/history.hpp"

namespace vibemoji::protocol {

struct Hello {
  std::uint64_t seq = 0;
  std::string user;
  std::string token;
};

struct Msg {
  std::uint64_t seq = 0;
  std::string to;
  std::string body;
};

struct Ack {
  std::uint64_t seq = 0;
  std::string sender;
};

struct Recommend {
  std::uint64_t seq = 0;
  std::vector<ElementRef> select;
  Modality target = Modality::Sticker;
};

struct Replay {
  std::uint64_t seq = 0;
  MessageId message_id;
};

using ClientFrame = std::variant<Hello, Msg, Ack, Recommend, Replay>;

/// A frame that could not be understood; `seq` is whatever could be salvaged.
class FrameError : public Error {
 public:
  FrameError(std::uint64_t seq, std::string message) : Error(std::move(message)), seq_(seq) {}
  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

ClientFrame parse_client_frame(std::string_view line);

// Server frames. None carry the trailing newline.
std::string hello_ok_frame(std::uint64_t seq, std::string_view user, std::string_view partner,
                           std::uint64_t last_seq);
std::string ack_frame(std::uint64_t seq, const MessageId& id, std::int64_t sent_ts, bool duplicate);
/// `msg` or `replay_event` depending on the envelope kind.
std::string envelope_frame(const Envelope& e);
std::string recommend_ok_frame(std::uint64_t seq, Modality target,
                               const std::vector<std::string>& order);
std::string error_frame(std::uint64_t seq, std::string_view code, std::string_view message);

// Client frame builders.
std::string hello_frame(std::uint64_t seq, std::string_view user, std::string_view token);
std::string msg_frame(std::uint64_t seq, std::string_view to, std::string_view body);
std::string client_ack_frame(const MessageId& delivered);
std::string recommend_frame(std::uint64_t seq, const std::vector<ElementRef>& select,
                            Modality target);
std::string replay_frame(std::uint64_t seq, const MessageId& target);

}  // namespace vibemoji::protocol
