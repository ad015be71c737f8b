#include "vibemoji/protocol.hpp"

#include <json.hpp>

namespace vibemoji::protocol {

using nlohmann::json;

namespace {

std::string dump(const json& j) {
  // Invalid UTF-8 in a body is replaced rather than aborting the frame.
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::uint64_t read_seq(const json& j) {
  if (!j.contains("seq")) return 0;
  const auto& s = j["seq"];
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  if (s.is_number_integer() && s.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(s.get<std::int64_t>());
  }
  return 0;
}

std::string need_string(const json& j, const char* key, std::uint64_t seq) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw FrameError(seq, std::string("missing string field \"") + key + "\"");
  }
  return j[key].get<std::string>();
}

MessageId read_message_id(const json& j, std::uint64_t seq) {
  if (!j.is_object() || !j.contains("sender") || !j["sender"].is_string() || !j.contains("seq") ||
      !j["seq"].is_number_unsigned()) {
    throw FrameError(seq, "message_id needs string sender and unsigned seq");
  }
  return {j["sender"].get<std::string>(), j["seq"].get<std::uint64_t>()};
}

json message_id_json(const MessageId& id) { return {{"sender", id.sender}, {"seq", id.seq}}; }

}  // namespace

ClientFrame parse_client_frame(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw FrameError(0, "frame is not valid JSON");
  }
  if (!j.is_object()) throw FrameError(0, "frame must be a JSON object");
  const std::uint64_t seq = read_seq(j);
  if (!j.contains("seq") || !j["seq"].is_number_unsigned()) {
    throw FrameError(seq, "frame needs an unsigned integer \"seq\"");
  }
  const std::string type = need_string(j, "type", seq);

  if (type == "hello") {
    return Hello{seq, need_string(j, "user", seq), need_string(j, "token", seq)};
  }
  if (type == "msg") {
    return Msg{seq, need_string(j, "to", seq), need_string(j, "body", seq)};
  }
  if (type == "ack") {
    return Ack{seq, need_string(j, "sender", seq)};
  }
  if (type == "recommend") {
    Recommend r;
    r.seq = seq;
    const auto target = parse_modality(need_string(j, "target", seq));
    if (!target) throw FrameError(seq, "unknown target modality");
    r.target = *target;
    if (!j.contains("select") || !j["select"].is_object()) {
      throw FrameError(seq, "recommend needs a \"select\" object");
    }
    for (const auto& [key, value] : j["select"].items()) {
      const auto m = parse_modality(key);
      if (!m || !value.is_string()) {
        throw FrameError(seq, "select entries map a modality name to an element id");
      }
      r.select.push_back({*m, value.get<std::string>()});
    }
    return r;
  }
  if (type == "replay") {
    if (!j.contains("message_id")) throw FrameError(seq, "replay needs \"message_id\"");
    return Replay{seq, read_message_id(j["message_id"], seq)};
  }
  throw FrameError(seq, "unknown frame type \"" + type + "\"");
}

std::string hello_ok_frame(std::uint64_t seq, std::string_view user, std::string_view partner,
                           std::uint64_t last_seq) {
  return dump({{"type", "hello_ok"},
               {"seq", seq},
               {"user", user},
               {"partner", partner},
               {"last_seq", last_seq}});
}

std::string ack_frame(std::uint64_t seq, const MessageId& id, std::int64_t sent_ts, bool duplicate) {
  return dump({{"type", "ack"},
               {"seq", seq},
               {"message_id", message_id_json(id)},
               {"sent_ts", sent_ts},
               {"duplicate", duplicate}});
}

std::string envelope_frame(const Envelope& e) {
  json j{{"seq", e.id.seq},
         {"sender", e.id.sender},
         {"recipient", e.recipient},
         {"sent_ts", e.sent_ts},
         {"body", e.body}};
  if (e.kind == EnvelopeKind::Message) {
    j["type"] = "msg";
  } else {
    j["type"] = "replay_event";
    if (e.replay_of) j["message_id"] = message_id_json(*e.replay_of);
  }
  return dump(j);
}

std::string recommend_ok_frame(std::uint64_t seq, Modality target,
                               const std::vector<std::string>& order) {
  return dump({{"type", "recommend_ok"}, {"seq", seq}, {"target", to_string(target)}, {"order", order}});
}

std::string error_frame(std::uint64_t seq, std::string_view code, std::string_view message) {
  return dump({{"type", "error"}, {"seq", seq}, {"code", code}, {"message", message}});
}

std::string hello_frame(std::uint64_t seq, std::string_view user, std::string_view token) {
  return dump({{"type", "hello"}, {"seq", seq}, {"user", user}, {"token", token}});
}

std::string msg_frame(std::uint64_t seq, std::string_view to, std::string_view body) {
  return dump({{"type", "msg"}, {"seq", seq}, {"to", to}, {"body", body}});
}

std::string client_ack_frame(const MessageId& delivered) {
  return dump({{"type", "ack"}, {"seq", delivered.seq}, {"sender", delivered.sender}});
}

std::string recommend_frame(std::uint64_t seq, const std::vector<ElementRef>& select,
                            Modality target) {
  json sel = json::object();
  for (const auto& ref : select) sel[std::string(to_string(ref.modality))] = ref.id;
  return dump({{"type", "recommend"}, {"seq", seq}, {"select", sel}, {"target", to_string(target)}});
}

std::string replay_frame(std::uint64_t seq, const MessageId& target) {
  return dump({{"type", "replay"}, {"seq", seq}, {"message_id", message_id_json(target)}});
}

}  // namespace vibemoji::protocol
