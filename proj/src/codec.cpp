#include "vibemoji/codec.hpp"

#include "vibemoji/error.hpp"

namespace vibemoji {

namespace {

bool is_field_char(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x20 && u != 0x7f && c != ':' && c != '[' && c != ']';
}

bool is_field(std::string_view f) noexcept {
  if (f.empty()) return false;
  for (char c : f) {
    if (!is_field_char(c)) return false;
  }
  return true;
}

// Reads one field starting at `pos`; returns the field end.
std::size_t scan_field(std::string_view text, std::size_t pos) noexcept {
  while (pos < text.size() && is_field_char(text[pos])) ++pos;
  return pos;
}

// Attempts a full token at `pos` (which points at "[["). Returns the length
// consumed, or 0 when the text there is not a token.
std::size_t match_token(std::string_view text, std::size_t pos, MultimodalEmoticon& out) {
  if (text.substr(pos, kTokenOpen.size()) != kTokenOpen) return 0;
  std::size_t cur = pos + kTokenOpen.size();
  std::string_view fields[3];
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = scan_field(text, cur);
    if (end == cur) return 0;
    fields[i] = text.substr(cur, end - cur);
    cur = end;
    if (i < 2) {
      if (cur >= text.size() || text[cur] != ':') return 0;
      ++cur;
    }
  }
  if (text.substr(cur, kTokenClose.size()) != kTokenClose) return 0;
  if (fields[0] == kAbsent) return 0;
  out.sticker_id = std::string(fields[0]);
  out.vibration_id.reset();
  out.animation_id.reset();
  if (fields[1] != kAbsent) out.vibration_id = std::string(fields[1]);
  if (fields[2] != kAbsent) out.animation_id = std::string(fields[2]);
  return cur + kTokenClose.size() - pos;
}

void append_text(std::vector<Segment>& segs, std::string_view text) {
  if (text.empty()) return;
  if (!segs.empty()) {
    if (auto* t = std::get_if<TextSegment>(&segs.back())) {
      t->text += text;
      return;
    }
  }
  segs.emplace_back(TextSegment{std::string(text)});
}

}  // namespace

bool MessageBody::has_emoticon() const noexcept {
  for (const auto& s : segments) {
    if (std::holds_alternative<MultimodalEmoticon>(s)) return true;
  }
  return false;
}

std::vector<MultimodalEmoticon> MessageBody::emoticons() const {
  std::vector<MultimodalEmoticon> out;
  for (const auto& s : segments) {
    if (const auto* e = std::get_if<MultimodalEmoticon>(&s)) out.push_back(*e);
  }
  return out;
}

std::string encode_emoticon(const MultimodalEmoticon& e) {
  auto check = [](std::string_view id, const char* role) {
    if (!is_field(id) || id == kAbsent) {
      throw Error(std::string("cannot encode ") + role + " id \"" + std::string(id) +
                  "\": empty, \"-\", or contains a delimiter or control character");
    }
  };
  check(e.sticker_id, "sticker");
  if (e.vibration_id) check(*e.vibration_id, "vibration");
  if (e.animation_id) check(*e.animation_id, "animation");

  std::string out(kTokenOpen);
  out += e.sticker_id;
  out += ':';
  out += e.vibration_id ? std::string_view(*e.vibration_id) : kAbsent;
  out += ':';
  out += e.animation_id ? std::string_view(*e.animation_id) : kAbsent;
  out += kTokenClose;
  return out;
}

MessageBody decode_body(std::string_view text) {
  MessageBody body;
  std::size_t literal_start = 0;
  std::size_t pos = 0;
  while ((pos = text.find("[[", pos)) != std::string_view::npos) {
    MultimodalEmoticon e;
    const std::size_t len = match_token(text, pos, e);
    if (len == 0) {
      ++pos;
      continue;
    }
    append_text(body.segments, text.substr(literal_start, pos - literal_start));
    body.segments.emplace_back(std::move(e));
    pos += len;
    literal_start = pos;
  }
  append_text(body.segments, text.substr(literal_start));
  return body;
}

std::string encode_body(const MessageBody& body) {
  std::string out;
  for (const auto& s : body.segments) {
    if (const auto* t = std::get_if<TextSegment>(&s)) {
      out += t->text;
    } else {
      out += encode_emoticon(std::get<MultimodalEmoticon>(s));
    }
  }
  if (decode_body(out).emoticons() != body.emoticons()) {
    throw Error("message text contains an emoticon token or a partial token delimiter");
  }
  return out;
}

}  // namespace vibemoji
