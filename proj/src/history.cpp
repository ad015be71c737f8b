#include "vibemoji/history.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vibemoji/error.hpp"

namespace vibemoji {

PairCounts::Key PairCounts::key(const ElementRef& a, const ElementRef& b) {
  if (b < a) return {b, a};
  return {a, b};
}

std::uint64_t PairCounts::count(const ElementRef& a, const ElementRef& b) const {
  if (a == b) throw Error("pair_count: a pair needs two distinct elements");
  auto it = counts_.find(key(a, b));
  return it == counts_.end() ? 0 : it->second;
}

void PairCounts::add(const ElementRef& a, const ElementRef& b, std::uint64_t n) {
  if (a.modality == b.modality) throw Error("pair counts are kept for cross-modality pairs only");
  counts_[key(a, b)] += n;
}

std::vector<std::pair<ElementRef, ElementRef>> emoticon_pairs(const MultimodalEmoticon& e) {
  std::vector<ElementRef> present{{Modality::Sticker, e.sticker_id}};
  if (e.vibration_id) present.push_back({Modality::Vibration, *e.vibration_id});
  if (e.animation_id) present.push_back({Modality::Animation, *e.animation_id});
  std::vector<std::pair<ElementRef, ElementRef>> out;
  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = i + 1; j < present.size(); ++j) out.emplace_back(present[i], present[j]);
  }
  return out;
}

void check_emoticon_ids(const MultimodalEmoticon& e, const Catalog& catalog) {
  auto need = [&](Modality m, const std::string& id) {
    if (catalog.find(m, id) == nullptr) {
      throw Error("unknown " + std::string(to_string(m)) + " id \"" + id + "\"");
    }
  };
  need(Modality::Sticker, e.sticker_id);
  if (e.vibration_id) need(Modality::Vibration, *e.vibration_id);
  if (e.animation_id) need(Modality::Animation, *e.animation_id);
}

void UsageHistory::record_send(const std::string& user_id, const MultimodalEmoticon& e,
                               const Catalog* catalog) {
  if (catalog != nullptr) check_emoticon_ids(e, *catalog);
  auto& counts = by_user_[user_id];
  for (const auto& [a, b] : emoticon_pairs(e)) counts.add(a, b);
}

std::uint64_t UsageHistory::pair_count(const std::string& user_id, const ElementRef& a,
                                       const ElementRef& b) const {
  auto it = by_user_.find(user_id);
  if (it == by_user_.end()) {
    if (a == b) throw Error("pair_count: a pair needs two distinct elements");
    return 0;
  }
  return it->second.count(a, b);
}

PairCounts UsageHistory::snapshot(const std::string& user_id) const {
  auto it = by_user_.find(user_id);
  return it == by_user_.end() ? PairCounts{} : it->second;
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::OpenKeyboard:
      return "open_keyboard";
    case EventKind::Select:
      return "select";
    case EventKind::Deselect:
      return "deselect";
    case EventKind::Send:
      return "send";
    case EventKind::Replay:
      return "replay";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (auto k : {EventKind::OpenKeyboard, EventKind::Select, EventKind::Deselect, EventKind::Send,
                 EventKind::Replay}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<std::string> InteractionEvent::element_id() const {
  if (kind == EventKind::Select || kind == EventKind::Deselect) return payload;
  return std::nullopt;
}

std::vector<MultimodalEmoticon> InteractionEvent::emoticons() const {
  if (kind != EventKind::Send) return {};
  return decode_body(payload).emoticons();
}

bool InteractionEvent::is_emoticon_send() const {
  return kind == EventKind::Send && decode_body(payload).has_emoticon();
}

InteractionEvent make_send_event(std::int64_t ts, std::string user_id, const MessageBody& body) {
  InteractionEvent e{ts, std::move(user_id), EventKind::Send, {}};
  if (body.has_emoticon()) {
    for (const auto& emo : body.emoticons()) e.payload += encode_emoticon(emo);
  } else {
    std::size_t length = 0;
    for (const auto& s : body.segments) length += std::get<TextSegment>(s).text.size();
    e.payload = "#" + std::to_string(length);
  }
  return e;
}

std::string format_event(const InteractionEvent& e) {
  std::string out = std::to_string(e.timestamp_ms);
  out += '\t';
  out += e.user_id;
  out += '\t';
  out += to_string(e.kind);
  out += '\t';
  out += e.payload;
  return out;
}

InteractionEvent parse_event(std::string_view line) {
  std::string_view parts[4];
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) throw ParseError("event line needs four tab-separated fields");
    parts[i] = line.substr(start, tab - start);
    start = tab + 1;
  }
  parts[3] = line.substr(start);
  if (parts[3].find('\t') != std::string_view::npos) {
    throw ParseError("event payload contains a tab");
  }
  InteractionEvent e;
  auto [ptr, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), e.timestamp_ms);
  if (ec != std::errc{} || ptr != parts[0].data() + parts[0].size()) {
    throw ParseError("event timestamp is not an integer");
  }
  if (parts[1].empty()) throw ParseError("event has an empty user id");
  e.user_id = std::string(parts[1]);
  auto kind = parse_event_kind(parts[2]);
  if (!kind) throw ParseError("unknown event kind \"" + std::string(parts[2]) + "\"");
  e.kind = *kind;
  e.payload = std::string(parts[3]);
  const bool wants_element = e.kind == EventKind::Select || e.kind == EventKind::Deselect;
  if (wants_element && e.payload.empty()) throw ParseError("select/deselect event needs an element id");
  if (e.kind == EventKind::Send && e.payload.empty()) throw ParseError("send event needs a payload");
  if ((e.kind == EventKind::OpenKeyboard || e.kind == EventKind::Replay) && !e.payload.empty()) {
    throw ParseError("event kind takes no payload");
  }
  return e;
}

std::vector<AuthoringTimeframe> authoring_timeframes(const std::string& user_id,
                                                     std::span<const InteractionEvent> events) {
  std::vector<AuthoringTimeframe> out;
  bool open = false;
  std::int64_t start = 0;
  for (const auto& e : events) {
    if (e.user_id != user_id) continue;
    switch (e.kind) {
      case EventKind::OpenKeyboard:
      case EventKind::Select:
      case EventKind::Deselect:
        if (!open) {
          open = true;
          start = e.timestamp_ms;
        }
        break;
      case EventKind::Send:
        if (e.is_emoticon_send()) {
          out.push_back({user_id, open ? start : e.timestamp_ms, e.timestamp_ms});
          open = false;
        }
        break;
      case EventKind::Replay:
        break;
    }
  }
  return out;
}

std::optional<std::int64_t> lower_median(std::vector<std::int64_t> values) {
  if (values.empty()) return std::nullopt;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

UsageSummary summarize(const std::string& user_id, std::span<const InteractionEvent> events) {
  UsageSummary s;
  for (const auto& e : events) {
    if (e.user_id != user_id || e.kind != EventKind::Send) continue;
    if (e.is_emoticon_send()) {
      ++s.emoticons_sent;
    } else {
      ++s.messages_sent;
    }
  }
  std::vector<std::int64_t> durations;
  for (const auto& t : authoring_timeframes(user_id, events)) durations.push_back(t.duration_ms());
  s.median_timeframe_ms = lower_median(std::move(durations));
  return s;
}

HistoryStore::HistoryStore(std::filesystem::path log_path, const Catalog* catalog)
    : catalog_(catalog), path_(std::move(log_path)) {
  if (path_.empty()) return;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot read event log " + path_.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
      const std::size_t nl = text.find('\n', start);
      // A line without its newline is a torn final write; drop it.
      if (nl == std::string::npos) break;
      ++line_no;
      std::string_view line(text.data() + start, nl - start);
      start = nl + 1;
      if (line.empty()) continue;
      InteractionEvent e;
      try {
        e = parse_event(line);
      } catch (const ParseError& err) {
        throw ParseError(path_.string() + ":" + std::to_string(line_no) + ": " + err.what());
      }
      for (const auto& emo : e.emoticons()) counts_.record_send(e.user_id, emo);
      events_[e.user_id].push_back(std::move(e));
    }
    if (start < text.size()) std::filesystem::resize_file(path_, start);
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (file_ == nullptr) throw IoError("cannot open event log " + path_.string() + " for append");
}

HistoryStore::~HistoryStore() {
  if (file_ != nullptr) std::fclose(file_);
}

void HistoryStore::append(const InteractionEvent& e) {
  if (e.user_id.empty() || e.user_id.find_first_of("\t\n") != std::string::npos) {
    throw Error("user id unusable in the event log");
  }
  if (e.payload.find_first_of("\t\n") != std::string::npos) {
    throw Error("event payload contains a tab or newline");
  }
  const auto emoticons = e.emoticons();
  if (catalog_ != nullptr) {
    for (const auto& emo : emoticons) check_emoticon_ids(emo, *catalog_);
  }
  std::unique_lock lock(mu_);
  if (file_ != nullptr) {
    const std::string line = format_event(e) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
      throw IoError("write to event log " + path_.string() + " failed");
    }
  }
  for (const auto& emo : emoticons) counts_.record_send(e.user_id, emo);
  events_[e.user_id].push_back(e);
}

PairCounts HistoryStore::snapshot(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  return counts_.snapshot(user_id);
}

std::uint64_t HistoryStore::pair_count(const std::string& user_id, const ElementRef& a,
                                       const ElementRef& b) const {
  std::shared_lock lock(mu_);
  return counts_.pair_count(user_id, a, b);
}

std::vector<InteractionEvent> HistoryStore::events(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  auto it = events_.find(user_id);
  return it == events_.end() ? std::vector<InteractionEvent>{} : it->second;
}

UsageSummary HistoryStore::usage_summary(const std::string& user_id) const {
  auto evs = events(user_id);
  std::stable_sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) {
    return a.timestamp_ms < b.timestamp_ms;
  });
  return summarize(user_id, evs);
}

std::vector<std::string> HistoryStore::users() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [user, _] : events_) out.push_back(user);
  return out;
}

void HistoryStore::flush() {
  std::unique_lock lock(mu_);
  if (file_ != nullptr) std::fflush(file_);
}

}  // namespace vibemoji
