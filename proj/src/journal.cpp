#include "vibemoji/journal.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "vibemoji/error.hpp"

namespace vibemoji {

using nlohmann::json;

namespace {

json id_json(const MessageId& id) { return {{"sender", id.sender}, {"seq", id.seq}}; }

MessageId id_from(const json& j) {
  return {j.at("sender").get<std::string>(), j.at("seq").get<std::uint64_t>()};
}

std::string encode(const JournalRecord& record) {
  json j;
  if (const auto* e = std::get_if<Envelope>(&record)) {
    j = {{"op", "env"},
         {"kind", e->kind == EnvelopeKind::Message ? "msg" : "replay"},
         {"id", id_json(e->id)},
         {"recipient", e->recipient},
         {"sent_ts", e->sent_ts},
         {"body", e->body}};
    if (e->replay_of) j["replay_of"] = id_json(*e->replay_of);
  } else {
    const auto& d = std::get<DeliveryRecord>(record);
    j = {{"op", "delivered"}, {"recipient", d.recipient}, {"id", id_json(d.id)}};
  }
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

JournalRecord decode(const std::string& line) {
  const json j = json::parse(line);
  const auto op = j.at("op").get<std::string>();
  if (op == "env") {
    Envelope e;
    e.kind = j.at("kind").get<std::string>() == "msg" ? EnvelopeKind::Message : EnvelopeKind::Replay;
    e.id = id_from(j.at("id"));
    e.recipient = j.at("recipient").get<std::string>();
    e.sent_ts = j.at("sent_ts").get<std::int64_t>();
    e.body = j.at("body").get<std::string>();
    if (j.contains("replay_of")) e.replay_of = id_from(j["replay_of"]);
    return e;
  }
  if (op == "delivered") {
    return DeliveryRecord{j.at("recipient").get<std::string>(), id_from(j.at("id"))};
  }
  throw ParseError("unknown journal op \"" + op + "\"");
}

}  // namespace

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {}

Journal::~Journal() {
  if (file_ != nullptr) std::fclose(file_);
}

std::vector<JournalRecord> Journal::replay() {
  std::lock_guard lock(mu_);
  std::vector<JournalRecord> out;
  if (path_.empty()) return out;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot read journal " + path_.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
      const std::size_t nl = text.find('\n', start);
      if (nl == std::string::npos) break;
      ++line_no;
      const std::string line = text.substr(start, nl - start);
      start = nl + 1;
      if (line.empty()) continue;
      try {
        out.push_back(decode(line));
      } catch (const std::exception& e) {
        throw ParseError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (start < text.size()) std::filesystem::resize_file(path_, start);
  }
  if (file_ == nullptr) {
    file_ = std::fopen(path_.c_str(), "ab");
    if (file_ == nullptr) throw IoError("cannot open journal " + path_.string() + " for append");
  }
  return out;
}

void Journal::append(const JournalRecord& record) {
  if (path_.empty()) return;
  const std::string line = encode(record) + "\n";
  std::lock_guard lock(mu_);
  if (file_ == nullptr) {
    file_ = std::fopen(path_.c_str(), "ab");
    if (file_ == nullptr) throw IoError("cannot open journal " + path_.string() + " for append");
  }
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw IoError("write to journal " + path_.string() + " failed");
  }
}

void Journal::sync() {
  std::lock_guard lock(mu_);
  if (file_ == nullptr) return;
  std::fflush(file_);
  ::fsync(::fileno(file_));
}

}  // namespace vibemoji
