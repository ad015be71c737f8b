#include "vibemoji/relay.hpp"

#include <algorithm>
#include <chrono>

#include "vibemoji/codec.hpp"

namespace vibemoji {

std::string_view to_string(RelayErrorCode code) noexcept {
  switch (code) {
    case RelayErrorCode::UnknownUser:
      return "unknown_user";
    case RelayErrorCode::BadToken:
      return "bad_token";
    case RelayErrorCode::NotAuthenticated:
      return "not_authenticated";
    case RelayErrorCode::Superseded:
      return "superseded";
    case RelayErrorCode::NotPartner:
      return "not_partner";
    case RelayErrorCode::BodyTooLarge:
      return "body_too_large";
    case RelayErrorCode::StaleSequence:
      return "stale_sequence";
    case RelayErrorCode::UnknownElement:
      return "unknown_element";
    case RelayErrorCode::UnknownMessage:
      return "unknown_message";
    case RelayErrorCode::NoEmoticon:
      return "no_emoticon";
    case RelayErrorCode::BadSelection:
      return "bad_selection";
  }
  return "error";
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Relay::Relay(const Catalog& catalog, std::vector<UserPair> pairs, RelayOptions options)
    : catalog_(catalog), options_(std::move(options)) {
  options_.weights.validate();
  if (!options_.clock) options_.clock = system_clock_ms;
  auto add = [&](const std::string& user, const std::string& token, const std::string& partner) {
    if (user.empty() || user.find_first_of("\t\n") != std::string::npos) {
      throw Error("user id \"" + user + "\" is empty or contains a tab or newline");
    }
    if (user == partner) throw Error("user \"" + user + "\" cannot be paired with itself");
    auto st = std::make_unique<UserState>();
    st->partner = partner;
    st->token = token;
    if (!users_.emplace(user, std::move(st)).second) {
      throw Error("user \"" + user + "\" appears in more than one pair");
    }
  };
  for (const auto& p : pairs) {
    add(p.first, p.first_token, p.second);
    add(p.second, p.second_token, p.first);
  }

  std::filesystem::path journal_path;
  std::filesystem::path log_path;
  if (!options_.data_dir.empty()) {
    std::filesystem::create_directories(options_.data_dir);
    journal_path = options_.data_dir / "relay.journal";
    log_path = options_.data_dir / "events.log";
  }
  journal_ = std::make_unique<Journal>(journal_path);
  history_ = std::make_unique<HistoryStore>(log_path, &catalog_);
  recover();
}

Relay::~Relay() {
  try {
    flush();
  } catch (...) {
  }
}

void Relay::recover() {
  for (auto& record : journal_->replay()) {
    if (auto* e = std::get_if<Envelope>(&record)) {
      auto sender_it = users_.find(e->id.sender);
      auto recipient_it = users_.find(e->recipient);
      // Users dropped from the configuration take their traffic with them.
      if (sender_it == users_.end() || recipient_it == users_.end()) continue;
      UserState& sender = *sender_it->second;
      UserState& recipient = *recipient_it->second;
      sender.high_water = std::max(sender.high_water, e->id.seq);
      sender.archive[e->id] = *e;
      recipient.archive[e->id] = *e;
      recipient.pending.push_back(*e);
      ++recipient.inbound[e->id.sender].accepted;
    } else {
      const auto& d = std::get<DeliveryRecord>(record);
      auto it = users_.find(d.recipient);
      if (it == users_.end()) continue;
      UserState& recipient = *it->second;
      auto pos = std::find_if(recipient.pending.begin(), recipient.pending.end(),
                              [&](const Envelope& e) { return e.id == d.id; });
      if (pos != recipient.pending.end()) {
        recipient.pending.erase(pos);
        ++recipient.inbound[d.id.sender].delivered;
      }
    }
  }
}

Relay::UserState& Relay::state(const std::string& user) const {
  auto it = users_.find(user);
  if (it == users_.end()) throw RelayError(RelayErrorCode::UnknownUser, "unknown user \"" + user + "\"");
  return *it->second;
}

void Relay::require_current(const UserState& st, const Session& session) const {
  if (session.epoch == 0 || st.epoch != session.epoch || !st.sink) {
    throw RelayError(RelayErrorCode::Superseded, "session for \"" + session.user + "\" is no longer current");
  }
}

HelloResult Relay::connect(const std::string& user, const std::string& token,
                           std::shared_ptr<Sink> sink,
                           const std::function<void(const HelloResult&)>& before_flush) {
  UserState& st = state(user);
  if (token != st.token) throw RelayError(RelayErrorCode::BadToken, "bad token for \"" + user + "\"");
  std::lock_guard lock(st.mu);
  if (st.sink) st.sink->close();
  st.sink = std::move(sink);
  ++st.epoch;
  HelloResult hello{{user, st.epoch}, st.partner, st.high_water};
  if (before_flush) before_flush(hello);
  for (const auto& e : st.pending) st.sink->deliver(e);
  return hello;
}

void Relay::disconnect(const Session& session) {
  UserState& st = state(session.user);
  std::lock_guard lock(st.mu);
  if (st.epoch == session.epoch) st.sink.reset();
}

SendAck Relay::duplicate_ack(const UserState& me, const Session& session, std::uint64_t seq) const {
  auto it = me.archive.find(MessageId{session.user, seq});
  if (it == me.archive.end()) {
    throw RelayError(RelayErrorCode::StaleSequence,
                     "sequence " + std::to_string(seq) + " is not above the last accepted " +
                         std::to_string(me.high_water));
  }
  return {it->first, it->second.sent_ts, true};
}

SendAck Relay::accept(UserState& me, UserState& peer, const Session& session, Envelope envelope) {
  // Write-ahead: nothing becomes visible before it is journaled.
  journal_->append(envelope);
  if (envelope.kind == EnvelopeKind::Message) {
    history_->append(make_send_event(envelope.sent_ts, session.user, decode_body(envelope.body)));
    if (decode_body(envelope.body).has_emoticon()) me.last_selection.clear();
  } else {
    history_->append({envelope.sent_ts, session.user, EventKind::Replay, {}});
  }
  me.high_water = envelope.id.seq;
  me.archive[envelope.id] = envelope;
  peer.archive[envelope.id] = envelope;
  peer.pending.push_back(envelope);
  ++peer.inbound[session.user].accepted;
  if (peer.sink) {
    peer.sink->deliver(envelope);
  } else if (options_.notifier) {
    options_.notifier->notify(envelope.recipient, envelope);
  }
  return {envelope.id, envelope.sent_ts, false};
}

SendAck Relay::send(const Session& session, const std::string& recipient, std::uint64_t seq,
                    const std::string& body) {
  UserState& me = state(session.user);
  if (recipient != me.partner) {
    throw RelayError(RelayErrorCode::NotPartner,
                     "\"" + recipient + "\" is not the partner of \"" + session.user + "\"");
  }
  if (body.size() > kMaxBodyBytes) {
    throw RelayError(RelayErrorCode::BodyTooLarge,
                     "body of " + std::to_string(body.size()) + " bytes exceeds 65536");
  }
  UserState& peer = state(recipient);
  std::scoped_lock lock(me.mu, peer.mu);
  require_current(me, session);
  if (seq <= me.high_water) return duplicate_ack(me, session, seq);

  for (const auto& emo : decode_body(body).emoticons()) {
    try {
      check_emoticon_ids(emo, catalog_);
    } catch (const Error& e) {
      throw RelayError(RelayErrorCode::UnknownElement, e.what());
    }
  }
  Envelope envelope{{session.user, seq}, recipient, options_.clock(), body, EnvelopeKind::Message, {}};
  return accept(me, peer, session, std::move(envelope));
}

void Relay::acknowledge(const Session& session, const MessageId& id) {
  UserState& me = state(session.user);
  std::lock_guard lock(me.mu);
  auto pos = std::find_if(me.pending.begin(), me.pending.end(),
                          [&](const Envelope& e) { return e.id == id; });
  if (pos == me.pending.end()) return;
  journal_->append(DeliveryRecord{session.user, id});
  me.pending.erase(pos);
  ++me.inbound[id.sender].delivered;
}

std::vector<std::string> Relay::recommend(const Session& session,
                                          const std::vector<ElementRef>& selected, Modality target) {
  UserState& me = state(session.user);
  std::optional<Selection> selection;
  try {
    selection.emplace(make_selection(catalog_, selected));
  } catch (const Error& e) {
    const bool unknown = std::any_of(selected.begin(), selected.end(), [&](const ElementRef& r) {
      return catalog_.find(r.modality, r.id) == nullptr;
    });
    throw RelayError(unknown ? RelayErrorCode::UnknownElement : RelayErrorCode::BadSelection, e.what());
  }
  if (selection->contains(target)) {
    throw RelayError(RelayErrorCode::BadSelection,
                     "target " + std::string(to_string(target)) + " is already selected");
  }
  {
    std::lock_guard lock(me.mu);
    require_current(me, session);
    // Selection changes between requests stand in for keyboard operations in
    // the interaction log.
    const std::int64_t now = options_.clock();
    for (const auto& prev : me.last_selection) {
      if (std::find(selected.begin(), selected.end(), prev) == selected.end()) {
        history_->append({now, session.user, EventKind::Deselect, prev.id});
      }
    }
    for (const auto& ref : selected) {
      if (std::find(me.last_selection.begin(), me.last_selection.end(), ref) ==
          me.last_selection.end()) {
        history_->append({now, session.user, EventKind::Select, ref.id});
      }
    }
    me.last_selection = selected;
  }
  const PairCounts snapshot = history_->snapshot(session.user);
  return rank_modality(*selection, target, snapshot, catalog_, options_.weights);
}

SendAck Relay::replay(const Session& session, std::uint64_t seq, const MessageId& target) {
  UserState& me = state(session.user);
  UserState& peer = state(me.partner);
  std::scoped_lock lock(me.mu, peer.mu);
  require_current(me, session);
  if (seq <= me.high_water) return duplicate_ack(me, session, seq);

  auto it = me.archive.find(target);
  if (it == me.archive.end() || it->second.kind != EnvelopeKind::Message) {
    throw RelayError(RelayErrorCode::UnknownMessage,
                     "no message " + target.sender + "#" + std::to_string(target.seq) +
                         " in this conversation");
  }
  if (!decode_body(it->second.body).has_emoticon()) {
    throw RelayError(RelayErrorCode::NoEmoticon, "message carries no emoticon to replay");
  }
  Envelope envelope{{session.user, seq}, me.partner, options_.clock(), it->second.body,
                    EnvelopeKind::Replay, target};
  SendAck ack = accept(me, peer, session, envelope);
  me.sink->deliver(envelope);
  return ack;
}

QueueStats Relay::stats(const std::string& sender, const std::string& recipient) const {
  const UserState& st = state(recipient);
  std::lock_guard lock(st.mu);
  QueueStats out;
  auto it = st.inbound.find(sender);
  if (it != st.inbound.end()) {
    out.accepted = it->second.accepted;
    out.delivered = it->second.delivered;
  }
  out.queued = static_cast<std::uint64_t>(std::count_if(
      st.pending.begin(), st.pending.end(), [&](const Envelope& e) { return e.id.sender == sender; }));
  return out;
}

std::size_t Relay::queue_length(const std::string& user) const {
  const UserState& st = state(user);
  std::lock_guard lock(st.mu);
  return st.pending.size();
}

std::vector<Envelope> Relay::queued(const std::string& user) const {
  const UserState& st = state(user);
  std::lock_guard lock(st.mu);
  return {st.pending.begin(), st.pending.end()};
}

bool Relay::online(const std::string& user) const {
  const UserState& st = state(user);
  std::lock_guard lock(st.mu);
  return static_cast<bool>(st.sink);
}

std::vector<std::string> Relay::users() const {
  std::vector<std::string> out;
  for (const auto& [user, _] : users_) out.push_back(user);
  return out;
}

void Relay::flush() {
  journal_->sync();
  history_->flush();
}

}  // namespace vibemoji
