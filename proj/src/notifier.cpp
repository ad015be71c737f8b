#include "vibemoji/notifier.hpp"

#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "vibemoji/error.hpp"

namespace vibemoji {

WebhookNotifier::WebhookNotifier(std::string url) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw Error("webhook url must start with http://");
  const auto slash = url.find('/', scheme.size());
  if (slash == scheme.size() || url.size() == scheme.size()) throw Error("webhook url has no host");
  if (slash == std::string::npos) {
    origin_ = url;
    path_ = "/";
  } else {
    origin_ = url.substr(0, slash);
    path_ = url.substr(slash);
  }
  worker_ = std::thread([this] { run(); });
}

WebhookNotifier::~WebhookNotifier() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void WebhookNotifier::notify(const std::string& recipient_id, const Envelope& envelope) {
  {
    std::lock_guard lock(mu_);
    pending_.push_back({recipient_id, envelope.id, envelope.sent_ts, -1});
  }
  cv_.notify_one();
}

void WebhookNotifier::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return pending_.empty() && !busy_; });
}

std::vector<WebhookCall> WebhookNotifier::calls() const {
  std::lock_guard lock(mu_);
  return done_;
}

void WebhookNotifier::run() {
  httplib::Client client(origin_);
  client.set_connection_timeout(2);
  client.set_read_timeout(2);
  for (;;) {
    WebhookCall call;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
      if (pending_.empty()) return;
      call = pending_.front();
      pending_.pop_front();
      busy_ = true;
    }
    const nlohmann::json body{
        {"recipient_id", call.recipient_id},
        {"message_id", {{"sender", call.message_id.sender}, {"seq", call.message_id.seq}}},
        {"sent_ts", call.sent_ts}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (res) call.status = res->status;
    if (!call.ok()) {
      std::clog << "webhook: POST " << origin_ << path_ << " for " << call.recipient_id << " failed: "
                << (res ? "status " + std::to_string(res->status) : httplib::to_string(res.error()))
                << '\n';
    }
    {
      std::lock_guard lock(mu_);
      done_.push_back(std::move(call));
      busy_ = false;
    }
    idle_cv_.notify_all();
  }
}

}  // namespace vibemoji
