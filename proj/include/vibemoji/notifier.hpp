#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vibemoji/envelope.hpp"

namespace vibemoji {

/// Told about every envelope queued for an offline recipient. Must not block.
class Notifier {
 public:
  virtual ~Notifier() = default;
  virtual void notify(const std::string& recipient_id, const Envelope& envelope) = 0;
};

struct WebhookCall {
  std::string recipient_id;
  MessageId message_id;
  std::int64_t sent_ts = 0;
  /// HTTP status, or -1 when no response arrived.
  int status = -1;
  bool ok() const noexcept { return status >= 200 && status < 300; }
};

/// Stand-in for a push service: POSTs {recipient_id, message_id, sent_ts} to
/// a fixed URL from a background thread. Failures are logged, never raised.
class WebhookNotifier : public Notifier {
 public:
  /// `url` is http://host[:port][/path].
  explicit WebhookNotifier(std::string url);
  ~WebhookNotifier() override;

  void notify(const std::string& recipient_id, const Envelope& envelope) override;

  /// Blocks until every queued call has finished.
  void drain();
  std::vector<WebhookCall> calls() const;

 private:
  void run();

  std::string origin_;
  std::string path_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<WebhookCall> pending_;
  std::vector<WebhookCall> done_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace vibemoji
