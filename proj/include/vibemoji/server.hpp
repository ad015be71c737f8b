#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vibemoji/relay.hpp"

namespace vibemoji {

/// Speaks the frame protocol for one connection, independent of transport.
/// Owned through shared_ptr because the relay holds it as the user's sink.
class FrameHandler : public Sink, public std::enable_shared_from_this<FrameHandler> {
 public:
  /// `write` sends one frame without its newline and must be callable from
  /// any thread. `shutdown` ends the transport.
  FrameHandler(Relay& relay, std::function<void(std::string)> write, std::function<void()> shutdown);

  void handle_line(std::string_view line);
  /// Transport closed by the peer.
  void on_disconnect();

  void deliver(const Envelope& envelope) override;
  void close() override;

  std::optional<Session> session() const;

 private:
  void dispatch(std::string_view line);

  Relay& relay_;
  std::function<void(std::string)> write_;
  std::function<void()> shutdown_;
  mutable std::mutex mu_;
  std::optional<Session> session_;
  bool closed_ = false;
};

struct ServerOptions {
  /// host:port; port 0 picks a free port.
  std::string listen_address = "127.0.0.1:7400";
  /// Optional HTTP front end: GET /catalog and a WebSocket at /ws carrying
  /// the same frames, one per text message.
  std::optional<std::string> http_address;
  /// Served verbatim at /catalog.
  std::string catalog_document;
  unsigned threads = 2;
};

/// Splits "host:port"; throws Error when malformed.
std::pair<std::string, std::uint16_t> split_address(std::string_view address);

class Server {
 public:
  Server(Relay& relay, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts worker threads. Throws Error when an address is in use.
  void start();
  /// Closes every connection, joins workers, and flushes the relay.
  void stop();
  /// Blocks until SIGINT/SIGTERM, then stops. `ready` runs once the signal
  /// handlers are in place.
  void wait_for_signal(const std::function<void()>& ready = {});

  std::string tcp_address() const;
  std::optional<std::string> http_address() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vibemoji
