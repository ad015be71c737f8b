#include "vibemoji/server.hpp"

#include <array>
#include <charconv>
#include <csignal>
#include <deque>
#include <future>
#include <iostream>
#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "vibemoji/protocol.hpp"

namespace vibemoji {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

// ---------------------------------------------------------------------------
// FrameHandler

FrameHandler::FrameHandler(Relay& relay, std::function<void(std::string)> write,
                           std::function<void()> shutdown)
    : relay_(relay), write_(std::move(write)), shutdown_(std::move(shutdown)) {}

std::optional<Session> FrameHandler::session() const {
  std::lock_guard lock(mu_);
  return session_;
}

void FrameHandler::handle_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty()) return;
  try {
    dispatch(line);
  } catch (const protocol::FrameError& e) {
    write_(protocol::error_frame(e.seq(), "bad_frame", e.what()));
  }
}

void FrameHandler::dispatch(std::string_view line) {
  const auto frame = protocol::parse_client_frame(line);
  const std::uint64_t seq = std::visit([](const auto& f) { return f.seq; }, frame);
  try {
    if (const auto* hello = std::get_if<protocol::Hello>(&frame)) {
      if (auto previous = session()) relay_.disconnect(*previous);
      auto self = shared_from_this();
      relay_.connect(hello->user, hello->token, self, [&](const HelloResult& r) {
        {
          std::lock_guard lock(mu_);
          session_ = r.session;
          closed_ = false;
        }
        write_(protocol::hello_ok_frame(hello->seq, r.session.user, r.partner, r.last_seq));
      });
      return;
    }
    const auto current = session();
    if (!current) {
      throw RelayError(RelayErrorCode::NotAuthenticated, "send hello first");
    }
    if (const auto* msg = std::get_if<protocol::Msg>(&frame)) {
      const SendAck ack = relay_.send(*current, msg->to, msg->seq, msg->body);
      write_(protocol::ack_frame(msg->seq, ack.id, ack.sent_ts, ack.duplicate));
    } else if (const auto* ack = std::get_if<protocol::Ack>(&frame)) {
      relay_.acknowledge(*current, MessageId{ack->sender, ack->seq});
    } else if (const auto* rec = std::get_if<protocol::Recommend>(&frame)) {
      const auto order = relay_.recommend(*current, rec->select, rec->target);
      write_(protocol::recommend_ok_frame(rec->seq, rec->target, order));
    } else if (const auto* rep = std::get_if<protocol::Replay>(&frame)) {
      const SendAck ack = relay_.replay(*current, rep->seq, rep->message_id);
      write_(protocol::ack_frame(rep->seq, ack.id, ack.sent_ts, ack.duplicate));
    }
  } catch (const RelayError& e) {
    write_(protocol::error_frame(seq, to_string(e.code()), e.what()));
  } catch (const protocol::FrameError&) {
    throw;
  } catch (const Error& e) {
    write_(protocol::error_frame(seq, "bad_request", e.what()));
  }
}

void FrameHandler::on_disconnect() {
  std::optional<Session> current;
  {
    std::lock_guard lock(mu_);
    current = session_;
    session_.reset();
  }
  if (current) relay_.disconnect(*current);
}

void FrameHandler::deliver(const Envelope& envelope) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
  }
  write_(protocol::envelope_frame(envelope));
}

void FrameHandler::close() {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
    session_.reset();
  }
  write_(protocol::error_frame(0, to_string(RelayErrorCode::Superseded),
                               "a newer connection took over this session"));
  shutdown_();
}

// ---------------------------------------------------------------------------
// Transports

std::pair<std::string, std::uint16_t> split_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error("address \"" + std::string(address) + "\" must be host:port");
  }
  std::string host(address.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const auto port_text = address.substr(colon + 1);
  std::uint16_t port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size()) {
    throw Error("address \"" + std::string(address) + "\" has an invalid port");
  }
  return {host, port};
}

namespace {

constexpr std::size_t kMaxFrameBytes = kMaxBodyBytes * 2 + 4096;

class Connection {
 public:
  virtual ~Connection() = default;
  virtual void shutdown() = 0;
  /// Drops the relay session; used once the event loop has stopped.
  virtual void detach() = 0;
};

class Registry {
 public:
  void add(const std::shared_ptr<Connection>& c) {
    std::lock_guard lock(mu_);
    live_.insert(c);
  }
  void remove(const std::shared_ptr<Connection>& c) {
    std::lock_guard lock(mu_);
    live_.erase(c);
  }
  void shutdown_all() {
    std::vector<std::shared_ptr<Connection>> all;
    {
      std::lock_guard lock(mu_);
      all.assign(live_.begin(), live_.end());
    }
    for (auto& c : all) c->shutdown();
  }
  void detach_all() {
    std::set<std::shared_ptr<Connection>> all;
    {
      std::lock_guard lock(mu_);
      all.swap(live_);
    }
    for (auto& c : all) c->detach();
  }

 private:
  std::mutex mu_;
  std::set<std::shared_ptr<Connection>> live_;
};

class TcpConnection : public Connection, public std::enable_shared_from_this<TcpConnection> {
 public:
  TcpConnection(tcp::socket socket, Relay& relay, Registry& registry)
      : socket_(std::move(socket)), buffer_(kMaxFrameBytes), relay_(relay), registry_(registry) {}

  void start() {
    std::weak_ptr<TcpConnection> weak = shared_from_this();
    handler_ = std::make_shared<FrameHandler>(
        relay_,
        [weak](std::string frame) {
          if (auto self = weak.lock()) self->write(std::move(frame));
        },
        [weak] {
          if (auto self = weak.lock()) self->shutdown();
        });
    registry_.add(shared_from_this());
    read();
  }

  void detach() override { handler_->on_disconnect(); }

  void shutdown() override {
    asio::post(socket_.get_executor(), [self = shared_from_this()] {
      self->closing_ = true;
      if (self->outbox_.empty()) self->half_close();
    });
  }

 private:
  void write(std::string frame) {
    frame += '\n';
    asio::post(socket_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
      if (!self->socket_.is_open()) return;
      self->outbox_.push_back(std::move(f));
      if (self->outbox_.size() == 1) self->write_next();
    });
  }

  void write_next() {
    asio::async_write(socket_, asio::buffer(outbox_.front()),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        if (ec) return self->close_socket();
                        self->outbox_.pop_front();
                        if (!self->outbox_.empty()) {
                          self->write_next();
                        } else if (self->closing_) {
                          self->half_close();
                        }
                      });
  }

  void read() {
    asio::async_read_until(socket_, buffer_, '\n',
                           [self = shared_from_this()](beast::error_code ec, std::size_t n) {
                             self->on_read(ec, n);
                           });
  }

  void on_read(beast::error_code ec, std::size_t n) {
    if (ec == asio::error::not_found) {
      write(protocol::error_frame(0, "bad_frame", "frame exceeds the size limit"));
      shutdown();
      handler_->on_disconnect();
      registry_.remove(shared_from_this());
      return drain();
    }
    if (ec) return finish();
    std::string line(asio::buffers_begin(buffer_.data()),
                     asio::buffers_begin(buffer_.data()) + static_cast<std::ptrdiff_t>(n - 1));
    buffer_.consume(n);
    handler_->handle_line(line);
    read();
  }

  void finish() {
    handler_->on_disconnect();
    if (!closing_ || outbox_.empty()) close_socket();
    registry_.remove(shared_from_this());
  }

  // Input is discarded until the peer closes, so unread bytes never turn
  // the close into a reset that would swallow the final frames.
  void drain() {
    socket_.async_read_some(asio::buffer(scratch_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close_socket();
      self->drain();
    });
  }

  void half_close() {
    beast::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_send, ignored);
  }

  void close_socket() {
    beast::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  asio::streambuf buffer_;
  std::deque<std::string> outbox_;
  std::array<char, 4096> scratch_{};
  bool closing_ = false;
  Relay& relay_;
  Registry& registry_;
  std::shared_ptr<FrameHandler> handler_;
};

class WsConnection : public Connection, public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Relay& relay, Registry& registry)
      : ws_(std::move(socket)), relay_(relay), registry_(registry) {}

  void start(http::request<http::string_body> req) {
    std::weak_ptr<WsConnection> weak = shared_from_this();
    handler_ = std::make_shared<FrameHandler>(
        relay_,
        [weak](std::string frame) {
          if (auto self = weak.lock()) self->write(std::move(frame));
        },
        [weak] {
          if (auto self = weak.lock()) self->shutdown();
        });
    registry_.add(shared_from_this());
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrameBytes);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->open_ = true;
      self->read();
    });
  }

  void detach() override { handler_->on_disconnect(); }

  void shutdown() override {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      self->closing_ = true;
      if (self->outbox_.empty()) self->close_ws();
    });
  }

 private:
  void write(std::string frame) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
      if (!self->open_) return;
      self->outbox_.push_back(std::move(f));
      if (self->outbox_.size() == 1) self->write_next();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->open_ = false;
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) {
                        self->write_next();
                      } else if (self->closing_) {
                        self->close_ws();
                      }
                    });
  }

  void close_ws() {
    if (!open_) return;
    open_ = false;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      std::size_t start = 0;
      while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        self->handler_->handle_line(std::string_view(text).substr(start, nl - start));
        start = nl + 1;
      }
      self->read();
    });
  }

  void finish() {
    open_ = false;
    handler_->on_disconnect();
    registry_.remove(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool open_ = false;
  bool closing_ = false;
  Relay& relay_;
  Registry& registry_;
  std::shared_ptr<FrameHandler> handler_;
};

class HttpSession : public Connection, public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Relay& relay, Registry& registry, const std::string& catalog)
      : stream_(std::move(socket)), relay_(relay), registry_(registry), catalog_(catalog) {}

  void start() {
    registry_.add(shared_from_this());
    read();
  }

  void detach() override {}

  void shutdown() override {
    asio::post(stream_.get_executor(), [self = shared_from_this()] {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
      self->stream_.close();
    });
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) return done();
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        auto ws = std::make_shared<WsConnection>(stream_.release_socket(), relay_, registry_);
        ws->start(std::move(req_));
        return done();
      }
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::access_control_allow_origin, "*");
    if (req_.method() == http::verb::get && req_.target() == "/catalog") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = catalog_;
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec || !res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return self->done();
      }
      self->read();
    });
  }

  void done() { registry_.remove(shared_from_this()); }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Relay& relay_;
  Registry& registry_;
  const std::string& catalog_;
};

tcp::endpoint resolve(asio::io_context& ioc, const std::string& address) {
  auto [host, port] = split_address(address);
  tcp::resolver resolver(ioc);
  beast::error_code ec;
  auto results = resolver.resolve(host, std::to_string(port), ec);
  if (ec || results.empty()) throw Error("cannot resolve " + address + ": " + ec.message());
  return results.begin()->endpoint();
}

std::string format_endpoint(const tcp::endpoint& ep) {
  const auto addr = ep.address();
  std::string host = addr.to_string();
  if (addr.is_v6()) host = "[" + host + "]";
  return host + ":" + std::to_string(ep.port());
}

}  // namespace

struct Server::Impl {
  Impl(Relay& r, ServerOptions o) : relay(r), options(std::move(o)) {}

  Relay& relay;
  ServerOptions options;
  asio::io_context ioc;
  std::optional<tcp::acceptor> tcp_acceptor;
  std::optional<tcp::acceptor> http_acceptor;
  Registry registry;
  std::vector<std::thread> threads;
  bool running = false;

  void open(tcp::acceptor& acceptor, const std::string& address) {
    const auto ep = resolve(ioc, address);
    beast::error_code ec;
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error("cannot listen on " + address + ": " + ec.message());
  }

  void accept_tcp() {
    tcp_acceptor->async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::make_shared<TcpConnection>(std::move(s), relay, registry)->start();
      accept_tcp();
    });
  }

  void accept_http() {
    http_acceptor->async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(s), relay, registry, options.catalog_document)->start();
      accept_http();
    });
  }
};

Server::Server(Relay& relay, ServerOptions options)
    : impl_(std::make_unique<Impl>(relay, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& im = *impl_;
  if (im.running) return;
  im.tcp_acceptor.emplace(im.ioc);
  im.open(*im.tcp_acceptor, im.options.listen_address);
  if (im.options.http_address) {
    im.http_acceptor.emplace(im.ioc);
    im.open(*im.http_acceptor, *im.options.http_address);
  }
  im.accept_tcp();
  if (im.http_acceptor) im.accept_http();
  im.running = true;
  const unsigned n = std::max(1u, im.options.threads);
  for (unsigned i = 0; i < n; ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
}

void Server::stop() {
  auto& im = *impl_;
  if (!im.running) return;
  im.running = false;
  asio::post(im.ioc, [&im] {
    beast::error_code ignored;
    if (im.tcp_acceptor) im.tcp_acceptor->close(ignored);
    if (im.http_acceptor) im.http_acceptor->close(ignored);
  });
  im.registry.shutdown_all();
  // Let queued writes and closes drain briefly before tearing down.
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  im.ioc.stop();
  for (auto& t : im.threads) t.join();
  im.threads.clear();
  im.registry.detach_all();
  im.relay.flush();
}

void Server::wait_for_signal(const std::function<void()>& ready) {
  auto& im = *impl_;
  std::promise<int> caught;
  asio::signal_set signals(im.ioc, SIGINT, SIGTERM);
  signals.async_wait([&caught](beast::error_code ec, int sig) {
    if (!ec) caught.set_value(sig);
  });
  if (ready) ready();
  caught.get_future().wait();
  stop();
}

std::string Server::tcp_address() const {
  return format_endpoint(impl_->tcp_acceptor->local_endpoint());
}

std::optional<std::string> Server::http_address() const {
  if (!impl_->http_acceptor) return std::nullopt;
  return format_endpoint(impl_->http_acceptor->local_endpoint());
}

}  // namespace vibemoji
