#include "twistsel/server.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <mutex>
#include <system_error>
#include <thread>
#include <vector>

namespace twistsel {

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, const SessionConfig& config)
      : ws_(std::move(socket)), session_(config) {
    beast::error_code ec;
    ws_.next_layer().socket().set_option(tcp::no_delay(true), ec);
  }

  void run() {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->on_run(); });
  }

 private:
  void on_run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (!ec) {
        self->do_read();
      }
    });
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      return;  // closed by peer, or the server is shutting down
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (const protocol::ServerMessage& msg : session_.handle_text(text)) {
      outbox_.push_back(protocol::encode(msg));
    }
    if (outbox_.empty()) {
      do_read();
    } else {
      do_write();
    }
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        return;
                      }
                      self->outbox_.pop_front();
                      if (self->outbox_.empty()) {
                        self->do_read();
                      } else {
                        self->do_write();
                      }
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  Session session_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(SessionConfig cfg, unsigned n) : config(std::move(cfg)), threads(n), ioc(n) {}

  void accept() {
    acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        return;
      }
      std::make_shared<Connection>(std::move(socket), config)->run();
      accept();
    });
  }

  SessionConfig config;
  unsigned threads;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::optional<net::signal_set> signals;
  std::vector<std::thread> workers;
  std::once_flag stopped;
};

Server::Server(SessionConfig config, unsigned threads)
    : impl_(std::make_unique<Impl>(std::move(config), threads == 0 ? 1 : threads)) {
  validate(impl_->config);
}

Server::~Server() {
  stop();
  wait();
}

unsigned short Server::start(const std::string& address) {
  Impl& im = *impl_;
  beast::error_code ec;
  const tcp::endpoint endpoint(net::ip::make_address(address, ec), im.config.port);
  if (ec) {
    throw std::system_error(ec, "bad listen address");
  }
  im.acceptor.emplace(net::make_strand(im.ioc));
  im.acceptor->open(endpoint.protocol());
  im.acceptor->set_option(net::socket_base::reuse_address(true));
  im.acceptor->bind(endpoint, ec);
  if (ec) {
    throw std::system_error(ec, "cannot bind port " + std::to_string(im.config.port));
  }
  im.acceptor->listen(net::socket_base::max_listen_connections);
  const unsigned short port = im.acceptor->local_endpoint().port();

  im.signals.emplace(im.ioc, SIGINT, SIGTERM);
  im.signals->async_wait([this](beast::error_code e, int) {
    if (!e) {
      stop();
    }
  });

  im.accept();
  for (unsigned i = 0; i < im.threads; ++i) {
    im.workers.emplace_back([&im] { im.ioc.run(); });
  }
  return port;
}

void Server::wait() {
  for (std::thread& t : impl_->workers) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) {
      t.join();
    }
  }
}

void Server::stop() {
  std::call_once(impl_->stopped, [this] { impl_->ioc.stop(); });
}

}  // namespace twistsel
