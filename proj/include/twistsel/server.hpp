#pragma once

#include "twistsel/session.hpp"

#include <memory>

namespace twistsel {

/// WebSocket front end for Session. Each accepted connection gets its own
/// Session; handlers of one connection are serialized on a strand, and the
/// next frame is not read until every reply to the previous one is written.
class Server {
 public:
  /// Validates the config (throws InvalidConfig / InvalidScene).
  explicit Server(SessionConfig config, unsigned threads = 2);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds 127.0.0.1:port (or the configured address) and starts serving
  /// in background threads. Returns the bound port. Throws
  /// std::system_error if the port cannot be bound.
  unsigned short start(const std::string& address = "127.0.0.1");

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace twistsel
