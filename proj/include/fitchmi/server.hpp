#pragma once

// HTTP + WebSocket front for the session protocol: WebSocket upgrade at
// /session, POST /modules for uploads, static files at /.

#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "fitchmi/session.hpp"

namespace fitchmi {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 7414;  // 0 picks a free port
  std::optional<std::string> module_text;  // used by `start' messages without a module
  std::string static_dir;
  std::ostream* log = nullptr;
  Clock clock;
};

class Server {
 public:
  // Binds immediately; throws std::runtime_error when the address is unavailable.
  explicit Server(ServeOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  void run();   // blocks until stop()
  void stop();  // safe from any thread

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fitchmi
