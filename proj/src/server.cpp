#include "fitchmi/server.hpp"

#include <atomic>
#include <fstream>
#include <list>
#include <optional>
#include <set>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "fitchmi/wire.hpp"

namespace fitchmi {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

struct Server::Impl {
  ServeOptions opts;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  ModuleStore store;
  std::mutex log_mu;
  std::atomic<int> next_session{1};
  unsigned short port = 0;

  // Connections run on their own threads with blocking sockets; shutdown
  // wakes them and waits for them.
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::mutex live_mu;
  std::list<Worker> workers;
  std::set<tcp::socket*> live;
  bool closing = false;

  struct Tracked {
    Impl& impl;
    tcp::socket* socket;
    Tracked(Impl& i, tcp::socket& s) : impl(i), socket(&s) {
      std::lock_guard<std::mutex> lock(impl.live_mu);
      impl.live.insert(socket);
      beast::error_code ec;
      if (impl.closing) socket->shutdown(tcp::socket::shutdown_both, ec);
    }
    ~Tracked() {
      std::lock_guard<std::mutex> lock(impl.live_mu);
      impl.live.erase(socket);
    }
  };

  ~Impl() { close_all(); }

  void close_all() {
    std::list<Worker> joining;
    {
      std::lock_guard<std::mutex> lock(live_mu);
      closing = true;
      beast::error_code ec;
      acceptor.close(ec);
      for (auto* s : live) s->shutdown(tcp::socket::shutdown_both, ec);
      joining.swap(workers);
    }
    for (auto& w : joining) w.thread.join();
  }

  explicit Impl(ServeOptions o) : opts(std::move(o)) {
    beast::error_code ec;
    tcp::endpoint ep(net::ip::make_address(opts.address, ec), opts.port);
    if (ec) throw std::runtime_error("bad address " + opts.address + ": " + ec.message());
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw std::runtime_error("cannot listen on " + opts.address + ":" + std::to_string(opts.port) + ": " + ec.message());
    port = acceptor.local_endpoint().port();
  }

  void log(const std::string& line) {
    if (!opts.log) return;
    std::lock_guard<std::mutex> lock(log_mu);
    *opts.log << line << std::endl;
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::lock_guard<std::mutex> lock(live_mu);
      if (closing) return;
      for (auto it = workers.begin(); it != workers.end();) {
        if (*it->done) {
          it->thread.join();
          it = workers.erase(it);
        } else {
          ++it;
        }
      }
      auto done = std::make_shared<std::atomic<bool>>(false);
      workers.push_back({std::thread([this, done, s = std::move(socket)]() mutable {
                           serve(std::move(s));
                           *done = true;
                         }),
                         done});
      accept();
    });
  }

  template <class Body>
  http::response<http::string_body> reply(const http::request<Body>& req, http::status status, std::string body,
                                          const std::string& type) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  static std::string content_type(const std::string& path) {
    auto ends = [&](const char* ext) {
      std::string e(ext);
      return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
    };
    if (ends(".html")) return "text/html; charset=utf-8";
    if (ends(".js")) return "application/javascript";
    if (ends(".css")) return "text/css";
    if (ends(".json")) return "application/json";
    if (ends(".svg")) return "image/svg+xml";
    return "application/octet-stream";
  }

  http::response<http::string_body> route(const http::request<http::string_body>& req) {
    std::string target(req.target());
    if (req.method() == http::verb::post && target == "/modules") {
      std::string text = req.body();
      if (req[http::field::content_type].starts_with("application/json")) {
        try {
          json j = json::parse(text);
          if (j.contains("module") && j["module"].is_string()) text = j["module"];
          else if (j.contains("text") && j["text"].is_string()) text = j["text"];
        } catch (const json::exception&) {
        }
      }
      try {
        std::string id = store.add(text);
        json names = json::array();
        for (const auto& d : parse_module(text).decls)
          if (const auto* t = std::get_if<TheoremDecl>(&d)) names.push_back(t->name);
        log("module " + id + " uploaded");
        return reply(req, http::status::created, json{{"id", id}, {"theorems", names}}.dump(), "application/json");
      } catch (const ParseError& e) {
        return reply(req, http::status::bad_request, json{{"error", to_json(e)}}.dump(), "application/json");
      }
    }
    if (req.method() == http::verb::get) {
      if (opts.static_dir.empty()) {
        if (target == "/") return reply(req, http::status::ok, "fitch-mi session server\n", "text/plain");
      } else if (target.find("..") == std::string::npos) {
        std::string path = opts.static_dir + (target == "/" ? "/index.html" : target);
        std::ifstream in(path, std::ios::binary);
        if (in) {
          std::stringstream ss;
          ss << in.rdbuf();
          return reply(req, http::status::ok, ss.str(), content_type(path));
        }
      }
    }
    return reply(req, http::status::not_found, "not found\n", "text/plain");
  }

  void serve(tcp::socket socket) {
    beast::tcp_stream stream(std::move(socket));
    std::optional<Tracked> track(std::in_place, *this, stream.socket());
    beast::flat_buffer buffer;
    beast::error_code ec;
    for (;;) {
      http::request<http::string_body> req;
      http::read(stream, buffer, req, ec);
      if (ec) return;
      if (websocket::is_upgrade(req)) {
        if (req.target() != "/session") {
          http::write(stream, reply(req, http::status::not_found, "not found\n", "text/plain"), ec);
          return;
        }
        track.reset();
        session(std::move(stream), req);
        return;
      }
      auto res = route(req);
      log(std::string(req.method_string()) + " " + std::string(req.target()) + " " + std::to_string(res.result_int()));
      http::write(stream, res, ec);
      if (ec || !res.keep_alive()) return;
    }
  }

  void session(beast::tcp_stream stream, const http::request<http::string_body>& req) {
    websocket::stream<beast::tcp_stream> ws(std::move(stream));
    Tracked track(*this, ws.next_layer().socket());
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    std::string id = "s" + std::to_string(next_session++);
    log(id + " connected");
    ProtocolConnection conn(store, opts.module_text, id, opts.clock);
    for (;;) {
      beast::flat_buffer buf;
      ws.read(buf, ec);
      if (ec) break;
      std::string in = beast::buffers_to_string(buf.data());
      std::vector<json> out = conn.handle(in);
      ws.text(true);
      for (const auto& j : out) {
        log(id + " " + j.value("type", std::string("?")));
        ws.write(net::buffer(j.dump()), ec);
        if (ec) break;
      }
      if (ec) break;
    }
    log(id + " closed");
  }
};

Server::Server(ServeOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->port; }

void Server::run() {
  impl_->accept();
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace fitchmi
