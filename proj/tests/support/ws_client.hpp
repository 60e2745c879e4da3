#pragma once

// Minimal blocking HTTP / WebSocket client for server tests.

#include <string>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "json.hpp"

namespace fitchmi::testing {

class WsClient {
 public:
  WsClient(unsigned short port, const std::string& target = "/session") : ws_(ioc_) {
    boost::asio::ip::tcp::resolver resolver(ioc_);
    auto results = resolver.resolve("127.0.0.1", std::to_string(port));
    boost::asio::connect(ws_.next_layer(), results.begin(), results.end());
    ws_.handshake("127.0.0.1", target);
    ws_.text(true);
  }
  ~WsClient() {
    boost::beast::error_code ec;
    ws_.close(boost::beast::websocket::close_code::normal, ec);
  }

  void send_raw(const std::string& text) { ws_.write(boost::asio::buffer(text)); }
  void send(const nlohmann::json& j) { send_raw(j.dump()); }
  nlohmann::json receive() {
    boost::beast::flat_buffer buf;
    ws_.read(buf);
    return nlohmann::json::parse(boost::beast::buffers_to_string(buf.data()));
  }
  nlohmann::json call(const nlohmann::json& j) {
    send(j);
    return receive();
  }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

struct HttpReply {
  int status = 0;
  std::string body;
};

inline HttpReply http_request(unsigned short port, boost::beast::http::verb verb, const std::string& target,
                              const std::string& body = "", const std::string& type = "text/plain") {
  namespace http = boost::beast::http;
  boost::asio::io_context ioc;
  boost::asio::ip::tcp::resolver resolver(ioc);
  boost::beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "127.0.0.1");
  req.set(http::field::content_type, type);
  req.body() = body;
  req.prepare_payload();
  http::write(stream, req);
  boost::beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  boost::beast::error_code ec;
  stream.socket().shutdown(boost::asio::ip::tcp::socket::shutdown_both, ec);
  return {static_cast<int>(res.result_int()), res.body()};
}

}  // namespace fitchmi::testing
