#include <gtest/gtest.h>

#include <thread>

#include "fitchmi/server.hpp"
#include "fitchmi/wire.hpp"
#include "support/fixtures.hpp"
#include "support/ws_client.hpp"

using namespace fitchmi;
using namespace fitchmi::testing;
using nlohmann::json;
namespace http = boost::beast::http;

namespace {

class Running {
 public:
  explicit Running(ServeOptions o) : server_(configure(std::move(o))), thread_([this] { server_.run(); }) {}
  ~Running() {
    server_.stop();
    thread_.join();
  }
  unsigned short port() const { return server_.port(); }

 private:
  static ServeOptions configure(ServeOptions o) {
    o.port = 0;
    o.clock = fixed_clock();
    return o;
  }
  Server server_;
  std::thread thread_;
};

// Elaborations of the same session run in-process.
std::pair<std::string, std::string> local_elaborations() {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm");
  s.submit(UserResponse::fragment(read_file("fixtures/s2_4_fragment.txt")));
  return {s.elaborate_module(ElaborationMode::Gapped), s.elaborate_module(ElaborationMode::Full)};
}

}  // namespace

TEST(Server, ReplaysTheSessionOverWebSocket) {
  Running srv({});
  HttpReply up = http_request(srv.port(), http::verb::post, "/modules", read_file("fixtures/peano.proof"));
  ASSERT_EQ(up.status, 201);
  json uploaded = json::parse(up.body);
  EXPECT_EQ(uploaded["theorems"].size(), 3u);

  WsClient c(srv.port());
  json p = c.call({{"type", "start"}, {"module", uploaded["id"]}, {"theorem", "sum-total-comm"}});
  ASSERT_EQ(p["type"], "prompt");
  EXPECT_EQ(p["text"], read_file("tests/golden/s2_4_prompt.txt"));
  json d = c.call({{"type", "fragment"}, {"text", read_file("fixtures/s2_4_fragment.txt")}});
  ASSERT_EQ(d["type"], "done");
  auto [gapped, full] = local_elaborations();
  EXPECT_EQ(d["elaborated_gapped"], gapped);
  EXPECT_EQ(d["elaborated_full"], full);
}

TEST(Server, MalformedMessageKeepsTheConnectionOpen) {
  Running srv({});
  WsClient c(srv.port());
  json e = c.call(json("ignored"));
  EXPECT_EQ(e["type"], "error");
  c.send_raw("{{{");
  EXPECT_EQ(c.receive()["where"], "protocol");
  json p = c.call({{"type", "start"}, {"module", read_file("fixtures/peano.proof")}, {"theorem", "sum-total-comm"}});
  EXPECT_EQ(p["type"], "prompt");
}

TEST(Server, ConcurrentSessionsAreIndependent) {
  ServeOptions o;
  o.module_text = read_file("fixtures/peano.proof");
  Running srv(o);
  WsClient a(srv.port()), b(srv.port());
  json pa = a.call({{"type", "start"}, {"theorem", "sum-total-comm"}});
  json pb = b.call({{"type", "start"}, {"theorem", "sum-total-comm"}});
  ASSERT_EQ(pa["type"], "prompt");
  ASSERT_EQ(pb["type"], "prompt");
  EXPECT_NE(pa["session"], pb["session"]);
  EXPECT_EQ(b.call({{"type", "command"}, {"name", "abort"}})["type"], "failed");
  EXPECT_EQ(a.call({{"type", "fragment"}, {"text", read_file("fixtures/s2_4_fragment.txt")}})["type"], "done");
}

TEST(Server, HttpRoutes) {
  Running srv({});
  EXPECT_EQ(http_request(srv.port(), http::verb::get, "/").status, 200);
  EXPECT_EQ(http_request(srv.port(), http::verb::get, "/nowhere").status, 404);
  HttpReply bad = http_request(srv.port(), http::verb::post, "/modules", "theorem oops");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["error"]["code"], "ParseError");
  HttpReply js = http_request(srv.port(), http::verb::post, "/modules",
                              json{{"module", read_file("fixtures/modus_ponens.proof")}}.dump(), "application/json");
  EXPECT_EQ(js.status, 201);
}

TEST(Server, BindFailureThrows) {
  Running srv({});
  ServeOptions o;
  o.port = srv.port();
  EXPECT_THROW(Server{o}, std::runtime_error);
}
