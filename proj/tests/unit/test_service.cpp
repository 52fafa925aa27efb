// Copyright 2026 The Umbra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "umbra/io/image_io.hpp"
#include "umbra/service/protocol.hpp"
#include "umbra/service/server.hpp"
#include "umbra/service/session.hpp"

#include "fixtures.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include <atomic>
#include <thread>

namespace umbra::service {
namespace {

using nlohmann::json;

SessionSettings tiny(int views = 1) {
  SessionSettings s;
  s.mesh = "sphere-tiny";
  s.frame_resolution = 32;
  s.shadow_resolution = 64;
  s.views = views;
  return s;
}

Image filled(int w, int h, double value) { return Image(w, h, 1, value); }

int shadow_area(const Image& img) {
  int n = 0;
  for (int p = 0; p < img.pixel_count(); ++p) n += img(p) < 0.5;
  return n;
}

TEST(Protocol, MessageTypesRoundTrip) {
  for (MessageType t : {MessageType::kHello, MessageType::kSetTarget, MessageType::kControl, MessageType::kFrame,
                        MessageType::kMesh, MessageType::kStatus, MessageType::kError}) {
    EXPECT_EQ(parse_message_type(to_string(t)), t);
  }
  EXPECT_THROW(parse_message_type("bogus"), ConfigError);
}

TEST(Protocol, ControlParsing) {
  EXPECT_EQ(parse_control(json{{"command", "pause"}}).command, ControlCommand::kPause);
  const Control c = parse_control(json{{"command", "set_step_size"}, {"value", 0.05}});
  EXPECT_EQ(c.command, ControlCommand::kSetStepSize);
  EXPECT_EQ(c.value, 0.05);
  EXPECT_THROW(parse_control(json{{"command", "jump"}}), ConfigError);
  EXPECT_THROW(parse_control(json{{"command", "set_step_size"}, {"value", -1.0}}), ConfigError);
}

TEST(Protocol, SettingsValidation) {
  EXPECT_EQ(settings_from_json(json{{"mesh", "sphere-coarse"}}).mesh, "sphere-coarse");
  EXPECT_THROW(settings_from_json(json{{"mesh", "teapot"}}), ConfigError);
  EXPECT_THROW(settings_from_json(json{{"speed", 3}}), ConfigError);
  EXPECT_THROW(settings_from_json(json{{"views", 3}}), ConfigError);
  EXPECT_THROW(settings_from_json(json{{"kernel_size", 4}}), ConfigError);
  const SessionSettings s = tiny();
  const SessionSettings back = settings_from_json(settings_to_json(s));
  EXPECT_EQ(settings_to_json(back), settings_to_json(s));
}

TEST(Protocol, MeshAssetCounts) {
  const MeshAsset* a = find_mesh_asset("sphere");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->triangles(), 2 * 80 * 80);
  EXPECT_EQ(meshes_json()["meshes"].size(), mesh_assets().size());
  EXPECT_EQ(find_mesh_asset("cube"), nullptr);
}

TEST(Protocol, MeshEncodingRoundTrip) {
  Rng rng(2);
  std::vector<Vec3> p(17);
  for (Vec3& v : p) v = rng.unit_vector();
  const std::vector<std::uint8_t> bytes = encode_mesh(p);
  EXPECT_EQ(bytes.size(), 8u + 12u * p.size());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "UMSH");
  const std::vector<Vec3> back = decode_mesh(bytes);
  ASSERT_EQ(back.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LT((back[i] - p[i]).norm(), 1e-7);
  EXPECT_ANY_THROW(decode_mesh(std::span(bytes).first(10)));
}

TEST(Protocol, GrayPngRoundTrip) {
  Rng rng(4);
  const Image img = testing::random_image(9, 6, 1, rng);
  const Image back = decode_gray_png_base64(encode_gray_png_base64(img));
  ASSERT_TRUE(back.same_shape(img));
  for (int p = 0; p < img.pixel_count(); ++p) EXPECT_LE(std::abs(back(p) - img(p)), 0.5 / 255.0 + 1e-12);
}

Outbound typed(const std::string& type, int n = 0) { return {json{{"type", type}, {"n", n}}, {}}; }

TEST(Outbox, LatestFrameWins) {
  Outbox box;
  box.set_frame(typed("frame", 1));
  box.set_frame(typed("frame", 2));
  box.set_mesh(typed("mesh", 3));
  box.push_reply(typed("status", 4));
  EXPECT_EQ(box.pop()->header["n"], 4);
  EXPECT_EQ(box.pop()->header["n"], 2);
  EXPECT_EQ(box.pop()->header["n"], 3);
  EXPECT_FALSE(box.pop());
  EXPECT_EQ(box.dropped_frames(), 1u);
}

TEST(Outbox, RepliesAreBounded) {
  Outbox box;
  const int n = static_cast<int>(Outbox::kMaxReplies) + 10;
  for (int i = 0; i < n; ++i) box.push_reply(typed("status", i));
  EXPECT_EQ(box.dropped_replies(), 10u);
  EXPECT_EQ(box.pop()->header["n"], 10);
}

TEST(Session, ResetIsBitwise) {
  SessionSettings s = tiny();
  s.targets = {TargetShape{TargetShape::Kind::kDisk, 0.7}};
  Session a("a", s), b("b", s);
  for (int i = 0; i < 4; ++i) a.step();
  a.control({ControlCommand::kReset});
  EXPECT_EQ(a.iteration(), 0);
  for (int i = 0; i < 4; ++i) a.step(), b.step();
  EXPECT_EQ(a.parameter_hash(), b.parameter_hash());
  EXPECT_EQ(a.last_loss(), b.last_loss());
}

TEST(Session, ZeroStepSizeFreezes) {
  SessionSettings s = tiny();
  s.targets = {TargetShape{TargetShape::Kind::kSquare, 0.5}};
  Session a("a", s);
  a.control({ControlCommand::kSetStepSize, 0.0});
  const std::uint64_t before = a.parameter_hash();
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(a.step());
  EXPECT_EQ(a.parameter_hash(), before);
  EXPECT_EQ(a.status()["step_size"], 0.0);
}

TEST(Session, PauseAndStartChangeState) {
  Session a("a", tiny());
  EXPECT_EQ(a.state(), RunState::kPaused);
  a.control({ControlCommand::kStart});
  EXPECT_EQ(a.state(), RunState::kRunning);
  EXPECT_EQ(a.status()["state"], "running");
  a.control({ControlCommand::kPause});
  EXPECT_EQ(a.state(), RunState::kPaused);
}

TEST(Session, SessionsAreIndependent) {
  SessionSettings s = tiny();
  s.targets = {TargetShape{TargetShape::Kind::kDisk, 0.7}};
  Session a("a", s), b("b", s);
  const std::uint64_t b0 = b.parameter_hash();
  for (int i = 0; i < 3; ++i) a.step();
  EXPECT_EQ(b.parameter_hash(), b0);
  EXPECT_NE(a.parameter_hash(), b0);
  for (int i = 0; i < 3; ++i) b.step();
  EXPECT_EQ(a.parameter_hash(), b.parameter_hash());
}

TEST(Session, InvalidTargetKeepsTheOldOne) {
  Session a("a", tiny());
  const Image before = a.problem().target(0);
  EXPECT_THROW(a.set_target(0, filled(31, 32, 0.0)), ConfigError);
  EXPECT_THROW(a.set_target(1, filled(32, 32, 0.0)), ConfigError);
  EXPECT_EQ(a.problem().target(0), before);
}

TEST(Session, CurrentShadowAsTargetIsAFixedPoint) {
  SessionSettings s = tiny();
  s.targets = {TargetShape{TargetShape::Kind::kDisk, 0.8}};
  s.normal_weight = 0.0;
  Session a("a", s);
  for (int i = 0; i < 5; ++i) a.step();
  a.render_current();
  // Through the wire format, as a client would send it.
  a.set_target(0, decode_gray_png_base64(encode_gray_png_base64(a.problem().shadow(0))));
  const std::vector<Vec3> before = a.problem().positions(a.parameters());
  for (int i = 0; i < 10; ++i) {
    a.step();
    EXPECT_LT(a.last_loss(), 1e-5);
  }
  const std::vector<Vec3> after = a.problem().positions(a.parameters());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_LT((after[i] - before[i]).norm(), 1e-3);
}

TEST(SessionProperty, BlackTargetInflatesWhiteTargetDeflates) {
  for (double value : {0.0, 1.0}) {
    Session a("a", tiny());
    a.render_current();
    a.set_target(0, filled(32, 32, value));
    std::vector<int> areas = {shadow_area(a.problem().shadow(0))};
    for (int round = 0; round < 4; ++round) {
      for (int i = 0; i < 5; ++i) ASSERT_TRUE(a.step());
      a.render_current();
      areas.push_back(shadow_area(a.problem().shadow(0)));
    }
    for (std::size_t i = 1; i < areas.size(); ++i) {
      if (value == 0.0) {
        EXPECT_GE(areas[i], areas[i - 1]);
      } else {
        EXPECT_LE(areas[i], areas[i - 1]);
      }
    }
    EXPECT_NE(areas.front(), areas.back());
  }
}

TEST(SessionProperty, RandomTargetSwapsStayFinite) {
  Session a("a", tiny());
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    if (i % 7 == 0) {
      Image t(32, 32, 1);
      const double cx = rng.uniform(0, 32), cy = rng.uniform(0, 32), r = rng.uniform(0, 20);
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) t.at(x, y) = std::hypot(x - cx, y - cy) < r ? rng.uniform(0, 0.2) : 1.0;
      }
      a.set_target(0, t);
    }
    ASSERT_TRUE(a.step()) << "iteration " << i;
  }
  for (double u : a.parameters()) ASSERT_TRUE(std::isfinite(u));
}

TEST(SessionWorker, FramesArriveEveryOtherIteration) {
  SessionSettings s = tiny();
  s.frame_every = 2;
  s.mesh_every = 10;
  s.max_iterations = 100;
  s.targets = {TargetShape{TargetShape::Kind::kDisk, 0.7}};
  auto box = std::make_shared<Outbox>();
  std::atomic<int> frames{0}, initial{0}, meshes{0};
  std::atomic<bool> done{false};
  std::mutex m;
  std::condition_variable cv;
  auto drain = [&] {
    while (auto msg = box->pop()) {
      const json& h = msg->header;
      const std::string type = h.value("type", std::string());
      if (type == "frame") (h["initial"].get<bool>() ? initial : frames)++;
      if (type == "mesh") ++meshes;
      if (type == "status" && h.value("reason", std::string()) == "max_iterations") {
        std::lock_guard lock(m);
        done = true;
        cv.notify_one();
      }
    }
  };
  {
    SessionWorker worker(std::make_unique<Session>("w", s), box, drain);
    worker.post_control({ControlCommand::kStart});
    std::unique_lock lock(m);
    ASSERT_TRUE(cv.wait_for(lock, std::chrono::seconds(120), [&] { return done.load(); }));
  }
  EXPECT_EQ(initial, 1);
  EXPECT_LE(frames, 50);
  EXPECT_GE(frames, 45);
  EXPECT_EQ(meshes + box->dropped_frames() >= 10u, true);
}

TEST(SessionWorker, RejectsBadTargetsImmediately) {
  auto box = std::make_shared<Outbox>();
  SessionWorker worker(std::make_unique<Session>("w", tiny()), box, nullptr);
  EXPECT_THROW(worker.post_target(0, filled(8, 8, 0.0)), ConfigError);
  EXPECT_THROW(worker.post_target(2, filled(32, 32, 0.0)), ConfigError);
}

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class ServerFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    ServerOptions o;
    o.port = 0;
    o.defaults = tiny();
    server_ = std::make_unique<Server>(o);
    port_ = server_->listen();
    thread_ = std::thread([this] { server_->run(); });
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }
  std::unique_ptr<Server> server_;
  unsigned short port_ = 0;
  std::thread thread_;
};

TEST_F(ServerFixture, ListsMeshesOverHttp) {
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port_)));
  beast::http::request<beast::http::empty_body> req{beast::http::verb::get, "/meshes", 11};
  req.set(beast::http::field::host, "127.0.0.1");
  beast::http::write(stream, req);
  beast::flat_buffer buf;
  beast::http::response<beast::http::string_body> res;
  beast::http::read(stream, buf, res);
  EXPECT_EQ(res.result(), beast::http::status::ok);
  const json j = json::parse(res.body());
  EXPECT_EQ(j["meshes"].size(), mesh_assets().size());
}

TEST_F(ServerFixture, WebSocketSession) {
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::websocket::stream<tcp::socket> ws(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port_)));
  ws.handshake("127.0.0.1", "/session");
  auto send = [&](const json& j) { ws.write(net::buffer(j.dump())); };
  // Reads text messages until one satisfies pred; binary frames are skipped.
  auto until = [&](auto pred) {
    for (int i = 0; i < 500; ++i) {
      beast::flat_buffer buf;
      ws.read(buf);
      if (!ws.got_text()) continue;
      const json j = json::parse(beast::buffers_to_string(buf.data()));
      if (pred(j)) return j;
    }
    ADD_FAILURE() << "no matching message";
    return json();
  };

  send({{"type", "control"}, {"command", "start"}});
  EXPECT_EQ(until([](const json& j) { return j["type"] == "error"; })["in_reply_to"], "control");

  send({{"type", "hello"}, {"settings", {{"max_iterations", 6}, {"targets", {{{"kind", "disk"}, {"size", 0.7}}}}}}});
  const json hello = until([](const json& j) { return j.value("in_reply_to", "") == "hello"; });
  EXPECT_EQ(hello["width"], 32);
  EXPECT_EQ(hello["resumed"], false);
  EXPECT_EQ(hello["faces"].size(), 3u * find_mesh_asset("sphere-tiny")->triangles());
  const json first = until([](const json& j) { return j["type"] == "frame"; });
  EXPECT_TRUE(first["initial"].get<bool>());
  const Image shown = decode_gray_png_base64(first["png"][0].get<std::string>());
  EXPECT_EQ(shown.width(), 32);

  send({{"type", "set_target"}, {"png", "not base64 png"}});
  EXPECT_EQ(until([](const json& j) { return j["type"] == "error"; })["in_reply_to"], "set_target");
  send({{"type", "set_target"}, {"png", encode_gray_png_base64(filled(32, 32, 0.0))}});
  EXPECT_EQ(until([](const json& j) { return j.value("in_reply_to", "") == "set_target"; })["view"], 0);

  send({{"type", "control"}, {"command", "start"}});
  const json stop = until([](const json& j) { return j.value("reason", "") == "max_iterations"; });
  EXPECT_EQ(stop["iteration"], 6);
  EXPECT_EQ(stop["state"], "paused");

  ws.write(net::buffer(std::string("{not json")));
  EXPECT_EQ(until([](const json& j) { return j["type"] == "error"; })["type"], "error");
  ws.close(beast::websocket::close_code::normal);
}

}  // namespace
}  // namespace umbra::service
