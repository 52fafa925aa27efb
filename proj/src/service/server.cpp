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

#include "umbra/service/server.hpp"

#include "umbra/service/session.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include <atomic>
#include <thread>
#include <vector>

namespace umbra::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

struct Shared {
  SessionSettings defaults;
  std::atomic<int> next_session{1};
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Shared& shared)
      : ws_(std::move(socket)), shared_(shared), outbox_(std::make_shared<Outbox>()) {}

  ~WsConnection() { worker_.reset(); }

  void run(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(64 * 1024 * 1024);
    ws_.async_accept(request, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      worker_.reset();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (ws_.got_text()) {
      handle(text);
    } else {
      reply(error_message("binary client messages are not supported"));
    }
    read();
  }

  void reply(json message) {
    outbox_->push_reply({std::move(message), {}});
    pump();
  }

  void handle(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      reply(error_message(fmt::format("malformed JSON: {}", e.what())));
      return;
    }
    const std::string type = j.is_object() ? j.value("type", std::string()) : std::string();
    try {
      if (type == "hello") {
        hello(j);
      } else if (type == "set_target") {
        if (!worker_) throw ConfigError("no session; send hello first");
        const int view = j.value("view", 0);
        if (!j.contains("png") || !j["png"].is_string()) throw ConfigError("set_target needs a base64 PNG in 'png'");
        Image gray;
        try {
          gray = decode_gray_png_base64(j["png"].get<std::string>());
        } catch (const std::exception& e) {
          throw ConfigError(fmt::format("cannot decode target: {}", e.what()));
        }
        worker_->post_target(view, std::move(gray));
      } else if (type == "control") {
        if (!worker_) throw ConfigError("no session; send hello first");
        worker_->post_control(parse_control(j));
      } else {
        throw ConfigError(fmt::format("unexpected message type '{}'", type));
      }
    } catch (const ConfigError& e) {
      reply(error_message(e.what(), type));
    }
  }

  void hello(const json& j) {
    if (worker_) throw ConfigError(fmt::format("session {} already open on this connection", worker_->id()));
    const SessionSettings settings = settings_from_json(j.contains("settings") ? j["settings"] : json(), shared_.defaults);
    const std::string id = fmt::format("s{}", shared_.next_session.fetch_add(1));
    auto session = std::make_unique<Session>(id, settings);
    json ack = session->status("hello");
    ack["settings"] = settings_to_json(settings);
    // Sessions do not outlive their connection, so a resume request always
    // gets a fresh session.
    ack["resumed"] = false;
    ack["vertices"] = session->problem().positions(session->parameters()).size();
    json faces = json::array();
    for (const Face& f : session->problem().faces()) {
      faces.push_back(f[0]);
      faces.push_back(f[1]);
      faces.push_back(f[2]);
    }
    ack["faces"] = std::move(faces);
    ack["width"] = session->problem().width();
    ack["height"] = session->problem().height();
    reply(std::move(ack));
    std::weak_ptr<WsConnection> weak = weak_from_this();
    worker_ = std::make_unique<SessionWorker>(std::move(session), outbox_, [weak] {
      if (auto self = weak.lock()) net::post(self->ws_.get_executor(), [self] { self->pump(); });
    });
  }

  void pump() {
    if (writing_) return;
    std::optional<Outbound> next = outbox_->pop();
    if (!next) return;
    writing_ = true;
    text_ = next->header.dump();
    binary_ = std::move(next->binary);
    ws_.text(true);
    ws_.async_write(net::buffer(text_), beast::bind_front_handler(&WsConnection::on_text, shared_from_this()));
  }

  void on_text(beast::error_code ec, std::size_t) {
    if (ec) return fail();
    if (binary_.empty()) {
      writing_ = false;
      pump();
      return;
    }
    ws_.binary(true);
    ws_.async_write(net::buffer(binary_), beast::bind_front_handler(&WsConnection::on_binary, shared_from_this()));
  }

  void on_binary(beast::error_code ec, std::size_t) {
    if (ec) return fail();
    writing_ = false;
    pump();
  }

  void fail() {
    writing_ = false;
    worker_.reset();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Shared& shared_;
  beast::flat_buffer buffer_;
  std::shared_ptr<Outbox> outbox_;
  std::unique_ptr<SessionWorker> worker_;
  bool writing_ = false;
  std::string text_;
  std::vector<std::uint8_t> binary_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Shared& shared) : stream_(std::move(socket)), shared_(shared) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(request_)) {
      if (request_.target() == "/session") {
        stream_.expires_never();
        std::make_shared<WsConnection>(stream_.release_socket(), shared_)->run(std::move(request_));
        return;
      }
      respond(http::status::not_found, "text/plain", "no WebSocket endpoint here\n");
      return;
    }
    if (request_.target() == "/meshes") {
      if (request_.method() != http::verb::get) {
        respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      } else {
        respond(http::status::ok, "application/json", meshes_json().dump());
      }
      return;
    }
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, const char* type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, request_.version());
    res->set(http::field::server, "umbra");
    res->set(http::field::content_type, type);
    res->keep_alive(request_.keep_alive());
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (res->need_eof()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  Shared& shared_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

}  // namespace

struct Server::Impl {
  ServerOptions options;
  Shared shared;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), shared)->run();
      if (acceptor.is_open()) accept();
    });
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->shared.defaults = impl_->options.defaults;
}

Server::~Server() { stop(); }

unsigned short Server::listen() {
  Impl& s = *impl_;
  const tcp::endpoint endpoint(net::ip::make_address(s.options.host), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.accept();
  return s.acceptor.local_endpoint().port();
}

void Server::run() {
  Impl& s = *impl_;
  std::vector<std::thread> extra;
  for (int i = 1; i < s.options.threads; ++i) extra.emplace_back([&s] { s.ioc.run(); });
  s.ioc.run();
  for (std::thread& t : extra) t.join();
}

void Server::stop() {
  if (!impl_) return;
  net::post(impl_->ioc, [impl = impl_.get()] {
    beast::error_code ignored;
    impl->acceptor.close(ignored);
  });
  impl_->ioc.stop();
}

}  // namespace umbra::service
