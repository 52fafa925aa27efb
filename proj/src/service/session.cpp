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

#include "umbra/service/session.hpp"

#include "umbra/core/hash.hpp"

#include <fmt/format.h>

#include <cmath>

namespace umbra::service {

using nlohmann::json;

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string state_name(RunState s) { return s == RunState::kRunning ? "running" : "paused"; }

}  // namespace

void Outbox::push_reply(Outbound message) {
  std::lock_guard lock(mutex_);
  if (replies_.size() >= kMaxReplies) {
    replies_.pop_front();
    ++dropped_replies_;
  }
  replies_.push_back(std::move(message));
}

void Outbox::set_frame(Outbound message) {
  std::lock_guard lock(mutex_);
  if (frame_) ++dropped_frames_;
  frame_ = std::move(message);
}

void Outbox::set_mesh(Outbound message) {
  std::lock_guard lock(mutex_);
  mesh_ = std::move(message);
}

std::optional<Outbound> Outbox::pop() {
  std::lock_guard lock(mutex_);
  std::optional<Outbound> out;
  if (!replies_.empty()) {
    out = std::move(replies_.front());
    replies_.pop_front();
  } else if (frame_) {
    out = std::move(frame_);
    frame_.reset();
  } else if (mesh_) {
    out = std::move(mesh_);
    mesh_.reset();
  }
  return out;
}

std::uint64_t Outbox::dropped_frames() const {
  std::lock_guard lock(mutex_);
  return dropped_frames_;
}

std::uint64_t Outbox::dropped_replies() const {
  std::lock_guard lock(mutex_);
  return dropped_replies_;
}

Session::Session(std::string id, const SessionSettings& settings)
    : id_(std::move(id)),
      settings_(settings),
      config_(shadow_art_config(settings)),
      problem_(config_),
      optimizer_(config_.optimizer, problem_.initial_parameters().size()),
      u0_(problem_.initial_parameters()),
      u_(u0_),
      start_(std::chrono::steady_clock::now()) {}

std::uint64_t Session::parameter_hash() const { return hash_values(u_); }

void Session::set_target(int view, const Image& gray) {
  problem_.set_target(view, gray);
  optimizer_.clear_momentum();
}

void Session::control(const Control& c) {
  switch (c.command) {
    case ControlCommand::kStart:
      state_ = RunState::kRunning;
      break;
    case ControlCommand::kPause:
      state_ = RunState::kPaused;
      break;
    case ControlCommand::kReset:
      u_ = u0_;
      optimizer_.reset();
      iteration_ = 0;
      break;
    case ControlCommand::kSetStepSize:
      optimizer_.set_step_size(c.value);
      break;
  }
}

bool Session::step() {
  double loss = 0.0;
  try {
    loss = problem_.evaluate(u_, grad_);
  } catch (const PipelineError&) {
    state_ = RunState::kPaused;
    return false;
  }
  if (!std::isfinite(loss) || !all_finite(grad_)) {
    state_ = RunState::kPaused;
    return false;
  }
  last_loss_ = loss;
  const std::vector<double> good = u_;
  optimizer_.step(u_, grad_);
  if (!all_finite(u_)) {
    u_ = good;
    state_ = RunState::kPaused;
    return false;
  }
  ++iteration_;
  return true;
}

double Session::render_current() {
  last_loss_ = problem_.forward(u_);
  return last_loss_;
}

Outbound Session::frame_message(bool initial) const {
  json png = json::array();
  for (int v = 0; v < problem_.views(); ++v) png.push_back(encode_gray_png_base64(problem_.shadow(v)));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  // The frame shows the parameters that produced `loss`, before the step
  // that followed them.
  const int shown = initial ? iteration_ : iteration_ - 1;
  return {json{{"type", "frame"},
               {"session", id_},
               {"iteration", shown},
               {"loss", last_loss_},
               {"seconds", seconds},
               {"initial", initial},
               {"png", png}},
          {}};
}

Outbound Session::mesh_message() const {
  const std::vector<Vec3> positions = problem_.positions(u_);
  Outbound m;
  m.binary = encode_mesh(positions);
  m.header = {{"type", "mesh"},
              {"session", id_},
              {"iteration", iteration_},
              {"vertices", positions.size()},
              {"bytes", m.binary.size()}};
  return m;
}

json Session::status(const std::string& in_reply_to) const {
  json j = status_message(id_, state_name(state_), iteration_);
  j["loss"] = last_loss_;
  j["step_size"] = optimizer_.config().step_size;
  j["params_hash"] = hash_hex(parameter_hash());
  if (!in_reply_to.empty()) j["in_reply_to"] = in_reply_to;
  return j;
}

SessionWorker::SessionWorker(std::unique_ptr<Session> session, std::shared_ptr<Outbox> outbox,
                             std::function<void()> notify)
    : id_(session->id()),
      width_(session->problem().width()),
      height_(session->problem().height()),
      views_(session->problem().views()),
      session_(std::move(session)),
      outbox_(std::move(outbox)),
      notify_(std::move(notify)),
      pending_targets_(views_) {
  thread_ = std::thread([this] { run(); });
}

SessionWorker::~SessionWorker() { stop(); }

void SessionWorker::post_target(int view, Image gray) {
  if (view < 0 || view >= views_) throw ConfigError(fmt::format("target view {} out of range", view));
  if (gray.width() != width_ || gray.height() != height_) {
    throw ConfigError(fmt::format("target is {}x{}, expected {}x{}", gray.width(), gray.height(), width_, height_));
  }
  {
    std::lock_guard lock(mutex_);
    pending_targets_[view] = std::move(gray);
  }
  wake_.notify_one();
}

void SessionWorker::post_control(Control c) {
  {
    std::lock_guard lock(mutex_);
    pending_controls_.push_back(c);
  }
  wake_.notify_one();
}

void SessionWorker::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_one();
  if (thread_.joinable()) thread_.join();
}

void SessionWorker::emit(Outbound message, bool reply) {
  const std::string type = message.header.value("type", std::string());
  if (reply) {
    outbox_->push_reply(std::move(message));
  } else if (type == "mesh") {
    outbox_->set_mesh(std::move(message));
  } else {
    outbox_->set_frame(std::move(message));
  }
  if (notify_) notify_();
}

void SessionWorker::run() {
  Session& s = *session_;
  const SessionSettings& cfg = s.settings();
  const auto heartbeat = std::chrono::milliseconds(cfg.heartbeat_ms);
  try {
    s.render_current();
    emit(s.frame_message(true), false);
  } catch (const std::exception& e) {
    emit({error_message(fmt::format("initial render failed: {}", e.what())), {}}, true);
  }
  auto last_beat = std::chrono::steady_clock::now();
  for (;;) {
    std::vector<std::optional<Image>> targets(views_);
    std::deque<Control> controls;
    {
      std::unique_lock lock(mutex_);
      const bool idle = s.state() == RunState::kPaused;
      auto has_work = [&] {
        if (stopping_ || !pending_controls_.empty()) return true;
        for (const auto& t : pending_targets_) {
          if (t) return true;
        }
        return false;
      };
      if (idle) wake_.wait_until(lock, last_beat + heartbeat, has_work);
      if (stopping_) break;
      std::swap(targets, pending_targets_);
      pending_targets_.assign(views_, std::nullopt);
      std::swap(controls, pending_controls_);
    }
    try {
      for (int v = 0; v < views_; ++v) {
        if (!targets[v]) continue;
        s.set_target(v, *targets[v]);
        json ack = s.status("set_target");
        ack["view"] = v;
        emit({ack, {}}, true);
      }
      for (const Control& c : controls) {
        s.control(c);
        json ack = s.status("control");
        ack["command"] = to_string(c.command);
        emit({ack, {}}, true);
        if (c.command == ControlCommand::kReset) {
          s.render_current();
          emit(s.frame_message(true), false);
        }
      }
      if (s.state() == RunState::kRunning) {
        if (cfg.max_iterations > 0 && s.iteration() >= cfg.max_iterations) {
          s.control(Control{ControlCommand::kPause, 0.0});
          json j = s.status();
          j["reason"] = "max_iterations";
          emit({j, {}}, true);
          last_beat = std::chrono::steady_clock::now();
          continue;
        }
        if (!s.step()) {
          emit({error_message("non-finite loss or gradient; paused at the last good parameters"), {}}, true);
          emit({s.status(), {}}, true);
          continue;
        }
        const int evaluated = s.iteration() - 1;
        if (evaluated % cfg.frame_every == 0) emit(s.frame_message(false), false);
        if (s.iteration() % cfg.mesh_every == 0) emit(s.mesh_message(), false);
      } else if (std::chrono::steady_clock::now() >= last_beat + heartbeat) {
        json j = s.status();
        j["heartbeat"] = true;
        emit({j, {}}, true);
        last_beat = std::chrono::steady_clock::now();
      }
    } catch (const std::exception& e) {
      // A failing session pauses and reports; it never takes the server down.
      s.control(Control{ControlCommand::kPause, 0.0});
      emit({error_message(e.what()), {}}, true);
    }
  }
}

}  // namespace umbra::service
