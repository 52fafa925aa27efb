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

#pragma once

#include "umbra/experiments/shadow_art.hpp"
#include "umbra/optim/optimizer.hpp"
#include "umbra/service/protocol.hpp"

#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace umbra::service {

// One outgoing message: JSON text, optionally followed by a binary frame.
struct Outbound {
  nlohmann::json header;
  std::vector<std::uint8_t> binary;
};

// Bounded outgoing buffer. Replies (status, error) queue up to a fixed
// depth; frames and meshes occupy one slot each and a newer one replaces an
// unsent older one.
class Outbox {
 public:
  static constexpr std::size_t kMaxReplies = 256;

  void push_reply(Outbound message);
  void set_frame(Outbound message);
  void set_mesh(Outbound message);
  // Replies first, then the frame, then the mesh.
  std::optional<Outbound> pop();

  std::uint64_t dropped_frames() const;
  std::uint64_t dropped_replies() const;

 private:
  mutable std::mutex mutex_;
  std::deque<Outbound> replies_;
  std::optional<Outbound> frame_;
  std::optional<Outbound> mesh_;
  std::uint64_t dropped_frames_ = 0;
  std::uint64_t dropped_replies_ = 0;
};

enum class RunState { kRunning, kPaused };

// The optimization state of one session, driven synchronously. The worker
// below calls it from its own thread; tests drive it directly.
class Session {
 public:
  Session(std::string id, const SessionSettings& settings);

  const std::string& id() const { return id_; }
  const SessionSettings& settings() const { return settings_; }
  RunState state() const { return state_; }
  int iteration() const { return iteration_; }
  double last_loss() const { return last_loss_; }
  const std::vector<double>& parameters() const { return u_; }
  std::uint64_t parameter_hash() const;
  ShadowArtProblem& problem() { return problem_; }

  // Throws ConfigError (size mismatch, bad view); the old target stays.
  // Momentum gathered for the previous target is discarded.
  void set_target(int view, const Image& gray);
  void control(const Control& c);

  // One evaluate/step round at the current parameters. Returns false and
  // pauses when the loss or gradient is not finite; the parameters then
  // stay at their last good value.
  bool step();

  // Renders the current parameters without stepping (initial frame).
  double render_current();

  Outbound frame_message(bool initial) const;
  Outbound mesh_message() const;
  nlohmann::json status(const std::string& in_reply_to = {}) const;

 private:
  std::string id_;
  SessionSettings settings_;
  ShadowArtConfig config_;
  ShadowArtProblem problem_;
  Optimizer optimizer_;
  std::vector<double> u0_;
  std::vector<double> u_;
  std::vector<double> grad_;
  RunState state_ = RunState::kPaused;
  int iteration_ = 0;
  double last_loss_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

// Runs a Session on its own thread. Targets and controls posted from the
// network side are applied at the next iteration boundary; messages go to
// the outbox and `notify` is called after each push.
class SessionWorker {
 public:
  SessionWorker(std::unique_ptr<Session> session, std::shared_ptr<Outbox> outbox, std::function<void()> notify);
  ~SessionWorker();
  SessionWorker(const SessionWorker&) = delete;
  SessionWorker& operator=(const SessionWorker&) = delete;

  const std::string& id() const { return id_; }

  // Latest-wins per view; validated before queueing (throws ConfigError).
  void post_target(int view, Image gray);
  void post_control(Control c);
  void stop();

 private:
  void run();
  void emit(Outbound message, bool reply);

  std::string id_;
  int width_ = 0, height_ = 0, views_ = 1;
  std::unique_ptr<Session> session_;
  std::shared_ptr<Outbox> outbox_;
  std::function<void()> notify_;

  std::mutex mutex_;
  std::condition_variable wake_;
  std::vector<std::optional<Image>> pending_targets_;
  std::deque<Control> pending_controls_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace umbra::service
