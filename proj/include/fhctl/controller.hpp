// Copyright 2026 The fhctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <thread>
#include <type_traits>

#include "fhctl/config.hpp"
#include "fhctl/diversion.hpp"
#include "fhctl/events.hpp"
#include "fhctl/intents.hpp"
#include "fhctl/simulator.hpp"
#include "json.hpp"

namespace fhctl {

/// Single-consumer queue that applies commands in arrival order. Without a
/// worker thread, commands run inline on the caller. Commands issued from
/// the worker itself also run inline.
class CommandQueue {
 public:
  CommandQueue() = default;
  ~CommandQueue();
  CommandQueue(const CommandQueue&) = delete;
  CommandQueue& operator=(const CommandQueue&) = delete;

  void start();
  void stop();
  bool threaded() const { return worker_.joinable(); }

  template <class F>
  auto run(F&& fn) -> std::invoke_result_t<F&> {
    using R = std::invoke_result_t<F&>;
    if (!threaded() || std::this_thread::get_id() == worker_.get_id()) return fn();
    std::packaged_task<R()> task(std::forward<F>(fn));
    std::future<R> done = task.get_future();
    post([&task] { task(); });
    return done.get();
  }

 private:
  void post(std::function<void()> job);
  void loop();

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread worker_;
};

struct SimRequest {
  std::vector<TrafficFlow> flows;
  double until_s = 10.0;
  std::uint64_t seed = 1;
  double bin_width_s = 0.5;
};

/// The control plane: host registry, intent and diversion engines, alert
/// processor and event log over one dataplane. Every mutation goes through
/// the command queue and then holds the state lock exclusively; reads take
/// it shared. Each applied mutation is persisted when a snapshot path is
/// configured.
class Controller {
 public:
  /// `scenario` supplies the topology and optional pre-registered hosts. An
  /// existing snapshot file takes precedence over the scenario's hosts.
  static Result<std::unique_ptr<Controller>> create(ControllerConfig config, const nlohmann::json& scenario);
  /// Loads the scenario named in the config.
  static Result<std::unique_ptr<Controller>> from_config(ControllerConfig config);
  ~Controller();

  const ControllerConfig& config() const { return config_; }
  void start_command_thread() { commands_.start(); }
  void stop_command_thread() { commands_.stop(); }
  /// Controller time in seconds, used for event stamps and alert coalescing.
  void set_clock(std::function<double()> clock);

  // Mutations.
  Result<EdgeHost> add_host(const EdgeHost& host);
  /// Errors: UNKNOWN_HOST, HOST_IN_USE.
  Status remove_host(const HostId& id);
  Result<EdgeIntent> submit_intent(const HostId& one, const HostId& two, std::optional<double> bandwidth_mbps);
  Status withdraw_intent(const std::string& id);
  Result<EdgeIntent> retry_intent(const std::string& id);
  /// Takes down the first link from `a` to `b`. Errors: UNKNOWN_LINK.
  Result<RecompileReport> kill_link(const DeviceId& a, const DeviceId& b);
  Result<RecompileReport> link_down(std::size_t link_index);
  Result<std::uint32_t> create_session(gtpu::UserSession session);
  Status set_policy(std::uint32_t teid, PolicyAction action, std::optional<HostId> portal);
  Result<HireOutcome> hire_service(const std::string& user, const std::string& service, const std::string& billing);
  void set_strict_negotiation(bool on);
  Status set_negotiation(NegotiationTable table);
  /// Alert processing, then the first-packet trigger. Asks for re-injection
  /// when the trigger changed the tables.
  PuntVerdict handle_punt(const PuntEvent& punt);
  /// Runs the simulator over the live dataplane from time zero.
  Result<SimReport> run_simulation(const SimRequest& request);

  // Reads.
  nlohmann::json hosts_document() const;
  std::optional<nlohmann::json> host_document_for(const HostId& id) const;
  nlohmann::json intents_document() const;
  std::optional<nlohmann::json> intent_document_for(const std::string& id) const;
  std::optional<EdgeIntent> intent(const std::string& id) const;
  nlohmann::json sessions_document() const;
  std::optional<nlohmann::json> session_document_for(std::uint32_t teid) const;
  nlohmann::json alerts_document() const;
  nlohmann::json topology_document() const;
  nlohmann::json dataplane_dump() const;
  /// Everything observable: hosts, intents with placements, sessions,
  /// policies, dataplane, reservations, alerts, negotiation.
  nlohmann::json state_dump() const;
  nlohmann::json catalog_document_view() const;

  EventLog& events() { return events_; }
  const EventLog& events() const { return events_; }

  /// Direct access for single-threaded drivers (scenario runner, tests).
  /// Not synchronized.
  Dataplane& dataplane() { return dataplane_; }
  const HostRegistry& hosts() const { return hosts_; }
  const IntentEngine& intents() const { return intents_; }
  const DiversionEngine& diversion() const { return diversion_; }
  const AlertProcessor& alerts() const { return alerts_; }
  const QosNegotiator& negotiator() const { return qos_; }

  nlohmann::json snapshot() const;
  Status restore(const nlohmann::json& snapshot);
  Status save_snapshot() const;

 private:
  Controller(ControllerConfig config, Topology topology);

  template <class F>
  auto mutate(F&& fn) {
    return commands_.run([&] {
      std::unique_lock lock(state_mu_);
      auto result = fn();
      persist();
      return result;
    });
  }

  double now() const { return clock_ ? clock_() : 0.0; }
  void emit(const char* type, nlohmann::json data);
  void persist() const;
  PuntVerdict on_punt(const PuntEvent& punt, double now_s);
  nlohmann::json state_dump_locked() const;

  ControllerConfig config_;
  Dataplane dataplane_;
  HostRegistry hosts_;
  QosNegotiator qos_;
  IntentEngine intents_;
  DiversionEngine diversion_;
  AlertProcessor alerts_;
  EventLog events_;
  std::function<double()> clock_;

  mutable std::shared_mutex state_mu_;
  CommandQueue commands_;
};

}  // namespace fhctl
