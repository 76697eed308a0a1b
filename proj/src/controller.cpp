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

#include "fhctl/controller.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fhctl/json_io.hpp"
#include "fhctl/log.hpp"

namespace fhctl {

using nlohmann::json;

constexpr int kSnapshotVersion = 1;

// --- command queue ------------------------------------------------------------

CommandQueue::~CommandQueue() { stop(); }

void CommandQueue::start() {
  if (threaded()) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = false;
  }
  worker_ = std::thread([this] { loop(); });
}

void CommandQueue::stop() {
  if (!threaded()) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void CommandQueue::post(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
}

void CommandQueue::loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    job();
  }
}

// --- construction -------------------------------------------------------------

Controller::Controller(ControllerConfig config, Topology topology)
    : config_(std::move(config)),
      dataplane_(std::move(topology)),
      qos_(config_.negotiation),
      intents_(dataplane_, hosts_, qos_),
      diversion_(dataplane_, hosts_, intents_) {
  qos_.strict_negotiation_mode(config_.strict_negotiation);
  intents_.set_queue_buffer_bytes(config_.queue_buffer_bytes);
  diversion_.set_catalog(config_.catalog);
  diversion_.set_default_portal(config_.default_portal);

  const auto start = std::chrono::steady_clock::now();
  clock_ = [start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  intents_.set_listener([this](const EdgeIntent& intent, IntentState previous) {
    json data = intent_document(intent);
    data["previous"] = std::string(to_string(previous));
    emit(event_type::kIntentStateChanged, std::move(data));
    if (intent.state == IntentState::kInstalled) alerts_.on_intent_installed(intent, now());
    if (intent.failure_reason && intent.state == IntentState::kPendingAdd) {
      std::string msg = "intent " + intent.id + " not installed: code=" + std::string(to_string(*intent.failure_reason));
      if (intent.failure_detail) msg += " detail=" + *intent.failure_detail;
      if (intent.failure_device) msg += " device=" + intent.failure_device->to_string();
      log_warn(msg);
    }
  });
  diversion_.set_listener([this](const gtpu::UserSession& session, gtpu::SessionState previous) {
    json data = session_document(session);
    data["previous"] = std::string(gtpu::to_string(previous));
    emit(event_type::kSessionStateChanged, std::move(data));
  });
  alerts_.set_emitter([this](const char* type, json data) { emit(type, std::move(data)); });
}

Controller::~Controller() {
  events_.interrupt();
  commands_.stop();
}

Result<std::unique_ptr<Controller>> Controller::create(ControllerConfig config, const json& scenario) {
  if (Status st = config.negotiation.validate(); !st.ok()) return st.error();
  auto topo = load_topology(scenario);
  if (!topo) return topo.error();
  std::unique_ptr<Controller> ctl(new Controller(std::move(config), std::move(*topo)));

  const auto& path = ctl->config_.persistence_path;
  if (path && std::filesystem::exists(*path)) {
    auto snap = read_json_file(*path);
    if (!snap) return snap.error();
    if (Status st = ctl->restore(*snap); !st.ok()) return st.error();
    return ctl;
  }
  if (scenario.contains("hosts")) {
    for (const auto& doc : scenario.at("hosts")) {
      auto host = parse_host_document(doc);
      if (!host) return Error{Errc::kInvalidScenario, "scenario host: " + host.error().message};
      if (auto added = ctl->add_host(*host); !added) {
        return Error{Errc::kInvalidScenario, "scenario host: " + added.error().to_string()};
      }
    }
  }
  return ctl;
}

Result<std::unique_ptr<Controller>> Controller::from_config(ControllerConfig config) {
  if (!config.scenario_path) return Error{Errc::kInvalidArgument, "config names no scenario"};
  auto scenario = read_json_file(*config.scenario_path);
  if (!scenario) return scenario.error();
  return create(std::move(config), *scenario);
}

void Controller::set_clock(std::function<double()> clock) {
  std::unique_lock lock(state_mu_);
  clock_ = std::move(clock);
}

void Controller::emit(const char* type, json data) { events_.append(type, now(), std::move(data)); }

// --- mutations ------------------------------------------------------------------

Result<EdgeHost> Controller::add_host(const EdgeHost& host) {
  return mutate([&]() -> Result<EdgeHost> {
    if (Status st = hosts_.add(host, dataplane_.topology()); !st.ok()) return st.error();
    emit(event_type::kHostAdded, host_document(host));
    return host;
  });
}

Status Controller::remove_host(const HostId& id) {
  return mutate([&]() -> Status {
    const EdgeHost* host = hosts_.find(id);
    if (host == nullptr) return Error{Errc::kUnknownHost, "host " + id.to_string() + " is not registered"};
    if (intents_.references_host(id)) {
      return Error{Errc::kHostInUse, "host " + id.to_string() + " is referenced by an intent"};
    }
    json doc = host_document(*host);
    if (Status st = hosts_.remove(id); !st.ok()) return st;
    emit(event_type::kHostRemoved, std::move(doc));
    return ok_status();
  });
}

Result<EdgeIntent> Controller::submit_intent(const HostId& one, const HostId& two, std::optional<double> bandwidth) {
  return mutate([&]() -> Result<EdgeIntent> {
    auto id = intents_.submit_intent(one, two, bandwidth);
    if (!id) return id.error();
    return *intents_.find(*id);
  });
}

Status Controller::withdraw_intent(const std::string& id) {
  return mutate([&] { return intents_.withdraw_intent(id); });
}

Result<EdgeIntent> Controller::retry_intent(const std::string& id) {
  return mutate([&]() -> Result<EdgeIntent> {
    auto r = intents_.retry_intent(id);
    if (!r) return r.error();
    return *intents_.find(*r);
  });
}

Result<RecompileReport> Controller::link_down(std::size_t link_index) {
  return mutate([&]() -> Result<RecompileReport> {
    const Topology& topo = dataplane_.topology();
    const bool was_up = link_index < topo.links().size() && topo.link_up(link_index);
    auto report = intents_.on_link_down(link_index);
    if (report && was_up) {
      const Link& l = topo.link(link_index);
      emit(event_type::kLinkStateChanged, {{"src", port_document(l.src)}, {"dst", port_document(l.dst)}, {"up", false}});
    }
    return report;
  });
}

Result<RecompileReport> Controller::kill_link(const DeviceId& a, const DeviceId& b) {
  std::optional<std::size_t> index;
  {
    std::shared_lock lock(state_mu_);
    const Topology& topo = dataplane_.topology();
    for (std::size_t i = 0; i < topo.links().size(); ++i) {
      if (topo.link(i).src.device == a && topo.link(i).dst.device == b) {
        index = i;
        break;
      }
    }
  }
  if (!index) return Error{Errc::kUnknownLink, "no link from " + a.to_string() + " to " + b.to_string()};
  return link_down(*index);
}

Result<std::uint32_t> Controller::create_session(gtpu::UserSession session) {
  return mutate([&]() -> Result<std::uint32_t> {
    auto teid = diversion_.create_session(session);
    if (!teid) return teid;
    emit(event_type::kSessionStateChanged, session_document(*diversion_.sessions().find(*teid)));
    return teid;
  });
}

Status Controller::set_policy(std::uint32_t teid, PolicyAction action, std::optional<HostId> portal) {
  return mutate([&] { return diversion_.set_policy(teid, action, portal); });
}

Result<HireOutcome> Controller::hire_service(const std::string& user, const std::string& service,
                                             const std::string& billing) {
  return mutate([&] { return diversion_.hire_service(user, service, billing); });
}

void Controller::set_strict_negotiation(bool on) {
  (void)mutate([&] {
    qos_.strict_negotiation_mode(on);
    return ok_status();
  });
}

Status Controller::set_negotiation(NegotiationTable table) {
  return mutate([&] { return qos_.set_table(std::move(table)); });
}

PuntVerdict Controller::on_punt(const PuntEvent& punt, double now_s) {
  alerts_.on_punt(punt, hosts_, intents_, now_s);
  return diversion_.first_packet_trigger(punt) ? PuntVerdict::kReinject : PuntVerdict::kDrop;
}

PuntVerdict Controller::handle_punt(const PuntEvent& punt) {
  return mutate([&] { return on_punt(punt, now()); });
}

Result<SimReport> Controller::run_simulation(const SimRequest& request) {
  return mutate([&]() -> Result<SimReport> {
    SimOptions options;
    options.seed = request.seed;
    options.bin_width_s = request.bin_width_s;
    Simulator sim(dataplane_, hosts_, options);
    for (const TrafficFlow& f : request.flows) {
      if (Status st = sim.add_flow(f); !st.ok()) return st.error();
    }
    auto saved_clock = clock_;
    clock_ = [&sim] { return sim.now_s(); };
    sim.set_punt_handler([&](const PuntEvent& punt) { return on_punt(punt, punt.time_s); });
    SimReport report = sim.run(request.until_s);
    clock_ = std::move(saved_clock);
    json summary = json::array();
    for (const FlowReport& f : report.flows) {
      summary.push_back({{"id", f.flow.flow_id},
                         {"sent", f.sent},
                         {"delivered", f.delivered},
                         {"achieved_rate", f.achieved_rate_mbps}});
    }
    emit(event_type::kSimReportReady, {{"until", report.until_s}, {"flows", std::move(summary)}});
    return report;
  });
}

// --- reads ----------------------------------------------------------------------

json Controller::hosts_document() const {
  std::shared_lock lock(state_mu_);
  json out = json::array();
  for (const EdgeHost& h : hosts_.list()) out.push_back(host_document(h));
  return out;
}

std::optional<json> Controller::host_document_for(const HostId& id) const {
  std::shared_lock lock(state_mu_);
  const EdgeHost* h = hosts_.find(id);
  if (h == nullptr) return std::nullopt;
  return host_document(*h);
}

json Controller::intents_document() const {
  std::shared_lock lock(state_mu_);
  json out = json::array();
  for (const EdgeIntent* i : intents_.list()) out.push_back(intent_document(*i));
  return out;
}

std::optional<json> Controller::intent_document_for(const std::string& id) const {
  std::shared_lock lock(state_mu_);
  const EdgeIntent* i = intents_.find(id);
  if (i == nullptr) return std::nullopt;
  return intent_document(*i);
}

std::optional<EdgeIntent> Controller::intent(const std::string& id) const {
  std::shared_lock lock(state_mu_);
  const EdgeIntent* i = intents_.find(id);
  if (i == nullptr) return std::nullopt;
  return *i;
}

json Controller::sessions_document() const {
  std::shared_lock lock(state_mu_);
  json out = json::array();
  for (const auto& [teid, s] : diversion_.sessions().sessions()) out.push_back(session_document(s));
  return out;
}

std::optional<json> Controller::session_document_for(std::uint32_t teid) const {
  std::shared_lock lock(state_mu_);
  const gtpu::UserSession* s = diversion_.sessions().find(teid);
  if (s == nullptr) return std::nullopt;
  return session_document(*s);
}

json Controller::alerts_document() const {
  std::shared_lock lock(state_mu_);
  return alerts_.snapshot();
}

json Controller::topology_document() const {
  std::shared_lock lock(state_mu_);
  const Topology& topo = dataplane_.topology();
  json devices = json::array();
  for (const auto& [id, dev] : topo.devices()) {
    devices.push_back({{"id", id.to_string()},
                       {"profile", dev.profile},
                       {"ports", dev.ports},
                       {"port_capacity", dev.port_capacity_mbps}});
  }
  json links = json::array();
  for (std::size_t i = 0; i < topo.links().size(); ++i) {
    const Link& l = topo.link(i);
    links.push_back({{"index", i},
                     {"src", port_document(l.src)},
                     {"dst", port_document(l.dst)},
                     {"capacity", l.capacity_mbps},
                     {"latency_us", l.latency_us},
                     {"up", topo.link_up(i)}});
  }
  json hosts = json::array();
  for (const EdgeHost& h : hosts_.list()) hosts.push_back(host_document(h));
  return {{"devices", std::move(devices)}, {"links", std::move(links)}, {"hosts", std::move(hosts)}};
}

json Controller::dataplane_dump() const {
  std::shared_lock lock(state_mu_);
  return dataplane_.dump();
}

json Controller::catalog_document_view() const {
  std::shared_lock lock(state_mu_);
  return catalog_document(diversion_.catalog());
}

json Controller::state_dump_locked() const {
  json hosts = json::array();
  for (const EdgeHost& h : hosts_.list()) hosts.push_back(host_document(h));
  json intents = json::array();
  for (const EdgeIntent* i : intents_.list()) intents.push_back(intent_document(*i));
  json reservations = json::array();
  for (const auto& [port, mbps] : intents_.reservations().entries()) {
    json r = port_document(port);
    r["reserved"] = mbps;
    reservations.push_back(std::move(r));
  }
  json div = diversion_.snapshot();
  return {{"hosts", std::move(hosts)},
          {"intents", std::move(intents)},
          {"sessions", div.at("sessions")},
          {"policies", div.at("policies")},
          {"dataplane", dataplane_.dump()},
          {"reservations", std::move(reservations)},
          {"alerts", alerts_.snapshot()},
          {"negotiation", negotiation_document(qos_)},
          {"events_head", events_.head()}};
}

json Controller::state_dump() const {
  std::shared_lock lock(state_mu_);
  return state_dump_locked();
}

// --- persistence ----------------------------------------------------------------

json Controller::snapshot() const {
  json hosts = json::array();
  for (const EdgeHost& h : hosts_.list()) hosts.push_back(host_document(h));
  return {{"snapshot_version", kSnapshotVersion},
          {"hosts", std::move(hosts)},
          {"intents", intents_.snapshot()},
          {"diversion", diversion_.snapshot()},
          {"dataplane", dataplane_.dump()},
          {"next_rule_id", dataplane_.next_rule_id()},
          {"alerts", alerts_.snapshot()},
          {"negotiation", negotiation_document(qos_)},
          {"events", events_.snapshot()}};
}

Status Controller::restore(const json& snap) {
  try {
    if (snap.at("snapshot_version").get<int>() != kSnapshotVersion) {
      return Error{Errc::kInvalidArgument, "unsupported snapshot version"};
    }
    HostRegistry hosts;
    for (const auto& doc : snap.at("hosts")) {
      auto host = parse_host_document(doc);
      if (!host) return host.error();
      if (Status st = hosts.add(*host, dataplane_.topology()); !st.ok()) return st;
    }
    auto table = parse_negotiation_table(snap.at("negotiation"));
    if (!table) return table.error();
    if (Status st = dataplane_.restore(snap.at("dataplane"), snap.at("next_rule_id").get<std::uint64_t>()); !st.ok()) {
      return st;
    }
    hosts_ = std::move(hosts);
    if (Status st = intents_.restore(snap.at("intents")); !st.ok()) return st;
    if (Status st = diversion_.restore(snap.at("diversion")); !st.ok()) return st;
    if (Status st = alerts_.restore(snap.at("alerts")); !st.ok()) return st;
    if (Status st = events_.restore(snap.at("events")); !st.ok()) return st;
    if (Status st = qos_.set_table(*table); !st.ok()) return st;
    qos_.strict_negotiation_mode(snap.at("negotiation").value("strict", false));
  } catch (const json::exception& e) {
    return Error{Errc::kInvalidArgument, std::string("bad snapshot: ") + e.what()};
  }
  return ok_status();
}

Status Controller::save_snapshot() const {
  if (!config_.persistence_path) return ok_status();
  const std::string& path = *config_.persistence_path;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return Error{Errc::kIo, "cannot write " + tmp};
    out << snapshot().dump(1) << '\n';
    if (!out.flush()) return Error{Errc::kIo, "short write to " + tmp};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return Error{Errc::kIo, "rename " + tmp + ": " + ec.message()};
  return ok_status();
}

void Controller::persist() const {
  if (Status st = save_snapshot(); !st.ok()) log_warn("snapshot not saved: " + st.error().to_string());
}

}  // namespace fhctl
