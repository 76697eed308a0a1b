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

#include "fhctl/rest.hpp"

#include <charconv>

#include "fhctl/json_io.hpp"
#include "fhctl/log.hpp"
#include "httplib.h"

namespace fhctl {
namespace {

using httplib::Request;
using httplib::Response;
using nlohmann::json;

std::string route(const std::string& tail) { return std::string(kApiPrefix) + tail; }

void send_json(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, const Error& err) {
  send_json(res, http_status_for(err.code), {{"error", std::string(errc_name(err.code))}, {"message", err.message}});
}

void send_error(Response& res, int status, Errc code, const std::string& message) {
  send_json(res, status, {{"error", std::string(errc_name(code))}, {"message", message}});
}

Result<json> body_json(const Request& req) {
  json doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded()) return Error{Errc::kInvalidArgument, "request body is not valid JSON"};
  if (!doc.is_object()) return Error{Errc::kInvalidArgument, "request body must be an object"};
  return doc;
}

Result<std::string> string_field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end() || !it->is_string()) {
    return Error{Errc::kInvalidArgument, std::string("field \"") + name + "\" must be a string"};
  }
  return it->get<std::string>();
}

int intent_status(const EdgeIntent& intent) {
  if (intent.state == IntentState::kInstalled) return 201;
  if (intent.failure_reason == FailureReason::kUnknownHost) return 404;
  return 422;
}

json intent_response(const EdgeIntent& intent) {
  json out = intent_document(intent);
  if (intent.failure_reason) out["error"] = std::string(to_string(*intent.failure_reason));
  return out;
}

json recompile_document(const RecompileReport& r) {
  return {{"rerouted", r.rerouted}, {"failed", r.failed}, {"recompiled", r.recompiled()}};
}

std::string sse_frame(const EventRecord& r) {
  return "id: " + std::to_string(r.seq) + "\nevent: " + r.type + "\ndata: " + r.to_json().dump() + "\n\n";
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

int http_status_for(Errc code) {
  switch (code) {
    case Errc::kMalformedMac:
    case Errc::kMalformedVlan:
    case Errc::kMalformedDeviceId:
    case Errc::kMalformedHostId:
    case Errc::kMalformedIp:
    case Errc::kInvalidArgument:
    case Errc::kInvalidScenario:
    case Errc::kInvalidHeader:
    case Errc::kTruncated:
    case Errc::kBadVersion:
    case Errc::kBadPt:
    case Errc::kLengthMismatch:
      return 400;
    case Errc::kUnknownDevice:
    case Errc::kUnknownPort:
    case Errc::kUnknownLink:
    case Errc::kUnknownRule:
    case Errc::kUnknownHost:
    case Errc::kUnknownIntent:
    case Errc::kUnknownTeid:
    case Errc::kUnknownUser:
    case Errc::kUnknownService:
      return 404;
    case Errc::kDuplicateMac:
    case Errc::kDuplicateTeid:
    case Errc::kHostInUse:
    case Errc::kInvalidState:
      return 409;
    case Errc::kUnknownAttachment:
    case Errc::kUnsupportedMatch:
    case Errc::kInvalidRule:
    case Errc::kBadQueue:
    case Errc::kNoCommonType:
    case Errc::kNoPath:
    case Errc::kCapacityExceeded:
    case Errc::kUnknownPortal:
    case Errc::kNoBbuSwitch:
      return 422;
    case Errc::kIo:
      return 500;
  }
  return 500;
}

RestServer::RestServer(Controller& controller)
    : controller_(controller), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

RestServer::~RestServer() { stop(); }

Status RestServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ <= 0) return Error{Errc::kIo, "cannot bind " + host};
  } else {
    if (!server_->bind_to_port(host, port)) return Error{Errc::kIo, "cannot bind " + host + ":" + std::to_string(port)};
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  log_info("listening on " + host + ":" + std::to_string(port_));
  return ok_status();
}

void RestServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void RestServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void RestServer::install_routes() {
  httplib::Server& srv = *server_;
  Controller& ctl = controller_;
  const ControllerConfig& cfg = ctl.config();
  const std::string expected = "Basic " + httplib::detail::base64_encode(cfg.username + ":" + cfg.password);

  auto authorized = [expected](const Request& req) {
    const std::string header = req.get_header_value("Authorization");
    const std::size_t space = header.find(' ');
    if (space == std::string::npos) return false;
    std::string scheme = header.substr(0, space);
    for (char& c : scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return scheme == "basic" && "Basic " + header.substr(space + 1) == expected;
  };
  // Wraps a handler with the auth check. `open` endpoints skip it.
  auto guarded = [authorized](bool open, auto handler) {
    return [authorized, open, handler](const Request& req, Response& res) {
      if (!open && !authorized(req)) {
        res.set_header("WWW-Authenticate", "Basic realm=\"fhctl\"");
        send_error(res, 401, Errc::kInvalidArgument, "missing or bad credentials");
        return;
      }
      handler(req, res);
    };
  };
  const bool portal_open = cfg.portal_unauthenticated;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  srv.Options(R"(.*)", [](const Request&, Response& res) { res.status = 204; });

  // Hosts.
  srv.Post(route("/host/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    auto host = parse_host_document(*body);
    if (!host) return send_error(res, 400, host.error().code, host.error().message);
    auto added = ctl.add_host(*host);
    if (!added) return send_error(res, added.error());
    send_json(res, 201, host_document(*added));
  }));
  srv.Get(route("/host/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.hosts_document());
  }));
  srv.Get(route(R"(/host/([^/]+)/([^/]+)/?)"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto id = HostId::parse(req.matches[1].str() + "/" + req.matches[2].str());
    if (!id) return send_error(res, 400, id.error().code, id.error().message);
    auto doc = ctl.host_document_for(*id);
    if (!doc) return send_error(res, 404, Errc::kUnknownHost, "host " + id->to_string() + " is not registered");
    send_json(res, 200, *doc);
  }));
  srv.Delete(route(R"(/host/([^/]+)/([^/]+)/?)"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto id = HostId::parse(req.matches[1].str() + "/" + req.matches[2].str());
    if (!id) return send_error(res, 400, id.error().code, id.error().message);
    if (Status st = ctl.remove_host(*id); !st.ok()) return send_error(res, st.error());
    send_json(res, 200, {{"removed", id->to_string()}});
  }));

  // Intents.
  srv.Post(route("/intent/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    auto request = parse_intent_request(*body);
    if (!request) return send_error(res, 400, request.error().code, request.error().message);
    auto intent = ctl.submit_intent(request->one, request->two, request->bandwidth_mbps);
    if (!intent) return send_error(res, intent.error());
    send_json(res, intent_status(*intent), intent_response(*intent));
  }));
  srv.Get(route("/intent/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.intents_document());
  }));
  srv.Get(route(R"(/intent/([^/]+)/?)"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto doc = ctl.intent_document_for(req.matches[1].str());
    if (!doc) return send_error(res, 404, Errc::kUnknownIntent, "no intent " + req.matches[1].str());
    send_json(res, 200, *doc);
  }));
  srv.Delete(route(R"(/intent/([^/]+)/?)"), guarded(false, [&ctl](const Request& req, Response& res) {
    const std::string id = req.matches[1].str();
    if (Status st = ctl.withdraw_intent(id); !st.ok()) return send_error(res, st.error());
    send_json(res, 200, {{"id", id}, {"state", "WITHDRAWN"}});
  }));
  srv.Post(route(R"(/intent/([^/]+)/retry/?)"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto intent = ctl.retry_intent(req.matches[1].str());
    if (!intent) return send_error(res, intent.error());
    const int status = intent->state == IntentState::kInstalled ? 200 : intent_status(*intent);
    send_json(res, status, intent_response(*intent));
  }));

  // Sessions, diversion, hiring.
  srv.Post(route("/session/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    auto s = parse_session_request(*body);
    if (!s) return send_error(res, 400, s.error().code, s.error().message);
    auto teid = ctl.create_session(*s);
    if (!teid) return send_error(res, teid.error());
    send_json(res, 201, *ctl.session_document_for(*teid));
  }));
  srv.Get(route("/session/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.sessions_document());
  }));
  srv.Get(route(R"(/session/(\d+)/?)"), guarded(portal_open, [&ctl](const Request& req, Response& res) {
    std::uint64_t teid = 0;
    if (!parse_u64(req.matches[1].str(), teid) || teid > UINT32_MAX) {
      return send_error(res, 400, Errc::kInvalidArgument, "bad teid");
    }
    auto doc = ctl.session_document_for(static_cast<std::uint32_t>(teid));
    if (!doc) return send_error(res, 404, Errc::kUnknownTeid, "no session for teid " + req.matches[1].str());
    send_json(res, 200, *doc);
  }));
  srv.Post(route("/diversion/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    std::uint32_t teid = 0;
    std::optional<HostId> portal;
    PolicyAction action = PolicyAction::kAllow;
    try {
      const json& t = body->at("teid");
      if (!t.is_number_integer() || t.get<std::int64_t>() < 1 || t.get<std::int64_t>() > UINT32_MAX) {
        return send_error(res, 400, Errc::kInvalidArgument, "teid must be an integer in 1..4294967295");
      }
      teid = static_cast<std::uint32_t>(t.get<std::int64_t>());
      auto parsed = parse_policy_action(body->at("action").get<std::string>());
      if (!parsed) return send_error(res, parsed.error());
      action = *parsed;
      if (body->contains("portal") && !body->at("portal").is_null()) {
        auto id = HostId::parse(body->at("portal").get<std::string>());
        if (!id) return send_error(res, 400, id.error().code, id.error().message);
        portal = *id;
      }
    } catch (const json::exception& e) {
      return send_error(res, 400, Errc::kInvalidArgument, e.what());
    }
    if (Status st = ctl.set_policy(teid, action, portal); !st.ok()) return send_error(res, st.error());
    json out = *ctl.session_document_for(teid);
    out["action"] = std::string(to_string(action));
    send_json(res, 200, out);
  }));
  srv.Get(route("/diversion/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.state_dump().at("policies"));
  }));
  srv.Post(route("/hire/?"), guarded(portal_open, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    auto user = string_field(*body, "user");
    if (!user) return send_error(res, user.error());
    auto service = string_field(*body, "service");
    if (!service) return send_error(res, service.error());
    const std::string billing = body->value("billing", std::string());
    auto outcome = ctl.hire_service(*user, *service, billing);
    if (!outcome) return send_error(res, outcome.error());
    json out{{"user", *user},
             {"service", *service},
             {"newly_hired", outcome->newly_hired},
             {"released", outcome->released}};
    if (outcome->intent_id) {
      out["intent"] = *outcome->intent_id;
      if (auto doc = ctl.intent_document_for(*outcome->intent_id)) out["intent_state"] = doc->at("state");
    }
    send_json(res, 200, out);
  }));
  srv.Get(route("/catalog/?"), guarded(portal_open, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.catalog_document_view());
  }));

  // Event stream.
  srv.Get(route("/events/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    std::uint64_t since = 0;
    if (req.has_param("since") && !parse_u64(req.get_param_value("since"), since)) {
      return send_error(res, 400, Errc::kInvalidArgument, "since must be a non-negative integer");
    }
    const std::string follow = req.has_param("follow") ? req.get_param_value("follow") : "true";
    if (req.get_param_value("format") == "json") {
      json out = json::array();
      for (const EventRecord& r : ctl.events().since(since)) out.push_back(r.to_json());
      return send_json(res, 200, out);
    }
    if (follow == "false" || follow == "0") {
      std::string body;
      for (const EventRecord& r : ctl.events().since(since)) body += sse_frame(r);
      res.status = 200;
      res.set_content(body, "text/event-stream");
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    EventLog* log = &ctl.events();
    res.set_chunked_content_provider("text/event-stream", [log, since](std::size_t, httplib::DataSink& sink) mutable {
      for (const EventRecord& r : log->since(since)) {
        const std::string frame = sse_frame(r);
        if (!sink.write(frame.data(), frame.size())) return false;
        since = r.seq;
      }
      if (!log->wait_for(since, std::chrono::milliseconds(1000))) {
        static const std::string keepalive = ": keepalive\n\n";
        if (!sink.is_writable() || !sink.write(keepalive.data(), keepalive.size())) return false;
      }
      return true;
    });
  }));

  // Views.
  srv.Get(route("/state/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.state_dump());
  }));
  srv.Get(route("/topology/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.topology_document());
  }));
  srv.Get(route("/alerts/?"), guarded(false, [&ctl](const Request&, Response& res) {
    send_json(res, 200, ctl.alerts_document());
  }));

  // Operator actions.
  srv.Post(route("/link/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    auto a_text = string_field(*body, "a");
    if (!a_text) return send_error(res, a_text.error());
    auto b_text = string_field(*body, "b");
    if (!b_text) return send_error(res, b_text.error());
    auto a = DeviceId::parse(*a_text);
    if (!a) return send_error(res, a.error());
    auto b = DeviceId::parse(*b_text);
    if (!b) return send_error(res, b.error());
    if (body->value("up", false)) return send_error(res, 400, Errc::kInvalidArgument, "links can only be taken down");
    auto report = ctl.kill_link(*a, *b);
    if (!report) return send_error(res, report.error());
    send_json(res, 200, recompile_document(*report));
  }));
  srv.Post(route("/negotiation/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    if (body->contains("default") || body->contains("profiles")) {
      auto table = parse_negotiation_table(*body);
      if (!table) return send_error(res, table.error());
      if (Status st = ctl.set_negotiation(*table); !st.ok()) return send_error(res, st.error());
    }
    if (auto it = body->find("strict"); it != body->end()) {
      if (!it->is_boolean()) return send_error(res, 400, Errc::kInvalidArgument, "strict must be a boolean");
      ctl.set_strict_negotiation(it->get<bool>());
    }
    send_json(res, 200, ctl.state_dump().at("negotiation"));
  }));
  srv.Post(route("/sim/?"), guarded(false, [&ctl](const Request& req, Response& res) {
    auto body = body_json(req);
    if (!body) return send_error(res, body.error());
    SimRequest sim;
    try {
      for (const auto& f : body->value("flows", json::array())) {
        auto flow = parse_flow_document(f);
        if (!flow) return send_error(res, flow.error());
        sim.flows.push_back(*flow);
      }
      sim.until_s = body->value("until", sim.until_s);
      sim.seed = body->value("seed", sim.seed);
      sim.bin_width_s = body->value("bin_width", sim.bin_width_s);
    } catch (const json::exception& e) {
      return send_error(res, 400, Errc::kInvalidArgument, e.what());
    }
    if (!(sim.until_s > 0)) return send_error(res, 400, Errc::kInvalidArgument, "until must be positive");
    auto report = ctl.run_simulation(sim);
    if (!report) return send_error(res, report.error());
    send_json(res, 200, report->to_json());
  }));
}

}  // namespace fhctl
