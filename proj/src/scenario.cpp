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

#include "fhctl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "fhctl/controller.hpp"
#include "fhctl/json_io.hpp"

namespace fhctl {
namespace {

using nlohmann::json;

const std::set<std::string>& action_kinds() {
  static const std::set<std::string> kinds{
      "register-host", "remove-host",    "submit-intent",          "withdraw-intent", "retry-intent",
      "start-flow",    "kill-link",      "set-policy",             "create-session",  "hire-service",
      "mark-state",    "set-negotiation","set-strict-negotiation",
  };
  return kinds;
}

const std::set<std::string>& assertion_kinds() {
  static const std::set<std::string> kinds{
      "intent-state",  "intent-count", "rule-count",  "queue-count",   "dataplane-unchanged-since",
      "session-state", "achieved-rate", "delivered-fraction", "delivered", "dropped",
      "pair-detected", "event-count",  "conservation",
  };
  return kinds;
}

Error invalid(std::string message) { return Error{Errc::kInvalidScenario, std::move(message)}; }

Result<ScriptStep> parse_step(const json& doc, const char* kind_field, std::size_t index, bool assertion) {
  if (!doc.is_object()) return invalid("script step " + std::to_string(index) + " is not an object");
  ScriptStep step;
  step.index = index;
  step.args = doc;
  auto kind = doc.find(kind_field);
  if (kind == doc.end() || !kind->is_string()) {
    return invalid("script step " + std::to_string(index) + " lacks \"" + kind_field + "\"");
  }
  step.kind = kind->get<std::string>();
  const auto& known = assertion ? assertion_kinds() : action_kinds();
  if (!known.count(step.kind)) return invalid("unknown " + std::string(kind_field) + " \"" + step.kind + "\"");
  auto at = doc.find("at");
  if (at == doc.end() || at->is_null()) {
    if (!assertion) return invalid("action " + std::to_string(index) + " has no \"at\"");
    step.at_end = true;
  } else if (!at->is_number() || at->get<double>() < 0 || !std::isfinite(at->get<double>())) {
    return invalid("step " + std::to_string(index) + ": \"at\" must be a non-negative number");
  } else {
    step.at_s = at->get<double>();
  }
  return step;
}

// Pass/fail of `value` against `count`, `min` and `max` in `args`.
std::pair<bool, std::string> check_range(double value, const json& args) {
  std::ostringstream out;
  out << "value=" << value;
  bool ok = true;
  if (args.contains("count")) {
    ok = ok && value == args.at("count").get<double>();
    out << " expected=" << args.at("count").get<double>();
  }
  if (args.contains("min")) {
    ok = ok && value >= args.at("min").get<double>();
    out << " min=" << args.at("min").get<double>();
  }
  if (args.contains("max")) {
    ok = ok && value <= args.at("max").get<double>();
    out << " max=" << args.at("max").get<double>();
  }
  return {ok, out.str()};
}

std::string str_arg(const json& args, const char* name) { return args.value(name, std::string()); }

class Runner {
 public:
  Runner(Controller& ctl, Simulator& sim) : ctl_(ctl), sim_(sim) {}

  Status apply(const ScriptStep& step) {
    const json& a = step.args;
    const std::string& k = step.kind;
    try {
      if (k == "register-host") {
        auto host = parse_host_document(a.at("host"));
        if (!host) return host.error();
        auto added = ctl_.add_host(*host);
        if (!added) return added.error();
        return ok_status();
      }
      if (k == "remove-host") {
        auto id = HostId::parse(a.at("host").get<std::string>());
        if (!id) return id.error();
        return ctl_.remove_host(*id);
      }
      if (k == "submit-intent") {
        auto request = parse_intent_request(a);
        if (!request) return request.error();
        auto intent = ctl_.submit_intent(request->one, request->two, request->bandwidth_mbps);
        if (!intent) return intent.error();
        if (a.contains("as")) refs_[a.at("as").get<std::string>()] = intent->id;
        return ok_status();
      }
      if (k == "withdraw-intent") return ctl_.withdraw_intent(intent_ref(a));
      if (k == "retry-intent") {
        auto intent = ctl_.retry_intent(intent_ref(a));
        if (!intent) return intent.error();
        return ok_status();
      }
      if (k == "start-flow") {
        json doc = a.at("flow");
        if (!doc.contains("start")) doc["start"] = step.at_s;
        auto flow = parse_flow_document(doc);
        if (!flow) return flow.error();
        return sim_.add_flow(*flow);
      }
      if (k == "kill-link") {
        Result<RecompileReport> report = Error{Errc::kInvalidArgument};
        if (a.contains("link")) {
          report = ctl_.link_down(a.at("link").get<std::size_t>());
        } else {
          auto from = DeviceId::parse(a.at("a").get<std::string>());
          if (!from) return from.error();
          auto to = DeviceId::parse(a.at("b").get<std::string>());
          if (!to) return to.error();
          report = ctl_.kill_link(*from, *to);
        }
        if (!report) return report.error();
        return ok_status();
      }
      if (k == "set-policy") {
        auto action = parse_policy_action(a.at("policy").get<std::string>());
        if (!action) return action.error();
        std::optional<HostId> portal;
        if (a.contains("portal")) {
          auto id = HostId::parse(a.at("portal").get<std::string>());
          if (!id) return id.error();
          portal = *id;
        }
        return ctl_.set_policy(a.at("teid").get<std::uint32_t>(), *action, portal);
      }
      if (k == "create-session") {
        auto session = parse_session_request(a.at("session"));
        if (!session) return session.error();
        auto teid = ctl_.create_session(*session);
        if (!teid) return teid.error();
        return ok_status();
      }
      if (k == "hire-service") {
        auto outcome = ctl_.hire_service(a.at("user").get<std::string>(), a.at("service").get<std::string>(),
                                         str_arg(a, "billing"));
        if (!outcome) return outcome.error();
        if (a.contains("as") && outcome->intent_id) refs_[a.at("as").get<std::string>()] = *outcome->intent_id;
        return ok_status();
      }
      if (k == "mark-state") {
        marks_[a.at("name").get<std::string>()] = ctl_.state_dump().at("dataplane");
        return ok_status();
      }
      if (k == "set-negotiation") {
        auto table = parse_negotiation_table(a.at("negotiation"));
        if (!table) return table.error();
        return ctl_.set_negotiation(*table);
      }
      if (k == "set-strict-negotiation") {
        ctl_.set_strict_negotiation(a.at("strict").get<bool>());
        return ok_status();
      }
    } catch (const json::exception& e) {
      return Error{Errc::kInvalidScenario, "action " + std::to_string(step.index) + " (" + k + "): " + e.what()};
    }
    return invalid("unhandled action " + k);
  }

  // Runs an action and records an outcome when it misbehaves relative to
  // its optional `expect_error`.
  void run_action(const ScriptStep& step) {
    Status st = apply(step);
    const std::string expected = str_arg(step.args, "expect_error");
    if (!st.ok() && st.error().code == Errc::kInvalidScenario) {
      validation_error_ = st.error();
      return;
    }
    if (expected.empty() && st.ok()) return;
    AssertionOutcome out;
    out.index = step.index;
    out.kind = "action:" + step.kind;
    out.label = step.args.value("label", out.kind);
    if (expected.empty()) {
      out.detail = st.error().to_string();
    } else if (st.ok()) {
      out.detail = "expected error " + expected + ", action succeeded";
    } else {
      out.passed = std::string(errc_name(st.error().code)) == expected;
      out.detail = "error " + std::string(errc_name(st.error().code));
    }
    action_outcomes_.push_back(out);
  }

  AssertionOutcome check(const ScriptStep& step, const SimReport& report) {
    AssertionOutcome out;
    out.index = step.index;
    out.kind = step.kind;
    out.label = step.args.value("label", step.kind);
    try {
      auto [passed, detail] = evaluate(step, report);
      out.passed = passed;
      out.detail = detail;
    } catch (const json::exception& e) {
      out.detail = std::string("malformed assertion: ") + e.what();
    }
    return out;
  }

  std::vector<AssertionOutcome>& action_outcomes() { return action_outcomes_; }
  const std::optional<Error>& validation_error() const { return validation_error_; }

 private:
  std::string intent_ref(const json& a) const {
    const std::string ref = a.at("intent").get<std::string>();
    auto it = refs_.find(ref);
    return it == refs_.end() ? ref : it->second;
  }

  std::pair<bool, std::string> evaluate(const ScriptStep& step, const SimReport& report) {
    const json& a = step.args;
    const std::string& k = step.kind;
    if (k == "intent-state") {
      const std::string id = intent_ref(a);
      auto intent = ctl_.intent(id);
      if (!intent) return {false, "no intent " + id};
      std::string detail = "state=" + std::string(to_string(intent->state));
      bool ok = to_string(intent->state) == a.at("state").get<std::string>();
      if (intent->failure_reason) detail += " reason=" + std::string(to_string(*intent->failure_reason));
      if (intent->failure_detail) detail += " detail=" + *intent->failure_detail;
      if (a.contains("failure_reason")) {
        const std::string want = a.at("failure_reason").is_null() ? "" : a.at("failure_reason").get<std::string>();
        const std::string have = intent->failure_reason ? std::string(to_string(*intent->failure_reason)) : "";
        ok = ok && want == have;
      }
      if (a.contains("path")) {
        std::vector<std::string> have;
        for (const DeviceId& d : intent->path.value_or(std::vector<DeviceId>{})) have.push_back(d.to_string());
        ok = ok && have == a.at("path").get<std::vector<std::string>>();
        detail += " path=" + json(have).dump();
      }
      if (a.contains("failure_detail")) {
        ok = ok && intent->failure_detail.value_or("") == a.at("failure_detail").get<std::string>();
      }
      return {ok, detail};
    }
    if (k == "intent-count") {
      std::size_t n = 0;
      for (const EdgeIntent* i : ctl_.intents().list()) {
        if (!a.contains("state") || to_string(i->state) == a.at("state").get<std::string>()) ++n;
      }
      return check_range(static_cast<double>(n), a);
    }
    if (k == "rule-count") {
      std::optional<std::string> cookie;
      if (a.contains("intent")) cookie = intent_ref(a);
      if (a.contains("teid")) cookie = "policy:" + std::to_string(a.at("teid").get<std::uint32_t>());
      std::size_t n = 0;
      for (const auto& [id, device] : ctl_.dataplane().topology().devices()) {
        if (a.contains("device") && id.to_string() != a.at("device").get<std::string>()) continue;
        for (const FlowRule& r : ctl_.dataplane().flow_table(id)) {
          if (!cookie || r.cookie == *cookie) ++n;
        }
      }
      return check_range(static_cast<double>(n), a);
    }
    if (k == "queue-count") {
      std::size_t n = 0;
      for (const auto& [key, q] : ctl_.dataplane().queues()) {
        if (!a.contains("device") || q.device.to_string() == a.at("device").get<std::string>()) ++n;
      }
      return check_range(static_cast<double>(n), a);
    }
    if (k == "dataplane-unchanged-since") {
      const std::string mark = a.at("mark").get<std::string>();
      auto it = marks_.find(mark);
      if (it == marks_.end()) return {false, "no mark " + mark};
      const bool same = it->second.dump() == ctl_.state_dump().at("dataplane").dump();
      return {same, same ? "identical" : "dataplane differs from mark " + mark};
    }
    if (k == "session-state") {
      const auto* s = ctl_.diversion().sessions().find(a.at("teid").get<std::uint32_t>());
      if (!s) return {false, "no session"};
      const std::string have(gtpu::to_string(s->state));
      return {have == a.at("state").get<std::string>(), "state=" + have};
    }
    if (k == "achieved-rate") {
      const FlowReport* f = report.flow(a.at("flow").get<std::string>());
      if (!f) return {false, "no flow"};
      return check_range(f->achieved_rate_mbps, a);
    }
    if (k == "delivered-fraction") {
      std::optional<HostId> host;
      if (a.contains("host")) {
        auto id = HostId::parse(a.at("host").get<std::string>());
        if (!id) return {false, id.error().to_string()};
        host = *id;
      }
      auto frac = report.delivered_fraction(a.at("flow").get<std::string>(), a.value("from", 0.0),
                                            a.value("to", report.until_s), host);
      if (!frac) return {false, "no packets sent in window"};
      return check_range(*frac, a);
    }
    if (k == "delivered" || k == "dropped") {
      const FlowReport* f = report.flow(a.at("flow").get<std::string>());
      if (!f) return {false, "no flow"};
      double value = static_cast<double>(k == "dropped" ? f->dropped : f->delivered);
      if (k == "delivered" && a.contains("host")) {
        auto id = HostId::parse(a.at("host").get<std::string>());
        if (!id) return {false, id.error().to_string()};
        auto it = f->delivered_to.find(*id);
        value = it == f->delivered_to.end() ? 0.0 : static_cast<double>(it->second);
      }
      return check_range(value, a);
    }
    if (k == "pair-detected") {
      auto rrh = HostId::parse(a.at("rrh").get<std::string>());
      auto bbu = HostId::parse(a.at("bbu").get<std::string>());
      if (!rrh || !bbu) return {false, "bad host id"};
      const DetectedPair* p = ctl_.alerts().find(*rrh, *bbu);
      const bool want = a.value("detected", true);
      if (!p) return {!want, "not detected"};
      bool ok = want;
      if (a.contains("acknowledged")) ok = ok && p->acknowledged == a.at("acknowledged").get<bool>();
      return {ok, "packets=" + std::to_string(p->packet_count) + (p->acknowledged ? " acknowledged" : "")};
    }
    if (k == "event-count") {
      std::size_t n = 0;
      for (const EventRecord& r : ctl_.events().since(0)) {
        if (!a.contains("type") || r.type == a.at("type").get<std::string>()) ++n;
      }
      return check_range(static_cast<double>(n), a);
    }
    if (k == "conservation") {
      std::ostringstream detail;
      bool ok = report.conservation_ok;
      for (const FlowReport& f : report.flows) {
        if (!f.conserved()) {
          ok = false;
          detail << f.flow.flow_id << " not conserved; ";
        }
      }
      return {ok, ok ? "sent = delivered + dropped + in_flight" : detail.str()};
    }
    return {false, "unhandled assertion " + k};
  }

  Controller& ctl_;
  Simulator& sim_;
  std::map<std::string, std::string> refs_;
  std::map<std::string, json> marks_;
  std::vector<AssertionOutcome> action_outcomes_;
  std::optional<Error> validation_error_;
};

}  // namespace

Result<Script> parse_script(const json& doc) {
  if (!doc.is_object()) return invalid("script must be an object");
  try {
    if (doc.value("script_version", 0) != kScriptVersion) {
      return invalid("script_version must be " + std::to_string(kScriptVersion));
    }
    Script s;
    s.name = doc.value("name", std::string());
    if (doc.contains("config")) {
      if (!doc.at("config").is_object()) return invalid("config must be an object");
      s.config = doc.at("config");
    }
    s.until_s = doc.value("until", s.until_s);
    s.bin_width_s = doc.value("bin_width", s.bin_width_s);
    s.seed = doc.value("seed", s.seed);
    if (!(s.until_s > 0) || !(s.bin_width_s > 0)) return invalid("until and bin_width must be positive");
    std::size_t index = 0;
    for (const auto& flow : doc.value("flows", json::array())) {
      ScriptStep step;
      step.index = index++;
      step.kind = "start-flow";
      step.at_s = 0.0;
      step.args = {{"action", "start-flow"}, {"at", 0.0}, {"flow", flow}};
      s.actions.push_back(std::move(step));
    }
    for (const auto& a : doc.value("actions", json::array())) {
      auto step = parse_step(a, "action", index++, false);
      if (!step) return step.error();
      s.actions.push_back(std::move(*step));
    }
    for (const auto& a : doc.value("assertions", json::array())) {
      auto step = parse_step(a, "assert", index++, true);
      if (!step) return step.error();
      s.assertions.push_back(std::move(*step));
    }
    return s;
  } catch (const json::exception& e) {
    return invalid(std::string("script: ") + e.what());
  }
}

bool ScenarioOutcome::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionOutcome& a) { return a.passed; });
}

json ScenarioOutcome::to_json() const {
  json list = json::array();
  for (const AssertionOutcome& a : assertions) {
    list.push_back({{"index", a.index}, {"kind", a.kind}, {"label", a.label}, {"passed", a.passed}, {"detail", a.detail}});
  }
  return {{"script", script}, {"passed", passed()}, {"assertions", list}, {"report", report.to_json()},
          {"final_state", final_state}};
}

std::string ScenarioOutcome::table() const {
  std::ostringstream out;
  out << report.table();
  for (const AssertionOutcome& a : assertions) {
    out << (a.passed ? "PASS " : "FAIL ") << std::setw(3) << a.index << "  " << a.label << "  " << a.detail << "\n";
  }
  out << (passed() ? "all assertions hold" : "assertion failure") << "\n";
  return out.str();
}

Result<ScenarioOutcome> run_script(const json& scenario, const Script& script, const ControllerConfig& base_config,
                                   const RunOverrides& overrides) {
  auto config = merge_config(base_config, script.config);
  if (!config) return invalid("script config: " + config.error().message);
  // Scripted runs start from the scenario alone.
  config->persistence_path.reset();
  auto ctl = Controller::create(*config, scenario);
  if (!ctl) return ctl.error();
  Controller& controller = **ctl;

  SimOptions options;
  options.seed = overrides.seed.value_or(script.seed);
  options.bin_width_s = script.bin_width_s;
  Simulator sim(controller.dataplane(), controller.hosts(), options);
  controller.set_clock([&sim] { return sim.now_s(); });
  sim.set_punt_handler([&controller](const PuntEvent& p) { return controller.handle_punt(p); });

  Runner runner(controller, sim);
  for (const ScriptStep& step : script.actions) {
    sim.schedule(step.at_s, [&runner, &step] { runner.run_action(step); });
  }
  std::vector<AssertionOutcome> outcomes;
  std::vector<bool> evaluated(script.assertions.size(), false);
  for (std::size_t i = 0; i < script.assertions.size(); ++i) {
    const ScriptStep& step = script.assertions[i];
    if (step.at_end) continue;
    sim.schedule(step.at_s, [&, i] {
      outcomes.push_back(runner.check(script.assertions[i], sim.report()));
      evaluated[i] = true;
    });
  }

  const double until = overrides.until_s.value_or(script.until_s);
  ScenarioOutcome result;
  result.script = script.name;
  result.report = sim.run(until);
  if (runner.validation_error()) return *runner.validation_error();

  for (std::size_t i = 0; i < script.assertions.size(); ++i) {
    const ScriptStep& step = script.assertions[i];
    if (step.at_end) {
      outcomes.push_back(runner.check(step, result.report));
    } else if (!evaluated[i]) {
      AssertionOutcome out;
      out.index = step.index;
      out.kind = step.kind;
      out.label = step.args.value("label", step.kind);
      out.detail = "not reached before the end of the run";
      outcomes.push_back(out);
    }
  }
  for (AssertionOutcome& a : runner.action_outcomes()) outcomes.push_back(std::move(a));
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const AssertionOutcome& x, const AssertionOutcome& y) { return x.index < y.index; });
  result.assertions = std::move(outcomes);
  result.final_state = controller.state_dump();
  return result;
}

Result<ScenarioOutcome> run_script_files(const std::string& scenario_path, const std::string& script_path,
                                         const RunOverrides& overrides) {
  auto scenario = read_json_file(scenario_path);
  if (!scenario) return invalid(scenario.error().message);
  auto doc = read_json_file(script_path);
  if (!doc) return invalid(doc.error().message);
  auto script = parse_script(*doc);
  if (!script) return script.error();
  return run_script(*scenario, *script, ControllerConfig{}, overrides);
}

}  // namespace fhctl
