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

// fhctl: scenario runner, controller daemon and REST client.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fhctl/controller.hpp"
#include "fhctl/log.hpp"
#include "fhctl/rest.hpp"
#include "fhctl/scenario.hpp"
#include "httplib.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct ClientOptions {
  std::string url = "http://127.0.0.1:8181";
  std::string user;
  std::string password;
  std::string format = "table";
};

// Flags win over FHCTL_AUTH ("user:password"), which wins over the defaults.
void resolve_credentials(ClientOptions& opts) {
  std::string user = "onos";
  std::string password = "rocks";
  if (const char* env = std::getenv("FHCTL_AUTH")) {
    const std::string auth(env);
    const auto colon = auth.find(':');
    if (colon != std::string::npos) {
      user = auth.substr(0, colon);
      password = auth.substr(colon + 1);
    }
  }
  if (opts.user.empty()) opts.user = user;
  if (opts.password.empty()) opts.password = password;
}

struct Reply {
  int status = 0;
  json body;
  std::string raw;
};

int transport_failure(const ClientOptions& opts, httplib::Error err) {
  std::cerr << "fhctl: cannot reach " << opts.url << ": " << httplib::to_string(err) << "\n";
  return 3;
}

class Client {
 public:
  explicit Client(const ClientOptions& opts) : opts_(opts), http_(opts.url) {
    http_.set_basic_auth(opts.user, opts.password);
    http_.set_connection_timeout(5);
  }

  // Returns the exit code; fills `reply` on any HTTP response.
  int call(const std::string& method, const std::string& path, const json* body, Reply& reply) {
    const std::string target = std::string(fhctl::kApiPrefix) + path;
    httplib::Result res = method == "GET" ? http_.Get(target)
                          : method == "DELETE"
                              ? http_.Delete(target)
                              : http_.Post(target, body ? body->dump() : "{}", "application/json");
    if (!res) return transport_failure(opts_, res.error());
    reply.status = res->status;
    reply.raw = res->body;
    reply.body = json::parse(res->body, nullptr, false);
    if (res->status >= 400) {
      std::cerr << "fhctl: HTTP " << res->status << ": " << res->body << "\n";
      return 1;
    }
    return 0;
  }

 private:
  const ClientOptions& opts_;
  httplib::Client http_;
};

std::string path_text(const json& intent) {
  if (!intent.contains("path") || !intent.at("path").is_array()) return "-";
  std::string out;
  for (const auto& d : intent.at("path")) out += (out.empty() ? "" : ",") + d.get<std::string>();
  return out;
}

int print_reply(const ClientOptions& opts, const Reply& reply, const std::function<void(const json&)>& table) {
  if (opts.format == "structured" || reply.body.is_discarded()) {
    std::cout << (reply.body.is_discarded() ? reply.raw : reply.body.dump(2)) << "\n";
  } else {
    table(reply.body);
  }
  return 0;
}

int run_scenario(const std::string& scenario, const std::string& script, std::optional<double> until,
                 std::optional<std::uint64_t> seed, const std::string& report_path, const std::string& format) {
  fhctl::RunOverrides overrides{until, seed};
  auto outcome = fhctl::run_script_files(scenario, script, overrides);
  if (!outcome) {
    std::cerr << "fhctl: " << outcome.error().to_string() << "\n";
    return 2;
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    out << outcome->to_json().dump(2) << "\n";
    if (!out) {
      std::cerr << "fhctl: cannot write " << report_path << "\n";
      return 2;
    }
  }
  if (format == "structured") {
    std::cout << outcome->to_json().dump(2) << "\n";
  } else {
    std::cout << outcome->table();
  }
  return outcome->exit_code();
}

int serve(const std::string& config_path, const std::string& host, int port, bool verbose) {
  if (verbose) fhctl::set_log_level(fhctl::LogLevel::kInfo);
  auto config = fhctl::load_config(config_path);
  if (!config) {
    std::cerr << "fhctl: " << config.error().to_string() << "\n";
    return 2;
  }
  if (!host.empty()) config->listen_host = host;
  if (port >= 0) config->listen_port = port;
  auto controller = fhctl::Controller::from_config(*config);
  if (!controller) {
    std::cerr << "fhctl: " << controller.error().to_string() << "\n";
    return 2;
  }

  // Worker threads inherit the blocked mask; only sigwait sees the signals.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  (*controller)->start_command_thread();
  fhctl::RestServer server(**controller);
  if (auto st = server.start(config->listen_host, config->listen_port); !st.ok()) {
    std::cerr << "fhctl: " << st.error().to_string() << "\n";
    return 2;
  }
  std::cout << "fhctl: serving on " << config->listen_host << ":" << server.port() << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  (*controller)->events().interrupt();
  server.stop();
  (*controller)->stop_command_thread();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fhctl: fronthaul SDN controller, simulator and client"};
  app.require_subcommand(1);
  ClientOptions client;

  // run-scenario
  auto* run = app.add_subcommand("run-scenario", "Run a scripted scenario in the simulator");
  std::string scenario_path, script_path, report_path, run_format = "table";
  double until = 0;
  std::uint64_t seed = 0;
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("script", script_path, "Script file")->required();
  auto* until_opt = run->add_option("--until", until, "Simulated seconds, overrides the script");
  auto* seed_opt = run->add_option("--seed", seed, "RNG seed, overrides the script");
  run->add_option("--report", report_path, "Write the JSON report here");
  run->add_option("--format", run_format, "table or structured")->check(CLI::IsMember({"table", "structured"}));

  // serve
  auto* srv = app.add_subcommand("serve", "Run the controller with its REST API");
  std::string config_path, listen_host;
  int listen_port = -1;
  bool verbose = false;
  srv->add_option("--config", config_path, "Controller config file")->required();
  srv->add_option("--host", listen_host, "Listen address, overrides the config");
  srv->add_option("--port", listen_port, "Listen port, overrides the config (0 picks one)");
  srv->add_flag("-v,--verbose", verbose, "Log at info level");

  // Client subcommands share connection options.
  auto add_client_options = [&client](CLI::App* cmd) {
    cmd->add_option("--url", client.url, "Controller base URL");
    cmd->add_option("--user", client.user, "API user (default: FHCTL_AUTH or onos)");
    cmd->add_option("--password", client.password, "API password");
    cmd->add_option("--format", client.format, "table or structured")->check(CLI::IsMember({"table", "structured"}));
  };

  auto* add_host = app.add_subcommand("add-host", "Register an edge host");
  std::string device, port, mac, vlan = "-1", type;
  std::vector<std::string> ips;
  add_host->add_option("--device", device, "Attachment device id")->required();
  add_host->add_option("--port", port, "Attachment port")->required();
  add_host->add_option("--mac", mac, "Host MAC")->required();
  add_host->add_option("--vlan", vlan, "VLAN tag, -1 or None for untagged");
  add_host->add_option("--ip", ips, "Host address (repeatable)");
  add_host->add_option("--type", type, "RRH or BBU")->required();
  add_client_options(add_host);

  auto* add_intent = app.add_subcommand("add-intent", "Connect two hosts, optionally with a bandwidth cap");
  std::string one, two;
  double bandwidth = 0;
  add_intent->add_option("one", one, "First host id (MAC/VLAN)")->required();
  add_intent->add_option("two", two, "Second host id")->required();
  auto* bw_opt = add_intent->add_option("bandwidth", bandwidth, "Cap in Mbit/s");
  add_client_options(add_intent);

  auto* list_intents = app.add_subcommand("list-intents", "List intents");
  add_client_options(list_intents);

  auto* set_div = app.add_subcommand("set-diversion", "Set the policy of a user tunnel");
  std::uint32_t div_teid = 0;
  std::string div_action, div_portal;
  set_div->add_option("teid", div_teid, "Tunnel id")->required();
  set_div->add_option("action", div_action, "ALLOW, DIVERT or DROP")->required();
  set_div->add_option("--portal", div_portal, "Portal host id for DIVERT");
  add_client_options(set_div);

  auto* hire = app.add_subcommand("hire", "Hire a service for a user");
  std::string hire_user, hire_service, billing;
  hire->add_option("user-id", hire_user, "User id")->required();
  hire->add_option("service", hire_service, "Catalog service name")->required();
  hire->add_option("--billing", billing, "Billing token");
  add_client_options(hire);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return run_scenario(scenario_path, script_path, *until_opt ? std::optional<double>(until) : std::nullopt,
                        *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt, report_path, run_format);
  }
  if (srv->parsed()) return serve(config_path, listen_host, listen_port, verbose);

  resolve_credentials(client);
  Client http(client);
  Reply reply;

  if (add_host->parsed()) {
    json body{{"device", device}, {"port", port}, {"mac", mac}, {"vlan", vlan}, {"ips", ips}, {"type", type}};
    if (int rc = http.call("POST", "/host/", &body, reply); rc != 0) return rc;
    return print_reply(client, reply, [](const json& b) {
      std::cout << "host " << b.value("mac", std::string()) << "/" << b.value("vlan", std::string()) << " registered at "
                << b.value("device", std::string()) << ":" << b.value("port", std::string()) << "\n";
    });
  }
  if (add_intent->parsed()) {
    json body{{"one", one}, {"two", two}};
    if (*bw_opt) body["bandwidth"] = bandwidth;
    const int rc = http.call("POST", "/intent/", &body, reply);
    if (rc != 0) return rc;
    return print_reply(client, reply, [](const json& b) { std::cout << b.value("id", std::string()) << "\n"; });
  }
  if (list_intents->parsed()) {
    if (int rc = http.call("GET", "/intent/", nullptr, reply); rc != 0) return rc;
    return print_reply(client, reply, [](const json& b) {
      std::cout << std::left << std::setw(8) << "ID" << std::setw(13) << "STATE" << std::setw(20) << "REASON" << "PATH\n";
      for (const auto& i : b) {
        const std::string reason = i.contains("failure_reason") && i.at("failure_reason").is_string()
                                       ? i.at("failure_reason").get<std::string>()
                                       : "-";
        std::cout << std::setw(8) << i.value("id", std::string()) << std::setw(13) << i.value("state", std::string())
                  << std::setw(20) << reason << path_text(i) << "\n";
      }
    });
  }
  if (set_div->parsed()) {
    json body{{"teid", div_teid}, {"action", div_action}};
    if (!div_portal.empty()) body["portal"] = div_portal;
    if (int rc = http.call("POST", "/diversion/", &body, reply); rc != 0) return rc;
    return print_reply(client, reply, [](const json& b) {
      std::cout << "teid " << b.value("teid", 0u) << " " << b.value("action", std::string()) << " (session "
                << b.value("state", std::string()) << ")\n";
    });
  }
  if (hire->parsed()) {
    json body{{"user", hire_user}, {"service", hire_service}, {"billing", billing}};
    if (int rc = http.call("POST", "/hire/", &body, reply); rc != 0) return rc;
    return print_reply(client, reply, [](const json& b) {
      std::cout << b.value("service", std::string()) << (b.value("newly_hired", false) ? " hired" : " already hired");
      if (b.contains("intent")) std::cout << ", intent " << b.at("intent").get<std::string>();
      std::cout << "\n";
    });
  }
  return 0;
}
