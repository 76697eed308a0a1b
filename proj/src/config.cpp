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

#include "fhctl/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fhctl {
namespace {

Error bad(const std::string& what) { return Error{Errc::kInvalidArgument, "config: " + what}; }

}  // namespace

Result<ControllerConfig> merge_config(const ControllerConfig& base, const nlohmann::json& doc) {
  if (!doc.is_object()) return bad("document must be an object");
  ControllerConfig cfg = base;
  try {
    if (doc.contains("auth")) {
      const auto& auth = doc.at("auth");
      cfg.username = auth.value("username", cfg.username);
      cfg.password = auth.value("password", cfg.password);
    }
    if (doc.contains("scenario")) cfg.scenario_path = doc.at("scenario").get<std::string>();
    if (doc.contains("negotiation")) {
      const auto& neg = doc.at("negotiation");
      auto table = parse_negotiation_table(neg);
      if (!table) return table.error();
      cfg.negotiation = *table;
      cfg.strict_negotiation = neg.value("strict", cfg.strict_negotiation);
    }
    if (doc.contains("catalog")) {
      auto catalog = parse_catalog(doc.at("catalog"));
      if (!catalog) return catalog.error();
      cfg.catalog = *catalog;
    }
    if (doc.contains("default_portal")) {
      if (doc.at("default_portal").is_null()) {
        cfg.default_portal.reset();
      } else {
        auto portal = HostId::parse(doc.at("default_portal").get<std::string>());
        if (!portal) return portal.error();
        cfg.default_portal = *portal;
      }
    }
    cfg.portal_unauthenticated = doc.value("portal", cfg.portal_unauthenticated);
    if (doc.contains("listen")) {
      const auto& listen = doc.at("listen");
      cfg.listen_host = listen.value("host", cfg.listen_host);
      cfg.listen_port = listen.value("port", cfg.listen_port);
      if (cfg.listen_port < 0 || cfg.listen_port > 65535) return bad("listen.port out of range");
    }
    if (doc.contains("persistence")) {
      if (doc.at("persistence").is_null()) cfg.persistence_path.reset();
      else cfg.persistence_path = doc.at("persistence").get<std::string>();
    }
    if (doc.contains("queue_buffer_bytes")) {
      cfg.queue_buffer_bytes = doc.at("queue_buffer_bytes").get<std::uint64_t>();
      if (cfg.queue_buffer_bytes == 0) return bad("queue_buffer_bytes must be positive");
    }
  } catch (const nlohmann::json::exception& e) {
    return bad(e.what());
  }
  return cfg;
}

Result<ControllerConfig> parse_config(const nlohmann::json& doc) { return merge_config(ControllerConfig{}, doc); }

Result<nlohmann::json> read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{Errc::kIo, "cannot open " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) return Error{Errc::kInvalidArgument, path + " is not valid JSON"};
  return doc;
}

Result<ControllerConfig> load_config(const std::string& path) {
  auto doc = read_json_file(path);
  if (!doc) return doc.error();
  auto cfg = parse_config(*doc);
  // A relative scenario path is relative to the config file.
  if (cfg && cfg->scenario_path && std::filesystem::path(*cfg->scenario_path).is_relative()) {
    cfg->scenario_path = (std::filesystem::path(path).parent_path() / *cfg->scenario_path).string();
  }
  return cfg;
}

}  // namespace fhctl
