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

#include <memory>
#include <string>
#include <thread>

#include "fhctl/controller.hpp"

namespace httplib {
class Server;
}

namespace fhctl {

inline constexpr const char* kApiPrefix = "/superfluidity/edge";

/// HTTP status a controller error maps to.
int http_status_for(Errc code);

/// HTTP front end of a Controller. Handlers run on the server's worker
/// threads; mutations reach the controller's command queue.
class RestServer {
 public:
  explicit RestServer(Controller& controller);
  ~RestServer();
  RestServer(const RestServer&) = delete;
  RestServer& operator=(const RestServer&) = delete;

  /// Binds and starts serving in the background. Port 0 picks a free port.
  /// Errors: IO (bind failed).
  Status start(const std::string& host, int port);
  /// Blocks until `stop()` is called from another thread or a signal.
  void wait();
  void stop();
  int port() const { return port_; }

 private:
  void install_routes();

  Controller& controller_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace fhctl
