#pragma once

#include <string>

#include "groupsense/api.hpp"

namespace httplib {
class Server;
}

namespace groupsense {

/// Installs the /api routes on `server`. POST /api/redesign and the
/// landscape endpoint stream server-sent events when the client sends
/// `Accept: text/event-stream`: zero or more `progress` events carrying
/// {"examined":N,"total":M}, then one `result` or `error` event.
void register_routes(httplib::Server& server, Api& api);

/// Blocks serving on host:port until the process is stopped.
void serve(Api& api, const std::string& host, int port);

}  // namespace groupsense
