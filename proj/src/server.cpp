#include "groupsense/server.hpp"

#include <iostream>
#include <memory>

#include "httplib.h"

namespace groupsense {

namespace {

ApiRequest to_api_request(const httplib::Request& req) {
  ApiRequest out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [key, value] : req.params) out.query[key] = value;
  out.body = req.body;
  return out;
}

bool wants_stream(const httplib::Request& req) {
  return req.get_header_value("Accept").find("text/event-stream") != std::string::npos;
}

bool write_event(httplib::DataSink& sink, const char* event, const std::string& data) {
  const std::string frame = std::string("event: ") + event + "\ndata: " + data + "\n\n";
  return sink.write(frame.data(), frame.size());
}

void respond(Api& api, const httplib::Request& req, httplib::Response& res) {
  if (!wants_stream(req) || req.method == "DELETE") {
    const ApiResponse out = api.handle(to_api_request(req));
    res.status = out.status;
    res.set_content(out.body, "application/json");
    return;
  }
  // The search runs inside the provider so progress reaches the client
  // while it is still enumerating.
  auto request = std::make_shared<ApiRequest>(to_api_request(req));
  res.set_header("Cache-Control", "no-cache");
  res.set_chunked_content_provider("text/event-stream", [&api, request](std::size_t, httplib::DataSink& sink) {
    bool open = true;
    const ApiResponse out = api.handle(*request, [&](std::uint64_t examined, std::uint64_t total) {
      if (open) open = write_event(sink, "progress", Json{{"examined", examined}, {"total", total}}.dump());
    });
    if (open) write_event(sink, out.status < 400 ? "result" : "error", out.body);
    sink.done();
    return true;
  });
}

}  // namespace

void register_routes(httplib::Server& server, Api& api) {
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) { respond(api, req, res); };
  server.Get(R"(/api/.*)", handler);
  server.Post(R"(/api/.*)", handler);
  server.Delete(R"(/api/.*)", handler);
}

void serve(Api& api, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, api);
  std::cerr << "groupsense listening on http://" << host << ":" << port << " (data: " << api.store().root().string()
            << ")\n";
  if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace groupsense
