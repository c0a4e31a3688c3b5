#include "ovcd/remote.hpp"

#include <httplib.h>

#include "ovcd/error.hpp"

namespace ovcd {

namespace {

using nlohmann::json;

template <class F>
auto with_request_id(const std::string& id, F&& f) {
  try {
    return f();
  } catch (const SchemaViolation& e) {
    throw SchemaViolation("request " + id + ": schema violation: " + e.what());
  }
}

}  // namespace

RemoteBackend::RemoteBackend(std::string base_url, RemoteOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw InvalidArgument("remote backend URL is empty");
}

std::string RemoteBackend::next_id(const char* prefix) const {
  return std::string(prefix) + "-" + std::to_string(counter_.fetch_add(1) + 1);
}

json RemoteBackend::call(const std::string& method, const std::string& path,
                         const std::string& request_id, const json* body) const {
  httplib::Client client(base_url_);
  if (!client.is_valid()) {
    throw TransportError("request " + request_id + ": invalid backend URL '" + base_url_ + "'");
  }
  client.set_connection_timeout(options_.connect_timeout);
  client.set_read_timeout(options_.read_timeout);
  client.set_write_timeout(options_.read_timeout);

  httplib::Result res = method == "GET"
                            ? client.Get(path)
                            : client.Post(path, body ? body->dump() : std::string("{}"),
                                          "application/json");
  if (!res) {
    throw TransportError("request " + request_id + ": " + method + " " + base_url_ + path +
                         " failed: " + httplib::to_string(res.error()));
  }

  json parsed;
  bool is_json = true;
  try {
    parsed = json::parse(res->body);
  } catch (const json::exception&) {
    is_json = false;
  }

  wire::ErrorBody err;
  if (res->status < 200 || res->status >= 300) {
    std::string detail = is_json && wire::parse_error(parsed, err)
                             ? err.code + ": " + err.message
                             : res->body.substr(0, 200);
    throw ServerError("request " + request_id + ": server returned " +
                          std::to_string(res->status) + " (" + detail + ")",
                      res->status);
  }
  if (!is_json) {
    throw SchemaViolation("request " + request_id + ": response is not valid JSON");
  }
  if (wire::parse_error(parsed, err)) {
    throw ServerError("request " + request_id + ": " + err.code + ": " + err.message,
                      res->status);
  }
  return parsed;
}

const wire::Capabilities& RemoteBackend::server_capabilities() const {
  std::lock_guard lock(caps_mutex_);
  if (!caps_) {
    const std::string id = next_id("caps");
    json j = call("GET", wire::kCapabilitiesPath, id, nullptr);
    caps_ = with_request_id(id, [&] { return wire::parse_capabilities(j); });
  }
  return *caps_;
}

SegmenterCapabilities RemoteBackend::capabilities() const {
  const auto& c = server_capabilities();
  return {c.max_side, c.max_concurrency};
}

int RemoteBackend::dim() const { return server_capabilities().feature_dim; }
int RemoteBackend::stride() const { return server_capabilities().feature_stride; }
int RemoteBackend::max_sessions() const { return server_capabilities().max_concurrency; }

SegmentResult RemoteBackend::segment(const RasterImage& image, const PromptSpec& prompt) const {
  wire::SegmentRequest req{next_id("seg"), image, prompt};
  const json body = wire::to_json(req);
  json j = call("POST", wire::kSegmentPath, req.request_id, &body);
  return with_request_id(req.request_id, [&] {
    SegmentResult r = wire::parse_segment_response(j);
    validate_segment_result(r, image.width(), image.height(), prompt);
    return r;
  });
}

FeatureMap RemoteBackend::extract(const RasterImage& image) const {
  const int d = dim();
  const int s = stride();
  wire::FeaturesRequest req{next_id("feat"), image};
  const json body = wire::to_json(req);
  json j = call("POST", wire::kFeaturesPath, req.request_id, &body);
  return with_request_id(req.request_id, [&] {
    FeatureMap f = wire::parse_features_response(j);
    validate_feature_map(f, image.width(), image.height(), d, s);
    return f;
  });
}

TrackResult RemoteBackend::propagate(const BitMask& init_mask,
                                     std::span<const RasterImage> frames) const {
  if (frames.empty()) throw InvalidArgument("propagate needs at least one frame");
  wire::PropagateRequest req{next_id("sess"), init_mask,
                             std::vector<RasterImage>(frames.begin(), frames.end())};
  const json body = wire::to_json(req);
  json j = call("POST", wire::kPropagatePath, req.session_id, &body);
  return with_request_id(req.session_id, [&] {
    TrackResult r = wire::parse_propagate_response(j);
    validate_track_result(r, frames.back().width(), frames.back().height());
    return r;
  });
}

ScalarMap RemoteBackend::echo(const ScalarMap& grid) const {
  const std::string id = next_id("echo");
  const json body{{"request_id", id}, {"grid", wire::grid_to_json(grid)}};
  json j = call("POST", wire::kEchoPath, id, &body);
  return with_request_id(id, [&] {
    if (!j.contains("grid")) throw SchemaViolation("missing field 'grid'");
    return wire::grid_from_json(j.at("grid"));
  });
}

Backends make_remote_backends(const std::string& base_url, RemoteOptions options) {
  auto remote = std::make_shared<RemoteBackend>(base_url, options);
  return {remote, remote, remote};
}

}  // namespace ovcd
