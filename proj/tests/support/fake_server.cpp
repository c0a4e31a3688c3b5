#include "fake_server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "ovcd/error.hpp"
#include "ovcd/wire.hpp"

namespace ovcd::testing {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

FakeModelServer::FakeModelServer(Backends backends, Fault fault)
    : backends_(std::move(backends)), fault_(fault), server_(std::make_unique<httplib::Server>()) {
  auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      if (fault_ == Fault::ErrorEnvelope) {
        reply(res, 500, wire::to_json(wire::ErrorBody{"internal", "model exploded"}));
        return;
      }
      if (fault_ == Fault::NotJson) {
        res.status = 200;
        res.set_content("<html>oops</html>", "text/html");
        return;
      }
      try {
        const json body = req.body.empty() ? json::object() : json::parse(req.body);
        json out = handler(body);
        if (fault_ == Fault::MissingField && out.is_object() && !out.empty()) {
          out.erase(out.begin());
        }
        reply(res, 200, out);
      } catch (const std::exception& e) {
        reply(res, 400, wire::to_json(wire::ErrorBody{"bad_request", e.what()}));
      }
    };
  };

  server_->Get(wire::kCapabilitiesPath, guarded([this](const json&) {
    const auto caps = backends_.segmenter->capabilities();
    return wire::to_json(wire::Capabilities{caps.max_side, caps.max_concurrency,
                                            backends_.features->dim(),
                                            backends_.features->stride()});
  }));
  server_->Post(wire::kSegmentPath, guarded([this](const json& body) {
    const auto req = wire::parse_segment_request(body);
    SegmentResult r = backends_.segmenter->segment(req.image, req.prompt);
    if (fault_ == Fault::WrongDims) r.logits = ScalarMap(1, 1, 0.0f);
    return wire::to_json(r);
  }));
  server_->Post(wire::kFeaturesPath, guarded([this](const json& body) {
    const auto req = wire::parse_features_request(body);
    return wire::to_json(backends_.features->extract(req.image));
  }));
  server_->Post(wire::kPropagatePath, guarded([this](const json& body) {
    const auto req = wire::parse_propagate_request(body);
    return wire::to_json(backends_.tracker->propagate(req.init_mask, req.frames));
  }));
  server_->Post(wire::kEchoPath, guarded([](const json& body) {
    return json{{"request_id", body.value("request_id", "")},
                {"grid", wire::grid_to_json(wire::grid_from_json(body.at("grid")))}};
  }));

  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw IoError("fake model server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FakeModelServer::~FakeModelServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string FakeModelServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

}  // namespace ovcd::testing
