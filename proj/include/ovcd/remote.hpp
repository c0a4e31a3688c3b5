#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ovcd/backends.hpp"
#include "ovcd/wire.hpp"

namespace ovcd {

struct RemoteOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{120000};
};

// HTTP client for a model server speaking the ovcd wire protocol. One object
// serves all three backend roles. Failures surface as TransportError,
// ServerError or SchemaViolation, each naming the request id.
class RemoteBackend final : public Segmenter,
                            public FeatureExtractor,
                            public MaskPropagator {
 public:
  explicit RemoteBackend(std::string base_url, RemoteOptions options = {});

  const std::string& base_url() const { return base_url_; }

  SegmenterCapabilities capabilities() const override;
  SegmentResult segment(const RasterImage& image, const PromptSpec& prompt) const override;

  int dim() const override;
  int stride() const override;
  FeatureMap extract(const RasterImage& image) const override;

  int max_sessions() const override;
  TrackResult propagate(const BitMask& init_mask,
                        std::span<const RasterImage> frames) const override;

  // Round-trips a float grid through the server's echo endpoint.
  ScalarMap echo(const ScalarMap& grid) const;

  // Fetched once and cached.
  const wire::Capabilities& server_capabilities() const;

 private:
  nlohmann::json call(const std::string& method, const std::string& path,
                      const std::string& request_id, const nlohmann::json* body) const;
  std::string next_id(const char* prefix) const;

  std::string base_url_;
  RemoteOptions options_;
  mutable std::atomic<std::uint64_t> counter_{0};
  mutable std::mutex caps_mutex_;
  mutable std::optional<wire::Capabilities> caps_;
};

Backends make_remote_backends(const std::string& base_url, RemoteOptions options = {});

}  // namespace ovcd
