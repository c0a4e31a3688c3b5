#pragma once

// JSON envelopes for the model-server protocol. Images travel as base64 PNG,
// float grids as base64 little-endian float32. Every parse_* function throws
// SchemaViolation on a missing or mistyped field.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovcd/backends.hpp"

namespace ovcd::wire {

inline constexpr const char* kSegmentPath = "/v1/segment";
inline constexpr const char* kFeaturesPath = "/v1/features";
inline constexpr const char* kPropagatePath = "/v1/propagate";
inline constexpr const char* kCapabilitiesPath = "/v1/capabilities";
inline constexpr const char* kEchoPath = "/v1/echo";

struct Capabilities {
  int max_side = 1 << 15;
  int max_concurrency = 1;
  int feature_dim = 0;
  int feature_stride = 1;
};

struct SegmentRequest {
  std::string request_id;
  RasterImage image;
  PromptSpec prompt;
};

struct FeaturesRequest {
  std::string request_id;
  RasterImage image;
};

struct PropagateRequest {
  std::string session_id;
  BitMask init_mask;
  std::vector<RasterImage> frames;
};

struct ErrorBody {
  std::string code;
  std::string message;
};

nlohmann::json grid_to_json(const ScalarMap& map);
ScalarMap grid_from_json(const nlohmann::json& j);

std::string image_to_b64(const RasterImage& image);
RasterImage image_from_b64(const std::string& b64);
std::string mask_to_b64(const BitMask& mask);
BitMask mask_from_b64(const std::string& b64);

nlohmann::json to_json(const SegmentRequest& r);
SegmentRequest parse_segment_request(const nlohmann::json& j);
nlohmann::json to_json(const SegmentResult& r);
SegmentResult parse_segment_response(const nlohmann::json& j);

nlohmann::json to_json(const FeaturesRequest& r);
FeaturesRequest parse_features_request(const nlohmann::json& j);
nlohmann::json to_json(const FeatureMap& f);
FeatureMap parse_features_response(const nlohmann::json& j);

nlohmann::json to_json(const PropagateRequest& r);
PropagateRequest parse_propagate_request(const nlohmann::json& j);
nlohmann::json to_json(const TrackResult& r);
TrackResult parse_propagate_response(const nlohmann::json& j);

nlohmann::json to_json(const Capabilities& c);
Capabilities parse_capabilities(const nlohmann::json& j);

nlohmann::json to_json(const ErrorBody& e);
// Returns true and fills `out` if `j` is an error envelope.
bool parse_error(const nlohmann::json& j, ErrorBody& out);

}  // namespace ovcd::wire
