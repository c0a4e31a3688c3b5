#include "ovcd/wire.hpp"

#include "ovcd/error.hpp"
#include "ovcd/image_io.hpp"

namespace ovcd::wire {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaViolation("expected JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw SchemaViolation(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) {
    throw SchemaViolation(std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

const json& array_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw SchemaViolation(std::string("field '") + key + "' must be an array");
  return v;
}

// Reports decoding failures inside a response as schema violations.
template <class F>
auto decode_or_schema(const char* what, F&& f) {
  try {
    return f();
  } catch (const SchemaViolation&) {
    throw;
  } catch (const Error& e) {
    throw SchemaViolation(std::string(what) + ": " + e.what());
  }
}

std::vector<float> floats_from_b64(const std::string& b64) {
  return io::le_bytes_to_floats(io::base64_decode(b64));
}

std::string floats_to_b64(std::span<const float> values) {
  return io::base64_encode(io::floats_to_le_bytes(values));
}

}  // namespace

json grid_to_json(const ScalarMap& map) {
  return {{"w", map.width()}, {"h", map.height()}, {"values_b64", floats_to_b64(map.values())}};
}

ScalarMap grid_from_json(const json& j) {
  const int w = int_field(j, "w");
  const int h = int_field(j, "h");
  if (w < 1 || h < 1) throw SchemaViolation("grid dimensions must be positive");
  auto values = decode_or_schema("grid values", [&] { return floats_from_b64(string_field(j, "values_b64")); });
  if (values.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw SchemaViolation("grid has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(static_cast<std::size_t>(w) * h));
  }
  return ScalarMap(w, h, std::move(values));
}

std::string image_to_b64(const RasterImage& image) {
  return io::base64_encode(io::encode_rgb_png(image));
}

RasterImage image_from_b64(const std::string& b64) {
  return decode_or_schema("image", [&] { return io::decode_rgb_png(io::base64_decode(b64)); });
}

std::string mask_to_b64(const BitMask& mask) {
  return io::base64_encode(io::encode_mask_png(mask));
}

BitMask mask_from_b64(const std::string& b64) {
  return decode_or_schema("mask", [&] { return io::decode_mask_png(io::base64_decode(b64)); });
}

json to_json(const SegmentRequest& r) {
  json j{{"request_id", r.request_id},
         {"image_b64", image_to_b64(r.image)},
         {"prompts", r.prompt.text_prompts}};
  if (r.prompt.exemplar) {
    const auto& v = r.prompt.exemplar->vector;
    std::vector<float> f(v.begin(), v.end());
    j["exemplar"] = {{"dim", static_cast<int>(f.size())},
                     {"values_b64", floats_to_b64(f)},
                     {"replication", r.prompt.replication}};
  }
  return j;
}

SegmentRequest parse_segment_request(const json& j) {
  SegmentRequest r;
  r.request_id = string_field(j, "request_id");
  r.image = image_from_b64(string_field(j, "image_b64"));
  for (const auto& p : array_field(j, "prompts")) {
    if (!p.is_string()) throw SchemaViolation("prompts must be strings");
    r.prompt.text_prompts.push_back(p.get<std::string>());
  }
  if (j.contains("exemplar") && !j.at("exemplar").is_null()) {
    const json& e = j.at("exemplar");
    const int dim = int_field(e, "dim");
    auto values = decode_or_schema("exemplar", [&] { return floats_from_b64(string_field(e, "values_b64")); });
    if (dim < 0 || values.size() != static_cast<std::size_t>(dim)) {
      throw SchemaViolation("exemplar dim does not match its values");
    }
    Exemplar ex;
    ex.vector.assign(values.begin(), values.end());
    r.prompt.exemplar = std::move(ex);
    r.prompt.replication = int_field(e, "replication");
  }
  return r;
}

json to_json(const SegmentResult& r) {
  return {{"logits", grid_to_json(r.logits)}, {"presence", r.presence}};
}

SegmentResult parse_segment_response(const json& j) {
  SegmentResult r;
  r.logits = grid_from_json(field(j, "logits"));
  const json& p = field(j, "presence");
  if (!p.is_object()) throw SchemaViolation("presence must be an object");
  for (const auto& [k, v] : p.items()) {
    if (!v.is_number()) throw SchemaViolation("presence['" + k + "'] must be a number");
    r.presence[k] = v.get<double>();
  }
  return r;
}

json to_json(const FeaturesRequest& r) {
  return {{"request_id", r.request_id}, {"image_b64", image_to_b64(r.image)}};
}

FeaturesRequest parse_features_request(const json& j) {
  FeaturesRequest r;
  r.request_id = j.contains("request_id") ? string_field(j, "request_id") : std::string();
  r.image = image_from_b64(string_field(j, "image_b64"));
  return r;
}

json to_json(const FeatureMap& f) {
  return {{"grid_w", f.grid_width}, {"grid_h", f.grid_height}, {"dim", f.dim},
          {"stride", f.stride},     {"values_b64", floats_to_b64(f.values)}};
}

FeatureMap parse_features_response(const json& j) {
  FeatureMap f;
  f.grid_width = int_field(j, "grid_w");
  f.grid_height = int_field(j, "grid_h");
  f.dim = int_field(j, "dim");
  f.stride = int_field(j, "stride");
  f.values = decode_or_schema("features", [&] { return floats_from_b64(string_field(j, "values_b64")); });
  return f;
}

json to_json(const PropagateRequest& r) {
  json frames = json::array();
  for (const auto& f : r.frames) frames.push_back(image_to_b64(f));
  return {{"session_id", r.session_id},
          {"init_mask_b64", mask_to_b64(r.init_mask)},
          {"frames", std::move(frames)}};
}

PropagateRequest parse_propagate_request(const json& j) {
  PropagateRequest r;
  r.session_id = string_field(j, "session_id");
  r.init_mask = mask_from_b64(string_field(j, "init_mask_b64"));
  for (const auto& f : array_field(j, "frames")) {
    if (!f.is_string()) throw SchemaViolation("frames must be base64 strings");
    r.frames.push_back(image_from_b64(f.get<std::string>()));
  }
  return r;
}

json to_json(const TrackResult& r) {
  return {{"mask_b64", mask_to_b64(r.mask)}, {"confidence", grid_to_json(r.confidence)}};
}

TrackResult parse_propagate_response(const json& j) {
  TrackResult r;
  r.mask = mask_from_b64(string_field(j, "mask_b64"));
  r.confidence = grid_from_json(field(j, "confidence"));
  return r;
}

json to_json(const Capabilities& c) {
  return {{"max_side", c.max_side},
          {"max_concurrency", c.max_concurrency},
          {"feature_dim", c.feature_dim},
          {"feature_stride", c.feature_stride}};
}

Capabilities parse_capabilities(const json& j) {
  Capabilities c;
  c.max_side = int_field(j, "max_side");
  c.max_concurrency = int_field(j, "max_concurrency");
  c.feature_dim = int_field(j, "feature_dim");
  c.feature_stride = int_field(j, "feature_stride");
  if (c.max_side <= 0 || c.max_concurrency <= 0 || c.feature_dim <= 0 || c.feature_stride <= 0) {
    throw SchemaViolation("capabilities must be positive");
  }
  return c;
}

json to_json(const ErrorBody& e) {
  return {{"error", {{"code", e.code}, {"message", e.message}}}};
}

bool parse_error(const json& j, ErrorBody& out) {
  if (!j.is_object() || !j.contains("error") || !j.at("error").is_object()) return false;
  const json& e = j.at("error");
  out.code = e.value("code", std::string("unknown"));
  out.message = e.value("message", std::string());
  return true;
}

}  // namespace ovcd::wire
