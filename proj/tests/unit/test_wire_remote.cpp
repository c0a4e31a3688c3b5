#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fake_server.hpp"
#include "ovcd/error.hpp"
#include "ovcd/pipeline.hpp"
#include "ovcd/remote.hpp"
#include "ovcd/scene.hpp"
#include "ovcd/synthetic.hpp"
#include "ovcd/wire.hpp"
#include "random.hpp"

using namespace ovcd;
using Fault = ovcd::testing::FakeModelServer::Fault;

namespace {

PromptSpec text(std::vector<std::string> prompts) {
  PromptSpec p;
  p.text_prompts = std::move(prompts);
  return p;
}

BitMask support(const ScalarMap& logits) {
  BitMask m(logits.width(), logits.height());
  for (std::size_t i = 0; i < logits.size(); ++i) m.set(i, logits[i] > 0.0f);
  return m;
}

RemoteOptions quick() {
  RemoteOptions o;
  o.connect_timeout = std::chrono::milliseconds(500);
  o.read_timeout = std::chrono::milliseconds(5000);
  return o;
}

template <class E, class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected exception not thrown";
  return {};
}

}  // namespace

TEST(Wire, GridRoundTripIsBitExact) {
  const ScalarMap g(3, 2, std::vector<float>{0.0f, -0.0f, 1e-38f, -3.5f,
                                             std::numeric_limits<float>::max(), 0.1f});
  const ScalarMap back = wire::grid_from_json(wire::grid_to_json(g));
  ASSERT_EQ(back.width(), 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(std::signbit(back[i]), std::signbit(g[i]));
    EXPECT_EQ(back[i], g[i]);
  }
}

TEST(Wire, GridSchemaErrors) {
  auto j = wire::grid_to_json(ScalarMap(2, 2, 1.0f));
  auto missing = j;
  missing.erase("values_b64");
  EXPECT_THROW(wire::grid_from_json(missing), SchemaViolation);
  auto short_values = j;
  short_values["w"] = 3;
  EXPECT_THROW(wire::grid_from_json(short_values), SchemaViolation);
  auto zero = j;
  zero["h"] = 0;
  EXPECT_THROW(wire::grid_from_json(zero), SchemaViolation);
  auto mistyped = j;
  mistyped["w"] = "two";
  EXPECT_THROW(wire::grid_from_json(mistyped), SchemaViolation);
}

TEST(Wire, SegmentRequestRoundTrip) {
  std::mt19937_64 rng(8);
  wire::SegmentRequest r;
  r.request_id = "seg-1";
  r.image = ovcd::testing::random_image(rng, 9, 7);
  r.prompt = text({"building", "house"});
  r.prompt.exemplar = Exemplar{{0.25, 0.5, 0.75}, 2.0, Direction::Backward};
  r.prompt.replication = 3;
  const auto back = wire::parse_segment_request(wire::to_json(r));
  EXPECT_EQ(back.request_id, "seg-1");
  EXPECT_EQ(back.image, r.image);
  EXPECT_EQ(back.prompt.text_prompts, r.prompt.text_prompts);
  EXPECT_EQ(back.prompt.replication, 3);
  ASSERT_TRUE(back.prompt.exemplar);
  EXPECT_EQ(back.prompt.exemplar->vector, r.prompt.exemplar->vector);
}

TEST(Wire, MaskAndTrackRoundTrip) {
  std::mt19937_64 rng(9);
  const BitMask m = ovcd::testing::random_mask(rng, 13, 5, 0.5);
  EXPECT_EQ(wire::mask_from_b64(wire::mask_to_b64(m)), m);
  TrackResult t{m, ovcd::testing::random_map(rng, 13, 5, 0.0f, 1.0f)};
  const TrackResult back = wire::parse_propagate_response(wire::to_json(t));
  EXPECT_EQ(back.mask, t.mask);
  EXPECT_EQ(back.confidence, t.confidence);
}

TEST(Wire, CapabilitiesAndErrors) {
  const wire::Capabilities c{2048, 2, 3, 4};
  const auto back = wire::parse_capabilities(wire::to_json(c));
  EXPECT_EQ(back.max_side, 2048);
  EXPECT_EQ(back.feature_stride, 4);
  auto bad = wire::to_json(c);
  bad["max_concurrency"] = 0;
  EXPECT_THROW(wire::parse_capabilities(bad), SchemaViolation);

  wire::ErrorBody e;
  EXPECT_TRUE(wire::parse_error(wire::to_json(wire::ErrorBody{"x", "y"}), e));
  EXPECT_EQ(e.message, "y");
  EXPECT_FALSE(wire::parse_error(nlohmann::json{{"logits", 1}}, e));
}

TEST(Remote, EchoRoundTripsTwoByTwoGrid) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends());
  RemoteBackend remote(server.url(), quick());
  const ScalarMap g(2, 2, std::vector<float>{-1.25f, 0.0f, 3.0e-7f, 42.0f});
  EXPECT_EQ(remote.echo(g), g);
}

TEST(Remote, CapabilitiesMirrorServer) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends(4));
  RemoteBackend remote(server.url(), quick());
  EXPECT_EQ(remote.dim(), 3);
  EXPECT_EQ(remote.stride(), 4);
  EXPECT_EQ(remote.capabilities().max_concurrency, 8);
  EXPECT_EQ(remote.max_sessions(), 8);
}

TEST(Remote, SegmentSupportMatchesInProcess) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends());
  RemoteBackend remote(server.url(), quick());
  synthetic::SyntheticSegmenter local;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = synthetic::render_scene(synthetic::generate_scene(seed));
    for (const char* p : {"building", "tree", "lake"}) {
      const auto a = remote.segment(scene.t2, text({p}));
      const auto b = local.segment(scene.t2, text({p}));
      EXPECT_EQ(support(a.logits), support(b.logits)) << seed << " " << p;
      EXPECT_EQ(a.presence, b.presence);
    }
  }
}

TEST(Remote, FeaturesAndPropagationMatchInProcess) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends());
  RemoteBackend remote(server.url(), quick());
  const auto scene = synthetic::render_scene(synthetic::generate_scene(4));
  const auto f_remote = remote.extract(scene.t1);
  const auto f_local = synthetic::SyntheticFeatureExtractor().extract(scene.t1);
  EXPECT_EQ(f_remote.values, f_local.values);
  const std::vector<RasterImage> frames{scene.t1, scene.t2};
  const BitMask& init = scene.footprint_t1.at("building");
  const auto t_remote = remote.propagate(init, frames);
  const auto t_local = synthetic::SyntheticPropagator().propagate(init, frames);
  EXPECT_EQ(t_remote.mask, t_local.mask);
  EXPECT_EQ(t_remote.confidence, t_local.confidence);
}

TEST(Remote, MissingFieldIsSchemaViolationWithRequestId) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends(), Fault::MissingField);
  RemoteBackend remote(server.url(), quick());
  const std::string msg = message_of<SchemaViolation>(
      [&] { remote.segment(RasterImage(8, 8), text({"building"})); });
  EXPECT_NE(msg.find("seg-"), std::string::npos) << msg;
}

TEST(Remote, NotJsonIsSchemaViolation) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends(), Fault::NotJson);
  RemoteBackend remote(server.url(), quick());
  EXPECT_THROW(remote.extract(RasterImage(8, 8)), SchemaViolation);
}

TEST(Remote, ErrorEnvelopeIsServerError) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends(), Fault::ErrorEnvelope);
  RemoteBackend remote(server.url(), quick());
  try {
    remote.segment(RasterImage(8, 8), text({"building"}));
    FAIL() << "no exception";
  } catch (const ServerError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("seg-"), std::string::npos);
  }
}

TEST(Remote, WrongDimsIsSchemaViolation) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends(), Fault::WrongDims);
  RemoteBackend remote(server.url(), quick());
  EXPECT_THROW(remote.segment(RasterImage(8, 8), text({"building"})), SchemaViolation);
}

TEST(Remote, UnreachableIsTransportError) {
  std::string url;
  {
    ovcd::testing::FakeModelServer server(synthetic::make_backends());
    url = server.url();
  }
  RemoteBackend remote(url, quick());
  const std::string msg =
      message_of<TransportError>([&] { remote.extract(RasterImage(8, 8)); });
  EXPECT_NE(msg.find("request caps-"), std::string::npos) << msg;
  EXPECT_NE(msg.find("Could not establish connection"), std::string::npos) << msg;
}

TEST(Remote, FullPipelineMatchesSynthetic) {
  ovcd::testing::FakeModelServer server(synthetic::make_backends());
  const Backends remote = make_remote_backends(server.url(), quick());
  const Backends local = synthetic::make_backends();
  const auto scene = synthetic::render_scene(synthetic::generate_scene(5));
  PipelineConfig cfg;
  cfg.tile_size = 64;
  cfg.tile_stride = 48;
  const auto queries = synthetic::default_queries();
  const auto a = run_pipeline(scene.t1, scene.t2, queries, cfg, remote);
  const auto b = run_pipeline(scene.t1, scene.t2, queries, cfg, local);
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [id, outcome] : b) {
    ASSERT_TRUE(a.at(id).ok()) << a.at(id).error;
    ASSERT_TRUE(outcome.ok()) << outcome.error;
    EXPECT_EQ(a.at(id).result->change_mask, outcome.result->change_mask) << id;
  }
}
