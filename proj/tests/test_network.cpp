#include <cmath>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "scaqfp/network.hpp"
#include "scaqfp/prng.hpp"

using namespace scaqfp;

namespace {

/// conv3x3 x4 maps -> avgpool 2x2 -> fc categorize 10, on 8x8x1 inputs.
NetworkSpec synthetic_spec(std::size_t stream_length) {
  NetworkSpec spec;
  spec.stream_length = stream_length;
  spec.layers.push_back({LayerSpec::Type::conv, 3, 4, 1, 0, "conv1"});
  spec.layers.push_back({LayerSpec::Type::avgpool, 2, 0, 2, 0, ""});
  spec.layers.push_back({LayerSpec::Type::fc_categorize, 0, 0, 1, 10, "fc1"});
  return spec;
}

}  // namespace

TEST_CASE("weight file validation") {
  WeightFile wf;
  wf.layers.push_back({"w", {2, 2}, {0.1, 0.2, 0.3}, {}});
  CHECK_THROWS_AS(wf.validate(), std::invalid_argument);
  wf.layers[0].values = {0.1, 0.2, 0.3, 1.5};
  CHECK_THROWS_AS(wf.validate(), std::domain_error);
  wf.layers[0].values = {0.1, 0.2, 0.3, 0.4};
  CHECK_NOTHROW(wf.validate());
  CHECK_THROWS_AS(wf.find("missing"), std::invalid_argument);
}

TEST_CASE("network spec json round trip") {
  const NetworkSpec spec = synthetic_spec(512);
  const NetworkSpec back = NetworkSpec::from_json(spec.to_json());
  CHECK(back.stream_length == 512);
  REQUIRE(back.layers.size() == 3);
  CHECK(back.layers[0].type == LayerSpec::Type::conv);
  CHECK(back.layers[0].kernel == 3);
  CHECK(back.layers[0].maps == 4);
  CHECK(back.layers[2].width == 10);
}

TEST_CASE("single 1x1 conv behaves like a clipped identity") {
  NetworkSpec spec;
  spec.stream_length = 4096;
  spec.layers.push_back({LayerSpec::Type::conv, 1, 1, 1, 0, "w"});
  spec.layers.push_back({LayerSpec::Type::fc_categorize, 0, 0, 1, 2, "fc"});

  WeightFile wf;
  wf.layers.push_back({"w", {1, 1, 1, 1}, {1.0}, {0.0}});
  wf.layers.push_back({"fc", {1, 2}, {1.0, -1.0}, {0.0, 0.0}});

  double prev_score = -2.0;
  for (double x : {-0.6, 0.0, 0.7}) {
    Tensor image{1, 1, 1, {x}};
    const NetworkResult sc = run_network(spec, wf, {image}, 7);
    const NetworkResult sur = surrogate_forward(spec, wf, {image});
    // streams converge to the surrogate forward pass
    CHECK(std::abs(sc.scores[0][0] - sur.scores[0][0]) < 0.1);
    CHECK(sc.top1[0] == sur.top1[0]);
    // the +1-weight class score rises with the input and mirrors the -1 class
    CHECK(sur.scores[0][0] > prev_score);
    CHECK(std::abs(sc.scores[0][0] + sc.scores[0][1]) < 0.1);
    prev_score = sur.scores[0][0];
  }
}

TEST_CASE("all-zero weights tie-break to class 0") {
  NetworkSpec spec;
  spec.stream_length = 256;
  spec.layers.push_back({LayerSpec::Type::fc_categorize, 0, 0, 1, 3, "fc"});
  WeightFile wf;
  wf.layers.push_back({"fc", {4, 3}, std::vector<double>(12, 0.0), {0.0, 0.0, 0.0}});
  const std::vector<Tensor> inputs = make_synthetic_inputs(3, 2, 2, 1, 5);
  const NetworkResult ref = float_reference_forward(spec, wf, inputs);
  for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(ref.top1[i] == 0);
}

TEST_CASE("shape mismatches are rejected") {
  NetworkSpec spec = synthetic_spec(128);
  WeightFile wf = make_synthetic_weights(spec, 8, 8, 1, 3);
  const std::vector<Tensor> bad = make_synthetic_inputs(1, 4, 4, 1, 3);
  CHECK_THROWS_AS(float_reference_forward(spec, wf, bad), std::invalid_argument);
  CHECK_THROWS_AS(run_network(spec, wf, bad, 3), std::invalid_argument);
}

TEST_CASE("fc_feature layers chain") {
  NetworkSpec spec;
  spec.stream_length = 512;
  spec.layers.push_back({LayerSpec::Type::fc_feature, 0, 0, 1, 6, "f1"});
  spec.layers.push_back({LayerSpec::Type::fc_categorize, 0, 0, 1, 3, "f2"});
  const WeightFile wf = make_synthetic_weights(spec, 2, 2, 1, 21, 0.4);
  const std::vector<Tensor> inputs = make_synthetic_inputs(4, 2, 2, 1, 22);
  const NetworkResult sc = run_network(spec, wf, inputs, 23);
  const NetworkResult ref = float_reference_forward(spec, wf, inputs);
  REQUIRE(sc.scores.size() == 4);
  REQUIRE(sc.scores[0].size() == 3);
  REQUIRE(ref.scores[0].size() == 3);
}

TEST_CASE("synthetic network agrees with the infinite-length surrogate") {
  // small-scale version of the acceptance run (same weight scale and seeds)
  const NetworkSpec spec = synthetic_spec(1024);
  const WeightFile wf = make_synthetic_weights(spec, 8, 8, 1, derive_seed(1, 0x57), 0.3);
  const std::vector<Tensor> inputs = make_synthetic_inputs(25, 8, 8, 1, derive_seed(1, 0x49));
  const NetworkResult sc = run_network(spec, wf, inputs, derive_seed(1, 0x90, 1024));
  const NetworkResult sur = surrogate_forward(spec, wf, inputs);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (sc.top1[i] == sur.top1[i]) ++agree;
  }
  CHECK(agree >= 23);  // acceptance checks >= 90% over 200 inputs
}
