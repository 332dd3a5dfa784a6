#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>

#include "frtpp/model.hpp"
#include "frtpp/rng.hpp"

using namespace frtpp;

TEST_CASE("validate_dataset accepts the minimal legal dataset") {
  const auto data = validate_dataset({1, 0}, {1, 0}, {1.0, 0.0});
  CHECK(data.n == 2);
  CHECK(data.n_t == 1);
  CHECK_FALSE(data.has_covariate());
}

TEST_CASE("validate_dataset allows a treated never-taker") {
  const auto data = validate_dataset({1, 1, 0}, {1, 0, 0}, {2.0, 0.1, 0.3});
  CHECK(data.n_t == 2);
}

TEST_CASE("validate_dataset rejects bad input precisely") {
  CHECK_THROWS_WITH_AS(validate_dataset({0}, {1}, {0.0}),
                       "unit 0: d=1 with z=0 violates one-sided noncompliance",
                       ValidationError);
  CHECK_THROWS_AS(validate_dataset({1, 0}, {1}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_dataset({1, 2}, {1, 0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_dataset({1, 0}, {3, 0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_dataset({1, 0}, {1, 0}, {0.0, std::nan("")}), ValidationError);
  // both arms must be populated
  CHECK_THROWS_AS(validate_dataset({1, 1}, {1, 0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate_dataset({0, 0}, {0, 0}, {0.0, 1.0}), ValidationError);
  // covariate length and finiteness
  CHECK_THROWS_AS(validate_dataset({1, 0}, {1, 0}, {0.0, 1.0}, std::vector<double>{1.0}),
                  ValidationError);
  CHECK_THROWS_AS(
      validate_dataset({1, 0}, {1, 0}, {0.0, 1.0}, std::vector<double>{1.0, std::nan("")}),
      ValidationError);
}

TEST_CASE("dataset CSV round-trips bit for bit") {
  auto stream = derive_stream(17, "roundtrip");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + stream.next_below(40);
    std::vector<std::uint8_t> z(n), d(n);
    std::vector<double> y(n), x(n);
    const bool with_x = trial % 2 == 0;
    std::size_t n_t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = static_cast<std::uint8_t>(stream.next_below(2));
      d[i] = z[i] ? static_cast<std::uint8_t>(stream.next_below(2)) : 0;
      y[i] = sample_normal(stream, 0.0, 100.0);
      x[i] = sample_normal(stream, 0.0, 1.0);
      n_t += z[i];
    }
    if (n_t == 0) z[0] = 1, d[0] = 0;
    if (n_t == n) z[0] = 0, d[0] = 0;
    const auto data = validate_dataset(z, d, y, with_x ? std::optional(x) : std::nullopt);

    const auto text = write_dataset_csv(data);
    const auto back = parse_dataset_csv(text);
    REQUIRE(back.n == data.n);
    CHECK(back.n_t == data.n_t);
    CHECK(back.z == data.z);
    CHECK(back.d == data.d);
    REQUIRE(back.y.size() == data.y.size());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::memcmp(&back.y[i], &data.y[i], sizeof(double)) == 0);
    CHECK(back.x.has_value() == data.x.has_value());
    if (data.x)
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::memcmp(&(*back.x)[i], &(*data.x)[i], sizeof(double)) == 0);
  }
}

TEST_CASE("dataset CSV parser rejects malformed input") {
  CHECK_THROWS_AS(parse_dataset_csv(""), ValidationError);
  CHECK_THROWS_AS(parse_dataset_csv("a,b,c\n1,1,0.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_dataset_csv("z,d,y\n1,1\n"), ValidationError);
  CHECK_THROWS_AS(parse_dataset_csv("z,d,y\n1,1,abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_dataset_csv("z,d,y\n2,1,0.5\n0,0,0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse_dataset_csv("z,d,y\n0,1,0.5\n1,0,0.1\n"), ValidationError);
}

TEST_CASE("known_compliance pins treated labels to receipts") {
  const auto data = validate_dataset({1, 1, 0, 0}, {1, 0, 0, 0}, {1.0, 2.0, 3.0, 4.0});
  const auto cv = known_compliance(data);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.z[i]) CHECK(cv.c[i] == data.d[i]);
    else CHECK(cv.c[i] == 0);
  }
}

TEST_CASE("posture and method mapping") {
  CHECK(ImputationPosture::for_method(1).impose_null);
  CHECK_FALSE(ImputationPosture::for_method(1).use_covariates);
  CHECK_FALSE(ImputationPosture::for_method(2).impose_null);
  CHECK(ImputationPosture::for_method(3).use_covariates);
  CHECK(ImputationPosture::for_method(4).use_covariates);
  CHECK_FALSE(ImputationPosture::for_method(4).impose_null);
  for (int m = 1; m <= 4; ++m) {
    CHECK(ImputationPosture::for_method(m).method_number() == m);
    CHECK(ImputationPosture::for_method(m).method_tag() == "m" + std::to_string(m));
  }
  CHECK(ImputationPosture::for_method(2, true).misspecified);
  CHECK_THROWS_AS(ImputationPosture::for_method(5), ValidationError);
}

TEST_CASE("predictiveness levels") {
  CHECK(predictiveness_alpha("none") == std::array<double, 2>{-0.8, 0.0});
  CHECK(predictiveness_alpha("medium") == std::array<double, 2>{-1.4, 2.0});
  CHECK(predictiveness_alpha("high") == std::array<double, 2>{-2.8, 5.0});
  CHECK_THROWS_AS(predictiveness_alpha("huge"), ValidationError);
}

TEST_CASE("chain and scenario validation") {
  ChainConfig bad{100, 100, 0};
  CHECK_THROWS_AS(validate_chain(bad), ValidationError);
  ScenarioConfig cfg;
  cfg.chain = ChainConfig{100, 50, 0};
  CHECK_NOTHROW(validate_scenario(cfg));
  cfg.alpha_level = 1.0;
  CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
}

TEST_CASE("test kind tags") {
  CHECK(kind_tag(TestKind::statistic) == "stat");
  CHECK(kind_tag(TestKind::discrepancy) == "disc");
  CHECK(kind_tag(TestKind::model_based) == "model");
  CHECK(parse_kind("disc") == TestKind::discrepancy);
  CHECK_THROWS_AS(parse_kind("other"), ValidationError);
}
