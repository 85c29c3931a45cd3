#include "wfared/io.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wfared/errors.hpp"
#include "wfared/random.hpp"

namespace wfared {
namespace {

TEST(WfaJson, ParsesWellFormed) {
  const std::string text = R"({
    "alpha": [0.8660254037844386, 0.0],
    "transition": [[0.0, 0.5], [0.5, 0.0]],
    "beta": [0.8660254037844386, 0.0],
    "comment": "paper example"
  })";
  const Wfa w = parse_wfa_json(text);
  EXPECT_EQ(w.states(), 2);
  EXPECT_NEAR(evaluate(w, 2), 3.0 / 16.0, 1e-12);
}

TEST(WfaJson, RoundTripIsBitExact) {
  Rng rng(91);
  for (int t = 0; t < 25; ++t) {
    const Wfa w = random_wfa(rng, rng.uniform_index(1, 7), 0.9);
    const Wfa back = parse_wfa_json(emit_wfa_json(w));
    ASSERT_EQ(back.states(), w.states());
    for (Index i = 0; i < w.states(); ++i) {
      EXPECT_EQ(back.alpha(i), w.alpha(i));
      EXPECT_EQ(back.beta(i), w.beta(i));
      for (Index j = 0; j < w.states(); ++j)
        EXPECT_EQ(back.A(i, j), w.A(i, j));
    }
  }
}

TEST(WfaJson, RejectsDimensionMismatch) {
  EXPECT_THROW(parse_wfa_json(R"({"alpha":[1,2],"transition":[[1]],"beta":[1]})"),
               Error);
  EXPECT_THROW(
      parse_wfa_json(R"({"alpha":[1],"transition":[[1,2]],"beta":[1]})"),
      Error);
}

TEST(WfaJson, RejectsNonNumbers) {
  EXPECT_THROW(
      parse_wfa_json(R"({"alpha":["x"],"transition":[[1]],"beta":[1]})"),
      Error);
  EXPECT_THROW(
      parse_wfa_json(R"({"alpha":[null],"transition":[[1]],"beta":[1]})"),
      Error);
}

TEST(WfaJson, RejectsMissingFields) {
  EXPECT_THROW(parse_wfa_json(R"({"alpha":[1],"beta":[1]})"), Error);
  EXPECT_THROW(parse_wfa_json("not json"), Error);
}

}  // namespace
}  // namespace wfared
