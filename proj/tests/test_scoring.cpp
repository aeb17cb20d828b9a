#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "biassup/errors.hpp"
#include "biassup/scoring.hpp"

using namespace biassup;

namespace {

// Base distribution from the documented worked example.
TableLm worked_example() {
  return TableLm({"he", "she", "works"},
                 {{"he", 0.6}, {"she", 0.2}, {"works", 0.2}},
                 {{"nurse", {{"he", 0.2}, {"she", 0.6}, {"works", 0.2}}}});
}

TableLm uniform_lm(std::size_t v) {
  std::vector<std::string> vocab;
  std::map<std::string, double> base;
  for (std::size_t i = 0; i < v; ++i) {
    vocab.push_back("w" + std::to_string(i));
    base["w" + std::to_string(i)] = 1.0 / static_cast<double>(v);
  }
  return TableLm(vocab, base, {});
}

}  // namespace

TEST_CASE("whitespace_tokens splits on runs of whitespace") {
  CHECK(whitespace_tokens("he  works\thard\n") ==
        std::vector<std::string>{"he", "works", "hard"});
  CHECK(whitespace_tokens("").empty());
  CHECK(whitespace_tokens("   ").empty());
}

TEST_CASE("strip_token_punctuation trims both ends but keeps pure punctuation") {
  CHECK(strip_token_punctuation("nurse.") == "nurse");
  CHECK(strip_token_punctuation("\"quoted,\"") == "quoted");
  CHECK(strip_token_punctuation("cross-language") == "cross-language");
  CHECK(strip_token_punctuation("--") == "--");
}

TEST_CASE("table scoring matches the hand-multiplied example") {
  TableLm lm = worked_example();
  const SequenceScore score = lm.score({"", "he works"});
  REQUIRE(score.token_count() == 2);
  CHECK(score.tokens[0].logprob == doctest::Approx(-0.5108256237659907).epsilon(1e-12));
  CHECK(score.tokens[1].logprob == doctest::Approx(-1.6094379124341003).epsilon(1e-12));
  CHECK(sequence_log_likelihood(score) == doctest::Approx(-2.120263536200091).epsilon(1e-12));
}

TEST_CASE("a trigger word in the prefix switches the distribution") {
  TableLm lm = worked_example();
  const SequenceScore score = lm.score({"the nurse", "she works"});
  REQUIRE(score.token_count() == 2);
  CHECK(score.tokens[0].logprob == doctest::Approx(std::log(0.6)).epsilon(1e-12));
  CHECK(score.tokens[1].logprob == doctest::Approx(std::log(0.2)).epsilon(1e-12));
}

TEST_CASE("prefix words outside the vocabulary only matter as triggers") {
  TableLm lm = worked_example();
  // "the" is not in the vocabulary; prefixes are context, not scored text.
  CHECK_NOTHROW(lm.score({"the unknown preamble nurse", "she"}));
}

TEST_CASE("the most recent trigger wins") {
  TableLm lm({"he", "she"}, {{"he", 0.5}, {"she", 0.5}},
             {{"nurse", {{"he", 0.1}, {"she", 0.9}}},
              {"carpenter", {{"he", 0.9}, {"she", 0.1}}}});
  const SequenceScore nurse_last = lm.score({"carpenter nurse", "she"});
  CHECK(nurse_last.tokens[0].logprob == doctest::Approx(std::log(0.9)).epsilon(1e-12));
  const SequenceScore carpenter_last = lm.score({"nurse carpenter", "she"});
  CHECK(carpenter_last.tokens[0].logprob == doctest::Approx(std::log(0.1)).epsilon(1e-12));
}

TEST_CASE("triggers inside the target affect only later tokens") {
  TableLm lm({"he", "she", "nurse"}, {{"he", 0.6}, {"she", 0.2}, {"nurse", 0.2}},
             {{"nurse", {{"he", 0.2}, {"she", 0.6}, {"nurse", 0.2}}}});
  const SequenceScore score = lm.score({"", "she nurse she"});
  REQUIRE(score.token_count() == 3);
  CHECK(score.tokens[0].logprob == doctest::Approx(std::log(0.2)).epsilon(1e-12));
  CHECK(score.tokens[2].logprob == doctest::Approx(std::log(0.6)).epsilon(1e-12));
}

TEST_CASE("token normalization lets punctuation-adjacent words match") {
  TableLm lm = worked_example();
  const SequenceScore plain = lm.score({"", "he works"});
  const SequenceScore dressed = lm.score({"", "\"he\" works."});
  REQUIRE(dressed.token_count() == 2);
  CHECK(dressed.tokens[0].logprob == plain.tokens[0].logprob);
  CHECK(dressed.tokens[1].logprob == plain.tokens[1].logprob);
  // trigger words are normalized the same way
  const SequenceScore triggered = lm.score({"The nurse, however,", "she"});
  CHECK(triggered.tokens[0].logprob == doctest::Approx(std::log(0.6)).epsilon(1e-12));
}

TEST_CASE("unknown or zero-probability target tokens are an error") {
  TableLm lm = worked_example();
  try {
    lm.score({"", "he rests"});
    FAIL("expected UnknownToken");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownToken);
  }

  TableLm zero({"he", "she"}, {{"he", 1.0}, {"she", 0.0}}, {});
  CHECK_THROWS_AS(zero.score({"", "she"}), Error);
  CHECK_THROWS_AS(lm.score({"", ""}), Error);
}

TEST_CASE("uniform tables give perplexity equal to the vocabulary size") {
  for (std::size_t v : {2, 4, 16}) {
    TableLm lm = uniform_lm(v);
    const SequenceScore score = lm.score({"", "w0 w1 w0"});
    CHECK(per_token_perplexity(score) == doctest::Approx(static_cast<double>(v)).epsilon(1e-9));
  }
}

TEST_CASE("an all-certain sequence has perplexity one") {
  TableLm lm({"only"}, {{"only", 1.0}}, {});
  const SequenceScore score = lm.score({"", "only only only"});
  CHECK(per_token_perplexity(score) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sequence_log_likelihood(score) == 0.0);
}

TEST_CASE("distribution invariants are enforced at construction") {
  // sums must be within 1e-9 of one
  CHECK_THROWS_AS(TableLm({"a", "b"}, {{"a", 0.6}, {"b", 0.5}}, {}), Error);
  // override tokens must stay inside the vocabulary
  CHECK_THROWS_AS(TableLm({"a"}, {{"a", 1.0}}, {{"t", {{"zzz", 1.0}}}}), Error);
  // probabilities must be in range
  CHECK_THROWS_AS(TableLm({"a", "b"}, {{"a", 1.5}, {"b", -0.5}}, {}), Error);
  // tokens that collide after normalization are ambiguous
  CHECK_THROWS_AS(TableLm({"a", "a."}, {{"a", 0.5}, {"a.", 0.5}}, {}), Error);
  // near-1 sums inside tolerance are fine
  CHECK_NOTHROW(TableLm({"a", "b"}, {{"a", 0.5 + 1e-10}, {"b", 0.5}}, {}));
}

TEST_CASE("table ids are stable hashes of the spec") {
  TableLm a = worked_example();
  TableLm b = worked_example();
  CHECK(a.backend_id() == b.backend_id());
  CHECK(a.backend_id().rfind("table:", 0) == 0);
  CHECK(a.backend_id().size() == 6 + 16);

  TableLm c({"he", "she", "works"}, {{"he", 0.5}, {"she", 0.3}, {"works", 0.2}}, {});
  CHECK(c.backend_id() != a.backend_id());
}

TEST_CASE("table specs load from json text with schema errors surfaced") {
  TableLm lm = TableLm::from_json_text(
      R"({"vocabulary": ["x", "y"], "base": {"x": 0.75, "y": 0.25}})");
  CHECK(per_token_perplexity(lm.score({"", "y"})) == doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS_AS(TableLm::from_json_text("not json"), Error);
  CHECK_THROWS_AS(TableLm::from_json_text(R"({"base": {"x": 1.0}})"), Error);
  CHECK_THROWS_AS(TableLm::from_json_text("[1, 2]"), Error);
}

TEST_CASE("empty sequences cannot be scored or measured") {
  CHECK_THROWS_AS(per_token_perplexity(SequenceScore{}), Error);
}
