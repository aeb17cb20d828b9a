#include <doctest.h>

#include <json.hpp>

#include <set>
#include <string>

#include "biassup/errors.hpp"
#include "biassup/io.hpp"
#include "biassup/preamble.hpp"

using namespace biassup;
using nlohmann::json;

namespace {

const std::string kRoot = BIASSUP_REPO_ROOT;

Lexicon bundled_lexicon() {
  return load_lexicon_files(kRoot + "/data/lexicon/names.csv",
                            kRoot + "/data/lexicon/occupations.csv",
                            kRoot + "/data/lexicon/descriptions.csv", 0.70);
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (PreambleKind kind :
       {PreambleKind::CfSimple, PreambleKind::CfDetailed, PreambleKind::DescSimple,
        PreambleKind::DescDetailed, PreambleKind::Instruct, PreambleKind::Intervention,
        PreambleKind::None}) {
    CHECK(kind_from_name(kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(kind_from_name("cf-extreme"), Error);
}

TEST_CASE("indefinite article follows the vowel letter with curated exceptions") {
  CHECK(indefinite_article("carpenter") == "a");
  CHECK(indefinite_article("electrician") == "an");
  CHECK(indefinite_article("occupational therapist") == "an");
  CHECK(indefinite_article("interior designer") == "an");
  // exceptions override the letter rule in both directions
  CHECK(indefinite_article("hourly worker") == "an");
  CHECK(indefinite_article("honest broker") == "an");
  CHECK(indefinite_article("union representative") == "a");
  CHECK(indefinite_article("one-person crew") == "a");
}

TEST_CASE("cf templates produce the documented sentence shapes") {
  const Lexicon lex = bundled_lexicon();
  const Preamble simple = build_cf_simple("Dawn", "female", "electrician", lex);
  CHECK(simple.text == "Dawn became an electrician.");
  CHECK(simple.kind == PreambleKind::CfSimple);
  CHECK(simple.person_name == "Dawn");
  CHECK(simple.person_gender == "female");
  CHECK(simple.occupation == "electrician");

  const Preamble detailed = build_cf_detailed("Dawn", "female", "electrician", lex);
  CHECK(detailed.text == "Despite being a female, Dawn became an electrician.");
  CHECK(detailed.kind == PreambleKind::CfDetailed);
}

TEST_CASE("stereotype-congruent pairings are refused") {
  const Lexicon lex = bundled_lexicon();
  try {
    build_cf_simple("Austin", "male", "carpenter", lex);  // male name, male occupation
    FAIL("expected NotCounterfactual");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCounterfactual);
  }
  try {
    build_cf_simple("Dawn", "female", "registered nurse", lex);
    FAIL("expected NotCounterfactual");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCounterfactual);
  }
}

TEST_CASE("unknown names, genders and occupations are rejected") {
  const Lexicon lex = bundled_lexicon();
  CHECK_THROWS_AS(build_cf_simple("Zorro", "male", "registered nurse", lex), Error);
  CHECK_THROWS_AS(build_cf_simple("Dawn", "nonbinary", "carpenter", lex), Error);
  CHECK_THROWS_AS(build_cf_simple("Dawn", "female", "astronaut", lex), Error);
  CHECK_THROWS_AS(build_desc(PreambleKind::DescSimple, "astronaut", lex), Error);
  CHECK_THROWS_AS(build_desc(PreambleKind::CfSimple, "carpenter", lex), Error);
}

TEST_CASE("desc templates return the stored descriptions verbatim") {
  const Lexicon lex = bundled_lexicon();
  const Preamble simple = build_desc(PreambleKind::DescSimple, "dental hygienist", lex);
  CHECK(simple.text == "Dental hygienists ensure oral health.");
  CHECK(simple.occupation == "dental hygienist");
  CHECK(simple.person_name.empty());
  const Preamble detailed = build_desc(PreambleKind::DescDetailed, "dental hygienist", lex);
  CHECK(detailed.text == "Dental hygienists focus on promoting oral health and hygiene.");
}

TEST_CASE("golden preamble fixtures reproduce byte for byte") {
  const Lexicon lex = bundled_lexicon();
  const json fixtures =
      json::parse(read_text_file(kRoot + "/data/fixtures/golden_preambles.json"));

  std::size_t checked = 0;
  for (const auto& g : fixtures.at("counterfactual")) {
    const std::string name = g.at("name");
    const std::string gender = g.at("gender");
    const std::string occupation = g.at("occupation");
    const Preamble p = g.at("kind") == "cf-simple"
                           ? build_cf_simple(name, gender, occupation, lex)
                           : build_cf_detailed(name, gender, occupation, lex);
    CHECK_MESSAGE(p.text == g.at("text").get<std::string>(), "input: ", name, " / ", occupation);
    ++checked;
  }
  for (const auto& g : fixtures.at("descriptive")) {
    const PreambleKind kind = kind_from_name(g.at("kind").get<std::string>());
    const Preamble p = build_desc(kind, g.at("occupation").get<std::string>(), lex);
    CHECK_MESSAGE(p.text == g.at("text").get<std::string>(),
                  "occupation: ", g.at("occupation").get<std::string>());
    ++checked;
  }
  CHECK(checked >= 14);
}

TEST_CASE("generated candidates are distinct, deterministic and well-formed") {
  const Lexicon lex = bundled_lexicon();
  const auto batch = generate_candidates(PreambleKind::CfSimple, lex, 200, 7);
  REQUIRE(batch.size() == 200);

  std::set<std::string> texts;
  for (const Preamble& p : batch) {
    CHECK(texts.insert(p.text).second);
    CHECK(p.kind == PreambleKind::CfSimple);
    CHECK(p.text.back() == '.');
    CHECK(p.text.find(p.person_name) == 0);
    CHECK(p.text.find(" became a") != std::string::npos);
    CHECK(p.text.find(p.occupation) != std::string::npos);
    // counterfactual by construction
    const bool male_occ = lex.is_male_occupation(p.occupation);
    CHECK(male_occ == (p.person_gender == "female"));
  }

  const auto again = generate_candidates(PreambleKind::CfSimple, lex, 200, 7);
  CHECK(again == batch);
  const auto other_seed = generate_candidates(PreambleKind::CfSimple, lex, 200, 8);
  CHECK(other_seed != batch);
}

TEST_CASE("desc candidates never mention gendered words") {
  const Lexicon lex = bundled_lexicon();
  const std::set<std::string> gendered{"he",  "she",  "his", "her",   "him",  "man",
                                       "men", "woman", "women", "male", "female"};
  for (PreambleKind kind : {PreambleKind::DescSimple, PreambleKind::DescDetailed}) {
    for (const Preamble& p : generate_candidates(kind, lex, 93, 3)) {
      std::string lowered;
      for (char c : p.text) {
        lowered.push_back(c == '.' || c == ',' ? ' ' : static_cast<char>(std::tolower(c)));
      }
      std::size_t start = 0;
      while (start < lowered.size()) {
        std::size_t end = lowered.find(' ', start);
        if (end == std::string::npos) end = lowered.size();
        const std::string word = lowered.substr(start, end - start);
        CHECK_MESSAGE(gendered.find(word) == gendered.end(), "in: ", p.text);
        start = end + 1;
      }
    }
  }
}

TEST_CASE("asking for more distinct candidates than the lexicon admits fails") {
  const Lexicon lex = bundled_lexicon();
  // 93 occupations exist, so 94 distinct descriptions are impossible.
  try {
    generate_candidates(PreambleKind::DescSimple, lex, 94, 0);
    FAIL("expected ExhaustedCandidates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExhaustedCandidates);
  }
}

TEST_CASE("chained generation aligns every kind on the same draw") {
  const Lexicon lex = bundled_lexicon();
  const CandidateSets sets = generate_chained(lex, 40, 21);
  REQUIRE(sets.cf_simple.size() == 40);
  REQUIRE(sets.cf_detailed.size() == 40);
  REQUIRE(sets.desc_simple.size() == 40);
  REQUIRE(sets.desc_detailed.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(sets.cf_detailed[i].occupation == sets.cf_simple[i].occupation);
    CHECK(sets.cf_detailed[i].person_name == sets.cf_simple[i].person_name);
    CHECK(sets.desc_simple[i].occupation == sets.cf_simple[i].occupation);
    CHECK(sets.desc_detailed[i].occupation == sets.cf_simple[i].occupation);
    CHECK(sets.cf_detailed[i].text == "Despite being a " + sets.cf_simple[i].person_gender +
                                          ", " + sets.cf_simple[i].text);
  }
  // the cf draw is the shared source, so it matches the standalone generator
  CHECK(sets.cf_simple == generate_candidates(PreambleKind::CfSimple, lex, 40, 21));
}

TEST_CASE("baseline preambles carry the fixed instruction texts") {
  const Preamble instruct = baseline_instruct();
  CHECK(instruct.kind == PreambleKind::Instruct);
  CHECK(instruct.text ==
        "Please ensure that the following is not biased and does not involve gender "
        "stereotyping.");
  CHECK(instruct.text == baseline_instruct().text);

  const Preamble bare = baseline_intervention({});
  CHECK(bare.kind == PreambleKind::Intervention);
  CHECK(bare.text.rfind("We should treat people", 0) == 0);

  const Preamble with_demos = baseline_intervention({"Demo one.", "Demo two."});
  CHECK(with_demos.text == "Demo one. Demo two. " + bare.text);

  std::vector<std::string> eight;
  for (int i = 0; i < 8; ++i) eight.push_back("Demo " + std::to_string(i) + ".");
  const Preamble full = baseline_intervention(eight);
  std::size_t pos = 0;
  for (const std::string& demo : eight) {
    const std::size_t at = full.text.find(demo, pos);
    REQUIRE(at != std::string::npos);
    pos = at + demo.size();
  }
  CHECK(full.text.find(bare.text, pos) != std::string::npos);
}

TEST_CASE("assemble_prompt joins preambles and records the input boundary") {
  const Lexicon lex = bundled_lexicon();
  const Preamble p1 = build_cf_simple("Dawn", "female", "electrician", lex);
  const Preamble p2 = build_desc(PreambleKind::DescSimple, "dental hygienist", lex);

  const Prompt prompt = assemble_prompt({p1, p2}, "He went home.");
  CHECK(prompt.assembled ==
        "Dawn became an electrician. Dental hygienists ensure oral health. He went home.");
  CHECK(prompt.boundary == prompt.assembled.size() - std::string("He went home.").size());
  CHECK(prompt.assembled.substr(prompt.boundary) == "He went home.");
  CHECK(prompt.input_text == "He went home.");

  const Prompt bare = assemble_prompt({}, "He went home.");
  CHECK(bare.assembled == "He went home.");
  CHECK(bare.boundary == 0);

  CHECK_THROWS_AS(assemble_prompt({p1}, ""), Error);
}

TEST_CASE("preamble jsonl round-trips all provenance fields") {
  const Lexicon lex = bundled_lexicon();
  std::vector<Preamble> batch = generate_candidates(PreambleKind::CfDetailed, lex, 10, 5);
  batch.push_back(build_desc(PreambleKind::DescSimple, "carpenter", lex));
  const std::vector<Preamble> back = preambles_from_jsonl(preambles_to_jsonl(batch));
  CHECK(back == batch);
}
