#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "biassup/commands.hpp"
#include "biassup/errors.hpp"
#include "biassup/io.hpp"
#include "biassup/run_config.hpp"

using namespace biassup;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = BIASSUP_REPO_ROOT;

// Each fixture gets its own output directory under the system temp root; the
// example inputs are shared read-only.
struct RunFixture {
  fs::path out_dir;
  RunConfig config;

  explicit RunFixture(const std::string& mode = "perplexity", std::size_t count = 6) {
    static int n = 0;
    out_dir = fs::temp_directory_path() /
              ("biassup-cmd-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    const std::string examples = kRoot + "/data/examples";
    json cfg{
        {"backend",
         {{"kind", "table"},
          {"table_path", examples + "/table_lm.json"},
          {"cache_path", (out_dir / "scores.cache.jsonl").string()},
          {"parallelism", 2}}},
        {"lexicon",
         {{"names", examples + "/lexicon/names.csv"},
          {"occupations", examples + "/lexicon/occupations.csv"},
          {"descriptions", examples + "/lexicon/descriptions.csv"}}},
        {"datasets",
         {{"pairs", examples + "/pairs.csv"},
          {"bias_type", "gender"},
          {"copa", examples + "/copa.jsonl"},
          {"hellaswag", examples + "/hellaswag.jsonl"}}},
        {"preambles",
         {{"kinds", {"cf-simple", "desc-simple"}},
          {"count", count},
          {"seed", 0},
          {"n_values", {1, 2}},
          {"demos_path", examples + "/demos.txt"}}},
        {"selection", {{"mode", mode}, {"seeds", {0, 1, 2}}}},
        {"output_dir", out_dir.string()},
    };
    config = parse_run_config(cfg.dump(), "");
  }
  ~RunFixture() { fs::remove_all(out_dir); }

  std::string out(const std::string& name) const { return (out_dir / name).string(); }
};

}  // namespace

TEST_CASE("validate-lexicon succeeds on the example and bundled lexicons") {
  RunFixture fx;
  CHECK(cmd_validate_lexicon(fx.config) == 0);

  RunFixture bundled;
  bundled.config.lexicon.names = kRoot + "/data/lexicon/names.csv";
  bundled.config.lexicon.occupations = kRoot + "/data/lexicon/occupations.csv";
  bundled.config.lexicon.descriptions = kRoot + "/data/lexicon/descriptions.csv";
  CHECK(cmd_validate_lexicon(bundled.config) == 0);
}

TEST_CASE("the pipeline runs end to end and the reports are deterministic") {
  RunFixture fx;
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  REQUIRE(cmd_select(fx.config) == 0);
  REQUIRE(cmd_score_bias(fx.config, true) == 0);
  REQUIRE(cmd_eval_downstream(fx.config) == 0);

  CHECK(fs::exists(fx.out("candidates_cf-simple.jsonl")));
  CHECK(fs::exists(fx.out("ranked_cf-simple.jsonl")));
  CHECK(fs::exists(fx.out("dataset_used.jsonl")));
  CHECK(fs::exists(fx.out("bias_pairs.jsonl")));
  CHECK(fs::exists(fx.out("downstream_trace.jsonl")));

  const std::string bias_first = read_text_file(fx.out("bias_report.json"));
  const std::string bias_csv_first = read_text_file(fx.out("bias_report.csv"));
  const std::string ds_first = read_text_file(fx.out("downstream_report.json"));

  // a warm rerun (cache already populated) must be byte-identical
  REQUIRE(cmd_score_bias(fx.config, true) == 0);
  REQUIRE(cmd_eval_downstream(fx.config) == 0);
  CHECK(read_text_file(fx.out("bias_report.json")) == bias_first);
  CHECK(read_text_file(fx.out("bias_report.csv")) == bias_csv_first);
  CHECK(read_text_file(fx.out("downstream_report.json")) == ds_first);
}

TEST_CASE("the bias report carries the analytic values of the example model") {
  RunFixture fx;
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  REQUIRE(cmd_select(fx.config) == 0);
  REQUIRE(cmd_score_bias(fx.config, true) == 0);

  const json report = json::parse(read_text_file(fx.out("bias_report.json")));
  CHECK(report.at("provenance").at("toolkit_version").is_string());
  CHECK(report.at("provenance").at("config_hash") == fx.config.config_hash);
  CHECK(report.at("skipped_identical_pairs") == 0);

  bool saw_nc = false;
  for (const auto& row : report.at("rows")) {
    if (row.at("condition") != "nc") continue;
    saw_nc = true;
    // the example model prefers "he" 3:1, so nc bias is ln 3 per pair
    CHECK(row.at("rbs").get<double>() ==
          doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(row.at("acc_bias").get<double>() == 1.0);
    CHECK(row.at("pair_count") == 4);
    CHECK(row.at("delta_rbs_pct").get<double>() == 0.0);
  }
  CHECK(saw_nc);

  // baselines carry n=1 and the template rows carry their kind
  const json& rows = report.at("rows");
  CHECK(rows.size() == 3 + 2 * 2);  // nc + 2 baselines + 2 kinds x 2 n values
}

TEST_CASE("random mode reports per-seed rows plus their mean") {
  RunFixture fx("random");
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  REQUIRE(cmd_select(fx.config) == 0);
  REQUIRE(cmd_score_bias(fx.config, false) == 0);

  for (int seed : {0, 1, 2}) {
    CHECK(fs::exists(fx.out("random_cf-simple_seed" + std::to_string(seed) + ".jsonl")));
  }

  const json report = json::parse(read_text_file(fx.out("bias_report.json")));
  CHECK(report.at("provenance").at("selection_mode") == "random");

  for (const std::string kind : {"cf-simple", "desc-simple"}) {
    for (std::size_t n : {1, 2}) {
      std::vector<double> seed_rbs;
      double mean_rbs = 0.0;
      bool saw_mean = false;
      for (const auto& row : report.at("rows")) {
        if (row.at("condition") != kind || row.at("n") != n) continue;
        if (!row.contains("seed")) continue;
        if (row.at("seed") == "mean") {
          mean_rbs = row.at("rbs").get<double>();
          saw_mean = true;
        } else {
          seed_rbs.push_back(row.at("rbs").get<double>());
        }
      }
      REQUIRE(saw_mean);
      REQUIRE(seed_rbs.size() == 3);
      const double expected = (seed_rbs[0] + seed_rbs[1] + seed_rbs[2]) / 3.0;
      CHECK(mean_rbs == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("downstream evaluation reflects the designed example flips") {
  RunFixture fx;
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  REQUIRE(cmd_select(fx.config) == 0);
  REQUIRE(cmd_eval_downstream(fx.config) == 0);

  const json report = json::parse(read_text_file(fx.out("downstream_report.json")));
  bool saw_copa_nc = false;
  for (const auto& row : report.at("rows")) {
    if (row.at("source") == "copa" && row.at("condition") == "nc") {
      saw_copa_nc = true;
      // item 0 is cued by its own premise, item 1 goes to the stereotype
      CHECK(row.at("accuracy").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(row.at("delta_acc").is_null());
    }
  }
  CHECK(saw_copa_nc);
}

TEST_CASE("downstream sampling is recorded and reproducible") {
  RunFixture fx;
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  REQUIRE(cmd_select(fx.config) == 0);
  REQUIRE(cmd_eval_downstream(fx.config, 2, 7) == 0);
  const json report = json::parse(read_text_file(fx.out("downstream_report.json")));
  CHECK(report.at("sample") == 2);
  CHECK(report.at("sample_seed") == 7);
  for (const auto& row : report.at("rows")) CHECK(row.at("item_count") == 2);

  const std::string first = read_text_file(fx.out("downstream_report.json"));
  REQUIRE(cmd_eval_downstream(fx.config, 2, 7) == 0);
  CHECK(read_text_file(fx.out("downstream_report.json")) == first);
}

TEST_CASE("stages demand their upstream artifacts") {
  RunFixture fx;
  try {
    cmd_select(fx.config);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()).find("build-preambles") != std::string::npos);
  }
  REQUIRE(cmd_build_preambles(fx.config) == 0);
  try {
    cmd_score_bias(fx.config, false);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()).find("select") != std::string::npos);
  }
}

TEST_CASE("build-preambles honors a count override") {
  RunFixture fx;
  REQUIRE(cmd_build_preambles(fx.config, 4) == 0);
  std::size_t lines = 0;
  const std::string body = read_text_file(fx.out("candidates_cf-simple.jsonl"));
  for (char c : body) lines += c == '\n';
  CHECK(lines == 4);
}
