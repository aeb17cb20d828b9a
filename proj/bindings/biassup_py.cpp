#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "biassup/corpus.hpp"
#include "biassup/downstream.hpp"
#include "biassup/errors.hpp"
#include "biassup/http_backend.hpp"
#include "biassup/lexicon.hpp"
#include "biassup/metrics.hpp"
#include "biassup/preamble.hpp"
#include "biassup/score_cache.hpp"
#include "biassup/scoring.hpp"
#include "biassup/selection.hpp"
#include "biassup/version.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace biassup;

namespace {

std::string kind_str(PreambleKind kind) { return std::string(kind_name(kind)); }

}  // namespace

PYBIND11_MODULE(_biassup, m) {
  m.doc() = "Gender-bias suppression toolkit: preamble generation, selection and evaluation";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "ToolkitError");

  // --- lexicon ---------------------------------------------------------
  py::class_<DescriptionViolation>(m, "DescriptionViolation")
      .def_readonly("occupation", &DescriptionViolation::occupation)
      .def_readonly("field", &DescriptionViolation::field)
      .def_readonly("reason", &DescriptionViolation::reason)
      .def_readonly("observed_words", &DescriptionViolation::observed_words)
      .def("__repr__", [](const DescriptionViolation& v) {
        return "DescriptionViolation(" + v.occupation + " " + v.field + ": " + v.reason + ")";
      });

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("checked", &ValidationReport::checked)
      .def_readonly("violations", &ValidationReport::violations)
      .def("ok", &ValidationReport::ok);

  py::class_<Lexicon>(m, "Lexicon")
      .def_readonly("male_names", &Lexicon::male_names)
      .def_readonly("female_names", &Lexicon::female_names)
      .def_readonly("male_occupations", &Lexicon::male_occupations)
      .def_readonly("female_occupations", &Lexicon::female_occupations)
      .def_readonly("share_threshold", &Lexicon::share_threshold)
      .def("is_male_occupation", &Lexicon::is_male_occupation, "occupation"_a)
      .def("is_female_occupation", &Lexicon::is_female_occupation, "occupation"_a)
      .def("has_name", &Lexicon::has_name, "name"_a, "gender"_a);

  m.def("load_lexicon_files", &load_lexicon_files, "names_path"_a, "occupations_path"_a,
        "descriptions_path"_a, "share_threshold"_a = 0.70);
  m.def("validate_descriptions", &validate_descriptions, "lexicon"_a);

  // --- preambles -------------------------------------------------------
  py::class_<Preamble>(m, "Preamble")
      .def_property_readonly("kind", [](const Preamble& p) { return kind_str(p.kind); })
      .def_readonly("text", &Preamble::text)
      .def_readonly("occupation", &Preamble::occupation)
      .def_readonly("person_name", &Preamble::person_name)
      .def_readonly("person_gender", &Preamble::person_gender)
      .def("__repr__",
           [](const Preamble& p) { return "Preamble(" + kind_str(p.kind) + ": \"" + p.text + "\")"; });

  py::class_<Prompt>(m, "Prompt")
      .def_readonly("preambles", &Prompt::preambles)
      .def_readonly("input_text", &Prompt::input_text)
      .def_readonly("assembled", &Prompt::assembled)
      .def_readonly("boundary", &Prompt::boundary);

  m.def("indefinite_article",
        [](const std::string& occupation) { return std::string(indefinite_article(occupation)); },
        "occupation"_a);
  m.def("build_cf_simple", &build_cf_simple, "name"_a, "gender"_a, "occupation"_a, "lexicon"_a);
  m.def("build_cf_detailed", &build_cf_detailed, "name"_a, "gender"_a, "occupation"_a,
        "lexicon"_a);
  m.def("build_desc",
        [](const std::string& kind, const std::string& occupation, const Lexicon& lexicon) {
          return build_desc(kind_from_name(kind), occupation, lexicon);
        },
        "kind"_a, "occupation"_a, "lexicon"_a);
  m.def("generate_candidates",
        [](const std::string& kind, const Lexicon& lexicon, std::size_t count,
           std::uint64_t seed) {
          return generate_candidates(kind_from_name(kind), lexicon, count, seed);
        },
        "kind"_a, "lexicon"_a, "count"_a, "seed"_a);
  m.def("baseline_instruct", &baseline_instruct);
  m.def("baseline_intervention", &baseline_intervention, "demos"_a = std::vector<std::string>{});
  m.def("assemble_prompt", &assemble_prompt, "preambles"_a, "input_text"_a);
  m.def("preambles_to_jsonl", &preambles_to_jsonl, "preambles"_a);
  m.def("preambles_from_jsonl", &preambles_from_jsonl, "text"_a);

  // --- scoring ---------------------------------------------------------
  py::class_<TokenScore>(m, "TokenScore")
      .def_readonly("text", &TokenScore::text)
      .def_readonly("logprob", &TokenScore::logprob)
      .def("__repr__", [](const TokenScore& t) {
        return "TokenScore(\"" + t.text + "\", " + std::to_string(t.logprob) + ")";
      });

  py::class_<SequenceScore>(m, "SequenceScore")
      .def_readonly("tokens", &SequenceScore::tokens)
      .def("token_count", &SequenceScore::token_count);

  py::class_<ScoreRequest>(m, "ScoreRequest")
      .def(py::init([](std::string prefix, std::string target) {
             return ScoreRequest{std::move(prefix), std::move(target)};
           }),
           "prefix"_a, "target"_a)
      .def_readonly("prefix", &ScoreRequest::prefix)
      .def_readonly("target", &ScoreRequest::target);

  py::class_<Backend>(m, "Backend")
      .def("score",
           [](Backend& backend, const std::string& prefix, const std::string& target) {
             return backend.score({prefix, target});
           },
           "prefix"_a, "target"_a)
      .def_property_readonly("backend_id",
                             [](const Backend& backend) { return backend.backend_id(); });

  py::class_<TableLm, Backend>(m, "TableLm")
      .def(py::init<std::vector<std::string>, std::map<std::string, double>,
                    std::map<std::string, std::map<std::string, double>>>(),
           "vocabulary"_a, "base"_a,
           "triggers"_a = std::map<std::string, std::map<std::string, double>>{})
      .def_static("from_json_text", &TableLm::from_json_text, "text"_a)
      .def_static("from_file", &TableLm::from_file, "path"_a)
      .def_property_readonly("vocabulary", &TableLm::vocabulary);

  py::class_<HttpBackend, Backend>(m, "HttpBackend")
      .def(py::init([](std::string endpoint, std::string model, std::string api_key_env,
                       std::string completions_path, int timeout_ms, int retries,
                       int parallelism, std::string boundary) {
             HttpBackendConfig config;
             config.endpoint = std::move(endpoint);
             config.model = std::move(model);
             config.api_key_env = std::move(api_key_env);
             config.completions_path = std::move(completions_path);
             config.timeout_ms = timeout_ms;
             config.retries = retries;
             config.parallelism = parallelism;
             config.boundary = std::move(boundary);
             return new HttpBackend(std::move(config));
           }),
           "endpoint"_a, "model"_a, "api_key_env"_a = "",
           "completions_path"_a = "/v1/completions", "timeout_ms"_a = 30000, "retries"_a = 3,
           "parallelism"_a = 4, "boundary"_a = "pad-space");

  py::class_<ScoreCache>(m, "ScoreCache")
      .def(py::init<std::string>(), "path"_a)
      .def("get", &ScoreCache::get, "backend_id"_a, "request"_a)
      .def("put", &ScoreCache::put, "backend_id"_a, "request"_a, "score"_a)
      .def("size", &ScoreCache::size)
      .def("corrupt_lines", &ScoreCache::corrupt_lines)
      .def_static("key_hash", &ScoreCache::key_hash, "backend_id"_a, "request"_a);

  py::class_<CachingBackend, Backend>(m, "CachingBackend")
      .def(py::init<Backend&, ScoreCache&>(), "inner"_a, "cache"_a, py::keep_alive<1, 2>(),
           py::keep_alive<1, 3>());

  m.def("sequence_log_likelihood", &sequence_log_likelihood, "score"_a);
  m.def("per_token_perplexity", &per_token_perplexity, "score"_a);

  // --- corpus ----------------------------------------------------------
  py::class_<SentencePair>(m, "SentencePair")
      .def_readonly("id", &SentencePair::id)
      .def_readonly("stereotypical", &SentencePair::stereotypical)
      .def_readonly("anti_stereotypical", &SentencePair::anti_stereotypical)
      .def_readonly("bias_type", &SentencePair::bias_type);

  py::class_<PairDataset>(m, "PairDataset")
      .def_readonly("pairs", &PairDataset::pairs)
      .def_readonly("source_path", &PairDataset::source_path)
      .def_readonly("skipped_identical", &PairDataset::skipped_identical);

  py::class_<MultipleChoiceItem>(m, "MultipleChoiceItem")
      .def_readonly("id", &MultipleChoiceItem::id)
      .def_readonly("premise", &MultipleChoiceItem::premise)
      .def_readonly("choices", &MultipleChoiceItem::choices)
      .def_readonly("gold_index", &MultipleChoiceItem::gold_index)
      .def_readonly("source", &MultipleChoiceItem::source)
      .def_readonly("question", &MultipleChoiceItem::question);

  m.def("parse_crows_pairs", &parse_crows_pairs, "csv_text"_a);
  m.def("filter_bias_type", &filter_bias_type, "dataset"_a, "bias_type"_a);
  m.def("parse_multiple_choice", &parse_multiple_choice, "jsonl_text"_a, "source"_a);
  m.def("sample_items", &sample_items, "items"_a, "count"_a, "seed"_a);

  // --- metrics ---------------------------------------------------------
  py::class_<PairScores>(m, "PairScores")
      .def(py::init([](std::string pair_id, double loglik_s, double loglik_a,
                       std::size_t tokens_s, std::size_t tokens_a) {
             return PairScores{std::move(pair_id), loglik_s, loglik_a, tokens_s, tokens_a};
           }),
           "pair_id"_a, "loglik_s"_a, "loglik_a"_a, "tokens_s"_a = 1, "tokens_a"_a = 1)
      .def_readonly("pair_id", &PairScores::pair_id)
      .def_readonly("loglik_s", &PairScores::loglik_s)
      .def_readonly("loglik_a", &PairScores::loglik_a)
      .def_readonly("tokens_s", &PairScores::tokens_s)
      .def_readonly("tokens_a", &PairScores::tokens_a);

  py::class_<BiasReport>(m, "BiasReport")
      .def_readonly("condition", &BiasReport::condition)
      .def_readonly("n_preambles", &BiasReport::n_preambles)
      .def_readonly("rbs", &BiasReport::rbs)
      .def_readonly("acc_bias", &BiasReport::acc_bias)
      .def_readonly("rbs_per_token", &BiasReport::rbs_per_token)
      .def_readonly("pair_count", &BiasReport::pair_count)
      .def_readonly("per_pair", &BiasReport::per_pair)
      .def_readonly("backend_id", &BiasReport::backend_id);

  m.def("rbs", &rbs, "pairs"_a);
  m.def("acc_bias_score", &acc_bias_score, "pairs"_a);
  m.def("delta_percent", &delta_percent, "value"_a, "nc_value"_a);
  m.def("evaluate_condition", &evaluate_condition, "dataset"_a, "backend"_a,
        "preambles"_a = std::vector<Preamble>{}, "parallelism"_a = 1);

  // --- selection -------------------------------------------------------
  py::class_<RankedPreamble>(m, "RankedPreamble")
      .def_readonly("preamble", &RankedPreamble::preamble)
      .def_readonly("perplexity", &RankedPreamble::perplexity)
      .def_readonly("rank", &RankedPreamble::rank);

  m.def("rank_by_perplexity", &rank_by_perplexity, "candidates"_a, "backend"_a,
        "parallelism"_a = 1);
  m.def("top_n", &top_n, "ranked"_a, "n"_a);
  m.def("random_select", &random_select, "candidates"_a, "n"_a, "seed"_a);

  // --- downstream ------------------------------------------------------
  py::class_<ItemPrediction>(m, "ItemPrediction")
      .def_readonly("item_id", &ItemPrediction::item_id)
      .def_readonly("choice_perplexities", &ItemPrediction::choice_perplexities)
      .def_readonly("chosen_index", &ItemPrediction::chosen_index)
      .def_readonly("gold_index", &ItemPrediction::gold_index)
      .def_readonly("correct", &ItemPrediction::correct)
      .def_readonly("tie", &ItemPrediction::tie);

  py::class_<DownstreamReport>(m, "DownstreamReport")
      .def_readonly("condition", &DownstreamReport::condition)
      .def_readonly("n_preambles", &DownstreamReport::n_preambles)
      .def_readonly("source", &DownstreamReport::source)
      .def_readonly("accuracy", &DownstreamReport::accuracy)
      .def_readonly("delta_acc", &DownstreamReport::delta_acc)
      .def_readonly("item_count", &DownstreamReport::item_count)
      .def_readonly("tie_count", &DownstreamReport::tie_count)
      .def_readonly("predictions", &DownstreamReport::predictions)
      .def_readonly("backend_id", &DownstreamReport::backend_id);

  m.def("evaluate_item", &evaluate_item, "item"_a, "backend"_a,
        "preambles"_a = std::vector<Preamble>{});
  m.def("evaluate_dataset",
        [](const std::vector<MultipleChoiceItem>& items, Backend& backend,
           const std::vector<Preamble>& preambles, std::optional<DownstreamReport> nc_reference,
           int parallelism) {
          return evaluate_dataset(items, backend, preambles,
                                  nc_reference ? &*nc_reference : nullptr, parallelism);
        },
        "items"_a, "backend"_a, "preambles"_a = std::vector<Preamble>{},
        "nc_reference"_a = std::nullopt, "parallelism"_a = 1);
}
