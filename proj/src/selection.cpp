#include "biassup/selection.hpp"

#include <json.hpp>

#include <algorithm>

#include "biassup/errors.hpp"
#include "biassup/parallel.hpp"
#include "biassup/rng.hpp"

namespace biassup {

namespace {

using nlohmann::json;

}  // namespace

std::vector<RankedPreamble> rank_by_perplexity(const std::vector<Preamble>& candidates,
                                               Backend& backend, int parallelism) {
  std::vector<RankedPreamble> ranked(candidates.size());
  parallel_for(candidates.size(), parallelism, [&](std::size_t i) {
    const SequenceScore score = backend.score({"", candidates[i].text});
    ranked[i] = {candidates[i], per_token_perplexity(score), 0};
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPreamble& a, const RankedPreamble& b) {
                     return a.perplexity < b.perplexity;
                   });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
  return ranked;
}

std::vector<Preamble> top_n(const std::vector<RankedPreamble>& ranked, std::size_t n) {
  if (n < 1 || n > ranked.size()) {
    throw Error(ErrorCode::NTooLarge, "n=" + std::to_string(n) + " outside [1, " +
                                          std::to_string(ranked.size()) + "]");
  }
  std::vector<Preamble> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].preamble);
  return out;
}

std::vector<std::size_t> random_select_indices(std::size_t population, std::size_t n,
                                               std::uint64_t seed) {
  if (n < 1 || n > population) {
    throw Error(ErrorCode::NTooLarge, "n=" + std::to_string(n) + " outside [1, " +
                                          std::to_string(population) + "]");
  }
  return Rng(seed).sample_indices(population, n);
}

std::vector<Preamble> random_select(const std::vector<Preamble>& candidates, std::size_t n,
                                    std::uint64_t seed) {
  std::vector<Preamble> out;
  out.reserve(n);
  for (std::size_t idx : random_select_indices(candidates.size(), n, seed)) {
    out.push_back(candidates[idx]);
  }
  return out;
}

std::string ranked_to_jsonl(const std::vector<RankedPreamble>& ranked) {
  std::string out;
  for (const auto& r : ranked) {
    json obj = {{"rank", r.rank},
                {"perplexity", r.perplexity},
                {"text", r.preamble.text},
                {"kind", std::string(kind_name(r.preamble.kind))}};
    if (!r.preamble.occupation.empty()) obj["occupation"] = r.preamble.occupation;
    if (!r.preamble.person_name.empty()) obj["name"] = r.preamble.person_name;
    if (!r.preamble.person_gender.empty()) obj["gender"] = r.preamble.person_gender;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<RankedPreamble> ranked_from_jsonl(std::string_view jsonl) {
  std::vector<RankedPreamble> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedJson, "line " + std::to_string(line_no) + ": " + e.what());
    }
    RankedPreamble r;
    r.rank = obj.at("rank").get<std::size_t>();
    r.perplexity = obj.at("perplexity").get<double>();
    r.preamble.kind = kind_from_name(obj.at("kind").get<std::string>());
    r.preamble.text = obj.at("text").get<std::string>();
    if (obj.contains("occupation")) r.preamble.occupation = obj["occupation"].get<std::string>();
    if (obj.contains("name")) r.preamble.person_name = obj["name"].get<std::string>();
    if (obj.contains("gender")) r.preamble.person_gender = obj["gender"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace biassup
