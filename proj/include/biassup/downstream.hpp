#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "biassup/corpus.hpp"
#include "biassup/preamble.hpp"
#include "biassup/scoring.hpp"

namespace biassup {

struct ItemPrediction {
  std::string item_id;
  std::vector<double> choice_perplexities;
  int chosen_index = 0;
  int gold_index = 0;
  bool correct = false;
  bool tie = false;  // minimum perplexity shared by more than one choice
};

struct DownstreamReport {
  std::string condition;
  std::size_t n_preambles = 0;
  std::string source;
  double accuracy = 0.0;                // fraction in [0, 1]
  std::optional<double> delta_acc;      // percentage points vs the nc run
  std::size_t item_count = 0;
  std::size_t tie_count = 0;
  std::string backend_id;
  std::vector<ItemPrediction> predictions;
};

// Scores premise + " " + choice for every choice (preamble span as unscored
// prefix) and picks the choice with the lowest per-token perplexity; exact
// ties go to the lowest index and are counted.
ItemPrediction evaluate_item(const MultipleChoiceItem& item, Backend& backend,
                             const std::vector<Preamble>& preambles);

// nc_reference, when given, supplies the no-preamble accuracy that delta_acc
// is measured against (in percentage points).
DownstreamReport evaluate_dataset(const std::vector<MultipleChoiceItem>& items, Backend& backend,
                                  const std::vector<Preamble>& preambles,
                                  const DownstreamReport* nc_reference = nullptr,
                                  int parallelism = 1);

nlohmann::json to_json(const DownstreamReport& report);
// Per-item audit trail: one JSON line per item with choice perplexities.
std::string trace_to_jsonl(const DownstreamReport& report);

}  // namespace biassup
