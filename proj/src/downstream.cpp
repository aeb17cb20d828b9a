#include "biassup/downstream.hpp"

#include <stdexcept>

#include "biassup/errors.hpp"
#include "biassup/metrics.hpp"
#include "biassup/parallel.hpp"

namespace biassup {

ItemPrediction evaluate_item(const MultipleChoiceItem& item, Backend& backend,
                             const std::vector<Preamble>& preambles) {
  ItemPrediction pred;
  pred.item_id = item.id;
  pred.gold_index = item.gold_index;
  pred.choice_perplexities.reserve(item.choices.size());

  for (const std::string& choice : item.choices) {
    std::string text = item.premise + " " + choice;
    Prompt prompt = assemble_prompt(preambles, text);
    ScoreRequest request{prompt.assembled.substr(0, prompt.boundary), text};
    SequenceScore score = backend.score(request);
    pred.choice_perplexities.push_back(per_token_perplexity(score));
  }

  // Lowest perplexity wins; strict < keeps the earliest choice on exact ties.
  int best = 0;
  for (int i = 1; i < static_cast<int>(pred.choice_perplexities.size()); ++i) {
    if (pred.choice_perplexities[i] < pred.choice_perplexities[best]) best = i;
  }
  pred.chosen_index = best;
  pred.correct = best == item.gold_index;
  for (int i = 0; i < static_cast<int>(pred.choice_perplexities.size()); ++i) {
    if (i != best && pred.choice_perplexities[i] == pred.choice_perplexities[best]) {
      pred.tie = true;
      break;
    }
  }
  return pred;
}

DownstreamReport evaluate_dataset(const std::vector<MultipleChoiceItem>& items, Backend& backend,
                                  const std::vector<Preamble>& preambles,
                                  const DownstreamReport* nc_reference, int parallelism) {
  if (items.empty()) throw Error(ErrorCode::EmptyDataset, "no items to evaluate");

  DownstreamReport report;
  report.condition = derive_condition(preambles);
  report.n_preambles = preambles.size();
  report.source = items.front().source;
  report.backend_id = backend.backend_id();
  report.item_count = items.size();
  report.predictions.resize(items.size());

  parallel_for(items.size(), parallelism, [&](std::size_t i) {
    try {
      report.predictions[i] = evaluate_item(items[i], backend, preambles);
    } catch (const Error& e) {
      throw Error(e.code(), "item " + items[i].id + ": " + e.what());
    }
  });

  std::size_t correct = 0;
  for (const ItemPrediction& pred : report.predictions) {
    if (pred.correct) ++correct;
    if (pred.tie) ++report.tie_count;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(items.size());
  if (nc_reference != nullptr) {
    report.delta_acc = 100.0 * (report.accuracy - nc_reference->accuracy);
  }
  return report;
}

nlohmann::json to_json(const DownstreamReport& report) {
  nlohmann::json j{
      {"condition", report.condition},
      {"n_preambles", report.n_preambles},
      {"source", report.source},
      {"accuracy", report.accuracy},
      {"item_count", report.item_count},
      {"tie_count", report.tie_count},
      {"backend_id", report.backend_id},
  };
  if (report.delta_acc) {
    j["delta_acc"] = *report.delta_acc;
  } else {
    j["delta_acc"] = nullptr;
  }
  return j;
}

std::string trace_to_jsonl(const DownstreamReport& report) {
  std::string out;
  for (const ItemPrediction& pred : report.predictions) {
    nlohmann::json j{
        {"id", pred.item_id},
        {"perplexities", pred.choice_perplexities},
        {"chosen", pred.chosen_index},
        {"gold", pred.gold_index},
        {"correct", pred.correct},
        {"tie", pred.tie},
    };
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace biassup
