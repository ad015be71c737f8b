#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vibemoji/catalog.hpp"
#include "vibemoji/history.hpp"
#include "vibemoji/reco.hpp"

namespace vibemoji {

/// Counts from a script of sends: each nonblank line is one message in codec
/// format, and every emoticon token in it is one send. Lines starting with
/// '#' are comments. Unknown ids throw Error naming the line.
PairCounts replay_history_script(std::string_view script, const Catalog& catalog);

struct SimulationRow {
  Modality target = Modality::Sticker;
  std::size_t rank = 0;
  const Element* candidate = nullptr;
  /// The selected element this row's score is measured against.
  const Element* via = nullptr;
  RankingScore score;
  /// Mean of r over all selected elements; what the ranking sorts by.
  double final_score = 0.0;
};

struct Simulation {
  Weights weights;
  std::vector<ElementRef> selection;
  std::vector<SimulationRow> rows;
};

/// Ranks every unselected modality and keeps the per-selection breakdown.
Simulation simulate(const Catalog& catalog, const PairCounts& history,
                    const std::vector<ElementRef>& selection, const Weights& weights);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

/// Whitespace-separated table, one block per target modality:
///   weights alpha=<a> beta=<b>
///   select <modality>=<id> ...
///   target <modality>
///   rank id via P TF IDF TF-IDF R score
/// With two selections each candidate has one row per selected element.
std::string format_simulation(const Simulation& sim);

}  // namespace vibemoji
