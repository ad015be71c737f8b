#include "vibemoji/simulate.hpp"

#include <array>
#include <charconv>

#include "vibemoji/codec.hpp"
#include "vibemoji/error.hpp"

namespace vibemoji {

PairCounts replay_history_script(std::string_view script, const Catalog& catalog) {
  UsageHistory history;
  const std::string user = "script";
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < script.size()) {
    std::size_t end = script.find('\n', start);
    if (end == std::string_view::npos) end = script.size();
    std::string_view line = script.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    for (const auto& emo : decode_body(line).emoticons()) {
      try {
        history.record_send(user, emo, &catalog);
      } catch (const Error& e) {
        throw Error("history line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return history.snapshot(user);
}

Simulation simulate(const Catalog& catalog, const PairCounts& history,
                    const std::vector<ElementRef>& selection, const Weights& weights) {
  const Selection sel = make_selection(catalog, selection);
  Simulation sim{weights, selection, {}};
  for (Modality target : kAllModalities) {
    if (sel.contains(target)) continue;
    const auto ranked = rank_candidates(sel, target, history, catalog, weights);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      for (std::size_t k = 0; k < ranked[i].parts.size(); ++k) {
        sim.rows.push_back({target, i + 1, ranked[i].element, sel.elements()[k], ranked[i].parts[k],
                            ranked[i].score});
      }
    }
  }
  return sim;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_simulation(const Simulation& sim) {
  std::string out = "weights alpha=" + format_number(sim.weights.alpha) +
                    " beta=" + format_number(sim.weights.beta) + "\n";
  out += "select";
  for (const auto& ref : sim.selection) {
    out += ' ';
    out += to_string(ref.modality);
    out += '=';
    out += ref.id;
  }
  out += '\n';
  std::optional<Modality> current;
  for (const auto& row : sim.rows) {
    if (current != row.target) {
      current = row.target;
      out += "\ntarget ";
      out += to_string(row.target);
      out += "\nrank id via P TF IDF TF-IDF R score\n";
    }
    out += std::to_string(row.rank) + ' ' + row.candidate->id + ' ' +
           std::string(to_string(row.via->modality)) + '=' + row.via->id + ' ' +
           format_number(row.score.p) + ' ' + format_number(row.score.tf) + ' ' +
           format_number(row.score.idf) + ' ' + format_number(row.score.tf_idf) + ' ' +
           format_number(row.score.r) + ' ' + format_number(row.final_score) + '\n';
  }
  return out;
}

}  // namespace vibemoji
