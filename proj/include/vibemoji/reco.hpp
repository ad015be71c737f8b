#pragma once

#include <string>
#include <vector>

#include "vibemoji/catalog.hpp"
#include "vibemoji/history.hpp"

namespace vibemoji {

/// Floor on the valence-arousal distance; co-located elements score 1/eps.
inline constexpr double kDistanceFloor = 1e-6;

struct Weights {
  double alpha = 0.6;  // emotional similarity
  double beta = 0.4;   // usage TF-IDF

  /// Throws Error unless alpha, beta >= 0 and alpha + beta > 0.
  void validate() const;
};

struct RankingScore {
  double p = 0.0;
  double tf = 0.0;
  double idf = 1.0;
  double tf_idf = 0.0;
  double r = 0.0;
};

/// One or two selected elements from distinct modalities.
class Selection {
 public:
  /// Throws Error on an empty, oversized, or same-modality selection.
  explicit Selection(std::vector<const Element*> elements);

  const std::vector<const Element*>& elements() const noexcept { return elements_; }
  bool contains(Modality m) const noexcept;

 private:
  std::vector<const Element*> elements_;
};

/// Resolves (modality, id) refs against the catalog; unknown ids throw.
Selection make_selection(const Catalog& catalog, const std::vector<ElementRef>& refs);

/// 1 / max(d, eps) with d the valence-arousal distance.
double emotional_similarity(const Element& u, const Element& s) noexcept;

/// F(u,s) / sum over s' in s's modality of F(u,s'); 0 when that sum is 0.
double term_frequency(const Element& u, const Element& s, const PairCounts& history,
                      const Catalog& catalog);

/// ln(n / #{s' : F(u,s') >= 1}) + 1 over the target modality, or 1 when u
/// was never combined with that modality.
double inverse_document_frequency(const Element& u, Modality target, const PairCounts& history,
                                  const Catalog& catalog);

RankingScore ranking_score(const Element& u, const Element& s, const PairCounts& history,
                           const Catalog& catalog, const Weights& w);

struct RankedCandidate {
  const Element* element = nullptr;
  /// One entry per selected element, in selection order.
  std::vector<RankingScore> parts;
  /// Mean of the parts' r.
  double score = 0.0;
};

/// Every element of `target`, best first. Equal scores keep catalog order.
std::vector<RankedCandidate> rank_candidates(const Selection& selection, Modality target,
                                             const PairCounts& history, const Catalog& catalog,
                                             const Weights& w);

std::vector<std::string> rank_modality(const Selection& selection, Modality target,
                                       const PairCounts& history, const Catalog& catalog,
                                       const Weights& w);

}  // namespace vibemoji
