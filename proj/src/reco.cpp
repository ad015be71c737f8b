#include "vibemoji/reco.hpp"

#include <algorithm>
#include <cmath>

#include "vibemoji/error.hpp"

namespace vibemoji {

namespace {

ElementRef ref_of(const Element& e) { return {e.modality, e.id}; }

void require_cross_modal(const Element& u, const Element& s) {
  if (u.modality == s.modality) {
    throw Error("ranking needs elements from two different modalities");
  }
}

}  // namespace

void Weights::validate() const {
  if (!(std::isfinite(alpha) && std::isfinite(beta) && alpha >= 0.0 && beta >= 0.0 &&
        alpha + beta > 0.0)) {
    throw Error("weights need alpha >= 0, beta >= 0 and alpha + beta > 0");
  }
}

Selection::Selection(std::vector<const Element*> elements) : elements_(std::move(elements)) {
  if (elements_.empty() || elements_.size() > 2) {
    throw Error("a selection holds one or two elements");
  }
  for (const auto* e : elements_) {
    if (e == nullptr) throw Error("selection references a missing element");
  }
  if (elements_.size() == 2 && elements_[0]->modality == elements_[1]->modality) {
    throw Error("selected elements must come from distinct modalities");
  }
}

bool Selection::contains(Modality m) const noexcept {
  return std::any_of(elements_.begin(), elements_.end(),
                     [m](const Element* e) { return e->modality == m; });
}

Selection make_selection(const Catalog& catalog, const std::vector<ElementRef>& refs) {
  std::vector<const Element*> elements;
  for (const auto& ref : refs) {
    const Element* e = catalog.find(ref.modality, ref.id);
    if (e == nullptr) {
      throw Error("unknown " + std::string(to_string(ref.modality)) + " id \"" + ref.id + "\"");
    }
    elements.push_back(e);
  }
  return Selection(std::move(elements));
}

double emotional_similarity(const Element& u, const Element& s) noexcept {
  return 1.0 / std::max(distance(u.emotion, s.emotion), kDistanceFloor);
}

double term_frequency(const Element& u, const Element& s, const PairCounts& history,
                      const Catalog& catalog) {
  require_cross_modal(u, s);
  const ElementRef uref = ref_of(u);
  std::uint64_t total = 0;
  for (const auto& other : catalog.elements(s.modality)) total += history.count(uref, ref_of(other));
  if (total == 0) return 0.0;
  return static_cast<double>(history.count(uref, ref_of(s))) / static_cast<double>(total);
}

double inverse_document_frequency(const Element& u, Modality target, const PairCounts& history,
                                  const Catalog& catalog) {
  if (u.modality == target) throw Error("IDF target modality must differ from the element's");
  const auto candidates = catalog.elements(target);
  const ElementRef uref = ref_of(u);
  std::size_t combined = 0;
  for (const auto& other : candidates) {
    if (history.count(uref, ref_of(other)) >= 1) ++combined;
  }
  if (combined == 0) return 1.0;
  return std::log(static_cast<double>(candidates.size()) / static_cast<double>(combined)) + 1.0;
}

RankingScore ranking_score(const Element& u, const Element& s, const PairCounts& history,
                           const Catalog& catalog, const Weights& w) {
  RankingScore out;
  out.p = emotional_similarity(u, s);
  out.tf = term_frequency(u, s, history, catalog);
  out.idf = inverse_document_frequency(u, s.modality, history, catalog);
  out.tf_idf = out.tf * out.idf;
  out.r = w.alpha * out.p + w.beta * out.tf_idf;
  return out;
}

std::vector<RankedCandidate> rank_candidates(const Selection& selection, Modality target,
                                             const PairCounts& history, const Catalog& catalog,
                                             const Weights& w) {
  w.validate();
  if (selection.contains(target)) {
    throw Error("target modality " + std::string(to_string(target)) + " is already selected");
  }
  std::vector<RankedCandidate> out;
  for (const auto& s : catalog.elements(target)) {
    RankedCandidate c{&s, {}, 0.0};
    double sum = 0.0;
    for (const Element* u : selection.elements()) {
      c.parts.push_back(ranking_score(*u, s, history, catalog, w));
      sum += c.parts.back().r;
    }
    c.score = sum / static_cast<double>(c.parts.size());
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.score > b.score; });
  return out;
}

std::vector<std::string> rank_modality(const Selection& selection, Modality target,
                                       const PairCounts& history, const Catalog& catalog,
                                       const Weights& w) {
  std::vector<std::string> ids;
  for (const auto& c : rank_candidates(selection, target, history, catalog, w)) {
    ids.push_back(c.element->id);
  }
  return ids;
}

}  // namespace vibemoji
