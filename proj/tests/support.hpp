#pragma once

// Generators, brute-force oracles and fixtures shared by the unit tests and
// the acceptance binary. Oracles here deliberately avoid the library's own
// helpers so that a bug on one side cannot hide on the other.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vibemoji/catalog.hpp"
#include "vibemoji/codec.hpp"
#include "vibemoji/history.hpp"
#include "vibemoji/reco.hpp"

namespace vibemoji::testing {

#ifdef VIBEMOJI_SOURCE_DIR
inline std::filesystem::path source_dir() { return VIBEMOJI_SOURCE_DIR; }
#endif

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vibemoji") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Generators

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// A point in [1,7]^2. With `grid`, coordinates snap to 0.5 steps so that
/// equal distances and co-located elements occur often.
inline EmotionPoint random_point(std::mt19937& rng, bool grid = false) {
  if (grid) return {1.0 + 0.5 * uniform_int(rng, 0, 12), 1.0 + 0.5 * uniform_int(rng, 0, 12)};
  return {uniform(rng, 1.0, 7.0), uniform(rng, 1.0, 7.0)};
}

inline Element make_sticker(std::string id, EmotionPoint p) {
  return {std::move(id), Modality::Sticker, "", p, StickerAsset{{0x1F600}}};
}

inline Element make_animation(std::string id, EmotionPoint p, std::string behavior = "bounce") {
  return {std::move(id), Modality::Animation, "", p, AnimationAsset{std::move(behavior), 1000, 0.5}};
}

inline Element make_vibration(std::string id, EmotionPoint p, std::int64_t extent_ms = 500) {
  return {std::move(id), Modality::Vibration, "", p,
          VibrationAsset{{VibrationEvent{0, extent_ms, 0.5, 0.5}}}};
}

inline std::string numbered(char prefix, int i) {
  std::string s(1, prefix);
  s += std::to_string(i);
  return s;
}

inline Catalog random_catalog(std::mt19937& rng, int stickers, int vibrations, int animations,
                              bool grid = false) {
  std::vector<Element> s, a, v;
  for (int i = 0; i < stickers; ++i) s.push_back(make_sticker(numbered('s', i), random_point(rng, grid)));
  for (int i = 0; i < animations; ++i) {
    a.push_back(make_animation(numbered('a', i), random_point(rng, grid)));
  }
  for (int i = 0; i < vibrations; ++i) {
    v.push_back(make_vibration(numbered('v', i), random_point(rng, grid)));
  }
  return Catalog({"bounce"}, std::move(s), std::move(a), std::move(v));
}

inline const Element& pick(std::mt19937& rng, const Catalog& c, Modality m) {
  const auto elems = c.elements(m);
  return elems[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(elems.size()) - 1))];
}

/// A sticker plus each optional modality with probability 1/2.
inline MultimodalEmoticon random_emoticon(std::mt19937& rng, const Catalog& c) {
  MultimodalEmoticon e;
  e.sticker_id = pick(rng, c, Modality::Sticker).id;
  if (coin(rng, 0.5)) e.vibration_id = pick(rng, c, Modality::Vibration).id;
  if (coin(rng, 0.5)) e.animation_id = pick(rng, c, Modality::Animation).id;
  return e;
}

/// A send history concentrated on a few favourites so counts vary.
inline std::vector<MultimodalEmoticon> random_sends(std::mt19937& rng, const Catalog& c, int max_sends) {
  std::vector<MultimodalEmoticon> out;
  const int n = uniform_int(rng, 0, max_sends);
  for (int i = 0; i < n; ++i) out.push_back(random_emoticon(rng, c));
  return out;
}

inline PairCounts counts_of(const std::vector<MultimodalEmoticon>& sends) {
  UsageHistory h;
  for (const auto& e : sends) h.record_send("u", e);
  return h.snapshot("u");
}

// ---------------------------------------------------------------------------
// Ranking oracle: recomputes everything from the raw send list.

inline bool emoticon_has(const MultimodalEmoticon& e, Modality m, const std::string& id) {
  switch (m) {
    case Modality::Sticker:
      return e.sticker_id == id;
    case Modality::Vibration:
      return e.vibration_id && *e.vibration_id == id;
    case Modality::Animation:
      return e.animation_id && *e.animation_id == id;
  }
  return false;
}

/// F(u, s): number of sends that contain both elements.
inline double oracle_f(const std::vector<MultimodalEmoticon>& sends, const Element& u, const Element& s) {
  double n = 0;
  for (const auto& e : sends) {
    if (emoticon_has(e, u.modality, u.id) && emoticon_has(e, s.modality, s.id)) n += 1;
  }
  return n;
}

struct OracleScore {
  double p, tf, idf, r;
};

inline OracleScore oracle_score(const std::vector<MultimodalEmoticon>& sends, const Catalog& c,
                                const Element& u, const Element& s, double alpha, double beta) {
  const double dv = u.emotion.valence - s.emotion.valence;
  const double da = u.emotion.arousal - s.emotion.arousal;
  const double d = std::sqrt(dv * dv + da * da);
  const double p = 1.0 / (d < 1e-6 ? 1e-6 : d);

  double total = 0;
  double used = 0;
  for (const auto& other : c.elements(s.modality)) {
    const double f = oracle_f(sends, u, other);
    total += f;
    if (f >= 1) used += 1;
  }
  const double tf = total == 0 ? 0.0 : oracle_f(sends, u, s) / total;
  const double n = static_cast<double>(c.size(s.modality));
  const double idf = used == 0 ? 1.0 : std::log(n / used) + 1.0;
  return {p, tf, idf, alpha * p + beta * tf * idf};
}

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

/// Expected display order: mean score descending, ties in catalog order.
inline std::vector<std::string> oracle_order(const std::vector<MultimodalEmoticon>& sends,
                                             const Catalog& c, const std::vector<const Element*>& sel,
                                             Modality target, double alpha, double beta) {
  const auto elems = c.elements(target);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    double sum = 0;
    for (const Element* u : sel) sum += oracle_score(sends, c, *u, elems[i], alpha, beta).r;
    scored.emplace_back(sum / static_cast<double>(sel.size()), i);
  }
  // Insertion sort: stable by construction, independent of std::stable_sort.
  for (std::size_t i = 1; i < scored.size(); ++i) {
    for (std::size_t j = i; j > 0 && scored[j - 1].first < scored[j].first; --j) {
      std::swap(scored[j - 1], scored[j]);
    }
  }
  std::vector<std::string> out;
  for (const auto& [score, i] : scored) out.push_back(elems[i].id);
  return out;
}

inline bool is_permutation_of(const std::vector<std::string>& order, std::span<const Element> elems) {
  if (order.size() != elems.size()) return false;
  std::vector<std::string> a = order;
  std::vector<std::string> b;
  for (const auto& e : elems) b.push_back(e.id);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// ---------------------------------------------------------------------------
// Filter oracles

/// Ids of the k nearest vibrations, by exhaustive sort on (distance, index).
inline std::vector<std::string> oracle_nearest(const Element& sticker, std::span<const Element> vibs,
                                               std::size_t k) {
  std::vector<std::size_t> idx(vibs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto dist = [&](std::size_t i) {
    return std::hypot(sticker.emotion.valence - vibs[i].emotion.valence,
                      sticker.emotion.arousal - vibs[i].emotion.arousal);
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double da = dist(a);
    const double db = dist(b);
    return da != db ? da < db : a < b;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(vibs[idx[i]].id);
  return out;
}

/// Double loop: for every vibration, count the stickers whose k-nearest set
/// contains it (rank computed by counting strictly closer competitors).
inline std::vector<std::string> oracle_mark_filter(std::span<const Element> stickers,
                                                   std::span<const Element> vibs, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t v = 0; v < vibs.size(); ++v) {
    int marks = 0;
    for (const auto& s : stickers) {
      auto d = [&](std::size_t i) {
        return std::hypot(s.emotion.valence - vibs[i].emotion.valence,
                          s.emotion.arousal - vibs[i].emotion.arousal);
      };
      std::size_t ahead = 0;
      for (std::size_t w = 0; w < vibs.size(); ++w) {
        if (d(w) < d(v) || (d(w) == d(v) && w < v)) ++ahead;
      }
      if (ahead < k) ++marks;
    }
    if (marks >= 2) out.push_back(vibs[v].id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analytics oracle: a single pass over one user's time-ordered events.

struct OracleSummary {
  std::uint64_t texts = 0;
  std::uint64_t emoticons = 0;
  std::vector<std::int64_t> frames;
};

inline OracleSummary oracle_summary(const std::string& user, std::vector<InteractionEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp_ms < b.timestamp_ms; });
  OracleSummary out;
  std::int64_t start = -1;
  for (const auto& e : events) {
    if (e.user_id != user) continue;
    const bool keyboard = e.kind == EventKind::OpenKeyboard || e.kind == EventKind::Select ||
                          e.kind == EventKind::Deselect;
    if (keyboard && start < 0) start = e.timestamp_ms;
    if (e.kind == EventKind::Send) {
      if (e.payload.rfind("[[", 0) == 0) {
        ++out.emoticons;
        out.frames.push_back(start >= 0 ? e.timestamp_ms - start : 0);
        start = -1;
      } else {
        ++out.texts;
      }
    }
  }
  return out;
}

inline std::int64_t oracle_lower_median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace vibemoji::testing
