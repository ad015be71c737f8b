#include "vibemoji/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vibemoji/error.hpp"

namespace vibemoji {

using nlohmann::json;

std::int64_t VibrationAsset::extent_ms() const noexcept {
  if (events.empty()) return 0;
  return events.back().offset_ms + events.back().duration_ms;
}

Modality asset_modality(const AssetSpec& asset) noexcept {
  switch (asset.index()) {
    case 0:
      return Modality::Sticker;
    case 1:
      return Modality::Animation;
    default:
      return Modality::Vibration;
  }
}

bool is_valid_element_id(std::string_view id) noexcept {
  if (id.empty() || id == "-") return false;
  for (unsigned char c : id) {
    if (c < 0x20 || c == 0x7f) return false;
    if (c == ':' || c == '[' || c == ']') return false;
  }
  return true;
}

namespace {

std::string element_tag(Modality m, std::string_view id) {
  std::string out(to_string(m));
  out += " \"";
  out += id;
  out += '"';
  return out;
}

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

bool is_scalar_value(char32_t c) { return c <= 0x10FFFF && (c < 0xD800 || c > 0xDFFF); }

void check_asset(const Element& e, const std::set<std::string, std::less<>>& vocabulary,
                 std::vector<std::string>& out) {
  const std::string tag = element_tag(e.modality, e.id);
  if (asset_modality(e.asset) != e.modality) {
    out.push_back(tag + ": asset kind does not match modality");
    return;
  }
  if (const auto* s = std::get_if<StickerAsset>(&e.asset)) {
    if (s->codepoints.empty()) out.push_back(tag + ": sticker has no codepoints");
    for (char32_t c : s->codepoints) {
      if (!is_scalar_value(c)) {
        out.push_back(tag + ": codepoint " + std::to_string(static_cast<std::uint32_t>(c)) +
                      " is not a Unicode scalar value");
      }
    }
  } else if (const auto* a = std::get_if<AnimationAsset>(&e.asset)) {
    if (!vocabulary.contains(a->behavior)) {
      out.push_back(tag + ": behavior \"" + a->behavior + "\" is not declared");
    }
    if (a->period_ms <= 0) out.push_back(tag + ": period_ms must be positive");
    if (!(std::isfinite(a->amplitude) && a->amplitude > 0.0 && a->amplitude <= 1.0)) {
      out.push_back(tag + ": amplitude must be in (0, 1]");
    }
  } else if (const auto* v = std::get_if<VibrationAsset>(&e.asset)) {
    if (v->events.empty()) out.push_back(tag + ": vibration has no events");
    std::int64_t prev_offset = 0;
    for (std::size_t i = 0; i < v->events.size(); ++i) {
      const auto& ev = v->events[i];
      const std::string at = tag + ": event " + std::to_string(i);
      if (ev.offset_ms < 0) out.push_back(at + " has negative offset_ms");
      if (ev.duration_ms <= 0) out.push_back(at + " has non-positive duration_ms");
      if (!in_unit(ev.intensity)) out.push_back(at + " intensity outside [0, 1]");
      if (!in_unit(ev.sharpness)) out.push_back(at + " sharpness outside [0, 1]");
      if (i > 0 && ev.offset_ms < prev_offset) out.push_back(at + " is not sorted by offset_ms");
      prev_offset = ev.offset_ms;
    }
    if (v->extent_ms() > kMaxVibrationExtentMs) {
      out.push_back(tag + ": pattern lasts " + std::to_string(v->extent_ms()) +
                    " ms, longer than 10000 ms");
    }
  }
}

std::vector<std::string> domain_violations(const std::vector<std::string>& behaviors,
                                           const std::array<const std::vector<Element>*, 3>& lists) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> vocabulary;
  for (const auto& b : behaviors) {
    if (b.empty()) out.push_back("behaviors: empty behavior name");
    if (!vocabulary.insert(b).second) out.push_back("behaviors: duplicate \"" + b + "\"");
  }
  for (Modality m : kAllModalities) {
    const auto& list = *lists[static_cast<std::size_t>(m)];
    if (list.empty()) out.push_back(std::string(to_string(m)) + "s: at least one element required");
    std::set<std::string, std::less<>> seen;
    for (const auto& e : list) {
      const std::string tag = element_tag(m, e.id);
      if (e.modality != m) out.push_back(tag + ": listed under the wrong modality");
      if (!is_valid_element_id(e.id)) {
        out.push_back(tag + ": id must be nonempty, printable, not \"-\", and free of ':', '[', ']'");
      }
      if (!seen.insert(e.id).second) out.push_back(tag + ": duplicate id");
      if (!e.emotion.in_range()) out.push_back(tag + ": valence/arousal outside [1, 7]");
      check_asset(e, vocabulary, out);
    }
  }
  return out;
}

// Reads one element object, appending shape problems to `out`. Returns false
// when the element could not be built at all.
bool read_element(const json& j, Modality m, std::size_t position, Element& e,
                  std::vector<std::string>& out) {
  const std::string where = std::string(to_string(m)) + "s[" + std::to_string(position) + "]";
  if (!j.is_object()) {
    out.push_back(where + ": not an object");
    return false;
  }
  if (!j.contains("id") || !j["id"].is_string()) {
    out.push_back(where + ": missing string field \"id\"");
    return false;
  }
  e.id = j["id"].get<std::string>();
  e.modality = m;
  const std::string tag = element_tag(m, e.id);
  bool ok = true;
  auto need = [&](const char* key, auto pred, const char* what) -> const json* {
    if (!j.contains(key) || !pred(j[key])) {
      out.push_back(tag + ": missing " + what + " field \"" + key + "\"");
      ok = false;
      return nullptr;
    }
    return &j[key];
  };
  auto is_number = [](const json& v) { return v.is_number(); };
  auto is_string = [](const json& v) { return v.is_string(); };
  auto is_object = [](const json& v) { return v.is_object(); };
  auto is_integer = [](const json& v) { return v.is_number_integer(); };

  if (const auto* v = need("label", is_string, "string")) e.label = v->get<std::string>();
  if (const auto* v = need("valence", is_number, "numeric")) e.emotion.valence = v->get<double>();
  if (const auto* v = need("arousal", is_number, "numeric")) e.emotion.arousal = v->get<double>();
  const json* asset = need("asset", is_object, "object");
  if (asset == nullptr) return false;

  const json& a = *asset;
  switch (m) {
    case Modality::Sticker: {
      StickerAsset s;
      if (!a.contains("codepoints") || !a["codepoints"].is_array()) {
        out.push_back(tag + ": asset needs array \"codepoints\"");
        return false;
      }
      for (const auto& c : a["codepoints"]) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0 ||
            c.get<std::int64_t>() > 0x10FFFF) {
          out.push_back(tag + ": codepoints must be integers in [0, 0x10FFFF]");
          return false;
        }
        s.codepoints.push_back(static_cast<char32_t>(c.get<std::int64_t>()));
      }
      e.asset = std::move(s);
      break;
    }
    case Modality::Animation: {
      AnimationAsset an;
      if (!a.contains("behavior") || !a["behavior"].is_string() || !a.contains("period_ms") ||
          !is_integer(a["period_ms"]) || !a.contains("amplitude") || !a["amplitude"].is_number()) {
        out.push_back(tag + ": asset needs \"behavior\", integer \"period_ms\", and \"amplitude\"");
        return false;
      }
      an.behavior = a["behavior"].get<std::string>();
      an.period_ms = a["period_ms"].get<std::int64_t>();
      an.amplitude = a["amplitude"].get<double>();
      e.asset = std::move(an);
      break;
    }
    case Modality::Vibration: {
      VibrationAsset vib;
      if (!a.contains("events") || !a["events"].is_array()) {
        out.push_back(tag + ": asset needs array \"events\"");
        return false;
      }
      for (const auto& ev : a["events"]) {
        if (!ev.is_object() || !ev.contains("offset_ms") || !is_integer(ev["offset_ms"]) ||
            !ev.contains("duration_ms") || !is_integer(ev["duration_ms"]) ||
            !ev.contains("intensity") || !ev["intensity"].is_number() ||
            !ev.contains("sharpness") || !ev["sharpness"].is_number()) {
          out.push_back(tag + ": each event needs integer offset_ms/duration_ms and numeric "
                              "intensity/sharpness");
          return false;
        }
        vib.events.push_back({ev["offset_ms"].get<std::int64_t>(),
                              ev["duration_ms"].get<std::int64_t>(),
                              ev["intensity"].get<double>(), ev["sharpness"].get<double>()});
      }
      e.asset = std::move(vib);
      break;
    }
  }
  return ok;
}

struct ReadResult {
  std::vector<std::string> behaviors;
  std::array<std::vector<Element>, 3> lists;
  std::vector<std::string> violations;
};

constexpr std::array<const char*, 3> kListKeys{"stickers", "animations", "vibrations"};

ReadResult read_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("catalog document must be a JSON object");

  ReadResult r;
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<std::int64_t>() != kCatalogVersion) {
    r.violations.push_back("version: must be the integer 1");
  }
  if (!doc.contains("behaviors") || !doc["behaviors"].is_array()) {
    r.violations.push_back("behaviors: missing list of behavior names");
  } else {
    for (const auto& b : doc["behaviors"]) {
      if (b.is_string()) {
        r.behaviors.push_back(b.get<std::string>());
      } else {
        r.violations.push_back("behaviors: entries must be strings");
      }
    }
  }
  for (Modality m : kAllModalities) {
    const char* key = kListKeys[static_cast<std::size_t>(m)];
    if (!doc.contains(key) || !doc[key].is_array()) {
      r.violations.push_back(std::string(key) + ": missing element list");
      continue;
    }
    std::size_t pos = 0;
    for (const auto& item : doc[key]) {
      Element e;
      if (read_element(item, m, pos, e, r.violations)) {
        r.lists[static_cast<std::size_t>(m)].push_back(std::move(e));
      }
      ++pos;
    }
  }
  return r;
}

json asset_to_json(const AssetSpec& asset) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, StickerAsset>) {
          json cps = json::array();
          for (char32_t c : a.codepoints) cps.push_back(static_cast<std::uint32_t>(c));
          return {{"codepoints", cps}};
        } else if constexpr (std::is_same_v<T, AnimationAsset>) {
          return {{"behavior", a.behavior}, {"period_ms", a.period_ms}, {"amplitude", a.amplitude}};
        } else {
          json evs = json::array();
          for (const auto& ev : a.events) {
            evs.push_back({{"offset_ms", ev.offset_ms},
                           {"duration_ms", ev.duration_ms},
                           {"intensity", ev.intensity},
                           {"sharpness", ev.sharpness}});
          }
          return {{"events", evs}};
        }
      },
      asset);
}

}  // namespace

Catalog::Catalog(std::vector<std::string> behaviors, std::vector<Element> stickers,
                 std::vector<Element> animations, std::vector<Element> vibrations)
    : behaviors_(std::move(behaviors)),
      by_modality_{std::move(stickers), std::move(animations), std::move(vibrations)} {
  auto problems = domain_violations(behaviors_, {&by_modality_[0], &by_modality_[1], &by_modality_[2]});
  if (!problems.empty()) throw ValidationError(std::move(problems));
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t i = 0; i < by_modality_[m].size(); ++i) {
      index_[m].emplace(by_modality_[m][i].id, i);
    }
  }
}

std::span<const Element> Catalog::elements(Modality m) const noexcept {
  return by_modality_[static_cast<std::size_t>(m)];
}

const Element* Catalog::find(Modality m, std::string_view id) const noexcept {
  const auto& idx = index_[static_cast<std::size_t>(m)];
  auto it = idx.find(id);
  if (it == idx.end()) return nullptr;
  return &by_modality_[static_cast<std::size_t>(m)][it->second];
}

std::size_t Catalog::index_of(Modality m, std::string_view id) const {
  const auto& idx = index_[static_cast<std::size_t>(m)];
  auto it = idx.find(id);
  if (it == idx.end()) {
    throw Error("unknown " + element_tag(m, id));
  }
  return it->second;
}

std::vector<std::string> validate_catalog_document(std::string_view text) {
  ReadResult r;
  try {
    r = read_document(text);
  } catch (const ParseError& e) {
    return {e.what()};
  }
  auto problems = domain_violations(r.behaviors, {&r.lists[0], &r.lists[1], &r.lists[2]});
  r.violations.insert(r.violations.end(), problems.begin(), problems.end());
  return r.violations;
}

Catalog parse_catalog(std::string_view text) {
  ReadResult r = read_document(text);
  auto problems = domain_violations(r.behaviors, {&r.lists[0], &r.lists[1], &r.lists[2]});
  r.violations.insert(r.violations.end(), problems.begin(), problems.end());
  if (!r.violations.empty()) throw ValidationError(std::move(r.violations));
  return Catalog(std::move(r.behaviors), std::move(r.lists[0]), std::move(r.lists[1]),
                 std::move(r.lists[2]));
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read catalog " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str());
}

std::string serialize_catalog(const Catalog& catalog) {
  json doc;
  doc["version"] = kCatalogVersion;
  doc["behaviors"] = catalog.behaviors();
  for (Modality m : kAllModalities) {
    json list = json::array();
    for (const auto& e : catalog.elements(m)) {
      list.push_back({{"id", e.id},
                      {"label", e.label},
                      {"valence", e.emotion.valence},
                      {"arousal", e.emotion.arousal},
                      {"asset", asset_to_json(e.asset)}});
    }
    doc[kListKeys[static_cast<std::size_t>(m)]] = std::move(list);
  }
  return doc.dump(2) + "\n";
}

std::vector<RatingRecord> parse_ratings(std::string_view text) {
  std::vector<RatingRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "ratings line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError(where + ": not a JSON object");
    }
    if (!j.is_object() || !j.contains("element_id") || !j["element_id"].is_string() ||
        !j.contains("respondent_id") || !j["respondent_id"].is_string() ||
        !j.contains("valence") || !j["valence"].is_number_integer() || !j.contains("arousal") ||
        !j["arousal"].is_number_integer()) {
      throw ParseError(where + ": needs element_id, respondent_id, integer valence and arousal");
    }
    RatingRecord r{j["element_id"].get<std::string>(), j["respondent_id"].get<std::string>(),
                   j["valence"].get<int>(), j["arousal"].get<int>()};
    if (r.valence < 1 || r.valence > 7 || r.arousal < 1 || r.arousal > 7) {
      throw ValidationError({where + ": scores must be integers 1-7"});
    }
    out.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return out;
}

std::map<std::string, EmotionPoint> aggregate_ratings(std::span<const RatingRecord> records) {
  struct Sum {
    std::int64_t valence = 0;
    std::int64_t arousal = 0;
    std::int64_t n = 0;
  };
  std::map<std::string, Sum> sums;
  std::vector<std::string> problems;
  for (const auto& r : records) {
    if (r.valence < 1 || r.valence > 7 || r.arousal < 1 || r.arousal > 7) {
      problems.push_back("rating of \"" + r.element_id + "\" by \"" + r.respondent_id +
                         "\" is outside 1-7");
      continue;
    }
    auto& s = sums[r.element_id];
    s.valence += r.valence;
    s.arousal += r.arousal;
    ++s.n;
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  // Integer sums make the mean independent of record order.
  std::map<std::string, EmotionPoint> out;
  for (const auto& [id, s] : sums) {
    out.emplace(id, EmotionPoint{static_cast<double>(s.valence) / static_cast<double>(s.n),
                                 static_cast<double>(s.arousal) / static_cast<double>(s.n)});
  }
  return out;
}

std::map<std::string, EmotionPoint> aggregate_ratings(std::span<const RatingRecord> records,
                                                      std::span<const std::string> required) {
  auto out = aggregate_ratings(records);
  std::vector<std::string> missing;
  for (const auto& id : required) {
    if (!out.contains(id)) missing.push_back("element \"" + id + "\" has no ratings");
  }
  if (!missing.empty()) throw ValidationError(std::move(missing));
  return out;
}

std::vector<std::string> nearest_vibrations(const Element& sticker,
                                            std::span<const Element> vibrations, std::size_t k) {
  if (sticker.modality != Modality::Sticker) throw Error("nearest_vibrations: anchor is not a sticker");
  if (k == 0) throw Error("nearest_vibrations: k must be positive");
  if (k > vibrations.size()) {
    throw Error("nearest_vibrations: k=" + std::to_string(k) + " exceeds " +
                std::to_string(vibrations.size()) + " candidates");
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(vibrations.size());
  for (std::size_t i = 0; i < vibrations.size(); ++i) {
    if (vibrations[i].modality != Modality::Vibration) {
      throw Error("nearest_vibrations: candidate \"" + vibrations[i].id + "\" is not a vibration");
    }
    ranked.emplace_back(distance(sticker.emotion, vibrations[i].emotion), i);
  }
  // Pair ordering breaks distance ties by input position.
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(vibrations[ranked[i].second].id);
  return out;
}

std::vector<std::string> mark_frequency_filter(std::span<const Element> stickers,
                                               std::span<const Element> vibrations, std::size_t k) {
  if (stickers.empty() || vibrations.empty()) {
    throw Error("mark_frequency_filter: sticker and vibration sets must be nonempty");
  }
  std::map<std::string, int, std::less<>> marks;
  for (const auto& s : stickers) {
    for (auto& id : nearest_vibrations(s, vibrations, k)) ++marks[id];
  }
  std::vector<std::string> out;
  for (const auto& v : vibrations) {
    auto it = marks.find(v.id);
    if (it != marks.end() && it->second >= 2) out.push_back(v.id);
  }
  return out;
}

}  // namespace vibemoji
