#include "shoprl/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <string_view>

#include "shoprl/click_subtype.hpp"

namespace shoprl {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a over tagged parts; separators keep ("ab","c") and ("a","bc") apart.
class Hash {
 public:
  explicit Hash(std::uint64_t seed) : h_(0xcbf29ce484222325ULL ^ seed) {}

  Hash& operator<<(std::string_view s) {
    for (const char c : s) mix(static_cast<unsigned char>(c));
    mix(0x1f);
    return *this;
  }
  Hash& operator<<(std::int64_t v) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    mix(0x1e);
    return *this;
  }
  std::uint64_t value() const {
    // Final avalanche so low bits depend on every byte.
    std::uint64_t z = h_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  void mix(unsigned char b) {
    h_ ^= b;
    h_ *= kFnvPrime;
  }
  std::uint64_t h_;
};

class Builder {
 public:
  explicit Builder(const FeatureConfig& cfg) : cfg_(cfg) {}

  template <typename... Parts>
  void add(double value, const Parts&... parts) {
    if (value == 0.0 || !std::isfinite(value)) return;
    Hash h(cfg_.hash_seed);
    (h << ... << part_of(parts));
    entries_.emplace_back(static_cast<std::uint32_t>(h.value() % cfg_.dim), value);
  }

  void append(const FeatureVector& other) {
    entries_.insert(entries_.end(), other.entries.begin(), other.entries.end());
  }

  FeatureVector finish() {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FeatureVector out;
    for (const auto& [index, value] : entries_) {
      if (!out.entries.empty() && out.entries.back().first == index) {
        out.entries.back().second += value;
      } else {
        out.entries.emplace_back(index, value);
      }
    }
    if (cfg_.normalize) {
      double norm = 0.0;
      for (const auto& e : out.entries) norm += e.second * e.second;
      if (norm > 0.0) {
        const double inv = 1.0 / std::sqrt(norm);
        for (auto& e : out.entries) e.second *= inv;
      }
    }
    return out;
  }

 private:
  static std::string_view part_of(std::string_view s) { return s; }
  static std::string_view part_of(const std::string& s) { return s; }
  static std::string_view part_of(const char* s) { return s; }
  static std::int64_t part_of(std::size_t v) { return static_cast<std::int64_t>(v); }
  static std::int64_t part_of(int v) { return v; }

  const FeatureConfig& cfg_;
  std::vector<std::pair<std::uint32_t, double>> entries_;
};

std::size_t step_bucket(std::size_t step_index) {
  static constexpr std::size_t kEdges[] = {1, 2, 3, 5, 8, 12, 20};
  std::size_t bucket = 0;
  for (const auto edge : kEdges) {
    if (step_index >= edge) ++bucket;
  }
  return bucket;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Summary of the visible history shared by context and candidate features.
struct HistorySummary {
  std::array<std::size_t, kNumClickSubtypes> subtype_counts{};
  std::size_t input_count = 0;
  std::string last_tag = "none";  // action kind or click subtype of the last entry
  std::vector<std::string> query_words;
  std::vector<std::string> last_rationale_words;
};

HistorySummary summarize(const PromptContext& ctx) {
  HistorySummary s;
  for (const auto& entry : ctx.history) {
    const Action& a = entry.action;
    if (a.is_click()) {
      const auto subtype = classify_click_subtype(a.element_name());
      ++s.subtype_counts[index_of(subtype)];
      s.last_tag = std::string(to_string(subtype));
    } else if (a.is_input()) {
      ++s.input_count;
      s.last_tag = "input";
      for (auto& w : words(a.text())) s.query_words.push_back(std::move(w));
    } else {
      s.last_tag = "terminate";
    }
  }
  if (!ctx.history.empty() && ctx.history.back().rationale) {
    s.last_rationale_words = words(*ctx.history.back().rationale);
  }
  return s;
}

}  // namespace

CandidateSet extract_candidates(const Observation& obs) {
  CandidateSet out;
  for (const auto& item : obs.interactables) {
    if (item.role == InteractableRole::kClickable) {
      out.clickables.push_back(item.name);
    } else {
      out.input_fields.push_back(item.name);
    }
  }
  return out;
}

double FeatureVector::dot(std::span<const double> weights) const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += weights[i] * v;
  return s;
}

void FeatureVector::add_scaled_to(std::span<double> target, double scale) const {
  for (const auto& [i, v] : entries) target[i] += scale * v;
}

std::vector<double> FeatureVector::to_dense(std::size_t dim) const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, v] : entries) out[i] += v;
  return out;
}

std::vector<std::string> name_tokens(std::string_view name) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const bool numeric = !cur.empty() && std::all_of(cur.begin(), cur.end(), [](unsigned char c) {
      return std::isdigit(c) != 0;
    });
    if (!cur.empty() && !numeric) out.push_back(cur);
    cur.clear();
  };
  for (const char c : name) {
    if (c == '_' || c == '-') {
      flush();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

PromptFeatures extract_features(const PromptContext& ctx, const CandidateSet& cands,
                                 const FeatureConfig& cfg) {
  const HistorySummary hist = summarize(ctx);
  const std::size_t bucket = step_bucket(ctx.step_index);
  const Persona* persona = cfg.use_persona && ctx.persona ? &*ctx.persona : nullptr;

  std::set<ClickSubtype> page_subtypes;
  for (const auto& name : cands.clickables) page_subtypes.insert(classify_click_subtype(name));

  Builder b(cfg);
  b.add(1.0, "bias");
  b.add(1.0, "step", bucket);
  b.add(1.0, "last", hist.last_tag);
  b.add(std::log1p(static_cast<double>(hist.input_count)), "hin");
  for (auto subtype : kAllClickSubtypes) {
    b.add(std::log1p(static_cast<double>(hist.subtype_counts[index_of(subtype)])), "hc",
          to_string(subtype));
  }
  for (const auto& w : hist.query_words) b.add(1.0, "hq", w);
  if (!hist.last_rationale_words.empty()) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(hist.last_rationale_words.size()));
    for (const auto& w : hist.last_rationale_words) b.add(scale, "rw", w);
  }
  for (auto subtype : page_subtypes) b.add(1.0, "pk", to_string(subtype));
  if (!cands.input_fields.empty()) b.add(1.0, "pin");
  if (persona != nullptr) {
    for (const auto& [key, value] : persona->shopping_prefs) {
      b.add(value, "ps", key);
      for (auto subtype : page_subtypes) b.add(value, "psxpk", key, to_string(subtype));
    }
    for (const auto& [key, value] : persona->demographics) b.add(1.0, "pc", key, value);
    for (const auto& [key, value] : persona->personality) b.add(1.0, "pc", key, value);
  }

  PromptFeatures out;
  out.context = b.finish();

  for (const auto& name : cands.clickables) {
    const auto subtype = std::string(to_string(classify_click_subtype(name)));
    const auto tokens = name_tokens(name);
    Builder c(cfg);
    c.add(1.0, "cs", subtype);
    c.add(1.0, "csl", subtype, hist.last_tag);
    c.add(1.0, "css", subtype, bucket);
    const auto sub_index = index_of(*click_subtype_from_string(subtype));
    c.add(std::log1p(static_cast<double>(hist.subtype_counts[sub_index])), "csh", subtype);
    for (const auto& t : tokens) c.add(1.0, "ct", t);
    if (persona != nullptr) {
      for (const auto& [key, value] : persona->shopping_prefs) {
        c.add(value, "csp", subtype, key);
        for (const auto& t : tokens) c.add(value, "ctp", t, key);
      }
    }
    out.clickables.push_back(c.finish());
  }
  for (const auto& name : cands.input_fields) {
    Builder c(cfg);
    c.add(1.0, "in_bias");
    for (const auto& t : name_tokens(name)) {
      c.add(1.0, "it", t);
      c.add(1.0, "itl", t, hist.last_tag);
    }
    out.input_fields.push_back(c.finish());
  }
  return out;
}

FeatureVector text_features(const FeatureVector& context, std::size_t position, int prev_token,
                            const FeatureConfig& cfg) {
  Builder b(cfg);
  b.append(context);
  b.add(1.0, "tpos", position);
  b.add(1.0, "tprev", prev_token);
  b.add(1.0, "tprevpos", prev_token, position);
  return b.finish();
}

}  // namespace shoprl
