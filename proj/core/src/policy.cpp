#include "shoprl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "shoprl/rationale.hpp"

namespace shoprl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0) {
  double max = kNegInf;
  for (const double z : logits) max = std::max(max, z);
  std::vector<double> p(logits.size(), 0.0);
  if (max == kNegInf) return p;
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i] == kNegInf) continue;
    p[i] = std::exp((logits[i] - max) / temperature);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

int argmax(std::span<const double> logits) {
  int best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

int draw(std::span<const double> logits, double temperature, std::mt19937_64& rng) {
  const auto p = softmax(logits, temperature);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last_valid = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last_valid = static_cast<int>(i);
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_valid;
}

}  // namespace

double log_sum_exp(std::span<const double> logits) {
  double max = kNegInf;
  for (const double z : logits) max = std::max(max, z);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (const double z : logits) {
    if (z != kNegInf) sum += std::exp(z - max);
  }
  return max + std::log(sum);
}

std::vector<double> Factor::probabilities() const { return softmax(logits); }

double Factor::log_prob() const {
  return logits[static_cast<std::size_t>(chosen)] - log_sum_exp(logits);
}

TextVocabulary::TextVocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("text vocabulary must be non-empty");
}

std::optional<int> TextVocabulary::find(std::string_view term) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i] == term) return static_cast<int>(i);
  }
  return std::nullopt;
}

PolicyParams::PolicyParams(std::size_t feature_dim, std::size_t text_rows)
    : dim_(feature_dim),
      text_rows_(text_rows),
      values_((kNumTypeTokens + 1 + text_rows) * feature_dim, 0.0) {}

PolicyParams PolicyParams::random(std::size_t feature_dim, std::size_t text_rows, double scale,
                                  std::uint64_t seed) {
  PolicyParams p(feature_dim, text_rows);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& v : p.values_) v = normal(rng);
  return p;
}

std::span<double> PolicyParams::type_row(std::size_t k) {
  return std::span<double>(values_).subspan(k * dim_, dim_);
}
std::span<const double> PolicyParams::type_row(std::size_t k) const {
  return std::span<const double>(values_).subspan(k * dim_, dim_);
}
std::span<double> PolicyParams::elem() {
  return std::span<double>(values_).subspan(kNumTypeTokens * dim_, dim_);
}
std::span<const double> PolicyParams::elem() const {
  return std::span<const double>(values_).subspan(kNumTypeTokens * dim_, dim_);
}
std::span<double> PolicyParams::text_row(std::size_t v) {
  return std::span<double>(values_).subspan((kNumTypeTokens + 1 + v) * dim_, dim_);
}
std::span<const double> PolicyParams::text_row(std::size_t v) const {
  return std::span<const double>(values_).subspan((kNumTypeTokens + 1 + v) * dim_, dim_);
}

void PolicyParams::axpy(double a, const PolicyParams& x) {
  if (x.values_.size() != values_.size()) throw std::invalid_argument("parameter shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
}

void PolicyParams::scale(double a) {
  for (auto& v : values_) v *= a;
}

bool PolicyParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::uint64_t PolicyParams::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(&dim_, sizeof dim_);
  mix(&text_rows_, sizeof text_rows_);
  mix(values_.data(), values_.size() * sizeof(double));
  return h;
}

Policy::Policy(FeatureConfig features, TextVocabulary vocab)
    : features_(features), vocab_(std::move(vocab)) {}

PolicyParams Policy::zero_params() const { return PolicyParams(features_.dim, vocab_.size() + 1); }

PolicyParams Policy::init_params(double scale, std::uint64_t seed) const {
  return PolicyParams::random(features_.dim, vocab_.size() + 1, scale, seed);
}

PromptFeatures Policy::featurize(const PromptContext& ctx, const CandidateSet& cands) const {
  return extract_features(ctx, cands, features_);
}

std::vector<double> Policy::type_logits(const PolicyParams& params,
                                        const PromptFeatures& feats) const {
  std::vector<double> z(kNumTypeTokens);
  for (std::size_t k = 0; k < kNumTypeTokens; ++k) z[k] = feats.context.dot(params.type_row(k));
  if (feats.clickables.empty()) z[kTypeClick] = kNegInf;
  if (feats.input_fields.empty()) z[kTypeInput] = kNegInf;
  return z;
}

namespace {

Factor element_factor(const PolicyParams& params, const std::vector<FeatureVector>& options) {
  Factor f{FactorKind::kElement, {}, 0, {}, {}};
  f.logits.reserve(options.size());
  for (const auto& phi : options) {
    f.logits.push_back(phi.dot(params.elem()));
    f.per_option.push_back(&phi);
  }
  return f;
}

Factor text_factor(const PolicyParams& params, const FeatureVector& context, std::size_t position,
                   int prev, const FeatureConfig& cfg, std::size_t rows) {
  Factor f{FactorKind::kText, {}, 0, text_features(context, position, prev, cfg), {}};
  f.logits.resize(rows);
  const std::size_t end = rows - 1;
  for (std::size_t v = 0; v < rows; ++v) f.logits[v] = f.shared.dot(params.text_row(v));
  if (position == 0) f.logits[end] = kNegInf;
  if (position == kMaxTextTokens) {
    for (std::size_t v = 0; v < end; ++v) f.logits[v] = kNegInf;
  }
  return f;
}

}  // namespace

std::vector<Factor> Policy::unroll(const PolicyParams& params, const PromptFeatures& feats,
                                   const ActionTokenSeq& seq) const {
  const auto& t = seq.tokens;
  if (t.empty()) throw IllegalSequence("empty token sequence");
  std::vector<Factor> out;
  Factor type{FactorKind::kType, type_logits(params, feats), t[0], feats.context, {}};
  if (t[0] < 0 || t[0] >= static_cast<int>(kNumTypeTokens) ||
      type.logits[static_cast<std::size_t>(t[0])] == kNegInf) {
    throw IllegalSequence("type token " + std::to_string(t[0]) + " not available on this page");
  }
  out.push_back(std::move(type));

  if (t[0] == kTypeTerminate) {
    if (t.size() != 1) throw IllegalSequence("terminate takes no further tokens");
    return out;
  }
  if (t.size() < 2) throw IllegalSequence("missing element token");
  const auto& options = t[0] == kTypeClick ? feats.clickables : feats.input_fields;
  if (t[1] < 0 || static_cast<std::size_t>(t[1]) >= options.size()) {
    throw IllegalSequence("element index " + std::to_string(t[1]) + " outside candidate list");
  }
  Factor elem = element_factor(params, options);
  elem.chosen = t[1];
  out.push_back(std::move(elem));

  if (t[0] == kTypeClick) {
    if (t.size() != 2) throw IllegalSequence("click takes exactly one element token");
    return out;
  }

  const int end = vocab_.end_token();
  if (t.size() < 4) throw IllegalSequence("input needs at least one text token and END");
  if (t.size() > 2 + kMaxTextTokens + 1) throw IllegalSequence("input text longer than 8 tokens");
  int prev = -1;
  for (std::size_t i = 2; i < t.size(); ++i) {
    const std::size_t pos = i - 2;
    const bool last = i + 1 == t.size();
    if (t[i] < 0 || t[i] > end || (t[i] == end) != last) {
      throw IllegalSequence("malformed text token at position " + std::to_string(pos));
    }
    Factor f = text_factor(params, feats.context, pos, prev, features_, vocab_.size() + 1);
    f.chosen = t[i];
    out.push_back(std::move(f));
    prev = t[i];
  }
  return out;
}

std::vector<double> Policy::log_prob(const PolicyParams& params, const PromptFeatures& feats,
                                     const ActionTokenSeq& seq) const {
  std::vector<double> out;
  for (const auto& f : unroll(params, feats, seq)) out.push_back(f.log_prob());
  return out;
}

std::vector<double> Policy::log_prob(const PolicyParams& params, const PromptContext& ctx,
                                     const CandidateSet& cands, const ActionTokenSeq& seq) const {
  return log_prob(params, featurize(ctx, cands), seq);
}

SampledAction Policy::sample(const PolicyParams& params, const PromptFeatures& feats,
                             double temperature, std::uint64_t seed) const {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  std::mt19937_64 rng(seed);
  SampledAction out;
  auto take = [&](Factor&& f) {
    f.chosen = draw(f.logits, temperature, rng);
    out.seq.tokens.push_back(f.chosen);
    out.log_probs.push_back(f.log_prob());
    return f.chosen;
  };
  const int type = take(Factor{FactorKind::kType, type_logits(params, feats), 0, {}, {}});
  if (type == kTypeTerminate) return out;
  take(element_factor(params, type == kTypeClick ? feats.clickables : feats.input_fields));
  if (type == kTypeClick) return out;
  int prev = -1;
  for (std::size_t pos = 0; pos <= kMaxTextTokens; ++pos) {
    prev = take(text_factor(params, feats.context, pos, prev, features_, vocab_.size() + 1));
    if (prev == vocab_.end_token()) break;
  }
  return out;
}

SampledAction Policy::sample(const PolicyParams& params, const PromptContext& ctx,
                             const CandidateSet& cands, double temperature,
                             std::uint64_t seed) const {
  return sample(params, featurize(ctx, cands), temperature, seed);
}

ActionTokenSeq Policy::greedy(const PolicyParams& params, const PromptFeatures& feats) const {
  ActionTokenSeq seq;
  const int type = argmax(type_logits(params, feats));
  seq.tokens.push_back(type);
  if (type == kTypeTerminate) return seq;
  seq.tokens.push_back(
      argmax(element_factor(params, type == kTypeClick ? feats.clickables : feats.input_fields)
                 .logits));
  if (type == kTypeClick) return seq;
  int prev = -1;
  for (std::size_t pos = 0; pos <= kMaxTextTokens; ++pos) {
    prev = argmax(text_factor(params, feats.context, pos, prev, features_, vocab_.size() + 1).logits);
    seq.tokens.push_back(prev);
    if (prev == vocab_.end_token()) break;
  }
  return seq;
}

void Policy::backprop(const Factor& factor, std::span<const double> dlogits,
                      PolicyParams& grad) const {
  for (std::size_t o = 0; o < dlogits.size(); ++o) {
    const double d = dlogits[o];
    if (d == 0.0) continue;
    switch (factor.kind) {
      case FactorKind::kType: factor.shared.add_scaled_to(grad.type_row(o), d); break;
      case FactorKind::kElement: factor.per_option[o]->add_scaled_to(grad.elem(), d); break;
      case FactorKind::kText: factor.shared.add_scaled_to(grad.text_row(o), d); break;
    }
  }
}

std::optional<ActionTokenSeq> Policy::encode(const Action& action, const CandidateSet& cands) const {
  auto index_in = [](const std::vector<std::string>& list, const std::string& name) -> int {
    const auto it = std::find(list.begin(), list.end(), name);
    return it == list.end() ? -1 : static_cast<int>(it - list.begin());
  };
  ActionTokenSeq seq;
  switch (action.kind()) {
    case ActionKind::kTerminate:
      seq.tokens = {kTypeTerminate};
      return seq;
    case ActionKind::kClick: {
      const int idx = index_in(cands.clickables, action.element_name());
      if (idx < 0) return std::nullopt;
      seq.tokens = {kTypeClick, idx};
      return seq;
    }
    case ActionKind::kInput: {
      const int idx = index_in(cands.input_fields, action.element_name());
      if (idx < 0) return std::nullopt;
      seq.tokens = {kTypeInput, idx};
      std::istringstream words(action.text());
      std::string word;
      std::size_t n = 0;
      while (words >> word) {
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const auto id = vocab_.find(word);
        if (!id || ++n > kMaxTextTokens) return std::nullopt;
        seq.tokens.push_back(*id);
      }
      if (n == 0) return std::nullopt;
      seq.tokens.push_back(vocab_.end_token());
      return seq;
    }
  }
  return std::nullopt;
}

DecodedAction Policy::decode(const ActionTokenSeq& seq, const CandidateSet& cands,
                             const Persona* persona) const {
  const auto& t = seq.tokens;
  if (t.empty()) throw IllegalSequence("empty token sequence");
  auto finish = [&](Action a) {
    std::string rationale = templated_rationale(a, persona);
    return DecodedAction{std::move(a), std::move(rationale)};
  };
  switch (t[0]) {
    case kTypeTerminate:
      if (t.size() != 1) throw IllegalSequence("terminate takes no further tokens");
      return finish(Action::terminate());
    case kTypeClick:
      if (t.size() != 2 || t[1] < 0 || static_cast<std::size_t>(t[1]) >= cands.clickables.size()) {
        throw IllegalSequence("click needs one valid element token");
      }
      return finish(Action::click(cands.clickables[static_cast<std::size_t>(t[1])]));
    case kTypeInput: {
      if (t.size() < 4 || t[1] < 0 || static_cast<std::size_t>(t[1]) >= cands.input_fields.size()) {
        throw IllegalSequence("input needs a valid element token and text");
      }
      if (t.back() != vocab_.end_token()) throw IllegalSequence("input text must end with END");
      std::string text;
      for (std::size_t i = 2; i + 1 < t.size(); ++i) {
        if (t[i] < 0 || t[i] >= vocab_.end_token()) throw IllegalSequence("bad text token");
        if (!text.empty()) text += ' ';
        text += vocab_.term(t[i]);
      }
      return finish(Action::input(cands.input_fields[static_cast<std::size_t>(t[1])], text));
    }
    default: throw IllegalSequence("unknown type token " + std::to_string(t[0]));
  }
}

DecodedAction decode_to_action(const Policy& policy, const ActionTokenSeq& seq,
                               const CandidateSet& cands, const Persona* persona) {
  return policy.decode(seq, cands, persona);
}

}  // namespace shoprl
