#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shoprl/action.hpp"
#include "shoprl/context.hpp"
#include "shoprl/features.hpp"

namespace shoprl {

class IllegalSequence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum TypeToken : int { kTypeClick = 0, kTypeInput = 1, kTypeTerminate = 2 };
inline constexpr std::size_t kNumTypeTokens = 3;
inline constexpr std::size_t kMaxTextTokens = 8;

// Structured action tokens:
//   [type]                       for TERMINATE
//   [type, element]              for CLICK (index into clickables)
//   [type, element, w1..wk, END] for INPUT (index into input_fields, 1 <= k <= 8)
struct ActionTokenSeq {
  std::vector<int> tokens;

  friend bool operator==(const ActionTokenSeq&, const ActionTokenSeq&) = default;
};

// Closed query vocabulary; the END token id equals size().
class TextVocabulary {
 public:
  explicit TextVocabulary(std::vector<std::string> terms);

  std::size_t size() const { return terms_.size(); }
  int end_token() const { return static_cast<int>(terms_.size()); }
  std::optional<int> find(std::string_view term) const;
  const std::string& term(int id) const { return terms_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& terms() const { return terms_; }

 private:
  std::vector<std::string> terms_;
};

// Weights of the factorized policy stored in one flat buffer:
//   type block [3 x dim], element block [dim], text block [(|V|+1) x dim].
// The same layout doubles as a gradient.
class PolicyParams {
 public:
  PolicyParams() = default;
  PolicyParams(std::size_t feature_dim, std::size_t text_rows);

  static PolicyParams random(std::size_t feature_dim, std::size_t text_rows, double scale,
                             std::uint64_t seed);

  std::size_t feature_dim() const { return dim_; }
  std::size_t text_rows() const { return text_rows_; }

  std::span<double> type_row(std::size_t k);
  std::span<const double> type_row(std::size_t k) const;
  std::span<double> elem();
  std::span<const double> elem() const;
  std::span<double> text_row(std::size_t v);
  std::span<const double> text_row(std::size_t v) const;

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  void axpy(double a, const PolicyParams& x);
  void scale(double a);
  bool all_finite() const;
  // FNV-1a over the raw bytes; used to detect stale rollouts.
  std::uint64_t hash() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t text_rows_ = 0;
  std::vector<double> values_;
};

enum class FactorKind { kType, kElement, kText };

// One autoregressive decision: the logits over its options (-inf when
// masked), the chosen option, and the features needed for backprop.
struct Factor {
  FactorKind kind;
  std::vector<double> logits;
  int chosen = 0;
  FeatureVector shared;                            // type and text heads
  std::vector<const FeatureVector*> per_option;    // element head

  std::vector<double> probabilities() const;
  double log_prob() const;
};

struct SampledAction {
  ActionTokenSeq seq;
  std::vector<double> log_probs;  // at temperature 1
};

struct DecodedAction {
  Action action;
  std::string rationale;
};

class Policy {
 public:
  Policy(FeatureConfig features, TextVocabulary vocab);

  const FeatureConfig& feature_config() const { return features_; }
  const TextVocabulary& vocab() const { return vocab_; }

  PolicyParams zero_params() const;
  PolicyParams init_params(double scale, std::uint64_t seed) const;

  PromptFeatures featurize(const PromptContext& ctx, const CandidateSet& cands) const;

  // The factor sequence along `seq`; throws IllegalSequence when seq is
  // malformed or references a missing candidate.
  std::vector<Factor> unroll(const PolicyParams& params, const PromptFeatures& feats,
                             const ActionTokenSeq& seq) const;

  std::vector<double> log_prob(const PolicyParams& params, const PromptFeatures& feats,
                               const ActionTokenSeq& seq) const;
  std::vector<double> log_prob(const PolicyParams& params, const PromptContext& ctx,
                               const CandidateSet& cands, const ActionTokenSeq& seq) const;

  // Ancestral sampling; logits are divided by `temperature` for the draw only.
  SampledAction sample(const PolicyParams& params, const PromptFeatures& feats, double temperature,
                       std::uint64_t seed) const;
  SampledAction sample(const PolicyParams& params, const PromptContext& ctx,
                       const CandidateSet& cands, double temperature, std::uint64_t seed) const;

  // Argmax at every factor (lowest index on ties).
  ActionTokenSeq greedy(const PolicyParams& params, const PromptFeatures& feats) const;

  // Adds sum_o dlogits[o] * d(logit_o)/d(params) for one factor into grad.
  void backprop(const Factor& factor, std::span<const double> dlogits, PolicyParams& grad) const;

  // Gold tokens for an action on this page; nullopt when the target is not a
  // candidate or the text is not expressible in the vocabulary.
  std::optional<ActionTokenSeq> encode(const Action& action, const CandidateSet& cands) const;

  DecodedAction decode(const ActionTokenSeq& seq, const CandidateSet& cands,
                       const Persona* persona) const;

 private:
  std::vector<double> type_logits(const PolicyParams& params, const PromptFeatures& feats) const;

  FeatureConfig features_;
  TextVocabulary vocab_;
};

// Free-function forms mirroring the policy operations.
DecodedAction decode_to_action(const Policy& policy, const ActionTokenSeq& seq,
                               const CandidateSet& cands, const Persona* persona);

double log_sum_exp(std::span<const double> logits);

}  // namespace shoprl
