#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shoprl/context.hpp"
#include "shoprl/session.hpp"

namespace shoprl {

// Candidate targets on the current page. Terminate is always available.
struct CandidateSet {
  std::vector<std::string> clickables;
  std::vector<std::string> input_fields;
  bool terminate_allowed = true;
};

CandidateSet extract_candidates(const Observation& obs);

// Sparse view of a dense feature_dim vector; indices sorted and unique.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double dot(std::span<const double> weights) const;
  void add_scaled_to(std::span<double> target, double scale) const;
  std::vector<double> to_dense(std::size_t dim) const;
};

struct FeatureConfig {
  std::size_t dim = 512;
  std::uint64_t hash_seed = 0x9e3779b97f4a7c15ULL;
  // When false, persona-derived features are never emitted.
  bool use_persona = true;
  // Scale every feature vector to unit L2 norm.
  bool normalize = true;
};

// Features of one prompt: a context vector shared by the type and text
// heads, and one vector per candidate for the element head.
struct PromptFeatures {
  FeatureVector context;
  std::vector<FeatureVector> clickables;
  std::vector<FeatureVector> input_fields;
};

PromptFeatures extract_features(const PromptContext& ctx, const CandidateSet& cands,
                                 const FeatureConfig& cfg);

// Context features extended with the text position and previous token.
FeatureVector text_features(const FeatureVector& context, std::size_t position, int prev_token,
                            const FeatureConfig& cfg);

// Tokens of an element name split on '_' and '-', numeric parts dropped.
std::vector<std::string> name_tokens(std::string_view name);

}  // namespace shoprl
