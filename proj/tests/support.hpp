#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shoprl/policy.hpp"
#include "shoprl/session.hpp"
#include "shoprl/trainer.hpp"

namespace shoprl::testing {

// Minimal page markup exposing the given interactables.
inline Observation page(std::vector<Interactable> items, const std::string& filler = "") {
  Observation obs;
  obs.html = "<html><body>" + filler;
  for (const auto& it : items) {
    obs.html += it.role == InteractableRole::kInputField ? "<input name=\"" + it.name + "\"/>"
                                                         : "<button name=\"" + it.name + "\"></button>";
  }
  obs.html += "</body></html>";
  obs.interactables = std::move(items);
  return obs;
}

inline Interactable clickable(std::string name) { return {std::move(name), InteractableRole::kClickable}; }
inline Interactable input_field(std::string name) { return {std::move(name), InteractableRole::kInputField}; }

// search_box -> review_link -> buy_now.
inline Session simple_session(std::string id = "s1", std::string user = "u1") {
  Session s{std::move(id), std::move(user), {}};
  s.steps.push_back({page({input_field("search_box"), clickable("search_button")}), std::nullopt,
                     Action::input("search_box", "red shoes")});
  s.steps.push_back({page({clickable("review_link"), clickable("product_link_1")}),
                     Rationale{"want reviews", RationaleProvenance::kHuman}, Action::click("review_link")});
  s.steps.push_back({page({clickable("buy_now"), clickable("nav_home")}), std::nullopt, Action::click("buy_now")});
  return s;
}

inline FeatureVector random_features(std::mt19937_64& rng, std::size_t dim, std::size_t nnz) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::uint32_t> idx(dim);
  for (std::size_t i = 0; i < dim; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(nnz, dim));
  std::sort(idx.begin(), idx.end());
  FeatureVector fv;
  for (const auto i : idx) fv.entries.emplace_back(i, normal(rng));
  return fv;
}

// A tiny policy with random features for gradient and property checks.
struct ToyProblem {
  Policy policy;
  PromptFeatures feats;
  CandidateSet cands;
};

inline ToyProblem make_toy(std::uint64_t seed, std::size_t dim = 12) {
  std::mt19937_64 rng(seed);
  FeatureConfig cfg;
  cfg.dim = dim;
  cfg.hash_seed = seed;
  ToyProblem toy{Policy(cfg, TextVocabulary({"red", "shoes", "cheap"})), {}, {}};
  toy.feats.context = random_features(rng, dim, dim / 2);
  const std::size_t n_click = 2 + rng() % 3;
  const std::size_t n_input = 1 + rng() % 2;
  for (std::size_t i = 0; i < n_click; ++i) {
    toy.feats.clickables.push_back(random_features(rng, dim, dim / 3));
    toy.cands.clickables.push_back("button_" + std::to_string(i));
  }
  for (std::size_t i = 0; i < n_input; ++i) {
    toy.feats.input_fields.push_back(random_features(rng, dim, dim / 3));
    toy.cands.input_fields.push_back("field_" + std::to_string(i));
  }
  return toy;
}

// Rollouts sampled from `old` with random standard-normal rewards.
inline RolloutGroup toy_group(const ToyProblem& toy, const PolicyParams& old, std::uint64_t seed,
                       std::size_t g = 6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RolloutGroup group;
  group.params_old_hash = old.hash();
  std::vector<double> rewards;
  for (std::size_t i = 0; i < g; ++i) {
    auto s = toy.policy.sample(old, toy.feats, 1.0, rng());
    rewards.push_back(normal(rng));
    group.samples.push_back({s.seq, s.log_probs, rewards.back()});
  }
  group.advantages = group_advantages(rewards, 1e-6);
  return group;
}

inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

// Central finite differences of f over every coordinate of params.
template <typename F>
std::vector<double> numeric_gradient(const PolicyParams& params, F&& f, double h = 1e-5) {
  PolicyParams p = params;
  auto flat = p.flat();
  std::vector<double> g(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double x = flat[i];
    flat[i] = x + h;
    const double up = f(p);
    flat[i] = x - h;
    const double down = f(p);
    flat[i] = x;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace shoprl::testing
