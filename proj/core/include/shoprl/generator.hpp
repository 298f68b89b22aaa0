#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoprl/click_subtype.hpp"
#include "shoprl/dataset.hpp"

namespace shoprl {

class InvalidGeneratorSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TypeMarginals {
  double click = 0.863;
  double input = 0.102;
  double terminate = 0.036;
};

struct GeneratorSpec {
  std::size_t n_users = 49;
  std::size_t n_sessions = 527;
  double mean_session_len = 11.11;
  TypeMarginals action_type_marginals;
  // Indexed by ClickSubtype; defaults to the corpus subtype frequencies.
  std::array<double, kNumClickSubtypes> subtype_prior = default_subtype_prior();
  double persona_effect_strength = 0.7;
  // Share of steps carrying a human-written rationale.
  double human_rationale_rate = 207.0 / 5856.0;
  std::uint64_t seed = 0;

  static std::array<double, kNumClickSubtypes> default_subtype_prior();

  // Throws InvalidGeneratorSpec.
  void validate() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  // Hex digest of the canonical JSON form.
  std::string hash() const;
};

inline constexpr std::array<const char*, 4> kPreferenceKeys = {
    "brand_loyalty", "patience", "price_sensitivity", "review_reliance"};

// What the oracle user conditions on besides its persona.
struct HistorySummary {
  std::optional<ClickSubtype> last_click;
  bool last_was_input = false;
  std::size_t step_index = 0;
};

// Ground-truth user model. Click subtypes follow the prior exponentially
// tilted by the persona's preference scalars (scaled by the effect strength)
// plus a persona-independent momentum term on the recent history.
class OracleUser {
 public:
  OracleUser(Persona persona, const GeneratorSpec& spec);

  const Persona& persona() const { return persona_; }
  double pref(const char* key) const;

  // Distribution over the 13 subtypes for a non-terminal click; purchase has
  // zero mass.
  std::array<double, kNumClickSubtypes> subtype_distribution(const HistorySummary& history) const;

  // Probability that a session ends with terminate rather than a purchase,
  // before the population-level calibration offset.
  double termination_logit() const;

  double expected_length() const;

 private:
  Persona persona_;
  const GeneratorSpec* spec_;
};

// Personas for users u000..; preferences are rounded to two decimals.
std::vector<Persona> generate_personas(const GeneratorSpec& spec);

// Sessions passing validate_session plus the persona sidecar; deterministic
// given spec.seed.
Dataset generate_dataset(const GeneratorSpec& spec);

// The query vocabulary the generator draws input text from.
std::vector<std::string> query_vocabulary();

// Element names the generator may emit for a click subtype.
const std::vector<std::string>& element_names(ClickSubtype subtype);

// Writes sessions.jsonl, personas.jsonl and manifest.json into dir.
void export_dataset(const Dataset& dataset, const GeneratorSpec& spec,
                    const std::filesystem::path& dir);

}  // namespace shoprl
