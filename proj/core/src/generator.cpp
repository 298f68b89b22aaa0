#include "shoprl/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "shoprl/checkpoint.hpp"

namespace shoprl {
namespace {

constexpr std::size_t kMaxSessionLen = 64;
constexpr double kFirstInputRate = 0.8;
constexpr double kSearchAfterInputRate = 0.9;
constexpr double kSearchBoxRate = 0.6;
constexpr double kTiltGain = 3.0;
constexpr double kChoiceGain = 10.0;
constexpr double kRepeatBonus = 1.5;
constexpr double kTransitionBonus = 2.0;
constexpr double kLengthSlope = 0.35;
constexpr double kMarginalTolerance = 2e-3;

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

template <typename Weights>
std::size_t categorical(Rng& rng, const Weights& w) {
  const double total = std::accumulate(std::begin(w), std::end(w), 0.0);
  double u = uniform01(rng) * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < std::size(w); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last;
}

std::vector<double> softmax_weights(const std::vector<double>& scores, double gain) {
  std::vector<double> w(scores.size());
  const double hi = *std::max_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < scores.size(); ++i) w[i] = std::exp(gain * (scores[i] - hi));
  return w;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Category {
  const char* noun;
  const char* brand;
  std::array<const char*, 4> extras;
};

const std::array<Category, 8>& categories() {
  static const std::array<Category, 8> cats = {{
      {"earbuds", "sony", {"case", "charger", "cable", "black"}},
      {"laptop", "dell", {"stand", "sale", "pro", "max"}},
      {"coffee", "lavazza", {"refill", "pods", "beans", "pack"}},
      {"sneakers", "nike", {"laces", "socks", "men", "women"}},
      {"moisturizer", "cerave", {"serum", "cleanser", "jar", "set"}},
      {"blender", "ninja", {"bottle", "gift", "plus", "white"}},
      {"backpack", "osprey", {"strap", "kids", "small", "red"}},
      {"camera", "canon", {"tripod", "lens", "ultra", "blue"}},
  }};
  return cats;
}

const std::array<const char*, 16>& modifiers() {
  static const std::array<const char*, 16> m = {
      "cheap", "best",     "wireless", "portable", "organic", "waterproof", "lightweight", "premium",
      "discount", "rated", "mini",     "large",    "new",     "durable",    "compact",     "quiet"};
  return m;
}

// Preference weights for each modifier: price, quality, neutral.
double modifier_score(std::string_view m, const OracleUser& u) {
  const double p = u.pref("price_sensitivity");
  const double r = u.pref("review_reliance");
  if (m == "cheap" || m == "discount") return p;
  if (m == "premium" || m == "best") return 1.0 - p;
  if (m == "rated") return r;
  return 0.25;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {
      "this",   "item",    "ships",   "fast",     "with",     "free",    "returns",  "customers",
      "love",   "the",     "quality", "and",      "value",    "of",      "our",      "latest",
      "deal",   "today",   "only",    "limited",  "stock",    "arrives", "in",       "two",
      "days",   "made",    "from",    "recycled", "material", "trusted", "by",       "thousands",
      "shop",   "now",     "save",    "more",     "when",     "you",     "bundle",   "easy",
      "setup",  "warranty", "included", "top",    "pick",     "for",     "everyday", "use"};
  return w;
}

// Named index into kPreferenceKeys order.
enum Trait { kBrand, kPatience, kPrice, kReview };

// Exponential tilt coefficients per subtype over the four traits.
std::array<double, 4> tilt_coefficients(ClickSubtype s) {
  switch (s) {
    case ClickSubtype::kFilter: return {0.0, 0.5, 1.5, 0.0};
    case ClickSubtype::kReview: return {0.0, 0.5, 0.0, 2.0};
    case ClickSubtype::kProductLink: return {1.0, 0.0, 0.0, 0.0};
    case ClickSubtype::kProductOption: return {0.5, 0.0, -0.5, 0.0};
    case ClickSubtype::kSearch: return {-1.0, 0.5, 0.0, 0.0};
    case ClickSubtype::kPageRelated: return {0.0, 1.5, 0.0, 0.0};
    case ClickSubtype::kSuggestedTerm: return {-0.5, -1.0, 0.0, 0.0};
    case ClickSubtype::kNavBar: return {0.0, -0.5, 0.0, 0.0};
    case ClickSubtype::kQuantity: return {0.0, 0.0, -1.0, 0.0};
    case ClickSubtype::kCartSideBar: return {0.0, -0.5, 0.5, 0.0};
    case ClickSubtype::kCartPageSelect: return {0.0, 0.0, 0.5, 0.0};
    default: return {0.0, 0.0, 0.0, 0.0};
  }
}

bool is_transition(ClickSubtype from, ClickSubtype to) {
  if (from == ClickSubtype::kProductLink) {
    return to == ClickSubtype::kProductOption || to == ClickSubtype::kQuantity ||
           to == ClickSubtype::kReview;
  }
  if (from == ClickSubtype::kFilter) return to == ClickSubtype::kProductLink;
  if (from == ClickSubtype::kSuggestedTerm) return to == ClickSubtype::kProductLink;
  return false;
}

// Persona affinity of each element variant, aligned with element_names().
std::vector<double> variant_scores(ClickSubtype s, const OracleUser& u) {
  const double b = u.pref("brand_loyalty");
  const double t = u.pref("patience");
  const double p = u.pref("price_sensitivity");
  const double r = u.pref("review_reliance");
  switch (s) {
    case ClickSubtype::kProductLink: return {p, 1.0 - p, b, r};
    case ClickSubtype::kProductOption: return {t, 1.0 - t, p, b};
    case ClickSubtype::kFilter: return {p, b, 1.0 - t, r};
    case ClickSubtype::kReview: return {r, 1.0 - r, t};
    case ClickSubtype::kPurchase: return {1.0 - t, t, b};
    case ClickSubtype::kNavBar: return {0.0, p, 0.0, 0.0};
    default: return std::vector<double>(element_names(s).size(), 0.0);
  }
}

std::string label_of(const std::string& name) {
  std::string out = name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

struct Page {
  std::vector<Interactable> elements;
};

class SessionBuilder {
 public:
  SessionBuilder(const GeneratorSpec& spec, const OracleUser& user, Rng& rng)
      : spec_(spec), user_(user), rng_(rng) {}

  Observation render(std::vector<Interactable> elements, const std::string& noun) {
    // Fisher-Yates with our own draws.
    for (std::size_t i = elements.size(); i > 1; --i) {
      std::swap(elements[i - 1], elements[static_cast<std::size_t>(rng_() % i)]);
    }
    std::ostringstream html;
    html << "<html><body>\n<h1>" << noun << " results</h1>\n";
    const auto& words = filler_words();
    for (const auto& e : elements) {
      const std::size_t n = 14 + static_cast<std::size_t>(rng_() % 14);
      html << "<p>";
      for (std::size_t k = 0; k < n; ++k) {
        html << (k == 0 ? "" : " ") << (k % 9 == 4 ? noun : words[rng_() % words.size()]);
      }
      html << "</p>\n";
      if (e.role == InteractableRole::kInputField) {
        html << "<input type=\"text\" name=\"" << e.name << "\" placeholder=\"search\"/>\n";
      } else {
        html << "<button name=\"" << e.name << "\">" << label_of(e.name) << "</button>\n";
      }
    }
    html << "</body></html>";
    return Observation{html.str(), std::move(elements)};
  }

  // Gold subtype variants, optional search widgets and 4..7 distractor subtypes.
  std::vector<Interactable> page_elements(std::optional<ClickSubtype> gold, bool with_purchase,
                                          bool with_search_box) {
    std::set<ClickSubtype> chosen;
    if (gold) chosen.insert(*gold);
    if (with_purchase) chosen.insert(ClickSubtype::kPurchase);
    if (with_search_box) chosen.insert(ClickSubtype::kSearch);
    std::vector<ClickSubtype> pool;
    for (const auto s : kAllClickSubtypes) {
      if (s != ClickSubtype::kPurchase && !chosen.contains(s)) pool.push_back(s);
    }
    const std::size_t k = 4 + static_cast<std::size_t>(rng_() % 4);
    for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
      const std::size_t j = static_cast<std::size_t>(rng_() % pool.size());
      chosen.insert(pool[j]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    std::vector<Interactable> out;
    for (const auto s : kAllClickSubtypes) {
      if (!chosen.contains(s)) continue;
      for (const auto& name : element_names(s)) out.push_back({name, InteractableRole::kClickable});
    }
    if (with_search_box) out.push_back({"search_box", InteractableRole::kInputField});
    return out;
  }

  std::string choose_variant(ClickSubtype s) {
    const auto& names = element_names(s);
    const auto w = softmax_weights(variant_scores(s, user_), kChoiceGain * spec_.persona_effect_strength);
    return names[categorical(rng_, w)];
  }

  std::string first_query(const Category& cat) {
    const double s = spec_.persona_effect_strength;
    const double brand_p = 0.5 + s * (user_.pref("brand_loyalty") - 0.5);
    if (bernoulli(rng_, brand_p)) return std::string(cat.brand) + " " + cat.noun;
    std::vector<double> scores;
    for (const auto* m : modifiers()) scores.push_back(modifier_score(m, user_));
    const auto w = softmax_weights(scores, kChoiceGain * s);
    return std::string(modifiers()[categorical(rng_, w)]) + " " + cat.noun;
  }

  std::string refine_query(const Category& cat) {
    return std::string(cat.noun) + " " + cat.extras[rng_() % cat.extras.size()];
  }

 private:
  const GeneratorSpec& spec_;
  const OracleUser& user_;
  Rng& rng_;
};

std::string human_rationale(const Action& action, Rng& rng) {
  if (action.is_terminate()) {
    return rng() % 2 == 0 ? "not convinced by any of these, leaving for now"
                          : "none of this is what i wanted";
  }
  if (action.is_input()) return "let me look up " + action.text();
  static const std::array<const char*, 3> forms = {"going with the %s here",
                                                   "the %s looks right for me",
                                                   "checking the %s before deciding"};
  char buf[256];
  std::snprintf(buf, sizeof buf, forms[rng() % forms.size()], label_of(action.element_name()).c_str());
  return buf;
}

struct Calibration {
  double first_input = 0.0;
  double mid_input = 0.0;
  double terminate_offset = 0.0;
};

Calibration calibrate(const GeneratorSpec& spec, const std::vector<OracleUser>& users,
                      const std::vector<std::size_t>& session_user) {
  const double n = static_cast<double>(session_user.size());
  double len = 0.0;
  for (const auto u : session_user) len += users[u].expected_length();
  len /= n;

  Calibration c;
  const double inputs = spec.action_type_marginals.input * len;
  c.first_input = std::min(kFirstInputRate, inputs);
  const double mid = inputs - c.first_input;
  const double slots = std::max(len - 2.0, 1e-9);
  const double eligible =
      slots - kSearchAfterInputRate * c.first_input - kSearchAfterInputRate * mid * (slots - 1.0) / slots;
  c.mid_input = eligible > 0.0 ? std::clamp(mid / eligible, 0.0, 1.0) : 0.0;

  const double target = std::clamp(spec.action_type_marginals.terminate * len, 1e-9, 1.0 - 1e-9);
  auto mean_q = [&](double offset) {
    double q = 0.0;
    for (const auto u : session_user) q += sigmoid(offset + users[u].termination_logit());
    return q / n;
  };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid_point = 0.5 * (lo + hi);
    (mean_q(mid_point) < target ? lo : hi) = mid_point;
  }
  c.terminate_offset = 0.5 * (lo + hi);
  return c;
}

Session generate_session(const GeneratorSpec& spec, const OracleUser& user, const Calibration& cal,
                         std::string session_id, Rng& rng) {
  SessionBuilder b(spec, user, rng);
  const double s = spec.persona_effect_strength;
  Session session;
  session.session_id = std::move(session_id);
  session.user_id = user.persona().user_id;

  const auto& cats = categories();
  std::size_t goal = rng() % cats.size();
  const auto interest = user.persona().demographics.find("interest");
  if (interest != user.persona().demographics.end() && bernoulli(rng, s)) {
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (interest->second == cats[i].noun) goal = i;
    }
  }
  const Category& cat = cats[goal];

  const double extra = std::max(user.expected_length() - 2.0, 0.0);
  std::size_t n = 2;
  if (extra > 0.0) n += static_cast<std::size_t>(std::poisson_distribution<int>(extra)(rng));
  n = std::min(n, kMaxSessionLen);
  const bool terminate_end = bernoulli(rng, sigmoid(cal.terminate_offset + user.termination_logit()));

  HistorySummary hist;
  for (std::size_t t = 0; t < n; ++t) {
    hist.step_index = t;
    const bool terminal = t + 1 == n;
    std::optional<Action> action;
    std::vector<Interactable> elements;
    if (terminal) {
      elements = b.page_elements(std::nullopt, true, bernoulli(rng, kSearchBoxRate));
      action = terminate_end ? Action::terminate() : Action::click(b.choose_variant(ClickSubtype::kPurchase));
    } else if (t == 0 && bernoulli(rng, cal.first_input)) {
      elements = b.page_elements(std::nullopt, false, true);
      action = Action::input("search_box", b.first_query(cat));
    } else if (hist.last_was_input && bernoulli(rng, kSearchAfterInputRate)) {
      elements = b.page_elements(ClickSubtype::kSearch, false, true);
      action = Action::click("search_button");
    } else if (t > 0 && !hist.last_was_input && bernoulli(rng, cal.mid_input)) {
      elements = b.page_elements(std::nullopt, false, true);
      action = Action::input("search_box", b.refine_query(cat));
    } else {
      const auto dist = user.subtype_distribution(hist);
      const auto sub = kAllClickSubtypes[categorical(rng, dist)];
      const bool box = sub == ClickSubtype::kSearch || bernoulli(rng, kSearchBoxRate);
      elements = b.page_elements(sub, false, box);
      action = Action::click(b.choose_variant(sub));
    }

    Step step{b.render(std::move(elements), cat.noun), std::nullopt, *action};
    if (bernoulli(rng, spec.human_rationale_rate)) {
      step.rationale = Rationale{human_rationale(*action, rng), RationaleProvenance::kHuman};
    }
    hist.last_was_input = action->is_input();
    if (action->is_click()) hist.last_click = classify_click_subtype(action->element_name());
    session.steps.push_back(std::move(step));
  }
  return session;
}

}  // namespace

std::array<double, kNumClickSubtypes> GeneratorSpec::default_subtype_prior() {
  std::array<double, kNumClickSubtypes> counts = {1052, 763, 700, 537, 449, 321, 283,
                                                   198,  191, 182, 145, 139, 91};
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  for (auto& c : counts) c /= total;
  return counts;
}

void GeneratorSpec::validate() const {
  if (n_users == 0) throw InvalidGeneratorSpec("n_users must be positive");
  if (n_sessions == 0) throw InvalidGeneratorSpec("n_sessions must be positive");
  if (!(mean_session_len >= 2.0) || mean_session_len > static_cast<double>(kMaxSessionLen) / 2) {
    throw InvalidGeneratorSpec("mean_session_len must be in [2, 32]");
  }
  const auto& m = action_type_marginals;
  for (const double v : {m.click, m.input, m.terminate}) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidGeneratorSpec("action_type_marginals must be in [0, 1]");
  }
  // Published marginals are rounded to three decimals and sum to 1.001.
  if (std::abs(m.click + m.input + m.terminate - 1.0) > kMarginalTolerance) {
    throw InvalidGeneratorSpec("action_type_marginals must sum to 1");
  }
  if (m.terminate * mean_session_len >= 1.0) {
    throw InvalidGeneratorSpec("terminate marginal too large for the mean session length");
  }
  if (m.input * mean_session_len > mean_session_len / 2.0) {
    throw InvalidGeneratorSpec("input marginal too large");
  }
  double sum = 0.0;
  for (const double p : subtype_prior) {
    if (!(p >= 0.0)) throw InvalidGeneratorSpec("subtype_prior entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw InvalidGeneratorSpec("subtype_prior must sum to 1");
  if (subtype_prior[index_of(ClickSubtype::kPurchase)] >= 1.0 - 1e-12) {
    throw InvalidGeneratorSpec("subtype_prior needs mass outside purchase");
  }
  if (!(persona_effect_strength >= 0.0 && persona_effect_strength <= 1.0)) {
    throw InvalidGeneratorSpec("persona_effect_strength must be in [0, 1]");
  }
  if (!(human_rationale_rate >= 0.0 && human_rationale_rate <= 1.0)) {
    throw InvalidGeneratorSpec("human_rationale_rate must be in [0, 1]");
  }
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys = {
      "n_users",           "n_sessions",           "mean_session_len",
      "action_type_marginals", "subtype_prior",   "persona_effect_strength",
      "human_rationale_rate",  "seed"};
  if (!j.is_object()) throw InvalidGeneratorSpec("generator spec must be an object");
  for (const auto& [k, _] : j.items()) {
    if (!keys.contains(k)) throw InvalidGeneratorSpec("unknown generator key '" + k + "'");
  }
  GeneratorSpec s;
  try {
    if (j.contains("n_users")) s.n_users = j.at("n_users").get<std::size_t>();
    if (j.contains("n_sessions")) s.n_sessions = j.at("n_sessions").get<std::size_t>();
    if (j.contains("mean_session_len")) s.mean_session_len = j.at("mean_session_len").get<double>();
    if (j.contains("action_type_marginals")) {
      const auto& m = j.at("action_type_marginals");
      for (const auto& [k, _] : m.items()) {
        if (k != "click" && k != "input" && k != "terminate") {
          throw InvalidGeneratorSpec("unknown marginal '" + k + "'");
        }
      }
      s.action_type_marginals = {m.at("click").get<double>(), m.at("input").get<double>(),
                                 m.at("terminate").get<double>()};
    }
    if (j.contains("subtype_prior")) {
      const auto& p = j.at("subtype_prior");
      if (!p.is_object() || p.size() != kNumClickSubtypes) {
        throw InvalidGeneratorSpec("subtype_prior must list all 13 subtypes");
      }
      for (const auto& [k, v] : p.items()) {
        const auto sub = click_subtype_from_string(k);
        if (!sub) throw InvalidGeneratorSpec("unknown click subtype '" + k + "'");
        s.subtype_prior[index_of(*sub)] = v.get<double>();
      }
    }
    if (j.contains("persona_effect_strength")) {
      s.persona_effect_strength = j.at("persona_effect_strength").get<double>();
    }
    if (j.contains("human_rationale_rate")) s.human_rationale_rate = j.at("human_rationale_rate").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidGeneratorSpec(std::string("generator spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::ordered_json GeneratorSpec::to_json() const {
  nlohmann::ordered_json prior;
  for (const auto s : kAllClickSubtypes) prior[std::string(to_string(s))] = subtype_prior[index_of(s)];
  return {{"n_users", n_users},
          {"n_sessions", n_sessions},
          {"mean_session_len", mean_session_len},
          {"action_type_marginals",
           {{"click", action_type_marginals.click},
            {"input", action_type_marginals.input},
            {"terminate", action_type_marginals.terminate}}},
          {"subtype_prior", prior},
          {"persona_effect_strength", persona_effect_strength},
          {"human_rationale_rate", human_rationale_rate},
          {"seed", seed}};
}

std::string GeneratorSpec::hash() const { return hex_digest(to_json().dump()); }

OracleUser::OracleUser(Persona persona, const GeneratorSpec& spec)
    : persona_(std::move(persona)), spec_(&spec) {}

double OracleUser::pref(const char* key) const {
  const auto it = persona_.shopping_prefs.find(key);
  return it == persona_.shopping_prefs.end() ? 0.5 : it->second;
}

std::array<double, kNumClickSubtypes> OracleUser::subtype_distribution(
    const HistorySummary& history) const {
  const double s = spec_->persona_effect_strength;
  std::array<double, 4> centered{};
  for (std::size_t k = 0; k < kPreferenceKeys.size(); ++k) centered[k] = 2.0 * pref(kPreferenceKeys[k]) - 1.0;

  std::array<double, kNumClickSubtypes> logits{};
  double hi = -INFINITY;
  for (const auto sub : kAllClickSubtypes) {
    const auto i = index_of(sub);
    const double prior = spec_->subtype_prior[i];
    if (sub == ClickSubtype::kPurchase || prior <= 0.0) {
      logits[i] = -INFINITY;
      continue;
    }
    double z = std::log(prior);
    const auto c = tilt_coefficients(sub);
    for (std::size_t k = 0; k < 4; ++k) z += kTiltGain * s * c[k] * centered[k];
    if (history.last_click) {
      if (*history.last_click == sub) z += kRepeatBonus;
      if (is_transition(*history.last_click, sub)) z += kTransitionBonus;
    }
    logits[i] = z;
    hi = std::max(hi, z);
  }
  std::array<double, kNumClickSubtypes> p{};
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::isfinite(logits[i]) ? std::exp(logits[i] - hi) : 0.0;
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

double OracleUser::termination_logit() const {
  const double s = spec_->persona_effect_strength;
  return s * (4.0 * (2.0 * pref("price_sensitivity") - 1.0) - 2.0 * (2.0 * pref("brand_loyalty") - 1.0));
}

double OracleUser::expected_length() const {
  const double s = spec_->persona_effect_strength;
  return spec_->mean_session_len * (1.0 + kLengthSlope * s * (2.0 * pref("patience") - 1.0));
}

std::vector<Persona> generate_personas(const GeneratorSpec& spec) {
  static const std::array<const char*, 5> ages = {"18-24", "25-34", "35-44", "45-54", "55+"};
  static const std::array<const char*, 3> incomes = {"low", "middle", "high"};
  static const std::array<const char*, 4> styles = {"decisive", "deliberate", "curious", "frugal"};
  std::vector<Persona> out;
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    Rng rng(derive_seed(spec.seed, 1, u));
    Persona p;
    char id[32];
    std::snprintf(id, sizeof id, "u%03zu", u);
    p.user_id = id;
    for (const auto* key : kPreferenceKeys) {
      p.shopping_prefs[key] = std::round(uniform01(rng) * 100.0) / 100.0;
    }
    p.demographics["age_group"] = ages[rng() % ages.size()];
    p.demographics["income"] = incomes[rng() % incomes.size()];
    p.demographics["interest"] = categories()[rng() % categories().size()].noun;
    p.personality["style"] = styles[rng() % styles.size()];
    out.push_back(std::move(p));
  }
  return out;
}

Dataset generate_dataset(const GeneratorSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.personas = generate_personas(spec);
  std::vector<OracleUser> users;
  for (const auto& p : ds.personas) users.emplace_back(p, spec);

  Rng assign(derive_seed(spec.seed, 2, 0));
  std::vector<std::size_t> session_user(spec.n_sessions);
  for (auto& u : session_user) u = static_cast<std::size_t>(assign() % spec.n_users);
  const auto cal = calibrate(spec, users, session_user);

  for (std::size_t i = 0; i < spec.n_sessions; ++i) {
    Rng rng(derive_seed(spec.seed, 3, i));
    char id[32];
    std::snprintf(id, sizeof id, "s%04zu", i);
    ds.sessions.push_back(generate_session(spec, users[session_user[i]], cal, id, rng));
  }
  return ds;
}

std::vector<std::string> query_vocabulary() {
  std::vector<std::string> v;
  for (const auto& c : categories()) v.emplace_back(c.noun);
  for (const auto& c : categories()) v.emplace_back(c.brand);
  for (const auto* m : modifiers()) v.emplace_back(m);
  for (const auto& c : categories()) {
    for (const auto* e : c.extras) v.emplace_back(e);
  }
  return v;
}

const std::vector<std::string>& element_names(ClickSubtype subtype) {
  static const std::map<ClickSubtype, std::vector<std::string>> names = {
      {ClickSubtype::kReview, {"see_all_reviews", "star_rating_summary", "top_review_link"}},
      {ClickSubtype::kSearch, {"search_button"}},
      {ClickSubtype::kProductOption, {"size_option", "color_option", "variant_bundle", "option_style"}},
      {ClickSubtype::kProductLink,
       {"product_budget_pick", "product_premium_pick", "product_brand_pick", "product_bestseller"}},
      {ClickSubtype::kOther, {"help_link", "share_button", "gift_wrap_toggle", "ad_banner"}},
      {ClickSubtype::kPurchase, {"buy_now", "proceed_to_checkout", "place_order"}},
      {ClickSubtype::kNavBar, {"nav_home", "nav_deals", "menu_button", "logo_home"}},
      {ClickSubtype::kPageRelated, {"next_page", "prev_page"}},
      {ClickSubtype::kQuantity, {"quantity_dropdown", "qty_plus"}},
      {ClickSubtype::kSuggestedTerm, {"suggested_term_a", "suggested_term_b", "suggested_term_c"}},
      {ClickSubtype::kCartSideBar, {"cart_side_view", "cart_side_close"}},
      {ClickSubtype::kCartPageSelect, {"cart_select_all", "cart_item_remove"}},
      {ClickSubtype::kFilter, {"filter_price", "filter_brand", "filter_prime", "sort_newest"}},
  };
  return names.at(subtype);
}

void export_dataset(const Dataset& dataset, const GeneratorSpec& spec,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream sessions, personas;
  write_sessions_jsonl(sessions, dataset.sessions);
  write_personas_jsonl(personas, dataset.personas);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << body;
  };
  write("sessions.jsonl", sessions.str());
  write("personas.jsonl", personas.str());
  nlohmann::ordered_json manifest = {
      {"format", "shoprl-dataset"},
      {"generator_spec", spec.to_json()},
      {"spec_hash", spec.hash()},
      {"n_users", dataset.personas.size()},
      {"n_sessions", dataset.sessions.size()},
      {"n_steps", dataset.num_steps()},
      {"files",
       {{"sessions.jsonl", hex_digest(sessions.str())}, {"personas.jsonl", hex_digest(personas.str())}}}};
  write("manifest.json", manifest.dump(2) + "\n");
}

}  // namespace shoprl
