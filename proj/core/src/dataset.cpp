#include "shoprl/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace shoprl {

using nlohmann::json;

const Persona* Dataset::persona_for(const std::string& user_id) const {
  for (const auto& p : personas) {
    if (p.user_id == user_id) return &p;
  }
  return nullptr;
}

std::size_t Dataset::num_steps() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.steps.size();
  return n;
}

json session_to_json(const Session& session) {
  json steps = json::array();
  for (const auto& step : session.steps) {
    json interactables = json::array();
    for (const auto& item : step.observation.interactables) {
      interactables.push_back(
          {{"name", item.name},
           {"role", item.role == InteractableRole::kClickable ? "clickable" : "input_field"}});
    }
    json s = {{"html", step.observation.html},
              {"interactables", std::move(interactables)},
              {"action", action_to_json(step.action)}};
    if (step.rationale) {
      s["rationale"] = step.rationale->text;
      if (step.rationale->provenance == RationaleProvenance::kAugmented) {
        s["rationale_provenance"] = "augmented";
      }
    }
    steps.push_back(std::move(s));
  }
  return {{"session_id", session.session_id},
          {"user_id", session.user_id},
          {"steps", std::move(steps)}};
}

Session session_from_json(const json& j) {
  Session session;
  session.session_id = j.at("session_id").get<std::string>();
  session.user_id = j.at("user_id").get<std::string>();
  for (const auto& s : j.at("steps")) {
    Observation obs;
    obs.html = s.at("html").get<std::string>();
    for (const auto& item : s.at("interactables")) {
      const auto role = item.at("role").get<std::string>();
      InteractableRole r;
      if (role == "clickable") {
        r = InteractableRole::kClickable;
      } else if (role == "input_field") {
        r = InteractableRole::kInputField;
      } else {
        throw std::invalid_argument("unknown interactable role '" + role + "'");
      }
      obs.interactables.push_back({item.at("name").get<std::string>(), r});
    }
    std::optional<Rationale> rationale;
    if (s.contains("rationale") && !s["rationale"].is_null()) {
      auto provenance = RationaleProvenance::kHuman;
      if (s.contains("rationale_provenance")) {
        const auto p = s["rationale_provenance"].get<std::string>();
        if (p == "augmented") {
          provenance = RationaleProvenance::kAugmented;
        } else if (p != "human") {
          throw std::invalid_argument("unknown rationale provenance '" + p + "'");
        }
      }
      rationale = Rationale{s["rationale"].get<std::string>(), provenance};
    }
    session.steps.push_back({std::move(obs), std::move(rationale), action_from_json(s.at("action"))});
  }
  return session;
}

json persona_to_json(const Persona& persona) {
  return {{"user_id", persona.user_id},
          {"demographics", persona.demographics},
          {"personality", persona.personality},
          {"shopping_prefs", persona.shopping_prefs}};
}

Persona persona_from_json(const json& j) {
  Persona p;
  p.user_id = j.at("user_id").get<std::string>();
  if (j.contains("demographics")) {
    p.demographics = j["demographics"].get<std::map<std::string, std::string>>();
  }
  if (j.contains("personality")) {
    p.personality = j["personality"].get<std::map<std::string, std::string>>();
  }
  if (j.contains("shopping_prefs")) {
    p.shopping_prefs = j["shopping_prefs"].get<std::map<std::string, double>>();
  }
  return p;
}

void write_sessions_jsonl(std::ostream& os, std::span<const Session> sessions) {
  for (const auto& s : sessions) os << session_to_json(s).dump() << '\n';
}

void write_personas_jsonl(std::ostream& os, std::span<const Persona> personas) {
  for (const auto& p : personas) os << persona_to_json(p).dump() << '\n';
}

DatasetError::DatasetError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

namespace {

template <typename Fn>
void for_each_line(std::istream& is, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DatasetError(source, number, "malformed JSON");
    try {
      fn(j, number);
    } catch (const json::exception& e) {
      throw DatasetError(source, number, e.what());
    } catch (const std::invalid_argument& e) {
      throw DatasetError(source, number, e.what());
    }
  }
}

}  // namespace

IngestResult ingest_jsonl(std::istream& sessions, std::istream& personas) {
  IngestResult result;
  std::set<std::string> users;
  for_each_line(personas, "personas", [&](const json& j, std::size_t line) {
    Persona p = persona_from_json(j);
    auto violations = validate_persona(p);
    if (!users.insert(p.user_id).second) {
      violations.push_back({std::nullopt, "duplicate-user", p.user_id});
    }
    if (violations.empty()) {
      result.dataset.personas.push_back(std::move(p));
    } else {
      for (auto& v : violations) result.issues.push_back({"personas", line, p.user_id, std::move(v)});
    }
  });
  for_each_line(sessions, "sessions", [&](const json& j, std::size_t line) {
    Session s = session_from_json(j);
    auto violations = validate_session(s);
    if (violations.empty()) {
      result.dataset.sessions.push_back(std::move(s));
    } else {
      for (auto& v : violations) {
        result.issues.push_back({"sessions", line, s.session_id, std::move(v)});
      }
    }
  });
  return result;
}

IngestResult ingest_jsonl(const std::filesystem::path& sessions_path,
                          const std::filesystem::path& personas_path) {
  std::ifstream sessions(sessions_path);
  if (!sessions) throw std::runtime_error("cannot open " + sessions_path.string());
  std::ifstream personas(personas_path);
  if (!personas) throw std::runtime_error("cannot open " + personas_path.string());
  return ingest_jsonl(sessions, personas);
}

}  // namespace shoprl
