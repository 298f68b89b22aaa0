#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shoprl/session.hpp"

namespace shoprl {

// Sessions plus the persona sidecar table.
struct Dataset {
  std::vector<Session> sessions;
  std::vector<Persona> personas;
  // Cleared by the no-rationale ablation; prompts then omit rationales.
  bool rationales_enabled = true;

  // nullptr when the user has no persona (e.g. after the no-persona ablation).
  const Persona* persona_for(const std::string& user_id) const;
  std::size_t num_steps() const;
};

nlohmann::json session_to_json(const Session& session);
Session session_from_json(const nlohmann::json& j);
nlohmann::json persona_to_json(const Persona& persona);
Persona persona_from_json(const nlohmann::json& j);

// One compact object per line, LF terminated.
void write_sessions_jsonl(std::ostream& os, std::span<const Session> sessions);
void write_personas_jsonl(std::ostream& os, std::span<const Persona> personas);

// Parse failure with the 1-based line number it occurred on.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::string source, std::size_t line, const std::string& what);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

struct IngestIssue {
  std::string source;
  std::size_t line;
  std::string id;  // session_id or user_id
  Violation violation;
};

struct IngestResult {
  Dataset dataset;
  std::vector<IngestIssue> issues;  // invalid records, excluded from dataset
};

// Reads sessions and personas; rejects (and reports) records violating
// session or persona invariants. Throws DatasetError on malformed lines and
// std::runtime_error when a file cannot be opened.
IngestResult ingest_jsonl(std::istream& sessions, std::istream& personas);
IngestResult ingest_jsonl(const std::filesystem::path& sessions_path,
                          const std::filesystem::path& personas_path);

}  // namespace shoprl
