#include "shoprl/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace shoprl {

std::string hex_digest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string hex_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return hex_digest(h);
}

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  auto to_vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
  std::vector<std::vector<double>> type_rows;
  for (std::size_t k = 0; k < kNumTypeTokens; ++k) type_rows.push_back(to_vec(p.type_row(k)));
  std::vector<std::vector<double>> text_rows;
  for (std::size_t v = 0; v < p.text_rows(); ++v) text_rows.push_back(to_vec(p.text_row(v)));
  return {{"format", "shoprl-policy"},
          {"version", kCheckpointVersion},
          {"feature_dim", p.feature_dim()},
          {"hash_seed", ckpt.features.hash_seed},
          {"use_persona", ckpt.features.use_persona},
          {"normalize_features", ckpt.features.normalize},
          {"vocab", ckpt.vocab},
          {"config_hash", ckpt.config_hash},
          {"params_hash", hex_digest(p.hash())},
          {"weights_type", type_rows},
          {"weights_elem", to_vec(p.elem())},
          {"weights_text", text_rows}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "shoprl-policy") throw std::runtime_error("not a policy checkpoint");
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  Checkpoint ckpt;
  ckpt.features.dim = j.at("feature_dim").get<std::size_t>();
  ckpt.features.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  ckpt.features.use_persona = j.at("use_persona").get<bool>();
  ckpt.features.normalize = j.at("normalize_features").get<bool>();
  ckpt.vocab = j.at("vocab").get<std::vector<std::string>>();
  ckpt.config_hash = j.at("config_hash").get<std::string>();

  const auto type_rows = j.at("weights_type").get<std::vector<std::vector<double>>>();
  const auto elem = j.at("weights_elem").get<std::vector<double>>();
  const auto text_rows = j.at("weights_text").get<std::vector<std::vector<double>>>();
  const std::size_t dim = ckpt.features.dim;
  if (type_rows.size() != kNumTypeTokens || elem.size() != dim ||
      text_rows.size() != ckpt.vocab.size() + 1) {
    throw std::runtime_error("checkpoint weight shapes do not match its header");
  }
  ckpt.params = PolicyParams(dim, text_rows.size());
  auto copy = [dim](const std::vector<double>& src, std::span<double> dst) {
    if (src.size() != dim) throw std::runtime_error("checkpoint row has wrong length");
    std::copy(src.begin(), src.end(), dst.begin());
  };
  for (std::size_t k = 0; k < kNumTypeTokens; ++k) copy(type_rows[k], ckpt.params.type_row(k));
  copy(elem, ckpt.params.elem());
  for (std::size_t v = 0; v < text_rows.size(); ++v) copy(text_rows[v], ckpt.params.text_row(v));
  if (j.contains("params_hash") &&
      j["params_hash"].get<std::string>() != hex_digest(ckpt.params.hash())) {
    throw std::runtime_error("checkpoint params_hash mismatch");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_to_json(ckpt).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return checkpoint_from_json(nlohmann::json::parse(in));
}

}  // namespace shoprl
