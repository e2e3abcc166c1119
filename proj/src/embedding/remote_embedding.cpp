#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "paraicl/embedding.hpp"

namespace paraicl {

using nlohmann::json;

RemoteEmbeddingProvider::RemoteEmbeddingProvider(EmbeddingProviderConfig config)
    : config_(std::move(config)) {
  config_.validate();
  if (config_.kind != EmbeddingProviderConfig::Kind::remote) {
    throw ConfigError("RemoteEmbeddingProvider requires kind=remote");
  }
}

EmbeddingVector RemoteEmbeddingProvider::embed(const std::string& text) {
  return embed_batch({text}).front();
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  for (const auto& t : texts) {
    if (t.empty()) throw EmptyText("remote embed: empty text");
  }

  httplib::Client client(config_.endpoint);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv("PARAICL_API_KEY")) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json body;
  body["input"] = texts;
  if (!config_.model_name.empty()) body["model"] = config_.model_name;

  auto res = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
  if (!res) {
    throw RemoteUnavailable("embedding endpoint unreachable: " + config_.endpoint);
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("embedding endpoint rejected credentials (HTTP " +
                    std::to_string(res->status) + ")");
  }
  if (res->status >= 500) {
    throw RemoteUnavailable("embedding endpoint HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedResponse("embedding endpoint HTTP " + std::to_string(res->status));
  }

  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("embedding response is not JSON: ") + e.what());
  }
  if (!parsed.contains("data") || !parsed["data"].is_array()) {
    throw MalformedResponse("embedding response missing 'data' array");
  }
  const auto& data = parsed["data"];
  if (data.size() != texts.size()) {
    throw MalformedResponse("embedding response has " + std::to_string(data.size()) +
                            " vectors for " + std::to_string(texts.size()) + " inputs");
  }

  std::vector<EmbeddingVector> out;
  out.reserve(data.size());
  std::size_t expected_dim = 0;
  for (const auto& item : data) {
    if (!item.contains("embedding") || !item["embedding"].is_array()) {
      throw MalformedResponse("embedding response entry missing 'embedding'");
    }
    EmbeddingVector v;
    v.values.reserve(item["embedding"].size());
    for (const auto& x : item["embedding"]) {
      if (!x.is_number()) throw MalformedResponse("non-numeric embedding component");
      v.values.push_back(x.get<double>());
    }
    if (v.values.empty()) throw MalformedResponse("empty embedding vector");
    if (expected_dim == 0) {
      expected_dim = v.dim();
    } else if (v.dim() != expected_dim) {
      throw MalformedResponse("ragged embedding dims in one response");
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace paraicl
