#include "forge/gateway/wire.hpp"

#include <json.hpp>

#include "forge/gateway/errors.hpp"

namespace forge::gateway {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string strip_trailing_slash(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

ordered_json chat_messages(const CompletionRequest& request) {
  ordered_json messages = ordered_json::array();
  for (const auto& m : request.messages) {
    ordered_json item;
    item["role"] = std::string(to_string(m.role));
    item["content"] = m.content;
    messages.push_back(std::move(item));
  }
  return messages;
}

std::string_view gemini_role(Role role) {
  // Gemini only knows "user" and "model"; system text travels as user turns.
  return role == Role::assistant ? "model" : "user";
}

const nlohmann::json& require(const nlohmann::json& node, std::string_view key, std::string_view where) {
  if (!node.is_object() || !node.contains(key)) {
    throw MalformedResponse("reply lacks " + std::string(where));
  }
  return node.at(key);
}

const nlohmann::json& require_index(const nlohmann::json& node, std::size_t i, std::string_view where) {
  if (!node.is_array() || node.size() <= i) throw MalformedResponse("reply lacks " + std::string(where));
  return node.at(i);
}

std::string require_text(const nlohmann::json& node, std::string_view where) {
  if (!node.is_string()) throw MalformedResponse(std::string(where) + " is not a string");
  return node.get<std::string>();
}

}  // namespace

WireRequest encode_request(const ProviderProfile& profile, const CompletionRequest& request,
                           const std::string& api_key) {
  WireRequest wire;
  const std::string base = strip_trailing_slash(profile.base_url);
  ordered_json body;
  switch (profile.kind) {
    case ProviderKind::openai_compatible:
      wire.url = base + "/chat/completions";
      body["model"] = request.model_id;
      body["messages"] = chat_messages(request);
      body["temperature"] = request.temperature;
      body["max_tokens"] = request.max_tokens;
      if (!api_key.empty()) wire.headers.emplace_back("Authorization", "Bearer " + api_key);
      break;
    case ProviderKind::gemini_style: {
      wire.url = base + "/models/" + request.model_id + ":generateContent";
      ordered_json contents = ordered_json::array();
      for (const auto& m : request.messages) {
        ordered_json part;
        part["text"] = m.content;
        ordered_json item;
        item["role"] = std::string(gemini_role(m.role));
        item["parts"] = ordered_json::array({part});
        contents.push_back(std::move(item));
      }
      body["contents"] = std::move(contents);
      ordered_json config;
      config["temperature"] = request.temperature;
      config["maxOutputTokens"] = request.max_tokens;
      body["generationConfig"] = std::move(config);
      if (!api_key.empty()) wire.headers.emplace_back("x-goog-api-key", api_key);
      break;
    }
    case ProviderKind::local_host: {
      wire.url = base + "/api/chat";
      body["model"] = request.model_id;
      body["messages"] = chat_messages(request);
      body["stream"] = false;
      ordered_json options;
      options["temperature"] = request.temperature;
      body["options"] = std::move(options);
      if (!api_key.empty()) wire.headers.emplace_back("Authorization", "Bearer " + api_key);
      break;
    }
    case ProviderKind::scripted:
      throw std::invalid_argument("scripted providers have no wire format");
  }
  wire.headers.emplace_back("Content-Type", "application/json");
  wire.body = body.dump();
  return wire;
}

std::string decode_reply(ProviderKind kind, std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedResponse(std::string("reply is not JSON: ") + e.what());
  }
  switch (kind) {
    case ProviderKind::openai_compatible: {
      const auto& choices = require(doc, "choices", "choices");
      const auto& message = require(require_index(choices, 0, "choices[0]"), "message", "choices[0].message");
      return require_text(require(message, "content", "choices[0].message.content"),
                          "choices[0].message.content");
    }
    case ProviderKind::gemini_style: {
      const auto& candidates = require(doc, "candidates", "candidates");
      const auto& content = require(require_index(candidates, 0, "candidates[0]"), "content",
                                    "candidates[0].content");
      const auto& parts = require(content, "parts", "candidates[0].content.parts");
      return require_text(require(require_index(parts, 0, "parts[0]"), "text", "parts[0].text"),
                          "candidates[0].content.parts[0].text");
    }
    case ProviderKind::local_host: {
      const auto& message = require(doc, "message", "message");
      return require_text(require(message, "content", "message.content"), "message.content");
    }
    case ProviderKind::scripted:
      break;
  }
  throw std::invalid_argument("scripted providers have no wire format");
}

}  // namespace forge::gateway
