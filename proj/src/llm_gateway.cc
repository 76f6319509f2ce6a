#include "qgpt/llm_gateway.h"

#include <curl/curl.h>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qgpt/errors.h"
#include "qgpt/random.h"

namespace qgpt {

using nlohmann::json;

namespace {

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string GetEnv(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

size_t WriteCallback(char* ptr, size_t size, size_t nmemb, void* userdata) {
  static_cast<std::string*>(userdata)->append(ptr, size * nmemb);
  return size * nmemb;
}

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

// Thrown inside the retry loop for failures worth another attempt.
struct TransientFailure {
  std::string what;
};

}  // namespace

std::string RequestHash(const ChatRequest& request) {
  return Hex64(Fnv1a64(request.system + '\x1f' + request.user));
}

std::vector<TranscriptRecord> ParseTranscript(std::string_view jsonl) {
  std::vector<TranscriptRecord> records;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TranscriptRecord r;
      r.template_id = j.at("template_id").get<std::string>();
      r.ordinal = j.at("ordinal").get<int>();
      r.request_hash = j.value("request_hash", "");
      r.response = j.at("response").get<std::string>();
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError("transcript line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

std::vector<TranscriptRecord> LoadTranscript(const std::string& path) {
  return ParseTranscript(ReadFile(path));
}

std::string TranscriptToJsonl(const std::vector<TranscriptRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j = {{"template_id", r.template_id},
              {"ordinal", r.ordinal},
              {"request_hash", r.request_hash},
              {"response", r.response}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

ScriptedProvider::ScriptedProvider(std::vector<TranscriptRecord> records,
                                   bool verify_hashes)
    : verify_hashes_(verify_hashes) {
  for (auto& r : records) {
    auto key = std::make_pair(r.template_id, r.ordinal);
    if (entries_.contains(key)) {
      throw ParseError("duplicate transcript entry for '" + r.template_id +
                       "' ordinal " + std::to_string(r.ordinal));
    }
    entries_.emplace(std::move(key), std::move(r));
  }
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::FromFile(
    const std::string& path, bool verify_hashes) {
  return std::make_shared<ScriptedProvider>(LoadTranscript(path), verify_hashes);
}

std::vector<std::string> ScriptedProvider::Complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  int& ordinal = next_ordinal_[request.template_id];
  for (int i = 0; i < request.n_samples; ++i) {
    auto it = entries_.find({request.template_id, ordinal});
    if (it == entries_.end()) {
      throw GatewayError("script exhausted: no response for template '" +
                         request.template_id + "' ordinal " +
                         std::to_string(ordinal));
    }
    const TranscriptRecord& r = it->second;
    if (verify_hashes_ && !r.request_hash.empty() &&
        r.request_hash != RequestHash(request)) {
      throw GatewayError("request drift: template '" + request.template_id +
                         "' ordinal " + std::to_string(ordinal) +
                         " was recorded for a different prompt");
    }
    out.push_back(r.response);
    ++ordinal;
    ++consumed_;
  }
  return out;
}

std::size_t ScriptedProvider::Remaining() const {
  std::lock_guard lock(mu_);
  return entries_.size() - consumed_;
}

LiveSettings LiveSettings::FromEnvironment() {
  LiveSettings s;
  if (auto v = GetEnv("QGPT_LLM_BASE_URL"); !v.empty()) s.base_url = v;
  if (auto v = GetEnv("QGPT_LLM_MODEL"); !v.empty()) s.model = v;
  s.api_key = GetEnv("QGPT_LLM_API_KEY");
  if (s.api_key.empty()) {
    throw ConfigError("live provider requires QGPT_LLM_API_KEY to be set");
  }
  return s;
}

LiveProvider::LiveProvider(LiveSettings settings) : settings_(std::move(settings)) {
  if (settings_.api_key.empty()) throw ConfigError("live provider: empty API key");
  if (settings_.base_url.empty()) throw ConfigError("live provider: empty endpoint");
  static CurlGlobal curl_global;
}

Provenance LiveProvider::Describe() const {
  return {"live:" + settings_.base_url, settings_.model, UtcTimestamp()};
}

std::vector<std::string> LiveProvider::PostOnce(const ChatRequest& request, int n) {
  json payload = {
      {"model", settings_.model},
      {"temperature", request.temperature},
      {"n", n},
      {"messages",
       {{{"role", "system"}, {"content", request.system}},
        {{"role", "user"}, {"content", request.user}}}}};
  if (request.system.empty()) payload["messages"].erase(0);
  const std::string body = payload.dump();

  std::string url = settings_.base_url;
  if (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  CURL* curl = curl_easy_init();
  if (!curl) throw GatewayError("curl_easy_init failed");
  curl_slist* headers = nullptr;
  headers = curl_slist_append(headers, "Content-Type: application/json");
  const std::string auth = "Authorization: Bearer " + settings_.api_key;
  headers = curl_slist_append(headers, auth.c_str());

  std::string response;
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_HTTPHEADER, headers);
  curl_easy_setopt(curl, CURLOPT_POSTFIELDS, body.c_str());
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, WriteCallback);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &response);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, settings_.timeout_seconds);
  const CURLcode rc = curl_easy_perform(curl);
  long status = 0;
  curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  curl_slist_free_all(headers);
  curl_easy_cleanup(curl);

  if (rc != CURLE_OK) throw TransientFailure{curl_easy_strerror(rc)};
  if (status == 429 || status >= 500) {
    throw TransientFailure{"HTTP " + std::to_string(status)};
  }
  if (status < 200 || status >= 300) {
    throw GatewayError("chat endpoint returned HTTP " + std::to_string(status) +
                       ": " + response.substr(0, 300));
  }
  std::vector<std::string> out;
  try {
    const json j = json::parse(response);
    for (const auto& choice : j.at("choices")) {
      out.push_back(choice.at("message").at("content").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw GatewayError(std::string("unexpected chat response: ") + e.what());
  }
  return out;
}

std::vector<std::string> LiveProvider::Complete(const ChatRequest& request) {
  std::vector<std::string> out;
  // Some compatible servers ignore "n"; keep asking until enough samples.
  while (static_cast<int>(out.size()) < request.n_samples) {
    const int want = request.n_samples - static_cast<int>(out.size());
    std::vector<std::string> got;
    for (int attempt = 0;; ++attempt) {
      try {
        got = PostOnce(request, want);
        break;
      } catch (const TransientFailure& f) {
        if (attempt >= settings_.max_retries) {
          throw GatewayError("chat request failed after " +
                             std::to_string(attempt + 1) + " attempts: " + f.what);
        }
        std::this_thread::sleep_for(settings_.backoff * (1 << attempt));
      }
    }
    if (got.empty()) throw GatewayError("chat endpoint returned no choices");
    for (auto& g : got) {
      if (static_cast<int>(out.size()) < request.n_samples) out.push_back(std::move(g));
    }
  }
  return out;
}

Gateway::Gateway(std::shared_ptr<LlmProvider> provider)
    : provider_(std::move(provider)) {
  if (!provider_) throw ConfigError("gateway needs a provider");
}

std::vector<std::string> Gateway::Complete(const ChatRequest& request) {
  if (request.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::vector<std::string> responses = provider_->Complete(request);
  std::lock_guard lock(mu_);
  const std::string hash = RequestHash(request);
  int& ordinal = ordinals_[request.template_id];
  for (const auto& r : responses) {
    transcript_.push_back({request.template_id, ordinal++, hash, r});
  }
  exchanges_.push_back({request, responses, provider_->Describe()});
  return responses;
}

std::string Gateway::CompleteOne(const ChatRequest& request) {
  ChatRequest single = request;
  single.n_samples = 1;
  return Complete(single).front();
}

std::vector<TranscriptRecord> Gateway::Transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

std::vector<ChatExchange> Gateway::Exchanges() const {
  std::lock_guard lock(mu_);
  return exchanges_;
}

PromptLibrary::PromptLibrary(std::string directory)
    : directory_(std::move(directory)) {}

PromptLibrary PromptLibrary::Default() { return PromptLibrary(AssetDir() + "/prompts"); }

const std::string& PromptLibrary::Template(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(name);
  if (it == cache_.end()) {
    it = cache_.emplace(name, ReadFile(directory_ + "/" + name + ".txt")).first;
  }
  return it->second;
}

std::string PromptLibrary::Render(
    const std::string& name,
    const std::map<std::string, std::string>& values) const {
  std::string text = Template(name);
  for (const auto& [key, value] : values) {
    const std::string slot = "{" + key + "}";
    for (std::size_t pos = text.find(slot); pos != std::string::npos;
         pos = text.find(slot, pos + value.size())) {
      text.replace(pos, slot.size(), value);
    }
  }
  return text;
}

std::string AssetDir() {
  if (auto v = GetEnv("QGPT_ASSET_DIR"); !v.empty()) return v;
  return QGPT_ASSET_DIR;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qgpt
