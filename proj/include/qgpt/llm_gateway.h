#pragma once

// Boundary to the language model: a live OpenAI-compatible chat endpoint or
// a replayable scripted transcript, behind one Gateway that logs every
// exchange.

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qgpt {

inline constexpr double kSamplingTemperature = 0.7;
inline constexpr double kParsingTemperature = 0.0;

struct ChatRequest {
  // Identifies the prompt (and usually the subject, e.g.
  // "auto_lss/uphill_slope"); scripted transcripts are keyed by it.
  std::string template_id;
  std::string system;
  std::string user;
  double temperature = kParsingTemperature;
  int n_samples = 1;
};

struct Provenance {
  std::string provider;
  std::string model;
  std::string timestamp;  // empty for scripted replay
};

struct ChatExchange {
  ChatRequest request;
  std::vector<std::string> responses;
  Provenance provenance;
};

// One transcript line: {"template_id", "ordinal", "request_hash", "response"}.
struct TranscriptRecord {
  std::string template_id;
  int ordinal = 0;
  std::string request_hash;
  std::string response;
};

std::string RequestHash(const ChatRequest& request);

std::vector<TranscriptRecord> ParseTranscript(std::string_view jsonl);
std::vector<TranscriptRecord> LoadTranscript(const std::string& path);
std::string TranscriptToJsonl(const std::vector<TranscriptRecord>& records);

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  // Returns exactly request.n_samples responses or throws GatewayError.
  virtual std::vector<std::string> Complete(const ChatRequest& request) = 0;
  virtual Provenance Describe() const = 0;
};

// Replays canned responses keyed by (template id, call ordinal). Each
// template id has its own ordinal counter, so transcripts do not depend on
// how calls for different subjects interleave.
class ScriptedProvider : public LlmProvider {
 public:
  explicit ScriptedProvider(std::vector<TranscriptRecord> records,
                            bool verify_hashes = false);
  static std::shared_ptr<ScriptedProvider> FromFile(const std::string& path,
                                                    bool verify_hashes = false);

  std::vector<std::string> Complete(const ChatRequest& request) override;
  Provenance Describe() const override { return {"scripted", "transcript", ""}; }

  // Number of entries not yet consumed.
  std::size_t Remaining() const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, int>, TranscriptRecord> entries_;
  std::map<std::string, int> next_ordinal_;
  bool verify_hashes_;
  std::size_t consumed_ = 0;
};

struct LiveSettings {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key;
  long timeout_seconds = 60;
  int max_retries = 2;
  std::chrono::milliseconds backoff{1000};

  // Reads QGPT_LLM_BASE_URL, QGPT_LLM_MODEL and QGPT_LLM_API_KEY; throws
  // ConfigError when the key is missing.
  static LiveSettings FromEnvironment();
};

// OpenAI-compatible /chat/completions client over libcurl. Transient
// failures (transport errors, HTTP 429 and 5xx) are retried with
// exponential backoff.
class LiveProvider : public LlmProvider {
 public:
  // Throws ConfigError for an empty key or endpoint.
  explicit LiveProvider(LiveSettings settings);

  std::vector<std::string> Complete(const ChatRequest& request) override;
  Provenance Describe() const override;

 private:
  std::vector<std::string> PostOnce(const ChatRequest& request, int n);
  LiveSettings settings_;
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<LlmProvider> provider);

  std::vector<std::string> Complete(const ChatRequest& request);
  std::string CompleteOne(const ChatRequest& request);

  std::vector<TranscriptRecord> Transcript() const;
  std::vector<ChatExchange> Exchanges() const;
  LlmProvider& provider() { return *provider_; }

 private:
  std::shared_ptr<LlmProvider> provider_;
  mutable std::mutex mu_;
  std::vector<TranscriptRecord> transcript_;
  std::vector<ChatExchange> exchanges_;
  std::map<std::string, int> ordinals_;
};

// Text templates with {placeholder} slots, loaded from a directory of
// <name>.txt files.
class PromptLibrary {
 public:
  explicit PromptLibrary(std::string directory);
  static PromptLibrary Default();  // <asset dir>/prompts

  const std::string& Template(const std::string& name) const;
  // Replaces each {key} for the given keys; other braces are left alone.
  std::string Render(const std::string& name,
                     const std::map<std::string, std::string>& values) const;

 private:
  std::string directory_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::string> cache_;
};

std::string AssetDir();  // QGPT_ASSET_DIR env override, else build default
std::string ReadFile(const std::string& path);

}  // namespace qgpt
