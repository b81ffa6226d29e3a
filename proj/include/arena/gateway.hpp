#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace arena {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;  // in [0, 1]
    int max_tokens = 1024;
    std::string request_tag;  // diagnostic label; excluded from the request hash
    bool operator==(const ChatRequest&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const ChatRequest& r);
void from_json(const nlohmann::json& j, ChatRequest& r);

enum class BackendKind { Live, Replay, Scripted };
std::string to_string(BackendKind kind);

struct ChatExchange {
    ChatRequest request;
    std::string response_text;
    long long latency_ms = 0;
    BackendKind backend = BackendKind::Scripted;
    int attempt = 1;  // attempt number that succeeded (1-based)
};

struct GatewayFailure : std::runtime_error {
    enum class Kind { Auth, RateLimit, Network, Exhausted };
    GatewayFailure(Kind k, const std::string& why);
    Kind kind;
};
std::string to_string(GatewayFailure::Kind kind);

struct ReplayMiss : std::runtime_error {
    explicit ReplayMiss(const std::string& request_hash);
    std::string hash;
};

// Stable hash of the semantic request: model_id, messages, temperature and
// max_tokens. The request_tag is excluded so relabeled requests replay.
std::string hash_request(const ChatRequest& request);

class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual BackendKind kind() const = 0;
};

// Programmable backend for tests: either a FIFO response queue or a pure
// responder function of the request.
class ScriptedBackend : public ChatBackend {
  public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::function<std::string(const ChatRequest&)> responder)
        : responder_(std::move(responder)) {}

    void push_response(std::string text);
    std::size_t pending() const;

    std::string complete(const ChatRequest& request) override;
    BackendKind kind() const override { return BackendKind::Scripted; }

  private:
    std::function<std::string(const ChatRequest&)> responder_;
    mutable std::mutex mutex_;
    std::deque<std::string> queue_;
};

// Replays recorded fixtures: one JSON file per request hash containing
// {request, response_text}. Unknown requests raise ReplayMiss.
class ReplayBackend : public ChatBackend {
  public:
    explicit ReplayBackend(std::string fixture_dir);

    std::string complete(const ChatRequest& request) override;
    BackendKind kind() const override { return BackendKind::Replay; }

  private:
    std::string fixture_dir_;
};

// Generic chat-completions JSON-over-HTTPS client with two provider presets.
class LiveBackend : public ChatBackend {
  public:
    enum class Provider { OpenAiStyle, GeminiStyle };
    struct Config {
        std::string base_url;  // e.g. "https://api.openai.com"
        Provider provider = Provider::OpenAiStyle;
        std::string api_key_env;  // environment variable holding the bearer token
        int timeout_seconds = 120;
    };
    static Config openai_preset();
    static Config gemini_preset();

    explicit LiveBackend(Config config) : config_(std::move(config)) {}

    std::string complete(const ChatRequest& request) override;
    BackendKind kind() const override { return BackendKind::Live; }

  private:
    Config config_;
};

struct GatewayOptions {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{1000};  // doubles each retry
    int requests_per_minute = 0;                      // 0 = unlimited
    std::optional<std::string> record_dir;            // fixture recording target
};

// Front door for all completions: validates requests, rate-limits, retries
// transient failures with exponential backoff, logs every exchange, and
// optionally records replayable fixtures. Clock and sleep are injectable so
// retry/rate-limit behavior is testable without waiting.
class Gateway {
  public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options = {});
    Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options, Clock clock,
            Sleeper sleeper);

    ChatExchange complete(const ChatRequest& request);

    std::vector<ChatExchange> transcript() const;
    std::size_t requests_issued() const;
    const GatewayOptions& options() const { return options_; }
    BackendKind backend_kind() const { return backend_->kind(); }

  private:
    void rate_limit_admit();
    void record_fixture(const ChatRequest& request, const std::string& response_text);

    std::shared_ptr<ChatBackend> backend_;
    GatewayOptions options_;
    Clock clock_;
    Sleeper sleeper_;
    mutable std::mutex mutex_;
    std::deque<std::chrono::steady_clock::time_point> issue_times_;
    std::vector<ChatExchange> transcript_;
    std::size_t requests_issued_ = 0;
};

}  // namespace arena
