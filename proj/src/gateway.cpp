#include "arena/gateway.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace arena {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const ChatMessage& m) {
    j = json{{"role", m.role}, {"content", m.content}};
}
void from_json(const json& j, ChatMessage& m) {
    j.at("role").get_to(m.role);
    j.at("content").get_to(m.content);
}
void to_json(json& j, const ChatRequest& r) {
    j = json{{"model_id", r.model_id},     {"messages", r.messages},
             {"temperature", r.temperature}, {"max_tokens", r.max_tokens},
             {"request_tag", r.request_tag}};
}
void from_json(const json& j, ChatRequest& r) {
    j.at("model_id").get_to(r.model_id);
    j.at("messages").get_to(r.messages);
    j.at("temperature").get_to(r.temperature);
    j.at("max_tokens").get_to(r.max_tokens);
    j.at("request_tag").get_to(r.request_tag);
}

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Live: return "live";
        case BackendKind::Replay: return "replay";
        case BackendKind::Scripted: return "scripted";
    }
    return "?";
}

std::string to_string(GatewayFailure::Kind kind) {
    switch (kind) {
        case GatewayFailure::Kind::Auth: return "auth";
        case GatewayFailure::Kind::RateLimit: return "rate_limit";
        case GatewayFailure::Kind::Network: return "network";
        case GatewayFailure::Kind::Exhausted: return "exhausted";
    }
    return "?";
}

GatewayFailure::GatewayFailure(Kind k, const std::string& why)
    : std::runtime_error("gateway failure (" + to_string(k) + "): " + why), kind(k) {}

ReplayMiss::ReplayMiss(const std::string& request_hash)
    : std::runtime_error("no replay fixture for request hash " + request_hash),
      hash(request_hash) {}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

void validate(const ChatRequest& request) {
    if (request.messages.empty())
        throw std::invalid_argument("chat request has no messages");
    if (request.temperature < 0.0 || request.temperature > 1.0)
        throw std::invalid_argument("temperature outside [0, 1]");
}

}  // namespace

std::string hash_request(const ChatRequest& request) {
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, request.model_id);
    h = fnv1a(h, "\x1f");
    for (const auto& m : request.messages) {
        h = fnv1a(h, m.role);
        h = fnv1a(h, "\x1e");
        h = fnv1a(h, m.content);
        h = fnv1a(h, "\x1f");
    }
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.6f", request.temperature);
    h = fnv1a(h, temp);
    h = fnv1a(h, "\x1f");
    h = fnv1a(h, std::to_string(request.max_tokens));
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void ScriptedBackend::push_response(std::string text) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(text));
}

std::size_t ScriptedBackend::pending() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    if (responder_) return responder_(request);
    std::lock_guard lock(mutex_);
    if (queue_.empty())
        throw GatewayFailure(GatewayFailure::Kind::Exhausted,
                             "scripted response queue is empty");
    std::string text = std::move(queue_.front());
    queue_.pop_front();
    return text;
}

ReplayBackend::ReplayBackend(std::string fixture_dir)
    : fixture_dir_(std::move(fixture_dir)) {}

std::string ReplayBackend::complete(const ChatRequest& request) {
    const std::string hash = hash_request(request);
    const fs::path file = fs::path(fixture_dir_) / (hash + ".json");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ReplayMiss(hash);
    json j;
    in >> j;
    return j.at("response_text").get<std::string>();
}

LiveBackend::Config LiveBackend::openai_preset() {
    return Config{"https://api.openai.com", Provider::OpenAiStyle, "OPENAI_API_KEY", 120};
}

LiveBackend::Config LiveBackend::gemini_preset() {
    return Config{"https://generativelanguage.googleapis.com", Provider::GeminiStyle,
                  "GEMINI_API_KEY", 120};
}

std::string LiveBackend::complete(const ChatRequest& request) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw GatewayFailure(GatewayFailure::Kind::Auth,
                             "environment variable " + config_.api_key_env + " not set");

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);

    std::string path;
    json body;
    httplib::Headers headers;
    if (config_.provider == Provider::OpenAiStyle) {
        path = "/v1/chat/completions";
        headers.emplace("Authorization", std::string("Bearer ") + key);
        body = json{{"model", request.model_id},
                    {"messages", request.messages},
                    {"temperature", request.temperature},
                    {"max_tokens", request.max_tokens}};
    } else {
        path = "/v1beta/models/" + request.model_id + ":generateContent";
        headers.emplace("x-goog-api-key", key);
        json contents = json::array();
        std::string system_text;
        for (const auto& m : request.messages) {
            if (m.role == "system") {
                system_text += m.content;
                continue;
            }
            contents.push_back(
                json{{"role", m.role == "assistant" ? "model" : "user"},
                     {"parts", json::array({json{{"text", m.content}}})}});
        }
        body = json{{"contents", contents},
                    {"generationConfig", json{{"temperature", request.temperature},
                                              {"maxOutputTokens", request.max_tokens}}}};
        if (!system_text.empty())
            body["systemInstruction"] =
                json{{"parts", json::array({json{{"text", system_text}}})}};
    }

    auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result)
        throw GatewayFailure(GatewayFailure::Kind::Network,
                             "transport error: " + httplib::to_string(result.error()));
    if (result->status == 401 || result->status == 403)
        throw GatewayFailure(GatewayFailure::Kind::Auth,
                             "HTTP " + std::to_string(result->status));
    if (result->status == 429)
        throw GatewayFailure(GatewayFailure::Kind::RateLimit, "HTTP 429");
    if (result->status != 200)
        throw GatewayFailure(GatewayFailure::Kind::Network,
                             "HTTP " + std::to_string(result->status));
    try {
        const json reply = json::parse(result->body);
        if (config_.provider == Provider::OpenAiStyle)
            return reply.at("choices").at(0).at("message").at("content")
                .get<std::string>();
        return reply.at("candidates").at(0).at("content").at("parts").at(0).at("text")
            .get<std::string>();
    } catch (const json::exception& e) {
        throw GatewayFailure(GatewayFailure::Kind::Network,
                             std::string("unparseable provider reply: ") + e.what());
    }
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : Gateway(std::move(backend), std::move(options),
              [] { return std::chrono::steady_clock::now(); },
              [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options,
                 Clock clock, Sleeper sleeper)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      clock_(std::move(clock)),
      sleeper_(std::move(sleeper)) {
    if (!backend_) throw std::invalid_argument("gateway needs a backend");
}

void Gateway::rate_limit_admit() {
    if (options_.requests_per_minute <= 0) return;
    using namespace std::chrono;
    while (true) {
        milliseconds wait{0};
        {
            std::lock_guard lock(mutex_);
            const auto now = clock_();
            while (!issue_times_.empty() && now - issue_times_.front() >= minutes(1))
                issue_times_.pop_front();
            if (static_cast<int>(issue_times_.size()) < options_.requests_per_minute) {
                issue_times_.push_back(now);
                return;
            }
            wait = duration_cast<milliseconds>(issue_times_.front() + minutes(1) - now) +
                   milliseconds(1);
        }
        sleeper_(wait);
    }
}

void Gateway::record_fixture(const ChatRequest& request,
                             const std::string& response_text) {
    if (!options_.record_dir) return;
    std::lock_guard lock(mutex_);
    fs::create_directories(*options_.record_dir);
    const std::string hash = hash_request(request);
    std::ofstream out(fs::path(*options_.record_dir) / (hash + ".json"),
                      std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write fixture in " + *options_.record_dir);
    out << json{{"request", request}, {"response_text", response_text}}.dump(2) << '\n';
}

ChatExchange Gateway::complete(const ChatRequest& request) {
    validate(request);
    std::string last_error;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        rate_limit_admit();
        const auto started = clock_();
        try {
            std::string text = backend_->complete(request);
            const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                clock_() - started);
            ChatExchange exchange{request, std::move(text), latency.count(),
                                  backend_->kind(), attempt};
            record_fixture(request, exchange.response_text);
            {
                std::lock_guard lock(mutex_);
                transcript_.push_back(exchange);
                ++requests_issued_;
            }
            return exchange;
        } catch (const GatewayFailure& failure) {
            {
                std::lock_guard lock(mutex_);
                ++requests_issued_;
            }
            const bool retryable = failure.kind == GatewayFailure::Kind::RateLimit ||
                                   failure.kind == GatewayFailure::Kind::Network;
            if (!retryable || attempt == options_.max_attempts) {
                if (retryable)
                    throw GatewayFailure(GatewayFailure::Kind::Exhausted,
                                         std::string("retries exhausted; last error: ") +
                                             failure.what());
                throw;
            }
            last_error = failure.what();
            sleeper_(options_.initial_backoff * (1 << (attempt - 1)));
        }
    }
    throw GatewayFailure(GatewayFailure::Kind::Exhausted, last_error);
}

std::vector<ChatExchange> Gateway::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::size_t Gateway::requests_issued() const {
    std::lock_guard lock(mutex_);
    return requests_issued_;
}

}  // namespace arena
