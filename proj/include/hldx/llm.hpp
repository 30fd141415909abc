#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "hldx/retrieval.hpp" // HttpPostFn / HttpResult

namespace hldx {

struct CompletionRequest {
    std::string prompt;
    int max_output_tokens = 256;
    double temperature = 0.0; // 0 everywhere for repeatable runs
};

struct CompletionResponse {
    std::string text;
    std::string backend_id;
    bool cached = false;
};

// All backends must tolerate concurrent complete() calls.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
};

uint64_t fnv1a64(std::string_view data);
std::string prompt_hash(std::string_view prompt); // fnv1a64 as fixed-width hex

enum class MatchKind { Hash, Substring };

struct FixtureEntry {
    MatchKind kind = MatchKind::Substring;
    std::string value;    // prompt hash or substring pattern
    std::string response;
};

// Fixture/replay file: JSONL of
//   {"match": {"kind": "hash"|"substring", "value": ...}, "response": ...}
// Matchers are checked in order; first match wins.
struct ScriptedFixture {
    std::vector<FixtureEntry> entries;

    static ScriptedFixture from_jsonl(std::string_view text);
    static ScriptedFixture load(const std::string& path); // StorageError if unreadable
    std::string to_jsonl() const;
    void save(const std::string& path) const;
};

class ScriptedBackend final : public LlmBackend {
public:
    explicit ScriptedBackend(ScriptedFixture fixture, std::string backend_id = "scripted");
    CompletionResponse complete(const CompletionRequest& request) override; // NoFixtureMatch on miss
    std::string id() const override { return id_; }
    int call_count() const { return calls_.load(); }

private:
    ScriptedFixture fixture_;
    std::string id_;
    std::atomic<int> calls_{0};
};

struct RetryPolicy {
    int attempts = 3;
    int initial_backoff_ms = 1000; // doubles per retry
};

struct HttpBackendConfig {
    std::string url;
    std::string api_key;
    RetryPolicy retry;
};

// POST {"prompt","max_tokens","temperature"} -> {"text"}. Connection
// failures and 5xx/429 are retried per policy and end in TransportError;
// other non-200 statuses raise BackendRefused immediately.
class HttpLlmBackend final : public LlmBackend {
public:
    explicit HttpLlmBackend(HttpBackendConfig config, HttpPostFn post = default_http_post());
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string id() const override { return "http"; }

private:
    HttpBackendConfig config_;
    HttpPostFn post_;
};

// Wraps any backend with a persistent response cache. The cache file is
// append-only JSONL of {key, prompt, text, backend_id, timestamp} keyed by
// hash(backend_id + prompt + max_output_tokens + temperature); it is loaded
// once at construction. An empty path keeps the cache purely in memory.
class CachingBackend final : public LlmBackend {
public:
    CachingBackend(std::shared_ptr<LlmBackend> inner, std::string cache_path);
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string id() const override { return inner_->id(); }
    size_t entry_count() const;

    static std::string cache_key(const std::string& backend_id, const CompletionRequest& request);

private:
    std::shared_ptr<LlmBackend> inner_;
    std::string path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
};

// Records every (prompt, response) pair as a hash-matched fixture line so
// a later ScriptedBackend run replays the session without network calls.
class RecordingBackend final : public LlmBackend {
public:
    RecordingBackend(std::shared_ptr<LlmBackend> inner, std::string replay_path);
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<LlmBackend> inner_;
    std::string path_;
    std::mutex mutex_;
};

// Counts completions passing through; used for report aggregates.
class CountingBackend final : public LlmBackend {
public:
    explicit CountingBackend(LlmBackend& inner) : inner_(inner) {}
    CompletionResponse complete(const CompletionRequest& request) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.complete(request);
    }
    std::string id() const override { return inner_.id(); }
    int call_count() const { return calls_.load(); }

private:
    LlmBackend& inner_;
    std::atomic<int> calls_{0};
};

} // namespace hldx
