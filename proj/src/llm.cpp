#include "hldx/llm.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "hldx/errors.hpp"
#include "json.hpp"

namespace hldx {

uint64_t fnv1a64(std::string_view data) {
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string prompt_hash(std::string_view prompt) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(prompt)));
    return std::string(buf);
}

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::StorageError, "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void append_line(const std::string& path, const std::string& line) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::StorageError, "cannot write " + path);
    }
    out << line << "\n";
    out.flush();
    if (!out) {
        throw Error(ErrorCode::StorageError, "write failed for " + path);
    }
}

} // namespace

ScriptedFixture ScriptedFixture::from_jsonl(std::string_view text) {
    ScriptedFixture fixture;
    size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            json j = json::parse(line);
            FixtureEntry entry;
            std::string kind = j.at("match").at("kind").get<std::string>();
            if (kind == "hash") entry.kind = MatchKind::Hash;
            else if (kind == "substring") entry.kind = MatchKind::Substring;
            else throw Error(ErrorCode::MalformedInput, "unknown matcher kind: " + kind);
            entry.value = j.at("match").at("value").get<std::string>();
            entry.response = j.at("response").get<std::string>();
            fixture.entries.push_back(std::move(entry));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::MalformedInput,
                        "fixture line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return fixture;
}

ScriptedFixture ScriptedFixture::load(const std::string& path) {
    return from_jsonl(read_file(path));
}

std::string ScriptedFixture::to_jsonl() const {
    std::string out;
    for (const auto& entry : entries) {
        json j;
        j["match"]["kind"] = entry.kind == MatchKind::Hash ? "hash" : "substring";
        j["match"]["value"] = entry.value;
        j["response"] = entry.response;
        out += j.dump();
        out += "\n";
    }
    return out;
}

void ScriptedFixture::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::StorageError, "cannot write " + path);
    }
    out << to_jsonl();
}

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture, std::string backend_id)
    : fixture_(std::move(fixture)), id_(std::move(backend_id)) {}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& request) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    const std::string hash = prompt_hash(request.prompt);
    for (const auto& entry : fixture_.entries) {
        bool hit = entry.kind == MatchKind::Hash
                       ? entry.value == hash
                       : request.prompt.find(entry.value) != std::string::npos;
        if (hit) {
            return CompletionResponse{entry.response, id_, false};
        }
    }
    throw Error(ErrorCode::NoFixtureMatch,
                "no fixture entry matches prompt (hash " + hash + ", " +
                    std::to_string(fixture_.entries.size()) + " entries)");
}

HttpLlmBackend::HttpLlmBackend(HttpBackendConfig config, HttpPostFn post)
    : config_(std::move(config)), post_(std::move(post)) {}

CompletionResponse HttpLlmBackend::complete(const CompletionRequest& request) {
    json body;
    body["prompt"] = request.prompt;
    body["max_tokens"] = request.max_output_tokens;
    body["temperature"] = request.temperature;
    std::vector<std::pair<std::string, std::string>> headers;
    if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

    const std::string payload = body.dump();
    int backoff_ms = config_.retry.initial_backoff_ms;
    std::string last_failure;
    for (int attempt = 1; attempt <= config_.retry.attempts; ++attempt) {
        HttpResult res = post_(config_.url, payload, headers);
        bool transport_failure = !res.error.empty();
        bool retryable_status = res.status == 429 || (res.status >= 500 && res.status < 600);
        if (!transport_failure && !retryable_status) {
            if (res.status != 200) {
                throw Error(ErrorCode::BackendRefused,
                            "status " + std::to_string(res.status) + ": " + res.body);
            }
            try {
                return CompletionResponse{json::parse(res.body).at("text").get<std::string>(),
                                          id(), false};
            } catch (const json::exception& e) {
                throw Error(ErrorCode::BackendRefused, std::string("bad response body: ") + e.what());
            }
        }
        last_failure = transport_failure ? res.error : "status " + std::to_string(res.status);
        if (attempt < config_.retry.attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    throw Error(ErrorCode::TransportError,
                "giving up after " + std::to_string(config_.retry.attempts) +
                    " attempts: " + last_failure);
}

std::string CachingBackend::cache_key(const std::string& backend_id, const CompletionRequest& request) {
    std::string material = backend_id;
    material.push_back('\x1f');
    material += request.prompt;
    material.push_back('\x1f');
    material += std::to_string(request.max_output_tokens);
    material.push_back('\x1f');
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.17g", request.temperature);
    material += temp;
    return prompt_hash(material);
}

CachingBackend::CachingBackend(std::shared_ptr<LlmBackend> inner, std::string cache_path)
    : inner_(std::move(inner)), path_(std::move(cache_path)) {
    if (path_.empty()) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return; // no cache yet
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            entries_[j.at("key").get<std::string>()] = j.at("text").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::MalformedInput, "corrupt cache line: " + std::string(e.what()));
        }
    }
}

CompletionResponse CachingBackend::complete(const CompletionRequest& request) {
    const std::string key = cache_key(inner_->id(), request);
    {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            return CompletionResponse{it->second, inner_->id(), true};
        }
    }
    CompletionResponse response = inner_->complete(request);
    {
        std::unique_lock lock(mutex_);
        auto [it, inserted] = entries_.emplace(key, response.text);
        (void)it;
        if (inserted && !path_.empty()) {
            json j;
            j["key"] = key;
            j["prompt"] = request.prompt;
            j["text"] = response.text;
            j["backend_id"] = inner_->id();
            j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
            append_line(path_, j.dump());
        }
    }
    return response;
}

size_t CachingBackend::entry_count() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

RecordingBackend::RecordingBackend(std::shared_ptr<LlmBackend> inner, std::string replay_path)
    : inner_(std::move(inner)), path_(std::move(replay_path)) {
    // Fail fast on an unwritable replay path instead of mid-session.
    std::ofstream probe(path_, std::ios::app | std::ios::binary);
    if (!probe) {
        throw Error(ErrorCode::StorageError, "cannot open replay file " + path_);
    }
}

CompletionResponse RecordingBackend::complete(const CompletionRequest& request) {
    CompletionResponse response = inner_->complete(request);
    json j;
    j["match"]["kind"] = "hash";
    j["match"]["value"] = prompt_hash(request.prompt);
    j["response"] = response.text;
    {
        std::lock_guard lock(mutex_);
        append_line(path_, j.dump());
    }
    return response;
}

} // namespace hldx
