#include "hldx/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "hldx/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace hldx {

namespace {

double sparse_norm(const std::vector<std::pair<std::string, double>>& terms) {
    double sum = 0.0;
    for (const auto& [_, w] : terms) sum += w * w;
    return std::sqrt(sum);
}

double dense_norm(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

} // namespace

Embedding Embedding::sparse(std::vector<std::pair<std::string, double>> terms) {
    std::sort(terms.begin(), terms.end());
    Embedding e;
    e.terms = std::move(terms);
    e.norm = sparse_norm(e.terms);
    return e;
}

Embedding Embedding::from_dense(std::vector<double> values) {
    Embedding e;
    e.dense = std::move(values);
    e.is_dense = true;
    e.norm = dense_norm(e.dense);
    return e;
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    if (a.is_dense != b.is_dense) return 0.0;
    double dot = 0.0;
    if (a.is_dense) {
        size_t n = std::min(a.dense.size(), b.dense.size());
        for (size_t i = 0; i < n; ++i) dot += a.dense[i] * b.dense[i];
    } else {
        size_t i = 0;
        size_t j = 0;
        while (i < a.terms.size() && j < b.terms.size()) {
            int c = a.terms[i].first.compare(b.terms[j].first);
            if (c == 0) {
                dot += a.terms[i].second * b.terms[j].second;
                ++i;
                ++j;
            } else if (c < 0) {
                ++i;
            } else {
                ++j;
            }
        }
    }
    return dot / (a.norm * b.norm);
}

std::vector<Embedding> Embedder::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

Embedding TfEmbedder::embed(const std::string& text) const {
    std::map<std::string, double> counts;
    std::string term;
    auto flush = [&]() {
        if (!term.empty()) {
            counts[term] += 1.0;
            term.clear();
        }
    };
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) != 0 || c >= 0x80) {
            term.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    std::vector<std::pair<std::string, double>> terms(counts.begin(), counts.end());
    return Embedding::sparse(std::move(terms));
}

const Embedder& default_embedder() {
    static const TfEmbedder instance;
    return instance;
}

std::vector<double> score_segments(const std::string& query, const std::vector<Segment>& segments,
                                   const Embedder& embedder, int threads) {
    const Embedding q = embedder.embed(query);
    std::vector<double> scores(segments.size(), 0.0);
    const int n = static_cast<int>(segments.size());
    if (threads == 1) {
        for (int i = 0; i < n; ++i) {
            scores[i] = cosine(q, embedder.embed(segments[i].text));
        }
        return scores;
    }
    if (threads <= 0) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            scores[i] = cosine(q, embedder.embed(segments[i].text));
        }
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int i = 0; i < n; ++i) {
            scores[i] = cosine(q, embedder.embed(segments[i].text));
        }
    }
    return scores;
}

std::vector<ScoredSegment> top_segments(const std::string& query, const std::vector<Segment>& segments,
                                        const RetrievalConfig& cfg, const Embedder& embedder,
                                        int threads) {
    if (segments.empty()) {
        throw Error(ErrorCode::NoSegments, "cannot rank an empty segment list");
    }
    if (cfg.top_n < 1) {
        throw Error(ErrorCode::InvalidConfig, "top_n must be >= 1");
    }
    std::vector<double> scores = score_segments(query, segments, embedder, threads);

    std::vector<size_t> order(segments.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return segments[a].position < segments[b].position;
    });

    size_t keep = std::min(static_cast<size_t>(cfg.top_n), segments.size());
    std::vector<ScoredSegment> out;
    out.reserve(keep);
    for (size_t i = 0; i < keep; ++i) {
        out.push_back(ScoredSegment{segments[order[i]], scores[order[i]]});
    }
    return out;
}

HttpPostFn default_http_post() {
    return [](const std::string& url, const std::string& body,
              const std::vector<std::pair<std::string, std::string>>& headers) -> HttpResult {
        // Split scheme://host[:port] from the path.
        size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) {
            return HttpResult{0, "", "bad url: " + url};
        }
        size_t path_start = url.find('/', scheme_end + 3);
        std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(base);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto res = client.Post(path, h, body, "application/json");
        if (!res) {
            return HttpResult{0, "", httplib::to_string(res.error())};
        }
        return HttpResult{res->status, res->body, ""};
    };
}

HttpEmbedder::HttpEmbedder(std::string url, std::string api_key, HttpPostFn post)
    : url_(std::move(url)), api_key_(std::move(api_key)), post_(std::move(post)) {}

Embedding HttpEmbedder::embed(const std::string& text) const {
    return embed_batch({text}).front();
}

std::vector<Embedding> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) const {
    nlohmann::json req;
    req["texts"] = texts;
    std::vector<std::pair<std::string, std::string>> headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    HttpResult res = post_(url_, req.dump(), headers);
    if (!res.error.empty()) {
        throw Error(ErrorCode::EmbedderUnavailable, "embedder transport: " + res.error);
    }
    if (res.status != 200) {
        throw Error(ErrorCode::EmbedderUnavailable,
                    "embedder returned status " + std::to_string(res.status));
    }
    try {
        auto j = nlohmann::json::parse(res.body);
        auto vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
        if (vectors.size() != texts.size()) {
            throw Error(ErrorCode::EmbedderUnavailable, "embedder returned wrong vector count");
        }
        std::vector<Embedding> out;
        out.reserve(vectors.size());
        for (auto& v : vectors) out.push_back(Embedding::from_dense(std::move(v)));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::EmbedderUnavailable, std::string("bad embedder response: ") + e.what());
    }
}

} // namespace hldx
