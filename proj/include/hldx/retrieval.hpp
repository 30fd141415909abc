#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hldx/segmentation.hpp"

namespace hldx {

// Sparse term-frequency vector (terms sorted) or a dense vector from an
// external embedder. norm caches the Euclidean norm; zero vectors are legal.
struct Embedding {
    std::vector<std::pair<std::string, double>> terms;
    std::vector<double> dense;
    bool is_dense = false;
    double norm = 0.0;

    static Embedding sparse(std::vector<std::pair<std::string, double>> terms);
    static Embedding from_dense(std::vector<double> values);
};

// Cosine similarity; 0 when either norm is 0. Sparse and dense embeddings
// do not mix (one embedder serves a whole pipeline), mixing scores 0.
double cosine(const Embedding& a, const Embedding& b);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(const std::string& text) const = 0;
    virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;
};

// Default embedder: lowercases, keeps alphanumeric runs (symbols are
// discarded), exact term-frequency weights. No hashing, so zero/one cosine
// cases are analytically exact.
class TfEmbedder final : public Embedder {
public:
    Embedding embed(const std::string& text) const override;
};

const Embedder& default_embedder();

struct RetrievalConfig {
    int top_n = 3;
};

struct ScoredSegment {
    Segment segment;
    double score = 0.0;
};

// Cosine scores in segment order. threads > 1 embeds segments in an
// OpenMP loop; 1 forces the serial path; 0 uses the OpenMP default.
std::vector<double> score_segments(const std::string& query, const std::vector<Segment>& segments,
                                   const Embedder& embedder = default_embedder(), int threads = 0);

// Returns min(top_n, n) segments by descending score; ties broken by
// ascending segment position. Throws NoSegments on an empty list.
std::vector<ScoredSegment> top_segments(const std::string& query, const std::vector<Segment>& segments,
                                        const RetrievalConfig& cfg,
                                        const Embedder& embedder = default_embedder(), int threads = 0);

// Client for an external embedding service: POST {"texts":[...]} returns
// {"vectors":[[...]]}. Failures surface as EmbedderUnavailable.
struct HttpResult {
    int status = 0;
    std::string body;
    std::string error; // non-empty on transport failure
};

using HttpPostFn = std::function<HttpResult(const std::string& url, const std::string& body,
                                            const std::vector<std::pair<std::string, std::string>>& headers)>;

HttpPostFn default_http_post();

class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(std::string url, std::string api_key, HttpPostFn post = default_http_post());
    Embedding embed(const std::string& text) const override;
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override;

private:
    std::string url_;
    std::string api_key_;
    HttpPostFn post_;
};

} // namespace hldx
