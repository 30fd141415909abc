#include "hldx/pipeline.hpp"

#include <algorithm>

#include "hldx/errors.hpp"
#include "hldx/tokenizer.hpp"

namespace hldx {

PipelineResult run_extraction_pipeline(const Document& doc, const std::string& keyword,
                                       const PipelineConfig& cfg, LlmBackend& backend,
                                       const Embedder& embedder, const TemplatePack& templates) {
    SegmenterConfig seg_cfg{cfg.max_tokens_per_segment, cfg.format};
    std::vector<Segment> segments = segment_document(doc, seg_cfg);

    PipelineResult result;
    result.completed_keyword = complete_keyword(keyword, doc.metadata, cfg.mode);
    result.retrieved = top_segments(result.completed_keyword, segments, {cfg.top_n}, embedder,
                                    cfg.parallelism);

    std::vector<Segment> ordered;
    ordered.reserve(result.retrieved.size());
    for (const auto& scored : result.retrieved) ordered.push_back(scored.segment);
    if (!cfg.order_by_similarity) {
        std::sort(ordered.begin(), ordered.end(),
                  [](const Segment& a, const Segment& b) { return a.position < b.position; });
    }

    SummarizeOptions opts;
    opts.parallelism = cfg.parallelism;
    opts.max_output_tokens = cfg.max_output_tokens;
    opts.reduce_budget = cfg.max_tokens_per_segment;
    result.trace = cfg.strategy == SummarizationStrategy::Refine
                       ? refine_summarize(result.completed_keyword, ordered, backend, templates, opts)
                       : map_reduce_summarize(result.completed_keyword, ordered, backend, templates,
                                              opts);

    ShotConfig shots = ShotConfig::defaults(cfg.shot_count);
    result.extraction_prompt = build_extraction_prompt(
        result.completed_keyword, result.trace.final_summary, cfg.variant, shots, templates);
    CompletionResponse response =
        backend.complete({result.extraction_prompt, cfg.max_output_tokens, 0.0});
    result.raw_answer = response.text;
    result.llm_calls = static_cast<int>(result.trace.calls.size()) + 1;
    try {
        result.value = normalize_numeric(response.text, doc.metadata.scale_hint);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotANumber && e.code() != ErrorCode::AmbiguousNumber) throw;
        result.failure = e.what();
    }
    return result;
}

PipelineResult run_naive_pipeline(const Document& doc, const std::string& keyword,
                                  const PipelineConfig& cfg, LlmBackend& backend,
                                  const TemplatePack& templates) {
    if (doc.elements.empty()) {
        throw Error(ErrorCode::EmptyDocument, "document " + doc.id + " has no elements");
    }
    std::string full_text;
    for (const Element& el : doc.elements) {
        std::string piece =
            el.kind == ElementKind::Text ? el.text : serialize_table(el.table, cfg.format);
        if (piece.empty()) continue;
        if (!full_text.empty()) full_text += "\n\n";
        full_text += piece;
    }

    // Head-first truncation at a token boundary.
    size_t cutoff = 0;
    int kept = 0;
    for_each_token(full_text, [&](TokenSpan span) {
        if (kept < cfg.naive_context_tokens) {
            cutoff = span.end;
            ++kept;
        }
    });
    std::string prefix = full_text.substr(0, cutoff);
    if (prefix.empty()) {
        throw Error(ErrorCode::EmptyDocument, "document " + doc.id + " has no tokens");
    }

    PipelineResult result;
    result.completed_keyword = complete_keyword(keyword, doc.metadata, cfg.mode);
    ShotConfig shots = ShotConfig::defaults(cfg.shot_count);
    result.extraction_prompt = build_extraction_prompt(result.completed_keyword, prefix,
                                                       cfg.variant, shots, templates);
    CompletionResponse response =
        backend.complete({result.extraction_prompt, cfg.max_output_tokens, 0.0});
    result.raw_answer = response.text;
    result.llm_calls = 1;
    try {
        result.value = normalize_numeric(response.text, doc.metadata.scale_hint);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotANumber && e.code() != ErrorCode::AmbiguousNumber) throw;
        result.failure = e.what();
    }
    return result;
}

} // namespace hldx
