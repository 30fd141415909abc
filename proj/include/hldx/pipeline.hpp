#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hldx/config.hpp"
#include "hldx/document.hpp"
#include "hldx/extraction.hpp"
#include "hldx/llm.hpp"
#include "hldx/retrieval.hpp"
#include "hldx/summarization.hpp"

namespace hldx {

struct PipelineResult {
    std::string completed_keyword;
    std::vector<ScoredSegment> retrieved; // similarity order
    SummaryTrace trace;
    std::string extraction_prompt;
    std::string raw_answer;
    std::optional<NormalizedValue> value; // empty when normalization failed
    std::string failure;                  // normalization failure reason
    int llm_calls = 0;
};

// Full pipeline: segment -> complete keyword -> retrieve -> summarize ->
// extract -> normalize. Backend and input errors propagate; a response
// that fails numeric normalization is recorded in failure instead.
PipelineResult run_extraction_pipeline(const Document& doc, const std::string& keyword,
                                       const PipelineConfig& cfg, LlmBackend& backend,
                                       const Embedder& embedder, const TemplatePack& templates);

// Truncation baseline: serialize the whole document, keep the token
// prefix that fits cfg.naive_context_tokens, prompt once.
PipelineResult run_naive_pipeline(const Document& doc, const std::string& keyword,
                                  const PipelineConfig& cfg, LlmBackend& backend,
                                  const TemplatePack& templates);

} // namespace hldx
