#pragma once

#include <string>
#include <vector>

#include "hldx/llm.hpp"
#include "hldx/segmentation.hpp"
#include "hldx/templates.hpp"

namespace hldx {

enum class SummarizationStrategy { Refine, MapReduce };

const char* strategy_name(SummarizationStrategy strategy);
std::optional<SummarizationStrategy> strategy_from_name(std::string_view name);

enum class CallPurpose { Init, Refine, Map, Reduce };

const char* purpose_name(CallPurpose purpose);

struct LlmCall {
    CallPurpose purpose;
    std::string prompt;
    std::string response;
};

// Refine over n segments makes exactly n calls (1 Init + n-1 Refine).
// Map-Reduce makes n Map calls plus 1 Reduce when n >= 2, and exactly
// 1 Map call when n == 1. Hierarchical reduction (reduce_budget overflow)
// is the only exception to the Reduce count.
struct SummaryTrace {
    std::string final_summary;
    std::vector<LlmCall> calls;
};

struct SummarizeOptions {
    int parallelism = 4;         // map-phase thread cap
    int max_output_tokens = 512; // per completion request
    int reduce_budget = 0;       // 0 = single reduce regardless of size
};

// Segments are processed in the order given; callers wanting document
// order sort by position first. Backend errors are rethrown with the
// failing call attached to the message.
SummaryTrace refine_summarize(const std::string& keyword, const std::vector<Segment>& segments,
                              LlmBackend& backend, const TemplatePack& templates,
                              const SummarizeOptions& opts = {});

// Map calls run concurrently up to opts.parallelism; outputs reassemble
// by index so the reduce prompt and the trace are order-deterministic.
SummaryTrace map_reduce_summarize(const std::string& keyword, const std::vector<Segment>& segments,
                                  LlmBackend& backend, const TemplatePack& templates,
                                  const SummarizeOptions& opts = {});

} // namespace hldx
