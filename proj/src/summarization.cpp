#include "hldx/summarization.hpp"

#include <algorithm>
#include <exception>

#include "hldx/errors.hpp"
#include "hldx/tokenizer.hpp"

namespace hldx {

const char* strategy_name(SummarizationStrategy strategy) {
    return strategy == SummarizationStrategy::Refine ? "refine" : "map-reduce";
}

std::optional<SummarizationStrategy> strategy_from_name(std::string_view name) {
    if (name == "refine") return SummarizationStrategy::Refine;
    if (name == "map-reduce" || name == "mapreduce" || name == "map_reduce") {
        return SummarizationStrategy::MapReduce;
    }
    return std::nullopt;
}

const char* purpose_name(CallPurpose purpose) {
    switch (purpose) {
        case CallPurpose::Init: return "init";
        case CallPurpose::Refine: return "refine";
        case CallPurpose::Map: return "map";
        case CallPurpose::Reduce: return "reduce";
    }
    return "?";
}

namespace {

[[noreturn]] void rethrow_with_call(const Error& e, CallPurpose purpose, size_t index) {
    throw Error(e.code(), std::string(purpose_name(purpose)) + " call " + std::to_string(index) +
                              ": " + e.what());
}

std::string join_outputs(const std::vector<std::string>& outputs, size_t begin, size_t end) {
    std::string joined;
    for (size_t i = begin; i < end; ++i) {
        if (i > begin) joined += "\n\n";
        joined += outputs[i];
    }
    return joined;
}

} // namespace

SummaryTrace refine_summarize(const std::string& keyword, const std::vector<Segment>& segments,
                              LlmBackend& backend, const TemplatePack& templates,
                              const SummarizeOptions& opts) {
    if (segments.empty()) {
        throw Error(ErrorCode::NoSegments, "refine needs at least one segment");
    }
    SummaryTrace trace;
    std::string summary;
    for (size_t i = 0; i < segments.size(); ++i) {
        std::string prompt =
            i == 0 ? render_template(templates.refine_init, {{"keyword", keyword},
                                                             {"segment", segments[i].text}})
                   : render_template(templates.refine_step, {{"keyword", keyword},
                                                             {"current_summary", summary},
                                                             {"segment", segments[i].text}});
        CallPurpose purpose = i == 0 ? CallPurpose::Init : CallPurpose::Refine;
        try {
            CompletionResponse resp = backend.complete({prompt, opts.max_output_tokens, 0.0});
            summary = resp.text;
            trace.calls.push_back(LlmCall{purpose, std::move(prompt), resp.text});
        } catch (const Error& e) {
            rethrow_with_call(e, purpose, i);
        }
    }
    trace.final_summary = summary;
    return trace;
}

namespace {

// Greedy batches for hierarchical reduction; guarantees every round
// shrinks the output list so the recursion terminates.
std::vector<std::pair<size_t, size_t>> reduce_batches(const std::vector<std::string>& outputs,
                                                      int budget) {
    std::vector<std::pair<size_t, size_t>> batches;
    size_t begin = 0;
    while (begin < outputs.size()) {
        size_t end = begin + 1;
        int tokens = count_tokens(outputs[begin]);
        while (end < outputs.size()) {
            int next = count_tokens(outputs[end]);
            if (tokens + next > budget) break;
            tokens += next;
            ++end;
        }
        batches.emplace_back(begin, end);
        begin = end;
    }
    if (batches.size() == outputs.size() && outputs.size() > 1) {
        batches.clear();
        for (size_t i = 0; i < outputs.size(); i += 2) {
            batches.emplace_back(i, std::min(i + 2, outputs.size()));
        }
    }
    return batches;
}

} // namespace

SummaryTrace map_reduce_summarize(const std::string& keyword, const std::vector<Segment>& segments,
                                  LlmBackend& backend, const TemplatePack& templates,
                                  const SummarizeOptions& opts) {
    if (segments.empty()) {
        throw Error(ErrorCode::NoSegments, "map-reduce needs at least one segment");
    }
    const int n = static_cast<int>(segments.size());
    std::vector<std::string> prompts(n);
    for (int i = 0; i < n; ++i) {
        prompts[i] = render_template(templates.map,
                                     {{"keyword", keyword}, {"segment", segments[i].text}});
    }

    std::vector<std::string> responses(n);
    std::vector<std::exception_ptr> failures(n);
    const int threads = std::max(1, std::min(opts.parallelism, n));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        try {
            responses[i] = backend.complete({prompts[i], opts.max_output_tokens, 0.0}).text;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (int i = 0; i < n; ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const Error& e) {
                rethrow_with_call(e, CallPurpose::Map, static_cast<size_t>(i));
            }
        }
    }

    SummaryTrace trace;
    for (int i = 0; i < n; ++i) {
        trace.calls.push_back(LlmCall{CallPurpose::Map, std::move(prompts[i]), responses[i]});
    }
    if (n == 1) {
        trace.final_summary = responses[0];
        return trace;
    }

    std::vector<std::string> outputs = std::move(responses);
    size_t reduce_index = 0;
    while (true) {
        std::string joined = join_outputs(outputs, 0, outputs.size());
        bool overflow = opts.reduce_budget > 0 && outputs.size() > 1 &&
                        count_tokens(joined) > opts.reduce_budget;
        if (!overflow) {
            std::string prompt = render_template(
                templates.reduce, {{"keyword", keyword}, {"map_outputs", joined}});
            try {
                CompletionResponse resp = backend.complete({prompt, opts.max_output_tokens, 0.0});
                trace.calls.push_back(LlmCall{CallPurpose::Reduce, std::move(prompt), resp.text});
                trace.final_summary = resp.text;
            } catch (const Error& e) {
                rethrow_with_call(e, CallPurpose::Reduce, reduce_index);
            }
            return trace;
        }
        std::vector<std::string> next;
        for (const auto& [begin, end] : reduce_batches(outputs, opts.reduce_budget)) {
            if (end - begin == 1) {
                next.push_back(outputs[begin]); // nothing to merge in this batch
                continue;
            }
            std::string prompt = render_template(
                templates.reduce,
                {{"keyword", keyword}, {"map_outputs", join_outputs(outputs, begin, end)}});
            try {
                CompletionResponse resp = backend.complete({prompt, opts.max_output_tokens, 0.0});
                trace.calls.push_back(LlmCall{CallPurpose::Reduce, std::move(prompt), resp.text});
                next.push_back(resp.text);
                ++reduce_index;
            } catch (const Error& e) {
                rethrow_with_call(e, CallPurpose::Reduce, reduce_index);
            }
        }
        outputs = std::move(next);
        if (outputs.size() == 1) {
            trace.final_summary = outputs[0];
            return trace;
        }
    }
}

} // namespace hldx
