#pragma once

#include <string>
#include <vector>

#include "hldx/extraction.hpp"
#include "hldx/segmentation.hpp"
#include "hldx/summarization.hpp"

namespace hldx {

// One knob set for the whole pipeline. Precedence: command-line flag >
// task-level override > config file > these defaults.
struct PipelineConfig {
    SerializationFormat format = SerializationFormat::Plain;
    int max_tokens_per_segment = 512;
    int top_n = 3;
    SummarizationStrategy strategy = SummarizationStrategy::Refine;
    bool order_by_similarity = false; // refine consumes document order by default
    PromptVariant variant = PromptVariant::TD_RSP;
    CompletionMode mode = CompletionMode::K_T_C;
    int shot_count = 1;
    int parallelism = 4;
    int max_output_tokens = 512;
    int naive_context_tokens = 2048; // prefix budget for the truncation baseline

    std::string backend = "scripted"; // scripted | replay | http
    std::string fixture_path;
    std::string cache_path;
    std::string template_dir;
    std::string record_path;
    std::string embedder_url;
    std::string embedder_key;

    std::vector<double> levels = {0.01, 0.03, 0.05, 0.10};

    void validate() const; // throws InvalidConfig
};

// Applies a JSON object of overrides on top of base. Unknown keys and
// out-of-domain values are rejected with InvalidConfig.
PipelineConfig apply_config_json(const PipelineConfig& base, std::string_view json_text);

PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base);

} // namespace hldx
