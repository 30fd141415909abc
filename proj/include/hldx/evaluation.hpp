#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hldx/config.hpp"
#include "hldx/document.hpp"
#include "hldx/llm.hpp"
#include "hldx/pipeline.hpp"
#include "hldx/templates.hpp"

namespace hldx {

// Relative Error Tolerance Accuracy: correct iff |pred - truth| / |truth|
// <= threshold (inclusive). A zero truth demands an exactly-zero
// prediction; a non-finite prediction is never correct.
bool reta_correct(double pred, double truth, double threshold);

// Correct count / total; throws EmptyOutcomes on an empty list.
double accuracy(const std::vector<bool>& outcomes);

// Relative Percentage Difference: |x - y| / ((x + y) / 2). Undefined when
// both accuracies are zero.
double rpd(double acc_x, double acc_y);

struct RetaLevels {
    std::vector<double> thresholds{0.01, 0.03, 0.05, 0.10};

    static RetaLevels standard() { return RetaLevels{}; }
    static RetaLevels fine_grained() { return RetaLevels{{0.0, 0.00001, 0.0001, 0.001}}; }
    void validate() const; // >= 0, strictly increasing
};

struct ExtractionTask {
    std::string doc_ref; // document id or file path
    std::string keyword;
    std::optional<double> numeric_truth;
    std::optional<std::string> string_truth;
    std::string config_overrides; // JSON object text, empty when absent
};

// JSONL, one task per line:
//   {"doc": string, "keyword": string, "truth": number|string, "config"?: {...}}
std::vector<ExtractionTask> parse_task_file(std::string_view jsonl);

class DocumentStore {
public:
    void add(Document doc);
    void load_directory(const std::string& dir); // every *.json, sorted order
    // Loads path-shaped refs on first use; throws DocumentNotFound.
    const Document& ensure(const std::string& ref);
    const Document& get(const std::string& ref) const; // lookup only
    size_t size() const { return docs_.size(); }

private:
    std::vector<std::unique_ptr<Document>> docs_;
    std::unordered_map<std::string, size_t> index_;
};

struct TaskOutcome {
    int index = 0;
    std::string doc_ref;
    std::string keyword;
    std::optional<double> predicted;
    std::optional<std::string> predicted_text; // string-truth tasks
    std::optional<double> relative_error;
    std::vector<bool> correct; // one flag per level
    std::string failure;       // empty on success
    int llm_calls = 0;
};

struct EvalReport {
    std::string method; // "aie" or "naive"
    std::vector<double> levels;
    std::vector<TaskOutcome> tasks;
    std::vector<double> accuracy_per_level;
    double average_accuracy = 0.0; // macro-average over levels
    int task_count = 0;
    int llm_calls = 0;
    double wall_time_seconds = 0.0; // measured; not part of the serialized report
};

// Runs every task through the pipeline (or the truncation baseline) under
// its own config overrides. Per-task failures are recorded, never thrown;
// an unresolvable doc_ref aborts. Tasks run concurrently up to
// base_cfg.parallelism; the report is ordered by task index.
// final_overrides_json (command-line flags) is applied on top of each
// task's own overrides so flags win the precedence chain.
EvalReport run_benchmark(const std::vector<ExtractionTask>& tasks, DocumentStore& docs,
                         const RetaLevels& levels, LlmBackend& backend,
                         const PipelineConfig& base_cfg,
                         const Embedder& embedder = default_embedder(),
                         const TemplatePack& templates = TemplatePack::builtin(),
                         bool naive = false, const std::string& final_overrides_json = "");

// Deterministic serializations; timing is excluded so identical runs
// produce identical bytes.
std::string report_to_json(const EvalReport& report);
std::string report_to_table(const std::vector<EvalReport>& reports);

// "0.01" -> "1%"; exact decimal shifting, no floating-point rounding.
std::string percent_label(double threshold);

} // namespace hldx
