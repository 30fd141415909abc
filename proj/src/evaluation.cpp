#include "hldx/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hldx/errors.hpp"
#include "hldx/tokenizer.hpp"
#include "json.hpp"

namespace hldx {

bool reta_correct(double pred, double truth, double threshold) {
    if (!std::isfinite(pred)) return false;
    if (truth == 0.0) return pred == 0.0;
    return std::abs(pred - truth) / std::abs(truth) <= threshold;
}

double accuracy(const std::vector<bool>& outcomes) {
    if (outcomes.empty()) {
        throw Error(ErrorCode::EmptyOutcomes, "no outcomes to aggregate");
    }
    size_t correct = 0;
    for (bool b : outcomes) {
        if (b) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double rpd(double acc_x, double acc_y) {
    if (acc_x + acc_y <= 0.0) {
        throw Error(ErrorCode::UndefinedRPD, "both accuracies are zero");
    }
    return std::abs(acc_x - acc_y) / ((acc_x + acc_y) / 2.0);
}

void RetaLevels::validate() const {
    if (thresholds.empty()) {
        throw Error(ErrorCode::InvalidConfig, "at least one RETA level required");
    }
    for (size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0) {
            throw Error(ErrorCode::InvalidConfig, "RETA levels must be >= 0");
        }
        if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
            throw Error(ErrorCode::InvalidConfig, "RETA levels must be strictly increasing");
        }
    }
}

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fold(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char ch : s) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

} // namespace

std::vector<ExtractionTask> parse_task_file(std::string_view jsonl) {
    std::vector<ExtractionTask> tasks;
    size_t start = 0;
    int line_no = 0;
    while (start < jsonl.size()) {
        size_t nl = jsonl.find('\n', start);
        std::string_view line =
            jsonl.substr(start, nl == std::string_view::npos ? nl : nl - start);
        start = nl == std::string_view::npos ? jsonl.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            json j = json::parse(line);
            ExtractionTask task;
            for (const auto& [key, value] : j.items()) {
                if (key == "doc") {
                    task.doc_ref = value.get<std::string>();
                } else if (key == "keyword") {
                    task.keyword = value.get<std::string>();
                } else if (key == "truth") {
                    if (value.is_number()) task.numeric_truth = value.get<double>();
                    else if (value.is_string()) task.string_truth = value.get<std::string>();
                    else throw Error(ErrorCode::MalformedInput, "truth must be number or string");
                } else if (key == "config") {
                    if (!value.is_object()) {
                        throw Error(ErrorCode::MalformedInput, "config must be an object");
                    }
                    task.config_overrides = value.dump();
                } else {
                    throw Error(ErrorCode::MalformedInput, "unknown task key: " + key);
                }
            }
            if (task.doc_ref.empty() || task.keyword.empty()) {
                throw Error(ErrorCode::MalformedInput, "task requires doc and keyword");
            }
            if (!task.numeric_truth && !task.string_truth) {
                throw Error(ErrorCode::MalformedInput, "task requires truth");
            }
            tasks.push_back(std::move(task));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::MalformedInput,
                        "task line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedInput,
                        "task line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return tasks;
}

void DocumentStore::add(Document doc) {
    std::string id = doc.id;
    docs_.push_back(std::make_unique<Document>(std::move(doc)));
    index_[id] = docs_.size() - 1;
}

void DocumentStore::load_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> paths;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    if (ec) {
        throw Error(ErrorCode::StorageError, "cannot list " + dir + ": " + ec.message());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        add(parse_json_doc(ss.str()));
    }
}

const Document& DocumentStore::ensure(const std::string& ref) {
    auto it = index_.find(ref);
    if (it != index_.end()) return *docs_[it->second];
    std::ifstream in(ref, std::ios::binary);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        Document doc = parse_json_doc(ss.str());
        docs_.push_back(std::make_unique<Document>(std::move(doc)));
        index_[ref] = docs_.size() - 1; // keyed by the ref that found it
        return *docs_.back();
    }
    throw Error(ErrorCode::DocumentNotFound, "no document with id or path " + ref);
}

const Document& DocumentStore::get(const std::string& ref) const {
    auto it = index_.find(ref);
    if (it == index_.end()) {
        throw Error(ErrorCode::DocumentNotFound, "no document with id or path " + ref);
    }
    return *docs_[it->second];
}

EvalReport run_benchmark(const std::vector<ExtractionTask>& tasks, DocumentStore& docs,
                         const RetaLevels& levels, LlmBackend& backend,
                         const PipelineConfig& base_cfg, const Embedder& embedder,
                         const TemplatePack& templates, bool naive,
                         const std::string& final_overrides_json) {
    if (tasks.empty()) {
        throw Error(ErrorCode::EmptyOutcomes, "task file contains no tasks");
    }
    levels.validate();

    const int n = static_cast<int>(tasks.size());

    // Resolve documents and per-task configs up front; these failures are
    // input errors, not task outcomes.
    std::vector<const Document*> task_docs(n);
    std::vector<PipelineConfig> task_cfgs(n, base_cfg);
    for (int i = 0; i < n; ++i) {
        task_docs[i] = &docs.ensure(tasks[i].doc_ref);
        if (!tasks[i].config_overrides.empty()) {
            task_cfgs[i] = apply_config_json(base_cfg, tasks[i].config_overrides);
        }
        if (!final_overrides_json.empty()) {
            task_cfgs[i] = apply_config_json(task_cfgs[i], final_overrides_json);
        }
    }

    CountingBackend counting(backend);
    std::vector<TaskOutcome> outcomes(n);

    auto started = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, base_cfg.parallelism))
    for (int i = 0; i < n; ++i) {
        const ExtractionTask& task = tasks[i];
        TaskOutcome outcome;
        outcome.index = i;
        outcome.doc_ref = task.doc_ref;
        outcome.keyword = task.keyword;
        try {
            PipelineResult result =
                naive ? run_naive_pipeline(*task_docs[i], task.keyword, task_cfgs[i], counting,
                                           templates)
                      : run_extraction_pipeline(*task_docs[i], task.keyword, task_cfgs[i],
                                                counting, embedder, templates);
            outcome.llm_calls = result.llm_calls;
            if (task.string_truth) {
                outcome.predicted_text = result.raw_answer;
                bool match = fold(result.raw_answer) == fold(*task.string_truth);
                outcome.correct.assign(levels.thresholds.size(), match);
            } else if (result.value) {
                double pred = result.value->magnitude;
                double truth = *task.numeric_truth;
                outcome.predicted = pred;
                if (truth != 0.0) {
                    outcome.relative_error = std::abs(pred - truth) / std::abs(truth);
                } else if (pred == 0.0) {
                    outcome.relative_error = 0.0;
                }
                outcome.correct.reserve(levels.thresholds.size());
                for (double t : levels.thresholds) {
                    outcome.correct.push_back(reta_correct(pred, truth, t));
                }
            } else {
                outcome.failure = result.failure;
                outcome.correct.assign(levels.thresholds.size(), false);
            }
        } catch (const Error& e) {
            outcome.failure = e.what();
            outcome.correct.assign(levels.thresholds.size(), false);
        } catch (const std::exception& e) {
            outcome.failure = std::string("unexpected: ") + e.what();
            outcome.correct.assign(levels.thresholds.size(), false);
        }
        outcomes[i] = std::move(outcome);
    }
    auto finished = std::chrono::steady_clock::now();

    EvalReport report;
    report.method = naive ? "naive" : "aie";
    report.levels = levels.thresholds;
    report.tasks = std::move(outcomes);
    report.task_count = n;
    report.llm_calls = counting.call_count();
    report.wall_time_seconds = std::chrono::duration<double>(finished - started).count();

    double sum = 0.0;
    for (size_t li = 0; li < levels.thresholds.size(); ++li) {
        std::vector<bool> per_level;
        per_level.reserve(report.tasks.size());
        for (const auto& t : report.tasks) per_level.push_back(t.correct[li]);
        double acc = accuracy(per_level);
        report.accuracy_per_level.push_back(acc);
        sum += acc;
    }
    report.average_accuracy = sum / static_cast<double>(levels.thresholds.size());
    return report;
}

std::string percent_label(double threshold) {
    std::string plain = format_plain(threshold);
    bool negative = !plain.empty() && plain[0] == '-';
    if (negative) plain.erase(0, 1); // thresholds are validated >= 0

    std::string digits = plain;
    int point;
    size_t dot = plain.find('.');
    if (dot == std::string::npos) {
        point = static_cast<int>(plain.size());
    } else {
        digits.erase(dot, 1);
        point = static_cast<int>(dot);
    }
    point += 2; // x100

    std::string out;
    if (point <= 0) {
        out = "0." + std::string(static_cast<size_t>(-point), '0') + digits;
    } else if (static_cast<size_t>(point) >= digits.size()) {
        out = digits + std::string(static_cast<size_t>(point) - digits.size(), '0');
    } else {
        out = digits.substr(0, static_cast<size_t>(point)) + "." +
              digits.substr(static_cast<size_t>(point));
    }
    // Trim cosmetic zeros.
    size_t first_significant = out.find_first_not_of('0');
    if (first_significant == std::string::npos) {
        out = "0";
    } else if (out[first_significant] == '.') {
        out.erase(0, first_significant > 0 ? first_significant - 1 : 0);
    } else {
        out.erase(0, first_significant);
    }
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return out + "%";
}

std::string report_to_json(const EvalReport& report) {
    ordered_json j;
    j["method"] = report.method;
    j["levels"] = report.levels;
    ordered_json aggregate;
    aggregate["task_count"] = report.task_count;
    aggregate["llm_calls"] = report.llm_calls;
    aggregate["accuracy_per_level"] = report.accuracy_per_level;
    aggregate["average_accuracy"] = report.average_accuracy;
    j["aggregate"] = std::move(aggregate);
    ordered_json tasks = ordered_json::array();
    for (const auto& t : report.tasks) {
        ordered_json row;
        row["index"] = t.index;
        row["doc"] = t.doc_ref;
        row["keyword"] = t.keyword;
        if (t.predicted) row["predicted"] = *t.predicted;
        if (t.predicted_text) row["predicted_text"] = *t.predicted_text;
        if (t.relative_error) row["relative_error"] = *t.relative_error;
        row["correct"] = t.correct;
        row["failure"] = t.failure;
        row["llm_calls"] = t.llm_calls;
        tasks.push_back(std::move(row));
    }
    j["tasks"] = std::move(tasks);
    return j.dump(2) + "\n";
}

std::string report_to_table(const std::vector<EvalReport>& reports) {
    if (reports.empty()) return "";
    const auto& levels = reports.front().levels;
    std::vector<std::string> headers{"Method"};
    for (double t : levels) headers.push_back("RETA " + percent_label(t));
    headers.push_back("Average");

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        std::vector<std::string> row;
        row.push_back(r.method == "aie" ? "AIE" : "Naive");
        char buf[32];
        for (double acc : r.accuracy_per_level) {
            std::snprintf(buf, sizeof(buf), "%.4f", acc);
            row.push_back(buf);
        }
        std::snprintf(buf, sizeof(buf), "%.4f", r.average_accuracy);
        row.push_back(buf);
        rows.push_back(std::move(row));
    }

    std::vector<size_t> widths(headers.size());
    for (size_t c = 0; c < headers.size(); ++c) {
        widths[c] = headers[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    std::string out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) {
                out.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out += "\n";
    };
    emit_row(headers);
    for (const auto& row : rows) emit_row(row);
    return out;
}

} // namespace hldx
