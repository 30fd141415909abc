#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hldx/errors.hpp"
#include "hldx/evaluation.hpp"
#include "hldx/pipeline.hpp"
#include "json.hpp"

namespace {

using namespace hldx;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::TransportError:
        case ErrorCode::BackendRefused:
        case ErrorCode::EmbedderUnavailable:
            return 4;
        case ErrorCode::MissingMetadata:
        case ErrorCode::NotANumber:
        case ErrorCode::AmbiguousNumber:
        case ErrorCode::NoSegments:
        case ErrorCode::EmptySummary:
        case ErrorCode::NoFixtureMatch:
            return 3;
        default:
            return 2; // input / configuration / storage
    }
}

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MalformedInput, "cannot read file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct PipelineFlags {
    std::string config_file;
    std::string format;
    int max_tokens = 0;
    int top_n = 0;
    std::string strategy;
    bool order_by_similarity = false;
    std::string variant;
    std::string mode;
    int shots = 0;
    int parallelism = 0;
    int max_output_tokens = 0;
    int naive_context_tokens = 0;
    std::string backend;
    std::string fixtures;
    std::string cache;
    std::string templates;
    std::string record;
    std::string levels;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_max_tokens = nullptr;
    CLI::Option* o_top_n = nullptr;
    CLI::Option* o_strategy = nullptr;
    CLI::Option* o_order = nullptr;
    CLI::Option* o_variant = nullptr;
    CLI::Option* o_mode = nullptr;
    CLI::Option* o_shots = nullptr;
    CLI::Option* o_parallelism = nullptr;
    CLI::Option* o_max_output = nullptr;
    CLI::Option* o_naive_ctx = nullptr;
    CLI::Option* o_backend = nullptr;
    CLI::Option* o_fixtures = nullptr;
    CLI::Option* o_cache = nullptr;
    CLI::Option* o_templates = nullptr;
    CLI::Option* o_record = nullptr;
    CLI::Option* o_levels = nullptr;

    void attach(CLI::App* cmd) {
        o_config = cmd->add_option("--config", config_file, "Config file (JSON); HLDX_CONFIG is the fallback");
        o_format = cmd->add_option("--format", format, "Table serialization: plain, csv, xml, html");
        o_max_tokens = cmd->add_option("--max-tokens", max_tokens, "Token budget per segment");
        o_top_n = cmd->add_option("--top-n", top_n, "Segments to retrieve");
        o_strategy = cmd->add_option("--strategy", strategy, "Summarization: refine or map-reduce");
        o_order = cmd->add_flag("--order-by-similarity", order_by_similarity,
                                "Summarize in similarity order instead of document order");
        o_variant = cmd->add_option("--variant", variant, "Extraction prompt variant (TD-O .. TD-RSP)");
        o_mode = cmd->add_option("--mode", mode, "Keyword completion mode (K, K_C, K_T, K_T_C)");
        o_shots = cmd->add_option("--shots", shots, "Few-shot example count (0-3)");
        o_parallelism = cmd->add_option("--parallelism", parallelism, "Concurrent LLM calls / tasks");
        o_max_output = cmd->add_option("--max-output-tokens", max_output_tokens, "Completion size cap");
        o_naive_ctx = cmd->add_option("--naive-context-tokens", naive_context_tokens,
                                      "Prefix budget for the naive baseline");
        o_backend = cmd->add_option("--backend", backend, "LLM backend: scripted, replay, http");
        o_fixtures = cmd->add_option("--fixtures", fixtures, "Fixture/replay JSONL for scripted backends");
        o_cache = cmd->add_option("--cache", cache, "Response cache file (JSONL)");
        o_templates = cmd->add_option("--templates", templates, "Prompt template directory");
        o_record = cmd->add_option("--record", record, "Record completions to this replay file");
        o_levels = cmd->add_option("--levels", levels, "Comma-separated RETA thresholds");
    }

    // Flags must beat task-level overrides, so they are rendered as a
    // JSON override set applied last.
    std::string overrides_json() const {
        json j = json::object();
        if (o_format->count()) j["format"] = format;
        if (o_max_tokens->count()) j["max_tokens_per_segment"] = max_tokens;
        if (o_top_n->count()) j["top_n"] = top_n;
        if (o_strategy->count()) j["strategy"] = strategy;
        if (o_order->count()) j["order_by_similarity"] = order_by_similarity;
        if (o_variant->count()) j["variant"] = variant;
        if (o_mode->count()) j["mode"] = mode;
        if (o_shots->count()) j["shots"] = shots;
        if (o_parallelism->count()) j["parallelism"] = parallelism;
        if (o_max_output->count()) j["max_output_tokens"] = max_output_tokens;
        if (o_naive_ctx->count()) j["naive_context_tokens"] = naive_context_tokens;
        if (o_backend->count()) j["backend"] = backend;
        if (o_fixtures->count()) j["fixtures"] = fixtures;
        if (o_cache->count()) j["cache"] = cache;
        if (o_templates->count()) j["templates"] = templates;
        if (o_record->count()) j["record"] = record;
        if (o_levels->count()) {
            json arr = json::array();
            std::stringstream ss(levels);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) arr.push_back(std::stod(item));
            }
            j["levels"] = arr;
        }
        return j.dump();
    }

    PipelineConfig resolve_base() const {
        PipelineConfig cfg;
        std::string file = config_file;
        if (file.empty()) {
            if (const char* env = std::getenv("HLDX_CONFIG")) file = env;
        }
        if (!file.empty()) cfg = load_config_file(file, cfg);
        return cfg;
    }

    PipelineConfig resolve() const {
        return apply_config_json(resolve_base(), overrides_json());
    }
};

struct MetadataFlags {
    std::string company;
    std::string time;
    std::string scale_hint;

    void attach(CLI::App* cmd) {
        cmd->add_option("--company", company, "Company metadata for keyword completion");
        cmd->add_option("--time", time, "Time-period metadata for keyword completion");
        cmd->add_option("--scale-hint", scale_hint,
                        "Document magnitude: unit, thousand, million, billion");
    }

    void apply(DocMetadata& meta) const {
        if (!company.empty()) meta.company = company;
        if (!time.empty()) meta.time = time;
        if (!scale_hint.empty()) {
            auto s = scale_from_name(scale_hint);
            if (!s) throw Error(ErrorCode::InvalidConfig, "unknown scale hint: " + scale_hint);
            meta.scale_hint = *s;
        }
    }
};

Document load_document(const std::string& path, const MetadataFlags& meta_flags) {
    std::string bytes = read_file_or_throw(path);
    std::filesystem::path p(path);
    Document doc;
    if (p.extension() == ".html" || p.extension() == ".htm") {
        DocMetadata meta;
        meta_flags.apply(meta);
        doc = parse_html_doc(bytes, p.stem().string(), meta);
    } else {
        doc = parse_json_doc(bytes);
        meta_flags.apply(doc.metadata);
    }
    return doc;
}

std::shared_ptr<LlmBackend> make_backend(const PipelineConfig& cfg) {
    std::shared_ptr<LlmBackend> backend;
    if (cfg.backend == "scripted" || cfg.backend == "replay") {
        if (cfg.fixture_path.empty()) {
            throw Error(ErrorCode::InvalidConfig,
                        "backend '" + cfg.backend + "' requires --fixtures");
        }
        backend = std::make_shared<ScriptedBackend>(ScriptedFixture::load(cfg.fixture_path),
                                                    cfg.backend);
    } else {
        HttpBackendConfig http;
        if (const char* url = std::getenv("HLDX_LLM_URL")) http.url = url;
        if (const char* key = std::getenv("HLDX_LLM_KEY")) http.api_key = key;
        if (http.url.empty()) {
            throw Error(ErrorCode::InvalidConfig, "http backend requires HLDX_LLM_URL");
        }
        backend = std::make_shared<HttpLlmBackend>(http);
    }
    if (!cfg.record_path.empty()) {
        backend = std::make_shared<RecordingBackend>(backend, cfg.record_path);
    }
    if (!cfg.cache_path.empty()) {
        backend = std::make_shared<CachingBackend>(backend, cfg.cache_path);
    }
    return backend;
}

TemplatePack make_templates(const PipelineConfig& cfg) {
    return cfg.template_dir.empty() ? TemplatePack::builtin()
                                    : TemplatePack::load_dir(cfg.template_dir);
}

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& cfg) {
    if (cfg.embedder_url.empty()) return nullptr; // use the built-in TF embedder
    return std::make_unique<HttpEmbedder>(cfg.embedder_url, cfg.embedder_key);
}

std::string indices_to_string(const std::vector<int>& indices) {
    std::string out;
    for (size_t i = 0; i < indices.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(indices[i]);
    }
    return out;
}

int cmd_segment(const std::string& doc_path, const PipelineFlags& flags,
                const MetadataFlags& meta_flags) {
    PipelineConfig cfg = flags.resolve();
    Document doc = load_document(doc_path, meta_flags);
    SegmenterConfig seg_cfg{cfg.max_tokens_per_segment, cfg.format};
    std::vector<Segment> segments = segment_document(doc, seg_cfg);
    for (const Segment& s : segments) {
        std::cout << "[segment " << s.position << "] tokens=" << s.token_count
                  << " elements=" << indices_to_string(s.source_indices) << "\n"
                  << s.text << "\n\n";
    }
    return 0;
}

int cmd_extract(const std::string& doc_path, const std::string& keyword, bool as_json,
                const PipelineFlags& flags, const MetadataFlags& meta_flags) {
    PipelineConfig cfg = flags.resolve();
    Document doc = load_document(doc_path, meta_flags);
    auto backend = make_backend(cfg);
    TemplatePack templates = make_templates(cfg);
    auto external_embedder = make_embedder(cfg);
    const Embedder& embedder = external_embedder ? *external_embedder : default_embedder();
    PipelineResult result =
        run_extraction_pipeline(doc, keyword, cfg, *backend, embedder, templates);

    if (as_json) {
        ordered_json j;
        j["completed_keyword"] = result.completed_keyword;
        ordered_json retrieved = ordered_json::array();
        for (const auto& scored : result.retrieved) {
            ordered_json r;
            r["position"] = scored.segment.position;
            r["score"] = scored.score;
            r["elements"] = scored.segment.source_indices;
            retrieved.push_back(std::move(r));
        }
        j["retrieved"] = std::move(retrieved);
        j["summary"] = result.trace.final_summary;
        ordered_json calls = ordered_json::array();
        for (const auto& call : result.trace.calls) calls.push_back(purpose_name(call.purpose));
        j["calls"] = std::move(calls);
        j["raw_answer"] = result.raw_answer;
        j["llm_calls"] = result.llm_calls;
        if (result.value) {
            j["magnitude"] = result.value->magnitude;
            j["scale"] = scale_name(result.value->scale_applied);
            j["is_percent"] = result.value->is_percent;
            j["failure"] = "";
        } else {
            j["failure"] = result.failure;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "keyword:  " << result.completed_keyword << "\n";
        for (const auto& scored : result.retrieved) {
            std::cout << "segment:  #" << scored.segment.position << " score=" << scored.score
                      << " elements=" << indices_to_string(scored.segment.source_indices) << "\n";
        }
        std::cout << "calls:    ";
        for (size_t i = 0; i < result.trace.calls.size(); ++i) {
            if (i > 0) std::cout << ",";
            std::cout << purpose_name(result.trace.calls[i].purpose);
        }
        std::cout << ",extract\n";
        std::cout << "summary:  " << result.trace.final_summary << "\n";
        std::cout << "answer:   " << result.raw_answer << "\n";
        if (result.value) {
            std::cout << "value:    " << format_plain(result.value->magnitude)
                      << (result.value->is_percent ? "%" : "") << "\n";
        }
    }
    if (!result.value) {
        if (!as_json) std::cerr << "extraction failed: " << result.failure << "\n";
        return 3;
    }
    return 0;
}

int cmd_evaluate(const std::string& task_path, const std::string& docs_dir,
                 const std::string& out_dir, const std::string& baseline,
                 const PipelineFlags& flags) {
    PipelineConfig base = flags.resolve_base();
    const std::string flag_overrides = flags.overrides_json();
    PipelineConfig effective = apply_config_json(base, flag_overrides);

    std::vector<ExtractionTask> tasks = parse_task_file(read_file_or_throw(task_path));
    DocumentStore store;
    if (!docs_dir.empty()) store.load_directory(docs_dir);

    auto backend = make_backend(effective);
    TemplatePack templates = make_templates(effective);
    auto external_embedder = make_embedder(effective);
    const Embedder& embedder = external_embedder ? *external_embedder : default_embedder();
    RetaLevels levels{effective.levels};

    std::vector<EvalReport> reports;
    reports.push_back(run_benchmark(tasks, store, levels, *backend, effective, embedder,
                                    templates, false, flag_overrides));
    if (baseline == "naive") {
        reports.push_back(run_benchmark(tasks, store, levels, *backend, effective, embedder,
                                        templates, true, flag_overrides));
    } else if (!baseline.empty()) {
        throw Error(ErrorCode::InvalidConfig, "unknown baseline: " + baseline);
    }

    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_dir + "/" + name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::StorageError, "cannot write " + out_dir + "/" + name);
        out << content;
    };
    write("report.json", report_to_json(reports[0]));
    if (reports.size() > 1) write("naive_report.json", report_to_json(reports[1]));
    write("report.txt", report_to_table(reports));

    std::cout << report_to_table(reports);
    std::cout << "tasks: " << reports[0].task_count << "  llm_calls: " << reports[0].llm_calls
              << "  wall_time: " << reports[0].wall_time_seconds << "s\n";
    return 0;
}

int cmd_cache(const std::string& action, const std::string& cache_path) {
    if (cache_path.empty()) {
        throw Error(ErrorCode::InvalidConfig, "cache command requires --cache");
    }
    if (action == "stats") {
        std::ifstream in(cache_path, std::ios::binary);
        if (!in) {
            std::cout << "entries: 0\nbytes: 0\n";
            return 0;
        }
        size_t entries = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) ++entries;
        }
        std::cout << "entries: " << entries << "\n"
                  << "bytes: " << std::filesystem::file_size(cache_path) << "\n";
        return 0;
    }
    if (action == "clear") {
        std::error_code ec;
        std::filesystem::remove(cache_path, ec);
        if (ec) throw Error(ErrorCode::StorageError, "cannot remove " + cache_path);
        std::cout << "cleared " << cache_path << "\n";
        return 0;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown cache action: " + action);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hldx - keyword value extraction from documents mixing prose and tables"};
    app.require_subcommand(1);

    PipelineFlags seg_flags;
    MetadataFlags seg_meta;
    std::string seg_doc;
    CLI::App* segment = app.add_subcommand("segment", "Split a document into token-budgeted segments");
    segment->add_option("doc", seg_doc, "Document path (.json or .html)")->required();
    seg_flags.attach(segment);
    seg_meta.attach(segment);

    PipelineFlags ext_flags;
    MetadataFlags ext_meta;
    std::string ext_doc;
    std::string ext_keyword;
    bool ext_json = false;
    CLI::App* extract = app.add_subcommand("extract", "Extract one keyword's value from a document");
    extract->add_option("doc", ext_doc, "Document path (.json or .html)")->required();
    extract->add_option("--keyword", ext_keyword, "Keyword to extract")->required();
    extract->add_flag("--json", ext_json, "Emit machine-readable JSON");
    ext_flags.attach(extract);
    ext_meta.attach(extract);

    PipelineFlags eval_flags;
    std::string eval_tasks;
    std::string eval_docs;
    std::string eval_out = "out";
    std::string eval_baseline;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Run a task file and write accuracy reports");
    evaluate->add_option("tasks", eval_tasks, "Task file (JSONL)")->required();
    evaluate->add_option("--docs", eval_docs, "Directory of canonical document JSON files");
    evaluate->add_option("--out", eval_out, "Report output directory");
    evaluate->add_option("--baseline", eval_baseline, "Also run a baseline: naive");
    eval_flags.attach(evaluate);

    std::string cache_action;
    std::string cache_path;
    CLI::App* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
    cache->add_option("action", cache_action, "stats or clear")->required();
    cache->add_option("--cache", cache_path, "Cache file path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (segment->parsed()) return cmd_segment(seg_doc, seg_flags, seg_meta);
        if (extract->parsed()) return cmd_extract(ext_doc, ext_keyword, ext_json, ext_flags, ext_meta);
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_tasks, eval_docs, eval_out, eval_baseline, eval_flags);
        }
        if (cache->parsed()) return cmd_cache(cache_action, cache_path);
    } catch (const hldx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
