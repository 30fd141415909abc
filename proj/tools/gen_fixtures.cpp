// Regenerates the bundled end-to-end fixtures: a 10-document synthetic
// corpus, 20 extraction tasks, the recorded replay file, and the golden
// reports. Deterministic: rerunning writes byte-identical files.
//
//   gen_fixtures [output-dir]   (default: fixtures/)

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "hldx/errors.hpp"
#include "hldx/evaluation.hpp"
#include "hldx/pipeline.hpp"
#include "json.hpp"

using namespace hldx;
namespace fs = std::filesystem;

namespace {

const char* kCompanies[10] = {
    "Acme Holdings",       "Borealis Industrial", "Cascade Foods",   "Dynamo Energy",
    "Everline Logistics",  "Fairport Media",      "Granite Mining",  "Harbor Financial",
    "Ironwood Pharma",     "Juniper Retail",
};

const char* kYears[10] = {"FY2018", "FY2019", "FY2020", "FY2021", "FY2022",
                          "FY2023", "FY2018", "FY2019", "FY2020", "FY2021"};

// Filler vocabulary deliberately disjoint from the task keywords.
const char* kFiller[] = {
    "the",       "board",     "reviewed",  "strategic", "initiatives", "during",
    "this",      "period",    "and",       "approved",  "additional",  "investments",
    "across",    "regional",  "markets",   "while",     "monitoring",  "regulatory",
    "conditions", "broadly",  "management", "discussed", "supplier",   "relationships",
    "customer",  "engagement", "programs", "alongside", "workforce",   "training",
    "efforts",   "plus",      "community", "partnerships", "sustainability", "reporting",
};

std::string comma_grouped(long value) {
    std::string digits = std::to_string(value);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count > 0 && count % 3 == 0 && *it != '-') out.push_back(',');
        out.push_back(*it);
        ++count;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string filler_text(std::mt19937& rng, int target_tokens) {
    std::string out;
    int tokens = 0;
    std::uniform_int_distribution<size_t> pick(0, std::size(kFiller) - 1);
    std::uniform_int_distribution<int> sentence_len(8, 14);
    while (tokens < target_tokens) {
        int len = sentence_len(rng);
        std::string sentence;
        for (int i = 0; i < len; ++i) {
            if (i > 0) sentence += " ";
            sentence += kFiller[pick(rng)];
        }
        sentence += ".";
        if (!out.empty()) out += " ";
        out += sentence;
        tokens = count_tokens(out);
    }
    return out;
}

struct KpiSpec {
    std::string keyword;
    std::string surface; // exact string the corpus carries and the model echoes
    double truth;        // scale-resolved magnitude
};

struct DocSpec {
    Document doc;
    KpiSpec revenue;
    KpiSpec second; // prose-carried KPI
    std::string distractor_surface;
};

DocSpec build_document(int i, std::mt19937& rng) {
    const bool hinted = i % 2 == 1; // odd docs use a document-level scale hint
    DocSpec spec;
    Document& doc = spec.doc;
    doc.id = "fin" + std::to_string(i);
    doc.metadata.company = kCompanies[i];
    doc.metadata.time = kYears[i];
    if (hinted) doc.metadata.scale_hint = Scale::Thousand;

    long revenue_int = 100000 + 11111L * i;
    bool frac = i % 2 == 0;
    std::string revenue_number = comma_grouped(revenue_int) + (frac ? ".5" : "");
    double revenue_value = static_cast<double>(revenue_int) + (frac ? 0.5 : 0.0);
    if (hinted) {
        spec.revenue = {"Total revenue", revenue_number, revenue_value * 1e3};
    } else {
        spec.revenue = {"Total revenue", revenue_number + " thousand", revenue_value * 1e3};
    }

    long second_int = 50000 + 7333L * i;
    std::string second_number = comma_grouped(second_int);
    if (i == 8) {
        // Parenthesized negative, stated inline in prose.
        spec.second = {"Net income", "(" + second_number + ") million",
                       -static_cast<double>(second_int) * 1e6};
    } else if (i == 9) {
        spec.second = {"Operating margin", "18.6%", 18.6};
    } else if (hinted) {
        spec.second = {"Net income", second_number, static_cast<double>(second_int) * 1e3};
    } else {
        spec.second = {"Net income", second_number + " million",
                       static_cast<double>(second_int) * 1e6};
    }

    long distractor = 12345 + 101L * i;
    spec.distractor_surface =
        hinted ? comma_grouped(distractor) : comma_grouped(distractor) + " thousand";

    // Front matter long enough that the naive 256-token prefix never
    // reaches the KPI table or the prose statements.
    doc.elements.push_back(Element::make_text(filler_text(rng, 150)));
    doc.elements.push_back(Element::make_text(
        "Cash and short term deposits stood at " + spec.distractor_surface +
        " at the start of the period."));
    doc.elements.push_back(Element::make_text(filler_text(rng, 150)));

    Table table;
    table.header_rows = 1;
    table.cells.push_back({"Item", kYears[i]});
    table.cells.push_back({"Total revenue", spec.revenue.surface});
    table.cells.push_back({"Cost of goods sold", comma_grouped(40000 + 900L * i)});
    table.cells.push_back({"Gross profit", comma_grouped(60000 + 800L * i)});
    doc.elements.push_back(Element::make_table(std::move(table)));

    doc.elements.push_back(Element::make_text(filler_text(rng, 90)));
    std::string prose;
    if (i == 9) {
        prose = spec.second.keyword + " of " + kCompanies[i] + " improved to " +
                spec.second.surface + " in " + kYears[i] + ".";
    } else {
        prose = spec.second.keyword + " attributable to " + kCompanies[i] + " was " +
                spec.second.surface + " in " + kYears[i] + ".";
    }
    doc.elements.push_back(Element::make_text(prose));
    doc.elements.push_back(Element::make_text(filler_text(rng, 80)));
    return spec;
}

// Plays the role of the live model during recording: summaries keep every
// digit-bearing content line; extraction echoes the expected surface when
// it is present in the prompt, else falls back to the first number visible
// in the summary section (which is how truncation loses the real answer).
class SyntheticModel final : public LlmBackend {
public:
    void set_expected_surface(std::string surface) { expected_ = std::move(surface); }

    CompletionResponse complete(const CompletionRequest& request) override {
        const std::string& p = request.prompt;
        bool summarize = p.find("Passage:") != std::string::npos ||
                         p.find("Partial summaries:") != std::string::npos;
        if (summarize) return {summarize_response(p), id(), false};
        return {extract_response(p), id(), false};
    }
    std::string id() const override { return "synthetic"; }

private:
    std::string expected_;

    static bool has_digit(const std::string& line) {
        for (char c : line) {
            if (c >= '0' && c <= '9') return true;
        }
        return false;
    }

    static std::vector<std::string> lines_of(const std::string& text) {
        std::vector<std::string> out;
        size_t start = 0;
        while (start <= text.size()) {
            size_t nl = text.find('\n', start);
            if (nl == std::string::npos) {
                out.push_back(text.substr(start));
                break;
            }
            out.push_back(text.substr(start, nl - start));
            start = nl + 1;
        }
        return out;
    }

    std::string summarize_response(const std::string& prompt) const {
        std::string out;
        for (const std::string& line : lines_of(prompt)) {
            if (!has_digit(line)) continue;
            if (line.find("related to \"") != std::string::npos) continue; // instruction line
            if (!out.empty()) out += "\n";
            out += line;
        }
        return out.empty() ? "No relevant figures found." : out;
    }

    std::string extract_response(const std::string& prompt) const {
        if (!expected_.empty() && prompt.find(expected_) != std::string::npos) {
            return expected_;
        }
        // First number in the summary block, with an adjacent scale word.
        size_t begin = prompt.find("Summary:\n");
        size_t end = prompt.find("State the value of");
        if (begin == std::string::npos || end == std::string::npos || end <= begin) {
            return "value not stated";
        }
        std::string region = prompt.substr(begin, end - begin);
        for (size_t i = 0; i < region.size(); ++i) {
            char c = region[i];
            if (c < '0' || c > '9') continue;
            if (i > 0 && (std::isalnum(static_cast<unsigned char>(region[i - 1])) != 0)) {
                while (i < region.size() &&
                       std::isalnum(static_cast<unsigned char>(region[i])) != 0) {
                    ++i;
                }
                continue;
            }
            size_t j = i;
            while (j < region.size() &&
                   (std::isdigit(static_cast<unsigned char>(region[j])) != 0 || region[j] == ',' ||
                    region[j] == '.')) {
                ++j;
            }
            std::string number = region.substr(i, j - i);
            while (!number.empty() && (number.back() == '.' || number.back() == ',')) {
                number.pop_back();
            }
            size_t k = j;
            while (k < region.size() && region[k] == ' ') ++k;
            size_t w = k;
            while (w < region.size() && std::isalpha(static_cast<unsigned char>(region[w])) != 0) {
                ++w;
            }
            std::string word = region.substr(k, w - k);
            if (word == "thousand" || word == "million" || word == "billion") {
                return number + " " + word;
            }
            return number;
        }
        return "value not stated";
    }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::StorageError, "cannot write " + path.string());
    }
    out << content;
}

} // namespace

int main(int argc, char** argv) {
    fs::path out_dir = argc > 1 ? argv[1] : "fixtures";
    fs::create_directories(out_dir / "docs");

    std::mt19937 rng(20240101);
    std::vector<DocSpec> specs;
    for (int i = 0; i < 10; ++i) specs.push_back(build_document(i, rng));

    // Per-task config variety mirroring the benchmark sweep axes.
    const char* task_configs[20] = {
        "",                                            // fin0 revenue
        R"({"strategy":"map-reduce"})",                // fin0 second
        "",                                            // fin1 revenue
        R"({"variant":"TD-O","shots":0})",             // fin1 second
        R"({"format":"csv"})",                         // fin2 revenue
        "",                                            // fin2 second
        R"({"strategy":"map-reduce","top_n":2})",      // fin3 revenue
        "",                                            // fin3 second
        R"({"mode":"K_T"})",                           // fin4 revenue
        "",                                            // fin4 second
        "",                                            // fin5 revenue
        R"({"variant":"TD-SP"})",                      // fin5 second
        R"({"format":"html"})",                        // fin6 revenue
        "",                                            // fin6 second
        "",                                            // fin7 revenue
        R"({"strategy":"map-reduce"})",                // fin7 second
        R"({"shots":3})",                              // fin8 revenue
        "",                                            // fin8 second (negative)
        "",                                            // fin9 revenue
        R"({"top_n":5})",                              // fin9 second (percent)
    };

    std::vector<ExtractionTask> tasks;
    std::vector<const KpiSpec*> kpis;
    for (int i = 0; i < 10; ++i) {
        for (int k = 0; k < 2; ++k) {
            const KpiSpec& kpi = k == 0 ? specs[i].revenue : specs[i].second;
            ExtractionTask task;
            task.doc_ref = specs[i].doc.id;
            task.keyword = kpi.keyword;
            task.numeric_truth = kpi.truth;
            task.config_overrides = task_configs[tasks.size()];
            tasks.push_back(std::move(task));
            kpis.push_back(&kpi);
        }
    }

    PipelineConfig base;
    base.max_tokens_per_segment = 128;
    base.naive_context_tokens = 256;
    base.parallelism = 1; // keeps the recorded fixture order stable

    // Sanity: the naive prefix must contain the distractor but no answer.
    for (int i = 0; i < 10; ++i) {
        std::string full;
        for (const Element& el : specs[i].doc.elements) {
            if (!full.empty()) full += "\n\n";
            full += el.kind == ElementKind::Text ? el.text
                                                 : serialize_table(el.table, base.format);
        }
        size_t cutoff = 0;
        int kept = 0;
        for_each_token(full, [&](TokenSpan span) {
            if (kept < base.naive_context_tokens) {
                cutoff = span.end;
                ++kept;
            }
        });
        std::string prefix = full.substr(0, cutoff);
        if (prefix.find(specs[i].revenue.surface) != std::string::npos ||
            prefix.find(specs[i].second.surface) != std::string::npos) {
            std::cerr << "fixture bug: answer inside the naive prefix of " << specs[i].doc.id
                      << "\n";
            return 1;
        }
        if (prefix.find(specs[i].distractor_surface) == std::string::npos) {
            std::cerr << "fixture bug: distractor missing from the naive prefix of "
                      << specs[i].doc.id << "\n";
            return 1;
        }
    }

    const fs::path replay_path = out_dir / "replay.jsonl";
    fs::remove(replay_path);
    auto model = std::make_shared<SyntheticModel>();
    RecordingBackend recorder(model, replay_path.string());
    TemplatePack templates = TemplatePack::builtin();

    DocumentStore store;
    for (const auto& spec : specs) store.add(spec.doc);

    // Record the AIE pass task by task, verifying each extraction.
    int failures = 0;
    for (size_t t = 0; t < tasks.size(); ++t) {
        model->set_expected_surface(kpis[t]->surface);
        PipelineConfig cfg = base;
        if (!tasks[t].config_overrides.empty()) {
            cfg = apply_config_json(base, tasks[t].config_overrides);
        }
        const Document& doc = store.ensure(tasks[t].doc_ref);
        PipelineResult result = run_extraction_pipeline(doc, tasks[t].keyword, cfg, recorder,
                                                        default_embedder(), templates);
        if (!result.value || result.value->magnitude != *tasks[t].numeric_truth) {
            std::cerr << "task " << t << " (" << tasks[t].doc_ref << ", " << tasks[t].keyword
                      << "): expected " << format_plain(*tasks[t].numeric_truth) << ", got "
                      << (result.value ? format_plain(result.value->magnitude) : result.failure)
                      << "\n";
            ++failures;
        }
    }
    // Record the naive pass; every answer should be a distractor, never the truth.
    for (size_t t = 0; t < tasks.size(); ++t) {
        model->set_expected_surface(""); // truncation lost the real answer
        PipelineConfig cfg = base;
        if (!tasks[t].config_overrides.empty()) {
            cfg = apply_config_json(base, tasks[t].config_overrides);
        }
        const Document& doc = store.ensure(tasks[t].doc_ref);
        PipelineResult result = run_naive_pipeline(doc, tasks[t].keyword, cfg, recorder, templates);
        if (result.value && result.value->magnitude == *tasks[t].numeric_truth) {
            std::cerr << "naive task " << t << " unexpectedly found the truth\n";
            ++failures;
        }
    }
    if (failures > 0) {
        std::cerr << failures << " fixture verification failures\n";
        return 1;
    }

    // Golden reports come from replaying the recorded fixture.
    ScriptedBackend replay(ScriptedFixture::load(replay_path.string()), "replay");
    RetaLevels levels = RetaLevels::standard();
    EvalReport aie = run_benchmark(tasks, store, levels, replay, base);
    EvalReport naive = run_benchmark(tasks, store, levels, replay, base, default_embedder(),
                                     templates, true);
    for (double acc : aie.accuracy_per_level) {
        if (acc != 1.0) {
            std::cerr << "replayed accuracy is not 1.0\n";
            return 1;
        }
    }
    if (naive.accuracy_per_level[0] >= aie.accuracy_per_level[0]) {
        std::cerr << "naive baseline is not strictly worse at the tightest level\n";
        return 1;
    }

    for (const auto& spec : specs) {
        write_file(out_dir / "docs" / (spec.doc.id + ".json"), serialize_json_doc(spec.doc) + "\n");
    }
    std::string task_lines;
    for (size_t t = 0; t < tasks.size(); ++t) {
        nlohmann::ordered_json j;
        j["doc"] = tasks[t].doc_ref;
        j["keyword"] = tasks[t].keyword;
        j["truth"] = *tasks[t].numeric_truth;
        if (!tasks[t].config_overrides.empty()) {
            j["config"] = nlohmann::json::parse(tasks[t].config_overrides);
        }
        task_lines += j.dump() + "\n";
    }
    write_file(out_dir / "tasks.jsonl", task_lines);
    write_file(out_dir / "eval_config.json",
               R"({"max_tokens_per_segment": 128, "naive_context_tokens": 256})"
               "\n");
    write_file(out_dir / "golden_report.json", report_to_json(aie));
    write_file(out_dir / "golden_naive_report.json", report_to_json(naive));
    write_file(out_dir / "golden_report.txt", report_to_table({aie, naive}));

    std::cout << "wrote fixtures to " << out_dir.string() << " (replay entries: "
              << ScriptedFixture::load(replay_path.string()).entries.size() << ")\n";
    return 0;
}
