#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

CliResult run_command(const std::string& cmd_line) {
    std::string cmd = cmd_line + " 2>&1";
    std::array<char, 4096> buf{};
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.output.append(buf.data(), n);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

CliResult run_cli(const std::string& args) {
    return run_command(std::string(HLDX_CLI_PATH) + " " + args);
}

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "hldx_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = temp_dir() / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kFixturesDir = std::string(HLDX_SOURCE_DIR) + "/fixtures";

// A config-insensitive fixture: substring matchers answer any pipeline
// shape, so config-precedence effects stay observable.
std::string generic_fixture() {
    return write_temp("generic_fixture.jsonl",
                      R"({"match":{"kind":"substring","value":"Passage:"},"response":"metric was 77 at close"})"
                      "\n"
                      R"({"match":{"kind":"substring","value":"Partial summaries:"},"response":"metric was 77 at close"})"
                      "\n"
                      R"({"match":{"kind":"substring","value":"State the value"},"response":"77"})"
                      "\n");
}

std::string sample_doc() {
    nlohmann::json j;
    j["id"] = "sample";
    j["metadata"] = {{"company", "Acme"}, {"time", "FY2020"}};
    nlohmann::json elements = nlohmann::json::array();
    // Elements are fat enough that none merge under the default budget,
    // leaving six segments to retrieve from.
    for (int i = 0; i < 6; ++i) {
        std::string text;
        for (int w = 0; w < 260; ++w) text += "word" + std::to_string(i) + " ";
        text += "metric was 77 at close.";
        elements.push_back({{"kind", "text"}, {"text", text}});
    }
    j["elements"] = elements;
    return write_temp("sample_doc.json", j.dump());
}

} // namespace

TEST_CASE("segment: prints one block per segment with budget respected") {
    std::string doc = sample_doc();
    CliResult r = run_cli("segment " + doc + " --max-tokens 64");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("[segment 0]") != std::string::npos);
    std::istringstream lines(r.output);
    std::string line;
    int segments = 0;
    while (std::getline(lines, line)) {
        auto pos = line.find("tokens=");
        if (pos == std::string::npos) continue;
        ++segments;
        int tokens = std::stoi(line.substr(pos + 7));
        CHECK(tokens <= 64);
    }
    CHECK(segments >= 2);
}

TEST_CASE("segment: missing file exits 2 and names the path") {
    CliResult r = run_cli("segment /no/such/doc.json");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/no/such/doc.json") != std::string::npos);
}

TEST_CASE("segment: html input is ingested") {
    std::string doc = write_temp("page.html",
                                 "<p>Hello there</p><table><tr><td>A</td><td>1</td></tr></table>");
    CliResult r = run_cli("segment " + doc);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Hello there") != std::string::npos);
    CHECK(r.output.find("A | 1") != std::string::npos);
}

TEST_CASE("extract: scripted backend end to end") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    CliResult r = run_cli("extract " + doc + " --keyword metric --backend scripted --fixtures " +
                          fixture);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("metric of Acme in FY2020") != std::string::npos);
    CHECK(r.output.find("value:    77") != std::string::npos);
}

TEST_CASE("extract: --json emits parseable machine output") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    CliResult r = run_cli("extract " + doc + " --keyword metric --backend scripted --fixtures " +
                          fixture + " --json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("completed_keyword") == "metric of Acme in FY2020");
    CHECK(j.at("magnitude") == 77.0);
    CHECK(j.at("retrieved").size() == 3); // default top_n
    CHECK(j.at("llm_calls") == 4);        // 3 refine + 1 extract
    CHECK(j.at("failure") == "");
}

TEST_CASE("extract: missing metadata for the mode exits 3") {
    std::string doc = write_temp("no_company.json",
                                 R"({"id":"x","elements":[{"kind":"text","text":"metric was 1"}]})");
    std::string fixture = generic_fixture();
    CliResult r = run_cli("extract " + doc +
                          " --keyword metric --mode K_C --backend scripted --fixtures " + fixture);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("MissingMetadata") != std::string::npos);
}

TEST_CASE("extract: map-reduce trace shows maps plus reduce") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    CliResult r = run_cli("extract " + doc +
                          " --keyword metric --strategy map-reduce --backend scripted --fixtures " +
                          fixture + " --json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("llm_calls") == 5); // 3 maps + 1 reduce + 1 extract
    auto calls = j.at("calls");
    REQUIRE(calls.size() == 4);
    CHECK(calls.at(0) == "map");
    CHECK(calls.at(3) == "reduce");
}

TEST_CASE("extract: http backend without an endpoint exits 2") {
    std::string doc = sample_doc();
    CliResult r = run_command("env -u HLDX_LLM_URL " + std::string(HLDX_CLI_PATH) + " extract " +
                              doc + " --keyword metric --backend http");
    CHECK(r.exit_code == 2);
}

TEST_CASE("extract: unreachable endpoint exits 4") {
    std::string doc = sample_doc();
    CliResult r = run_command("HLDX_LLM_URL=http://127.0.0.1:9/c " + std::string(HLDX_CLI_PATH) +
                              " extract " + doc + " --keyword metric --backend http");
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("TransportError") != std::string::npos);
}

TEST_CASE("evaluate: bundled fixtures reproduce the golden reports byte for byte") {
    auto out = temp_dir() / "eval_out";
    fs::remove_all(out);
    CliResult r = run_cli("evaluate " + kFixturesDir + "/tasks.jsonl --docs " + kFixturesDir +
                          "/docs --out " + out.string() + " --config " + kFixturesDir +
                          "/eval_config.json --backend replay --fixtures " + kFixturesDir +
                          "/replay.jsonl --baseline naive");
    CHECK(r.exit_code == 0);
    CHECK(read_file((out / "report.json").string()) ==
          read_file(kFixturesDir + "/golden_report.json"));
    CHECK(read_file((out / "naive_report.json").string()) ==
          read_file(kFixturesDir + "/golden_naive_report.json"));
    CHECK(read_file((out / "report.txt").string()) ==
          read_file(kFixturesDir + "/golden_report.txt"));
}

TEST_CASE("evaluate: --levels controls the report rows") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    std::string tasks = write_temp("tiny_tasks.jsonl",
                                   R"({"doc":")" + doc + R"(","keyword":"metric","truth":77})"
                                   "\n");
    auto out = temp_dir() / "levels_out";
    fs::remove_all(out);
    CliResult r = run_cli("evaluate " + tasks + " --out " + out.string() +
                          " --backend scripted --fixtures " + fixture + " --levels 0,0.001");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(read_file((out / "report.json").string()));
    CHECK(j.at("levels") == nlohmann::json::parse("[0.0, 0.001]"));
    CHECK(j.at("aggregate").at("accuracy_per_level").size() == 2);
    CHECK(r.output.find("RETA 0%") != std::string::npos);
    CHECK(r.output.find("RETA 0.1%") != std::string::npos);
}

TEST_CASE("evaluate: malformed task file exits 2") {
    std::string tasks = write_temp("broken_tasks.jsonl", "this is not json\n");
    CliResult r = run_cli("evaluate " + tasks + " --backend scripted --fixtures " +
                          generic_fixture());
    CHECK(r.exit_code == 2);
}

TEST_CASE("evaluate: per-task failures keep exit code 0") {
    std::string doc = sample_doc();
    std::string fixture = write_temp(
        "nan_fixture.jsonl",
        R"({"match":{"kind":"substring","value":"Passage:"},"response":"nothing numeric"})"
        "\n"
        R"({"match":{"kind":"substring","value":"State the value"},"response":"no answer"})"
        "\n");
    std::string tasks = write_temp("failing_tasks.jsonl",
                                   R"({"doc":")" + doc + R"(","keyword":"metric","truth":77})"
                                   "\n");
    auto out = temp_dir() / "fail_out";
    fs::remove_all(out);
    CliResult r = run_cli("evaluate " + tasks + " --out " + out.string() +
                          " --backend scripted --fixtures " + fixture);
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(read_file((out / "report.json").string()));
    CHECK(j.at("tasks").at(0).at("failure") != "");
    CHECK(j.at("aggregate").at("accuracy_per_level").at(0) == 0.0);
}

TEST_CASE("config precedence: flag beats task override beats config file") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    std::string config = write_temp("prec_config.json", R"({"top_n": 4})");
    std::string tasks = write_temp("prec_tasks.jsonl",
                                   R"({"doc":")" + doc +
                                       R"(","keyword":"metric","truth":77,"config":{"top_n":1}})"
                                       "\n");

    // File only: top_n=4 -> 4 refine + 1 extract.
    auto out1 = temp_dir() / "prec1";
    fs::remove_all(out1);
    std::string tasks_nocfg = write_temp("prec_tasks_plain.jsonl",
                                         R"({"doc":")" + doc + R"(","keyword":"metric","truth":77})"
                                         "\n");
    CliResult r1 = run_cli("evaluate " + tasks_nocfg + " --out " + out1.string() + " --config " +
                           config + " --backend scripted --fixtures " + fixture);
    CHECK(r1.exit_code == 0);
    auto j1 = nlohmann::json::parse(read_file((out1 / "report.json").string()));
    CHECK(j1.at("aggregate").at("llm_calls") == 5);

    // Task override beats the file: top_n=1 -> 2 calls.
    auto out2 = temp_dir() / "prec2";
    fs::remove_all(out2);
    CliResult r2 = run_cli("evaluate " + tasks + " --out " + out2.string() + " --config " + config +
                           " --backend scripted --fixtures " + fixture);
    CHECK(r2.exit_code == 0);
    auto j2 = nlohmann::json::parse(read_file((out2 / "report.json").string()));
    CHECK(j2.at("aggregate").at("llm_calls") == 2);

    // Flag beats both: top_n=2 -> 3 calls.
    auto out3 = temp_dir() / "prec3";
    fs::remove_all(out3);
    CliResult r3 = run_cli("evaluate " + tasks + " --out " + out3.string() + " --config " + config +
                           " --backend scripted --fixtures " + fixture + " --top-n 2");
    CHECK(r3.exit_code == 0);
    auto j3 = nlohmann::json::parse(read_file((out3 / "report.json").string()));
    CHECK(j3.at("aggregate").at("llm_calls") == 3);
}

TEST_CASE("cache: stats and clear") {
    std::string doc = sample_doc();
    std::string fixture = generic_fixture();
    auto cache = temp_dir() / "cli_cache.jsonl";
    fs::remove(cache);

    CliResult r1 = run_cli("extract " + doc + " --keyword metric --backend scripted --fixtures " +
                           fixture + " --cache " + cache.string());
    CHECK(r1.exit_code == 0);
    CliResult stats = run_cli("cache stats --cache " + cache.string());
    CHECK(stats.exit_code == 0);
    CHECK(stats.output.find("entries: 4") != std::string::npos);

    CliResult clear = run_cli("cache clear --cache " + cache.string());
    CHECK(clear.exit_code == 0);
    CHECK_FALSE(fs::exists(cache));
    CliResult stats2 = run_cli("cache stats --cache " + cache.string());
    CHECK(stats2.output.find("entries: 0") != std::string::npos);
}

TEST_CASE("unknown config key in the config file exits 2") {
    std::string doc = sample_doc();
    std::string config = write_temp("bad_config.json", R"({"segment_budget": 64})");
    CliResult r = run_cli("segment " + doc + " --config " + config);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("segment_budget") != std::string::npos);
}
