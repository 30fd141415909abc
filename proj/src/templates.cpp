#include "hldx/templates.hpp"

#include <fstream>
#include <sstream>

#include "hldx/errors.hpp"

namespace hldx {

namespace {

// Keep in sync with the files under templates/.
constexpr const char* kExtractBase =
    "You are given a summary of a long document that mixes prose and tables.\n"
    "\n"
    "Summary:\n"
    "{summary}\n"
    "\n"
    "State the value of \"{keyword}\" according to the summary. Answer with the single numeric "
    "value only, keeping any scale word (thousand, million, billion), currency symbol, or percent "
    "sign that the summary attaches to it. Do not add commentary.\n";

constexpr const char* kPrecisionClause =
    "Report the value exactly as stated; do not round or truncate digits.\n";

constexpr const char* kShotPlain =
    "Example:\n"
    "Summary: Northwind Ltd. reported total assets of 2,400 million dollars at the end of the "
    "period.\n"
    "Keyword: Total assets of Northwind Ltd. in FY2020\n"
    "Answer: 2,400 million\n";

constexpr const char* kShotPrecision =
    "Example:\n"
    "Summary: Northwind Ltd. reported total assets of 2,437.8 million dollars at the end of the "
    "period.\n"
    "Keyword: Total assets of Northwind Ltd. in FY2020\n"
    "Answer: 2,437.8 million\n";

constexpr const char* kRefineInit =
    "Write a focused summary of the passage below. Keep every statement and figure related to "
    "\"{keyword}\" and preserve all numbers exactly as written.\n"
    "\n"
    "Passage:\n"
    "{segment}\n";

constexpr const char* kRefineStep =
    "Current summary:\n"
    "{current_summary}\n"
    "\n"
    "Revise the current summary using the additional passage below. Keep every statement and "
    "figure related to \"{keyword}\" and preserve all numbers exactly as written.\n"
    "\n"
    "Passage:\n"
    "{segment}\n";

constexpr const char* kMap =
    "Summarize the passage below. Keep every statement and figure related to \"{keyword}\" and "
    "preserve all numbers exactly as written.\n"
    "\n"
    "Passage:\n"
    "{segment}\n";

constexpr const char* kReduce =
    "Combine the partial summaries below into a single summary. Keep every statement and figure "
    "related to \"{keyword}\" and preserve all numbers exactly as written.\n"
    "\n"
    "Partial summaries:\n"
    "{map_outputs}\n";

std::string read_template(const std::string& dir, const std::string& name) {
    std::ifstream in(dir + "/" + name, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::StorageError, "missing template " + dir + "/" + name);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* const kKnownPlaceholders[] = {
    "{keyword}", "{summary}", "{segment}", "{current_summary}", "{map_outputs}",
};

} // namespace

TemplatePack TemplatePack::builtin() {
    TemplatePack pack;
    pack.extract_base = kExtractBase;
    pack.precision_clause = kPrecisionClause;
    pack.shot_plain = kShotPlain;
    pack.shot_precision = kShotPrecision;
    pack.refine_init = kRefineInit;
    pack.refine_step = kRefineStep;
    pack.map = kMap;
    pack.reduce = kReduce;
    return pack;
}

TemplatePack TemplatePack::load_dir(const std::string& dir) {
    TemplatePack pack;
    pack.extract_base = read_template(dir, "extract_base.txt");
    pack.precision_clause = read_template(dir, "precision_clause.txt");
    pack.shot_plain = read_template(dir, "shot_plain.txt");
    pack.shot_precision = read_template(dir, "shot_precision.txt");
    pack.refine_init = read_template(dir, "refine_init.txt");
    pack.refine_step = read_template(dir, "refine_step.txt");
    pack.map = read_template(dir, "map.txt");
    pack.reduce = read_template(dir, "reduce.txt");
    return pack;
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars) {
    std::string out(tmpl);
    for (const auto& [name, value] : vars) {
        const std::string needle = "{" + name + "}";
        size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    for (const char* placeholder : kKnownPlaceholders) {
        bool provided = false;
        for (const auto& [name, value] : vars) {
            (void)value;
            if ("{" + name + "}" == placeholder) {
                provided = true;
                break;
            }
        }
        if (!provided && out.find(placeholder) != std::string::npos) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string("unsubstituted placeholder ") + placeholder);
        }
    }
    return out;
}

} // namespace hldx
