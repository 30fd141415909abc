#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hldx {

// Prompt templates with {placeholder} substitution. The shipped defaults
// live under templates/ and are compiled in as the builtin pack; a custom
// directory can override any of them file by file.
struct TemplatePack {
    std::string extract_base;     // {keyword} {summary}
    std::string precision_clause; // fixed sentence
    std::string shot_plain;       // fixed example, round output
    std::string shot_precision;   // fixed example, full decimal precision
    std::string refine_init;      // {keyword} {segment}
    std::string refine_step;      // {keyword} {current_summary} {segment}
    std::string map;              // {keyword} {segment}
    std::string reduce;           // {keyword} {map_outputs}

    static TemplatePack builtin();
    static TemplatePack load_dir(const std::string& dir); // StorageError on missing files
};

// Substitutes {name} for every (name, value) pair; throws InvalidConfig if
// a known placeholder survives substitution.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars);

} // namespace hldx
