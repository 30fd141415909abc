#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hldx/document.hpp"
#include "hldx/llm.hpp"
#include "hldx/templates.hpp"

namespace hldx {

// TD-O is the bare task description; R adds the precision requirement,
// S/SP add a worked example (round / full-precision outputs).
enum class PromptVariant { TD_O, TD_R, TD_S, TD_RS, TD_SP, TD_RSP };

enum class CompletionMode { K, K_C, K_T, K_T_C };

const char* variant_name(PromptVariant variant);
std::optional<PromptVariant> variant_from_name(std::string_view name);
const char* mode_name(CompletionMode mode);
std::optional<CompletionMode> mode_from_name(std::string_view name);

struct Shot {
    std::string input;
    std::string output;
};

struct ShotConfig {
    std::vector<Shot> shots; // 0..3 entries

    // Built-in examples; shot_count must be in [0, 3].
    static ShotConfig defaults(int shot_count = 1);
};

struct NormalizedValue {
    double magnitude = 0.0;
    Scale scale_applied = Scale::Unit;
    bool is_percent = false;
    std::string raw; // surface form the value was parsed from
};

// K -> keyword; K_C -> "{keyword} of {company}"; K_T -> "{keyword} in
// {time}"; K_T_C -> "{keyword} of {company} in {time}". Throws
// MissingMetadata naming the absent field.
std::string complete_keyword(const std::string& keyword, const DocMetadata& metadata,
                             CompletionMode mode);

// Composes base task description, then the precision clause (R variants),
// then the variant-intrinsic example (S/SP variants), then the ShotConfig
// examples, separated by blank lines.
std::string build_extraction_prompt(const std::string& completed_keyword, const std::string& summary,
                                    PromptVariant variant, const ShotConfig& shots,
                                    const TemplatePack& templates);

// Resolves a surface form into a comparable magnitude. Strips currency
// symbols and grouping commas; parentheses or a leading minus negate;
// an adjacent scale word multiplies, else doc_scale_hint applies; "%"
// keeps the face value. Exactly one numeric literal is required:
// none -> NotANumber, several -> AmbiguousNumber. Digits glued to the
// tail of a word ("FY2022") do not count as literals.
NormalizedValue normalize_numeric(const std::string& raw, std::optional<Scale> doc_scale_hint);

// Plain decimal rendering (no exponent, no grouping), shortest digits
// that round-trip.
std::string format_plain(double magnitude);

// One backend call on the summary, then normalization. The full response
// text is preserved in NormalizedValue.raw.
NormalizedValue extract_value(const std::string& completed_keyword, const std::string& summary,
                              PromptVariant variant, const ShotConfig& shots,
                              std::optional<Scale> doc_scale_hint, LlmBackend& backend,
                              const TemplatePack& templates, int max_output_tokens = 64);

} // namespace hldx
