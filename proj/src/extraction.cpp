#include "hldx/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "hldx/errors.hpp"

namespace hldx {

const char* variant_name(PromptVariant variant) {
    switch (variant) {
        case PromptVariant::TD_O: return "TD-O";
        case PromptVariant::TD_R: return "TD-R";
        case PromptVariant::TD_S: return "TD-S";
        case PromptVariant::TD_RS: return "TD-RS";
        case PromptVariant::TD_SP: return "TD-SP";
        case PromptVariant::TD_RSP: return "TD-RSP";
    }
    return "TD-O";
}

namespace {

std::string canonical_token(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '-') out.push_back('_');
        else out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

} // namespace

std::optional<PromptVariant> variant_from_name(std::string_view name) {
    std::string t = canonical_token(name);
    if (t == "TD_O") return PromptVariant::TD_O;
    if (t == "TD_R") return PromptVariant::TD_R;
    if (t == "TD_S") return PromptVariant::TD_S;
    if (t == "TD_RS") return PromptVariant::TD_RS;
    if (t == "TD_SP") return PromptVariant::TD_SP;
    if (t == "TD_RSP") return PromptVariant::TD_RSP;
    return std::nullopt;
}

const char* mode_name(CompletionMode mode) {
    switch (mode) {
        case CompletionMode::K: return "K";
        case CompletionMode::K_C: return "K_C";
        case CompletionMode::K_T: return "K_T";
        case CompletionMode::K_T_C: return "K_T_C";
    }
    return "K";
}

std::optional<CompletionMode> mode_from_name(std::string_view name) {
    std::string t = canonical_token(name);
    if (t == "K") return CompletionMode::K;
    if (t == "K_C") return CompletionMode::K_C;
    if (t == "K_T") return CompletionMode::K_T;
    if (t == "K_T_C") return CompletionMode::K_T_C;
    return std::nullopt;
}

ShotConfig ShotConfig::defaults(int shot_count) {
    static const Shot kShots[3] = {
        {"Summary: Orion Corp's filing reports net revenue of 84,733.6 thousand dollars for the "
         "year.\nKeyword: Net revenue of Orion Corp in FY2021",
         "84,733.6 thousand"},
        {"Summary: Cash and equivalents stood at 1,204 million at period end.\nKeyword: Cash and "
         "equivalents of Vega Industries in FY2019",
         "1,204 million"},
        {"Summary: Operating margin improved to 12.75% for the quarter.\nKeyword: Operating "
         "margin of Helios Group in Q3 2020",
         "12.75%"},
    };
    if (shot_count < 0 || shot_count > 3) {
        throw Error(ErrorCode::InvalidConfig, "shot count must be in [0, 3]");
    }
    ShotConfig cfg;
    for (int i = 0; i < shot_count; ++i) cfg.shots.push_back(kShots[i]);
    return cfg;
}

std::string complete_keyword(const std::string& keyword, const DocMetadata& metadata,
                             CompletionMode mode) {
    const bool needs_company = mode == CompletionMode::K_C || mode == CompletionMode::K_T_C;
    const bool needs_time = mode == CompletionMode::K_T || mode == CompletionMode::K_T_C;
    if (needs_company && !metadata.company) {
        throw Error(ErrorCode::MissingMetadata, "company metadata required for mode " +
                                                    std::string(mode_name(mode)));
    }
    if (needs_time && !metadata.time) {
        throw Error(ErrorCode::MissingMetadata,
                    "time metadata required for mode " + std::string(mode_name(mode)));
    }
    switch (mode) {
        case CompletionMode::K: return keyword;
        case CompletionMode::K_C: return keyword + " of " + *metadata.company;
        case CompletionMode::K_T: return keyword + " in " + *metadata.time;
        case CompletionMode::K_T_C:
            return keyword + " of " + *metadata.company + " in " + *metadata.time;
    }
    return keyword;
}

namespace {

std::string trimmed(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    return s.substr(start);
}

} // namespace

std::string build_extraction_prompt(const std::string& completed_keyword, const std::string& summary,
                                    PromptVariant variant, const ShotConfig& shots,
                                    const TemplatePack& templates) {
    if (summary.empty()) {
        throw Error(ErrorCode::EmptySummary, "cannot build an extraction prompt without a summary");
    }
    if (shots.shots.size() > 3) {
        throw Error(ErrorCode::InvalidConfig, "at most 3 shots are supported");
    }
    const bool wants_precision = variant == PromptVariant::TD_R || variant == PromptVariant::TD_RS ||
                                 variant == PromptVariant::TD_RSP;
    const bool wants_plain_shot = variant == PromptVariant::TD_S || variant == PromptVariant::TD_RS;
    const bool wants_precision_shot =
        variant == PromptVariant::TD_SP || variant == PromptVariant::TD_RSP;

    std::vector<std::string> parts;
    parts.push_back(trimmed(render_template(
        templates.extract_base, {{"keyword", completed_keyword}, {"summary", summary}})));
    if (wants_precision) parts.push_back(trimmed(templates.precision_clause));
    if (wants_plain_shot) parts.push_back(trimmed(templates.shot_plain));
    if (wants_precision_shot) parts.push_back(trimmed(templates.shot_precision));
    for (const Shot& shot : shots.shots) {
        parts.push_back("Example:\n" + trimmed(shot.input) + "\nAnswer: " + trimmed(shot.output));
    }

    std::string prompt;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) prompt += "\n\n";
        prompt += parts[i];
    }
    return prompt;
}

namespace {

inline bool ascii_digit(char c) {
    return c >= '0' && c <= '9';
}

inline bool ascii_alnum(char c) {
    return ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Byte length of a currency symbol ending at position end (exclusive), or 0.
size_t currency_ending_at(std::string_view s, size_t end) {
    if (end >= 1 && s[end - 1] == '$') return 1;
    if (end >= 2 && static_cast<unsigned char>(s[end - 2]) == 0xC2 &&
        static_cast<unsigned char>(s[end - 1]) == 0xA3) {
        return 2; // pound sign
    }
    if (end >= 3 && static_cast<unsigned char>(s[end - 3]) == 0xE2 &&
        static_cast<unsigned char>(s[end - 2]) == 0x82 &&
        static_cast<unsigned char>(s[end - 1]) == 0xAC) {
        return 3; // euro sign
    }
    return 0;
}

struct Literal {
    size_t begin = 0;
    size_t end = 0;      // one past the last consumed character
    std::string cleaned; // digits with separators stripped, strtod-ready
};

// Consumes one numeric literal starting at i: digits with comma grouping,
// one decimal point, optional exponent.
Literal consume_literal(std::string_view s, size_t i) {
    Literal lit;
    lit.begin = i;
    bool seen_dot = false;
    size_t j = i;
    if (s[j] == '.') {
        lit.cleaned = "0.";
        seen_dot = true;
        ++j;
    }
    while (j < s.size()) {
        char c = s[j];
        if (ascii_digit(c)) {
            lit.cleaned.push_back(c);
            ++j;
        } else if (c == ',' && !seen_dot && j > lit.begin && ascii_digit(s[j - 1]) &&
                   j + 1 < s.size() && ascii_digit(s[j + 1])) {
            ++j; // grouping separator; only plausible left of the decimal point
        } else if (c == '.' && !seen_dot && j + 1 < s.size() && ascii_digit(s[j + 1])) {
            lit.cleaned.push_back('.');
            seen_dot = true;
            ++j;
        } else {
            break;
        }
    }
    if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        size_t k = j + 1;
        std::string exp = "e";
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) {
            exp.push_back(s[k]);
            ++k;
        }
        if (k < s.size() && ascii_digit(s[k])) {
            while (k < s.size() && ascii_digit(s[k])) {
                exp.push_back(s[k]);
                ++k;
            }
            lit.cleaned += exp;
            j = k;
        }
    }
    lit.end = j;
    return lit;
}

std::optional<Scale> scale_word(std::string_view word) {
    std::string w;
    for (char c : word) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (!w.empty() && w.back() == 's') w.pop_back();
    if (w == "thousand") return Scale::Thousand;
    if (w == "million") return Scale::Million;
    if (w == "billion") return Scale::Billion;
    return std::nullopt;
}

} // namespace

NormalizedValue normalize_numeric(const std::string& raw, std::optional<Scale> doc_scale_hint) {
    std::string_view s(raw);
    std::vector<Literal> literals;

    bool prev_alnum = false;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        bool starts_number =
            (ascii_digit(c) || (c == '.' && i + 1 < s.size() && ascii_digit(s[i + 1]))) &&
            !prev_alnum;
        if (starts_number) {
            literals.push_back(consume_literal(s, i));
            i = literals.back().end;
            prev_alnum = true; // a literal cannot continue into another literal
            continue;
        }
        prev_alnum = ascii_alnum(c);
        ++i;
    }

    if (literals.empty()) {
        throw Error(ErrorCode::NotANumber, "no numeric literal in \"" + raw + "\"");
    }
    if (literals.size() > 1) {
        throw Error(ErrorCode::AmbiguousNumber, std::to_string(literals.size()) +
                                                    " disjoint numeric literals in \"" + raw + "\"");
    }
    const Literal& lit = literals.front();

    // Sign: a minus adjacent to the literal (currency symbols may sit in
    // between), or a balanced pair of parentheses around the whole phrase.
    size_t left = lit.begin;
    while (size_t len = currency_ending_at(s, left)) left -= len;
    bool minus = left > 0 && s[left - 1] == '-';

    size_t paren_left = lit.begin;
    bool open_paren = false;
    while (paren_left > 0) {
        char c = s[paren_left - 1];
        if (c == ' ' || c == '-') {
            --paren_left;
        } else if (size_t len = currency_ending_at(s, paren_left)) {
            paren_left -= len;
        } else {
            open_paren = c == '(';
            break;
        }
    }

    // Right side: optional percent sign or adjacent scale word, which may
    // sit inside or outside a closing parenthesis ("(1,234 million)" and
    // "(1,234) million" both occur in filings).
    size_t p = lit.end;
    bool percent = false;
    std::optional<Scale> inline_scale;
    auto read_suffix = [&]() {
        while (p < s.size() && s[p] == ' ') ++p;
        if (p < s.size() && s[p] == '%') {
            percent = true;
            ++p;
            return;
        }
        size_t w = p;
        while (w < s.size() && ascii_letter(s[w])) ++w;
        if (w > p) {
            inline_scale = scale_word(s.substr(p, w - p));
            if (inline_scale) p = w;
        }
    };
    read_suffix();
    while (p < s.size() && s[p] == ' ') ++p;
    bool close_paren = p < s.size() && s[p] == ')';
    if (close_paren && !percent && !inline_scale) {
        ++p;
        read_suffix();
    }

    NormalizedValue value;
    value.raw = raw;
    value.is_percent = percent;
    if (percent) {
        value.scale_applied = Scale::Unit;
    } else if (inline_scale) {
        value.scale_applied = *inline_scale;
    } else if (doc_scale_hint) {
        value.scale_applied = *doc_scale_hint;
    } else {
        value.scale_applied = Scale::Unit;
    }

    char* parse_end = nullptr;
    double magnitude = std::strtod(lit.cleaned.c_str(), &parse_end);
    if (parse_end == lit.cleaned.c_str() || !std::isfinite(magnitude)) {
        throw Error(ErrorCode::NotANumber, "unparseable numeric literal \"" + lit.cleaned + "\"");
    }
    magnitude *= scale_multiplier(value.scale_applied);
    if (!std::isfinite(magnitude)) {
        throw Error(ErrorCode::NotANumber, "value out of range: \"" + raw + "\"");
    }
    if (minus || (open_paren && close_paren)) magnitude = -magnitude;
    value.magnitude = magnitude;
    return value;
}

std::string format_plain(double magnitude) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), magnitude);
    std::string s(buf, res.ptr);
    size_t e = s.find_first_of("eE");
    if (e == std::string::npos) return s;

    std::string mantissa = s.substr(0, e);
    int exponent = std::atoi(s.c_str() + e + 1);
    bool negative = !mantissa.empty() && mantissa[0] == '-';
    if (negative) mantissa.erase(0, 1);

    std::string digits = mantissa;
    int point;
    size_t dot = mantissa.find('.');
    if (dot == std::string::npos) {
        point = static_cast<int>(mantissa.size());
    } else {
        digits.erase(dot, 1);
        point = static_cast<int>(dot);
    }
    point += exponent;

    std::string out;
    if (point <= 0) {
        out = "0." + std::string(static_cast<size_t>(-point), '0') + digits;
    } else if (static_cast<size_t>(point) >= digits.size()) {
        out = digits + std::string(static_cast<size_t>(point) - digits.size(), '0');
    } else {
        out = digits.substr(0, static_cast<size_t>(point)) + "." +
              digits.substr(static_cast<size_t>(point));
    }
    return negative ? "-" + out : out;
}

NormalizedValue extract_value(const std::string& completed_keyword, const std::string& summary,
                              PromptVariant variant, const ShotConfig& shots,
                              std::optional<Scale> doc_scale_hint, LlmBackend& backend,
                              const TemplatePack& templates, int max_output_tokens) {
    std::string prompt =
        build_extraction_prompt(completed_keyword, summary, variant, shots, templates);
    CompletionResponse response = backend.complete({prompt, max_output_tokens, 0.0});
    return normalize_numeric(response.text, doc_scale_hint);
}

} // namespace hldx
