#pragma once

// Test-only reference implementations, independent of the library code
// paths they check, plus deterministic random-input generators.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hldx/document.hpp"
#include "hldx/segmentation.hpp"
#include "json.hpp"

namespace ref {

// ---------------------------------------------------------------------
// Brute-force retrieval oracle: term-frequency maps and a direct cosine,
// stable-sorted by (score desc, position asc), truncated to top_n.
// ---------------------------------------------------------------------

inline std::map<std::string, long> tf_map(const std::string& text) {
    std::map<std::string, long> counts;
    std::string term;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) != 0 || c >= 0x80) {
            term.push_back(static_cast<char>(std::tolower(c)));
        } else if (!term.empty()) {
            counts[term] += 1;
            term.clear();
        }
    }
    if (!term.empty()) counts[term] += 1;
    return counts;
}

inline double tf_cosine(const std::map<std::string, long>& a, const std::map<std::string, long>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [t, w] : a) {
        na += static_cast<double>(w) * static_cast<double>(w);
        auto it = b.find(t);
        if (it != b.end()) dot += static_cast<double>(w) * static_cast<double>(it->second);
    }
    for (const auto& [t, w] : b) nb += static_cast<double>(w) * static_cast<double>(w);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct RankedSegment {
    int position = 0;
    double score = 0.0;
};

inline std::vector<RankedSegment> brute_force_rank(const std::string& query,
                                                   const std::vector<hldx::Segment>& segments,
                                                   int top_n) {
    auto q = tf_map(query);
    std::vector<RankedSegment> ranked;
    ranked.reserve(segments.size());
    for (const auto& seg : segments) {
        ranked.push_back({seg.position, tf_cosine(q, tf_map(seg.text))});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedSegment& a, const RankedSegment& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.position < b.position;
    });
    if (static_cast<size_t>(top_n) < ranked.size()) ranked.resize(static_cast<size_t>(top_n));
    return ranked;
}

// ---------------------------------------------------------------------
// Reference numeric parser, token-stream style and regex-free. Tokenizes
// the surface form into words / numbers / symbols first, then interprets
// sign, scale word, percent, and hint.
// ---------------------------------------------------------------------

enum class ParseStatus { Ok, NoNumber, Ambiguous };

struct RefValue {
    ParseStatus status = ParseStatus::NoNumber;
    double magnitude = 0.0;
    bool is_percent = false;
};

namespace detail {

struct Tok {
    enum Kind { Number, Word, Symbol } kind;
    std::string text;
    double value = 0.0;
};

inline bool is_digit(char c) {
    return c >= '0' && c <= '9';
}
inline bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline std::vector<Tok> lex(const std::string& s) {
    std::vector<Tok> toks;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (is_letter(c)) {
            // A word swallows trailing digits, so "FY2022" is one word and
            // its digits never become a literal.
            std::string w;
            while (i < s.size() && (is_letter(s[i]) || is_digit(s[i]))) w.push_back(s[i++]);
            toks.push_back({Tok::Word, w, 0.0});
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
            std::string digits;
            bool dot = false;
            if (c == '.') {
                digits = "0.";
                dot = true;
                ++i;
            }
            while (i < s.size()) {
                if (is_digit(s[i])) {
                    digits.push_back(s[i++]);
                } else if (s[i] == ',' && !dot && !digits.empty() && is_digit(digits.back()) &&
                           i + 1 < s.size() && is_digit(s[i + 1])) {
                    ++i;
                } else if (s[i] == '.' && !dot && i + 1 < s.size() && is_digit(s[i + 1])) {
                    digits.push_back('.');
                    dot = true;
                    ++i;
                } else {
                    break;
                }
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                size_t k = i + 1;
                std::string exp;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) exp.push_back(s[k++]);
                if (k < s.size() && is_digit(s[k])) {
                    while (k < s.size() && is_digit(s[k])) exp.push_back(s[k++]);
                    digits += "e" + exp;
                    i = k;
                }
            }
            // Letters glued to the right become their own word token
            // ("5307million" lexes as number + word).
            toks.push_back({Tok::Number, digits, std::strtod(digits.c_str(), nullptr)});
            continue;
        }
        // Multi-byte currency symbols collapse to one symbol token.
        unsigned char u = static_cast<unsigned char>(c);
        if (u == 0xE2 && i + 2 < s.size()) {
            toks.push_back({Tok::Symbol, "EUR", 0.0});
            i += 3;
            continue;
        }
        if (u == 0xC2 && i + 1 < s.size()) {
            toks.push_back({Tok::Symbol, "GBP", 0.0});
            i += 2;
            continue;
        }
        toks.push_back({Tok::Symbol, std::string(1, c), 0.0});
        ++i;
    }
    return toks;
}

inline std::optional<hldx::Scale> word_scale(std::string w) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!w.empty() && w.back() == 's') w.pop_back();
    if (w == "thousand") return hldx::Scale::Thousand;
    if (w == "million") return hldx::Scale::Million;
    if (w == "billion") return hldx::Scale::Billion;
    return std::nullopt;
}

inline bool is_currency(const Tok& t) {
    return t.kind == Tok::Symbol && (t.text == "$" || t.text == "EUR" || t.text == "GBP");
}

} // namespace detail

inline RefValue reference_normalize(const std::string& raw, std::optional<hldx::Scale> hint) {
    using detail::Tok;
    auto toks = detail::lex(raw);

    std::vector<size_t> numbers;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind == Tok::Number) numbers.push_back(i);
    }
    RefValue out;
    if (numbers.empty()) {
        out.status = ParseStatus::NoNumber;
        return out;
    }
    if (numbers.size() > 1) {
        out.status = ParseStatus::Ambiguous;
        return out;
    }
    const size_t at = numbers.front();

    // Percent / scale word to the right; the suffix may sit inside or
    // outside a closing parenthesis.
    size_t right = at + 1;
    bool percent = false;
    std::optional<hldx::Scale> scale;
    auto read_suffix = [&]() {
        if (right < toks.size() && toks[right].kind == Tok::Symbol && toks[right].text == "%") {
            percent = true;
            ++right;
        } else if (right < toks.size() && toks[right].kind == Tok::Word) {
            scale = detail::word_scale(toks[right].text);
            if (scale) ++right;
        }
    };
    read_suffix();
    bool close = right < toks.size() && toks[right].kind == Tok::Symbol && toks[right].text == ")";
    if (close && !percent && !scale) {
        ++right;
        read_suffix();
    }

    // Sign to the left: minus through currency symbols, or parentheses
    // wrapping the literal together with its percent/scale suffix.
    size_t left = at;
    while (left > 0 && detail::is_currency(toks[left - 1])) --left;
    bool minus = left > 0 && toks[left - 1].kind == Tok::Symbol && toks[left - 1].text == "-";

    size_t pl = at;
    while (pl > 0 && (detail::is_currency(toks[pl - 1]) ||
                      (toks[pl - 1].kind == Tok::Symbol && toks[pl - 1].text == "-"))) {
        --pl;
    }
    bool open = pl > 0 && toks[pl - 1].kind == Tok::Symbol && toks[pl - 1].text == "(";

    double mult = 1.0;
    if (!percent) {
        if (scale) mult = hldx::scale_multiplier(*scale);
        else if (hint) mult = hldx::scale_multiplier(*hint);
    }
    double magnitude = toks[at].value * mult;
    if (minus || (open && close)) magnitude = -magnitude;

    out.status = ParseStatus::Ok;
    out.magnitude = magnitude;
    out.is_percent = percent;
    return out;
}

// ---------------------------------------------------------------------
// Exact markup parse-back for serialize_table round-trips. Understands
// only the tag set the serializer emits and decodes &amp; &lt; &gt;
// in a single left-to-right pass.
// ---------------------------------------------------------------------

inline std::string unescape_markup(std::string_view s) {
    std::string out;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            if (s.compare(i, 5, "&amp;") == 0) {
                out.push_back('&');
                i += 5;
                continue;
            }
            if (s.compare(i, 4, "&lt;") == 0) {
                out.push_back('<');
                i += 4;
                continue;
            }
            if (s.compare(i, 4, "&gt;") == 0) {
                out.push_back('>');
                i += 4;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

// Extracts the cell grid from XML (<row>/<cell>) or HTML (<tr>/<td>,<th>)
// serializations, byte-exact apart from entity decoding.
inline std::vector<std::vector<std::string>> parse_markup_table(const std::string& text, bool html) {
    const std::string row_open = html ? "<tr>" : "<row>";
    const std::string row_close = html ? "</tr>" : "</row>";
    std::vector<std::vector<std::string>> grid;
    size_t pos = 0;
    while (true) {
        size_t r = text.find(row_open, pos);
        if (r == std::string::npos) break;
        size_t rend = text.find(row_close, r);
        std::string_view row(text.data() + r + row_open.size(), rend - r - row_open.size());
        std::vector<std::string> cells;
        size_t cpos = 0;
        while (cpos < row.size()) {
            if (row[cpos] != '<') {
                ++cpos;
                continue;
            }
            size_t open_end = row.find('>', cpos);
            std::string_view tag = row.substr(cpos + 1, open_end - cpos - 1);
            if (tag == "cell" || tag == "td" || tag == "th") {
                std::string close = "</" + std::string(tag) + ">";
                size_t cend = row.find(close, open_end);
                cells.push_back(unescape_markup(row.substr(open_end + 1, cend - open_end - 1)));
                cpos = cend + close.size();
            } else {
                cpos = open_end + 1;
            }
        }
        grid.push_back(std::move(cells));
        pos = rend + row_close.size();
    }
    return grid;
}

// ---------------------------------------------------------------------
// Deterministic random inputs.
// ---------------------------------------------------------------------

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {
        "revenue",  "income",   "assets",   "equity",   "cash",      "segment", "fiscal",
        "quarter",  "growth",   "margin",   "expense",  "liability", "share",   "dividend",
        "report",   "total",    "net",      "gross",    "operating", "balance", "note",
        "interest", "tax",      "goodwill", "deferred", "accrued",   "capital", "lease",
        "hedge",    "currency", "basis",    "retained", "earnings",  "cost",    "sales",
    };
    return words;
}

inline std::string random_word(std::mt19937& rng) {
    const auto& words = vocabulary();
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> kind(0, 9);
    int k = kind(rng);
    if (k == 0) return std::to_string(std::uniform_int_distribution<int>(0, 99999)(rng));
    if (k == 1) return words[pick(rng)] + ",";
    return words[pick(rng)];
}

inline std::string random_sentence(std::mt19937& rng, int max_words) {
    std::uniform_int_distribution<int> len(1, std::max(1, max_words));
    std::uniform_int_distribution<int> ending(0, 3);
    int n = len(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += " ";
        out += random_word(rng);
    }
    switch (ending(rng)) {
        case 0: out += "."; break;
        case 1: out += "!"; break;
        case 2: out += "?"; break;
        default: break;
    }
    return out;
}

inline std::string random_text(std::mt19937& rng, int max_sentences) {
    std::uniform_int_distribution<int> count(0, max_sentences);
    int n = count(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? "\n" : " ";
        out += random_sentence(rng, 24);
    }
    return out;
}

inline std::string random_cell(std::mt19937& rng) {
    std::uniform_int_distribution<int> kind(0, 6);
    switch (kind(rng)) {
        case 0: return "";
        case 1: return std::to_string(std::uniform_int_distribution<int>(-5000, 100000)(rng));
        case 2: return random_word(rng) + " & " + random_word(rng);
        case 3: return "<" + random_word(rng) + ">";
        case 4: return random_word(rng) + ", " + random_word(rng);
        default: return random_word(rng);
    }
}

inline hldx::Table random_table(std::mt19937& rng, int max_rows = 8, int max_cols = 5) {
    std::uniform_int_distribution<int> rows_d(1, max_rows);
    std::uniform_int_distribution<int> cols_d(1, max_cols);
    int rows = rows_d(rng);
    int cols = cols_d(rng);
    hldx::Table t;
    for (int r = 0; r < rows; ++r) {
        std::vector<std::string> row;
        for (int c = 0; c < cols; ++c) row.push_back(random_cell(rng));
        t.cells.push_back(std::move(row));
    }
    t.header_rows = std::uniform_int_distribution<int>(0, std::min(2, rows))(rng);
    return t;
}

// Canonical-JSON document text whose table rows may be ragged, so parsing
// exercises the padding rule.
inline std::string random_document_json(std::mt19937& rng, const std::string& id) {
    nlohmann::json j;
    j["id"] = id;
    nlohmann::json meta = nlohmann::json::object();
    if (std::uniform_int_distribution<int>(0, 1)(rng)) meta["company"] = random_word(rng);
    if (std::uniform_int_distribution<int>(0, 1)(rng)) meta["time"] = "FY202" + std::to_string(rng() % 10);
    j["metadata"] = meta;
    nlohmann::json elements = nlohmann::json::array();
    std::uniform_int_distribution<int> n_elements(1, 10);
    std::uniform_int_distribution<int> kind(0, 3);
    int n = n_elements(rng);
    for (int i = 0; i < n; ++i) {
        nlohmann::json e;
        if (kind(rng) == 0) {
            hldx::Table t = random_table(rng);
            // Drop trailing cells from some rows to make them ragged.
            nlohmann::json cells = nlohmann::json::array();
            for (auto& row : t.cells) {
                size_t keep = 1 + rng() % row.size();
                nlohmann::json r = nlohmann::json::array();
                for (size_t c = 0; c < keep; ++c) r.push_back(row[c]);
                cells.push_back(std::move(r));
            }
            e["kind"] = "table";
            e["header_rows"] = t.header_rows;
            e["cells"] = std::move(cells);
        } else {
            e["kind"] = "text";
            e["text"] = random_text(rng, 20);
        }
        elements.push_back(std::move(e));
    }
    j["elements"] = std::move(elements);
    return j.dump();
}

inline hldx::Document random_document(std::mt19937& rng, const std::string& id) {
    std::uniform_int_distribution<int> n_elements(1, 10);
    std::uniform_int_distribution<int> kind(0, 3);
    hldx::Document doc;
    doc.id = id;
    int n = n_elements(rng);
    for (int i = 0; i < n; ++i) {
        if (kind(rng) == 0) {
            doc.elements.push_back(hldx::Element::make_table(random_table(rng)));
        } else {
            doc.elements.push_back(hldx::Element::make_text(random_text(rng, 20)));
        }
    }
    return doc;
}

} // namespace ref
