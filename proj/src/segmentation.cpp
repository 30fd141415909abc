#include "hldx/segmentation.hpp"

#include <algorithm>
#include <cctype>

#include "hldx/errors.hpp"

namespace hldx {

const char* format_name(SerializationFormat format) {
    switch (format) {
        case SerializationFormat::Plain: return "plain";
        case SerializationFormat::Csv: return "csv";
        case SerializationFormat::Xml: return "xml";
        case SerializationFormat::Html: return "html";
    }
    return "plain";
}

std::optional<SerializationFormat> format_from_name(std::string_view name) {
    if (name == "plain") return SerializationFormat::Plain;
    if (name == "csv") return SerializationFormat::Csv;
    if (name == "xml") return SerializationFormat::Xml;
    if (name == "html") return SerializationFormat::Html;
    return std::nullopt;
}

namespace {

std::string escape_markup(std::string_view cell) {
    std::string out;
    out.reserve(cell.size());
    for (char c : cell) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string csv_cell(std::string_view cell) {
    bool needs_quotes = cell.find_first_of(",\"\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(cell);
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace

std::string serialize_table(const Table& table, SerializationFormat format) {
    std::vector<std::string> lines;
    lines.reserve(table.cells.size());
    for (size_t r = 0; r < table.cells.size(); ++r) {
        const auto& row = table.cells[r];
        std::string line;
        switch (format) {
            case SerializationFormat::Plain: {
                for (size_t c = 0; c < row.size(); ++c) {
                    if (c > 0) line += " | ";
                    line += row[c];
                }
                break;
            }
            case SerializationFormat::Csv: {
                for (size_t c = 0; c < row.size(); ++c) {
                    if (c > 0) line += ",";
                    line += csv_cell(row[c]);
                }
                break;
            }
            case SerializationFormat::Xml: {
                line = "<row>";
                for (const auto& cell : row) {
                    line += "<cell>" + escape_markup(cell) + "</cell>";
                }
                line += "</row>";
                break;
            }
            case SerializationFormat::Html: {
                const char* tag = static_cast<int>(r) < table.header_rows ? "th" : "td";
                line = "<tr>";
                for (const auto& cell : row) {
                    line += "<" + std::string(tag) + ">" + escape_markup(cell) + "</" + tag + ">";
                }
                line += "</tr>";
                break;
            }
        }
        lines.push_back(std::move(line));
    }
    std::string body = join(lines, "\n");
    if (format == SerializationFormat::Xml || format == SerializationFormat::Html) {
        return "<table>" + body + "</table>";
    }
    return body;
}

namespace {

// A unit is a substring of the original text trimmed to its token extent.
// Units pack into pieces as contiguous substrings of the source, so the
// text between units survives whenever both sides land in the same piece.
struct Unit {
    size_t begin = 0;
    size_t end = 0;
    int tokens = 0;
};

std::vector<Unit> trim_to_tokens(std::string_view text, size_t begin, size_t end, const Tokenizer& tok) {
    std::string_view slice = text.substr(begin, end - begin);
    size_t first = std::string_view::npos;
    size_t last = 0;
    for_each_token(slice, [&](TokenSpan s) {
        if (first == std::string_view::npos) first = s.begin;
        last = s.end;
    });
    if (first == std::string_view::npos) return {};
    Unit u{begin + first, begin + last, 0};
    u.tokens = tok.count(text.substr(u.begin, u.end - u.begin));
    return {u};
}

// Splits an oversized unit into fragments of at most budget tokens,
// cutting only at the run-token boundaries the splitter understands;
// fragment counts come from the active tokenizer.
std::vector<Unit> hard_split_unit(std::string_view text, const Unit& unit, int budget,
                                  const Tokenizer& tok) {
    std::vector<TokenSpan> spans;
    for_each_token(text.substr(unit.begin, unit.end - unit.begin), [&](TokenSpan s) {
        spans.push_back({unit.begin + s.begin, unit.begin + s.end});
    });
    auto count_range = [&](size_t i, size_t j) { // spans [i, j)
        return tok.count(text.substr(spans[i].begin, spans[j - 1].end - spans[i].begin));
    };
    std::vector<Unit> out;
    size_t i = 0;
    while (i < spans.size()) {
        size_t lo = i + 1;
        size_t hi = spans.size();
        // Largest j with count(i, j) <= budget; always take at least one span.
        while (lo < hi) {
            size_t mid = lo + (hi - lo + 1) / 2;
            if (count_range(i, mid) <= budget) lo = mid;
            else hi = mid - 1;
        }
        out.push_back(Unit{spans[i].begin, spans[lo - 1].end, count_range(i, lo)});
        i = lo;
    }
    return out;
}

std::vector<Unit> sentence_units(std::string_view text, const Tokenizer& tok, int budget) {
    std::vector<Unit> units;
    size_t start = 0;
    size_t i = 0;
    const size_t n = text.size();
    auto close_unit = [&](size_t end) {
        for (const Unit& u : trim_to_tokens(text, start, end, tok)) {
            if (u.tokens > budget) {
                auto frags = hard_split_unit(text, u, budget, tok);
                units.insert(units.end(), frags.begin(), frags.end());
            } else {
                units.push_back(u);
            }
        }
        start = end;
    };
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            close_unit(i + 1);
            ++i;
            continue;
        }
        if ((c == '.' || c == '!' || c == '?') && i + 1 < n && text[i + 1] == ' ') {
            close_unit(i + 1);
            ++i;
            continue;
        }
        ++i;
    }
    if (start < n) close_unit(n);
    return units;
}

std::vector<std::string> pack_units(std::string_view text, const std::vector<Unit>& units, int budget) {
    std::vector<std::string> pieces;
    size_t first = 0;
    while (first < units.size()) {
        size_t last = first;
        int total = units[first].tokens;
        while (last + 1 < units.size() && total + units[last + 1].tokens <= budget) {
            ++last;
            total += units[last].tokens;
        }
        pieces.emplace_back(text.substr(units[first].begin, units[last].end - units[first].begin));
        first = last + 1;
    }
    return pieces;
}

} // namespace

std::vector<std::string> split_element(const std::string& text, const SegmenterConfig& cfg,
                                       const Tokenizer& tok) {
    const int budget = cfg.max_tokens_per_segment;
    if (tok.count(text) <= budget) return {text};
    auto units = sentence_units(text, tok, budget);
    return pack_units(text, units, budget);
}

std::vector<std::string> split_table_element(const std::string& serialized, int header_lines,
                                             const SegmenterConfig& cfg, const Tokenizer& tok) {
    const int budget = cfg.max_tokens_per_segment;
    if (tok.count(serialized) <= budget) return {serialized};

    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= serialized.size()) {
        size_t nl = serialized.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(serialized.substr(start));
            break;
        }
        lines.push_back(serialized.substr(start, nl - start));
        start = nl + 1;
    }

    std::string header;
    int header_tokens = 0;
    if (header_lines > 0 && static_cast<size_t>(header_lines) < lines.size()) {
        std::vector<std::string> head(lines.begin(), lines.begin() + header_lines);
        header = join(head, "\n");
        header_tokens = tok.count(header);
        if (header_tokens >= budget) {
            // Header alone would exhaust the budget; repeat nothing.
            header.clear();
            header_tokens = 0;
        }
    }

    std::vector<std::string> chunks;
    std::string current;
    int current_tokens = 0;
    bool first_chunk = true;

    auto close_chunk = [&]() {
        if (!current.empty()) chunks.push_back(current);
        first_chunk = false;
        current = header;
        current_tokens = header_tokens;
    };

    auto append_line = [&](const std::string& line, int line_tokens) {
        if (!current.empty()) current += "\n";
        current += line;
        current_tokens += line_tokens;
    };

    for (size_t li = 0; li < lines.size(); ++li) {
        int line_tokens = tok.count(lines[li]);
        if (line_tokens == 0 && lines[li].empty()) continue;
        int capacity = budget - current_tokens;
        if (line_tokens <= capacity) {
            append_line(lines[li], line_tokens);
            continue;
        }
        if (current_tokens > header_tokens || (first_chunk && !current.empty())) {
            close_chunk();
            capacity = budget - current_tokens;
        }
        if (line_tokens <= capacity) {
            append_line(lines[li], line_tokens);
            continue;
        }
        // One row is larger than the budget: hard-split it at token boundaries.
        int row_budget = std::max(1, budget - header_tokens);
        Unit whole{0, lines[li].size(), line_tokens};
        for (const auto& frag : hard_split_unit(lines[li], whole, row_budget, tok)) {
            std::string frag_text = lines[li].substr(frag.begin, frag.end - frag.begin);
            if (current_tokens + frag.tokens > budget) close_chunk();
            append_line(frag_text, frag.tokens);
        }
    }
    if (!current.empty() && current != header) chunks.push_back(current);
    else if (!current.empty() && chunks.empty()) chunks.push_back(current);
    return chunks;
}

namespace {

struct Piece {
    std::string text;
    int tokens = 0;
    int element_index = 0;
};

} // namespace

std::vector<Segment> segment_document(const Document& doc, const SegmenterConfig& cfg,
                                      const Tokenizer& tok) {
    if (doc.elements.empty()) {
        throw Error(ErrorCode::EmptyDocument, "document " + doc.id + " has no elements");
    }

    std::vector<Piece> pieces;
    for (size_t i = 0; i < doc.elements.size(); ++i) {
        const Element& el = doc.elements[i];
        std::vector<std::string> parts;
        if (el.kind == ElementKind::Text) {
            parts = split_element(el.text, cfg, tok);
        } else {
            std::string serialized = serialize_table(el.table, cfg.format);
            parts = split_table_element(serialized, el.table.header_rows, cfg, tok);
        }
        if (parts.empty()) parts.push_back("");
        for (auto& p : parts) {
            int n = tok.count(p);
            pieces.push_back(Piece{std::move(p), n, static_cast<int>(i)});
        }
    }

    std::vector<Segment> segments;
    std::string cur_text;
    int cur_tokens = 0;
    std::vector<int> cur_indices;

    auto emit = [&]() {
        if (cur_indices.empty()) return;
        Segment s;
        s.text = std::move(cur_text);
        s.token_count = cur_tokens;
        s.source_indices = std::move(cur_indices);
        s.doc_id = doc.id;
        s.position = static_cast<int>(segments.size());
        segments.push_back(std::move(s));
        cur_text.clear();
        cur_tokens = 0;
        cur_indices.clear();
    };

    for (auto& piece : pieces) {
        std::string candidate;
        if (cur_text.empty()) candidate = piece.text;
        else if (piece.text.empty()) candidate = cur_text;
        else candidate = cur_text + "\n\n" + piece.text;

        int candidate_tokens = tok.count(candidate);
        if (cur_indices.empty() || candidate_tokens <= cfg.max_tokens_per_segment) {
            cur_text = std::move(candidate);
            cur_tokens = candidate_tokens;
            if (cur_indices.empty() || cur_indices.back() != piece.element_index) {
                cur_indices.push_back(piece.element_index);
            }
        } else {
            emit();
            cur_text = std::move(piece.text);
            cur_tokens = piece.tokens;
            cur_indices.push_back(piece.element_index);
        }
    }
    emit();

    bool any_tokens = std::any_of(segments.begin(), segments.end(),
                                  [](const Segment& s) { return s.token_count > 0; });
    if (!any_tokens) {
        throw Error(ErrorCode::EmptyDocument, "document " + doc.id + " has no tokens to segment");
    }
    return segments;
}

} // namespace hldx
