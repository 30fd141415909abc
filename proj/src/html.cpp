#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "hldx/document.hpp"
#include "hldx/errors.hpp"

namespace hldx {

namespace {

bool valid_utf8(std::string_view s) {
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        else return false;
        if (i + len > n) return false;
        for (size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        }
        i += len;
    }
    return true;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the named and numeric entities that show up in filings; anything
// unrecognized is kept literally.
std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(in[i++]);
            continue;
        }
        std::string_view name = in.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = false;
            try {
                if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                    cp = std::stoul(std::string(name.substr(2)), nullptr, 16);
                } else {
                    cp = std::stoul(std::string(name.substr(1)), nullptr, 10);
                }
                ok = cp > 0 && cp <= 0x10FFFF;
            } catch (...) {
                ok = false;
            }
            if (ok) append_utf8(out, cp);
            else out.append(in.substr(i, semi - i + 1));
        } else {
            out.append(in.substr(i, semi - i + 1));
            i = semi + 1;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

std::string collapse_whitespace(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    bool pending_space = false;
    for (char ch : in) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(ch);
        }
    }
    return out;
}

struct HtmlParser {
    std::string_view html;
    size_t pos = 0;

    Document doc;
    std::string text_buffer;

    int table_depth = 0;
    std::vector<std::vector<std::string>> rows;
    std::vector<bool> row_is_header; // true while every cell so far came from <th>
    bool in_row = false;
    bool in_cell = false;
    bool cell_is_th = false;
    std::string cell_buffer;

    void flush_text() {
        std::string collapsed = collapse_whitespace(text_buffer);
        text_buffer.clear();
        if (!collapsed.empty()) {
            doc.elements.push_back(Element::make_text(std::move(collapsed)));
        }
    }

    void close_cell() {
        if (!in_cell) return;
        if (!in_row) {
            rows.emplace_back();
            row_is_header.push_back(true);
            in_row = true;
        }
        rows.back().push_back(collapse_whitespace(cell_buffer));
        if (!cell_is_th) row_is_header.back() = false;
        cell_buffer.clear();
        in_cell = false;
    }

    void close_row() {
        close_cell();
        in_row = false;
    }

    void open_row() {
        close_row();
        rows.emplace_back();
        row_is_header.push_back(true);
        in_row = true;
    }

    void open_cell(bool is_th) {
        close_cell();
        if (!in_row) open_row();
        in_cell = true;
        cell_is_th = is_th;
    }

    void close_table() {
        close_row();
        table_depth = 0;
        // Drop rows that ended up with no cells (e.g. <tr></tr>).
        std::vector<std::vector<std::string>> kept;
        std::vector<bool> kept_header;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].empty()) {
                kept.push_back(std::move(rows[i]));
                kept_header.push_back(row_is_header[i]);
            }
        }
        rows.clear();
        row_is_header.clear();
        if (kept.empty()) return;

        size_t width = 0;
        for (const auto& row : kept) width = std::max(width, row.size());
        for (auto& row : kept) row.resize(width);

        Table t;
        t.cells = std::move(kept);
        t.header_rows = 0;
        for (bool h : kept_header) {
            if (!h) break;
            ++t.header_rows;
        }
        doc.elements.push_back(Element::make_table(std::move(t)));
    }

    void text_run(std::string_view raw) {
        std::string decoded = decode_entities(raw);
        if (table_depth > 0) {
            if (in_cell) cell_buffer += decoded;
            // Text directly under <table>/<tr> is dropped.
        } else {
            text_buffer += decoded;
        }
    }

    // Skips to the end of the current tag, honoring quoted attribute values.
    size_t find_tag_end(size_t start) {
        char quote = 0;
        for (size_t i = start; i < html.size(); ++i) {
            char c = html[i];
            if (quote != 0) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                return i;
            }
        }
        return html.size();
    }

    void skip_raw_element(const std::string& name) {
        std::string close = "</" + name;
        size_t found = std::string_view::npos;
        for (size_t i = pos; i + close.size() <= html.size(); ++i) {
            bool match = true;
            for (size_t k = 0; k < close.size(); ++k) {
                if (std::tolower(static_cast<unsigned char>(html[i + k])) != close[k]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                found = i;
                break;
            }
        }
        if (found == std::string_view::npos) {
            pos = html.size();
        } else {
            pos = find_tag_end(found) + 1;
        }
    }

    void handle_tag(std::string name, bool closing) {
        if (name == "script" || name == "style") {
            if (!closing) skip_raw_element(name);
            return;
        }
        if (name == "table") {
            if (!closing) {
                if (table_depth == 0) {
                    flush_text();
                    table_depth = 1;
                } else {
                    ++table_depth; // nested tables flow into the enclosing cell
                }
            } else {
                if (table_depth > 1) --table_depth;
                else if (table_depth == 1) close_table();
            }
            return;
        }
        if (table_depth == 1) {
            if (name == "tr") {
                if (!closing) open_row();
                else close_row();
                return;
            }
            if (name == "td" || name == "th") {
                if (!closing) open_cell(name == "th");
                else close_cell();
                return;
            }
        }
        if (table_depth == 0) {
            // Any other tag acts as a whitespace boundary in prose.
            text_buffer.push_back(' ');
        } else if (in_cell) {
            cell_buffer.push_back(' ');
        }
    }

    Document run() {
        while (pos < html.size()) {
            size_t lt = html.find('<', pos);
            if (lt == std::string_view::npos) {
                text_run(html.substr(pos));
                break;
            }
            if (lt > pos) text_run(html.substr(pos, lt - pos));
            if (html.compare(lt, 4, "<!--") == 0) {
                size_t end = html.find("-->", lt + 4);
                pos = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            size_t gt = find_tag_end(lt + 1);
            std::string_view inner = html.substr(lt + 1, gt - lt - 1);
            pos = std::min(gt + 1, html.size());
            bool closing = !inner.empty() && inner[0] == '/';
            if (closing) inner.remove_prefix(1);
            size_t name_end = 0;
            while (name_end < inner.size() &&
                   (std::isalnum(static_cast<unsigned char>(inner[name_end])) != 0)) {
                ++name_end;
            }
            if (name_end == 0) continue; // <!doctype>, <?xml?>, stray '<'
            handle_tag(to_lower(std::string(inner.substr(0, name_end))), closing);
        }
        if (table_depth > 0) close_table();
        flush_text();
        return std::move(doc);
    }
};

} // namespace

Document parse_html_doc(std::string_view bytes, const std::string& id, DocMetadata metadata) {
    if (!valid_utf8(bytes)) {
        throw Error(ErrorCode::MalformedInput, "input is not valid UTF-8");
    }
    HtmlParser parser;
    parser.html = bytes;
    Document doc = parser.run();
    doc.id = id;
    doc.metadata = std::move(metadata);
    return doc;
}

} // namespace hldx
