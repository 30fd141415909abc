#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hldx {

enum class Scale { Unit, Thousand, Million, Billion };

double scale_multiplier(Scale scale);
const char* scale_name(Scale scale);
std::optional<Scale> scale_from_name(std::string_view name);

struct DocMetadata {
    std::optional<std::string> company;
    std::optional<std::string> time;
    std::optional<Scale> scale_hint;
};

struct Table {
    std::vector<std::vector<std::string>> cells; // rectangular, rows x columns
    int header_rows = 0;

    size_t row_count() const { return cells.size(); }
    size_t column_count() const { return cells.empty() ? 0 : cells[0].size(); }
};

enum class ElementKind { Text, Table };

struct Element {
    ElementKind kind = ElementKind::Text;
    std::string text;   // populated iff kind == Text
    Table table;        // populated iff kind == Table

    static Element make_text(std::string t);
    static Element make_table(Table t);
};

struct Document {
    std::string id;
    DocMetadata metadata;
    std::vector<Element> elements; // source order; index in vector is the element index
};

// Canonical JSON format. Short table rows are right-padded with empty
// strings so every Table is rectangular. Throws MalformedInput on bad
// JSON, missing required fields, or schema violations; a document with
// zero elements is valid.
Document parse_json_doc(std::string_view bytes);

std::string serialize_json_doc(const Document& doc);

// Minimal HTML ingestion: <table>/<tr>/<td>/<th> become Table elements
// (leading all-<th> rows counted as header_rows); everything else
// contributes to whitespace-collapsed Text elements between tables.
// Scripts, styles, and attributes are discarded. Tag soup is tolerated
// best-effort; only non-UTF-8 input raises MalformedInput.
Document parse_html_doc(std::string_view bytes, const std::string& id, DocMetadata metadata);

} // namespace hldx
