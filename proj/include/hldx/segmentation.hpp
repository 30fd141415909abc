#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hldx/document.hpp"
#include "hldx/tokenizer.hpp"

namespace hldx {

enum class SerializationFormat { Plain, Csv, Xml, Html };

const char* format_name(SerializationFormat format);
std::optional<SerializationFormat> format_from_name(std::string_view name);

struct Segment {
    std::string text;
    int token_count = 0;
    std::vector<int> source_indices; // strictly ascending, contiguous element indices
    std::string doc_id;
    int position = 0; // emission order within the document; travels with the segment
};

struct SegmenterConfig {
    int max_tokens_per_segment = 512; // >= 16
    SerializationFormat format = SerializationFormat::Plain;
};

// PLAIN: rows joined by newline, cells by " | ". CSV: RFC-4180-style
// quoting, rows joined by newline. XML/HTML: one row per line with the
// table tags glued to the first and last row; &, <, > escaped. No
// trailing newline in any format.
std::string serialize_table(const Table& table, SerializationFormat format);

// Splits prose at sentence boundaries (". ", "! ", "? ", newline),
// greedily packing sentences up to the budget. A single sentence over
// the budget is hard-split at token boundaries. The returned pieces
// carry every input token exactly once.
std::vector<std::string> split_element(const std::string& text, const SegmenterConfig& cfg,
                                       const Tokenizer& tok = default_tokenizer());

// Splits a serialized table at row boundaries (newlines). Each chunk
// after the first gets the header rows' serialization prepended so it
// stays self-describing; header_lines is the table's header_rows.
std::vector<std::string> split_table_element(const std::string& serialized, int header_lines,
                                             const SegmenterConfig& cfg,
                                             const Tokenizer& tok = default_tokenizer());

// Serializes tables, splits overlong elements, then greedily merges
// adjacent pieces (joined by "\n\n") while the merged text stays within
// the budget. Throws EmptyDocument when the document has no elements or
// no tokens at all.
std::vector<Segment> segment_document(const Document& doc, const SegmenterConfig& cfg,
                                      const Tokenizer& tok = default_tokenizer());

} // namespace hldx
