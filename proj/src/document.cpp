#include "hldx/document.hpp"

#include <algorithm>

#include "hldx/errors.hpp"
#include "json.hpp"

namespace hldx {

double scale_multiplier(Scale scale) {
    switch (scale) {
        case Scale::Unit: return 1.0;
        case Scale::Thousand: return 1e3;
        case Scale::Million: return 1e6;
        case Scale::Billion: return 1e9;
    }
    return 1.0;
}

const char* scale_name(Scale scale) {
    switch (scale) {
        case Scale::Unit: return "unit";
        case Scale::Thousand: return "thousand";
        case Scale::Million: return "million";
        case Scale::Billion: return "billion";
    }
    return "unit";
}

std::optional<Scale> scale_from_name(std::string_view name) {
    if (name == "unit") return Scale::Unit;
    if (name == "thousand") return Scale::Thousand;
    if (name == "million") return Scale::Million;
    if (name == "billion") return Scale::Billion;
    return std::nullopt;
}

Element Element::make_text(std::string t) {
    Element e;
    e.kind = ElementKind::Text;
    e.text = std::move(t);
    return e;
}

Element Element::make_table(Table t) {
    Element e;
    e.kind = ElementKind::Table;
    e.table = std::move(t);
    return e;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::NoSegments: return "NoSegments";
        case ErrorCode::EmbedderUnavailable: return "EmbedderUnavailable";
        case ErrorCode::NoFixtureMatch: return "NoFixtureMatch";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::BackendRefused: return "BackendRefused";
        case ErrorCode::StorageError: return "StorageError";
        case ErrorCode::MissingMetadata: return "MissingMetadata";
        case ErrorCode::EmptySummary: return "EmptySummary";
        case ErrorCode::NotANumber: return "NotANumber";
        case ErrorCode::AmbiguousNumber: return "AmbiguousNumber";
        case ErrorCode::EmptyOutcomes: return "EmptyOutcomes";
        case ErrorCode::DocumentNotFound: return "DocumentNotFound";
        case ErrorCode::UndefinedRPD: return "UndefinedRPD";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Error";
}

namespace {

using nlohmann::json;

// Pads short rows with empty strings; real filings contain ragged rows.
Table table_from_rows(std::vector<std::vector<std::string>> rows, int header_rows) {
    if (rows.empty()) {
        throw Error(ErrorCode::MalformedInput, "table has no rows");
    }
    size_t width = 0;
    for (const auto& row : rows) width = std::max(width, row.size());
    if (width == 0) {
        throw Error(ErrorCode::MalformedInput, "table has no columns");
    }
    for (auto& row : rows) row.resize(width);
    if (header_rows < 0 || static_cast<size_t>(header_rows) > rows.size()) {
        throw Error(ErrorCode::MalformedInput, "header_rows out of range");
    }
    Table t;
    t.cells = std::move(rows);
    t.header_rows = header_rows;
    return t;
}

DocMetadata metadata_from_json(const json& j) {
    DocMetadata m;
    if (!j.is_object()) {
        throw Error(ErrorCode::MalformedInput, "metadata must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "company") {
            m.company = value.get<std::string>();
        } else if (key == "time") {
            m.time = value.get<std::string>();
        } else if (key == "scale_hint") {
            auto s = scale_from_name(value.get<std::string>());
            if (!s) throw Error(ErrorCode::MalformedInput, "unknown scale_hint: " + value.get<std::string>());
            m.scale_hint = *s;
        } else {
            throw Error(ErrorCode::MalformedInput, "unknown metadata key: " + key);
        }
    }
    return m;
}

} // namespace

Document parse_json_doc(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("id") || !j.contains("elements")) {
            throw Error(ErrorCode::MalformedInput, "document requires id and elements");
        }
        Document doc;
        doc.id = j.at("id").get<std::string>();
        if (doc.id.empty()) {
            throw Error(ErrorCode::MalformedInput, "document id is empty");
        }
        if (j.contains("metadata")) {
            doc.metadata = metadata_from_json(j.at("metadata"));
        }
        const auto& elements = j.at("elements");
        if (!elements.is_array()) {
            throw Error(ErrorCode::MalformedInput, "elements must be an array");
        }
        for (const auto& el : elements) {
            const std::string kind = el.at("kind").get<std::string>();
            if (kind == "text") {
                doc.elements.push_back(Element::make_text(el.at("text").get<std::string>()));
            } else if (kind == "table") {
                auto rows = el.at("cells").get<std::vector<std::vector<std::string>>>();
                int header_rows = el.value("header_rows", 0);
                doc.elements.push_back(Element::make_table(table_from_rows(std::move(rows), header_rows)));
            } else {
                throw Error(ErrorCode::MalformedInput, "unknown element kind: " + kind);
            }
        }
        return doc;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad document schema: ") + e.what());
    }
}

std::string serialize_json_doc(const Document& doc) {
    json j;
    j["id"] = doc.id;
    json meta = json::object();
    if (doc.metadata.company) meta["company"] = *doc.metadata.company;
    if (doc.metadata.time) meta["time"] = *doc.metadata.time;
    if (doc.metadata.scale_hint) meta["scale_hint"] = scale_name(*doc.metadata.scale_hint);
    j["metadata"] = meta;
    json elements = json::array();
    for (const auto& el : doc.elements) {
        json e;
        if (el.kind == ElementKind::Text) {
            e["kind"] = "text";
            e["text"] = el.text;
        } else {
            e["kind"] = "table";
            e["header_rows"] = el.table.header_rows;
            e["cells"] = el.table.cells;
        }
        elements.push_back(std::move(e));
    }
    j["elements"] = std::move(elements);
    return j.dump();
}

} // namespace hldx
