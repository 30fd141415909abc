#include "doctest.h"

#include <random>

#include "hldx/document.hpp"
#include "hldx/errors.hpp"
#include "support/reference.hpp"

using namespace hldx;

namespace {

bool same_document(const Document& a, const Document& b) {
    if (a.id != b.id || a.elements.size() != b.elements.size()) return false;
    if (a.metadata.company != b.metadata.company || a.metadata.time != b.metadata.time ||
        a.metadata.scale_hint != b.metadata.scale_hint) {
        return false;
    }
    for (size_t i = 0; i < a.elements.size(); ++i) {
        const Element& x = a.elements[i];
        const Element& y = b.elements[i];
        if (x.kind != y.kind) return false;
        if (x.kind == ElementKind::Text) {
            if (x.text != y.text) return false;
        } else {
            if (x.table.cells != y.table.cells || x.table.header_rows != y.table.header_rows) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("json: empty element list is a valid document") {
    Document doc = parse_json_doc(R"({"id":"d1","metadata":{},"elements":[]})");
    CHECK(doc.id == "d1");
    CHECK(doc.elements.empty());
}

TEST_CASE("json: fields map directly") {
    Document doc = parse_json_doc(
        R"({"id":"d1","metadata":{"company":"Acme"},"elements":[{"kind":"text","text":"hi"}]})");
    CHECK(doc.elements.size() == 1);
    CHECK(doc.elements[0].kind == ElementKind::Text);
    CHECK(doc.elements[0].text == "hi");
    REQUIRE(doc.metadata.company.has_value());
    CHECK(*doc.metadata.company == "Acme");
    CHECK_FALSE(doc.metadata.time.has_value());
}

TEST_CASE("json: short table rows are right-padded") {
    Document doc = parse_json_doc(
        R"({"id":"d1","elements":[{"kind":"table","cells":[["A","B"],["1"]]}]})");
    REQUIRE(doc.elements.size() == 1);
    const Table& t = doc.elements[0].table;
    CHECK(t.cells == std::vector<std::vector<std::string>>{{"A", "B"}, {"1", ""}});
}

TEST_CASE("json: scale hint parses and round-trips") {
    Document doc = parse_json_doc(
        R"({"id":"d","metadata":{"scale_hint":"million"},"elements":[]})");
    REQUIRE(doc.metadata.scale_hint.has_value());
    CHECK(*doc.metadata.scale_hint == Scale::Million);
    CHECK(same_document(parse_json_doc(serialize_json_doc(doc)), doc));
}

TEST_CASE("json: malformed inputs are rejected") {
    auto code = [](const char* text) {
        try {
            parse_json_doc(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::EmptyDocument; // sentinel for "no throw"
    };
    CHECK(code("not json") == ErrorCode::MalformedInput);
    CHECK(code(R"({"elements":[]})") == ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"","elements":[]})") == ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","elements":[{"kind":"blob"}]})") == ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","elements":[{"kind":"table","cells":[]}]})") == ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","elements":[{"kind":"table","cells":[[]]}]})") == ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","elements":[{"kind":"table","cells":[["x"]],"header_rows":2}]})") ==
          ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","metadata":{"scale_hint":"trillion"},"elements":[]})") ==
          ErrorCode::MalformedInput);
    CHECK(code(R"({"id":"d","metadata":{"currency":"USD"},"elements":[]})") ==
          ErrorCode::MalformedInput);
}

TEST_CASE("json: serialize/parse round-trip on random documents") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        Document original = parse_json_doc(ref::random_document_json(rng, "doc" + std::to_string(i)));
        Document reparsed = parse_json_doc(serialize_json_doc(original));
        CHECK(same_document(original, reparsed));
    }
}

TEST_CASE("html: text and table in document order") {
    Document doc = parse_html_doc("<p>Hello</p><table><tr><td>A</td></tr></table>", "h1", {});
    REQUIRE(doc.elements.size() == 2);
    CHECK(doc.elements[0].kind == ElementKind::Text);
    CHECK(doc.elements[0].text == "Hello");
    CHECK(doc.elements[1].kind == ElementKind::Table);
    CHECK(doc.elements[1].table.cells == std::vector<std::vector<std::string>>{{"A"}});
}

TEST_CASE("html: empty body yields zero elements") {
    Document doc = parse_html_doc("<body></body>", "h2", {});
    CHECK(doc.elements.empty());
}

TEST_CASE("html: leading th rows count as header rows") {
    Document doc =
        parse_html_doc("<table><tr><th>H</th></tr><tr><td>1</td></tr></table>", "h3", {});
    REQUIRE(doc.elements.size() == 1);
    const Table& t = doc.elements[0].table;
    CHECK(t.cells == std::vector<std::vector<std::string>>{{"H"}, {"1"}});
    CHECK(t.header_rows == 1);
}

TEST_CASE("html: whitespace collapses and entities decode") {
    Document doc = parse_html_doc("<div>  a\n\n  b &amp; c  </div>", "h4", {});
    REQUIRE(doc.elements.size() == 1);
    CHECK(doc.elements[0].text == "a b & c");
}

TEST_CASE("html: scripts and styles are dropped") {
    Document doc = parse_html_doc(
        "<p>keep</p><script>var x = '<table>';</script><style>td{}</style><p>tail</p>", "h5", {});
    REQUIRE(doc.elements.size() == 1);
    CHECK(doc.elements[0].text == "keep tail");
}

TEST_CASE("html: ragged table rows are padded") {
    Document doc = parse_html_doc(
        "<table><tr><td>a</td><td>b</td></tr><tr><td>c</td></tr></table>", "h6", {});
    REQUIRE(doc.elements.size() == 1);
    CHECK(doc.elements[0].table.cells ==
          std::vector<std::vector<std::string>>{{"a", "b"}, {"c", ""}});
}

TEST_CASE("html: every table tag becomes a table element") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        int tables = std::uniform_int_distribution<int>(0, 5)(rng);
        std::string html;
        for (int i = 0; i < tables; ++i) {
            html += "<p>" + ref::random_sentence(rng, 8) + "</p>";
            html += "<table><tr><td>" + std::to_string(i) + "</td></tr></table>";
        }
        Document doc = parse_html_doc(html, "h", {});
        int found = 0;
        for (const auto& el : doc.elements) {
            if (el.kind == ElementKind::Table) {
                ++found;
                REQUIRE(!el.table.cells.empty());
                size_t width = el.table.cells[0].size();
                for (const auto& row : el.table.cells) CHECK(row.size() == width);
            }
        }
        CHECK(found == tables);
    }
}

TEST_CASE("html: tag soup is tolerated") {
    Document doc = parse_html_doc(
        "<table><tr><td>a<td>b<tr><td>c</table>trailing", "h7", {});
    REQUIRE(doc.elements.size() == 2);
    CHECK(doc.elements[0].table.cells ==
          std::vector<std::vector<std::string>>{{"a", "b"}, {"c", ""}});
    CHECK(doc.elements[1].text == "trailing");
}

TEST_CASE("html: non-UTF-8 input is rejected") {
    std::string bad = "<p>ok</p>";
    bad.push_back(static_cast<char>(0xFF));
    CHECK_THROWS_AS(parse_html_doc(bad, "h8", {}), Error);
}

TEST_CASE("html: metadata passes through") {
    DocMetadata meta;
    meta.company = "Acme";
    meta.scale_hint = Scale::Thousand;
    Document doc = parse_html_doc("<p>x</p>", "h9", meta);
    CHECK(doc.id == "h9");
    CHECK(doc.metadata.company == "Acme");
    CHECK(doc.metadata.scale_hint == Scale::Thousand);
}
