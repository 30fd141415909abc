#pragma once

#include <functional>
#include <string_view>

namespace hldx {

// Token rule used throughout the pipeline: a token is a maximal run of
// word characters, or a single non-word non-whitespace character.
// Whitespace produces no tokens. Word characters are ASCII alphanumerics;
// bytes >= 0x80 are treated as word characters so multi-byte UTF-8
// sequences stay inside one run instead of counting per byte.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual int count(std::string_view text) const = 0;
};

class RunTokenizer final : public Tokenizer {
public:
    int count(std::string_view text) const override;
};

// Shared default instance; stateless and thread-safe.
const Tokenizer& default_tokenizer();

int count_tokens(std::string_view text);

// Span of one token within the scanned string (byte offsets).
struct TokenSpan {
    size_t begin;
    size_t end;
};

// Invokes fn for every token of text, in order.
void for_each_token(std::string_view text, const std::function<void(TokenSpan)>& fn);

} // namespace hldx
