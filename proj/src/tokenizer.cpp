#include "hldx/tokenizer.hpp"

#include <cctype>

namespace hldx {

namespace {

inline bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
    return std::isspace(c) != 0;
}

} // namespace

void for_each_token(std::string_view text, const std::function<void(TokenSpan)>& fn) {
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        if (is_word_byte(c)) {
            size_t start = i;
            while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
            fn({start, i});
        } else {
            fn({i, i + 1});
            ++i;
        }
    }
}

int RunTokenizer::count(std::string_view text) const {
    int n = 0;
    for_each_token(text, [&n](TokenSpan) { ++n; });
    return n;
}

const Tokenizer& default_tokenizer() {
    static const RunTokenizer instance;
    return instance;
}

int count_tokens(std::string_view text) {
    return default_tokenizer().count(text);
}

} // namespace hldx
