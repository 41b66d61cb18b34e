#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sdlab {

using TokenId = int;

// Ordered set of distinct token strings plus an end-of-sequence token.
// Tokenization is character level: one token per Unicode scalar value.
class Vocabulary {
public:
    Vocabulary(std::vector<std::string> tokens, TokenId eos_id);

    // Builds a vocabulary from the distinct scalar values of a UTF-8 text,
    // sorted by codepoint, with an EOS token appended at the end.
    static Vocabulary from_corpus(std::string_view utf8_text);

    std::size_t size() const { return tokens_.size(); }
    TokenId eos_id() const { return eos_id_; }
    const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < tokens_.size(); }

    // Encodes UTF-8 text; throws TokenizeError on a character outside the
    // vocabulary or on malformed UTF-8 (message carries the byte offset).
    std::vector<TokenId> encode(std::string_view utf8_text) const;
    std::string decode(const std::vector<TokenId>& ids) const;

    bool operator==(const Vocabulary& other) const {
        return tokens_ == other.tokens_ && eos_id_ == other.eos_id_;
    }

    static constexpr const char* kEosToken = "<eos>";

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
    TokenId eos_id_;
};

class TokenizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Splits UTF-8 text into one string per Unicode scalar value.
// Throws TokenizeError with the byte offset on malformed input.
std::vector<std::string> utf8_scalars(std::string_view text);

} // namespace sdlab
