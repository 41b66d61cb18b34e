#include "sdlab/vocabulary.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sdlab {

std::vector<std::string> utf8_scalars(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len;
        if (lead < 0x80) {
            len = 1;
        } else if ((lead & 0xE0) == 0xC0) {
            len = 2;
        } else if ((lead & 0xF0) == 0xE0) {
            len = 3;
        } else if ((lead & 0xF8) == 0xF0) {
            len = 4;
        } else {
            throw TokenizeError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        if (i + len > text.size()) {
            throw TokenizeError("truncated UTF-8 sequence at offset " + std::to_string(i));
        }
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
                throw TokenizeError("invalid UTF-8 continuation byte at offset " +
                                    std::to_string(i + k));
            }
        }
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId eos_id)
    : tokens_(std::move(tokens)), eos_id_(eos_id) {
    if (tokens_.size() < 2) {
        throw std::invalid_argument("vocabulary needs at least 2 tokens");
    }
    if (eos_id_ < 0 || static_cast<std::size_t>(eos_id_) >= tokens_.size()) {
        throw std::invalid_argument("eos_id out of range");
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
        if (!inserted) {
            throw std::invalid_argument("duplicate token string: " + tokens_[i]);
        }
    }
}

Vocabulary Vocabulary::from_corpus(std::string_view utf8_text) {
    const auto scalars = utf8_scalars(utf8_text);
    if (scalars.empty()) {
        throw std::invalid_argument("empty corpus");
    }
    std::set<std::string> distinct(scalars.begin(), scalars.end());
    std::vector<std::string> tokens(distinct.begin(), distinct.end());
    tokens.emplace_back(kEosToken);
    const auto eos = static_cast<TokenId>(tokens.size() - 1);
    return Vocabulary(std::move(tokens), eos);
}

std::vector<TokenId> Vocabulary::encode(std::string_view utf8_text) const {
    const auto scalars = utf8_scalars(utf8_text);
    std::vector<TokenId> ids;
    ids.reserve(scalars.size());
    std::size_t offset = 0;
    for (const auto& s : scalars) {
        const auto it = index_.find(s);
        if (it == index_.end()) {
            throw TokenizeError("character outside vocabulary at byte offset " +
                                std::to_string(offset) + ": '" + s + "'");
        }
        ids.push_back(it->second);
        offset += s.size();
    }
    return ids;
}

std::string Vocabulary::decode(const std::vector<TokenId>& ids) const {
    std::string out;
    for (TokenId id : ids) {
        if (id == eos_id_) {
            continue;
        }
        out += token(id);
    }
    return out;
}

} // namespace sdlab
