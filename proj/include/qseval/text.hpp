// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qseval {

/// Every module shares this tokenizer so query tokens, segment tokens and
/// index tokens always line up: lowercase ASCII, split on any maximal run
/// of non-alphanumeric bytes.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens,
                               std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.append(sep);
        out.append(tokens[i]);
    }
    return out;
}

inline bool is_ascii(std::string_view text) {
    for (unsigned char c : text)
        if (c >= 0x80) return false;
    return true;
}

/// Minimal suffix stripper (plural s/es, ing, ed). Not a linguistic
/// stemmer; it only has to be applied identically on both sides of a
/// dictionary lookup.
inline std::string stem(std::string_view word) {
    auto ends_with = [&](std::string_view suffix) {
        return word.size() >= suffix.size() &&
               word.substr(word.size() - suffix.size()) == suffix;
    };
    if (ends_with("ing") && word.size() >= 5)
        return std::string(word.substr(0, word.size() - 3));
    if (ends_with("ed") && word.size() >= 4)
        return std::string(word.substr(0, word.size() - 2));
    if (ends_with("es") && word.size() >= 4)
        return std::string(word.substr(0, word.size() - 2));
    if (ends_with("s") && !ends_with("ss") && word.size() >= 3)
        return std::string(word.substr(0, word.size() - 1));
    return std::string(word);
}

inline std::vector<std::string> stem_all(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(stem(t));
    return out;
}

}  // namespace qseval
