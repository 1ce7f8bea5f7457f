// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/error.hpp"
#include "qseval/text.hpp"

namespace qseval {

inline constexpr std::size_t kDefaultSegmentCap = 16;
inline constexpr std::size_t kDefaultTokenCap = 12;

struct Clause {
    std::vector<std::string> tokens;
    bool quoted = false;

    bool operator==(const Clause&) const = default;
};

/// One quoted version of a query in canonical form: quoted clauses are
/// multiword phrases, everything else is a bare single-token clause. The
/// bitmask records which segments carried quotes when the version was
/// generated; it is bookkeeping, not part of structural equality.
struct QuotedVersion {
    std::string qid;
    std::vector<Clause> clauses;
    std::uint32_t bitmask = 0;

    std::size_t quoted_clause_count() const {
        std::size_t n = 0;
        for (const auto& c : clauses)
            if (c.quoted) ++n;
        return n;
    }

    std::vector<std::string> all_tokens() const {
        std::vector<std::string> out;
        for (const auto& c : clauses) out.insert(out.end(), c.tokens.begin(), c.tokens.end());
        return out;
    }

    bool same_clauses(const QuotedVersion& other) const { return clauses == other.clauses; }
};

struct VersionSet {
    std::vector<QuotedVersion> versions;

    std::size_t size() const { return versions.size(); }
    auto begin() const { return versions.begin(); }
    auto end() const { return versions.end(); }
};

/// Quotes collapse on single words, and unquoted runs are just bags of
/// terms, so the canonical clause list keeps quoted multiword phrases and
/// splits everything else into bare tokens.
inline std::vector<Clause> canonicalize_clauses(const std::vector<Clause>& raw) {
    std::vector<Clause> out;
    for (const auto& clause : raw) {
        if (clause.quoted && clause.tokens.size() >= 2) {
            out.push_back({clause.tokens, true});
        } else {
            for (const auto& tok : clause.tokens) out.push_back({{tok}, false});
        }
    }
    return out;
}

/// Wire form: quoted clauses wrapped in ASCII double quotes, clauses
/// joined by single spaces.
inline std::string render(const QuotedVersion& version) {
    std::string out;
    for (std::size_t i = 0; i < version.clauses.size(); ++i) {
        if (i) out += ' ';
        const Clause& c = version.clauses[i];
        if (c.quoted) {
            out += '"';
            out += join_tokens(c.tokens);
            out += '"';
        } else {
            out += join_tokens(c.tokens);
        }
    }
    return out;
}

/// Parses the render() grammar back into a canonical version.
inline QuotedVersion parse_version(const std::string& text, std::string qid = "") {
    std::vector<Clause> raw;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t quote = text.find('"', pos);
        std::string outside =
            quote == std::string::npos ? text.substr(pos) : text.substr(pos, quote - pos);
        for (const auto& tok : tokenize(outside)) raw.push_back({{tok}, false});
        if (quote == std::string::npos) break;
        std::size_t close = text.find('"', quote + 1);
        if (close == std::string::npos)
            throw ParseError("unbalanced quote in version: " + text);
        auto phrase = tokenize(text.substr(quote + 1, close - quote - 1));
        if (phrase.empty())
            throw ParseError("empty quoted clause in version: " + text);
        raw.push_back({phrase, true});
        pos = close + 1;
    }
    if (raw.empty()) throw ParseError("version has no tokens: " + text);

    QuotedVersion version{std::move(qid), canonicalize_clauses(raw), 0};
    // Reconstruct a clause-level quote mask for determinism of downstream
    // tie-breaks on parsed versions.
    std::size_t n = version.clauses.size();
    for (std::size_t j = 0; j < n; ++j)
        if (version.clauses[j].quoted)
            version.bitmask |= 1u << (n - 1 - j);
    return version;
}

namespace detail {

inline void append_unique(std::vector<QuotedVersion>& versions,
                          std::unordered_set<std::string>& seen, QuotedVersion v) {
    if (seen.insert(render(v)).second) versions.push_back(std::move(v));
}

}  // namespace detail

/// All 2^n quote assignments over the segments of `seg`, canonicalized and
/// deduplicated; ascending generation bitmask, so the all-unquoted version
/// comes first. Bit j (1-based from the left over n segments) quotes
/// segment j, making version 1 the one with only the last segment quoted.
inline VersionSet generate_versions(const Segmentation& seg, const Query& query,
                                    std::size_t segment_cap = kDefaultSegmentCap) {
    if (seg.qid != query.qid)
        throw ValidationError("segmentation for qid '" + seg.qid +
                              "' does not belong to query '" + query.qid + "'");
    validate_boundaries(seg.boundaries, query.length(), "query " + query.qid);
    std::size_t n = seg.segment_count();
    if (n > segment_cap)
        throw ValidationError("segment count " + std::to_string(n) + " exceeds cap " +
                              std::to_string(segment_cap) +
                              "; raise the segment cap to generate versions");

    auto spans = segment_spans(seg.boundaries, query.length());
    VersionSet out;
    std::unordered_set<std::string> seen;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Clause> raw;
        for (std::size_t j = 0; j < n; ++j) {
            auto [begin, end] = spans[j];
            bool quoted = (mask >> (n - 1 - j)) & 1u;
            raw.push_back({{query.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                            query.tokens.begin() + static_cast<std::ptrdiff_t>(end)},
                           quoted});
        }
        detail::append_unique(out.versions, seen,
                              QuotedVersion{query.qid, canonicalize_clauses(raw), mask});
    }
    return out;
}

/// Every contiguous partition of the token list (2^(l-1) of them), with
/// every block of two or more tokens quoted: the brute-force candidate
/// set. Ordered from the all-singletons partition (the unquoted version)
/// down to the single fully quoted block.
inline VersionSet enumerate_all_partitions(const Query& query,
                                           std::size_t token_cap = kDefaultTokenCap) {
    std::size_t l = query.length();
    if (l > token_cap)
        throw ValidationError("token count " + std::to_string(l) + " exceeds cap " +
                              std::to_string(token_cap) +
                              "; raise the token cap to enumerate partitions");

    VersionSet out;
    std::unordered_set<std::string> seen;
    std::uint32_t all = l >= 1 ? (1u << (l - 1)) - 1u : 0u;
    for (std::uint32_t cut = all;; --cut) {
        // bit p of `cut` set means a boundary after token p+1
        std::vector<Clause> raw;
        std::size_t start = 0;
        for (std::size_t p = 1; p <= l; ++p) {
            bool boundary = p == l || ((cut >> (p - 1)) & 1u);
            if (!boundary) continue;
            Clause c{{query.tokens.begin() + static_cast<std::ptrdiff_t>(start),
                      query.tokens.begin() + static_cast<std::ptrdiff_t>(p)},
                     p - start >= 2};
            raw.push_back(std::move(c));
            start = p;
        }
        std::size_t n = raw.size();
        std::uint32_t quote_mask = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (raw[j].quoted) quote_mask |= 1u << (n - 1 - j);
        detail::append_unique(out.versions, seen,
                              QuotedVersion{query.qid, canonicalize_clauses(raw), quote_mask});
        if (cut == 0) break;
    }
    return out;
}

/// The segmentation implied by a version's clause layout (used to turn a
/// best partition back into a reference segmentation).
inline Segmentation boundaries_of_version(const QuotedVersion& version,
                                          const std::string& strategy_id) {
    Segmentation seg{version.qid, strategy_id, {}};
    std::size_t consumed = 0;
    for (std::size_t i = 0; i + 1 < version.clauses.size(); ++i) {
        consumed += version.clauses[i].tokens.size();
        seg.boundaries.insert(consumed);
    }
    return seg;
}

}  // namespace qseval
