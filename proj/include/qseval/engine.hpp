// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/quotegen.hpp"
#include "qseval/text.hpp"

namespace qseval {

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

struct SearchResult {
    std::string doc_id;
    double score = 0.0;
};

/// Positional inverted index over a document pool, with phrase-capable
/// BM25 ranking. A version's clauses are combined disjunctively: each
/// clause scores the documents it matches, a phrase clause acting as a
/// pseudo-term whose tf is its occurrence count and whose df is the number
/// of documents containing it at least once. The final score multiplies
/// the summed clause scores by the fraction of clauses matched, so
/// documents covering more of the query rise without unmatched clauses
/// excluding a document outright.
class Index {
   public:
    explicit Index(const DocumentPool& pool) {
        docs_.reserve(pool.size());
        std::size_t total_len = 0;
        for (const auto& doc : pool.documents()) {
            std::uint32_t ordinal = static_cast<std::uint32_t>(docs_.size());
            auto tokens = tokenize(doc.text);
            total_len += tokens.size();
            docs_.push_back({doc.doc_id, tokens.size()});
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                auto& posting = postings_[tokens[i]];
                if (posting.empty() || posting.back().doc != ordinal) posting.push_back({ordinal, {}});
                posting.back().positions.push_back(static_cast<std::uint32_t>(i + 1));
            }
        }
        avg_len_ = docs_.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(docs_.size());
    }

    std::size_t doc_count() const { return docs_.size(); }
    double avg_doc_len() const { return avg_len_; }

    std::size_t term_df(const std::string& token) const {
        auto it = postings_.find(token);
        return it == postings_.end() ? 0 : it->second.size();
    }

    std::size_t phrase_df(const std::vector<std::string>& tokens) const {
        return clause_matches(Clause{tokens, true}).size();
    }

    std::vector<SearchResult> search(const QuotedVersion& version,
                                     std::size_t k = std::numeric_limits<std::size_t>::max()) const {
        struct Accum {
            double score = 0.0;
            std::size_t matched = 0;
        };
        std::unordered_map<std::uint32_t, Accum> accum;
        std::size_t total_clauses = version.clauses.size();
        for (const auto& clause : version.clauses) {
            auto matches = clause_matches(clause);
            if (matches.empty()) continue;
            double idf = inverse_doc_freq(matches.size());
            for (const auto& [doc, tf] : matches) {
                double norm = 1.0 - kBm25B + kBm25B * doc_norm(doc);
                double term = idf * (static_cast<double>(tf) * (kBm25K1 + 1.0)) /
                              (static_cast<double>(tf) + kBm25K1 * norm);
                auto& a = accum[doc];
                a.score += term;
                a.matched += 1;
            }
        }

        std::vector<SearchResult> out;
        out.reserve(accum.size());
        for (const auto& [doc, a] : accum) {
            double coord = total_clauses == 0
                               ? 0.0
                               : static_cast<double>(a.matched) / static_cast<double>(total_clauses);
            out.push_back({docs_[doc].doc_id, coord * a.score});
        }
        std::sort(out.begin(), out.end(), [](const SearchResult& x, const SearchResult& y) {
            if (x.score != y.score) return x.score > y.score;
            return x.doc_id < y.doc_id;
        });
        if (out.size() > k) out.resize(k);
        return out;
    }

    /// Text artifact with terms in sorted order, so identical corpora dump
    /// to identical bytes.
    void dump(std::ostream& os) const {
        os << "qseval-index 1\n";
        os << "docs " << docs_.size() << "\n";
        // tab-separated because doc ids may contain spaces
        for (const auto& d : docs_) os << "doc\t" << d.doc_id << "\t" << d.length << "\n";
        std::vector<const std::string*> terms;
        terms.reserve(postings_.size());
        for (const auto& [term, posting] : postings_) {
            (void)posting;
            terms.push_back(&term);
        }
        std::sort(terms.begin(), terms.end(),
                  [](const std::string* a, const std::string* b) { return *a < *b; });
        for (const std::string* term : terms) {
            const auto& posting = postings_.at(*term);
            os << "term " << *term << " " << posting.size() << "\n";
            for (const auto& entry : posting) {
                os << "p " << entry.doc;
                for (std::uint32_t pos : entry.positions) os << " " << pos;
                os << "\n";
            }
        }
    }

    static Index from_dump(std::istream& is) {
        Index index;
        std::string line;
        if (!std::getline(is, line) || line != "qseval-index 1")
            throw ParseError("not a recognized index artifact");
        std::size_t total_len = 0;
        std::string current_term;
        while (std::getline(is, line)) {
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "docs") {
                continue;
            } else if (tag == "doc") {
                std::size_t first = line.find('\t');
                std::size_t last = line.rfind('\t');
                if (first == std::string::npos || last == first)
                    throw ParseError("malformed doc line in index artifact: " + line);
                DocEntry d;
                d.doc_id = line.substr(first + 1, last - first - 1);
                d.length = static_cast<std::size_t>(std::stoull(line.substr(last + 1)));
                total_len += d.length;
                index.docs_.push_back(std::move(d));
            } else if (tag == "term") {
                std::size_t df = 0;
                ls >> current_term >> df;
                index.postings_[current_term].reserve(df);
            } else if (tag == "p") {
                PostingEntry entry;
                ls >> entry.doc;
                std::uint32_t pos;
                while (ls >> pos) entry.positions.push_back(pos);
                index.postings_[current_term].push_back(std::move(entry));
            } else if (!tag.empty()) {
                throw ParseError("unexpected index artifact line: " + line);
            }
        }
        index.avg_len_ = index.docs_.empty()
                             ? 0.0
                             : static_cast<double>(total_len) / static_cast<double>(index.docs_.size());
        return index;
    }

   private:
    Index() = default;

    struct DocEntry {
        std::string doc_id;
        std::size_t length;
    };
    struct PostingEntry {
        std::uint32_t doc;
        std::vector<std::uint32_t> positions;
    };

    double doc_norm(std::uint32_t doc) const {
        if (avg_len_ <= 0.0) return 0.0;
        return static_cast<double>(docs_[doc].length) / avg_len_;
    }

    double inverse_doc_freq(std::size_t df) const {
        double n = static_cast<double>(docs_.size());
        double d = static_cast<double>(df);
        return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    }

    /// (doc ordinal, tf) pairs for one clause, in ascending doc order.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> clause_matches(const Clause& clause) const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        if (clause.tokens.empty()) return out;
        if (clause.tokens.size() == 1 || !clause.quoted) {
            // canonical clauses are single tokens unless quoted
            auto it = postings_.find(clause.tokens[0]);
            if (it == postings_.end()) return out;
            for (const auto& entry : it->second)
                out.push_back({entry.doc, static_cast<std::uint32_t>(entry.positions.size())});
            return out;
        }

        std::vector<const std::vector<PostingEntry>*> lists;
        for (const auto& tok : clause.tokens) {
            auto it = postings_.find(tok);
            if (it == postings_.end()) return out;
            lists.push_back(&it->second);
        }
        // walk the rarest-first intersection on the first list; the corpus
        // scale here does not justify anything fancier
        for (const auto& head : *lists[0]) {
            std::vector<const std::vector<std::uint32_t>*> pos_lists{&head.positions};
            bool all = true;
            for (std::size_t i = 1; i < lists.size(); ++i) {
                auto it = std::lower_bound(
                    lists[i]->begin(), lists[i]->end(), head.doc,
                    [](const PostingEntry& e, std::uint32_t d) { return e.doc < d; });
                if (it == lists[i]->end() || it->doc != head.doc) {
                    all = false;
                    break;
                }
                pos_lists.push_back(&it->positions);
            }
            if (!all) continue;
            std::uint32_t tf = 0;
            for (std::uint32_t p : head.positions) {
                bool contiguous = true;
                for (std::size_t i = 1; i < pos_lists.size(); ++i) {
                    if (!std::binary_search(pos_lists[i]->begin(), pos_lists[i]->end(),
                                            p + static_cast<std::uint32_t>(i))) {
                        contiguous = false;
                        break;
                    }
                }
                if (contiguous) ++tf;
            }
            if (tf > 0) out.push_back({head.doc, tf});
        }
        return out;
    }

    std::vector<DocEntry> docs_;
    std::unordered_map<std::string, std::vector<PostingEntry>> postings_;
    double avg_len_ = 0.0;
};

}  // namespace qseval
