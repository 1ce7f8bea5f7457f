// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qseval/error.hpp"
#include "qseval/text.hpp"

namespace qseval {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Query {
    std::string qid;
    std::string raw_text;
    std::vector<std::string> tokens;

    std::size_t length() const { return tokens.size(); }
};

class QuerySet {
  public:
    void add(Query q) {
        if (index_of_.count(q.qid))
            throw ValidationError("duplicate qid: " + q.qid);
        index_of_.emplace(q.qid, queries_.size());
        queries_.push_back(std::move(q));
    }

    bool contains(const std::string& qid) const { return index_of_.count(qid) != 0; }

    const Query& at(const std::string& qid) const {
        auto it = index_of_.find(qid);
        if (it == index_of_.end())
            throw ValidationError("unknown qid: " + qid);
        return queries_[it->second];
    }

    std::size_t size() const { return queries_.size(); }
    bool empty() const { return queries_.empty(); }
    const std::vector<Query>& queries() const { return queries_; }
    auto begin() const { return queries_.begin(); }
    auto end() const { return queries_.end(); }

  private:
    std::vector<Query> queries_;  // file order
    std::unordered_map<std::string, std::size_t> index_of_;
};

/// One strategy's split of a query, stored as the set of boundary
/// positions: a boundary after token i (1-based, strictly inside the
/// query) means the segments split there.
struct Segmentation {
    std::string qid;
    std::string strategy_id;
    std::set<std::size_t> boundaries;

    std::size_t segment_count() const { return boundaries.size() + 1; }
};

/// Half-open token spans [begin, end) induced by a boundary set over an
/// l-token query.
inline std::vector<std::pair<std::size_t, std::size_t>>
segment_spans(const std::set<std::size_t>& boundaries, std::size_t token_count) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t start = 0;
    for (std::size_t b : boundaries) {
        spans.emplace_back(start, b);
        start = b;
    }
    spans.emplace_back(start, token_count);
    return spans;
}

inline void validate_boundaries(const std::set<std::size_t>& boundaries,
                                std::size_t token_count, const std::string& context) {
    for (std::size_t b : boundaries) {
        if (b < 1 || b >= token_count)
            throw ValidationError("boundary position " + std::to_string(b) +
                                  " outside (0, " + std::to_string(token_count) +
                                  ") for " + context);
    }
}

inline std::vector<std::vector<std::string>>
segment_tokens(const Segmentation& seg, const Query& query) {
    std::vector<std::vector<std::string>> out;
    for (auto [begin, end] : segment_spans(seg.boundaries, query.length()))
        out.emplace_back(query.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                         query.tokens.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

inline std::size_t multiword_segment_count(const Segmentation& seg, std::size_t token_count) {
    std::size_t n = 0;
    for (auto [begin, end] : segment_spans(seg.boundaries, token_count))
        if (end - begin >= 2) ++n;
    return n;
}

struct Document {
    std::string doc_id;
    std::string url;
    std::string text;  // title concatenated before body
};

class DocumentPool {
  public:
    void add(Document d) {
        if (index_of_.count(d.doc_id))
            throw ValidationError("duplicate doc_id: " + d.doc_id);
        index_of_.emplace(d.doc_id, docs_.size());
        docs_.push_back(std::move(d));
    }

    bool contains(const std::string& doc_id) const { return index_of_.count(doc_id) != 0; }

    const Document& at(const std::string& doc_id) const {
        auto it = index_of_.find(doc_id);
        if (it == index_of_.end())
            throw ValidationError("unknown doc_id: " + doc_id);
        return docs_[it->second];
    }

    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const std::vector<Document>& documents() const { return docs_; }

  private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_of_;
};

/// Averaged graded rating for one (query, document) pair, kept as an exact
/// rational so threshold tests (>= 1, >= 2) never hit float rounding.
struct Rating {
    int sum = 0;
    int count = 0;

    bool judged() const { return count > 0; }
    double value() const { return count ? static_cast<double>(sum) / count : 0.0; }
    bool at_least(double threshold) const {
        return count && static_cast<double>(sum) >= threshold * count;
    }
};

class JudgmentSet {
  public:
    void add(const std::string& qid, const std::string& doc_id,
             const std::string& annotator, int rating) {
        if (rating < 0 || rating > 2)
            throw ValidationError("rating outside {0,1,2}: " + std::to_string(rating));
        auto& cell = cells_[qid][doc_id];
        if (!cell.emplace(annotator, rating).second)
            throw ValidationError("duplicate judgment for (" + qid + ", " + doc_id +
                                  ", " + annotator + ")");
        annotators_.insert(annotator);
    }

    /// Unjudged pairs read as rating 0.
    Rating rating(const std::string& qid, const std::string& doc_id) const {
        auto qit = cells_.find(qid);
        if (qit == cells_.end()) return {};
        auto dit = qit->second.find(doc_id);
        if (dit == qit->second.end()) return {};
        Rating r;
        for (const auto& [annotator, value] : dit->second) {
            r.sum += value;
            ++r.count;
        }
        return r;
    }

    /// doc_id -> per-annotator ratings for one query; empty map if the
    /// query has no judgments.
    const std::map<std::string, std::map<std::string, int>>&
    judged_for(const std::string& qid) const {
        static const std::map<std::string, std::map<std::string, int>> kEmpty;
        auto it = cells_.find(qid);
        return it == cells_.end() ? kEmpty : it->second;
    }

    std::size_t relevant_count(const std::string& qid, double threshold) const {
        std::size_t n = 0;
        for (const auto& [doc_id, per_annotator] : judged_for(qid)) {
            Rating r;
            for (const auto& [annotator, value] : per_annotator) {
                r.sum += value;
                ++r.count;
            }
            if (r.at_least(threshold)) ++n;
        }
        return n;
    }

    const std::set<std::string>& annotators() const { return annotators_; }
    const std::map<std::string, std::map<std::string, std::map<std::string, int>>>&
    cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }

  private:
    // qid -> doc_id -> annotator -> rating
    std::map<std::string, std::map<std::string, std::map<std::string, int>>> cells_;
    std::set<std::string> annotators_;
};

/// One entry of a pre-segmented query log, used for training segmenters.
/// Entries carry their own tokens instead of referencing a QuerySet.
struct SegmentedEntry {
    std::vector<std::string> tokens;
    std::set<std::size_t> boundaries;

    std::vector<std::vector<std::string>> segments() const {
        std::vector<std::vector<std::string>> out;
        for (auto [begin, end] : segment_spans(boundaries, tokens.size()))
            out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                             tokens.begin() + static_cast<std::ptrdiff_t>(end));
        return out;
    }
};

using SegmentedCorpus = std::vector<SegmentedEntry>;

/// All segmentations of one strategy keyed by qid.
struct StrategySegmentations {
    std::string strategy_id;
    std::map<std::string, Segmentation> by_qid;
};

inline std::vector<StrategySegmentations>
group_by_strategy(const std::vector<Segmentation>& segmentations) {
    std::vector<StrategySegmentations> groups;
    std::unordered_map<std::string, std::size_t> index_of;
    for (const auto& seg : segmentations) {
        auto it = index_of.find(seg.strategy_id);
        if (it == index_of.end()) {
            index_of.emplace(seg.strategy_id, groups.size());
            groups.push_back({seg.strategy_id, {}});
            it = index_of.find(seg.strategy_id);
        }
        groups[it->second].by_qid.emplace(seg.qid, seg);
    }
    return groups;
}

/// The trivial strategy where every word is its own segment.
inline StrategySegmentations
unsegmented_strategy(const QuerySet& queries, const std::string& strategy_id = "unsegmented") {
    StrategySegmentations out{strategy_id, {}};
    for (const auto& q : queries) {
        Segmentation seg{q.qid, strategy_id, {}};
        for (std::size_t b = 1; b < q.length(); ++b) seg.boundaries.insert(b);
        out.by_qid.emplace(q.qid, std::move(seg));
    }
    return out;
}

// ---------------------------------------------------------------------------
// File ingestion
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline std::string at_line(const std::string& path, std::size_t lineno) {
    return path + ":" + std::to_string(lineno);
}

}  // namespace detail

/// Queries file: `qid<TAB>text`, one record per line, file order preserved.
inline QuerySet load_queries(const std::string& path) {
    QuerySet out;
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = detail::split_tabs(lines[i]);
        if (fields.size() != 2)
            throw ParseError("expected 2 tab-separated fields at " +
                             detail::at_line(path, i + 1));
        Query q{fields[0], fields[1], tokenize(fields[1])};
        if (q.qid.empty())
            throw ParseError("empty qid at " + detail::at_line(path, i + 1));
        if (q.tokens.empty())
            throw ParseError("query has no tokens at " + detail::at_line(path, i + 1));
        out.add(std::move(q));
    }
    return out;
}

/// Segmentations file: `qid<TAB>strategy<TAB>seg1 | seg2 | ...` with the
/// separator being space-pipe-space exactly. Segment tokens must
/// concatenate to the query's tokens.
inline std::vector<Segmentation>
load_segmentations(const std::string& path, const QuerySet& queries) {
    std::vector<Segmentation> out;
    std::set<std::pair<std::string, std::string>> seen;
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = detail::split_tabs(lines[i]);
        if (fields.size() != 3)
            throw ParseError("expected 3 tab-separated fields at " +
                             detail::at_line(path, i + 1));
        const std::string& qid = fields[0];
        const std::string& strategy = fields[1];
        if (!queries.contains(qid))
            throw ValidationError("unknown qid '" + qid + "' at " +
                                  detail::at_line(path, i + 1));
        if (!seen.emplace(qid, strategy).second)
            throw ValidationError("duplicate segmentation for (" + qid + ", " +
                                  strategy + ") at " + detail::at_line(path, i + 1));
        const Query& query = queries.at(qid);

        Segmentation seg{qid, strategy, {}};
        std::size_t consumed = 0;
        std::size_t start = 0;
        const std::string& text = fields[2];
        while (true) {
            std::size_t pos = text.find(" | ", start);
            std::string piece =
                pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
            auto piece_tokens = tokenize(piece);
            if (piece_tokens.empty())
                throw ValidationError("empty segment at " + detail::at_line(path, i + 1));
            for (const auto& tok : piece_tokens) {
                if (consumed >= query.length() || query.tokens[consumed] != tok)
                    throw ValidationError("segments do not concatenate to query '" + qid +
                                          "' at " + detail::at_line(path, i + 1));
                ++consumed;
            }
            if (pos == std::string::npos) break;
            seg.boundaries.insert(consumed);
            start = pos + 3;
        }
        if (consumed != query.length())
            throw ValidationError("segments do not cover query '" + qid + "' at " +
                                  detail::at_line(path, i + 1));
        validate_boundaries(seg.boundaries, query.length(), "query " + qid);
        out.push_back(std::move(seg));
    }
    return out;
}

/// Corpus file: one JSON object per line with string fields doc_id, url,
/// title, body.
inline DocumentPool load_corpus(const std::string& path) {
    DocumentPool pool;
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bad JSON at " + detail::at_line(path, i + 1) + ": " + e.what());
        }
        for (const char* field : {"doc_id", "url", "title", "body"}) {
            if (!obj.contains(field) || !obj[field].is_string())
                throw ParseError(std::string("missing string field '") + field + "' at " +
                                 detail::at_line(path, i + 1));
        }
        Document d;
        d.doc_id = obj["doc_id"].get<std::string>();
        d.url = obj["url"].get<std::string>();
        d.text = obj["title"].get<std::string>() + " " + obj["body"].get<std::string>();
        pool.add(std::move(d));
    }
    return pool;
}

/// Judgments file: `qid<TAB>doc_id<TAB>annotator<TAB>{0|1|2}`.
inline JudgmentSet load_judgments(const std::string& path) {
    JudgmentSet out;
    auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = detail::split_tabs(lines[i]);
        if (fields.size() != 4)
            throw ParseError("expected 4 tab-separated fields at " +
                             detail::at_line(path, i + 1));
        const std::string& raw = fields[3];
        if (raw.size() != 1 || raw[0] < '0' || raw[0] > '2')
            throw ValidationError("rating must be 0, 1 or 2 at " +
                                  detail::at_line(path, i + 1));
        out.add(fields[0], fields[1], fields[2], raw[0] - '0');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization (round-trips through the loaders above)
// ---------------------------------------------------------------------------

inline void save_queries(const QuerySet& queries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (const auto& q : queries) out << q.qid << '\t' << q.raw_text << '\n';
}

inline std::string render_segments(const Segmentation& seg, const Query& query) {
    std::string text;
    auto groups = segment_tokens(seg, query);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i) text += " | ";
        text += join_tokens(groups[i]);
    }
    return text;
}

inline void save_segmentations(const std::vector<Segmentation>& segmentations,
                               const QuerySet& queries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (const auto& seg : segmentations)
        out << seg.qid << '\t' << seg.strategy_id << '\t'
            << render_segments(seg, queries.at(seg.qid)) << '\n';
}

}  // namespace qseval
