// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/error.hpp"
#include "qseval/matchmetrics.hpp"
#include "qseval/text.hpp"

namespace qseval {

/// Published reference thresholds for the two PMI baselines (web n-grams
/// and query-log n-grams). Retained as named constants; actual runs tune
/// their own threshold on a dev set.
inline constexpr double kPmiWebThreshold = 8.141;
inline constexpr double kPmiQueryThreshold = 0.156;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

struct PmiModel {
    std::unordered_map<std::string, long long> unigram_counts;
    std::map<std::pair<std::string, std::string>, long long> bigram_counts;
    long long total_unigrams = 0;
    long long total_bigrams = 0;
    double threshold = 0.0;

    /// log2(p(a,b) / (p(a) p(b))); never-co-occurring pairs sink to -inf
    /// so they always split.
    double pmi(const std::string& a, const std::string& b) const {
        auto big = bigram_counts.find({a, b});
        if (big == bigram_counts.end() || big->second <= 0) return kNegInf;
        auto ua = unigram_counts.find(a);
        auto ub = unigram_counts.find(b);
        if (ua == unigram_counts.end() || ub == unigram_counts.end()) return kNegInf;
        if (total_unigrams <= 0 || total_bigrams <= 0) return kNegInf;
        double p_ab = static_cast<double>(big->second) / static_cast<double>(total_bigrams);
        double p_a = static_cast<double>(ua->second) / static_cast<double>(total_unigrams);
        double p_b = static_cast<double>(ub->second) / static_cast<double>(total_unigrams);
        return std::log2(p_ab / (p_a * p_b));
    }
};

inline PmiModel train_pmi(const std::vector<std::vector<std::string>>& token_streams) {
    PmiModel model;
    for (const auto& stream : token_streams) {
        for (std::size_t i = 0; i < stream.size(); ++i) {
            ++model.unigram_counts[stream[i]];
            ++model.total_unigrams;
            if (i + 1 < stream.size()) {
                ++model.bigram_counts[{stream[i], stream[i + 1]}];
                ++model.total_bigrams;
            }
        }
    }
    if (model.total_unigrams == 0) throw ValidationError("cannot train PMI model on empty corpus");
    return model;
}

/// Raw text corpus: one line per record, tokenized like queries.
inline PmiModel load_pmi_corpus(const std::string& path) {
    std::vector<std::vector<std::string>> streams;
    for (const auto& line : detail::read_lines(path)) {
        auto tokens = tokenize(line);
        if (!tokens.empty()) streams.push_back(std::move(tokens));
    }
    if (streams.empty()) throw ValidationError("empty n-gram corpus: " + path);
    return train_pmi(streams);
}

/// Precomputed counts: `token<TAB>count` for unigrams,
/// `token<TAB>token<TAB>count` for bigrams.
inline PmiModel load_pmi_counts(const std::string& path) {
    PmiModel model;
    std::size_t lineno = 0;
    for (const auto& line : detail::read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        try {
            if (fields.size() == 2) {
                long long count = std::stoll(fields[1]);
                if (count < 0) throw ParseError("negative count");
                model.unigram_counts[fields[0]] += count;
                model.total_unigrams += count;
            } else if (fields.size() == 3) {
                long long count = std::stoll(fields[2]);
                if (count < 0) throw ParseError("negative count");
                model.bigram_counts[{fields[0], fields[1]}] += count;
                model.total_bigrams += count;
            } else {
                throw ParseError("expected 2 or 3 tab-separated fields");
            }
        } catch (const std::exception& e) {
            throw ParseError(std::string(e.what()) + detail::at_line(path, lineno));
        }
    }
    if (model.total_unigrams == 0) throw ValidationError("no unigram counts in: " + path);
    return model;
}

/// Boundary after position i whenever the adjacent pair scores below the
/// threshold. -inf threshold keeps everything joined, +inf splits all.
inline std::set<std::size_t> pmi_boundaries(const PmiModel& model,
                                            const std::vector<std::string>& tokens) {
    std::set<std::size_t> boundaries;
    for (std::size_t i = 1; i < tokens.size(); ++i)
        if (model.pmi(tokens[i - 1], tokens[i]) < model.threshold) boundaries.insert(i);
    return boundaries;
}

inline Segmentation segment_pmi(const PmiModel& model, const Query& q,
                                const std::string& strategy_id = "pmi") {
    return Segmentation{q.qid, strategy_id, pmi_boundaries(model, q.tokens)};
}

/// Grid search over every threshold that produces distinct behaviour (the
/// observed adjacent PMI values plus the two infinities), maximizing
/// Seg-F against the dev reference; ties go to the smaller threshold.
inline double tune_pmi_threshold(const PmiModel& model, const QuerySet& dev_queries,
                                 const StrategySegmentations& dev_reference) {
    if (dev_queries.size() == 0) throw ValidationError("cannot tune on an empty dev set");
    std::set<double> candidates{kNegInf, kPosInf};
    for (const auto& q : dev_queries)
        for (std::size_t i = 1; i < q.tokens.size(); ++i)
            candidates.insert(model.pmi(q.tokens[i - 1], q.tokens[i]));

    PmiModel probe = model;
    double best_threshold = kNegInf;
    double best_f = -1.0;
    for (double t : candidates) {
        probe.threshold = t;
        StrategySegmentations out{"tuning", {}};
        for (const auto& q : dev_queries) out.by_qid.emplace(q.qid, segment_pmi(probe, q, "tuning"));
        double f = match_scores(out, dev_reference, dev_queries).seg_f;
        if (f > best_f) {
            best_f = f;
            best_threshold = t;
        }
    }
    return best_threshold;
}

using Phase1Fn = std::function<std::set<std::size_t>(const std::vector<std::string>&)>;

inline Phase1Fn make_pmi_phase1(const PmiModel& model) {
    return [model](const std::vector<std::string>& tokens) {
        return pmi_boundaries(model, tokens);
    };
}

struct WikiScoreTable {
    std::map<std::vector<std::string>, double> scores;
    std::map<std::string, double> unigram_scores;
    std::size_t skipped_titles = 0;
    std::size_t dropped_nonpositive = 0;
};

namespace detail {

/// n-gram occurrence statistics over the segmented query log, with
/// probabilities relative to the number of slots of that length.
class NgramStats {
   public:
    explicit NgramStats(const std::vector<std::vector<std::string>>& entries)
        : entries_(entries) {}

    long long slots(std::size_t len) const {
        long long total = 0;
        for (const auto& e : entries_)
            if (e.size() >= len) total += static_cast<long long>(e.size() - len + 1);
        return total;
    }

    long long freq(const std::vector<std::string>& gram) const {
        std::string key = join_tokens(gram, "\x1f");
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        long long count = 0;
        for (const auto& e : entries_) {
            if (e.size() < gram.size()) continue;
            for (std::size_t i = 0; i + gram.size() <= e.size(); ++i) {
                bool hit = true;
                for (std::size_t j = 0; j < gram.size(); ++j) {
                    if (e[i + j] != gram[j]) {
                        hit = false;
                        break;
                    }
                }
                if (hit) ++count;
            }
        }
        cache_.emplace(std::move(key), count);
        return count;
    }

    /// PMI of two adjacent token sequences, -inf when anything is unseen.
    double pmi(const std::vector<std::string>& left, const std::vector<std::string>& right) const {
        std::vector<std::string> whole = left;
        whole.insert(whole.end(), right.begin(), right.end());
        long long f_whole = freq(whole), f_left = freq(left), f_right = freq(right);
        if (f_whole <= 0 || f_left <= 0 || f_right <= 0) return kNegInf;
        long long s_whole = slots(whole.size()), s_left = slots(left.size()),
                  s_right = slots(right.size());
        if (s_whole <= 0 || s_left <= 0 || s_right <= 0) return kNegInf;
        double p_whole = static_cast<double>(f_whole) / static_cast<double>(s_whole);
        double p_left = static_cast<double>(f_left) / static_cast<double>(s_left);
        double p_right = static_cast<double>(f_right) / static_cast<double>(s_right);
        return std::log2(p_whole / (p_left * p_right));
    }

   private:
    const std::vector<std::vector<std::string>>& entries_;
    mutable std::unordered_map<std::string, long long> cache_;
};

}  // namespace detail

/// Builds the Wikipedia-title score table. Titles and the query log are
/// stemmed with the same rules, each title is segmented by the supplied
/// phase-1 segmenter, and an n-segment title is scored by the better of
/// its two edge splits (first n-1 segments vs last, first vs last n-1)
/// under PMI with frequencies from the query log. Single-segment and
/// never-seen titles are skipped; non-positive scores are dropped so the
/// later product objective stays over positive reals. A title tuple seen
/// twice keeps its best score.
inline WikiScoreTable wiki_boost(const SegmentedCorpus& qprime,
                                 const std::vector<std::vector<std::string>>& titles,
                                 const Phase1Fn& phase1) {
    std::vector<std::vector<std::string>> stemmed_entries;
    stemmed_entries.reserve(qprime.size());
    for (const auto& entry : qprime) stemmed_entries.push_back(stem_all(entry.tokens));
    detail::NgramStats stats(stemmed_entries);

    WikiScoreTable table;
    long long total_tokens = stats.slots(1);
    if (total_tokens > 0) {
        std::map<std::string, long long> unigram_counts;
        for (const auto& e : stemmed_entries)
            for (const auto& tok : e) ++unigram_counts[tok];
        for (const auto& [tok, count] : unigram_counts)
            table.unigram_scores[tok] =
                static_cast<double>(count) / static_cast<double>(total_tokens);
    }

    for (const auto& raw_title : titles) {
        auto tokens = stem_all(raw_title);
        if (tokens.size() < 2) {
            ++table.skipped_titles;
            continue;
        }
        auto boundaries = phase1(tokens);
        validate_boundaries(boundaries, tokens.size(), "title");
        auto spans = segment_spans(boundaries, tokens.size());
        std::size_t n = spans.size();
        if (n < 2) {
            ++table.skipped_titles;
            continue;
        }

        auto slice = [&](std::size_t from_span, std::size_t to_span) {
            return std::vector<std::string>(
                tokens.begin() + static_cast<std::ptrdiff_t>(spans[from_span].first),
                tokens.begin() + static_cast<std::ptrdiff_t>(spans[to_span].second));
        };
        std::vector<std::string> head = slice(0, n - 2), tail = slice(n - 1, n - 1);
        std::vector<std::string> first = slice(0, 0), rest = slice(1, n - 1);
        double score = std::max(stats.pmi(head, tail), stats.pmi(first, rest));
        if (score == kNegInf) {
            ++table.skipped_titles;
            continue;
        }
        if (score <= 0.0) {
            ++table.dropped_nonpositive;
            continue;
        }
        std::vector<std::string> tuple;
        for (std::size_t s = 0; s < n; ++s) tuple.push_back(join_tokens(slice(s, s)));
        auto [it, inserted] = table.scores.emplace(tuple, score);
        if (!inserted && score > it->second) it->second = score;
    }
    return table;
}

/// Joins adjacent phase-1 segments into output segments maximizing the
/// product of group scores. A group scores its table entry when one
/// exists; singletons fall back to a neutral 1 while a multi-segment
/// group without an entry is disallowed. Ties prefer fewer output
/// segments, then the leftmost-longest grouping. Products are folded
/// right-to-left so an exhaustive re-evaluation reproduces them exactly.
inline Segmentation seg_phase2(const Segmentation& qprime, const std::vector<std::string>& tokens,
                               const WikiScoreTable& table) {
    validate_boundaries(qprime.boundaries, tokens.size(), "query " + qprime.qid);
    auto stemmed = stem_all(tokens);
    auto spans = segment_spans(qprime.boundaries, tokens.size());
    std::size_t m = spans.size();

    std::vector<std::string> segment_strings(m);
    for (std::size_t s = 0; s < m; ++s)
        segment_strings[s] = join_tokens({stemmed.begin() + static_cast<std::ptrdiff_t>(spans[s].first),
                                          stemmed.begin() + static_cast<std::ptrdiff_t>(spans[s].second)});

    struct Cell {
        double product = 1.0;
        std::size_t groups = 0;
        std::size_t split = 0;  // end segment index of the first group
    };
    std::vector<Cell> best(m + 1);
    for (std::size_t i = m; i-- > 0;) {
        bool have = false;
        for (std::size_t j = i; j < m; ++j) {
            double g;
            auto it = table.scores.find(
                std::vector<std::string>(segment_strings.begin() + static_cast<std::ptrdiff_t>(i),
                                         segment_strings.begin() + static_cast<std::ptrdiff_t>(j + 1)));
            if (it != table.scores.end()) {
                g = it->second;
            } else if (j == i) {
                g = 1.0;
            } else {
                continue;
            }
            Cell cand{g * best[j + 1].product, 1 + best[j + 1].groups, j};
            if (!have || cand.product > best[i].product ||
                (cand.product == best[i].product &&
                 (cand.groups < best[i].groups ||
                  (cand.groups == best[i].groups && cand.split > best[i].split)))) {
                best[i] = cand;
                have = true;
            }
        }
    }

    Segmentation out{qprime.qid, qprime.strategy_id, {}};
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = best[i].split;
        if (j + 1 < m) out.boundaries.insert(spans[j].second);
        i = j + 1;
    }
    return out;
}

}  // namespace qseval
