// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/error.hpp"

namespace qseval {

struct MatchScores {
    double qry_acc = 0.0;
    double seg_prec = 0.0;
    double seg_rec = 0.0;
    double seg_f = 0.0;
    double seg_acc = 0.0;
};

inline double harmonic_mean(double a, double b) {
    if (a + b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

namespace detail {

inline void check_coverage(const std::map<std::string, Segmentation>& output,
                           const std::map<std::string, Segmentation>& reference) {
    std::string missing;
    for (const auto& [qid, seg] : reference)
        if (!output.count(qid)) missing += (missing.empty() ? "" : ", ") + qid;
    for (const auto& [qid, seg] : output)
        if (!reference.count(qid)) missing += (missing.empty() ? "" : ", ") + qid;
    if (!missing.empty())
        throw ValidationError("output and reference cover different queries: " + missing);
    if (reference.empty()) throw ValidationError("no queries to compare");
}

}  // namespace detail

/// Per-query boundary accuracy: of the l-1 internal positions, how many
/// agree on boundary/non-boundary. One-word queries have no positions to
/// decide, which counts as full agreement.
inline double seg_acc_for(const Segmentation& output, const Segmentation& reference,
                          std::size_t token_count) {
    if (token_count <= 1) return 1.0;
    std::size_t agree = 0;
    for (std::size_t pos = 1; pos < token_count; ++pos)
        if (output.boundaries.count(pos) == reference.boundaries.count(pos)) ++agree;
    return static_cast<double>(agree) / static_cast<double>(token_count - 1);
}

/// Count of segments identical as token spans in both segmentations.
inline std::size_t span_overlap(const Segmentation& output, const Segmentation& reference,
                                std::size_t token_count) {
    auto a = segment_spans(output.boundaries, token_count);
    auto b = segment_spans(reference.boundaries, token_count);
    std::set<std::pair<std::size_t, std::size_t>> ref_spans(b.begin(), b.end());
    std::size_t overlap = 0;
    for (const auto& span : a)
        if (ref_spans.count(span)) ++overlap;
    return overlap;
}

/// The five matching metrics of one strategy against a reference, averaged
/// per query. seg_f is the harmonic mean of the aggregated precision and
/// recall, which is how the usual summary tables combine them.
inline MatchScores match_scores(const StrategySegmentations& output,
                                const StrategySegmentations& reference,
                                const QuerySet& queries) {
    detail::check_coverage(output.by_qid, reference.by_qid);
    MatchScores total;
    std::size_t n = 0;
    for (const auto& [qid, ref_seg] : reference.by_qid) {
        const Segmentation& out_seg = output.by_qid.at(qid);
        const Query& q = queries.at(qid);
        validate_boundaries(ref_seg.boundaries, q.length(), "query " + qid);
        validate_boundaries(out_seg.boundaries, q.length(), "query " + qid);
        std::size_t overlap = span_overlap(out_seg, ref_seg, q.length());
        total.qry_acc += out_seg.boundaries == ref_seg.boundaries ? 1.0 : 0.0;
        total.seg_prec +=
            static_cast<double>(overlap) / static_cast<double>(out_seg.segment_count());
        total.seg_rec +=
            static_cast<double>(overlap) / static_cast<double>(ref_seg.segment_count());
        total.seg_acc += seg_acc_for(out_seg, ref_seg, q.length());
        ++n;
    }
    MatchScores out;
    out.qry_acc = total.qry_acc / static_cast<double>(n);
    out.seg_prec = total.seg_prec / static_cast<double>(n);
    out.seg_rec = total.seg_rec / static_cast<double>(n);
    out.seg_acc = total.seg_acc / static_cast<double>(n);
    out.seg_f = harmonic_mean(out.seg_prec, out.seg_rec);
    return out;
}

inline double qry_acc(const StrategySegmentations& output, const StrategySegmentations& reference,
                      const QuerySet& queries) {
    return match_scores(output, reference, queries).qry_acc;
}
inline double seg_prec(const StrategySegmentations& output, const StrategySegmentations& reference,
                       const QuerySet& queries) {
    return match_scores(output, reference, queries).seg_prec;
}
inline double seg_rec(const StrategySegmentations& output, const StrategySegmentations& reference,
                      const QuerySet& queries) {
    return match_scores(output, reference, queries).seg_rec;
}
inline double seg_f(const StrategySegmentations& output, const StrategySegmentations& reference,
                    const QuerySet& queries) {
    return match_scores(output, reference, queries).seg_f;
}
inline double seg_acc(const StrategySegmentations& output, const StrategySegmentations& reference,
                      const QuerySet& queries) {
    return match_scores(output, reference, queries).seg_acc;
}

/// Kendall rank correlation over two score vectors paired by index. Uses
/// the tie-adjusted tau-b denominator, which reduces to plain tau when
/// both inputs are tie-free. A degenerate input with every pair tied has
/// no orderings to compare; returns 0.
inline double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("kendall_tau inputs differ in length");
    if (a.size() < 2) throw ValidationError("kendall_tau needs at least 2 items");
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            double da = a[i] - a[j];
            double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) {
                ++ties_a;
                ++ties_b;
            } else if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if ((da > 0.0) == (db > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    long long n0 = static_cast<long long>(a.size()) * (static_cast<long long>(a.size()) - 1) / 2;
    // single sqrt keeps tie-free inputs exact: sqrt(n0*n0) == n0
    double denom = std::sqrt(static_cast<double>(n0 - ties_a) * static_cast<double>(n0 - ties_b));
    if (denom == 0.0) return 0.0;
    return static_cast<double>(concordant - discordant) / denom;
}

/// Key-aligned overload for score maps (strategy -> score).
inline double kendall_tau(const std::map<std::string, double>& a,
                          const std::map<std::string, double>& b) {
    if (a.size() != b.size()) throw ValidationError("kendall_tau maps differ in key count");
    std::vector<double> va, vb;
    for (const auto& [key, score] : a) {
        auto it = b.find(key);
        if (it == b.end()) throw ValidationError("kendall_tau maps disagree on key: " + key);
        va.push_back(score);
        vb.push_back(it->second);
    }
    return kendall_tau(va, vb);
}

struct IaaSegmentationRow {
    std::string reference_annotator;
    MatchScores mean_scores;
};

/// Each annotator in turn plays reference; the others are scored against
/// it and their five metrics averaged arithmetically.
inline std::vector<IaaSegmentationRow> iaa_segmentation(
    const std::map<std::string, StrategySegmentations>& annotations, const QuerySet& queries) {
    if (annotations.size() < 2)
        throw ValidationError("segmentation agreement needs at least 2 annotators");
    std::vector<IaaSegmentationRow> rows;
    for (const auto& [ref_name, ref_segs] : annotations) {
        MatchScores sum;
        std::size_t n = 0;
        for (const auto& [out_name, out_segs] : annotations) {
            if (out_name == ref_name) continue;
            MatchScores s = match_scores(out_segs, ref_segs, queries);
            sum.qry_acc += s.qry_acc;
            sum.seg_prec += s.seg_prec;
            sum.seg_rec += s.seg_rec;
            sum.seg_f += s.seg_f;
            sum.seg_acc += s.seg_acc;
            ++n;
        }
        MatchScores mean{sum.qry_acc / n, sum.seg_prec / n, sum.seg_rec / n, sum.seg_f / n,
                         sum.seg_acc / n};
        rows.push_back({ref_name, mean});
    }
    return rows;
}

struct JudgmentAgreement {
    std::string annotator_a;
    std::string annotator_b;
    std::size_t co_judged = 0;
    std::size_t disagreements = 0;
    double agreement = 1.0;
};

/// Pairwise rating agreement. Only the extreme clashes count: one
/// annotator rating 0 where the other rated 2. Pairs that never co-judged
/// a (query, document) cell are omitted.
inline std::vector<JudgmentAgreement> iaa_judgments(const JudgmentSet& judgments) {
    std::vector<std::string> annotators(judgments.annotators().begin(),
                                        judgments.annotators().end());
    if (annotators.size() < 2)
        throw ValidationError("judgment agreement needs at least 2 annotators");
    std::vector<JudgmentAgreement> out;
    for (std::size_t i = 0; i < annotators.size(); ++i) {
        for (std::size_t j = i + 1; j < annotators.size(); ++j) {
            JudgmentAgreement pair{annotators[i], annotators[j], 0, 0, 1.0};
            for (const auto& [qid, by_doc] : judgments.cells()) {
                (void)qid;
                for (const auto& [doc, by_annotator] : by_doc) {
                    (void)doc;
                    auto ia = by_annotator.find(pair.annotator_a);
                    auto ib = by_annotator.find(pair.annotator_b);
                    if (ia == by_annotator.end() || ib == by_annotator.end()) continue;
                    ++pair.co_judged;
                    int lo = std::min(ia->second, ib->second);
                    int hi = std::max(ia->second, ib->second);
                    if (lo == 0 && hi == 2) ++pair.disagreements;
                }
            }
            if (pair.co_judged == 0) continue;
            pair.agreement = 1.0 - static_cast<double>(pair.disagreements) /
                                       static_cast<double>(pair.co_judged);
            out.push_back(pair);
        }
    }
    return out;
}

}  // namespace qseval
