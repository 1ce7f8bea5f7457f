// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/engine.hpp"
#include "qseval/error.hpp"

namespace qseval {

enum class MetricKind { nDCG, MAP, MRR };

inline std::string metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::nDCG: return "nDCG";
        case MetricKind::MAP: return "MAP";
        case MetricKind::MRR: return "MRR";
    }
    return "?";
}

struct MetricSpec {
    MetricKind kind = MetricKind::nDCG;
    std::size_t k = 10;
    double map_threshold = 1.0;
    double mrr_threshold = 2.0;
    bool normalize_dcg = true;

    void validate() const {
        if (k < 1) throw ValidationError("metric cutoff k must be >= 1");
        if (map_threshold <= 0.0 || map_threshold > 2.0)
            throw ValidationError("map threshold must lie in (0,2]");
        if (mrr_threshold <= 0.0 || mrr_threshold > 2.0)
            throw ValidationError("mrr threshold must lie in (0,2]");
    }

    std::string name() const { return metric_kind_name(kind) + "@" + std::to_string(k); }
};

/// Discounted cumulative gain with rank weights 1, 1/log2(2), 1/log2(3), ...
/// Note log2(2) = 1, so ranks 1 and 2 carry equal weight; that is the
/// intended discount here, not an off-by-one.
inline double dcg_at_k(const std::vector<double>& gains, std::size_t k) {
    if (k < 1) throw ValidationError("dcg cutoff k must be >= 1");
    double dcg = 0.0;
    std::size_t upto = std::min(k, gains.size());
    for (std::size_t j = 1; j <= upto; ++j) {
        double weight = j == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(j));
        dcg += gains[j - 1] * weight;
    }
    return dcg;
}

inline double dcg_at_k(const Query& q, const std::vector<SearchResult>& list,
                       const JudgmentSet& judgments, std::size_t k) {
    std::vector<double> gains;
    gains.reserve(std::min(k, list.size()));
    for (std::size_t j = 0; j < list.size() && j < k; ++j)
        gains.push_back(judgments.rating(q.qid, list[j].doc_id).value());
    return dcg_at_k(gains, k);
}

/// Ideal gain vector: every judged document of the query, best first.
inline std::vector<double> ideal_gains(const Query& q, const JudgmentSet& judgments) {
    std::vector<double> gains;
    for (const auto& [doc_id, by_annotator] : judgments.judged_for(q.qid)) {
        (void)doc_id;
        int sum = 0;
        for (const auto& [annotator, rating] : by_annotator) {
            (void)annotator;
            sum += rating;
        }
        gains.push_back(static_cast<double>(sum) / static_cast<double>(by_annotator.size()));
    }
    std::sort(gains.begin(), gains.end(), std::greater<double>());
    return gains;
}

inline double ndcg_at_k(const Query& q, const std::vector<SearchResult>& list,
                        const JudgmentSet& judgments, std::size_t k) {
    double ideal = dcg_at_k(ideal_gains(q, judgments), k);
    if (ideal <= 0.0) return 0.0;
    return dcg_at_k(q, list, judgments, k) / ideal;
}

inline double map_at_k(const Query& q, const std::vector<SearchResult>& list,
                       const JudgmentSet& judgments, std::size_t k, double threshold = 1.0) {
    if (k < 1) throw ValidationError("map cutoff k must be >= 1");
    std::size_t total_relevant = judgments.relevant_count(q.qid, threshold);
    std::size_t denom = std::min(total_relevant, k);
    if (denom == 0) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t j = 1; j <= list.size() && j <= k; ++j) {
        if (!judgments.rating(q.qid, list[j - 1].doc_id).at_least(threshold)) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(j);
    }
    return sum / static_cast<double>(denom);
}

inline double mrr_at_k(const Query& q, const std::vector<SearchResult>& list,
                       const JudgmentSet& judgments, std::size_t k, double threshold = 2.0) {
    if (k < 1) throw ValidationError("mrr cutoff k must be >= 1");
    for (std::size_t j = 1; j <= list.size() && j <= k; ++j)
        if (judgments.rating(q.qid, list[j - 1].doc_id).at_least(threshold))
            return 1.0 / static_cast<double>(j);
    return 0.0;
}

inline double evaluate_metric(const MetricSpec& spec, const Query& q,
                              const std::vector<SearchResult>& list,
                              const JudgmentSet& judgments) {
    spec.validate();
    switch (spec.kind) {
        case MetricKind::nDCG:
            return spec.normalize_dcg ? ndcg_at_k(q, list, judgments, spec.k)
                                      : dcg_at_k(q, list, judgments, spec.k);
        case MetricKind::MAP:
            return map_at_k(q, list, judgments, spec.k, spec.map_threshold);
        case MetricKind::MRR:
            return mrr_at_k(q, list, judgments, spec.k, spec.mrr_threshold);
    }
    return 0.0;
}

}  // namespace qseval
