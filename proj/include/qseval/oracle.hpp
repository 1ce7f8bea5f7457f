// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qseval/corpus.hpp"
#include "qseval/engine.hpp"
#include "qseval/error.hpp"
#include "qseval/irmetrics.hpp"
#include "qseval/quotegen.hpp"

namespace qseval {

inline constexpr const char* kBqvStrategyId = "bqv-bf";

struct OracleResult {
    std::string qid;
    std::string strategy_id;
    MetricSpec metric;
    QuotedVersion best_version;
    double best_score = 0.0;
    std::vector<std::pair<QuotedVersion, double>> per_version_scores;
    double min_score = 0.0;
};

struct QvrsReport {
    std::string strategy_id;
    MetricSpec metric;
    double qvrs = 0.0;
    std::map<std::string, OracleResult> per_query;
};

/// A version's ranked results, cached so several metrics can share one
/// search. Results must be at least as deep as any cutoff later applied.
struct VersionEvaluation {
    QuotedVersion version;
    std::vector<SearchResult> results;
};

inline std::vector<VersionEvaluation> evaluate_versions(const VersionSet& versions,
                                                        const Index& index, std::size_t depth) {
    std::vector<VersionEvaluation> out;
    out.reserve(versions.size());
    for (const auto& v : versions) out.push_back({v, index.search(v, depth)});
    return out;
}

/// Max over the evaluated versions under the deterministic tie-break:
/// higher score, then fewer quoted clauses, then lower bitmask, then
/// earlier position in the version set.
inline OracleResult oracle_from_evaluations(const Query& q, const std::string& strategy_id,
                                            const std::vector<VersionEvaluation>& evals,
                                            const JudgmentSet& judgments,
                                            const MetricSpec& metric) {
    if (evals.empty()) throw ValidationError("no versions to evaluate for query " + q.qid);
    OracleResult out;
    out.qid = q.qid;
    out.strategy_id = strategy_id;
    out.metric = metric;
    out.min_score = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    bool first = true;
    for (const auto& eval : evals) {
        double score = evaluate_metric(metric, q, eval.results, judgments);
        out.per_version_scores.push_back({eval.version, score});
        std::size_t idx = out.per_version_scores.size() - 1;
        if (score < out.min_score) out.min_score = score;
        if (first) {
            best = idx;
            first = false;
            continue;
        }
        const auto& [bv, bs] = out.per_version_scores[best];
        if (score > bs ||
            (score == bs && (eval.version.quoted_clause_count() < bv.quoted_clause_count() ||
                             (eval.version.quoted_clause_count() == bv.quoted_clause_count() &&
                              eval.version.bitmask < bv.bitmask))))
            best = idx;
    }
    out.best_version = out.per_version_scores[best].first;
    out.best_score = out.per_version_scores[best].second;
    return out;
}

inline OracleResult oracle_score(const Query& q, const Segmentation& seg, const Index& index,
                                 const JudgmentSet& judgments, const MetricSpec& metric,
                                 std::size_t segment_cap = kDefaultSegmentCap) {
    auto versions = generate_versions(seg, q, segment_cap);
    auto evals = evaluate_versions(versions, index, metric.k);
    return oracle_from_evaluations(q, seg.strategy_id, evals, judgments, metric);
}

inline OracleResult bqv_brute_force(const Query& q, const Index& index,
                                    const JudgmentSet& judgments, const MetricSpec& metric,
                                    std::size_t token_cap = kDefaultTokenCap) {
    auto versions = enumerate_all_partitions(q, token_cap);
    auto evals = evaluate_versions(versions, index, metric.k);
    return oracle_from_evaluations(q, kBqvStrategyId, evals, judgments, metric);
}

/// Mean of per-query oracle scores. Summation runs in qid order so the
/// result does not depend on input file order.
inline QvrsReport qvrs(const QuerySet& queries, const StrategySegmentations& strategy,
                       const Index& index, const JudgmentSet& judgments, const MetricSpec& metric,
                       std::size_t segment_cap = kDefaultSegmentCap) {
    if (queries.size() == 0) throw ValidationError("qvrs needs at least one query");
    std::string missing;
    for (const auto& q : queries)
        if (!strategy.by_qid.count(q.qid)) missing += (missing.empty() ? "" : ", ") + q.qid;
    if (!missing.empty())
        throw ValidationError("strategy '" + strategy.strategy_id +
                              "' is missing segmentations for: " + missing);

    QvrsReport report;
    report.strategy_id = strategy.strategy_id;
    report.metric = metric;
    for (const auto& q : queries)
        report.per_query.emplace(
            q.qid, oracle_score(q, strategy.by_qid.at(q.qid), index, judgments, metric,
                                segment_cap));
    double sum = 0.0;
    for (const auto& [qid, result] : report.per_query) {
        (void)qid;
        sum += result.best_score;
    }
    report.qvrs = sum / static_cast<double>(report.per_query.size());
    return report;
}

/// Narrow engine interface for pooling and substitution: rendered version
/// string in, ranked documents out. Implementations may throw; build_pool
/// converts throws into warnings.
class EngineAdapter {
   public:
    virtual ~EngineAdapter() = default;
    virtual std::vector<SearchResult> search(const std::string& rendered_version,
                                             std::size_t k) const = 0;
    virtual std::vector<Document> top_documents(const std::string& rendered_version,
                                                std::size_t depth) const = 0;
};

struct PoolResult {
    DocumentPool pool;
    std::vector<std::string> warnings;
    std::size_t versions_queried = 0;
};

/// Union of every strategy's every version's top-`depth` documents,
/// deduplicated by URL in first-seen order. Adapter failures surface as
/// warnings, not errors; live engines misbehave and the pool should
/// survive that.
inline PoolResult build_pool(const QuerySet& queries,
                             const std::vector<StrategySegmentations>& strategies,
                             const EngineAdapter& adapter, std::size_t depth,
                             std::size_t segment_cap = kDefaultSegmentCap) {
    if (depth < 1) throw ValidationError("pool depth must be >= 1");
    PoolResult out;
    std::unordered_set<std::string> seen_renders;
    std::unordered_set<std::string> seen_urls;
    std::unordered_set<std::string> seen_doc_ids;
    for (const auto& strategy : strategies) {
        for (const auto& q : queries) {
            auto seg_it = strategy.by_qid.find(q.qid);
            if (seg_it == strategy.by_qid.end()) continue;
            VersionSet versions;
            try {
                versions = generate_versions(seg_it->second, q, segment_cap);
            } catch (const std::exception& e) {
                out.warnings.push_back("query " + q.qid + " strategy " + strategy.strategy_id +
                                       ": " + e.what());
                continue;
            }
            for (const auto& v : versions) {
                std::string rendered = render(v);
                if (!seen_renders.insert(rendered).second) continue;
                ++out.versions_queried;
                std::vector<Document> docs;
                try {
                    docs = adapter.top_documents(rendered, depth);
                } catch (const std::exception& e) {
                    out.warnings.push_back("version '" + rendered + "': " + e.what());
                    continue;
                }
                for (const auto& doc : docs) {
                    if (!seen_urls.insert(doc.url).second) continue;
                    if (!seen_doc_ids.insert(doc.doc_id).second) continue;
                    out.pool.add(doc);
                }
            }
        }
    }
    return out;
}

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool significant = false;
    std::size_t df = 0;
};

namespace detail {

inline double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-16;
    const double fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log(1.0 - x);
    double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

inline constexpr double kSignificanceAlpha = 0.05;

/// Two-sided paired t-test on per-query score vectors. Zero-variance
/// differences degenerate cleanly: no difference at all is p = 1, a
/// constant nonzero difference is taken as maximally significant.
inline TTestResult paired_t_test(const std::vector<double>& scores_a,
                                 const std::vector<double>& scores_b) {
    if (scores_a.size() != scores_b.size())
        throw ValidationError("paired t-test inputs differ in length");
    if (scores_a.size() < 2) throw ValidationError("paired t-test needs at least 2 pairs");
    std::size_t n = scores_a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += scores_a[i] - scores_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = scores_a[i] - scores_b[i] - mean;
        ss += d * d;
    }
    double var = ss / static_cast<double>(n - 1);
    TTestResult out;
    out.df = n - 1;
    if (var == 0.0) {
        if (mean == 0.0) return out;
        out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        out.p = 0.0;
        out.significant = true;
        return out;
    }
    out.t = mean / std::sqrt(var / static_cast<double>(n));
    double df = static_cast<double>(out.df);
    out.p = detail::reg_incomplete_beta(df / 2.0, 0.5, df / (df + out.t * out.t));
    out.significant = out.p < kSignificanceAlpha;
    return out;
}

/// Fraction of queries by number of multiword segments.
inline std::map<std::size_t, double> multiword_distribution(
    const std::vector<Segmentation>& segs, const QuerySet& queries) {
    std::map<std::size_t, double> hist;
    if (segs.empty()) return hist;
    for (const auto& seg : segs)
        hist[multiword_segment_count(seg, queries.at(seg.qid).length())] += 1.0;
    for (auto& [bucket, value] : hist) {
        (void)bucket;
        value /= static_cast<double>(segs.size());
    }
    return hist;
}

}  // namespace qseval
