#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "skillguard/types.hpp"

namespace skillguard::stats {

/// Symmetric pattern co-occurrence counts. Diagonal holds per-pattern skill
/// counts; the axis always carries all 14 ids (unobserved rows stay zero).
struct CooccurrenceMatrix {
    std::vector<PatternId> ids;
    std::vector<std::vector<std::size_t>> counts;
    std::size_t n_skills = 0;

    std::size_t index_of(PatternId id) const;  // throws UnknownPattern
    std::size_t at(PatternId i, PatternId j) const;
};

/// Throws EmptyDataset for an empty entry list and EmptyPatternSet for an
/// entry with no patterns.
CooccurrenceMatrix build_cooccurrence(const std::vector<std::set<PatternId>>& entries);

/// Builds a matrix from explicit counts (used for published-table fixtures);
/// validates symmetry and count bounds.
CooccurrenceMatrix matrix_from_counts(std::vector<PatternId> ids,
                                      std::vector<std::vector<std::size_t>> counts,
                                      std::size_t n_skills);

struct ContingencyTable {
    std::size_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    std::size_t total() const { return n11 + n10 + n01 + n00; }
};

ContingencyTable contingency_from(const CooccurrenceMatrix& matrix, PatternId pi, PatternId pj);

struct RatioParts {
    std::uint64_t numerator = 0;    // n11 * n00
    std::uint64_t denominator = 0;  // n10 * n01
};

RatioParts odds_ratio_parts(const ContingencyTable& t);

/// (n11*n00)/(n10*n01); +infinity when only the denominator is zero, NaN when
/// both products are zero.
double odds_ratio(const ContingencyTable& t);

/// P(then | given) = co-count / diag(given). Throws ZeroSupport.
double conditional_probability(const CooccurrenceMatrix& matrix, PatternId given, PatternId then_id);

enum class TestMethod : std::uint8_t { fisher_exact, mann_whitney_u, spearman };
enum class Sidedness : std::uint8_t { two_sided };

std::string_view to_string(TestMethod method);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::fisher_exact;
    Sidedness sidedness = Sidedness::two_sided;
    std::string detail;  // "exact" / "normal_approx" / "t_approx" / "undefined"
};

/// Two-sided exact test: sums hypergeometric probabilities no larger than the
/// observed table's. Guarded to n <= 10,000 (OverflowGuard).
TestResult fisher_exact(const ContingencyTable& t);

double bonferroni_adjust(double alpha, std::size_t k);  // throws NonPositiveK

struct ChainResult {
    PatternId from = PatternId::E1;  // ordered by kill-chain phase
    PatternId to = PatternId::E1;
    std::size_t co_count = 0;
    double odds_ratio = 0.0;
    double p_value = 1.0;
    double adjusted_alpha = 0.0;
    bool significant = false;  // p_value < adjusted_alpha
    bool phase_consistent = false;
};

/// Chain candidates: pairs with co-count >= min_support, odds ratio > 1 and
/// kill-chain-consistent ordering, Fisher-tested against alpha / C(#ids, 2).
/// Ordered by ascending p.
std::vector<ChainResult> identify_chains(const CooccurrenceMatrix& matrix, double alpha,
                                         std::size_t min_support = 5);

/// U statistic of the first group with midrank ties; exact permutation p for
/// pooled sizes <= 12, tie-corrected normal approximation otherwise.
TestResult mann_whitney_u(const std::vector<double>& group_a, const std::vector<double>& group_b);

/// Rank correlation with midranks; p via the t approximation. Degenerate
/// (constant) inputs yield NaN statistic and p.
TestResult spearman(const std::vector<double>& x, const std::vector<double>& y);

struct CommunityResult {
    std::vector<int> assignment;  // community index per node, labels normalized
    double modularity = 0.0;
};

/// Newman modularity of a partition over a weighted graph (diagonal ignored).
double partition_modularity(const std::vector<std::vector<double>>& weights,
                            const std::vector<int>& assignment);

/// Louvain with deterministic node ordering per seed and lowest-index tie
/// breaks, plus a merge/move refinement to settle small graphs.
CommunityResult louvain_weighted(const std::vector<std::vector<double>>& weights,
                                 std::uint64_t seed = 0);
CommunityResult louvain_communities(const CooccurrenceMatrix& matrix, std::uint64_t seed = 0);

struct CentralityResult {
    std::vector<double> weighted_degree;  // row sum minus diagonal
    std::vector<double> betweenness;      // inverse-weight shortest paths, normalized to [0,1]
};

CentralityResult centrality_weighted(const std::vector<std::vector<double>>& weights);
CentralityResult graph_centrality(const CooccurrenceMatrix& matrix);

struct DistributionMetrics {
    double mean = 0.0;
    double median = 0.0;
    double gini = 0.0;             // population definition
    double excess_kurtosis = 0.0;  // population moments, NaN when variance is 0
};

DistributionMetrics distribution_metrics(const std::vector<double>& values);

struct CountStats {
    double median = 0.0;
    double mean = 0.0;
    double share_ge3 = 0.0;
    std::map<std::size_t, std::size_t> histogram;
};

CountStats count_histogram_stats(const std::vector<std::size_t>& per_item_counts);

struct PhaseCoverage {
    std::vector<std::size_t> per_skill_phase_counts;
    CountStats stats;
};

PhaseCoverage phase_coverage_stats(const std::vector<std::set<PatternId>>& entries);

}  // namespace skillguard::stats
