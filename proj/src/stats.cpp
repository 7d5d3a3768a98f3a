#include "skillguard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "skillguard/errors.hpp"

namespace skillguard::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Regularized incomplete beta via Lentz's continued fraction.
double ibeta_cf(double a, double b, double x) {
    const double eps = 1e-14;
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * ibeta_cf(a, b, x) / a;
    }
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

// Two-sided survival of Student's t with nu degrees of freedom.
double t_two_sided_p(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    double x = nu / (nu + t * t);
    return ibeta(nu / 2.0, 0.5, x);
}

std::vector<double> midranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return kNaN;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<int> normalize_labels(const std::vector<int>& assignment) {
    std::vector<int> out(assignment.size(), -1);
    std::map<int, int> remap;
    int next = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        auto [it, inserted] = remap.try_emplace(assignment[i], next);
        if (inserted) ++next;
        out[i] = it->second;
    }
    return out;
}

}  // namespace

std::string_view to_string(TestMethod method) {
    switch (method) {
        case TestMethod::fisher_exact: return "fisher_exact";
        case TestMethod::mann_whitney_u: return "mann_whitney_u";
        case TestMethod::spearman: return "spearman";
    }
    return "?";
}

std::size_t CooccurrenceMatrix::index_of(PatternId id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return i;
    }
    throw UnknownPattern("pattern " + std::string(::skillguard::to_string(id)) +
                         " not in matrix");
}

std::size_t CooccurrenceMatrix::at(PatternId i, PatternId j) const {
    return counts[index_of(i)][index_of(j)];
}

CooccurrenceMatrix build_cooccurrence(const std::vector<std::set<PatternId>>& entries) {
    if (entries.empty()) throw EmptyDataset("no tier-3 entries");

    CooccurrenceMatrix m;
    for (PatternId id : all_pattern_ids()) m.ids.push_back(id);
    m.counts.assign(m.ids.size(), std::vector<std::size_t>(m.ids.size(), 0));
    m.n_skills = entries.size();

    for (const auto& patterns : entries) {
        if (patterns.empty()) throw EmptyPatternSet("entry with no patterns");
        for (PatternId a : patterns) {
            std::size_t ia = static_cast<std::size_t>(a);
            for (PatternId b : patterns) {
                m.counts[ia][static_cast<std::size_t>(b)] += 1;
            }
        }
    }
    return m;
}

CooccurrenceMatrix matrix_from_counts(std::vector<PatternId> ids,
                                      std::vector<std::vector<std::size_t>> counts,
                                      std::size_t n_skills) {
    if (ids.size() != counts.size()) throw Error("matrix axis/counts size mismatch");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].size() != ids.size()) throw Error("matrix is not square");
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[i][j] != counts[j][i]) throw Error("matrix is not symmetric");
            if (counts[i][j] > std::min(counts[i][i], counts[j][j])) {
                throw Error("co-count exceeds marginal count");
            }
            if (counts[i][j] > n_skills) throw Error("count exceeds n_skills");
        }
    }
    CooccurrenceMatrix m;
    m.ids = std::move(ids);
    m.counts = std::move(counts);
    m.n_skills = n_skills;
    return m;
}

ContingencyTable contingency_from(const CooccurrenceMatrix& matrix, PatternId pi, PatternId pj) {
    std::size_t i = matrix.index_of(pi);
    std::size_t j = matrix.index_of(pj);
    ContingencyTable t;
    t.n11 = matrix.counts[i][j];
    t.n10 = matrix.counts[i][i] - t.n11;
    t.n01 = matrix.counts[j][j] - t.n11;
    t.n00 = matrix.n_skills - t.n11 - t.n10 - t.n01;
    return t;
}

RatioParts odds_ratio_parts(const ContingencyTable& t) {
    return {static_cast<std::uint64_t>(t.n11) * t.n00, static_cast<std::uint64_t>(t.n10) * t.n01};
}

double odds_ratio(const ContingencyTable& t) {
    RatioParts parts = odds_ratio_parts(t);
    if (parts.denominator == 0) {
        return parts.numerator == 0 ? kNaN : kInf;
    }
    return static_cast<double>(parts.numerator) / static_cast<double>(parts.denominator);
}

double conditional_probability(const CooccurrenceMatrix& matrix, PatternId given,
                               PatternId then_id) {
    std::size_t i = matrix.index_of(given);
    std::size_t j = matrix.index_of(then_id);
    if (matrix.counts[i][i] == 0) {
        throw ZeroSupport("pattern " + std::string(::skillguard::to_string(given)) +
                          " has zero support");
    }
    return static_cast<double>(matrix.counts[i][j]) / static_cast<double>(matrix.counts[i][i]);
}

TestResult fisher_exact(const ContingencyTable& t) {
    std::size_t n = t.total();
    if (n > 10000) throw OverflowGuard("fisher_exact limited to tables with n <= 10,000");

    TestResult result;
    result.method = TestMethod::fisher_exact;
    result.detail = "exact";
    result.statistic = odds_ratio(t);

    std::size_t r1 = t.n11 + t.n10;
    std::size_t r2 = t.n01 + t.n00;
    std::size_t c1 = t.n11 + t.n01;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c1 == n) {
        result.p_value = 1.0;
        return result;
    }

    auto log_hyp = [&](std::size_t k) {
        return log_choose(static_cast<double>(r1), static_cast<double>(k)) +
               log_choose(static_cast<double>(r2), static_cast<double>(c1 - k)) -
               log_choose(static_cast<double>(n), static_cast<double>(c1));
    };

    std::size_t k_min = c1 > r2 ? c1 - r2 : 0;
    std::size_t k_max = std::min(r1, c1);
    double log_obs = log_hyp(t.n11);

    // Tables whose probability does not exceed the observed one, with a
    // relative slack for floating-point ties.
    double p = 0.0;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        double lp = log_hyp(k);
        if (lp <= log_obs + 1e-7) p += std::exp(lp);
    }
    result.p_value = std::min(1.0, p);
    return result;
}

double bonferroni_adjust(double alpha, std::size_t k) {
    if (k == 0) throw NonPositiveK("number of comparisons must be positive");
    return alpha / static_cast<double>(k);
}

std::vector<ChainResult> identify_chains(const CooccurrenceMatrix& matrix, double alpha,
                                         std::size_t min_support) {
    if (matrix.ids.empty()) throw EmptyDataset("empty matrix");
    std::size_t n_ids = matrix.ids.size();
    std::size_t k_pairs = n_ids * (n_ids - 1) / 2;
    double adjusted = bonferroni_adjust(alpha, k_pairs);

    std::vector<ChainResult> chains;
    for (std::size_t i = 0; i < n_ids; ++i) {
        for (std::size_t j = i + 1; j < n_ids; ++j) {
            std::size_t co = matrix.counts[i][j];
            if (co < min_support) continue;

            ContingencyTable t = contingency_from(matrix, matrix.ids[i], matrix.ids[j]);
            TestResult fisher = fisher_exact(t);
            double ratio = odds_ratio(t);
            if (!(ratio > 1.0)) continue;

            PatternId a = matrix.ids[i];
            PatternId b = matrix.ids[j];
            auto key = [](PatternId id) {
                return std::make_pair(pattern_phase(id), id);
            };
            if (key(b) < key(a)) std::swap(a, b);

            ChainResult chain;
            chain.from = a;
            chain.to = b;
            chain.co_count = co;
            chain.odds_ratio = ratio;
            chain.p_value = fisher.p_value;
            chain.adjusted_alpha = adjusted;
            chain.phase_consistent = pattern_phase(a) <= pattern_phase(b);
            chain.significant = chain.p_value < adjusted;
            if (!chain.phase_consistent) continue;
            chains.push_back(chain);
        }
    }
    std::sort(chains.begin(), chains.end(), [](const ChainResult& a, const ChainResult& b) {
        return std::tie(a.p_value, a.from, a.to) < std::tie(b.p_value, b.from, b.to);
    });
    return chains;
}

TestResult mann_whitney_u(const std::vector<double>& group_a, const std::vector<double>& group_b) {
    if (group_a.empty() || group_b.empty()) throw EmptyGroup("both groups must be nonempty");

    std::size_t na = group_a.size();
    std::size_t nb = group_b.size();
    std::size_t n = na + nb;

    std::vector<double> pooled(group_a);
    pooled.insert(pooled.end(), group_b.begin(), group_b.end());
    std::vector<double> ranks = midranks(pooled);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
    double u_obs = rank_sum_a - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
    double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;

    TestResult result;
    result.method = TestMethod::mann_whitney_u;
    result.statistic = u_obs;

    if (n <= 12) {
        // Exact permutation distribution over all assignments of pooled
        // positions to group A; two-sided by distance from the mean.
        result.detail = "exact";
        double threshold = std::fabs(u_obs - mu) - 1e-12;
        std::size_t extreme = 0, total = 0;
        std::vector<std::size_t> idx(na);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            double rs = 0.0;
            for (std::size_t i : idx) rs += ranks[i];
            double u = rs - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
            ++total;
            if (std::fabs(u - mu) >= threshold) ++extreme;

            // next combination
            std::size_t i = na;
            while (i > 0) {
                --i;
                if (idx[i] != i + n - na) break;
            }
            if (idx[i] == i + n - na) break;
            ++idx[i];
            for (std::size_t j = i + 1; j < na; ++j) idx[j] = idx[j - 1] + 1;
        }
        result.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return result;
    }

    // Normal approximation with tie correction and continuity correction.
    result.detail = "normal_approx";
    std::map<double, std::size_t> tie_groups;
    for (double v : pooled) ++tie_groups[v];
    double tie_term = 0.0;
    for (const auto& [value, count] : tie_groups) {
        (void)value;
        double c = static_cast<double>(count);
        tie_term += c * c * c - c;
    }
    double dn = static_cast<double>(n);
    double sigma2 = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                    ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (sigma2 <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    double diff = u_obs - mu;
    double cc = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
    double z = (diff + cc) / std::sqrt(sigma2);
    result.p_value = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return result;
}

TestResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("inputs differ in length");
    if (x.size() < 3) throw LengthMismatch("need at least 3 observations");

    TestResult result;
    result.method = TestMethod::spearman;
    double rho = pearson(midranks(x), midranks(y));
    result.statistic = rho;
    if (std::isnan(rho)) {
        result.detail = "undefined";
        result.p_value = kNaN;
        return result;
    }
    result.detail = "t_approx";
    double n = static_cast<double>(x.size());
    if (std::fabs(rho) >= 1.0) {
        result.p_value = 0.0;
        return result;
    }
    double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
    result.p_value = t_two_sided_p(t, n - 2.0);
    return result;
}

double partition_modularity(const std::vector<std::vector<double>>& weights,
                            const std::vector<int>& assignment) {
    std::size_t n = weights.size();
    std::vector<double> degree(n, 0.0);
    double two_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            degree[i] += weights[i][j];
        }
        two_m += degree[i];
    }
    if (two_m <= 0.0) return 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (assignment[i] != assignment[j]) continue;
            double a_ij = (i == j) ? 0.0 : weights[i][j];
            q += a_ij - degree[i] * degree[j] / two_m;
        }
    }
    return q / two_m;
}

namespace {

// One Louvain level: local moves on a graph that may carry self-loops
// (aggregation artifacts). Returns true when any node moved.
bool local_moving(const std::vector<std::vector<double>>& w, std::vector<int>& comm,
                  const std::vector<std::size_t>& order) {
    std::size_t n = w.size();
    std::vector<double> k(n, 0.0);
    double two_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) k[i] += w[i][j];
        two_m += k[i];
    }
    if (two_m <= 0.0) return false;

    std::vector<double> tot(n, 0.0);  // sum of degrees per community
    for (std::size_t i = 0; i < n; ++i) tot[static_cast<std::size_t>(comm[i])] += k[i];

    bool any_moved = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t oi = 0; oi < n; ++oi) {
            std::size_t i = order[oi];
            int old_c = comm[i];
            tot[static_cast<std::size_t>(old_c)] -= k[i];

            // weight from i into each candidate community
            std::map<int, double> k_ic;
            k_ic[old_c];  // staying is always a candidate
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || w[i][j] <= 0.0) continue;
                k_ic[comm[j]] += w[i][j];
            }

            int best_c = old_c;
            double best_gain = k_ic[old_c] - tot[static_cast<std::size_t>(old_c)] * k[i] / two_m;
            for (const auto& [c, kin] : k_ic) {
                double gain = kin - tot[static_cast<std::size_t>(c)] * k[i] / two_m;
                if (gain > best_gain + 1e-12 ||
                    (std::fabs(gain - best_gain) <= 1e-12 && c < best_c)) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            comm[i] = best_c;
            tot[static_cast<std::size_t>(best_c)] += k[i];
            if (best_c != old_c) {
                moved = true;
                any_moved = true;
            }
        }
    }
    return any_moved;
}

}  // namespace

CommunityResult louvain_weighted(const std::vector<std::vector<double>>& weights,
                                 std::uint64_t seed) {
    std::size_t n = weights.size();
    CommunityResult result;
    if (n == 0) return result;
    for (const auto& row : weights) {
        if (row.size() != n) throw Error("weight matrix is not square");
        for (double v : row) {
            if (v < 0.0) throw Error("weights must be nonnegative");
        }
    }

    // Node visit order: fixed permutation drawn from the seed.
    std::vector<std::size_t> base_order(n);
    std::iota(base_order.begin(), base_order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(base_order.begin(), base_order.end(), rng);

    std::vector<int> node_to_comm(n);
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

    std::vector<std::vector<double>> level = weights;
    for (std::size_t i = 0; i < n; ++i) level[i][i] = 0.0;
    std::vector<std::vector<std::size_t>> members(n);  // level node -> original nodes
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};

    while (true) {
        std::size_t ln = level.size();
        std::vector<int> comm(ln);
        std::iota(comm.begin(), comm.end(), 0);
        std::vector<std::size_t> order(ln);
        std::iota(order.begin(), order.end(), 0);
        if (ln == n) order = base_order;

        bool moved = local_moving(level, comm, order);
        if (!moved) break;

        // Record the assignment on original nodes, then aggregate.
        std::map<int, int> remap;
        int next = 0;
        for (std::size_t i = 0; i < ln; ++i) {
            if (remap.try_emplace(comm[i], next).second) ++next;
        }
        for (std::size_t i = 0; i < ln; ++i) {
            int c = remap[comm[i]];
            for (std::size_t orig : members[i]) node_to_comm[orig] = c;
        }

        std::size_t cn = static_cast<std::size_t>(next);
        if (cn == ln) break;
        std::vector<std::vector<double>> agg(cn, std::vector<double>(cn, 0.0));
        std::vector<std::vector<std::size_t>> agg_members(cn);
        for (std::size_t i = 0; i < ln; ++i) {
            std::size_t ci = static_cast<std::size_t>(remap[comm[i]]);
            agg_members[ci].insert(agg_members[ci].end(), members[i].begin(), members[i].end());
            for (std::size_t j = 0; j < ln; ++j) {
                agg[ci][static_cast<std::size_t>(remap[comm[j]])] += level[i][j];
            }
        }
        level = std::move(agg);
        members = std::move(agg_members);
    }

    // Refinement on the original graph: single-node moves and community
    // merges until neither improves modularity.
    auto q_of = [&](const std::vector<int>& a) { return partition_modularity(weights, a); };
    std::vector<int> best = normalize_labels(node_to_comm);
    double best_q = q_of(best);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < n; ++i) {
            int original = best[i];
            std::set<int> candidates(best.begin(), best.end());
            candidates.insert(*std::max_element(best.begin(), best.end()) + 1);
            for (int c : candidates) {
                if (c == original) continue;
                best[i] = c;
                double q = q_of(best);
                if (q > best_q + 1e-12) {
                    best_q = q;
                    original = c;
                    improved = true;
                } else {
                    best[i] = original;
                }
            }
        }
        std::set<int> labels(best.begin(), best.end());
        for (int a : labels) {
            for (int b : labels) {
                if (a >= b) continue;
                std::vector<int> merged = best;
                for (auto& c : merged) {
                    if (c == b) c = a;
                }
                double q = q_of(merged);
                if (q > best_q + 1e-12) {
                    best_q = q;
                    best = merged;
                    improved = true;
                }
            }
        }
    }

    result.assignment = normalize_labels(best);
    result.modularity = best_q;
    return result;
}

CommunityResult louvain_communities(const CooccurrenceMatrix& matrix, std::uint64_t seed) {
    std::size_t n = matrix.ids.size();
    std::vector<std::vector<double>> weights(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) weights[i][j] = static_cast<double>(matrix.counts[i][j]);
        }
    }
    return louvain_weighted(weights, seed);
}

CentralityResult centrality_weighted(const std::vector<std::vector<double>>& weights) {
    std::size_t n = weights.size();
    CentralityResult result;
    result.weighted_degree.assign(n, 0.0);
    result.betweenness.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) result.weighted_degree[i] += weights[i][j];
        }
    }
    if (n < 3) return result;

    // Brandes over inverse-weight distances.
    const double dist_eps = 1e-12;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> dist(n, kInf);
        std::vector<double> sigma(n, 0.0);
        std::vector<std::vector<std::size_t>> pred(n);
        std::vector<bool> done(n, false);
        dist[s] = 0.0;
        sigma[s] = 1.0;

        for (std::size_t iter = 0; iter < n; ++iter) {
            std::size_t u = n;
            double best = kInf;
            for (std::size_t v = 0; v < n; ++v) {
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            }
            if (u == n) break;
            done[u] = true;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u || weights[u][v] <= 0.0) continue;
                double nd = dist[u] + 1.0 / weights[u][v];
                if (nd < dist[v] - dist_eps) {
                    dist[v] = nd;
                    sigma[v] = sigma[u];
                    pred[v] = {u};
                } else if (std::fabs(nd - dist[v]) <= dist_eps) {
                    sigma[v] += sigma[u];
                    pred[v].push_back(u);
                }
            }
        }

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
        std::vector<double> delta(n, 0.0);
        for (std::size_t w : order) {
            if (!std::isfinite(dist[w]) || w == s) continue;
            for (std::size_t v : pred[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            result.betweenness[w] += delta[w];
        }
    }

    double dn = static_cast<double>(n);
    double norm = (dn - 1.0) * (dn - 2.0);  // undirected: accumulated twice, pair norm /2
    for (auto& b : result.betweenness) b /= norm;
    return result;
}

CentralityResult graph_centrality(const CooccurrenceMatrix& matrix) {
    std::size_t n = matrix.ids.size();
    std::vector<std::vector<double>> weights(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) weights[i][j] = static_cast<double>(matrix.counts[i][j]);
        }
    }
    return centrality_weighted(weights);
}

DistributionMetrics distribution_metrics(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInput("no values");

    DistributionMetrics m;
    double n = static_cast<double>(values.size());
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    m.median = (sorted.size() % 2 == 1) ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;

    double sum = std::accumulate(values.begin(), values.end(), 0.0);
    bool negative = std::any_of(values.begin(), values.end(), [](double v) { return v < 0.0; });
    if (negative) throw AllZeroValues("gini requires nonnegative values");
    if (sum <= 0.0) throw AllZeroValues("gini requires a positive sum");
    double abs_diff_sum = 0.0;
    for (double a : values) {
        for (double b : values) abs_diff_sum += std::fabs(a - b);
    }
    m.gini = abs_diff_sum / (2.0 * n * n * m.mean);

    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - m.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    m.excess_kurtosis = (m2 <= 0.0) ? kNaN : m4 / (m2 * m2) - 3.0;
    return m;
}

CountStats count_histogram_stats(const std::vector<std::size_t>& per_item_counts) {
    if (per_item_counts.empty()) throw EmptyInput("no counts");
    CountStats stats;
    std::vector<std::size_t> sorted(per_item_counts);
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    std::size_t mid = n / 2;
    stats.median = (n % 2 == 1)
                       ? static_cast<double>(sorted[mid])
                       : (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) /
                             2.0;
    std::size_t total = 0, ge3 = 0;
    for (std::size_t c : per_item_counts) {
        total += c;
        if (c >= 3) ++ge3;
        ++stats.histogram[c];
    }
    stats.mean = static_cast<double>(total) / static_cast<double>(n);
    stats.share_ge3 = static_cast<double>(ge3) / static_cast<double>(n);
    return stats;
}

PhaseCoverage phase_coverage_stats(const std::vector<std::set<PatternId>>& entries) {
    if (entries.empty()) throw EmptyDataset("no tier-3 entries");
    PhaseCoverage coverage;
    coverage.per_skill_phase_counts.reserve(entries.size());
    for (const auto& patterns : entries) {
        coverage.per_skill_phase_counts.push_back(phases_of(patterns).size());
    }
    coverage.stats = count_histogram_stats(coverage.per_skill_phase_counts);
    return coverage;
}

}  // namespace skillguard::stats
