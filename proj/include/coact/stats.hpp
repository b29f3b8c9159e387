#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace coact::stats {

// --- distribution helpers ---

double normal_cdf(double z);
// two-sided p for Student's t with df degrees of freedom
double student_t_two_sided(double t, double df);
// regularized incomplete beta I_x(a, b)
double incomplete_beta(double a, double b, double x);

// Midranks of v (ties averaged), 1-based ranks.
std::vector<double> midranks(const std::vector<double>& v);

// --- Mann-Whitney ---

struct MannWhitneyResult {
    double u = 0.0;        // statistic of group 1 (x)
    double p_raw = 1.0;    // two-sided
    double r = 0.0;        // rank-biserial, 1 - 2U/(n1*n2)
    std::string method;    // "exact" or "normal-approx"
    double median_x = 0.0;
    double median_y = 0.0;
    std::vector<std::string> warnings;
};

// U from midrank sums; exact two-sided p by enumeration when n1+n2 <= 12 and
// the pooled sample has no ties, otherwise normal approximation with tie
// correction and 0.5 continuity correction.
MannWhitneyResult mann_whitney(const std::vector<double>& x, const std::vector<double>& y);

// The two p-value routes, exposed for cross-checking. Both assume no ties.
double mann_whitney_exact_p(double u, std::size_t n1, std::size_t n2);
double mann_whitney_normal_p(double u, std::size_t n1, std::size_t n2);

double rank_biserial(double u, std::size_t n1, std::size_t n2);

// --- multiple-comparison adjustment ---

enum class AdjustMethod { holm, bonferroni };

struct AdjustedPValues {
    std::vector<double> raw;
    std::vector<double> adjusted;  // in input order
    AdjustMethod method = AdjustMethod::holm;
};

AdjustedPValues holm_adjust(const std::vector<double>& raw_p);
AdjustedPValues bonferroni_adjust(const std::vector<double>& raw_p);

// --- PERMANOVA ---

struct PermanovaResult {
    double pseudo_f = 0.0;
    double p = 1.0;
    std::size_t permutations = 0;  // permutations actually evaluated (excl. observed for MC)
    bool exact = false;            // full enumeration of label arrangements
    double ss_total = 0.0;
    double ss_within = 0.0;
    double ss_between = 0.0;
};

// X: one row per unit. labels: group index per unit (0..g-1). Euclidean
// distances; p by label permutation with the +1 rule, or exact enumeration
// when the number of distinct label arrangements is <= 10,000.
// force_monte_carlo disables the exact switch (used to validate the
// sampling path against enumeration).
PermanovaResult permanova(const std::vector<std::vector<double>>& x,
                          const std::vector<int>& labels,
                          std::size_t permutations = 999,
                          std::uint64_t seed = 0,
                          bool force_monte_carlo = false);

// --- misc ---

double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::pair<double, double> bootstrap_ci(
    const std::vector<double>& values,
    const std::function<double(const std::vector<double>&)>& statistic,
    std::size_t replicates = 2000, double level = 0.95, std::uint64_t seed = 0);

std::pair<double, double> bootstrap_ci_mean(const std::vector<double>& values,
                                            std::size_t replicates = 2000,
                                            double level = 0.95, std::uint64_t seed = 0);

struct PairedTResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

PairedTResult paired_t(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);

}  // namespace coact::stats
