#include "coact/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coact/rng.hpp"

namespace coact::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// continued fraction for the incomplete beta (Lentz)
double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14;
    const double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
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
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("student_t_two_sided: df must be > 0");
    const double x = df / (df + t * t);
    double p = incomplete_beta(0.5 * df, 0.5, x);
    return std::min(1.0, std::max(0.0, p));
}

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average of positions i..j, 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double rank_biserial(double u, std::size_t n1, std::size_t n2) {
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("rank_biserial: group sizes must be >= 1");
    const double prod = static_cast<double>(n1) * static_cast<double>(n2);
    if (u < 0.0 || u > prod) throw std::invalid_argument("rank_biserial: U out of [0, n1*n2]");
    return 1.0 - 2.0 * u / prod;
}

namespace {

// advances comb (k-subset of {0..n-1}, ascending) to the next combination;
// false when exhausted
bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
    const std::size_t k = comb.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (comb[i] != i + n - k) {
            ++comb[i];
            for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

// Exact two-sided p for U by enumerating all rank subsets of size n1.
// Valid only without ties. Two-sided: arrangements at least as far from
// n1*n2/2 as the observed U.
double mann_whitney_exact_p(double u, std::size_t n1, std::size_t n2) {
    const std::size_t n = n1 + n2;
    const double mu = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);
    const double dev = std::fabs(u - mu);
    std::vector<std::size_t> comb(n1);
    std::iota(comb.begin(), comb.end(), 0);
    std::uint64_t total = 0;
    std::uint64_t hits = 0;
    const double base = 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    do {
        std::size_t rank_sum = 0;
        for (std::size_t idx : comb) rank_sum += idx + 1;
        const double u_arr = static_cast<double>(rank_sum) - base;
        ++total;
        if (std::fabs(u_arr - mu) >= dev - 1e-12) ++hits;
    } while (next_combination(comb, n));
    return static_cast<double>(hits) / static_cast<double>(total);
}

double mann_whitney_normal_p(double u, std::size_t n1, std::size_t n2) {
    const double prod = static_cast<double>(n1) * static_cast<double>(n2);
    const double nn = static_cast<double>(n1 + n2);
    const double mu = 0.5 * prod;
    const double var = prod * (nn + 1.0) / 12.0;  // tie-free
    const double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
}

MannWhitneyResult mann_whitney(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney: empty sample");
    const std::size_t n1 = x.size();
    const std::size_t n2 = y.size();
    const std::size_t n = n1 + n2;

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::vector<double> ranks = midranks(pooled);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double u = r1 - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    const double prod = static_cast<double>(n1) * static_cast<double>(n2);

    // tie census on the pooled sample
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    bool has_ties = false;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        i = j + 1;
    }

    MannWhitneyResult res;
    res.u = u;
    res.r = rank_biserial(u, n1, n2);
    res.median_x = median(x);
    res.median_y = median(y);

    if (n <= 12 && !has_ties) {
        res.method = "exact";
        res.p_raw = mann_whitney_exact_p(u, n1, n2);
    } else {
        res.method = "normal-approx";
        const double mu = 0.5 * prod;
        const double nn = static_cast<double>(n);
        const double var = prod / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
        if (var <= 0.0) {
            res.p_raw = 1.0;
            res.warnings.push_back("all pooled values tied; p set to 1");
        } else {
            const double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(var);
            res.p_raw = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
        }
    }
    if (res.p_raw <= 0.0) res.p_raw = std::numeric_limits<double>::min();
    return res;
}

AdjustedPValues holm_adjust(const std::vector<double>& raw_p) {
    for (double p : raw_p)
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("holm_adjust: p-values must be in (0,1]");
    const std::size_t m = raw_p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw_p[a] < raw_p[b]; });
    AdjustedPValues out;
    out.raw = raw_p;
    out.adjusted.assign(m, 1.0);
    out.method = AdjustMethod::holm;
    double running_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double stepped = std::min(1.0, static_cast<double>(m - j) * raw_p[order[j]]);
        running_max = std::max(running_max, stepped);
        out.adjusted[order[j]] = running_max;
    }
    return out;
}

AdjustedPValues bonferroni_adjust(const std::vector<double>& raw_p) {
    for (double p : raw_p)
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("bonferroni_adjust: p-values must be in (0,1]");
    AdjustedPValues out;
    out.raw = raw_p;
    out.method = AdjustMethod::bonferroni;
    const double m = static_cast<double>(raw_p.size());
    for (double p : raw_p) out.adjusted.push_back(std::min(1.0, m * p));
    return out;
}

namespace {

double pseudo_f(const std::vector<std::vector<double>>& d2,
                const std::vector<int>& labels, int groups,
                double ss_total, double* ss_within_out) {
    const std::size_t n = labels.size();
    std::vector<double> within(static_cast<std::size_t>(groups), 0.0);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(groups), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (labels[a] == labels[b]) within[static_cast<std::size_t>(labels[a])] += d2[a][b];
    double ss_within = 0.0;
    for (int g = 0; g < groups; ++g)
        ss_within += within[static_cast<std::size_t>(g)] / static_cast<double>(sizes[static_cast<std::size_t>(g)]);
    if (ss_within_out) *ss_within_out = ss_within;
    const double ss_between = ss_total - ss_within;
    const double df_between = static_cast<double>(groups - 1);
    const double df_within = static_cast<double>(n) - static_cast<double>(groups);
    return (ss_between / df_between) / (ss_within / df_within);
}

// number of distinct label arrangements (multinomial), capped at cap+1
std::uint64_t arrangement_count(const std::vector<std::size_t>& sizes, std::uint64_t cap) {
    std::uint64_t count = 1;
    std::size_t placed = 0;
    // product of C(remaining, size_g)
    for (std::size_t g = 0; g + 1 < sizes.size(); ++g) {
        std::size_t total = 0;
        for (std::size_t h = g; h < sizes.size(); ++h) total += sizes[h];
        // C(total, sizes[g]) with overflow guard
        std::uint64_t c = 1;
        const std::size_t k = std::min(sizes[g], total - sizes[g]);
        for (std::size_t i = 1; i <= k; ++i) {
            c = c * (total - k + i) / i;
            if (c > cap) return cap + 1;
        }
        if (count > (cap + 1) / std::max<std::uint64_t>(c, 1)) return cap + 1;
        count *= c;
        if (count > cap) return cap + 1;
        placed += sizes[g];
    }
    (void)placed;
    return count;
}

void enumerate_labelings(std::vector<int>& current, std::size_t pos,
                         std::vector<std::size_t>& remaining,
                         const std::function<void(const std::vector<int>&)>& visit) {
    if (pos == current.size()) {
        visit(current);
        return;
    }
    for (std::size_t g = 0; g < remaining.size(); ++g) {
        if (remaining[g] == 0) continue;
        --remaining[g];
        current[pos] = static_cast<int>(g);
        enumerate_labelings(current, pos + 1, remaining, visit);
        ++remaining[g];
    }
}

}  // namespace

PermanovaResult permanova(const std::vector<std::vector<double>>& x,
                          const std::vector<int>& labels,
                          std::size_t permutations, std::uint64_t seed,
                          bool force_monte_carlo) {
    const std::size_t n = x.size();
    if (n != labels.size()) throw std::invalid_argument("permanova: size mismatch");
    if (n < 3) throw std::invalid_argument("permanova: needs at least 3 units");
    if (permutations < 1) throw std::invalid_argument("permanova: permutations must be >= 1");
    int groups = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("permanova: labels must be >= 0");
        groups = std::max(groups, l + 1);
    }
    std::vector<std::size_t> sizes(static_cast<std::size_t>(groups), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    if (groups < 2) throw std::invalid_argument("permanova: needs >= 2 groups");
    for (std::size_t s : sizes)
        if (s == 0) throw std::invalid_argument("permanova: every group must be non-empty");

    // squared Euclidean distance matrix
    std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
    double ss_total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        if (x[a].size() != x[0].size()) throw std::invalid_argument("permanova: ragged feature matrix");
        for (std::size_t b = a + 1; b < n; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < x[a].size(); ++k) {
                const double diff = x[a][k] - x[b][k];
                s += diff * diff;
            }
            d2[a][b] = d2[b][a] = s;
            ss_total += s;
        }
    }
    ss_total /= static_cast<double>(n);

    PermanovaResult res;
    res.ss_total = ss_total;
    const double f_obs = pseudo_f(d2, labels, groups, ss_total, &res.ss_within);
    res.ss_between = ss_total - res.ss_within;
    if (res.ss_within <= 0.0) throw std::invalid_argument("permanova: degenerate within-group variance");
    res.pseudo_f = f_obs;
    const double tol = 1e-9 * std::max(1.0, std::fabs(f_obs));

    const std::uint64_t total_arrangements = arrangement_count(sizes, 10000);
    if (total_arrangements <= 10000 && !force_monte_carlo) {
        res.exact = true;
        std::uint64_t hits = 0, total = 0;
        std::vector<int> current(n, 0);
        std::vector<std::size_t> remaining = sizes;
        enumerate_labelings(current, 0, remaining, [&](const std::vector<int>& lab) {
            ++total;
            if (pseudo_f(d2, lab, groups, ss_total, nullptr) >= f_obs - tol) ++hits;
        });
        res.permutations = total;
        res.p = static_cast<double>(hits) / static_cast<double>(total);
    } else {
        res.exact = false;
        Rng rng(derive_seed(seed, 0x7065726dULL));
        std::vector<int> perm = labels;
        std::size_t hits = 0;
        for (std::size_t b = 0; b < permutations; ++b) {
            rng.shuffle(perm);
            if (pseudo_f(d2, perm, groups, ss_total, nullptr) >= f_obs - tol) ++hits;
        }
        res.permutations = permutations;
        res.p = static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
    }
    return res;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("spearman: needs length >= 2");
    const std::vector<double> rx = midranks(x);
    const std::vector<double> ry = midranks(y);
    const double mx = mean(rx);
    const double my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double a = rx[i] - mx;
        const double b = ry[i] - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("spearman: zero rank variance");
    return sxy / std::sqrt(sxx * syy);
}

std::pair<double, double> bootstrap_ci(
    const std::vector<double>& values,
    const std::function<double(const std::vector<double>&)>& statistic,
    std::size_t replicates, double level, std::uint64_t seed) {
    if (values.size() < 2) throw std::invalid_argument("bootstrap_ci: needs >= 2 values");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level must be in (0,1)");
    Rng rng(derive_seed(seed, 0x626f6f74ULL));
    const std::size_t n = values.size();
    std::vector<double> stats(replicates, 0.0);
    std::vector<double> sample(n, 0.0);
    for (std::size_t b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < n; ++i) sample[i] = values[rng.index(n)];
        stats[b] = statistic(sample);
    }
    std::sort(stats.begin(), stats.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(replicates - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, replicates - 1);
        const double frac = pos - static_cast<double>(lo);
        return stats[lo] * (1.0 - frac) + stats[hi] * frac;
    };
    const double alpha = 1.0 - level;
    return {quantile(0.5 * alpha), quantile(1.0 - 0.5 * alpha)};
}

std::pair<double, double> bootstrap_ci_mean(const std::vector<double>& values,
                                            std::size_t replicates, double level,
                                            std::uint64_t seed) {
    return bootstrap_ci(values, [](const std::vector<double>& v) { return mean(v); },
                        replicates, level, seed);
}

PairedTResult paired_t(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("paired_t: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("paired_t: needs n >= 2");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
    const double m = mean(d);
    double ss = 0.0;
    for (double v : d) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd <= 0.0) throw std::invalid_argument("paired_t: zero-variance differences");
    PairedTResult res;
    res.t = m / (sd / std::sqrt(static_cast<double>(n)));
    res.df = static_cast<double>(n - 1);
    res.p = student_t_two_sided(res.t, res.df);
    return res;
}

}  // namespace coact::stats
