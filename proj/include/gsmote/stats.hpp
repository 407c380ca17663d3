#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gsmote {

// Regularized upper incomplete gamma function Q(a, x) = Gamma(a, x)/Gamma(a),
// via the power series for small x and the Lentz continued fraction
// otherwise.
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;

    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a, x); Q = 1 - P
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + static_cast<double>(n));
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefactor);
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(log_prefactor);
}

// Upper-tail probability of the chi-square distribution.
inline double chi_square_upper_tail(double statistic, double df) {
    return regularized_gamma_q(0.5 * df, 0.5 * statistic);
}

// Ranks one row of scores: best value gets rank 1, ties share the average of
// the positions they occupy.
inline std::vector<double> rank_row(const std::vector<double>& values, bool higher_better = true) {
    const std::size_t k = values.size();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return higher_better ? values[a] > values[b] : values[a] < values[b];
    });

    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t df = 0;
};

// Friedman chi-square over an N x K matrix of ranks (one row per dataset, one
// column per method): 12/(N K (K+1)) * sum_j R_j^2 - 3 N (K+1), with R_j the
// column rank sums and K-1 degrees of freedom.
inline FriedmanResult friedman(const std::vector<std::vector<double>>& ranks) {
    const std::size_t n = ranks.size();
    if (n < 2) throw std::invalid_argument("friedman: need at least 2 rank rows");
    const std::size_t k = ranks[0].size();
    if (k < 2) throw std::invalid_argument("friedman: need at least 2 methods");
    for (const auto& row : ranks)
        if (row.size() != k)
            throw std::invalid_argument("friedman: rank rows differ in length");

    std::vector<double> column_sums(k, 0.0);
    for (const auto& row : ranks)
        for (std::size_t j = 0; j < k; ++j) column_sums[j] += row[j];

    double sum_sq = 0.0;
    for (double r : column_sums) sum_sq += r * r;

    const double dn = static_cast<double>(n), dk = static_cast<double>(k);
    FriedmanResult out;
    out.statistic = 12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);
    if (out.statistic < 0.0) out.statistic = 0.0;  // guard tiny negative round-off
    out.df = k - 1;
    out.p_value = chi_square_upper_tail(out.statistic, static_cast<double>(out.df));
    return out;
}

}  // namespace gsmote
