#include <gtest/gtest.h>

#include <cmath>

#include "gsmote/metrics.hpp"
#include "gsmote/stats.hpp"
#include "test_support.hpp"

using namespace gsmote;

TEST(metrics, hand_case_four_rows) {
    const std::vector<int> y{1, 0, 1, 0};
    const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
    const BinaryMetrics m = compute_metrics(y, s);
    // Pairs: (0.9 vs 0.8, 0.1) both above; (0.2 vs 0.8) below, (0.2 vs 0.1)
    // above -> 3 of 4 concordant.
    EXPECT_DOUBLE_EQ(m.auc, 0.75);
    // Threshold 0.5: predictions (1, 1, 0, 0) -> tp=1 fp=1 fn=1 tn=1.
    EXPECT_DOUBLE_EQ(m.f_measure, 0.5);
    EXPECT_DOUBLE_EQ(m.g_mean, 0.5);
}

TEST(metrics, perfect_separation_scores_one) {
    const std::vector<int> y{0, 0, 1, 1};
    const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
    const BinaryMetrics m = compute_metrics(y, s);
    EXPECT_DOUBLE_EQ(m.f_measure, 1.0);
    EXPECT_DOUBLE_EQ(m.g_mean, 1.0);
    EXPECT_DOUBLE_EQ(m.auc, 1.0);
}

TEST(metrics, constant_scores_give_half_auc) {
    const std::vector<int> y{0, 1, 0, 1, 1};
    const std::vector<double> s(5, 0.7);
    EXPECT_DOUBLE_EQ(auc_pairwise(y, s), 0.5);
    EXPECT_DOUBLE_EQ(auc_trapezoid(y, s), 0.5);
}

TEST(metrics, zero_predicted_positives_yield_zero_f) {
    const std::vector<int> y{1, 0, 0};
    const std::vector<double> s{0.1, 0.2, 0.3};
    const BinaryMetrics m = compute_metrics(y, s);
    EXPECT_DOUBLE_EQ(m.f_measure, 0.0);
    EXPECT_DOUBLE_EQ(m.g_mean, 0.0);
}

TEST(metrics, single_class_rejected) {
    EXPECT_THROW(compute_metrics({1, 1}, {0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(compute_metrics({0, 0}, {0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(compute_metrics({1, 0}, {0.5}), std::invalid_argument);
}

TEST(metrics, threshold_is_inclusive) {
    const std::vector<int> y{1, 0};
    const std::vector<double> s{0.5, 0.49999};
    const BinaryMetrics m = compute_metrics(y, s, 0.5);
    EXPECT_DOUBLE_EQ(m.f_measure, 1.0);
}

TEST(metrics, pairwise_and_trapezoid_agree_with_ties) {
    Rng rng(401);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 4 + rng.below(40);
        std::vector<int> y(n);
        std::vector<double> s(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.4 ? 1 : 0;
            (y[i] == 1 ? pos : neg) = true;
            // Quantized scores force plenty of exact ties.
            s[i] = static_cast<double>(rng.below(8)) / 8.0;
        }
        if (!pos) y[0] = 1;
        if (!neg) y[n - 1] = 0;

        const double a = auc_pairwise(y, s);
        const double b = auc_trapezoid(y, s);
        const double c = oracle::auc_quadratic(y, s);
        ASSERT_NEAR(a, b, 1e-12) << "trial " << trial;
        ASSERT_NEAR(a, c, 1e-12) << "trial " << trial;
    }
}

TEST(rank_row, hand_cases) {
    EXPECT_EQ(rank_row({0.9, 0.8, 0.8, 0.7, 0.6, 0.5}),
              (std::vector<double>{1.0, 2.5, 2.5, 4.0, 5.0, 6.0}));
    EXPECT_EQ(rank_row({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}),
              (std::vector<double>{3.5, 3.5, 3.5, 3.5, 3.5, 3.5}));
    EXPECT_EQ(rank_row({0.9, 0.8, 0.7, 0.6, 0.5, 0.4}),
              (std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}));
    // Lower-is-better flips the order.
    EXPECT_EQ(rank_row({0.1, 0.2, 0.3}, false), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(rank_row, ranks_sum_to_fixed_total) {
    Rng rng(402);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.below(8);
        std::vector<double> scores(k);
        for (auto& v : scores) v = static_cast<double>(rng.below(5)) / 5.0;
        const std::vector<double> ranks = rank_row(scores);
        const double sum = std::accumulate(ranks.begin(), ranks.end(), 0.0);
        EXPECT_NEAR(sum, static_cast<double>(k * (k + 1)) / 2.0, 1e-9);
    }
}

TEST(friedman, hand_case_statistic_eight) {
    // Four datasets, identical rank rows [1, 2, 3]: chi-square statistic
    // 12/(4*3*4) * (4^2 + 8^2 + 12^2) - 3*4*4 = 56 - 48 = 8.
    const std::vector<std::vector<double>> ranks(4, {1.0, 2.0, 3.0});
    const FriedmanResult r = friedman(ranks);
    EXPECT_DOUBLE_EQ(r.statistic, 8.0);
    EXPECT_EQ(r.df, 2u);
    // p = exp(-4) for df = 2.
    EXPECT_NEAR(r.p_value, 0.0183, 0.0005);
    EXPECT_NEAR(r.p_value, std::exp(-4.0), 1e-12);
}

TEST(friedman, matches_mean_rank_form) {
    Rng rng(403);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(10), k = 2 + rng.below(6);
        std::vector<std::vector<double>> ranks;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> scores(k);
            for (auto& v : scores) v = rng.uniform();
            ranks.push_back(rank_row(scores));
        }
        const FriedmanResult r = friedman(ranks);
        EXPECT_NEAR(r.statistic, oracle::friedman_direct(ranks), 1e-9);
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
    }
}

TEST(friedman, identical_methods_score_zero) {
    const std::vector<std::vector<double>> ranks(3, {2.0, 2.0, 2.0});
    const FriedmanResult r = friedman(ranks);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(friedman, input_validation) {
    EXPECT_THROW(friedman({}), std::invalid_argument);
    EXPECT_THROW(friedman({{1.0, 2.0}}), std::invalid_argument);
    EXPECT_THROW(friedman({{1.0}, {1.0}}), std::invalid_argument);
    EXPECT_THROW(friedman({{1.0, 2.0}, {1.0}}), std::invalid_argument);
}

TEST(gamma, closed_form_chi_square_tails) {
    // df = 2: Q = exp(-x/2).
    for (double x : {0.5, 1.0, 4.0, 10.0})
        EXPECT_NEAR(chi_square_upper_tail(x, 2.0), std::exp(-0.5 * x), 1e-12);
    // df = 4: Q = (1 + x/2) exp(-x/2).
    for (double x : {0.5, 2.0, 8.0})
        EXPECT_NEAR(chi_square_upper_tail(x, 4.0), (1.0 + 0.5 * x) * std::exp(-0.5 * x), 1e-12);
    // df = 1: Q = erfc(sqrt(x/2)).
    for (double x : {0.5, 1.0, 6.0})
        EXPECT_NEAR(chi_square_upper_tail(x, 1.0), std::erfc(std::sqrt(0.5 * x)), 1e-12);
    // Boundaries and continuity across the series/continued-fraction switch.
    EXPECT_DOUBLE_EQ(regularized_gamma_q(3.0, 0.0), 1.0);
    const double just_below = regularized_gamma_q(2.0, 2.9999999);
    const double just_above = regularized_gamma_q(2.0, 3.0000001);
    EXPECT_NEAR(just_below, just_above, 1e-6);
    EXPECT_THROW(regularized_gamma_q(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(regularized_gamma_q(1.0, -1.0), std::invalid_argument);
}

TEST(gamma, known_critical_value) {
    // Upper 1% point of chi-square with 19 degrees of freedom.
    EXPECT_NEAR(chi_square_upper_tail(oracle::kChiSq19At01, 19.0), 0.01, 1e-5);
}

TEST(metrics, ids_are_stable) {
    ASSERT_EQ(metric_ids().size(), 3u);
    EXPECT_EQ(metric_ids()[0], "f_measure");
    EXPECT_EQ(metric_ids()[1], "g_mean");
    EXPECT_EQ(metric_ids()[2], "auc");
    BinaryMetrics m;
    m.f_measure = 0.1;
    m.g_mean = 0.2;
    m.auc = 0.3;
    EXPECT_DOUBLE_EQ(metric_by_index(m, 0), 0.1);
    EXPECT_DOUBLE_EQ(metric_by_index(m, 1), 0.2);
    EXPECT_DOUBLE_EQ(metric_by_index(m, 2), 0.3);
}
