#pragma once

#include <string>
#include <vector>

#include "afv/errors.hpp"

namespace afv {

// Special functions implemented in-repo (Lanczos log-gamma, series/continued
// fractions for the regularized incomplete gamma and beta). Absolute error is
// below 1e-10 over the tested parameter ranges; see tests/test_statistics.cpp.

double log_gamma(double x);

// P(a,x): regularized lower incomplete gamma. a > 0, x >= 0.
double regularized_lower_incomplete_gamma(double a, double x);
// Q(a,x) = 1 - P(a,x).
double regularized_upper_incomplete_gamma(double a, double x);

// I_x(a,b): regularized incomplete beta. a,b > 0, x in [0,1].
double regularized_incomplete_beta(double a, double b, double x);

// Distribution functions built on the above.
double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);
double f_distribution_cdf(double f, double df1, double df2);
double f_distribution_upper_tail(double f, double df1, double df2);
double chi_square_cdf(double x, double df);
double chi_square_upper_tail(double x, double df);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Classical paired t on the differences, df = n-1, two-sided p.
// Zero variance of the differences is a degenerate-statistic error.
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

// Welch's t with Welch-Satterthwaite df, two-sided p. Requires positive
// variance in at least one group.
TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y);

struct AnovaResult {
    double f = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p = 1.0;
    double partial_eta_sq = 0.0;
};

// One-way repeated-measures ANOVA on cells[subject][condition]:
// F = MS_condition / MS_error with df (k-1, (k-1)(n-1));
// partial eta^2 = SS_condition / (SS_condition + SS_error).
// No sphericity correction is applied.
AnovaResult rm_anova(const std::vector<std::vector<double>>& cells);

struct FriedmanResult {
    double chi_sq = 0.0;
    int df = 0;
    double p = 1.0;
};

// Friedman rank test on cells[subject][condition], ties by midranks:
// chi^2 = 12/(n k (k+1)) * sum_j R_j^2 - 3 n (k+1), df = k-1.
FriedmanResult friedman_test(const std::vector<std::vector<double>>& cells);

// One behavioral trial of the recognition experiment. The label fields are
// opaque tags; only `correct` feeds the statistics.
struct ResponseRow {
    std::string participant;
    std::string condition;
    int trial = 0;
    std::string true_label;
    std::string response;
    bool correct = false;
    double rt_ms = -1.0;  // < 0 when absent
    std::string order;    // block-order group tag, empty when absent
};

struct ResponseTable {
    std::vector<ResponseRow> rows;
    bool has_rt = false;
    bool has_order = false;
};

// Per-(participant,condition) accuracy plus group mean and sample SD per
// condition. Participants and conditions keep first-appearance order; a
// repeated-measures design requires every participant to cover every
// condition with at least one trial.
struct ConditionAccuracy {
    std::vector<std::string> participants;
    std::vector<std::string> conditions;
    std::vector<std::vector<double>> accuracy;  // [participant][condition]
    std::vector<double> mean;                   // per condition
    std::vector<double> sd;                     // sample SD per condition
};

ConditionAccuracy accuracy_by_condition(const ResponseTable& table);

}  // namespace afv
