#include "afv/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace afv {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kConvergence = 1e-15;
constexpr double kTiny = 1e-300;

// Incomplete gamma by series expansion, valid for x < a + 1.
double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kConvergence) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper incomplete gamma by modified Lentz continued fraction, x >= a + 1.
double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kConvergence) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kConvergence) break;
    }
    return h;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

void validate_cells(const std::vector<std::vector<double>>& cells, const char* what) {
    if (cells.size() < 2) {
        throw ValidationError(std::string(what) + ": at least 2 participants required");
    }
    const std::size_t k = cells.front().size();
    if (k < 2) {
        throw ValidationError(std::string(what) + ": at least 2 conditions required");
    }
    for (const auto& row : cells) {
        if (row.size() != k) {
            throw ValidationError(std::string(what) +
                                  ": incomplete design (row lengths differ)");
        }
    }
}

}  // namespace

double log_gamma(double x) {
    // Lanczos approximation, g = 7, 9 coefficients.
    static constexpr double kCoef[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (!(x > 0.0)) throw ValidationError("log_gamma: argument must be > 0");
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
               log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double acc = kCoef[0];
    for (int i = 1; i < 9; ++i) acc += kCoef[i] / (z + i);
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
           std::log(acc);
}

double regularized_lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw ValidationError("incomplete gamma: a must be > 0");
    if (x < 0.0) throw ValidationError("incomplete gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_upper_incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw ValidationError("incomplete gamma: a must be > 0");
    if (x < 0.0) throw ValidationError("incomplete gamma: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_continued_fraction(a, x);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete beta: a,b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                 b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("student t: df must be > 0");
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
    const double p = student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - 0.5 * p : 0.5 * p;
}

double f_distribution_cdf(double f, double df1, double df2) {
    if (!(df1 > 0.0 && df2 > 0.0)) throw ValidationError("F distribution: df must be > 0");
    if (f <= 0.0) return 0.0;
    return regularized_incomplete_beta(0.5 * df1, 0.5 * df2,
                                       df1 * f / (df1 * f + df2));
}

double f_distribution_upper_tail(double f, double df1, double df2) {
    if (!(df1 > 0.0 && df2 > 0.0)) throw ValidationError("F distribution: df must be > 0");
    if (f <= 0.0) return 1.0;
    return regularized_incomplete_beta(0.5 * df2, 0.5 * df1, df2 / (df1 * f + df2));
}

double chi_square_cdf(double x, double df) {
    if (!(df > 0.0)) throw ValidationError("chi-square: df must be > 0");
    if (x <= 0.0) return 0.0;
    return regularized_lower_incomplete_gamma(0.5 * df, 0.5 * x);
}

double chi_square_upper_tail(double x, double df) {
    if (!(df > 0.0)) throw ValidationError("chi-square: df must be > 0");
    if (x <= 0.0) return 1.0;
    return regularized_upper_incomplete_gamma(0.5 * df, 0.5 * x);
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw ValidationError("paired_t_test: sample sizes differ");
    }
    const std::size_t n = x.size();
    if (n < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
    const double mean = mean_of(diff);
    const double var = sample_variance(diff, mean);
    if (var <= 0.0) {
        throw DegenerateStatError(
            "paired_t_test: zero variance of the paired differences");
    }
    TTestResult r;
    r.t = mean / std::sqrt(var / static_cast<double>(n));
    r.df = static_cast<double>(n - 1);
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || y.size() < 2) {
        throw ValidationError("welch_t_test: each group needs at least 2 samples");
    }
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double mx = mean_of(x), my = mean_of(y);
    const double vx = sample_variance(x, mx), vy = sample_variance(y, my);
    const double se2 = vx / nx + vy / ny;
    if (se2 <= 0.0) {
        throw DegenerateStatError("welch_t_test: zero variance in both groups");
    }
    TTestResult r;
    r.t = (mx - my) / std::sqrt(se2);
    r.df = se2 * se2 /
           (vx * vx / (nx * nx * (nx - 1.0)) + vy * vy / (ny * ny * (ny - 1.0)));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

AnovaResult rm_anova(const std::vector<std::vector<double>>& cells) {
    validate_cells(cells, "rm_anova");
    const int n = static_cast<int>(cells.size());
    const int k = static_cast<int>(cells.front().size());

    double grand = 0.0;
    for (const auto& row : cells) {
        for (double v : row) grand += v;
    }
    grand /= static_cast<double>(n) * k;

    double ss_total = 0.0, ss_subject = 0.0, ss_condition = 0.0;
    for (int i = 0; i < n; ++i) {
        double row_mean = 0.0;
        for (int j = 0; j < k; ++j) row_mean += cells[i][j];
        row_mean /= k;
        ss_subject += k * (row_mean - grand) * (row_mean - grand);
        for (int j = 0; j < k; ++j) ss_total += (cells[i][j] - grand) * (cells[i][j] - grand);
    }
    for (int j = 0; j < k; ++j) {
        double col_mean = 0.0;
        for (int i = 0; i < n; ++i) col_mean += cells[i][j];
        col_mean /= n;
        ss_condition += n * (col_mean - grand) * (col_mean - grand);
    }
    const double ss_error = ss_total - ss_subject - ss_condition;

    AnovaResult r;
    r.df1 = k - 1;
    r.df2 = (k - 1) * (n - 1);
    const double scale = std::max(ss_total, 1.0);
    if (ss_error <= scale * 1e-12) {
        throw DegenerateStatError(
            "rm_anova: zero error sum of squares (no residual variation)");
    }
    const double ms_condition = ss_condition / r.df1;
    const double ms_error = ss_error / r.df2;
    r.f = ms_condition / ms_error;
    r.p = f_distribution_upper_tail(r.f, r.df1, r.df2);
    r.partial_eta_sq = ss_condition / (ss_condition + ss_error);
    return r;
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& cells) {
    validate_cells(cells, "friedman_test");
    const int n = static_cast<int>(cells.size());
    const int k = static_cast<int>(cells.front().size());

    std::vector<double> rank_sum(k, 0.0);
    std::vector<int> order(k);
    for (int i = 0; i < n; ++i) {
        const auto& row = cells[i];
        for (int j = 0; j < k; ++j) order[j] = j;
        std::sort(order.begin(), order.end(),
                  [&row](int a, int b) { return row[a] < row[b]; });
        // Midranks over tied runs.
        int pos = 0;
        while (pos < k) {
            int end = pos;
            while (end + 1 < k && row[order[end + 1]] == row[order[pos]]) ++end;
            const double rank = 0.5 * (pos + end) + 1.0;
            for (int t = pos; t <= end; ++t) rank_sum[order[t]] += rank;
            pos = end + 1;
        }
    }
    double sum_sq = 0.0;
    for (double r : rank_sum) sum_sq += r * r;

    FriedmanResult r;
    r.chi_sq = 12.0 * sum_sq / (static_cast<double>(n) * k * (k + 1)) -
               3.0 * n * (k + 1);
    r.df = k - 1;
    r.p = chi_square_upper_tail(r.chi_sq, r.df);
    return r;
}

ConditionAccuracy accuracy_by_condition(const ResponseTable& table) {
    if (table.rows.empty()) throw ValidationError("accuracy_by_condition: empty table");

    ConditionAccuracy out;
    std::map<std::string, int> pid, cid;
    for (const auto& row : table.rows) {
        if (!pid.contains(row.participant)) {
            pid[row.participant] = static_cast<int>(out.participants.size());
            out.participants.push_back(row.participant);
        }
        if (!cid.contains(row.condition)) {
            cid[row.condition] = static_cast<int>(out.conditions.size());
            out.conditions.push_back(row.condition);
        }
    }
    const int n = static_cast<int>(out.participants.size());
    const int k = static_cast<int>(out.conditions.size());
    std::vector<std::vector<long long>> total(n, std::vector<long long>(k, 0));
    std::vector<std::vector<long long>> correct(n, std::vector<long long>(k, 0));
    for (const auto& row : table.rows) {
        const int i = pid[row.participant];
        const int j = cid[row.condition];
        total[i][j] += 1;
        correct[i][j] += row.correct ? 1 : 0;
    }
    std::string missing;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            if (total[i][j] == 0) {
                if (!missing.empty()) missing += ", ";
                missing += "(" + out.participants[i] + ", " + out.conditions[j] + ")";
            }
        }
    }
    if (!missing.empty()) {
        throw ValidationError(
            "accuracy_by_condition: incomplete design, missing cells: " + missing);
    }
    out.accuracy.assign(n, std::vector<double>(k, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            out.accuracy[i][j] =
                static_cast<double>(correct[i][j]) / static_cast<double>(total[i][j]);
        }
    }
    out.mean.resize(k);
    out.sd.resize(k);
    for (int j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (int i = 0; i < n; ++i) col[i] = out.accuracy[i][j];
        out.mean[j] = mean_of(col);
        out.sd[j] = n > 1 ? std::sqrt(sample_variance(col, out.mean[j])) : 0.0;
    }
    return out;
}

}  // namespace afv
