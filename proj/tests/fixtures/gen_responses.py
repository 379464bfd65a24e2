#!/usr/bin/env python3
"""Generates the bundled responses fixture and its expected statistics.

Writes responses_sample.csv and expected_stats.hpp next to this script. The
expected values are computed here, independently of the C++ implementation,
and cross-checked against scipy where scipy provides the same test.

Run from the repository root:  python3 tests/fixtures/gen_responses.py
"""

import math
import os
import random

import scipy.stats as st

HERE = os.path.dirname(os.path.abspath(__file__))

CONDITIONS = ["RGB", "DENSE_NOISE", "RANDOM_DOT"]
CLASSES = ["pushups", "pullups", "swings", "lunges", "jumpingjacks"]
N_PARTICIPANTS = 22
TRIALS = 75  # per condition, 15 per class

rng = random.Random(20240517)

# Per-condition base accuracy and participant-level jitter (in trial counts).
BASE_CORRECT = {"RGB": 74, "DENSE_NOISE": 63, "RANDOM_DOT": 59}
JITTER = {"RGB": 1, "DENSE_NOISE": 5, "RANDOM_DOT": 5}


def cell_correct_counts():
    counts = {}
    for i in range(N_PARTICIPANTS):
        pid = f"p{i + 1:02d}"
        for cond in CONDITIONS:
            c = BASE_CORRECT[cond] + rng.randint(-JITTER[cond], JITTER[cond])
            counts[(pid, cond)] = max(0, min(TRIALS, c))
    return counts


def write_csv(counts, path):
    lines = ["participant,condition,trial,true_label,response,correct,rt_ms,order"]
    for i in range(N_PARTICIPANTS):
        pid = f"p{i + 1:02d}"
        order = "noise_first" if i < N_PARTICIPANTS // 2 else "dots_first"
        for cond in CONDITIONS:
            n_correct = counts[(pid, cond)]
            # Spread errors deterministically over the 75 trials.
            wrong = set(rng.sample(range(TRIALS), TRIALS - n_correct))
            for trial in range(TRIALS):
                true_label = CLASSES[trial % len(CLASSES)]
                if trial in wrong:
                    others = [c for c in CLASSES if c != true_label]
                    response = others[rng.randrange(len(others))]
                    correct = 0
                else:
                    response = true_label
                    correct = 1
                rt = round(rng.uniform(450.0, 4200.0), 1)
                lines.append(
                    f"{pid},{cond},{trial},{true_label},{response},{correct},{rt},{order}"
                )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def accuracy_matrix(counts):
    acc = []
    for i in range(N_PARTICIPANTS):
        pid = f"p{i + 1:02d}"
        acc.append([counts[(pid, cond)] / TRIALS for cond in CONDITIONS])
    return acc


def mean(xs):
    return sum(xs) / len(xs)


def sample_sd(xs):
    m = mean(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def rm_anova(acc):
    n = len(acc)
    k = len(acc[0])
    grand = mean([v for row in acc for v in row])
    ss_total = sum((v - grand) ** 2 for row in acc for v in row)
    ss_subject = sum(k * (mean(row) - grand) ** 2 for row in acc)
    ss_cond = sum(
        n * (mean([acc[i][j] for i in range(n)]) - grand) ** 2 for j in range(k)
    )
    ss_error = ss_total - ss_subject - ss_cond
    df1, df2 = k - 1, (k - 1) * (n - 1)
    f = (ss_cond / df1) / (ss_error / df2)
    p = st.f.sf(f, df1, df2)
    eta = ss_cond / (ss_cond + ss_error)
    return f, df1, df2, p, eta


def friedman(acc):
    """Friedman statistic with midranks and no tie correction.

    scipy.stats.friedmanchisquare divides by the tie-correction factor
    C = 1 - sum(t^3 - t) / (n (k^3 - k)); the uncorrected statistic times
    1/C must equal scipy's value, which the caller asserts.
    """
    n = len(acc)
    k = len(acc[0])
    rank_sums = [0.0] * k
    tie_term = 0.0
    for row in acc:
        order = sorted(range(k), key=lambda j: row[j])
        ranks = [0.0] * k
        pos = 0
        while pos < k:
            end = pos
            while end + 1 < k and row[order[end + 1]] == row[order[pos]]:
                end += 1
            r = (pos + end) / 2 + 1
            t_run = end - pos + 1
            tie_term += t_run**3 - t_run
            for t in range(pos, end + 1):
                ranks[order[t]] = r
            pos = end + 1
        for j in range(k):
            rank_sums[j] += ranks[j]
    chi = 12.0 * sum(r * r for r in rank_sums) / (n * k * (k + 1)) - 3.0 * n * (k + 1)
    p = st.chi2.sf(chi, k - 1)
    correction = 1.0 - tie_term / (n * (k**3 - k))
    return chi, k - 1, p, correction


def paired_t(a, b):
    d = [x - y for x, y in zip(a, b)]
    m = mean(d)
    sd = sample_sd(d)
    t = m / (sd / math.sqrt(len(d)))
    p = 2.0 * st.t.sf(abs(t), len(d) - 1)
    return t, len(d) - 1, p


def welch_t(a, b):
    ma, mb = mean(a), mean(b)
    va, vb = sample_sd(a) ** 2, sample_sd(b) ** 2
    na, nb = len(a), len(b)
    se2 = va / na + vb / nb
    t = (ma - mb) / math.sqrt(se2)
    df = se2**2 / (va**2 / (na**2 * (na - 1)) + vb**2 / (nb**2 * (nb - 1)))
    p = 2.0 * st.t.sf(abs(t), df)
    return t, df, p


def main():
    counts = cell_correct_counts()
    write_csv(counts, os.path.join(HERE, "responses_sample.csv"))
    acc = accuracy_matrix(counts)

    means = [mean([acc[i][j] for i in range(N_PARTICIPANTS)]) for j in range(3)]
    sds = [sample_sd([acc[i][j] for i in range(N_PARTICIPANTS)]) for j in range(3)]
    f, df1, df2, p_f, eta = rm_anova(acc)
    chi, df_chi, p_chi, tie_correction = friedman(acc)

    # Cross-check against scipy (scipy reports the tie-corrected statistic).
    cols = [[acc[i][j] for i in range(N_PARTICIPANTS)] for j in range(3)]
    chi_sp, _ = st.friedmanchisquare(*cols)
    assert abs(chi / tie_correction - chi_sp) < 1e-9, (chi, tie_correction, chi_sp)

    half = N_PARTICIPANTS // 2
    g1 = list(range(half))           # noise_first
    g2 = list(range(half, N_PARTICIPANTS))  # dots_first
    noise_cond, dots_cond = 1, 2
    t1, df_t1, p_t1 = paired_t([acc[i][noise_cond] for i in g1], [acc[i][dots_cond] for i in g1])
    t2, df_t2, p_t2 = paired_t([acc[i][noise_cond] for i in g2], [acc[i][dots_cond] for i in g2])
    sp1 = st.ttest_rel([acc[i][noise_cond] for i in g1], [acc[i][dots_cond] for i in g1])
    assert abs(t1 - sp1.statistic) < 1e-10 and abs(p_t1 - sp1.pvalue) < 1e-12

    d1 = [acc[i][noise_cond] - acc[i][dots_cond] for i in g1]
    d2 = [acc[i][noise_cond] - acc[i][dots_cond] for i in g2]
    # Group order matches the library's lexicographic order-tag ordering:
    # "dots_first" (g2) before "noise_first" (g1).
    tw, dfw, pw = welch_t(d2, d1)
    spw = st.ttest_ind(d2, d1, equal_var=False)
    assert abs(tw - spw.statistic) < 1e-10 and abs(pw - spw.pvalue) < 1e-12

    # numpy scalars repr as np.float64(...); plain floats for the header
    p_f, p_chi = float(p_f), float(p_chi)
    p_t1, p_t2, pw = float(p_t1), float(p_t2), float(pw)
    tw, dfw = float(tw), float(dfw)

    hpp = os.path.join(HERE, "expected_stats.hpp")
    with open(hpp, "w") as f_out:
        f_out.write("#pragma once\n\n")
        f_out.write("// Expected statistics for responses_sample.csv, computed by\n")
        f_out.write("// gen_responses.py independently of the library implementation.\n\n")
        f_out.write("namespace fixture {\n\n")
        f_out.write(f"inline constexpr int kParticipants = {N_PARTICIPANTS};\n")
        f_out.write(f"inline constexpr int kTrialsPerCondition = {TRIALS};\n\n")
        for name, vals in ("Mean", means), ("Sd", sds):
            f_out.write(f"inline constexpr double k{name}[3] = {{")
            f_out.write(", ".join(f"{v!r}" for v in vals))
            f_out.write("};  // RGB, DENSE_NOISE, RANDOM_DOT\n")
        f_out.write(f"\ninline constexpr double kAnovaF = {f!r};\n")
        f_out.write(f"inline constexpr int kAnovaDf1 = {df1};\n")
        f_out.write(f"inline constexpr int kAnovaDf2 = {df2};\n")
        f_out.write(f"inline constexpr double kAnovaP = {p_f!r};\n")
        f_out.write(f"inline constexpr double kAnovaPartialEta = {eta!r};\n")
        f_out.write(f"\ninline constexpr double kFriedmanChi = {chi!r};\n")
        f_out.write(f"inline constexpr int kFriedmanDf = {df_chi};\n")
        f_out.write(f"inline constexpr double kFriedmanP = {p_chi!r};\n")
        f_out.write("\n// Paired t (DENSE_NOISE vs RANDOM_DOT) per block-order group.\n")
        f_out.write(f"inline constexpr double kPairedTNoiseFirst = {t1!r};\n")
        f_out.write(f"inline constexpr int kPairedDfNoiseFirst = {df_t1};\n")
        f_out.write(f"inline constexpr double kPairedPNoiseFirst = {p_t1!r};\n")
        f_out.write(f"inline constexpr double kPairedTDotsFirst = {t2!r};\n")
        f_out.write(f"inline constexpr int kPairedDfDotsFirst = {df_t2};\n")
        f_out.write(f"inline constexpr double kPairedPDotsFirst = {p_t2!r};\n")
        f_out.write("\n// Welch t on the condition difference across order groups\n"
                    "// (groups in lexicographic order-tag order).\n")
        f_out.write(f"inline constexpr double kWelchT = {tw!r};\n")
        f_out.write(f"inline constexpr double kWelchDf = {dfw!r};\n")
        f_out.write(f"inline constexpr double kWelchP = {pw!r};\n")
        f_out.write("\n}  // namespace fixture\n")

    print("means:", [f"{v:.4f}" for v in means])
    print("sds:  ", [f"{v:.4f}" for v in sds])
    print(f"ANOVA F({df1},{df2}) = {f:.4f}, p = {p_f:.3e}, eta = {eta:.4f}")
    print(f"Friedman chi2({df_chi}) = {chi:.4f}, p = {p_chi:.3e}")
    print(f"paired t noise-first: t({df_t1}) = {t1:.4f}, p = {p_t1:.4f}")
    print(f"paired t dots-first: t({df_t2}) = {t2:.4f}, p = {p_t2:.4f}")
    print(f"welch: t = {tw:.4f}, df = {dfw:.2f}, p = {pw:.4f}")


if __name__ == "__main__":
    main()
