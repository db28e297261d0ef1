"""Brute-force sums-of-squares ANOVA used as an independent check.

Everything here is computed longhand from raw deviations with nested
loops — no computational shortcuts — so agreement with the package's
implementations is meaningful.
"""


def _mean(values):
    values = list(values)
    return sum(values) / len(values)


def one_way_between(groups):
    """(F, df_between, df_within) for a list of score lists."""
    all_scores = [x for group in groups for x in group]
    grand = _mean(all_scores)
    ss_between = 0.0
    ss_within = 0.0
    for group in groups:
        group_mean = _mean(group)
        ss_between += len(group) * (group_mean - grand) ** 2
        for x in group:
            ss_within += (x - group_mean) ** 2
    df_between = len(groups) - 1
    df_within = len(all_scores) - len(groups)
    if ss_within == 0.0:
        f_value = 0.0 if ss_between == 0.0 else float("inf")
    else:
        f_value = (ss_between / df_between) / (ss_within / df_within)
    return f_value, df_between, df_within


def one_way_within(table):
    """(F, df_cond, df_error) for table[subject][condition], balanced."""
    n = len(table)
    k = len(table[0])
    grand = _mean(x for row in table for x in row)
    ss_total = sum((x - grand) ** 2 for row in table for x in row)
    ss_subjects = sum(k * (_mean(row) - grand) ** 2 for row in table)
    ss_cond = 0.0
    for c in range(k):
        column_mean = _mean(table[s][c] for s in range(n))
        ss_cond += n * (column_mean - grand) ** 2
    ss_error = ss_total - ss_subjects - ss_cond
    if ss_error < 0:  # rounding of an exactly-zero residual
        ss_error = max(ss_error, 0.0) if abs(ss_error) < 1e-12 else ss_error
    df_cond = k - 1
    df_error = (n - 1) * (k - 1)
    if ss_error == 0.0:
        f_value = 0.0 if ss_cond == 0.0 else float("inf")
    else:
        f_value = (ss_cond / df_cond) / (ss_error / df_error)
    return f_value, df_cond, df_error


def two_factor_within(data):
    """Repeated-measures two-factor decomposition.

    data[subject][i][j] holds one observation per cell. Returns a dict
    with (F, df1, df2) for "a", "b" and "ab", each tested against its
    own effect-by-subject error term.
    """
    n = len(data)
    a = len(data[0])
    b = len(data[0][0])
    grand = _mean(x for subj in data for row in subj for x in row)

    def subj_mean(s):
        return _mean(x for row in data[s] for x in row)

    def a_mean(i):
        return _mean(data[s][i][j] for s in range(n) for j in range(b))

    def b_mean(j):
        return _mean(data[s][i][j] for s in range(n) for i in range(a))

    def ab_mean(i, j):
        return _mean(data[s][i][j] for s in range(n))

    def sa_mean(s, i):
        return _mean(data[s][i][j] for j in range(b))

    def sb_mean(s, j):
        return _mean(data[s][i][j] for i in range(a))

    ss_total = sum((x - grand) ** 2
                   for subj in data for row in subj for x in row)
    ss_subj = a * b * sum((subj_mean(s) - grand) ** 2 for s in range(n))
    ss_a = n * b * sum((a_mean(i) - grand) ** 2 for i in range(a))
    ss_b = n * a * sum((b_mean(j) - grand) ** 2 for j in range(b))
    ss_ab = n * sum((ab_mean(i, j) - a_mean(i) - b_mean(j) + grand) ** 2
                    for i in range(a) for j in range(b))
    ss_err_a = b * sum(
        (sa_mean(s, i) - subj_mean(s) - a_mean(i) + grand) ** 2
        for s in range(n) for i in range(a))
    ss_err_b = a * sum(
        (sb_mean(s, j) - subj_mean(s) - b_mean(j) + grand) ** 2
        for s in range(n) for j in range(b))
    ss_err_ab = (ss_total - ss_subj - ss_a - ss_b - ss_ab
                 - ss_err_a - ss_err_b)
    if abs(ss_err_ab) < 1e-10:
        ss_err_ab = max(ss_err_ab, 0.0)

    def ratio(ss_effect, df_effect, ss_error, df_error):
        if ss_error == 0.0:
            f_value = 0.0 if ss_effect == 0.0 else float("inf")
        else:
            f_value = (ss_effect / df_effect) / (ss_error / df_error)
        return f_value, df_effect, df_error

    return {
        "a": ratio(ss_a, a - 1, ss_err_a, (n - 1) * (a - 1)),
        "b": ratio(ss_b, b - 1, ss_err_b, (n - 1) * (b - 1)),
        "ab": ratio(ss_ab, (a - 1) * (b - 1),
                    ss_err_ab, (n - 1) * (a - 1) * (b - 1)),
    }
