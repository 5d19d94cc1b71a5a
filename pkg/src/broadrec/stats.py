"""Statistical battery for the experiment analysis: one-way ANOVA, Welch's
unequal-variance t-test, Cohen's d, Likert binning, proportional-odds ordinal
regression, and the per-cohort report generator.

p-values for the t and F distributions are computed here via the regularized
incomplete beta function (continued fraction), so the runtime needs no
statistics dependency; the normal CDF uses math.erf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

Z_975 = 1.959963984540054


class ConvergenceError(RuntimeError):
    """Maximum-likelihood iteration failed to converge (possibly complete
    separation in the design)."""


# --------------------------------------------------------------------------
# Distribution tails via the regularized incomplete beta
# --------------------------------------------------------------------------

def _betacf(x: float, a: float, b: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-15:
            break
    return h


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), accurate to ~1e-12 over the usable range."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x out of [0,1]: {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        a * math.log(x)
        + b * math.log1p(-x)
        + math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - math.exp(ln_front) * _betacf(1.0 - x, b, a) / b


def t_sf_two_sided(t: float, dof: float) -> float:
    """Two-sided tail probability of Student's t."""
    if dof <= 0:
        raise ValueError("dof must be positive")
    if math.isinf(t):
        return 0.0
    x = dof / (dof + t * t)
    return min(1.0, regularized_incomplete_beta(x, dof / 2.0, 0.5))


def f_sf(f_stat: float, dof1: float, dof2: float) -> float:
    """Upper tail probability of the F distribution."""
    if dof1 <= 0 or dof2 <= 0:
        raise ValueError("dofs must be positive")
    if math.isinf(f_stat):
        return 0.0
    if f_stat <= 0:
        return 1.0
    x = dof2 / (dof2 + dof1 * f_stat)
    return min(1.0, regularized_incomplete_beta(x, dof2 / 2.0, dof1 / 2.0))


def normal_sf_two_sided(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


# --------------------------------------------------------------------------
# Tests and effect size
# --------------------------------------------------------------------------

@dataclass
class TestResult:
    statistic: float
    dof: float | tuple[float, float]  # Welch dof is fractional; ANOVA carries both
    p_value: float
    effect_size: float | None = None


def one_way_anova(groups: Sequence[Sequence[float]]) -> TestResult:
    """Classic one-way ANOVA F test across two or more groups."""
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    for i, arr in enumerate(arrays):
        if arr.size < 2:
            raise ValueError(f"group {i} has fewer than two observations")
    n_total = sum(a.size for a in arrays)
    k = len(arrays)
    grand = sum(float(a.sum()) for a in arrays) / n_total
    ss_between = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ss_within = sum(float(((a - a.mean()) ** 2).sum()) for a in arrays)
    df_between = k - 1
    df_within = n_total - k
    if ss_within == 0.0:
        if ss_between == 0.0:
            return TestResult(0.0, (df_between, df_within), 1.0)
        return TestResult(math.inf, (df_between, df_within), 0.0)
    f_stat = (ss_between / df_between) / (ss_within / df_within)
    return TestResult(f_stat, (df_between, df_within), f_sf(f_stat, df_between, df_within))


def welch_t(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sample t with Welch-Satterthwaite fractional degrees of freedom."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("each sample needs at least two observations")
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        raise ValueError("zero variance in both samples")
    sa = va / xa.size
    sb = vb / xb.size
    se = math.sqrt(sa + sb)
    t_stat = (float(xa.mean()) - float(xb.mean())) / se
    dof = (sa + sb) ** 2 / (
        (sa * sa) / (xa.size - 1) + (sb * sb) / (xb.size - 1)
    )
    return TestResult(t_stat, dof, t_sf_two_sided(t_stat, dof))


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """Standardized mean difference with the pooled (n_a + n_b - 2) denominator."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("each sample needs at least two observations")
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    pooled = ((xa.size - 1) * va + (xb.size - 1) * vb) / (xa.size + xb.size - 2)
    if pooled == 0.0:
        raise ValueError("zero pooled variance")
    return (float(xa.mean()) - float(xb.mean())) / math.sqrt(pooled)


LIKERT_BINS = {1: "negative", 2: "negative", 3: "neutral", 4: "positive", 5: "positive"}


def likert_bin(score: int | float) -> str:
    """Collapse a 1..5 Likert answer into negative / neutral / positive."""
    if isinstance(score, float):
        if not score.is_integer():
            raise ValueError(f"score off the 1..5 grid: {score}")
        score = int(score)
    if score not in LIKERT_BINS:
        raise ValueError(f"score off the 1..5 grid: {score}")
    return LIKERT_BINS[score]


# --------------------------------------------------------------------------
# Proportional-odds ordinal logistic regression
# --------------------------------------------------------------------------

def _logistic(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass
class OlrFit:
    """Proportional-odds fit: P(Y <= j | x) = logistic(cutpoint_j - x @ coef)."""

    predictor_names: list[str]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    odds_ratios: np.ndarray
    ci_low: np.ndarray  # 2.5% bound on the coefficient scale
    ci_high: np.ndarray  # 97.5% bound on the coefficient scale
    cutpoints: np.ndarray
    cutpoint_std_errors: np.ndarray
    log_likelihood: float
    ll_history: list[float] = field(default_factory=list)
    n_iter: int = 0

    def summary_rows(self) -> list[dict]:
        rows = []
        for i, name in enumerate(self.predictor_names):
            rows.append(
                {
                    "predictor": name,
                    "coef": float(self.coefficients[i]),
                    "std_error": float(self.std_errors[i]),
                    "t_value": float(self.t_values[i]),
                    "p_value": float(self.p_values[i]),
                    "odds_ratio": float(self.odds_ratios[i]),
                    "ci_2.5%": float(self.ci_low[i]),
                    "ci_97.5%": float(self.ci_high[i]),
                }
            )
        return rows


def _olr_ll_grad_hess(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, theta: np.ndarray, n_levels: int
) -> tuple[float, np.ndarray, np.ndarray]:
    n, p = X.shape
    m1 = n_levels - 1
    eta = X @ beta if p else np.zeros(n)

    hi_idx = y  # theta index of the upper boundary (== n_levels-1 -> +inf)
    lo_idx = y - 1  # theta index of the lower boundary (== -1 -> -inf)

    z_hi = np.where(hi_idx < m1, theta[np.minimum(hi_idx, m1 - 1)] - eta, np.inf)
    z_lo = np.where(lo_idx >= 0, theta[np.maximum(lo_idx, 0)] - eta, -np.inf)

    F_hi = np.where(np.isinf(z_hi), 1.0, _logistic(np.where(np.isinf(z_hi), 0.0, z_hi)))
    F_lo = np.where(np.isinf(z_lo), 0.0, _logistic(np.where(np.isinf(z_lo), 0.0, z_lo)))
    P = np.maximum(F_hi - F_lo, 1e-300)

    f_hi = np.where(np.isinf(z_hi), 0.0, F_hi * (1.0 - F_hi))
    f_lo = np.where(np.isinf(z_lo), 0.0, F_lo * (1.0 - F_lo))
    fp_hi = np.where(np.isinf(z_hi), 0.0, f_hi * (1.0 - 2.0 * F_hi))
    fp_lo = np.where(np.isinf(z_lo), 0.0, f_lo * (1.0 - 2.0 * F_lo))

    ll = float(np.log(P).sum())

    # First derivatives with respect to the boundary arguments.
    d_hi = f_hi / P
    d_lo = -f_lo / P

    grad = np.zeros(p + m1)
    if p:
        grad[:p] = -X.T @ (d_hi + d_lo)
    for j in range(m1):
        grad[p + j] = d_hi[hi_idx == j].sum() + d_lo[lo_idx == j].sum()

    # Second derivatives.
    h_hihi = fp_hi / P - d_hi * d_hi
    h_lolo = -fp_lo / P - (f_lo / P) ** 2
    h_hilo = f_hi * f_lo / (P * P)

    hess = np.zeros((p + m1, p + m1))
    if p:
        w_bb = h_hihi + h_lolo + 2.0 * h_hilo  # (d z / d beta) = -x for both bounds
        hess[:p, :p] = X.T @ (w_bb[:, None] * X)
    for j in range(m1):
        sel_hi = hi_idx == j
        sel_lo = lo_idx == j
        hess[p + j, p + j] = h_hihi[sel_hi].sum() + h_lolo[sel_lo].sum()
        if p:
            w = -(h_hihi[sel_hi, None] * X[sel_hi]).sum(axis=0) - (
                h_hilo[sel_hi, None] * X[sel_hi]
            ).sum(axis=0)
            w += -(h_lolo[sel_lo, None] * X[sel_lo]).sum(axis=0) - (
                h_hilo[sel_lo, None] * X[sel_lo]
            ).sum(axis=0)
            hess[:p, p + j] = w
            hess[p + j, :p] = w
        if j + 1 < m1:
            sel = lo_idx == j  # z_lo at theta_j, z_hi at theta_{j+1}
            cross = h_hilo[sel & (hi_idx == j + 1)].sum()
            hess[p + j, p + j + 1] += cross
            hess[p + j + 1, p + j] += cross

    return ll, grad, hess


def fit_olr(
    X: Sequence[Sequence[float]] | np.ndarray,
    y: Sequence[int],
    predictor_names: Sequence[str] | None = None,
    max_iter: int = 100,
    grad_tol: float = 1e-8,
) -> OlrFit:
    """Fit the proportional-odds model by Newton iteration with step-halving.

    The outcome may use any ordered codes; they are ranked internally.
    Raises ConvergenceError when the iteration cap is hit (e.g. under complete
    separation) and ValueError for constant predictor columns.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.size == 0:
        X = X.reshape(len(y), 0)
    y = np.asarray(y)
    levels = np.unique(y)
    if levels.size < 2:
        raise ValueError("outcome needs at least two observed levels")
    rank = {v: i for i, v in enumerate(levels.tolist())}
    y_idx = np.array([rank[v] for v in y.tolist()], dtype=np.int64)
    n, p = X.shape
    n_levels = levels.size
    m1 = n_levels - 1

    for j in range(p):
        if np.ptp(X[:, j]) == 0.0:
            raise ValueError(f"constant predictor column {j}: coefficient not identifiable")

    if predictor_names is None:
        predictor_names = [f"x{j}" for j in range(p)]
    predictor_names = list(predictor_names)
    if len(predictor_names) != p:
        raise ValueError("predictor_names length must match the number of columns")

    beta = np.zeros(p)
    cum = np.cumsum(np.bincount(y_idx, minlength=n_levels))[:-1] / n
    theta = np.log(cum / (1.0 - cum))

    ll, grad, hess = _olr_ll_grad_hess(X, y_idx, beta, theta, n_levels)
    history = [ll]
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        if float(np.max(np.abs(grad))) < grad_tol:
            break
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular information matrix") from exc
        scale = 1.0
        for _ in range(60):
            beta_new = beta - scale * step[:p]
            theta_new = theta - scale * step[p:]
            if np.all(np.diff(theta_new) > 0) or m1 == 1:
                ll_new, grad_new, hess_new = _olr_ll_grad_hess(
                    X, y_idx, beta_new, theta_new, n_levels
                )
                if math.isfinite(ll_new) and ll_new >= ll - 1e-12:
                    beta, theta = beta_new, theta_new
                    ll, grad, hess = ll_new, grad_new, hess_new
                    break
            scale *= 0.5
        else:
            raise ConvergenceError("step-halving failed to improve the log-likelihood")
        history.append(ll)
    else:
        raise ConvergenceError(
            "no convergence within the iteration cap (possible complete separation)"
        )

    # Complete separation drives every observation's fitted category
    # probability to 1; report it rather than returning boundary estimates.
    eta = X @ beta if p else np.zeros(n)
    z_hi = np.where(y_idx < m1, theta[np.minimum(y_idx, m1 - 1)] - eta, np.inf)
    z_lo = np.where(y_idx > 0, theta[np.maximum(y_idx - 1, 0)] - eta, -np.inf)
    fitted = np.where(np.isinf(z_hi), 1.0, _logistic(np.where(np.isinf(z_hi), 0.0, z_hi)))
    fitted -= np.where(np.isinf(z_lo), 0.0, _logistic(np.where(np.isinf(z_lo), 0.0, z_lo)))
    if p and float(fitted.min()) > 1.0 - 1e-6:
        raise ConvergenceError(
            "complete separation: the model predicts every observation perfectly"
        )

    info = -hess  # observed information
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("singular observed information at the optimum") from exc
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))

    beta_se = se[:p]
    t_vals = np.divide(beta, beta_se, out=np.zeros_like(beta), where=beta_se > 0)
    p_vals = np.array([normal_sf_two_sided(t) for t in t_vals])

    return OlrFit(
        predictor_names=predictor_names,
        coefficients=beta,
        std_errors=beta_se,
        t_values=t_vals,
        p_values=p_vals,
        odds_ratios=np.exp(beta),
        ci_low=beta - Z_975 * beta_se,
        ci_high=beta + Z_975 * beta_se,
        cutpoints=theta,
        cutpoint_std_errors=se[p:],
        log_likelihood=ll,
        ll_history=history,
        n_iter=n_iter,
    )


# --------------------------------------------------------------------------
# Experiment report
# --------------------------------------------------------------------------

def significance_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


class ComparisonRow(NamedTuple):
    window: str
    cohort: str  # "D", "ND", or "D vs ND"
    metric: str
    comparison: str  # "ANOVA" or e.g. "BRC_DS vs Control"
    statistic: float
    dof: float | tuple[float, float]
    p_value: float
    effect_size: float | None
    stars: str


class MeanRow(NamedTuple):
    window: str
    arm: str
    metric: str
    mean: float | None
    n: int


@dataclass
class ExperimentReport:
    means: list[MeanRow]
    comparisons: list[ComparisonRow]

    def significant(self, alpha: float = 0.05) -> list[ComparisonRow]:
        return [row for row in self.comparisons if row.p_value < alpha]


# Metric -> record attribute, in report order. Slider interactions exist only
# for slider-interface arms, so they are compared only between those arms.
METRIC_FIELDS = {
    "ratingDiversity": "rating_diversity",
    "sliderInteractions": "slider_interactions",
    "pageViewFreq": "page_view_freq",
    "loginFrequency": "login_frequency",
    "totalLength": "total_length",
    "numRatings": "num_ratings",
    "wishlistFreq": "wishlist_freq",
    "avgRating": "avg_rating",
}

SLIDER_ONLY_METRICS = {"sliderInteractions"}


def _metric_values(records: Iterable, attr: str) -> list[float]:
    return [float(v) for r in records if (v := getattr(r, attr)) is not None]


def analyze_experiment(
    metrics_by_window: Mapping[str, Mapping[str, Sequence]],
    treatments: Sequence[str] = ("Control", "BRC", "BRC_DS"),
    cohorts: Sequence[str] = ("D", "ND"),
) -> ExperimentReport:
    """Per-window, per-cohort ANOVA across treatments plus all pairwise Welch
    tests with Cohen's d, and cross-cohort same-treatment comparisons.

    `metrics_by_window` maps window name -> arm label (e.g. "D-BRC") ->
    MetricsRecords. Tests that are undefined on the data (all-constant
    samples, too few observations) are skipped rather than reported.
    """
    means: list[MeanRow] = []
    rows: list[ComparisonRow] = []

    for window, by_arm in metrics_by_window.items():
        for arm_label in sorted(by_arm):
            records = by_arm[arm_label]
            treatment = arm_label.split("-", 1)[1]
            for metric, attr in METRIC_FIELDS.items():
                if metric in SLIDER_ONLY_METRICS and treatment != "BRC_DS":
                    means.append(MeanRow(window, arm_label, metric, None, len(records)))
                    continue
                values = _metric_values(records, attr)
                mean = sum(values) / len(values) if values else None
                means.append(MeanRow(window, arm_label, metric, mean, len(values)))

        for cohort in cohorts:
            for metric, attr in METRIC_FIELDS.items():
                applicable = (
                    [t for t in treatments if t == "BRC_DS"]
                    if metric in SLIDER_ONLY_METRICS
                    else list(treatments)
                )
                groups = {
                    t: _metric_values(by_arm.get(f"{cohort}-{t}", ()), attr)
                    for t in applicable
                }
                usable = {t: v for t, v in groups.items() if len(v) >= 2}
                if len(usable) >= 2:
                    try:
                        res = one_way_anova(list(usable.values()))
                        rows.append(
                            ComparisonRow(
                                window, cohort, metric, "ANOVA",
                                res.statistic, res.dof, res.p_value, None,
                                significance_stars(res.p_value),
                            )
                        )
                    except ValueError:
                        pass
                names = sorted(usable)
                for i in range(len(names)):
                    for j in range(i + 1, len(names)):
                        a, b = usable[names[i]], usable[names[j]]
                        try:
                            res = welch_t(a, b)
                        except ValueError:
                            continue
                        try:
                            d = cohens_d(a, b)
                        except ValueError:
                            d = None
                        rows.append(
                            ComparisonRow(
                                window, cohort, metric, f"{names[i]} vs {names[j]}",
                                res.statistic, res.dof, res.p_value, d,
                                significance_stars(res.p_value),
                            )
                        )

        # Same treatment across cohorts (e.g. slider use of D vs ND users).
        for treatment in treatments:
            for metric, attr in METRIC_FIELDS.items():
                if metric in SLIDER_ONLY_METRICS and treatment != "BRC_DS":
                    continue
                a = _metric_values(by_arm.get(f"{cohorts[0]}-{treatment}", ()), attr)
                b = _metric_values(by_arm.get(f"{cohorts[1]}-{treatment}", ()), attr)
                if len(a) < 2 or len(b) < 2:
                    continue
                try:
                    res = welch_t(a, b)
                except ValueError:
                    continue
                try:
                    d = cohens_d(a, b)
                except ValueError:
                    d = None
                rows.append(
                    ComparisonRow(
                        window, f"{cohorts[0]} vs {cohorts[1]}", metric, treatment,
                        res.statistic, res.dof, res.p_value, d,
                        significance_stars(res.p_value),
                    )
                )

    return ExperimentReport(means=means, comparisons=rows)
