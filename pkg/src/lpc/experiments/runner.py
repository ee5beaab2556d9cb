"""Experiment drivers reproducing the validation figures and tables.

Each ``run_*`` function consumes an :class:`ExperimentConfig` and returns a
:class:`RunReport` pairing every empirical cell with its theoretical
counterpart where one exists.  Variants:

- ``naive``      train on noisy labels, rho = (0, 0)
- ``unbiased``   train on noisy labels, rho = (eps_plus, eps_minus)
- ``optimized``  train on noisy labels, rho = (optimal rho_plus, 0)
- ``oracle``     train on clean labels, rho = (0, 0)
- ``custom``     train on noisy labels, configured rho

Empirical accuracies are orientation-calibrated: predictions are
``sign(m_rho) * sign(w @ x)`` with ``sign(m_rho)`` taken from the theory
(the optimal ``rho_plus`` can sit past the singular line, where the raw
ridge solution points away from the positive class).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import cho_solve

from ..core import RhoParams, _gram_factor, _targets
from ..datasets import (
    GmmSpec,
    LabeledDataset,
    derive_seed,
    flip_labels,
    generate_gmm,
    load_features_csv,
    standardize_and_estimate,
)
from ..multiclass import MultiGmmSpec, search_alpha_beta
from ..noise import estimate_noise_rates
from ..theory import (
    TheoryConfig,
    TheoryStats,
    optimal_rho_plus,
    theory_stats_isotropic,
)
from .config import ConfigError, ExperimentConfig
from .report import RunReport
from .svgplot import Figure

__all__ = [
    "optimal_gamma",
    "run_experiment",
    "run_histogram",
    "run_multiclass",
    "run_noise_estimation",
    "run_real_data",
    "run_sweep",
    "theory_csv",
]


def optimal_gamma(eta: float, snr: float, lo: float = 1e-3, hi: float = 1e3) -> float:
    """Regularization maximizing the predicted oracle accuracy.

    Golden-section search over ``log10(gamma)``; deterministic stand-in for
    the undefined "optimal gamma" of the figure setups.
    """

    def neg_score(log_g: float) -> float:
        st = theory_stats_isotropic(
            TheoryConfig(eta=eta, pi1=0.5, gamma=10.0**log_g, snr=snr)
        )
        var = st.nu_oracle - st.m_oracle**2
        return -st.m_oracle / math.sqrt(var)

    a, b = math.log10(lo), math.log10(hi)
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - ratio * (b - a), a + ratio * (b - a)
    fc, fd = neg_score(c), neg_score(d)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = neg_score(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = neg_score(d)
    return 10.0 ** ((a + b) / 2.0)


def _variant_rho(name: str, pi1: float, eps_plus: float, eps_minus: float,
                 cfg: ExperimentConfig) -> RhoParams:
    if name in ("naive", "oracle"):
        return RhoParams()
    if name == "unbiased":
        return RhoParams(eps_plus, eps_minus)
    if name == "optimized":
        return RhoParams(optimal_rho_plus(pi1, eps_plus, eps_minus, 0.0), 0.0)
    if name == "custom":
        return RhoParams(cfg.custom_rho_plus, cfg.custom_rho_minus)
    raise ConfigError(f"unknown variant {name!r}")


def _variant_theory(name: str, rho: RhoParams, eta: float, gamma: float, snr: float,
                    pi1: float, eps_plus: float, eps_minus: float) -> TheoryStats:
    if name == "oracle":
        eps_plus = eps_minus = 0.0
    return theory_stats_isotropic(
        TheoryConfig(eta=eta, pi1=pi1, gamma=gamma, eps_plus=eps_plus,
                     eps_minus=eps_minus, rho=rho, snr=snr)
    )


def _train_variants(
    ds_noisy: LabeledDataset,
    variant_rhos: dict[str, RhoParams],
    gamma: float,
) -> dict[str, np.ndarray]:
    """One Gram factorization shared across all variants of one draw."""
    X, n = ds_noisy.X, ds_noisy.n
    _, factor = _gram_factor(X, gamma)
    out = {}
    for name, rho in variant_rhos.items():
        labels = ds_noisy.y_clean if name == "oracle" else ds_noisy.y_noisy
        rhs = X @ _targets(labels, rho) / n
        out[name] = cho_solve(factor, rhs)
    return out


def _oriented_accuracy(scores: np.ndarray, y: np.ndarray, orientation: float) -> float:
    pred = np.where(orientation * scores >= 0, 1, -1)
    return float(np.mean(pred == y))


def _pool_map(fn, args, threads: int):
    if threads <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, args))


def _class_statistics(scores: np.ndarray, y_clean: np.ndarray) -> dict[str, float]:
    c1 = scores[y_clean == -1]
    c2 = scores[y_clean == +1]
    return {
        "mean_class1": float(c1.mean()),
        "mean_class2": float(c2.mean()),
        "std_class1": float(c1.std()),
        "std_class2": float(c2.std()),
    }


def _gamma_value(cfg: ExperimentConfig, eta: float, snr: float) -> float:
    if cfg.gamma == "optimal":
        return optimal_gamma(eta, snr)
    return float(cfg.gamma)


# ---------------------------------------------------------------------------
# histogram
# ---------------------------------------------------------------------------


def run_histogram(cfg: ExperimentConfig) -> RunReport:
    """Decision-value distributions of every variant against the predicted
    Gaussian mixture; bins from the first seed, moment rows from all."""
    report = RunReport("histogram", cfg)
    eta = cfg.p / cfg.n
    gamma = _gamma_value(cfg, eta, cfg.snr)
    rhos = {v: _variant_rho(v, cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg) for v in cfg.variants}
    theories = {
        v: _variant_theory(v, rhos[v], eta, gamma, cfg.snr, cfg.pi1,
                           cfg.eps_plus, cfg.eps_minus)
        for v in cfg.variants
    }

    first_seed_scores: dict[str, np.ndarray] = {}

    def one_seed(seed: int):
        train = generate_gmm(GmmSpec.isotropic(
            cfg.p, cfg.n, cfg.pi1, cfg.snr, seed=derive_seed(seed, 0)))
        noisy = flip_labels(train, cfg.eps_plus, cfg.eps_minus, derive_seed(seed, 1))
        test = generate_gmm(GmmSpec.isotropic(
            cfg.p, cfg.n_test, cfg.pi1, cfg.snr, seed=derive_seed(seed, 2)))
        weights = _train_variants(noisy, rhos, gamma)
        return seed, {v: w @ test.X for v, w in weights.items()}, test.y_clean

    for seed, score_map, y_clean in _pool_map(one_seed, list(cfg.seeds), cfg.threads):
        for v, scores in score_map.items():
            st = theories[v]
            sigma = math.sqrt(st.variance)
            stats = _class_statistics(scores, y_clean)
            report.add(v, 0.0, seed, "mean_class1", stats["mean_class1"], -st.m_rho)
            report.add(v, 0.0, seed, "mean_class2", stats["mean_class2"], st.m_rho)
            report.add(v, 0.0, seed, "std_class1", stats["std_class1"], sigma)
            report.add(v, 0.0, seed, "std_class2", stats["std_class2"], sigma)
            orientation = 1.0 if st.m_rho >= 0 else -1.0
            report.add(v, 0.0, seed, "accuracy",
                       _oriented_accuracy(scores, y_clean, orientation), st.accuracy)
            report.add(v, 0.0, seed, "risk",
                       float(np.mean((scores - y_clean) ** 2)), st.risk)
            if seed == cfg.seeds[0]:
                first_seed_scores[v] = scores

    report.figure_svg, report.extra_files["bins.csv"] = _histogram_outputs(
        cfg, first_seed_scores, theories
    )
    return report


def _gauss_mixture_density(x: np.ndarray, st: TheoryStats, pi1: float) -> np.ndarray:
    sigma = math.sqrt(st.variance)
    z1 = (x + st.m_rho) / sigma
    z2 = (x - st.m_rho) / sigma
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    return norm * (pi1 * np.exp(-0.5 * z1**2) + (1.0 - pi1) * np.exp(-0.5 * z2**2))


def _histogram_outputs(cfg, score_map, theories) -> tuple[str, str]:
    lo = min(float(s.min()) for s in score_map.values())
    hi = max(float(s.max()) for s in score_map.values())
    edges = np.linspace(lo, hi, cfg.bins + 1)
    centers = (edges[:-1] + edges[1:]) / 2.0
    fig = Figure(title=f"decision values (p={cfg.p}, n={cfg.n})",
                 xlabel="w @ x", ylabel="density")
    lines = ["variant,bin_left,bin_right,density_empirical,density_theory"]
    for v, scores in score_map.items():
        dens, _ = np.histogram(scores, bins=edges, density=True)
        theory_dens = _gauss_mixture_density(centers, theories[v], cfg.pi1)
        fig.bars(centers, dens, width=float(edges[1] - edges[0]), label=f"{v} (emp)")
        fig.line(centers, theory_dens, label=f"{v} (theory)", dashed=True)
        for i in range(cfg.bins):
            lines.append(
                f"{v},{float(edges[i])!r},{float(edges[i + 1])!r},"
                f"{float(dens[i])!r},{float(theory_dens[i])!r}"
            )
    return fig.render(), "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def run_sweep(cfg: ExperimentConfig) -> RunReport:
    """Accuracy/risk versus a swept parameter (eps_plus, rho_plus or gamma),
    empirical markers against theory curves.

    The feature draw and the test set are shared across the grid per seed;
    for the eps_plus sweep only the flips are redrawn per grid point.
    """
    report = RunReport("sweep", cfg)
    eta = cfg.p / cfg.n

    def one_seed(seed: int):
        train = generate_gmm(GmmSpec.isotropic(
            cfg.p, cfg.n, cfg.pi1, cfg.snr, seed=derive_seed(seed, 0)))
        test = generate_gmm(GmmSpec.isotropic(
            cfg.p, cfg.n_test, cfg.pi1, cfg.snr, seed=derive_seed(seed, 2)))
        rows = []
        for g, value in enumerate(cfg.grid):
            eps_plus, eps_minus = cfg.eps_plus, cfg.eps_minus
            if cfg.sweep_param == "eps_plus":
                gamma = _gamma_value(cfg, eta, cfg.snr)
                eps_plus = value
                flip_stream = 10 + g
            elif cfg.sweep_param == "gamma":
                gamma = value
                flip_stream = 1
            else:
                gamma = _gamma_value(cfg, eta, cfg.snr)
                flip_stream = 1
            noisy = flip_labels(train, eps_plus, eps_minus, derive_seed(seed, flip_stream))
            rhos = {}
            for v in cfg.variants:
                if v == "custom" and cfg.sweep_param == "rho_plus":
                    rhos[v] = RhoParams(value, cfg.custom_rho_minus)
                else:
                    rhos[v] = _variant_rho(v, cfg.pi1, eps_plus, eps_minus, cfg)
            weights = _train_variants(noisy, rhos, gamma)
            for v, w in weights.items():
                st = _variant_theory(v, rhos[v], eta, gamma, cfg.snr, cfg.pi1,
                                     eps_plus, eps_minus)
                scores = w @ test.X
                orientation = 1.0 if st.m_rho >= 0 else -1.0
                acc = _oriented_accuracy(scores, test.y_clean, orientation)
                risk = float(np.mean((scores - test.y_clean) ** 2))
                rows.append((v, value, seed, acc, risk, st))
        return rows

    for rows in _pool_map(one_seed, list(cfg.seeds), cfg.threads):
        for v, value, seed, acc, risk, st in rows:
            report.add(v, value, seed, "accuracy", acc, st.accuracy)
            report.add(v, value, seed, "risk", risk, st.risk)

    report.figure_svg = _sweep_figure(cfg, report)
    return report


def _sweep_figure(cfg: ExperimentConfig, report: RunReport) -> str:
    fig = Figure(title=f"accuracy vs {cfg.sweep_param} (p={cfg.p}, n={cfg.n})",
                 xlabel=cfg.sweep_param, ylabel="test accuracy")
    for v in cfg.variants:
        emp = [report.mean_over_seeds(v, "accuracy", g) for g in cfg.grid]
        th = [report.theory_value(v, "accuracy", g) for g in cfg.grid]
        fig.line(cfg.grid, emp, label=f"{v} (emp)", markers=True)
        fig.line(cfg.grid, th, label=f"{v} (theory)", dashed=True)
    return fig.render()


# ---------------------------------------------------------------------------
# noise-rate estimation
# ---------------------------------------------------------------------------


def run_noise_estimation(cfg: ExperimentConfig) -> RunReport:
    """Sweep the true eps_plus and recover it from leave-one-out moments.

    With ``data_path`` set the sweep is skipped: the rates of the ingested
    noisy dataset are estimated once per seed, with SNR and class
    proportion taken from :func:`standardize_and_estimate` (approximate,
    noisy-label based) unless theory inputs are configured.
    """
    probe1 = RhoParams(cfg.probe1_rho_plus, cfg.probe1_rho_minus)
    probe2 = RhoParams(cfg.probe2_rho_plus, cfg.probe2_rho_minus)
    if cfg.data_path:
        return _estimate_from_file(cfg, probe1, probe2)
    report = RunReport("estimate-noise", cfg)
    eta = cfg.p / cfg.n
    gamma = _gamma_value(cfg, eta, cfg.snr)

    def one_seed(seed: int):
        rows = []
        for g, eps_plus in enumerate(cfg.grid):
            base = generate_gmm(GmmSpec.isotropic(
                cfg.p, cfg.n, cfg.pi1, cfg.snr, seed=derive_seed(seed, 30 + g)))
            noisy = flip_labels(base, eps_plus, cfg.eps_minus, derive_seed(seed, 60 + g))
            est = estimate_noise_rates(noisy, probe1, probe2, gamma, cfg.snr, cfg.pi1)
            rows.append((eps_plus, seed, est))
        return rows

    for rows in _pool_map(one_seed, list(cfg.seeds), cfg.threads):
        for eps_plus, seed, est in rows:
            report.add("estimator", eps_plus, seed, "eps_plus_hat", est.eps_plus, eps_plus)
            report.add("estimator", eps_plus, seed, "eps_minus_hat", est.eps_minus,
                       cfg.eps_minus)
            report.add("estimator", eps_plus, seed, "residual", est.residual)

    fig = Figure(title=f"noise-rate recovery (snr={cfg.snr})",
                 xlabel="true eps_plus", ylabel="estimated eps_plus")
    means = [report.mean_over_seeds("estimator", "eps_plus_hat", g) for g in cfg.grid]
    fig.line(cfg.grid, cfg.grid, label="diagonal", dashed=True, color="#999999")
    fig.line(cfg.grid, means, label="estimate", markers=True)
    report.figure_svg = fig.render()
    return report


def _estimate_from_file(cfg: ExperimentConfig, probe1: RhoParams,
                        probe2: RhoParams) -> RunReport:
    report = RunReport("estimate-noise", cfg)
    raw = load_features_csv(cfg.data_path, _label_col(cfg.label_column),
                            has_clean_labels=False, has_header=cfg.has_header)
    std = standardize_and_estimate(raw)  # warns: noisy-label SNR is biased
    data = std.dataset
    snr, pi1 = std.snr_estimate, std.pi1_estimate
    if snr <= 0 or not 0.0 < pi1 < 1.0:
        raise ValueError("cannot estimate SNR/class proportion from this dataset")
    gamma = _gamma_value(cfg, data.p / data.n, snr)
    est = estimate_noise_rates(data, probe1, probe2, gamma, snr, pi1)
    seed = cfg.seeds[0]
    report.add("estimator", 0.0, seed, "eps_plus_hat", est.eps_plus)
    report.add("estimator", 0.0, seed, "eps_minus_hat", est.eps_minus)
    report.add("estimator", 0.0, seed, "residual", est.residual)
    report.add("estimator", 0.0, seed, "snr_estimate", snr)
    report.add("estimator", 0.0, seed, "pi1_estimate", pi1)
    fig = Figure(title="noise-rate estimate (ingested data)",
                 xlabel="component (0 = eps_plus, 1 = eps_minus)", ylabel="estimate")
    fig.line([0, 1], [est.eps_plus, est.eps_minus], label="estimate", markers=True)
    report.figure_svg = fig.render()
    return report


# ---------------------------------------------------------------------------
# real data (or its synthetic stand-in)
# ---------------------------------------------------------------------------


def run_real_data(cfg: ExperimentConfig) -> RunReport:
    """Table-style variant comparison with noise injected on clean labels.

    With ``data_path`` set, ingests the CSV, standardizes it and splits it
    per seed; otherwise draws a synthetic stand-in of the same shape.  Uses
    the estimated SNR and class proportion, and the optimal-gamma rule when
    ``gamma = optimal``.
    """
    report = RunReport("real-data", cfg)
    data = None
    if cfg.data_path:
        raw = load_features_csv(cfg.data_path, _label_col(cfg.label_column),
                                has_clean_labels=True, has_header=cfg.has_header)
        std = standardize_and_estimate(raw)
        data = std.dataset
        snr, pi1 = std.snr_estimate, std.pi1_estimate
        if not 0.0 < pi1 < 1.0:
            raise ValueError("ingested data has a single class")
        n_total = data.n
        if cfg.n_train >= n_total:
            raise ValueError(
                f"n_train={cfg.n_train} needs held-out samples, dataset has {n_total}"
            )
    else:
        snr, pi1 = cfg.snr, cfg.pi1

    def one_seed(seed: int):
        if data is not None:
            order = np.random.Generator(
                np.random.Philox(key=derive_seed(seed, 3))
            ).permutation(data.n)
            tr, te = order[: cfg.n_train], order[cfg.n_train:]
            train = LabeledDataset(X=data.X[:, tr], y_noisy=data.y_clean[tr],
                                   y_clean=data.y_clean[tr])
            test_X, test_y = data.X[:, te], data.y_clean[te]
        else:
            train = generate_gmm(GmmSpec.isotropic(
                cfg.p, cfg.n_train, pi1, snr, seed=derive_seed(seed, 5)))
            test = generate_gmm(GmmSpec.isotropic(
                cfg.p, cfg.n_test, pi1, snr, seed=derive_seed(seed, 6)))
            test_X, test_y = test.X, test.y_clean
        noisy = flip_labels(train, cfg.eps_plus, cfg.eps_minus, derive_seed(seed, 4))
        pi1_train = noisy.class_counts[0] / noisy.n
        eta = cfg.p / noisy.n
        gamma = _gamma_value(cfg, eta, snr)
        rhos = {v: _variant_rho(v, pi1_train, cfg.eps_plus, cfg.eps_minus, cfg)
                for v in cfg.variants}
        weights = _train_variants(noisy, rhos, gamma)
        out = []
        for v, w in weights.items():
            st = _variant_theory(v, rhos[v], eta, gamma, snr, pi1_train,
                                 cfg.eps_plus, cfg.eps_minus)
            scores = w @ test_X
            orientation = 1.0 if st.m_rho >= 0 else -1.0
            acc = _oriented_accuracy(scores, test_y, orientation)
            out.append((v, seed, acc, st.accuracy, gamma))
        return out

    for rows in _pool_map(one_seed, list(cfg.seeds), cfg.threads):
        for v, seed, acc, theory_acc, gamma in rows:
            report.add(v, 0.0, seed, "accuracy", acc, theory_acc)
            report.add(v, 0.0, seed, "gamma", gamma)

    report.extra_files["table.txt"] = _accuracy_table(cfg, report)
    fig = Figure(title="accuracy by variant", xlabel="variant index", ylabel="accuracy")
    xs = list(range(len(cfg.variants)))
    fig.line(xs, [report.mean_over_seeds(v, "accuracy") for v in cfg.variants],
             label="empirical", markers=True)
    fig.line(xs, [report.theory_value(v, "accuracy") for v in cfg.variants],
             label="theory", dashed=True)
    report.figure_svg = fig.render()
    return report


def _label_col(spec: str) -> int | str:
    try:
        return int(spec)
    except ValueError:
        return spec


def _accuracy_table(cfg: ExperimentConfig, report: RunReport) -> str:
    lines = [
        f"accuracy (% mean +- std over {len(cfg.seeds)} seeds), "
        f"eps_plus={cfg.eps_plus}, eps_minus={cfg.eps_minus}"
    ]
    for v in cfg.variants:
        vals = [100.0 * r.empirical for r in report.rows
                if r.variant == v and r.metric == "accuracy"]
        lines.append(f"{v:<12s} {np.mean(vals):6.2f} +- {np.std(vals):.2f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# multiclass
# ---------------------------------------------------------------------------

_DEFAULT_EPS_3 = ((0.0, 0.3, 0.0), (0.0, 0.0, 0.4), (0.5, 0.0, 0.0))
_DEFAULT_PI_3 = (0.3, 0.3, 0.4)


def multi_spec_from_config(cfg: ExperimentConfig, seed: int = 0) -> MultiGmmSpec:
    """Collinear-means spec: mean of class j is ``means[j] * e1``."""
    means = np.zeros((cfg.k, cfg.p))
    means[:, 0] = cfg.means
    eps_rows = cfg.eps_rows or (_DEFAULT_EPS_3 if cfg.k == 3 else None)
    if eps_rows is None:
        raise ConfigError(f"eps_row_1..eps_row_{cfg.k} required for k={cfg.k}")
    pis = cfg.pis or (_DEFAULT_PI_3 if cfg.k == 3 else None)
    if pis is None:
        raise ConfigError(f"pis required for k={cfg.k}")
    return MultiGmmSpec(k=cfg.k, p=cfg.p, n=cfg.n, means=means,
                        pi=np.asarray(pis), eps=np.asarray(eps_rows), seed=seed)


def run_multiclass(cfg: ExperimentConfig) -> RunReport:
    """Monte Carlo (alpha, beta) search and the best/worst mixing path.

    Multiclass cells are empirical-only (the binary theory does not apply);
    their theory column is left empty.
    """
    if cfg.gamma == "optimal":
        raise ConfigError("multiclass experiment needs a numeric gamma")
    report = RunReport("multiclass", cfg)
    spec = multi_spec_from_config(cfg)
    result = search_alpha_beta(
        spec,
        grid_size=cfg.grid_size,
        eval_seeds=list(cfg.seeds),
        gamma=float(cfg.gamma),
        box=(cfg.box_low, cfg.box_high),
        n_test=cfg.n_test,
        tau_points=cfg.tau_points,
        search_seed=cfg.search_seed,
    )
    for i, tau in enumerate(result.tau_grid):
        for j, seed in enumerate(cfg.seeds):
            report.add("multi-lpc", float(tau), seed, "accuracy",
                       float(result.tau_accuracy[i, j]))
    report.add("naive", 1.0, cfg.seeds[0], "accuracy", result.naive_accuracy)
    report.add("best", 1.0, cfg.seeds[0], "accuracy", result.best_accuracy)
    report.add("worst", 0.0, cfg.seeds[0], "accuracy", result.worst_accuracy)

    lines = ["tau,mean,std," + ",".join(f"seed_{s}" for s in cfg.seeds)]
    for row in result.tau_table():
        lines.append(
            f"{row['tau']!r},{row['mean']!r},{row['std']!r},"
            + ",".join(repr(v) for v in row["per_seed"])
        )
    report.extra_files["tau_accuracy.csv"] = "\n".join(lines) + "\n"

    fig = Figure(title=f"multiclass (k={cfg.k}, p={cfg.p}, n={cfg.n})",
                 xlabel="tau (worst -> best)", ylabel="accuracy")
    means = result.tau_accuracy.mean(axis=1)
    fig.line(result.tau_grid, means, label="multi-lpc path", markers=True)
    fig.line([0.0, 1.0], [result.naive_accuracy] * 2, label="naive", dashed=True)
    report.figure_svg = fig.render()
    return report


# ---------------------------------------------------------------------------
# theory printout and dispatch
# ---------------------------------------------------------------------------


def theory_csv(cfg: ExperimentConfig) -> str:
    """TheoryStats of every variant at the configured model, as CSV text."""
    eta = cfg.p / cfg.n
    gamma = _gamma_value(cfg, eta, cfg.snr)
    cols = ("variant", "eta", "gamma", "delta", "h", "m_rho", "nu_rho",
            "variance", "kappa", "m_oracle", "nu_oracle", "accuracy", "risk")
    lines = [",".join(cols)]
    for v in cfg.variants:
        rho = _variant_rho(v, cfg.pi1, cfg.eps_plus, cfg.eps_minus, cfg)
        st = _variant_theory(v, rho, eta, gamma, cfg.snr, cfg.pi1,
                             cfg.eps_plus, cfg.eps_minus)
        vals = (v, eta, gamma, st.delta, st.h, st.m_rho, st.nu_rho, st.variance,
                st.kappa, st.m_oracle, st.nu_oracle, st.accuracy, st.risk)
        lines.append(",".join(v if isinstance(v, str) else repr(v) for v in vals))
    return "\n".join(lines) + "\n"


_RUNNERS = {
    "histogram": run_histogram,
    "sweep": run_sweep,
    "estimate-noise": run_noise_estimation,
    "multiclass": run_multiclass,
    "real-data": run_real_data,
}


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    if cfg.experiment == "theory":
        raise ConfigError("the theory experiment prints to stdout; use theory_csv")
    return _RUNNERS[cfg.experiment](cfg)
