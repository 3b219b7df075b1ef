"""Spectral checks on the ensemble: the Perron pair, Q-conjugation, concentration and Gaussian norms.

Every inequality goes through ``check_claim`` under a dotted claim name, so a
run either raises on the first failure or collects all of them in a ledger.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from witness_lab.ensemble import (
    EthParams,
    build_observables,
    expected_BB,
    hermitian_gaussian,
    pair_restriction,
    sample_B_stack,
    second_moment,
)
from witness_lab.hamiltonian import EnergyWindow, Hamiltonian, non_clustering_report, window_projector
from witness_lab.linalg import eigh, hermitize, operator_norm
from witness_lab.protocol import build_O_succ, pair_state
from witness_lab.qpe import QpeConfig, weights_for
from witness_lab.rng import stream_rng
from witness_lab.trials import map_trials
from witness_lab.types import (
    ClaimLedger,
    ConcentrationCurve,
    ConcentrationPoint,
    ContractViolation,
    PerronReport,
    PreconditionError,
    check_claim,
)

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-9
CLOSED_FORM_TOL = 1e-10
PAIR_BLOCK_TOL = 1e-12
PAIR_BLOCK_MAX_D = 32
MIN_CONCENTRATION_TRIALS = 20
RATIO_BAND = (1.4, 2.8)
GAUSS_NORM_FACTOR = 10.0

CONCENTRATION_STREAM = 20
GAUSS_STREAM = 30


# ---------------------------------------------------------------------------
# Perron pair of f^2 / D
# ---------------------------------------------------------------------------
def perron_check(
    params: EthParams,
    *,
    seed: int | None = None,
    ledger: ClaimLedger | None = None,
    verify_pair_block: bool = True,
) -> PerronReport:
    """Leading eigenpair of M_f = f^2/D with the gap and ratio bounds checked.

    Checks f^2 <= lambda <= 1, lambda_2 <= (1 - f^4) lambda and
    1 <= x_max/x_min <= 1/f^2. With ``verify_pair_block`` the restriction of
    E B (x) conj(B) to the pair subspace is compared with M_f on a leading
    sub-instance of at most 32 states.
    """
    if not params.within_transition_bounds:
        raise PreconditionError("perron_check", f"f_matrix has entries below f = {params.f}")
    f = params.f
    Mf = pair_restriction(params)
    dec = eigh(Mf)
    lam = float(dec.eigenvalues[-1])
    second = float(dec.eigenvalues[-2]) if params.D > 1 else 0.0
    x = np.real(dec.eigenvectors[:, -1])
    x = x if x.sum() >= 0 else -x

    check_claim("eq_gap.positivity", bool(np.all(x > 0)), float(x.min()), 0.0, seed=seed, ledger=ledger)
    check_claim("eq_gap.lower_bound", lam >= f**2 - BOUNDARY_TOL, lam, f**2, seed=seed, ledger=ledger)
    check_claim("eq_gap.upper_bound", lam <= 1 + BOUNDARY_TOL, lam, 1.0, seed=seed, ledger=ledger)
    gap_bound = (1 - f**4) * lam
    check_claim(
        "eq_gap.gap_bound",
        second <= gap_bound + BOUNDARY_TOL,
        second,
        gap_bound,
        seed=seed,
        detail=f"lambda={lam!r}",
        ledger=ledger,
    )
    ratio = float(x.max() / x.min()) if x.min() > 0 else math.inf
    check_claim(
        "eq_gap.ratio_bound",
        1 - BOUNDARY_TOL <= ratio <= 1 / f**2 + BOUNDARY_TOL,
        ratio,
        1 / f**2,
        seed=seed,
        ledger=ledger,
    )
    if verify_pair_block:
        _check_pair_block(params, seed=seed, ledger=ledger)
    logger.debug("perron_check: D=%d lambda=%.6f second=%.6f ratio=%.4f", params.D, lam, second, ratio)
    return PerronReport(lam, x, second, ratio, f, params.D)


def _check_pair_block(params: EthParams, *, seed: int | None, ledger: ClaimLedger | None) -> None:
    d = min(params.D, PAIR_BLOCK_MAX_D)
    sub = EthParams(d, params.m, params.f, params.f_matrix[:d, :d], params.mu[:, :d])
    full = expected_BB(sub)
    pairs = np.arange(d) * (d + 1)
    block = full[np.ix_(pairs, pairs)]
    diff = float(np.max(np.abs(block - pair_restriction(sub))))
    outside = full.copy()
    outside[np.ix_(pairs, pairs)] = 0.0
    leak = float(np.max(np.abs(outside)))
    check_claim(
        "eq_gap.pair_block",
        max(diff, leak) <= PAIR_BLOCK_TOL,
        max(diff, leak),
        PAIR_BLOCK_TOL,
        seed=seed,
        detail=f"sub-instance D={d}",
        ledger=ledger,
    )


# ---------------------------------------------------------------------------
# Q-conjugation overlap
# ---------------------------------------------------------------------------
def c_prime_margin(window: EnergyWindow, config: QpeConfig) -> float:
    """Margin for C': the inner count is taken over width omega - 2/sqrt(L)."""
    return window.delta - config.omega + 2 / math.sqrt(config.L)


def q_conjugation_overlap(
    H: Hamiltonian,
    window: EnergyWindow,
    params: EthParams,
    config: QpeConfig,
    *,
    seed: int | None = None,
    ledger: ClaimLedger | None = None,
) -> float:
    """<Psi| Q (x) Q |Psi> for the Perron witness Psi = sum_a x_a |a, a>.

    Requires C' >= 1 - f^25 on the instance. Computed on the doubled space
    and compared with sum_a x_a^2 q_a^2; the result must be at least
    1 - 1/sqrt(L) - 6 f^21.
    """
    projector = window_projector(H, window)
    if projector.D != params.D:
        raise ContractViolation(
            "q_conjugation_overlap", f"window holds {projector.D} states, ensemble D={params.D}"
        )
    _, c_prime = non_clustering_report(H, window, c_prime_margin(window, config))
    required = 1 - params.f**25
    if c_prime < required:
        raise PreconditionError(
            "q_conjugation_overlap", f"C' = {c_prime:.6g} is below 1 - f^25 = {required:.6g}"
        )
    report = perron_check(params, seed=seed, ledger=ledger, verify_pair_block=False)
    x = report.vector
    q = weights_for(H.eigenvalues[list(projector.members)], config)

    psi = pair_state(x.astype(np.complex128))
    qq = np.kron(q, q)
    overlap = float(np.vdot(psi, qq * psi).real)
    closed_form = float(np.sum(x**2 * q**2))
    check_claim(
        "qdoesntmatter.closed_form",
        abs(overlap - closed_form) <= CLOSED_FORM_TOL,
        abs(overlap - closed_form),
        CLOSED_FORM_TOL,
        seed=seed,
        ledger=ledger,
    )
    bound = 1 - 1 / math.sqrt(config.L) - 6 * params.f**21
    check_claim(
        "qdoesntmatter.overlap_bound",
        overlap >= bound - BOUNDARY_TOL,
        overlap,
        bound,
        seed=seed,
        detail=f"L={config.L} D={params.D}",
        ledger=ledger,
    )
    return overlap


# ---------------------------------------------------------------------------
# Concentration of the sampled second moment
# ---------------------------------------------------------------------------
def moment_deviation(params: EthParams, m: int, seed: int, trial: int) -> float:
    """|| E_i B_i (x) conj(B_i) - E_G B (x) conj(B) || for m samples from stream (seed, 20, m, trial, i)."""
    blocks = sample_B_stack(params, seed, m, CONCENTRATION_STREAM, m, trial)
    return operator_norm(hermitize(second_moment(blocks) - expected_BB(params)))


def concentration_experiment(
    params: EthParams,
    m_values: Sequence[int],
    trials: int,
    seed: int,
    *,
    workers: int = 1,
    ledger: ClaimLedger | None = None,
) -> ConcentrationCurve:
    """Median and quartiles of the second-moment deviation per m.

    Medians must not increase with m, and for every m whose 4m is also on
    the grid, median(m)/median(4m) must lie in [1.4, 2.8].
    """
    if trials < MIN_CONCENTRATION_TRIALS:
        raise ContractViolation(
            "concentration_experiment", f"need at least {MIN_CONCENTRATION_TRIALS} trials, got {trials}"
        )
    ms = sorted(int(m) for m in m_values)
    tasks = [(m, t) for m in ms for t in range(trials)]
    deviations = map_trials(lambda task: moment_deviation(params, task[0], seed, task[1]), tasks, workers)
    by_m = np.asarray(deviations).reshape(len(ms), trials)

    points = []
    for m, row in zip(ms, by_m):
        q25, median, q75 = np.percentile(row, [25, 50, 75])
        points.append(ConcentrationPoint(m, float(median), float(q25), float(q75)))
        logger.debug("concentration: m=%d median=%.4g", m, median)
    curve = ConcentrationCurve(tuple(points), trials)

    for before, after in zip(curve.points, curve.points[1:]):
        check_claim(
            "tensorprodconcen.monotone",
            after.median <= before.median,
            after.median,
            before.median,
            seed=seed,
            detail=f"m={before.m} -> m={after.m}",
            ledger=ledger,
        )
    low, high = RATIO_BAND
    for m, ratio in curve.ratios(4):
        check_claim(
            "tensorprodconcen.ratio_band",
            low <= ratio <= high,
            ratio,
            low if ratio < low else high,
            seed=seed,
            detail=f"median(m={m}) / median(m={4 * m})",
            ledger=ledger,
        )
    return curve


# ---------------------------------------------------------------------------
# Operator norm of Gaussian matrices
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GaussNormRow:
    """Pass count and normalised norms ||P||/sqrt(D) at one dimension."""

    D: int
    samples: int
    passed: int
    mean_ratio: float
    max_ratio: float


def gaussian_norm_experiment(
    D_values: Sequence[int],
    samples: int,
    seed: int,
    *,
    variance: float = 1.0,
    workers: int = 1,
    ledger: ClaimLedger | None = None,
) -> tuple[GaussNormRow, ...]:
    """Count samples with ||P|| <= 10 sqrt(D) for Hermitian Gaussian P of the given entry variance."""
    if samples < 1:
        raise ContractViolation("gaussian_norm_experiment", f"samples must be positive, got {samples}")
    if variance < 0:
        raise ContractViolation("gaussian_norm_experiment", f"variance must be non-negative, got {variance}")
    rows = []
    for D in D_values:

        def norm_of(s: int, D: int = D) -> float:
            P = math.sqrt(variance) * hermitian_gaussian(D, stream_rng(seed, GAUSS_STREAM, D, s))
            return operator_norm(P)

        norms = np.asarray(map_trials(norm_of, range(samples), workers))
        bound = GAUSS_NORM_FACTOR * math.sqrt(D)
        for s, value in enumerate(norms):
            check_claim(
                "iidgauss.norm_bound",
                value <= bound,
                value,
                bound,
                seed=seed,
                detail=f"D={D} sample={s}",
                ledger=ledger,
            )
        ratios = norms / math.sqrt(D)
        rows.append(
            GaussNormRow(
                D=int(D),
                samples=samples,
                passed=int(np.count_nonzero(norms <= bound)),
                mean_ratio=float(ratios.mean()),
                max_ratio=float(ratios.max()),
            )
        )
    return tuple(rows)


# ---------------------------------------------------------------------------
# Effective operator deviation
# ---------------------------------------------------------------------------
def effectiveop_deviation(
    H: Hamiltonian,
    window: EnergyWindow,
    params: EthParams,
    epsilon: float,
    config: QpeConfig,
    seed: int,
) -> float:
    """|| O_succ - (Q (x) Q) M (Q (x) Q) || for one direct-mode observable set."""
    observables = build_observables(params, H, window, "direct", seed)
    op = build_O_succ(H, window, observables, epsilon, config, params)
    return operator_norm(hermitize(op.O_succ - op.sandwiched))


def effectiveop_bound(epsilon: float, f: float, m: int, c: float) -> float:
    """2 e^2 f^7 + c e^2 m^(-1/3)."""
    return 2 * epsilon**2 * f**7 + c * epsilon**2 * m ** (-1 / 3)


def fitted_constant(deviations: dict[int, float], epsilon: float, f: float) -> float:
    """Smallest c for which every (m, deviation) pair meets ``effectiveop_bound``."""
    if epsilon == 0:
        return 0.0
    excess = [
        max(dev - 2 * epsilon**2 * f**7, 0.0) * m ** (1 / 3) / epsilon**2 for m, dev in deviations.items()
    ]
    return float(max(excess, default=0.0))
