"""The experiment registry: one runner per experiment name, each returning an ExperimentResult.

Runners fan instances out with ``map_trials``. Every instance draws from
streams keyed by its own derived seed, and results are merged in instance
order, so a report never depends on the worker count.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np

from witness_lab.config import ExperimentConfig
from witness_lab.ensemble import EthParams, build_observables, circuit_params, make_params
from witness_lab.hamiltonian import (
    EnergyWindow,
    Hamiltonian,
    equispaced_spectrum,
    from_spectrum,
    random_local,
    window_projector,
)
from witness_lab.linalg import Statevector, operator_norm, top_eigenpairs
from witness_lab.loaders import load_f_matrix, load_spectrum
from witness_lab.oracles import (
    SubspaceOracle,
    composition_defect,
    direct_sum,
    haar_verifier_instance,
    near_ideal_witness,
    orthogonal_extension,
    overlap_bound_check,
    qxc_decide,
    qxc_dimension_count,
    random_subspace,
    simple_verifier,
    simple_verifier_instance,
    tightest_epsilon,
)
from witness_lab.protocol import (
    ProtocolConfig,
    build_M,
    build_O_succ,
    evaluate,
    expected_acceptance,
    no_case_norm,
    pair_state,
    sandwich,
    unique_witness,
)
from witness_lab.qpe import (
    QpeConfig,
    QWeights,
    almost_zero_margin,
    build_pi_sp,
    build_u_qpe,
    on_grid_spectrum,
    q_lemma_violations,
    q_weights,
    qmass_check,
    qpe_identity_residual,
    to_unit_interval,
    weights_for,
)
from witness_lab.rng import derive_seed, stream_rng
from witness_lab.spectral import (
    c_prime_margin,
    concentration_experiment,
    effectiveop_bound,
    effectiveop_deviation,
    fitted_constant,
    gaussian_norm_experiment,
    perron_check,
    q_conjugation_overlap,
)
from witness_lab.trials import map_trials
from witness_lab.types import ClaimLedger, ContractViolation, PreconditionError, check_claim

logger = logging.getLogger(__name__)

TWO_ROUTE_TOL = 1e-8
IDENTITY_TOL = 1e-9
OPERATOR_TOL = 1e-10
WITNESS_TOL = 1e-6
TAYLOR_FACTOR = 20.0
EFFECTIVEOP_SPREAD = 0.5
OVERLAP_LEAK_FACTOR = 1.2


@dataclass
class ExperimentResult:
    """What one experiment produced: a summary, optional CSV rows and the claim ledger."""

    name: str
    summary: dict[str, Any]
    ledger: ClaimLedger
    columns: tuple[str, ...] = ()
    rows: list[dict[str, Any]] = field(default_factory=list)
    rejected: int = 0
    report_name: str = ""
    description: str = ""

    def __post_init__(self) -> None:
        if not self.report_name:
            self.report_name = self.name

    @property
    def exit_code(self) -> int:
        return 0 if self.ledger.passed else 2

    def to_report(self, config: ExperimentConfig) -> dict[str, Any]:
        return {
            "experiment": self.name,
            "seed": config.seed,
            "config": config.to_dict(),
            "summary": self.summary,
            "checked": self.ledger.checked,
            "rejected": self.rejected,
            "passed": self.ledger.passed,
            "violations": [v.to_dict() for v in self.ledger.violations],
        }


@dataclass
class InstanceOutcome:
    rows: list[dict[str, Any]] = field(default_factory=list)
    ledger: ClaimLedger = field(default_factory=ClaimLedger)
    rejected: int = 0
    extra: dict[str, Any] = field(default_factory=dict)


Runner = Callable[[ExperimentConfig], ExperimentResult]
RUNNERS: dict[str, Runner] = {}


def experiment(name: str) -> Callable[[Runner], Runner]:
    def register(fn: Runner) -> Runner:
        RUNNERS[name] = fn
        return fn

    return register


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    try:
        runner = RUNNERS[config.experiment]
    except KeyError:
        raise ContractViolation("run_experiment", f"no runner for {config.experiment!r}") from None
    logger.info("running %s (seed %d, workers %d)", config.experiment, config.seed, config.workers)
    result = runner(config)
    logger.info(
        "%s: %d checks, %d violations, %d rejected",
        config.experiment,
        result.ledger.checked,
        len(result.ledger.violations),
        result.rejected,
    )
    return result


def _run_instances(
    config: ExperimentConfig, count: int, fn: Callable[[int], InstanceOutcome]
) -> InstanceOutcome:
    """Run fn over instance indices and merge the outcomes in index order."""
    merged = InstanceOutcome()
    for outcome in map_trials(fn, range(count), config.workers):
        merged.rows.extend(outcome.rows)
        merged.ledger.violations.extend(outcome.ledger.violations)
        merged.ledger.checked += outcome.ledger.checked
        merged.rejected += outcome.rejected
    return merged


# ---------------------------------------------------------------------------
# Instance builders
# ---------------------------------------------------------------------------
def build_spectrum(config: ExperimentConfig, seed: int) -> np.ndarray:
    spec = config.spectrum
    if spec.kind == "uniform":
        return np.sort(stream_rng(seed, 50).uniform(spec.low, spec.high, spec.count))
    if spec.kind == "equispaced":
        return equispaced_spectrum(spec.count, spec.low, spec.high)
    if spec.kind == "file":
        return load_spectrum(spec.file, config.base_dir)
    raise ContractViolation("build_spectrum", f"spectrum kind {spec.kind!r} has no fixed eigenvalue list")


def build_hamiltonian(config: ExperimentConfig, seed: int) -> Hamiltonian:
    """The instance Hamiltonian, with its spectrum inside [0, 1).

    Random 2-local models are rescaled into [0.1, 0.9]; the window block is
    read in those rescaled units.
    """
    spec = config.spectrum
    if spec.kind == "random_local":
        H, _, _ = to_unit_interval(random_local(spec.qubits, spec.terms, seed), padding=0.1)
        return H
    return from_spectrum(build_spectrum(config, seed), spec.basis, seed)


def build_window(config: ExperimentConfig) -> EnergyWindow:
    w = config.window
    return EnergyWindow(w.e0, w.delta, w.delta_rmt)


def build_params(
    config: ExperimentConfig, seed: int, *, m: int | None = None, D: int | None = None
) -> EthParams:
    e = config.ensemble
    D = e.D if D is None else D
    f_matrix = load_f_matrix(e.f_matrix_file, D, config.base_dir) if e.f_mode == "explicit" else None
    return make_params(
        D,
        e.m if m is None else m,
        e.f,
        f_mode=e.f_mode,
        mu_mode=e.mu_mode,
        mu=e.mu,
        f_matrix=f_matrix,
        seed=seed,
    )


def property_band(config: QpeConfig) -> float:
    """Width of the band that counts toward C': omega - 2/sqrt(L)."""
    return config.omega - 2 / math.sqrt(config.L)


def random_state(dim: int, seed: int) -> Statevector:
    rng = stream_rng(seed, 60)
    v = rng.standard_normal(dim * dim) + 1j * rng.standard_normal(dim * dim)
    v /= np.linalg.norm(v)
    return Statevector((("S1", dim), ("S2", dim)), v)


def checked_q_weights(H: Hamiltonian, qc: QpeConfig, seed: int, ledger: ClaimLedger) -> QWeights | None:
    """Q(H) with its q <= 1 check recorded in ``ledger``; None when the check failed.

    The routes recompute Q without a ledger and raise on the same weights, so
    a runner stops the instance on None.
    """
    before = len(ledger.violations)
    weights = q_weights(H, qc, ledger=ledger, seed=seed)
    return None if len(ledger.violations) > before else weights


# ---------------------------------------------------------------------------
# Q operator
# ---------------------------------------------------------------------------
@experiment("qprops")
def run_qprops(config: ExperimentConfig) -> ExperimentResult:
    """Almost Identity, Almost Zero and Qmass on random windows over synthetic spectra."""
    L_values = sorted(config.qpe.L_values)
    step = math.gcd(*L_values)

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        H = from_spectrum(build_spectrum(config, s), "identity")
        rng = stream_rng(s, 51)
        e0 = round(rng.uniform(0.3, 0.7) * step) / step
        window = EnergyWindow(e0, float(rng.uniform(0.2, 0.3)))
        for L in L_values:
            qc = QpeConfig.for_window(window, L)
            q_lemma_violations(H.eigenvalues, qc, out.ledger, seed=s)
            checked = checked_q_weights(H, qc, s, out.ledger)
            if checked is None:
                continue
            weights = checked.weights
            measured, bound = qmass_check(H, window, qc)
            check_claim(
                "qmass.bound",
                measured <= bound + OPERATOR_TOL,
                measured,
                bound,
                seed=s,
                detail=f"L={L}",
                ledger=out.ledger,
            )
            out.rows.append(
                {
                    "instance": t,
                    "seed": s,
                    "L": L,
                    "e0": e0,
                    "delta": window.delta,
                    "D": window_projector(H, window).D,
                    "q_max": float(weights.max()),
                    "qmass": measured,
                    "qmass_bound": bound,
                }
            )
        return out

    merged = _run_instances(config, config.trials.count, instance)
    return ExperimentResult(
        "qprops",
        {"instances": config.trials.count, "L_values": L_values},
        merged.ledger,
        ("instance", "seed", "L", "e0", "delta", "D", "q_max", "qmass", "qmass_bound"),
        merged.rows,
        description="Q(H) weights and Qmass per instance and resolution",
    )


@experiment("qpe")
def run_qpe(config: ExperimentConfig) -> ExperimentResult:
    """Pi_P Pi_SP Pi_P = Q(H) (x) Pi_P, with U_QPE unitary and Pi_SP idempotent."""
    window = build_window(config)

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        H = build_hamiltonian(config, s)
        for L in sorted(config.qpe.L_values):
            qc = QpeConfig.for_window(window, L)
            if checked_q_weights(H, qc, s, out.ledger) is None:
                continue
            residual = qpe_identity_residual(H, qc)
            U = build_u_qpe(H, L)
            unitarity = float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))
            P = build_pi_sp(H, qc)
            idempotence = float(np.max(np.abs(P @ P - P)))
            check = partial(check_claim, seed=s, detail=f"L={L}", ledger=out.ledger)
            check("q_def.identity", residual <= IDENTITY_TOL, residual, IDENTITY_TOL)
            check("q_def.unitarity", unitarity <= OPERATOR_TOL, unitarity, OPERATOR_TOL)
            check("q_def.idempotence", idempotence <= OPERATOR_TOL, idempotence, OPERATOR_TOL)
            out.rows.append(
                {
                    "instance": t,
                    "seed": s,
                    "L": L,
                    "residual": residual,
                    "unitarity": unitarity,
                    "idempotence": idempotence,
                }
            )
        return out

    merged = _run_instances(config, config.trials.count, instance)
    worst = max((r["residual"] for r in merged.rows), default=0.0)
    return ExperimentResult(
        "qpe",
        {"instances": config.trials.count, "max_residual": worst},
        merged.ledger,
        ("instance", "seed", "L", "residual", "unitarity", "idempotence"),
        merged.rows,
        description="phase-estimation identity residuals",
    )


# ---------------------------------------------------------------------------
# Perron pair
# ---------------------------------------------------------------------------
@experiment("gap")
def run_gap(config: ExperimentConfig) -> ExperimentResult:
    """Perron bounds on random amplitude matrices, plus the exact rank-one case."""

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        report = perron_check(build_params(config, s), seed=s, ledger=out.ledger, verify_pair_block=t == 0)
        out.rows.append(
            {
                "instance": t,
                "seed": s,
                "lambda": report.lam,
                "second": report.second,
                "ratio": report.ratio,
                "gap": report.lam - report.second,
            }
        )
        return out

    merged = _run_instances(config, config.trials.count, instance)
    ledger = merged.ledger

    e = config.ensemble
    uniform = make_params(e.D, 1, e.f)
    rank_one = perron_check(uniform, seed=config.seed, ledger=ledger, verify_pair_block=False)
    f2 = e.f**2
    check = partial(check_claim, seed=config.seed, ledger=ledger)
    check("eq_gap.rank_one_lambda", abs(rank_one.lam - f2) <= OPERATOR_TOL, rank_one.lam, f2)
    check("eq_gap.rank_one_second", abs(rank_one.second) <= OPERATOR_TOL, rank_one.second, 0.0)
    check("eq_gap.rank_one_ratio", abs(rank_one.ratio - 1) <= IDENTITY_TOL, rank_one.ratio, 1.0)

    lams = [r["lambda"] for r in merged.rows]
    ratios = [r["ratio"] for r in merged.rows]
    return ExperimentResult(
        "gap",
        {
            "instances": config.trials.count,
            "D": e.D,
            "f": e.f,
            "lambda_min": min(lams, default=math.nan),
            "lambda_max": max(lams, default=math.nan),
            "ratio_max": max(ratios, default=math.nan),
            "rank_one": rank_one.to_dict(),
        },
        ledger,
        ("instance", "seed", "lambda", "second", "ratio", "gap"),
        merged.rows,
        report_name="perron",
        description="leading eigenpair of f^2/D per random amplitude matrix",
    )


# ---------------------------------------------------------------------------
# Protocol
# ---------------------------------------------------------------------------
@experiment("protocol")
def run_protocol(config: ExperimentConfig) -> ExperimentResult:
    """Circuit route against operator route, the Taylor residual and the first projection round."""
    window = build_window(config)
    p = config.protocol

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        H = build_hamiltonian(config, s)
        qc = QpeConfig.for_window(window, config.qpe.L)
        if window_projector(H, window).D == 0:
            out.rejected = 1
            return out
        observables = build_observables(circuit_params(p.m), H, window, "circuit", s)
        psi = random_state(H.dim, s)
        Q = checked_q_weights(H, qc, s, out.ledger)
        if Q is None:
            return out
        qq = np.kron(Q.matrix, Q.matrix)
        for eps in p.epsilon_values:
            pc = ProtocolConfig(eps, "circuit", qc, p.m)
            report = evaluate(psi, H, window, observables, pc)
            diff = abs(report.p_circuit - report.p_operator)
            check_claim(
                "protocol.two_route",
                diff <= TWO_ROUTE_TOL,
                diff,
                TWO_ROUTE_TOL,
                seed=s,
                detail=f"eps={eps}",
                ledger=out.ledger,
            )
            taylor_bound = TAYLOR_FACTOR * eps**3
            check_claim(
                "protocol.taylor_residual",
                report.taylor_residual <= taylor_bound + OPERATOR_TOL,
                report.taylor_residual,
                taylor_bound,
                seed=s,
                detail=f"eps={eps}",
                ledger=out.ledger,
            )
            projected = qq @ psi.amplitudes
            expected = float(np.vdot(projected, projected).real)
            drift = abs(report.first_round_norm - expected)
            check_claim(
                "protocol.first_round", drift <= OPERATOR_TOL, drift, OPERATOR_TOL, seed=s, ledger=out.ledger
            )
            check_claim(
                "protocol.post_selection",
                report.p_circuit <= report.first_round_norm + OPERATOR_TOL,
                report.p_circuit,
                report.first_round_norm,
                seed=s,
                detail=f"eps={eps}",
                ledger=out.ledger,
            )
            out.rows.append(
                {
                    "instance": t,
                    "seed": s,
                    "epsilon": eps,
                    "p_circuit": report.p_circuit,
                    "p_operator": report.p_operator,
                    "p_osucc": report.p_osucc,
                    "p_osucc_amplitude": report.p_osucc_amplitude,
                    "lambda_top": report.lambda_top,
                    "gap": report.gap,
                    "overlap_top": report.overlap_top,
                    "taylor_residual": report.taylor_residual,
                    "first_round_norm": report.first_round_norm,
                    "report": report.to_dict(),
                }
            )
        return out

    merged = _run_instances(config, config.trials.count, instance)
    worst = max((abs(r["p_circuit"] - r["p_operator"]) for r in merged.rows), default=0.0)
    return ExperimentResult(
        "protocol",
        {
            "instances": config.trials.count,
            "L": config.qpe.L,
            "m": p.m,
            "max_route_difference": worst,
            "reports": [{"instance": r["instance"], "seed": r["seed"], **r["report"]} for r in merged.rows],
        },
        merged.ledger,
        (
            "instance",
            "seed",
            "epsilon",
            "p_circuit",
            "p_operator",
            "p_osucc",
            "p_osucc_amplitude",
            "lambda_top",
            "gap",
            "overlap_top",
            "taylor_residual",
            "first_round_norm",
        ),
        merged.rows,
        rejected=merged.rejected,
        description="acceptance probability by circuit and operator route",
    )


@experiment("effectiveop")
def run_effectiveop(config: ExperimentConfig) -> ExperimentResult:
    """|| O_succ - (Q (x) Q) M (Q (x) Q) || against m, with a fitted m^(-1/3) constant."""
    window = build_window(config)
    qc = QpeConfig.for_window(window, config.qpe.L)
    e = config.ensemble
    eps = config.protocol.epsilon
    m_values = sorted(config.protocol.m_values)
    H = from_spectrum(on_grid_spectrum(qc, e.D, property_band(qc)))

    def instance(t: int) -> InstanceOutcome:
        s = derive_seed(config.seed, t)
        params = build_params(config, s, m=m_values[-1])
        deviations = {m: effectiveop_deviation(H, window, params.with_m(m), eps, qc, s) for m in m_values}
        return InstanceOutcome(extra={"seed": s, "deviations": deviations})

    outcomes = map_trials(instance, range(config.trials.count), config.workers)
    ledger = ClaimLedger()
    per_seed_c = [fitted_constant(o.extra["deviations"], eps, e.f) for o in outcomes]
    c_median = float(np.median(per_seed_c))
    c_fit = float(max(per_seed_c))
    for o, c in zip(outcomes, per_seed_c):
        low, high = (1 - EFFECTIVEOP_SPREAD) * c_median, (1 + EFFECTIVEOP_SPREAD) * c_median
        check_claim(
            "effectiveop.fit_stability",
            low <= c <= high,
            c,
            low if c < low else high,
            seed=o.extra["seed"],
            ledger=ledger,
        )

    rows = []
    for m in m_values:
        devs = np.array([o.extra["deviations"][m] for o in outcomes])
        q25, median, q75 = np.percentile(devs, [25, 50, 75])
        rows.append(
            {
                "m": m,
                "median": float(median),
                "q25": float(q25),
                "q75": float(q75),
                "bound_at_fit": effectiveop_bound(eps, e.f, m, c_fit),
            }
        )
    for before, after in zip(rows, rows[1:]):
        check_claim(
            "effectiveop.monotone",
            after["median"] < before["median"],
            after["median"],
            before["median"],
            seed=config.seed,
            detail=f"m={before['m']} -> m={after['m']}",
            ledger=ledger,
        )
    return ExperimentResult(
        "effectiveop",
        {
            "D": e.D,
            "epsilon": eps,
            "f": e.f,
            "c_fit": c_fit,
            "c_median": c_median,
            "per_seed_c": per_seed_c,
        },
        ledger,
        ("m", "median", "q25", "q75", "bound_at_fit"),
        rows,
        description="deviation of the sampled success operator from its effective form",
    )


@experiment("qdoesntmatter")
def run_qdoesntmatter(config: ExperimentConfig) -> ExperimentResult:
    """<Psi| Q (x) Q |Psi> on fully on-grid and on equispaced off-grid spectra."""
    window = build_window(config)
    qc = QpeConfig.for_window(window, config.qpe.L)
    D = config.ensemble.D
    band = property_band(qc)
    on_grid = from_spectrum(on_grid_spectrum(qc, D, band))
    # equispaced over 90% of the band, shifted off the grid
    half = 0.45 * band
    offset = 0.37 / qc.L
    center = (qc.inner_lower + qc.inner_upper) / 2
    off_grid = from_spectrum(equispaced_spectrum(D, center - half, center + half) + offset)

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        params = build_params(config, s, m=1)
        bound = 1 - 1 / math.sqrt(qc.L) - 6 * params.f**21
        for case, H in (("on_grid", on_grid), ("equispaced", off_grid)):
            try:
                overlap = q_conjugation_overlap(H, window, params, qc, seed=s, ledger=out.ledger)
            except PreconditionError:
                out.rejected += 1
                continue
            if case == "on_grid":
                check_claim(
                    "qdoesntmatter.on_grid",
                    abs(overlap - 1) <= OPERATOR_TOL,
                    overlap,
                    1.0,
                    seed=s,
                    ledger=out.ledger,
                )
            out.rows.append({"instance": t, "seed": s, "case": case, "overlap": overlap, "bound": bound})
        return out

    merged = _run_instances(config, config.trials.count, instance)
    return ExperimentResult(
        "qdoesntmatter",
        {
            "instances": config.trials.count,
            "L": qc.L,
            "D": D,
            "c_prime_margin": c_prime_margin(window, qc),
            "min_overlap": min((r["overlap"] for r in merged.rows), default=math.nan),
        },
        merged.ledger,
        ("instance", "seed", "case", "overlap", "bound"),
        merged.rows,
        rejected=merged.rejected,
        description="Q-conjugated overlap of the Perron witness",
    )


@experiment("witness")
def run_witness(config: ExperimentConfig) -> ExperimentResult:
    """Gap, top eigenvalue and acceptance of the unique witness of (Q (x) Q) M (Q (x) Q)."""
    window = build_window(config)
    qc = QpeConfig.for_window(window, config.qpe.L)
    e = config.ensemble
    eps = config.protocol.epsilon
    H = from_spectrum(on_grid_spectrum(qc, e.D, property_band(qc)))
    q = weights_for(H.eigenvalues[list(window_projector(H, window).members)], qc)

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        params = build_params(config, s)
        S = sandwich(build_M(params, eps), q)
        result = unique_witness(S)
        check = partial(check_claim, seed=s, ledger=out.ledger)
        check("maintechnical.gap", not result.degenerate and result.gap > 0, result.gap, 0.0)
        floor = 1 - eps**2
        check("maintechnical.lambda_top", result.lambda_top >= floor - OPERATOR_TOL, result.lambda_top, floor)
        if result.degenerate:
            return out
        v = result.state
        top = result.lambda_top
        witness = Statevector((("S1", e.D), ("S2", e.D)), v)
        accepted = expected_acceptance(witness, params, eps, q)
        check("maintechnical.acceptance", abs(accepted - top) <= WITNESS_TOL, accepted, top)
        Sv = S @ v
        amplitude = float(np.vdot(Sv, Sv).real)
        check("maintechnical.amplitude", abs(amplitude - top**2) <= WITNESS_TOL, amplitude, top**2)
        perron = perron_check(params, seed=s, ledger=out.ledger, verify_pair_block=False)
        gap_bound = eps**2 * params.f**4 * perron.lam
        check("maintechnical.gap_bound", result.gap >= gap_bound - OPERATOR_TOL, result.gap, gap_bound)
        psi_hat = pair_state(perron.vector.astype(np.complex128))
        alignment = float(abs(np.vdot(psi_hat, v)) ** 2)
        check("maintechnical.perron_alignment", alignment >= 1 - IDENTITY_TOL, alignment, 1.0)
        observables = build_observables(params, H, window, "direct", s)
        sampled = build_O_succ(H, window, observables, eps, qc).O_succ
        _, vectors = top_eigenpairs(sampled, 1)
        sampled_overlap = float(abs(np.vdot(psi_hat, vectors[:, -1])) ** 2)
        out.rows.append(
            {
                "instance": t,
                "seed": s,
                "lambda_top": result.lambda_top,
                "gap": result.gap,
                "gap_bound": gap_bound,
                "sampled_overlap": sampled_overlap,
            }
        )
        return out

    merged = _run_instances(config, config.trials.count, instance)
    ledger = merged.ledger

    zero = EthParams(e.D, e.m, e.f, np.zeros((e.D, e.D)), np.zeros((e.m, e.D)))
    degenerate = unique_witness(sandwich(build_M(zero, eps), q))
    check_claim(
        "maintechnical.degenerate_flag",
        degenerate.degenerate,
        degenerate.gap,
        0.0,
        seed=config.seed,
        detail="f_matrix = 0",
        ledger=ledger,
    )
    return ExperimentResult(
        "witness",
        {
            "instances": config.trials.count,
            "D": e.D,
            "epsilon": eps,
            "f": e.f,
            "min_gap": min((r["gap"] for r in merged.rows), default=math.nan),
            "degenerate_case_flagged": degenerate.degenerate,
        },
        ledger,
        ("instance", "seed", "lambda_top", "gap", "gap_bound", "sampled_overlap"),
        merged.rows,
        description="unique witness of the sandwiched effective operator",
    )


@experiment("nocase")
def run_nocase(config: ExperimentConfig) -> ExperimentResult:
    """||second-order operator|| <= 1/c when every eigenvalue is at least c/L from the inner window."""
    window = build_window(config)
    qc = QpeConfig.for_window(window, config.qpe.L)
    p = config.protocol
    pc = ProtocolConfig(p.epsilon, "circuit", qc, p.m)
    gap = p.c / qc.L
    start = qc.inner_upper + gap
    length = 1 - qc.omega - 2 * gap
    if length <= 0:
        raise ContractViolation("nocase", f"no room for eigenvalues {p.c}/L away from the inner window")

    def instance(t: int) -> InstanceOutcome:
        out = InstanceOutcome()
        s = derive_seed(config.seed, t)
        u = stream_rng(s, 50).uniform(0.0, 1.0, config.spectrum.count)
        lam = np.mod(start + u * length, 1.0)
        H = from_spectrum(lam, config.spectrum.basis, s)
        observables = build_observables(circuit_params(p.m), H, window, "circuit", s)
        if checked_q_weights(H, qc, s, out.ledger) is None:
            return out
        try:
            norm, bound = no_case_norm(H, window, pc, observables, p.c)
        except PreconditionError:
            out.rejected = 1
            return out
        check_claim(
            "no_low_energy.norm", norm <= bound + OPERATOR_TOL, norm, bound, seed=s, ledger=out.ledger
        )
        closest = float(np.min(almost_zero_margin(H.eigenvalues, qc)))
        out.rows.append({"instance": t, "seed": s, "norm": norm, "bound": bound, "closest": closest})
        return out

    merged = _run_instances(config, config.trials.count, instance)
    return ExperimentResult(
        "nocase",
        {
            "instances": config.trials.count,
            "L": qc.L,
            "c": p.c,
            "max_norm": max((r["norm"] for r in merged.rows), default=math.nan),
        },
        merged.ledger,
        ("instance", "seed", "norm", "bound", "closest"),
        merged.rows,
        rejected=merged.rejected,
        description="norm of the success operator on spectra away from the window",
    )


# ---------------------------------------------------------------------------
# Concentration and Gaussian norms
# ---------------------------------------------------------------------------
@experiment("concentration")
def run_concentration(config: ExperimentConfig) -> ExperimentResult:
    ledger = ClaimLedger()
    c = config.concentration
    params = build_params(config, config.seed, m=1)
    curve = concentration_experiment(
        params, c.m_values, c.trials, config.seed, workers=config.workers, ledger=ledger
    )
    return ExperimentResult(
        "concentration",
        {"D": params.D, "trials": c.trials, "ratios": [{"m": m, "ratio": r} for m, r in curve.ratios(4)]},
        ledger,
        ("m", "median", "q25", "q75"),
        [{"m": pt.m, "median": pt.median, "q25": pt.q25, "q75": pt.q75} for pt in curve.points],
        description="deviation of the sampled second moment from its expectation",
    )


@experiment("gaussnorm")
def run_gaussnorm(config: ExperimentConfig) -> ExperimentResult:
    ledger = ClaimLedger()
    g = config.gaussnorm
    rows = gaussian_norm_experiment(
        g.D_values, g.samples, config.seed, variance=g.variance, workers=config.workers, ledger=ledger
    )
    return ExperimentResult(
        "gaussnorm",
        {"samples": g.samples, "variance": g.variance},
        ledger,
        ("D", "samples", "passed", "mean_ratio", "max_ratio"),
        [
            {
                "D": r.D,
                "samples": r.samples,
                "passed": r.passed,
                "mean_ratio": r.mean_ratio,
                "max_ratio": r.max_ratio,
            }
            for r in rows
        ],
        description="operator norms of Hermitian Gaussian matrices, ratio = ||P|| / sqrt(D)",
    )


# ---------------------------------------------------------------------------
# Oracle sandbox
# ---------------------------------------------------------------------------
@experiment("oracle")
def run_oracle(config: ExperimentConfig) -> ExperimentResult:
    """Simple verifier, composition, QXC counts and the one-query overlap bound."""
    o = config.oracle
    seed = config.seed
    ledger = ClaimLedger()
    check = partial(check_claim, seed=seed, ledger=ledger)

    S = random_subspace(o.N, o.k, seed, 0)
    in_S = S.basis[:, 0]
    yes = simple_verifier(S, in_S)
    check("oracle.yes_case", abs(yes - 1) <= OPERATOR_TOL, yes, 1.0)
    rng = stream_rng(seed, 72)
    sample = rng.standard_normal(o.N) + 1j * rng.standard_normal(o.N)
    sample /= np.linalg.norm(sample)
    identity = simple_verifier(SubspaceOracle.identity(o.N), sample)
    check("oracle.identity_case", identity <= OPERATOR_TOL, identity, 0.0)
    p = simple_verifier(S, sample)
    closed = float(np.linalg.norm(S.projector @ sample) ** 2)
    check("oracle.closed_form", abs(p - closed) <= OPERATOR_TOL, p, closed)
    if 2 * o.k <= o.N:
        defect = composition_defect(S, orthogonal_extension(S, o.k, seed, 0))
        check("oracle.composition", defect <= OPERATOR_TOL, defect, OPERATOR_TOL)

    S1 = random_subspace(o.N, o.k1, seed, 1)
    T = direct_sum(S1, orthogonal_extension(S1, o.k2 - o.k1, seed, 1))
    yes_counts = qxc_dimension_count(S1, o.a, o.b)
    no_counts = qxc_dimension_count(T, o.a, o.b)
    check("qxc.yes_counts", yes_counts == (o.k1, o.k1), yes_counts[0], o.k1, detail=f"D_b={yes_counts[1]}")
    check("qxc.no_counts", no_counts == (o.k2, o.k2), no_counts[0], o.k2, detail=f"D_b={no_counts[1]}")
    verdicts = (qxc_decide(S1, o.k1, o.k2, o.a, o.b).verdict, qxc_decide(T, o.k1, o.k2, o.a, o.b).verdict)
    decided = verdicts == ("yes", "no")
    check("qxc.decision", decided, float(decided), 1.0, detail=f"{verdicts}")

    ideal = simple_verifier_instance(S, in_S)
    lhs, _ = overlap_bound_check(
        ideal.pi_out, ideal.pi_in, ideal.oracle, ideal.witness, 0.0, seed=seed, ledger=ledger
    )
    check("delta_lower_bound.ideal", abs(lhs - 1) <= OPERATOR_TOL, lhs, 1.0)

    rows = []
    rejected = 0
    for eps in o.epsilon_values:
        delta = (math.sqrt(1 - eps) - math.sqrt(eps)) / 2

        def simple(i: int, eps: float = eps) -> InstanceOutcome:
            out = InstanceOutcome()
            s = derive_seed(seed, 70, i)
            S_i = random_subspace(o.N, o.k, s)
            leak = float(stream_rng(s, 71).uniform(0.0, OVERLAP_LEAK_FACTOR * eps))
            inst = simple_verifier_instance(S_i, near_ideal_witness(S_i, leak, s))
            try:
                lhs, d = overlap_bound_check(
                    inst.pi_out, inst.pi_in, inst.oracle, inst.witness, eps, seed=s, ledger=out.ledger
                )
            except PreconditionError:
                out.rejected = 1
                return out
            out.rows.append({"lhs": lhs, "margin": lhs - d})
            return out

        def haar(i: int, eps: float = eps) -> InstanceOutcome:
            out = InstanceOutcome()
            s = derive_seed(seed, 73, i)
            S_i = random_subspace(o.N, o.k, s)
            soundness2 = float(stream_rng(s, 71).uniform(0.0, OVERLAP_LEAK_FACTOR * eps))
            try:
                inst = haar_verifier_instance(S_i, math.asin(math.sqrt(soundness2)), s)
                tight = tightest_epsilon(inst)
                if tight >= 0.5:
                    raise PreconditionError("haar_verifier_instance", f"tightest epsilon {tight:.4g} >= 1/2")
                lhs, d = overlap_bound_check(
                    inst.pi_out, inst.pi_in, inst.oracle, inst.witness, tight, seed=s, ledger=out.ledger
                )
            except PreconditionError:
                out.rejected = 1
                return out
            out.rows.append({"lhs": lhs, "margin": lhs - d})
            return out

        for family, fn in (("simple", simple), ("haar", haar)):
            merged = _run_instances(config, o.instances, fn)
            ledger.violations.extend(merged.ledger.violations)
            ledger.checked += merged.ledger.checked
            rejected += merged.rejected
            rows.append(
                {
                    "family": family,
                    "epsilon": eps,
                    "delta": delta,
                    "instances": o.instances,
                    "accepted": len(merged.rows),
                    "rejected": merged.rejected,
                    "min_lhs": min((r["lhs"] for r in merged.rows), default=math.nan),
                    "min_margin": min((r["margin"] for r in merged.rows), default=math.nan),
                }
            )
    return ExperimentResult(
        "oracle",
        {
            "N": o.N,
            "dimS": o.k,
            "acceptance": yes,
            "identity_acceptance": identity,
            "delta": {str(eps): (math.sqrt(1 - eps) - math.sqrt(eps)) / 2 for eps in o.epsilon_values},
            "qxc": {"yes": list(yes_counts), "no": list(no_counts), "verdicts": list(verdicts)},
        },
        ledger,
        ("family", "epsilon", "delta", "instances", "accepted", "rejected", "min_lhs", "min_margin"),
        rows,
        rejected=rejected,
        description="one-query overlap bound; haar rows are checked at each instance's tightest epsilon",
    )
