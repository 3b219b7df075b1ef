#!/usr/bin/env python
"""Visual verification report for witness-lab.

Run:  uv run python scripts/verify.py

Produces a formatted report showing:
  1. Reference data (seeds, tolerances, the small circuit instance)
  2. QPE kernel and weights: sinc table, inner limits, ASCII spectrum and Q bars
  3. Perron witness: known eigenpairs against perron_check
  4. Oracle sandbox: simple verifier, QXC decisions, overlap bound delta
  5. Two routes on the small instance: circuit against operator
"""

from __future__ import annotations

import json
import sys
from datetime import datetime
from pathlib import Path

import numpy as np

# ---------------------------------------------------------------------------
# Paths and data loading
# ---------------------------------------------------------------------------
ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"
SCENARIOS = FIXTURES / "scenarios"

sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from witness_lab.debug import show_spectrum, show_weights
from witness_lab.ensemble import EthParams, build_observables, circuit_params, make_params
from witness_lab.grid import EnergyGrid
from witness_lab.hamiltonian import EnergyWindow, from_spectrum
from witness_lab.linalg import Statevector
from witness_lab.oracles import (
    SubspaceOracle,
    overlap_bound_check,
    qxc_decide,
    simple_verifier,
    simple_verifier_instance,
)
from witness_lab.protocol import ProtocolConfig, acceptance_operator_route, run_algorithm1
from witness_lab.qpe import QpeConfig, q_weights, sinc_L
from witness_lab.spectral import perron_check


def _load(path: Path):
    with open(path) as f:
        return json.load(f)


_ref = _load(FIXTURES / "reference.json")
SMALL = _ref["small_instance"]

# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------
WIDTH = 90


def banner(title: str):
    print()
    print("=" * WIDTH)
    print(f"  {title}")
    print("=" * WIDTH)


def heading(title: str):
    print()
    print(f"  {title}")
    print(f"  {'-' * (len(title) + 2)}")


def table(headers: list[str], rows: list[list[str]], indent: int = 4):
    """Print a formatted table with auto-sized columns."""
    col_widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            col_widths[i] = max(col_widths[i], len(cell))

    pad = " " * indent
    fmt = pad + "  ".join(f"{{:<{w}}}" for w in col_widths)
    sep = pad + "  ".join("-" * w for w in col_widths)

    print(fmt.format(*headers))
    print(sep)
    for row in rows:
        padded = row + [""] * (len(headers) - len(row))
        print(fmt.format(*padded))


def _ok(got: float, expected: float, tol: float = 1e-9) -> str:
    return "ok" if abs(got - expected) <= tol else "MISMATCH"


def _unit(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=np.complex128)
    return v / np.linalg.norm(v)


def _basis_oracle(N: int, indices) -> SubspaceOracle:
    if not indices:
        return SubspaceOracle.identity(N)
    return SubspaceOracle.from_basis(np.eye(N, dtype=np.complex128)[:, list(indices)])


def _small_window() -> EnergyWindow:
    return EnergyWindow(SMALL["e0"], SMALL["delta"])


# ---------------------------------------------------------------------------
# Section 1: Reference Data
# ---------------------------------------------------------------------------
def section_reference():
    banner("REFERENCE DATA")
    print(f"\n    Seeds:          {', '.join(str(s) for s in _ref['seeds'])}")

    heading("Tolerances")
    table(["Name", "Value"], [[k, f"{v:g}"] for k, v in _ref["tolerances"].items()])

    heading("Small circuit instance")
    print(f"    spectrum: {SMALL['spectrum']}")
    print(f"    window:   e0={SMALL['e0']}  delta={SMALL['delta']}   L={SMALL['L']}   m={SMALL['m']}")
    print(f"    {SMALL['notes']}")


# ---------------------------------------------------------------------------
# Section 2: QPE kernel and Q weights
# ---------------------------------------------------------------------------
def section_qpe():
    banner("QPE KERNEL AND Q WEIGHTS")
    data = _load(SCENARIOS / "qpe.json")

    heading("Function: sinc_L(x, L) = sin(pi L x) / (L sin(pi x))")
    rows = []
    for s in data["sinc"]:
        got = sinc_L(s["x"], s["L"])
        rows.append([s["id"], f"{s['x']:g}", str(s["L"]), f"{got:.12f}", _ok(got, s["expected"])])
    table(["Case", "x", "L", "sinc_L", "Check"], rows)

    heading("Function: EnergyGrid(L).inner_limits(e0, delta) -> (m_lo, m_hi)")
    print("    half = floor((delta - 1/sqrt L) L / 2), centred on the grid index of e0.\n")
    rows = []
    for s in data["inner_limits"]:
        m_lo, m_hi = EnergyGrid(s["L"]).inner_limits(s["e0"], s["delta"])
        check = "ok" if (m_lo, m_hi) == (s["m_lo"], s["m_hi"]) else "MISMATCH"
        rows.append([s["id"], str(s["L"]), f"{s['delta']:g}", str(m_lo), str(m_hi), check])
    table(["Case", "L", "delta", "m_lo", "m_hi", "Check"], rows)

    window = _small_window()
    qc = QpeConfig.for_window(window, SMALL["L"])
    H = from_spectrum(SMALL["spectrum"])
    heading("Small instance on [0, 1)")
    show_spectrum(H.eigenvalues, window, qc)

    heading("Weights q(lambda): 1 on the inner grid, O(1/L) far from it")
    show_weights(H.eigenvalues, q_weights(H, qc).weights)


# ---------------------------------------------------------------------------
# Section 3: Perron witness
# ---------------------------------------------------------------------------
def section_perron():
    banner("PERRON WITNESS")
    data = _load(SCENARIOS / "perron.json")

    heading("Function: perron_check(params) -> PerronReport")
    print("    Leading eigenpair of M_f = f^2 / D with f^2 <= lambda <= 1 and the gap bound.\n")
    rows = []
    for s in data["eigenpairs"]:
        fm = np.asarray(s["f_matrix"], dtype=float)
        params = EthParams(s["D"], 1, s["f"], fm, np.zeros((1, s["D"])))
        report = perron_check(params)
        check = _ok(report.lam, s["lambda"]) if abs(report.second - s["second"]) < 1e-9 else "MISMATCH"
        rows.append(
            [s["id"], str(s["D"]), f"{s['f']:g}", f"{report.lam:.6f}", f"{report.second:.6f}", check]
        )
    table(["Case", "D", "f", "lambda", "second", "Check"], rows)

    heading("Random amplitudes f_ab ~ U[f, 1], D = 16, f = 0.5")
    rows = []
    for seed in _ref["seeds"]:
        report = perron_check(make_params(16, 1, 0.5, f_mode="random", seed=seed), seed=seed)
        bound = (1 - 0.5**4) * report.lam
        rows.append(
            [str(seed), f"{report.lam:.6f}", f"{report.second:.6f}", f"{bound:.6f}", f"{report.ratio:.4f}"]
        )
    table(["Seed", "lambda", "second", "(1-f^4) lambda", "x_max/x_min"], rows)


# ---------------------------------------------------------------------------
# Section 4: Oracle sandbox
# ---------------------------------------------------------------------------
def section_oracle():
    banner("ORACLE SANDBOX")
    data = _load(SCENARIOS / "oracle.json")

    heading("Function: simple_verifier(O_S, psi) = ||Pi_S psi||^2")
    rows = []
    for s in data["simple_verifier"]:
        p = simple_verifier(_basis_oracle(s["N"], s["basis"]), _unit(s["psi"]))
        rows.append([s["id"], str(s["N"]), str(s["basis"]), f"{p:.6f}", _ok(p, s["expected"])])
    table(["Case", "N", "S", "p_accept", "Check"], rows)

    heading("Function: qxc_decide(O, k1, k2) -> yes iff D_a < (k1 + k2) / 2")
    rows = []
    for s in data["qxc_decisions"]:
        d = qxc_decide(_basis_oracle(s["N"], range(s["k"])), s["k1"], s["k2"])
        check = "ok" if d.verdict == s["verdict"] else "MISMATCH"
        rows.append([s["id"], str(s["k"]), f"{s['k1']}, {s['k2']}", d.verdict, check])
    table(["Case", "dim S", "k1, k2", "Verdict", "Check"], rows)

    heading("Function: overlap_bound_check(...) -> (||Pi_S w||, delta)")
    inst = simple_verifier_instance(_basis_oracle(4, [0, 1]), _unit([1, 0, 0, 0]))
    rows = []
    for s in data["delta"]:
        lhs, delta = overlap_bound_check(inst.pi_out, inst.pi_in, inst.oracle, inst.witness, s["epsilon"])
        rows.append([s["id"], f"{s['epsilon']:g}", f"{lhs:.6f}", f"{delta:.6f}", _ok(delta, s["expected"])])
    table(["Case", "epsilon", "lhs", "delta", "Check"], rows)


# ---------------------------------------------------------------------------
# Section 5: Two routes
# ---------------------------------------------------------------------------
def section_two_routes():
    banner("CIRCUIT ROUTE AGAINST OPERATOR ROUTE")
    window = _small_window()
    qc = QpeConfig.for_window(window, SMALL["L"])

    heading("Small instance, random basis, m = 2")
    rows = []
    for seed in _ref["seeds"]:
        H = from_spectrum(SMALL["spectrum"], "random", seed)
        observables = build_observables(circuit_params(SMALL["m"]), H, window, "circuit", seed)
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        psi = Statevector((("S1", 8), ("S2", 8)), v / np.linalg.norm(v))
        for eps in (0.05, 0.2):
            config = ProtocolConfig(eps, "circuit", qc, SMALL["m"])
            circuit = run_algorithm1(psi, H, observables, config).p_circuit
            operator = acceptance_operator_route(psi, H, observables, config)
            rows.append(
                [
                    str(seed),
                    f"{eps:g}",
                    f"{circuit:.10f}",
                    f"{operator:.10f}",
                    f"{abs(circuit - operator):.1e}",
                ]
            )
    table(["Seed", "epsilon", "p_circuit", "p_operator", "|diff|"], rows)


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------
def main():
    banner("WITNESS-LAB   --  VISUAL VERIFICATION REPORT")
    print(f"    Generated: {datetime.now().strftime('%Y-%m-%d %H:%M')}")
    print(f"    Fixture data: {FIXTURES.relative_to(ROOT)}/")

    section_reference()
    section_qpe()
    section_perron()
    section_oracle()
    section_two_routes()

    banner("END OF REPORT")
    print()


if __name__ == "__main__":
    main()
