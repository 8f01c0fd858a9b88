"""Command-line front end: reproducible experiment runs emitting plot-ready data.

`--n` is the total qubit count N (even, >= 4); internally the chain has
N/2 dimers.  `--delta` accepts an exact rational like "1/2" (kept exact for
periodicity checks) or a decimal, which is treated as irrational.

Exit codes: 0 success, 2 configuration error, 3 size guard, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__, circuits, randomized
from .bell_basis import (
    Boundary,
    ConfigError,
    ModelParams,
    brute_force_coefficient,
    build_expansion,
    obc_expansion,
    psi0_statevector,
)
from .closed_forms import UncoveredCaseError, echo_closed_form, entropy_closed_form
from .dynamics import (
    evolve,
    find_loschmidt_zeros,
    half_chain_entropies,
    loschmidt_echo,
    reduced_density_matrix,
    hermitian_eigenvalues,
    renyi2_entropy,
    return_rate,
    to_statevector,
)
from .oracle import DenseEvolver

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIZE = 3
EXIT_VERIFY = 4


class SizeGuardError(Exception):
    """The request exceeds a documented size cap."""


# ---------------------------------------------------------------------------
# output tables with metadata headers and byte-exact round-tripping


@dataclass
class Table:
    meta: dict
    columns: list[str]
    rows: list[list]

    def to_text(self, fmt: str) -> str:
        if fmt == "json":
            payload = {"meta": self.meta, "columns": self.columns, "rows": self.rows}
            return json.dumps(payload, indent=1, sort_keys=True) + "\n"
        lines = ["# dimerquench " + json.dumps(self.meta, sort_keys=True)]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_csv_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Table":
        if text.lstrip().startswith("{"):
            payload = json.loads(text)
            return cls(payload["meta"], payload["columns"], payload["rows"])
        lines = text.rstrip("\n").split("\n")
        if not lines[0].startswith("# dimerquench "):
            raise ValueError("missing metadata header")
        meta = json.loads(lines[0][len("# dimerquench ") :])
        columns = lines[1].split(",")
        rows = [[_csv_parse(tok) for tok in line.split(",")] for line in lines[2:]]
        return cls(meta, columns, rows)


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv_parse(token: str):
    try:
        if str(int(token)) == token:
            return int(token)
    except ValueError:
        pass
    try:
        if repr(float(token)) == token:
            return float(token)
    except ValueError:
        pass
    return token


def _emit(table: Table, args) -> None:
    text = table.to_text(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# configuration


def _parse_delta(text: str) -> tuple[float, Fraction | None]:
    """Rational strings stay exact; plain decimals count as irrational."""
    if "/" in text or "." not in text and "e" not in text.lower():
        frac = Fraction(text)
        return float(frac), frac
    return float(text), None


def _model_from_args(args) -> ModelParams:
    if args.n % 2 != 0 or args.n < 4:
        raise ConfigError(f"--n is the total qubit count and must be even and >= 4, got {args.n}")
    delta, frac = _parse_delta(args.delta)
    return ModelParams(
        n=args.n // 2,
        J=args.j,
        delta=delta,
        boundary=Boundary(args.boundary),
        delta_fraction=frac,
    )


def _meta(args, params: ModelParams, command: str) -> dict:
    return {
        "version": __version__,
        "command": command,
        "n_qubits": args.n,
        "J": params.J,
        "delta": args.delta,
        "boundary": params.boundary.value,
        "tmax": args.tmax,
        "steps": args.steps,
        "nu": args.nu,
        "nm": args.nm,
        "shots": args.shots,
        "seed": args.seed,
    }


def _time_grid(args, params: ModelParams) -> np.ndarray:
    if args.steps < 2:
        raise ConfigError(f"--steps must be >= 2, got {args.steps}")
    tmax = args.tmax if args.tmax is not None else 4.0 * math.pi / params.J
    if not tmax > 0:
        raise ConfigError(f"--tmax must be positive, got {tmax}")
    return np.linspace(0.0, tmax, args.steps)


def _expansion_for(params: ModelParams):
    if params.boundary is Boundary.OBC:
        if params.n_sites > 16:
            raise SizeGuardError("OBC runs are capped at 16 qubits")
        return obc_expansion(params)
    if params.n > 10:
        raise SizeGuardError("PBC expansion enumeration is capped at n = 10 dimers")
    return build_expansion(params)


# ---------------------------------------------------------------------------
# commands


def cmd_coefficients(args) -> int:
    params = _model_from_args(args)
    if params.n > 6:
        raise SizeGuardError("coefficient tables are capped at 12 qubits")
    if params.boundary is Boundary.OBC:
        raise ConfigError("coefficient tables are defined for periodic boundaries")
    expansion = build_expansion(params)
    exact = expansion.coefficients
    prep0 = circuits.psi0_prep_circuit(params.n)
    rows = []
    for k, config in enumerate(expansion.configs):
        prep_k = circuits.phik_prep_circuit(config, params.n)
        a_exact_circ = circuits.hadamard_test(prep0, prep_k)
        a_sampled = circuits.hadamard_test(prep0, prep_k, shots=args.shots, seed=args.seed + k)
        sigma = math.sqrt(max(1.0 - a_sampled**2, 0.0) / args.shots)
        rows.append(
            [
                k,
                "".join(str(mu) for mu in config),
                float(exact[k]),
                float(a_exact_circ),
                float(a_sampled),
                sigma,
            ]
        )
    table = Table(
        _meta(args, params, "coefficients"),
        ["k", "config", "a_exact", "a_hadamard_exact", "a_hadamard_sampled", "sigma"],
        rows,
    )
    _emit(table, args)
    return EXIT_OK


def cmd_entropy(args) -> int:
    params = _model_from_args(args)
    expansion = _expansion_for(params)
    if params.n_sites > 24:
        raise SizeGuardError("entropy time series need statevectors, capped at 24 qubits")
    ts = _time_grid(args, params)
    closed = params.boundary is Boundary.PBC
    rows = []
    for t in ts:
        s1, s2 = half_chain_entropies(expansion, float(t))
        row = [float(t), s1, s2]
        if closed:
            row += [
                float(entropy_closed_form(params, t, order=1)),
                float(entropy_closed_form(params, t, order=2)),
            ]
        else:
            row += ["", ""]
        rows.append(row)
    table = Table(
        _meta(args, params, "entropy"),
        ["t", "s1", "s2", "s1_closed", "s2_closed"],
        rows,
    )
    _emit(table, args)
    return EXIT_OK


def cmd_echo(args) -> int:
    params = _model_from_args(args)
    expansion = _expansion_for(params)
    ts = _time_grid(args, params)
    echoes = loschmidt_echo(expansion, ts)
    try:
        closed = echo_closed_form(params, ts) if params.boundary is Boundary.PBC else None
    except UncoveredCaseError:
        closed = None
    rows = []
    for i, t in enumerate(ts):
        echo = float(echoes[i])
        row = [float(t), echo, return_rate(echo, params.n_sites)]
        row.append(float(closed[i]) if closed is not None else "")
        rows.append(row)
    zeros = find_loschmidt_zeros(expansion, float(ts[-1]))
    meta = _meta(args, params, "echo")
    meta["zeros"] = zeros
    table = Table(meta, ["t", "echo", "return_rate", "echo_closed"], rows)
    _emit(table, args)
    return EXIT_OK


def _randomized_subsystem(params: ModelParams) -> list[int]:
    n_sites = params.n_sites
    if params.boundary is Boundary.OBC:
        # bulk half: skip the free edge spins symmetrically
        start = n_sites // 4 + 1
        return list(range(start, start + n_sites // 2))
    return list(range(1, n_sites // 2 + 1))


def cmd_randomized(args) -> int:
    params = _model_from_args(args)
    if params.n_sites > 14:
        raise SizeGuardError("randomized-measurement runs are capped at 14 qubits")
    expansion = _expansion_for(params)
    ts = _time_grid(args, params)
    subsystem = _randomized_subsystem(params)
    unitaries = randomized.sample_unitaries(params.n_sites, args.nu, seed=args.seed)
    psi0 = psi0_statevector(params.n)
    rows = []
    for i, t in enumerate(ts):
        psi_t = to_statevector(evolve(expansion, float(t)))
        rho = reduced_density_matrix(psi_t, subsystem)
        s2_exact = renyi2_entropy(hermitian_eigenvalues(rho))
        echo_exact = float(loschmidt_echo(expansion, float(t)))
        dataset = randomized.collect(
            psi_t, unitaries, args.nm, seed=args.seed + 1 + i, params=params, t=float(t)
        )
        ham = randomized.purity_hamming(dataset, subsystem)
        sha = randomized.shadow_purity(dataset, subsystem)
        echo_est = randomized.shadow_loschmidt(dataset)
        rows.append(
            [
                float(t),
                s2_exact,
                2.0**-s2_exact,
                ham.value,
                ham.sigma,
                randomized.renyi_from_purity(ham.value),
                sha.value,
                sha.sigma,
                randomized.renyi_from_purity(sha.value),
                echo_exact,
                echo_est.value,
                echo_est.sigma,
            ]
        )
    meta = _meta(args, params, "randomized")
    meta["subsystem"] = subsystem
    table = Table(
        meta,
        [
            "t",
            "s2_exact",
            "purity_exact",
            "purity_hamming",
            "purity_hamming_sigma",
            "s2_hamming",
            "purity_shadow",
            "purity_shadow_sigma",
            "s2_shadow",
            "echo_exact",
            "echo_shadow",
            "echo_shadow_sigma",
        ],
        rows,
    )
    _emit(table, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _verify_checks(inject_error: bool):
    """Yield (name, max_deviation, tolerance) for the oracle and closed-form suites."""
    for n in range(2, 6):
        params = ModelParams(n)
        expansion = build_expansion(params)
        coeffs = expansion.coefficients.copy()
        if inject_error:
            coeffs[0] *= 1.1
        dev = max(
            abs(coeffs[i] - brute_force_coefficient(c, params))
            for i, c in enumerate(expansion.configs)
        )
        yield f"coefficients_vs_bruteforce_n{n}", dev, 1e-12
        yield f"normalization_n{n}", abs(float(np.sum(coeffs**2)) - 1.0), 1e-12
        yield f"active_count_n{n}", abs(len(expansion) - 4 ** (n - 1)), 0.5

    ts = np.linspace(0.0, 2.0 * math.pi, 40)
    for n in range(2, 6):
        for delta in (0.0, 0.5, 1.0):
            params = ModelParams(n, 1.0, delta)
            expansion = build_expansion(params)
            dev_s = 0.0
            for t in ts:
                s1, s2 = half_chain_entropies(expansion, float(t))
                dev_s = max(
                    dev_s,
                    abs(s1 - float(entropy_closed_form(params, t, order=1))),
                    abs(s2 - float(entropy_closed_form(params, t, order=2))),
                )
            yield f"entropy_closed_form_n{n}_delta{delta}", dev_s, 1e-10
            if n <= 4:
                dev_e = float(
                    np.abs(loschmidt_echo(expansion, ts) - echo_closed_form(params, ts)).max()
                )
                yield f"echo_closed_form_n{n}_delta{delta}", dev_e, 1e-10

    rng = np.random.default_rng(0)
    for n in (2, 3):
        delta = rng.uniform(-1.0, 2.0)
        t = rng.uniform(0.5, 6.0)
        params = ModelParams(n, 1.0, delta)
        psi_circ = circuits.apply(circuits.evolution_circuit(params, t), psi0_statevector(n))
        psi_bell = to_statevector(evolve(build_expansion(params), t))
        psi_dense = DenseEvolver(params).evolve(psi0_statevector(n), t)
        yield f"circuit_vs_expansion_n{n}", float(np.abs(psi_circ - psi_bell).max()), 1e-10
        yield f"expansion_vs_dense_n{n}", float(np.abs(psi_bell - psi_dense).max()), 1e-10


def cmd_verify(args) -> int:
    failures = 0
    for name, dev, tol in _verify_checks(args.inject_error):
        ok = dev <= tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name}: max deviation {dev:.3e} (tol {tol:.0e})")
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimerquench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dimerquench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=8, help="total qubit count N (even)")
    common.add_argument("--j", type=float, default=1.0, help="bond strength J")
    common.add_argument("--delta", type=str, default="0", help='anisotropy, decimal or "p/q"')
    common.add_argument("--boundary", choices=["pbc", "obc"], default="pbc")
    common.add_argument("--tmax", type=float, default=None, help="grid end (default 4 pi / J)")
    common.add_argument("--steps", type=int, default=400, help="grid points")
    common.add_argument("--nu", type=int, default=randomized.DEFAULT_N_U, help="unitaries N_U")
    common.add_argument("--nm", type=int, default=randomized.DEFAULT_N_M, help="shots N_M")
    common.add_argument("--shots", type=int, default=8192, help="Hadamard-test shots")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    sub.add_parser("coefficients", parents=[common]).set_defaults(func=cmd_coefficients)
    sub.add_parser("entropy", parents=[common]).set_defaults(func=cmd_entropy)
    sub.add_parser("echo", parents=[common]).set_defaults(func=cmd_echo)
    sub.add_parser("randomized", parents=[common]).set_defaults(func=cmd_randomized)
    verify = sub.add_parser("verify", parents=[common])
    verify.add_argument(
        "--inject-error",
        action="store_true",
        help="negative control: perturb one coefficient so verification must fail",
    )
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ConfigError, ValueError, ZeroDivisionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
