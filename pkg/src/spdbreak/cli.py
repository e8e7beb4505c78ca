"""Command-line front end: ``spdbreak solve | verify | ci``.

Exit codes: 0 success (or the expected verdicts), 1 usage error,
2 non-convergence, 3 verdict mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    FAILS,
    HOLDS,
    ConditionReport,
    check_condition_3D1,
    check_condition_3P1,
    check_hund,
    check_symmetry_breaking,
)
from .energy import MODES, SYMMETRIES
from .grid import make_log_grid
from .kernels import BACKEND
from .slater_condon import HamiltonianParams
from .solver import (
    SYMMETRIC_SLOTS,
    SolveOptions,
    Solution,
    SolverError,
    ci_diagonalize,
    minimize_J1,
    minimize_symmetric,
)

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_MISMATCH = 0, 1, 2, 3
CHECKS = ("3p1", "3d1", "hund", "breaking")
INITS = ("hydrogenic", "random")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    mode: str = "sp+pd"
    symmetry: str = "3P1"
    Z: float = 4.0
    interaction: float = 1.0
    n_points: int = 220
    r_min: float = 1e-5
    r_max: float = 60.0
    max_iter: int = 3000
    energy_tol: float = 1e-9
    gradient_tol: float = 1e-7
    shift: float = 0.5
    seed: int = 0
    init: str = "hydrogenic"
    outdir: str = "spdbreak-out"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"symmetry must be one of {SYMMETRIES}, got {self.symmetry!r}")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}, got {self.init!r}")
        # constructors below raise on the remaining invalid values
        self.grid()
        self.params()
        self.options()

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        clean = {}
        for k, v in data.items():
            kind = known[k]
            if kind == "int":
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ValueError(f"{k} must be an integer, got {v!r}")
            elif kind == "float":
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValueError(f"{k} must be a number, got {v!r}")
                v = float(v)
            elif not isinstance(v, str):
                raise ValueError(f"{k} must be a string, got {v!r}")
            clean[k] = v
        return cls(**clean)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        return cls.from_dict(data)

    def grid(self):
        return make_log_grid(self.n_points, self.r_min, self.r_max)

    def params(self) -> HamiltonianParams:
        return HamiltonianParams(Z=self.Z, interaction=self.interaction)

    def options(self) -> SolveOptions:
        return SolveOptions(max_iter=self.max_iter, energy_tol=self.energy_tol,
                            gradient_tol=self.gradient_tol, shift=self.shift, seed=self.seed)

    def manifest_hash(self, command: str) -> str:
        """Hash of everything that determines the artifacts (not ``outdir``)."""
        d = self.to_dict()
        d.pop("outdir")
        payload = json.dumps({"command": command, "config": d, "version": __version__},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# artifacts


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


class Artifacts:
    def __init__(self, config: RunConfig, command: str):
        self.dir = Path(config.outdir)
        self.hash = config.manifest_hash(command)
        self.command = command
        self.config = config

    def header(self, what: str) -> str:
        return f"manifest={self.hash} {what}"

    def write(self, name: str, text: str) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        (self.dir / name).write_text(text)

    def csv(self, name: str, columns, rows) -> None:
        lines = ["# " + self.header("columns: " + ",".join(columns))]
        lines += [",".join(_fmt(float(x)) for x in row) for row in rows]
        self.write(name, "\n".join(lines) + "\n")

    def manifest(self, results: dict) -> None:
        lines = [f"# {self.header('run manifest')}", f"command = {self.command}",
                 f"version = {__version__}", f"backend = {BACKEND}"]
        lines += [f"config.{k} = {_fmt(v)}" for k, v in self.config.to_dict().items()]
        lines += [f"{k} = {_fmt(v)}" for k, v in results.items()]
        self.write("manifest", "\n".join(lines) + "\n")

    def solution(self, sol: Solution) -> None:
        st = sol.state
        orb = st.orbitals
        self.csv("orbitals.csv", ["r"] + [f"R{s}" for s in range(len(orb))],
                 np.column_stack([st.grid.r, orb.T]))
        self.csv("trace.csv", ["iteration", "energy", "residual"], sol.trace)
        self.write("energy.report", sol.report.to_text(self.header("energy report")))

    def report(self, check: str, rep: ConditionReport) -> None:
        self.write(f"condition.{check}.report", rep.to_text(self.header(f"condition {check}")))


def load_orbitals(path: Path, config: RunConfig) -> np.ndarray:
    """Rows ``R0..`` of an ``orbitals.csv``; its radii must match the config grid."""
    if not path.is_file():
        raise UsageError(f"no orbitals at {path}: run "
                         f"'spdbreak solve --mode sp+pd --symmetry 3P1 --outdir {path.parent}' first")
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    r = config.grid().r
    if data.shape[0] != len(r) or not np.allclose(data[:, 0], r, rtol=1e-12, atol=0):
        raise UsageError(f"{path} was written on a different grid than the config describes")
    if data.shape[1] < 5:
        raise UsageError(f"{path} needs at least R0..R3 columns")
    return data[:, 1:].T


# --------------------------------------------------------------------------
# solves


class _Solves:
    """Per-process cache of prerequisite solves."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.grid = config.grid()
        self.params = config.params()
        self.opts = config.options()
        self.cache: dict = {}

    def get(self, mode: str, symmetry: str) -> Solution:
        key = (mode, symmetry)
        if key not in self.cache:
            if symmetry == "J1":
                if mode not in ("sp", "sp+pd"):
                    raise UsageError(f"J1 solves need mode sp or sp+pd, got {mode}")
                sol = minimize_J1(mode, self.params, self.opts, init=self.config.init, grid=self.grid)
            else:
                if key not in SYMMETRIC_SLOTS:
                    raise UsageError(f"symmetry {symmetry} is not available in mode {mode}")
                sol = minimize_symmetric(mode, symmetry, self.params, self.opts, self.grid)
            self.cache[key] = sol
        return self.cache[key]


def cmd_solve(config: RunConfig) -> int:
    art = Artifacts(config, "solve")
    solves = _Solves(config)
    try:
        sol = solves.get(config.mode, config.symmetry)
        status = EXIT_OK
    except SolverError as err:
        sol, status = err.solution, EXIT_NONCONVERGED
        print(f"error: {err}", file=sys.stderr)
    results = {"converged": status == EXIT_OK}
    if sol is not None:
        art.solution(sol)
        results.update({
            "energy": sol.energy,
            "residual": sol.residual,
            "iterations": len(sol.trace),
            "classification": str(sol.classification),
        })
        results.update({f"coeff{i}": c for i, c in enumerate(sol.state.coeffs)})
        print(f"energy = {sol.energy:.10f}")
        print(f"classification = {sol.classification}")
    art.manifest(results)
    return status


# --------------------------------------------------------------------------
# verification


def _expected(check: str, mode: str) -> str:
    return FAILS if (check == "breaking" and mode == "sp") else HOLDS


def _run_check(check: str, solves: _Solves, art: Artifacts) -> ConditionReport:
    if check == "3p1":
        rep = check_condition_3P1(solves.get("sp+pd", "3P1"))
        art.write("F_over_R2.csv", rep.profile_csv(art.header("F/R2 on the test window")))
        return rep
    if check == "3d1":
        return check_condition_3D1(solves.get("pd", "3D1"), solves.get("sp+pd", "3P1"))
    if check == "hund":
        sol = solves.get("sp+pd", "3P1")
        return check_hund(sol.state.orbitals, sol.state.grid, solves.params)
    mode = solves.config.mode
    if mode == "sp":
        sym = {"3P1": solves.get("sp", "3P1"), "1P1": solves.get("sp", "1P1")}
    elif mode == "sp+pd":
        cross = check_condition_3D1(solves.get("pd", "3D1"), solves.get("sp+pd", "3P1"))
        sym = {"3P1": solves.get("sp+pd", "3P1"), "3D1": solves.get("pd", "3D1"),
               "3P_cross": cross.evidence["E_3P_mixed"]}
    else:
        raise UsageError("verify breaking needs --mode sp or sp+pd")
    return check_symmetry_breaking(solves.get(mode, "J1"), sym)


def cmd_verify(which: str, config: RunConfig) -> int:
    checks = CHECKS if which == "all" else (which,)
    art = Artifacts(config, f"verify {which}")
    solves = _Solves(config)
    results, status = {}, EXIT_OK
    for check in checks:
        try:
            rep = _run_check(check, solves, art)
        except SolverError as err:
            print(f"error: prerequisite solve failed: {err}", file=sys.stderr)
            results[f"{check}.verdict"] = "not-run"
            status = EXIT_NONCONVERGED
            continue
        art.report(check, rep)
        want = _expected(check, config.mode)
        ok = rep.verdict == want
        results[f"{check}.verdict"] = rep.verdict
        results[f"{check}.expected"] = want
        print(f"{check}: {rep.verdict} (expected {want}) {'ok' if ok else 'MISMATCH'}")
        if not ok and status == EXIT_OK:
            status = EXIT_MISMATCH
    art.manifest(results)
    return status


# --------------------------------------------------------------------------
# CI table


def cmd_ci(config: RunConfig, orbitals: str | None = None) -> int:
    if orbitals is not None:
        X = load_orbitals(Path(orbitals), config)
        if len(X) < 5:
            raise UsageError("CI needs R0, R1, R2 and R4 (an sp+pd or pd solve)")
        grid = config.grid()
    else:
        sol = _Solves(config).get("sp+pd", "3P1")
        X, grid = sol.state.orbitals, sol.state.grid
    ci = ci_diagonalize(X, config.params(), grid)
    print("block  eigenvalue")
    for label, val in ci.as_dict().items():
        root, block = label.split("_")
        print(f"{root.replace('lambda', 'λ')}({block})  {val:.12f}")
    trace = float(np.trace(ci.matrix))
    total = sum(ci.as_dict().values())
    print(f"off_block_max = {ci.off_block:.3e}")
    print(f"trace_check = {abs(trace - total):.3e}")
    print(f"hund_ordering λ1(3P1) < λ1(1P1): {str(ci.hund_ordering).lower()}")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument handling


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    for f in fields(RunConfig):
        kind = {"int": int, "float": float}.get(f.type, str)
        p.add_argument(f"--{f.name}", type=kind, default=None, help=f"default {f.default!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spdbreak", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_config_flags(sub.add_parser("solve", help="minimise one model and write artifacts"))
    p = sub.add_parser("verify", help="run named diagnostic checks")
    p.add_argument("which", choices=CHECKS + ("all",))
    _add_config_flags(p)
    p = sub.add_parser("ci", help="fixed-orbital 5x5 eigenvalue table")
    p.add_argument("--orbitals", help="orbitals.csv from an earlier solve")
    _add_config_flags(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file {path} not found")
        data = json.loads(path.read_text())
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
    for f in fields(RunConfig):
        v = getattr(args, f.name)
        if v is not None:
            data[f.name] = v
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except (UsageError, ValueError) as err:
        print(f"spdbreak: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "solve":
            return cmd_solve(config)
        if args.command == "verify":
            return cmd_verify(args.which, config)
        return cmd_ci(config, args.orbitals)
    except UsageError as err:
        print(f"spdbreak: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
