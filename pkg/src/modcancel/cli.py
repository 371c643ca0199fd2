"""Command-line front end: ``verify --suite thm31 --d 2 --a 2 --b 1``.

Exit codes: 0 all checks pass (flagged counts as pass), 1 a check failed,
2 usage error, 3 internal error inside a check, 4 output not writable.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from . import verifier as V
from .charforms import GeometrySpec
from .errors import EngineError
from .theta import inject_fault

SUITES = ("all", "foundations", "thm31", "thm41", "thm51", "corollaries", "agw")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


def parse_tau(text: str) -> complex:
    raw = text.strip().replace(" ", "").replace("i", "j")
    if raw in ("j", "+j"):
        raw = "1j"
    elif raw == "-j":
        raw = "-1j"
    try:
        tau = complex(raw)
    except ValueError:
        raise UsageError(f"cannot parse tau sample {text!r}") from None
    if tau.imag <= 0:
        raise UsageError(f"tau sample {text!r} must have positive imaginary part")
    return tau


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    suite: str = "all"
    d: int = 1
    k: int = 1
    a: tuple[int, ...] = (1,)
    b: tuple[int, ...] = (1,)
    q_order: int = 8
    tau_samples: tuple[complex, ...] = V.DEFAULT_TAUS
    tol: float = V.DEFAULT_TOL
    format: str = "json"
    out: str | None = None
    inject_fault: str | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}")
        if self.d < 1 or self.k < 1:
            raise UsageError("d and k must be positive")
        if len(self.a) != len(self.b):
            raise UsageError(f"a and b have different lengths ({len(self.a)} vs {len(self.b)})")
        if len(self.a) != self.k:
            raise UsageError(f"a and b must have length k={self.k}")
        if self.q_order < 4:
            raise UsageError("q-order must be at least 4")
        if any(t.imag <= 0 for t in self.tau_samples):
            raise UsageError("tau samples must lie in the upper half plane")
        if not self.tol > 0:
            raise UsageError("tol must be positive")
        if self.format not in ("json", "markdown"):
            raise UsageError(f"unknown format {self.format!r}")

    @property
    def n8(self) -> int:
        return 8 * self.q_order

    def spec(self, d: int | None = None) -> GeometrySpec:
        return GeometrySpec(d or self.d, self.k, self.a, self.b, False, self.n8)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "d": self.d,
            "k": self.k,
            "a": list(self.a),
            "b": list(self.b),
            "q_order": self.q_order,
            "tau_samples": [[t.real, t.imag] for t in self.tau_samples],
            "tol": self.tol,
            "format": self.format,
        }


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Exact and numeric checks of the cancellation formulas.")
    p.add_argument("--config", help="line-oriented 'key = value' file; flags override it")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--d", type=int, help="manifold dimension is 4d")
    p.add_argument("--k", type=int, help="number of (a_t, b_t) pairs")
    p.add_argument("--a", help="comma-separated integers a_1,...,a_k")
    p.add_argument("--b", help="comma-separated integers b_1,...,b_k")
    p.add_argument("--q-order", type=int, dest="q_order", help="truncation in integer powers of q")
    p.add_argument("--tau", help='samples separated by ";" e.g. "0.11+1.03i;1i"')
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=("json", "markdown"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)
    return p


_KEYS = {"suite", "d", "k", "a", "b", "q_order", "tau", "tol", "format", "out"}


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def parse_config(argv: list[str] | None = None, config_file: str | None = None) -> RunConfig:
    """Flags override the config file, which overrides the defaults.

    Raises :class:`UsageError` for invalid values.
    """
    ns = _build_parser().parse_args(argv or [])
    raw: dict[str, object] = {}
    path = ns.config or config_file
    if path:
        try:
            raw.update(read_config_file(path))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for key in _KEYS | {"inject_fault"}:
        attr = "tau" if key == "tau" else key
        val = getattr(ns, attr, None)
        if val is not None:
            raw[key] = val
    kw: dict[str, object] = {}
    try:
        for key in ("d", "k", "q_order"):
            if key in raw:
                kw[key] = int(raw[key])
        if "tol" in raw:
            kw["tol"] = float(raw["tol"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for key in ("suite", "format", "out", "inject_fault"):
        if key in raw:
            kw[key] = str(raw[key])
    for key in ("a", "b"):
        if key in raw:
            kw[key] = _int_list(raw[key])
    k = kw.get("k", len(kw.get("a", kw.get("b", (1,)))))
    kw["k"] = k
    kw.setdefault("a", (1,) * k)
    kw.setdefault("b", (1,) * k)
    if "tau" in raw:
        kw["tau_samples"] = tuple(parse_tau(t) for t in str(raw["tau"]).split(";") if t.strip())
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# running


@dataclass
class Report:
    version: str
    config: dict
    checks: list[V.CheckResult]
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.summary:
            self.summary = summarize(self.checks)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "summary": self.summary,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(data["version"], data["config"], [V.CheckResult.from_json(c) for c in data["checks"]], data["summary"])

    @property
    def exit_code(self) -> int:
        statuses = {c.status for c in self.checks}
        if "error" in statuses:
            return EXIT_INTERNAL
        if "fail" in statuses:
            return EXIT_FAIL
        return EXIT_OK


def summarize(checks: list[V.CheckResult]) -> dict:
    out = {"passed": 0, "failed": 0, "flagged": 0}
    for c in checks:
        key = {"pass": "passed", "fail": "failed", "flagged": "flagged"}.get(c.status)
        if key:
            out[key] += 1
        else:
            out["errors"] = out.get("errors", 0) + 1
    return out


def _guard(cid: str, fn: Callable[[], object]) -> list[V.CheckResult]:
    try:
        res = fn()
    except EngineError as exc:
        return [V.CheckResult(cid, "error", None, None, {"error": f"{type(exc).__name__}: {exc}"}, cid)]
    except Exception as exc:  # a crash is reported, not raised
        tb = traceback.format_exception_only(type(exc), exc)[-1].strip()
        return [V.CheckResult(cid, "error", None, None, {"error": tb}, cid)]
    return list(res) if isinstance(res, list) else [res]


def _suite_checks(cfg: RunConfig, suite: str) -> list[V.CheckResult]:
    taus, tol = cfg.tau_samples, cfg.tol
    num_n8 = max(V.NUMERIC_N8, cfg.n8)
    out: list[V.CheckResult] = []
    if suite == "foundations":
        out += _guard("foundations", lambda: V.foundation_checks(cfg.n8, taus, tol))
    elif suite in ("thm31", "thm41", "thm51"):
        kind, forms = {"thm31": ("Q", "Q"), "thm41": ("Qbar", "Qbar"), "thm51": ("CS", "CSPhi")}[suite]
        spec = cfg.spec()
        if suite == "thm31":
            out += _guard("thm31", lambda: V.check_ab_cancellation(spec, taus, tol))
        elif suite == "thm41":
            out += _guard("thm41", lambda: V.check_eta_cancellation(spec, taus, tol))
        else:
            out += _guard("thm51", lambda: V.check_transgression(spec, taus, tol, num_n8))
        out += _guard(f"{suite}.s_relation", lambda: V.check_s_relation(kind, spec, taus, tol, num_n8))
        for i in (1, 2, 3):
            fid = f"{forms}{i}"
            res = _guard(f"modularity.{fid}", lambda fid=fid: V.check_modularity(fid, None, None, spec, taus, tol, num_n8))
            for r in res:
                r.id = f"{suite}.{r.id}"
            out += res
    elif suite == "corollaries":
        for cid in V.COROLLARIES:
            out += _guard(cid, lambda cid=cid: V.check_corollary(cid, cfg.spec(1)))
    elif suite == "agw":
        out += _guard("agw", lambda: V.check_agw(3))
    return out


def run_suite(cfg: RunConfig) -> Report:
    suites = SUITES[1:] if cfg.suite == "all" else (cfg.suite,)
    fault = inject_fault(cfg.inject_fault) if cfg.inject_fault else contextlib.nullcontext()
    V.clear_cache()
    try:
        with fault:
            checks = [c for s in suites for c in _suite_checks(cfg, s)]
    finally:
        V.clear_cache()
    checks.sort(key=lambda c: c.id)
    return Report(__version__, cfg.to_json(), checks)


# ---------------------------------------------------------------------------
# output


def render_json(report: Report) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> Report:
    return Report.from_json(json.loads(text))


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def render_markdown(report: Report) -> str:
    cfg = report.config
    lines = [
        f"# Verification report (version {report.version})",
        "",
        f"suite `{cfg['suite']}`, d={cfg['d']}, k={cfg['k']}, a={cfg['a']}, b={cfg['b']}, "
        f"q-order {cfg['q_order']}, tol {cfg['tol']:g}",
        "",
        "| id | check | status | first differing q-index | max numeric error |",
        "|---|---|---|---|---|",
    ]
    for c in report.checks:
        label = c.description or c.id
        lines.append(f"| `{c.id}` | {label} | {c.status} | {_cell(c.exact_residual_order)} | {_cell(c.numeric_max_error)} |")
    s = report.summary
    lines += ["", f"passed {s['passed']}, failed {s['failed']}, flagged {s['flagged']}"
              + (f", errors {s['errors']}" if s.get("errors") else "")]
    flagged = [c for c in report.checks if c.status == "flagged"]
    for c in flagged:
        lines.append(f"- `{c.id}` flagged: {json.dumps(c.extracted, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "json", out: str | None = None) -> None:
    """Write the report; raises OSError when ``out`` is not writable."""
    text = render_json(report) if fmt == "json" else render_markdown(report)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_OK
    report = run_suite(cfg)
    try:
        emit_report(report, cfg.format, cfg.out)
    except OSError as exc:
        print(f"verify: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
