"""Command line front end: ``oam-metrology {fringe,sensitivity,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import crosscheck, oracle
from .estimators import DEFAULT_PATTERNS, SCHEMES, build_state, scheme_photons
from .metrology import InsensitiveConfigurationError, ideal_noon_fringe, noon_offset, uncertainty_curve
from .operator_algebra import Arm, ModeId, OperatorPolynomial, Sign
from .optical_elements import DoveAngle, ModeTransform, compose_interferometer
from .propagation import DetectionPattern, FringeSample, fringe_scan
from .spdc_source import OamDistribution, mixed_l_two_photon

log = logging.getLogger("oam_metrology")

OUTPUT_DIR_ENV = "OAM_METROLOGY_OUTPUT_DIR"
DIGITS = 12
INSENSITIVE = "insensitive configuration"

DEFAULT_GRIDS = {
    "fringe": f"0:{math.pi!r}:361",
    "sensitivity": f"0:{math.pi / 2!r}:20161",
    "verify": f"0:{math.pi!r}:100",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scheme: str = "two_photon"
    l: int = 1
    n: int | None = None
    theta_start: float = 0.0
    theta_end: float = math.pi
    theta_steps: int = 361
    pattern: DetectionPattern | None = None
    output_format: str = "csv"
    seed: int = 0
    convention: str = "ket"
    distribution: OamDistribution | None = None

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.l < 0:
            raise ConfigError("l must be >= 0")
        if self.theta_steps < 2:
            raise ConfigError("theta grid needs at least 2 steps")
        if not self.theta_end > self.theta_start:
            raise ConfigError("theta_end must exceed theta_start")
        if self.scheme == "ideal_noon" and not self.n:
            raise ConfigError("--n is required for the ideal_noon scheme")
        if self.scheme != "ideal_noon" and self.n is not None and self.n != scheme_photons(self.scheme):
            raise ConfigError(f"{self.scheme} carries {scheme_photons(self.scheme)} photons, not {self.n}")
        if self.n is not None and self.n < 1:
            raise ConfigError("--n must be >= 1")
        if self.distribution is not None and self.scheme != "two_photon":
            raise ConfigError("--dist only applies to the two_photon scheme")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_end, self.theta_steps)

    @property
    def photons(self) -> int:
        return scheme_photons(self.scheme, self.n)

    def detection_pattern(self) -> DetectionPattern:
        if self.pattern is not None:
            return self.pattern
        return DetectionPattern.parse(DEFAULT_PATTERNS[self.scheme], self.l)


def parse_grid(text: str, degrees: bool = False) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"theta grid must be start:end:steps, got {text!r}")
    try:
        start, end, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad theta grid {text!r}: {exc}") from None
    if degrees:
        start, end = math.radians(start), math.radians(end)
    return start, end, steps


def _fmt(x: float) -> str:
    return f"{x:.{DIGITS}g}"


def _round(x: float):
    return float(_fmt(x)) if math.isfinite(x) else None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    grid_text = args.theta or DEFAULT_GRIDS[args.command]
    start, end, steps = parse_grid(grid_text, args.degrees)
    l = 1 if args.l is None else args.l
    pattern = None
    if args.pattern:
        try:
            pattern = DetectionPattern.parse(args.pattern, l)
        except ValueError as exc:
            raise ConfigError(f"bad --pattern: {exc}") from None
    dist = None
    if args.dist:
        try:
            dist = OamDistribution.from_json(args.dist)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load distribution {args.dist}: {exc}") from None
    cfg = RunConfig(
        scheme=args.scheme or "two_photon",
        l=l,
        n=args.n,
        theta_start=start,
        theta_end=end,
        theta_steps=steps,
        pattern=pattern,
        output_format=args.format or ("json" if args.command == "sensitivity" else "csv"),
        seed=args.seed,
        convention=args.convention,
        distribution=dist,
    )
    cfg.validate()
    return cfg


def input_state(cfg: RunConfig) -> OperatorPolynomial:
    if cfg.distribution is not None:
        return mixed_l_two_photon(cfg.distribution)
    return build_state(cfg.scheme, cfg.l, cfg.convention)


def run_fringe(cfg: RunConfig) -> list[FringeSample]:
    if cfg.scheme == "ideal_noon":
        if cfg.l == 0:
            value = math.cos(noon_offset(cfg.photons)) ** 2
            return [FringeSample(float(t), value, 1.0 if value > 0 else math.nan) for t in cfg.grid]
        return ideal_noon_fringe(cfg.photons, cfg.l, cfg.grid)
    return fringe_scan(input_state(cfg), cfg.detection_pattern(), cfg.grid)


def fringe_csv(samples: list[FringeSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta_rad", "raw", "normalized"])
    for s in samples:
        w.writerow([_fmt(s.theta), _fmt(s.raw), _fmt(s.normalized)])
    return buf.getvalue()


def fringe_json(cfg: RunConfig, samples: list[FringeSample]) -> str:
    doc = {
        "scheme": cfg.scheme,
        "l": cfg.l,
        "n_photons": cfg.photons,
        "pattern": str(cfg.detection_pattern()) if cfg.scheme != "ideal_noon" else None,
        "samples": [
            {"theta_rad": _round(s.theta), "raw": _round(s.raw), "normalized": _round(s.normalized)}
            for s in samples
        ],
    }
    return json.dumps(doc, indent=2)


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def cmd_fringe(cfg: RunConfig, output: str | None = None) -> int:
    samples = run_fringe(cfg)
    if cfg.l == 0:
        print(f"warning: {INSENSITIVE} (l = 0, the Dove prism imprints no phase)", file=sys.stderr)
    text = fringe_csv(samples) if cfg.output_format == "csv" else fringe_json(cfg, samples)
    _emit(text, output)
    return 0


def cmd_sensitivity(cfg: RunConfig, output: str | None = None) -> int:
    samples = run_fringe(cfg)
    try:
        if cfg.l == 0:
            raise InsensitiveConfigurationError(INSENSITIVE)
        report = uncertainty_curve(samples, cfg.photons, cfg.l)
    except InsensitiveConfigurationError:
        print(f"warning: {INSENSITIVE}", file=sys.stderr)
        doc = {"status": INSENSITIVE, "scheme": cfg.scheme, "l": cfg.l, "n_photons": cfg.photons}
        _emit(json.dumps(doc, indent=2) + "\n", output)
        return 0
    report.extra.update({
        "status": "ok",
        "scheme": cfg.scheme,
        "pattern": str(cfg.detection_pattern()) if cfg.scheme != "ideal_noon" else None,
    })
    text = report.to_json(DIGITS) + "\n" if cfg.output_format == "json" else report.to_csv(DIGITS)
    _emit(text, output)
    return 0


def generic_fock_input(n: int, l: int) -> OperatorPolynomial:
    """(s+)^ceil(n/2) (i-)^floor(n/2), normalized, for oracle checks beyond the two built-in states."""
    sp = ModeId(Arm.SIGNAL, Sign.PLUS, l)
    im = ModeId(Arm.IDLER, Sign.MINUS, l)
    a, b = (n + 1) // 2, n // 2
    norm = math.sqrt(math.factorial(a) * math.factorial(b))
    return OperatorPolynomial.monomial({sp: a, im: b}, 1 / norm)


def cmd_verify(cfg: RunConfig, ls: list[int], schemes: list[str], perturb: float = 0.0,
               random_samples: int = 0) -> int:
    if cfg.photons > oracle.PHOTON_CAP:
        raise ConfigError(f"{cfg.photons} photons exceeds the oracle cap of {oracle.PHOTON_CAP}")
    rng = np.random.default_rng(cfg.seed)
    thetas = np.concatenate([cfg.grid, rng.uniform(0, math.pi, random_samples)])

    def perturbed(angle: DoveAngle) -> ModeTransform:
        u = compose_interferometer(angle)
        m = u.entries.copy()
        m[0, 0] += perturb
        return ModeTransform(m, u.input_basis, u.output_basis, "perturbed")

    failures = 0
    worst_overall = 0.0
    for scheme in schemes:
        for l in ls:
            if scheme == "ideal_noon":
                state = generic_fock_input(cfg.photons, l)
            else:
                state = build_state(scheme, l, cfg.convention)
            res = crosscheck.compare(state, l, thetas, perturbed if perturb else None)
            dev = max(res.max_prob_error, res.max_amp_error, res.max_sum_error)
            worst_overall = max(worst_overall, dev)
            status = "ok" if res.passed() else "MISMATCH"
            print(f"{scheme} l={l}: {res.n_comparisons} comparisons, max prob dev {res.max_prob_error:.3e}, "
                  f"max amp dev {res.max_amp_error:.3e}, sum dev {res.max_sum_error:.3e} [{status}]")
            if not res.passed():
                failures += 1
                w = res.worst
                print(f"  offending theta={w.theta!r} pattern={w.pattern}", file=sys.stderr)
    print(f"max deviation {worst_overall:.3e}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scheme", choices=SCHEMES, default=None)
    common.add_argument("--l", type=int, default=None, help="OAM mode index magnitude")
    common.add_argument("--n", type=int, default=None, help="photon number (ideal_noon)")
    common.add_argument("--theta", default=None, help="grid start:end:steps (radians unless --degrees)")
    common.add_argument("--degrees", action="store_true", help="read the theta grid in degrees")
    common.add_argument("--pattern", default=None, help="detection pattern, e.g. 'a+:3,b-:1'")
    common.add_argument("--dist", default=None, help='OAM distribution JSON: {"weights": {"1": 0.5, "2": 0.5}}')
    common.add_argument("--convention", choices=("ket", "operator"), default="ket",
                        help="four-photon state normalization convention")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--output", "-o", default=None, help=f"output file (relative to ${OUTPUT_DIR_ENV} if set)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="oam-metrology", description="OAM angular-displacement interferometry")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fringe", parents=[common], help="coincidence fringe scan")
    sub.add_parser("sensitivity", parents=[common], help="angular uncertainty report")
    verify = sub.add_parser("verify", parents=[common], help="permanent-oracle cross-check")
    verify.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    verify.add_argument("--random-samples", type=int, default=0, help="extra random angles drawn with --seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "fringe":
            return cmd_fringe(cfg, args.output)
        if args.command == "sensitivity":
            return cmd_sensitivity(cfg, args.output)
        ls = [cfg.l] if args.l is not None else [1, 2, 3]
        schemes = [cfg.scheme] if args.scheme else ["two_photon", "four_photon"]
        return cmd_verify(cfg, ls, schemes, args.perturb, args.random_samples)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
