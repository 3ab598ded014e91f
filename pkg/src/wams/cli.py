"""Command-line entry point: ``wams solve|sweep|recover|bilevel|energy``.

Configuration is a flat ``key = value`` file; ``--set key=value`` overrides
file entries. Every run writes ``manifest.txt`` listing each artifact's
SHA-256 and the hash of the effective configuration.

Exit status: 0 success, 1 ``--check`` mismatch, 2 invalid input, 3 solver failure.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import SolverError, ValidationError, WamsError

COMMANDS = ("solve", "sweep", "recover", "bilevel", "energy")

# documented keys per command (shared solver keys listed once)
SOLVER_KEYS = ("eps", "lam", "normalization", "v_floor", "tol", "max_outer", "outer_tol",
               "max_linear_iterations", "continuation_start")
KEYS = {
    "solve": ("u0", "weight", "weight_value", "weight_step") + SOLVER_KEYS,
    "sweep": ("domain", "step", "u0_piecewise", "weight", "weight_value", "weight_step", "mode",
              "eps", "lam", "normalization", "continuation_start", "eta", "h_ratio", "counts"),
    "recover": ("domain", "step", "u0_piecewise", "weight", "weight_value", "weight_step",
                "construction", "eps", "eta", "normalization", "counts", "jumps"),
    "bilevel": ("u0", "ug", "synthetic", "n", "seed", "sigma", "K", "alphas") + SOLVER_KEYS,
    "energy": ("u", "v", "u0", "u_piecewise", "weight", "weight_value", "weight_step",
               "eps", "lam", "normalization"),
}


class Config:
    """Flat string mapping with typed, key-naming accessors."""

    def __init__(self, entries: dict, source: str = "<flags>"):
        self.entries = dict(entries)
        self.source = source

    @classmethod
    def parse(cls, text: str, source: str) -> "Config":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{source}:{lineno}: expected 'key = value'")
            key, val = (t.strip() for t in line.split("=", 1))
            if not key:
                raise ValidationError(f"{source}:{lineno}: empty key")
            entries[key] = val
        return cls(entries, source)

    def canonical(self) -> str:
        return "".join(f"{k} = {self.entries[k]}\n" for k in sorted(self.entries))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def has(self, key):
        return key in self.entries

    def str(self, key, default=None):
        if key not in self.entries:
            if default is None:
                raise ValidationError(f"missing config key '{key}'")
            return default
        return self.entries[key]

    def float(self, key, default=None):
        if key not in self.entries and default is not None:
            return float(default)
        raw = self.str(key)
        try:
            return float(raw)
        except ValueError:
            raise ValidationError(f"config key '{key}': not a number: {raw!r}") from None

    def int(self, key, default=None):
        val = self.float(key, default)
        if val != int(val):
            raise ValidationError(f"config key '{key}': not an integer: {val}")
        return int(val)

    def floats(self, key, default=None):
        if key not in self.entries and default is not None:
            return [float(t) for t in default]
        raw = self.str(key).replace(",", " ").split()
        try:
            return [float(t) for t in raw]
        except ValueError:
            raise ValidationError(f"config key '{key}': expected numbers, got {self.entries[key]!r}") from None

    def path(self, key, base: Path) -> Path:
        p = Path(self.str(key))
        if not p.is_absolute():
            p = base / p
        if not p.is_file():
            raise ValidationError(f"config key '{key}': file not found: {p}")
        return p


# -- builders ---------------------------------------------------------------------

def _solver_config(cfg: Config, **defaults):
    from .solver import SolverConfig
    kw = {}
    for key, conv in (("eps", cfg.float), ("lam", cfg.float), ("v_floor", cfg.float),
                      ("tol", cfg.float), ("max_outer", cfg.int), ("outer_tol", cfg.float),
                      ("max_linear_iterations", cfg.int), ("continuation_start", cfg.float)):
        if cfg.has(key):
            kw[key] = conv(key)
    if cfg.has("normalization"):
        kw["normalization"] = cfg.str("normalization")
    for k, v in defaults.items():
        kw.setdefault(k, v)
    try:
        return SolverConfig(**kw)
    except TypeError as exc:
        raise ValidationError(f"solver configuration: {exc}") from None


def _domain(cfg: Config):
    vals = cfg.floats("domain")
    if len(vals) not in (2, 4):
        raise ValidationError("config key 'domain': expected 'lo hi' or 'x0 x1 y0 y1'")
    return [tuple(vals[i:i + 2]) for i in range(0, len(vals), 2)]


def _weight(cfg: Config, base: Path, domain=None):
    from .weights import WeightField, read_weight_file
    if cfg.has("weight"):
        w = read_weight_file(cfg.path("weight", base))
    elif cfg.has("weight_step"):
        x0, left, right = _triple(cfg, "weight_step")
        w = WeightField.step(domain, x0, left, right)
    elif cfg.has("weight_value"):
        w = WeightField.constant(domain, cfg.float("weight_value"))
    else:
        raise ValidationError("one of the config keys 'weight', 'weight_step', 'weight_value' is required")
    if domain is not None and not np.allclose(w.domain, domain, rtol=0, atol=1e-12):
        raise ValidationError(f"config key 'weight': domain {w.domain} differs from {tuple(domain)}")
    return w


def _triple(cfg, key):
    vals = cfg.floats(key)
    if len(vals) != 3:
        raise ValidationError(f"config key '{key}': expected 'x0 left right'")
    return vals


def _piecewise(cfg: Config, base: Path, key="u0_piecewise"):
    from .fields import PiecewiseField, read_piecewise
    if cfg.has(key):
        return read_piecewise(cfg.path(key, base))
    x0, left, right = _triple(cfg, "step")
    return PiecewiseField.step(_domain(cfg), x0, left, right)


def _field(cfg: Config, key: str, base: Path):
    from .fields import read_field
    p = cfg.path(key, base)
    try:
        return read_field(p)
    except ValidationError as exc:
        raise ValidationError(f"config key '{key}' ({p}): {exc}") from None


def _write_field(f, out: Path, stem: str):
    from .fields import write_field
    if f.grid.dim == 2:
        p = out / f"{stem}.pgm"
        write_field(f, p)
        return [p, Path(str(p) + ".scale")]
    p = out / f"{stem}.csv"
    write_field(f, p)
    return [p]


def _trace_csv(trace) -> str:
    from .energy import CSV_HEADER
    return CSV_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in trace)


# -- commands ---------------------------------------------------------------------

def cmd_solve(cfg: Config, base: Path, out: Path):
    from .solver import alternate
    u0 = _field(cfg, "u0", base)
    w = _weight(cfg, base, u0.grid.bounds)
    res = alternate(u0, w, _solver_config(cfg))
    paths = _write_field(res.u, out, "u") + _write_field(res.v, out, "v")
    p = out / "energy.csv"
    p.write_text(_trace_csv(res.trace))
    s = out / "status.txt"
    s.write_text(f"iterations {res.iterations}\nconverged {int(res.converged)}\n"
                 f"stages {' '.join(map(str, res.stage_iterations))}\n")
    return paths + [p, s]


def cmd_sweep(cfg: Config, base: Path, out: Path):
    from .gammalab import Scenario, SweepPlan, gamma_sweep
    u0 = _piecewise(cfg, base)
    w = _weight(cfg, base, u0.domain)
    sc = Scenario(u0, w, mode=cfg.str("mode", "solve"), lam=cfg.float("lam", 1.0),
                  normalization=cfg.str("normalization", "quarter"),
                  continuation_start=cfg.float("continuation_start") if cfg.has("continuation_start") else None,
                  eta=cfg.float("eta", 0.1))
    eps = cfg.floats("eps", [0.1 / 2 ** k for k in range(5)])
    counts = tuple(int(c) for c in cfg.floats("counts")) if cfg.has("counts") else None
    plan = SweepPlan(sc, tuple(eps), h_ratio=cfg.float("h_ratio", 20.0), counts=counts)
    rep = gamma_sweep(plan)
    p1, p2 = out / "sweep.csv", out / "verdict.txt"
    p1.write_text(rep.to_csv())
    p2.write_text(rep.verdict_text())
    if rep.error:
        raise _PartialFailure(rep.error, [p1, p2])
    return [p1, p2]


def cmd_recover(cfg: Config, base: Path, out: Path):
    from .energy import at_energy
    from .fields import Grid, read_jumps
    from .profiles import (optimal_profile, recovery_pair_continuous, recovery_pair_jump,
                           recovery_v_multiD)
    kind = cfg.str("construction", "jump")
    eps = cfg.float("eps")
    norm = cfg.str("normalization", "quarter")
    if kind == "multiD":
        js = read_jumps(cfg.path("jumps", base))
        counts = tuple(int(c) for c in cfg.floats("counts"))
        g = Grid(_domain(cfg), counts)
        v = recovery_v_multiD(js, g, eps)
        return _write_field(v, out, "v")
    u = _piecewise(cfg, base)
    prof = optimal_profile(cfg.float("eta", 0.1))
    if kind == "jump":
        w = _weight(cfg, base, u.domain)
        pair = recovery_pair_jump(u, w, eps, prof, norm=norm)
    elif kind == "continuous":
        w = _weight(cfg, base, u.domain) if any(cfg.has(k) for k in ("weight", "weight_step", "weight_value")) else None
        pair = recovery_pair_continuous(u, eps, prof, norm=norm)
    else:
        raise ValidationError(f"config key 'construction': expected jump, continuous or multiD, got {kind!r}")
    paths = _write_field(pair.u, out, "u") + _write_field(pair.v, out, "v")
    if w is not None:
        p = out / "energy.csv"
        p.write_text(_trace_csv([at_energy(pair.u, pair.v, w, eps, norm)]))
        paths.append(p)
    return paths


def cmd_bilevel(cfg: Config, base: Path, out: Path):
    from .bilevel import DEFAULT_ALPHAS, DEFAULT_EPS, dyadic_partition, train, two_noise_synthetic
    if cfg.has("synthetic"):
        if cfg.str("synthetic") != "two_noise":
            raise ValidationError("config key 'synthetic': only 'two_noise' is available")
        sig = cfg.floats("sigma", [0.3, 0.03])
        if len(sig) != 2:
            raise ValidationError("config key 'sigma': expected two noise levels")
        u0, ug = two_noise_synthetic(cfg.int("n", 256), tuple(sig), cfg.int("seed", 0))
    else:
        u0, ug = _field(cfg, "u0", base), _field(cfg, "ug", base)
    ks = [int(k) for k in cfg.floats("K", [0, 1])]
    alphas = cfg.floats("alphas", DEFAULT_ALPHAS)
    scfg = _solver_config(cfg, eps=DEFAULT_EPS)
    res = train(u0, ug, [dyadic_partition(u0.grid.bounds, k) for k in ks], alphas, scfg)
    return res.write(out)


def cmd_energy(cfg: Config, base: Path, out: Path):
    from .energy import at_energy, ms_energy
    from .fields import ScalarField
    if cfg.has("u_piecewise"):
        u = _piecewise(cfg, base, "u_piecewise")
        w = _weight(cfg, base, u.domain)
        rep = ms_energy(u, w)
    else:
        u = _field(cfg, "u", base)
        v = _field(cfg, "v", base) if cfg.has("v") else ScalarField.constant(u.grid, 1.0)
        w = _weight(cfg, base, u.grid.bounds)
        lam = cfg.float("lam", 0.0)
        u0 = _field(cfg, "u0", base) if cfg.has("u0") else None
        rep = at_energy(u, v, w, cfg.float("eps", 0.1), cfg.str("normalization", "quarter"), lam, u0)
    p = out / "energy.csv"
    p.write_text(_trace_csv([rep]))
    return [p]


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "recover": cmd_recover,
            "bilevel": cmd_bilevel, "energy": cmd_energy}


class _PartialFailure(WamsError):
    def __init__(self, message, paths):
        super().__init__(message)
        self.paths = paths


# -- manifest -------------------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, paths, cfg: Config, command: str) -> Path:
    lines = [f"command {command}", f"config_sha256 {cfg.hash()}"]
    for p in sorted(set(paths)):
        lines.append(f"{_sha256(p)}  {p.relative_to(out).as_posix()}")
    m = out / "manifest.txt"
    m.write_text("\n".join(lines) + "\n")
    return m


def read_manifest(path: Path) -> dict:
    if not path.is_file():
        raise ValidationError(f"manifest not found: {path}")
    entries = {}
    for line in path.read_text().splitlines():
        if line.startswith(("command ", "config_sha256 ")):
            k, v = line.split(" ", 1)
            entries[k] = v
        elif line.strip():
            digest, name = line.split("  ", 1)
            entries[name] = digest
    return entries


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wams", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat 'key = value' file; 'scenario:<name>' loads a shipped one")
    ap.add_argument("--out", default=None, help="output directory (default: config key 'out' or '.')")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (repeatable)")
    ap.add_argument("--check", action="store_true",
                    help="re-run and compare against the manifest in the output directory")
    return ap


def load_config(spec, overrides):
    base = Path.cwd()
    if spec is None:
        cfg = Config({})
    elif spec.startswith("scenario:"):
        name = spec.split(":", 1)[1]
        res = resources.files("wams") / "scenarios" / f"{name}.cfg"
        if not res.is_file():
            raise ValidationError(f"unknown shipped scenario {name!r}")
        cfg = Config.parse(res.read_text(), spec)
    else:
        p = Path(spec)
        if not p.is_file():
            raise ValidationError(f"config file not found: {p}")
        cfg = Config.parse(p.read_text(), str(p))
        base = p.resolve().parent
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = (t.strip() for t in item.split("=", 1))
        cfg.entries[k] = v
    unknown = set(cfg.entries) - {"out"} - set(KEYS_ALL)
    if unknown:
        raise ValidationError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return cfg, base


KEYS_ALL = sorted({k for ks in KEYS.values() for k in ks})


def _execute(command, cfg, base, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    try:
        paths = HANDLERS[command](cfg, base, out)
    except _PartialFailure as exc:
        write_manifest(out, exc.paths, cfg, command)
        raise SolverError(str(exc)) from None
    write_manifest(out, paths, cfg, command)
    return paths


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, base = load_config(args.config, args.set)
        out = Path(args.out or cfg.entries.get("out", "."))
        if args.check:
            return _check(args.command, cfg, base, out)
        _execute(args.command, cfg, base, out)
    except SolverError as exc:
        print(f"wams: solver failure: {exc}", file=sys.stderr)
        return 3
    except (WamsError, OSError) as exc:
        print(f"wams: error: {exc}", file=sys.stderr)
        return 2
    return 0


def _check(command, cfg, base, out: Path) -> int:
    recorded = read_manifest(out / "manifest.txt")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        _execute(command, cfg, base, tmp)
        fresh = read_manifest(tmp / "manifest.txt")
    bad = sorted(k for k in set(recorded) | set(fresh) if recorded.get(k) != fresh.get(k))
    for name, digest in recorded.items():
        if name in ("command", "config_sha256"):
            continue
        f = out / name
        if not f.is_file() or _sha256(f) != digest:
            bad.append(f"{name} (on disk)")
    for k in bad:
        print(f"mismatch: {k}", file=sys.stderr)
    if bad:
        return 1
    print(f"manifest ok: {len(fresh) - 2} artifacts")
    return 0


if __name__ == "__main__":
    sys.exit(main())
