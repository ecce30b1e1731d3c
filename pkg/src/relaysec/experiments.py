"""Experiment specs, the runners behind each figure, and deterministic CSV output.

A spec is a small TOML file of flat dotted keys, for example::

    experiment = "secrecy_vs_jampower"
    seed = 0
    fading = "unit"
    config.noise_power = 0.01
    topology.jammers = [[0.3, 0.4], [0.6, 0.8]]
    sweep.variable = "pj"
    sweep.min = 0.0
    sweep.max = 10.0
    sweep.steps = 101

Anything left out takes the experiment's default.  :func:`dump_spec`
writes every field explicitly, so ``load_spec_text(dump_spec(s)) == s``.
"""

from __future__ import annotations

import io
import json
import math
import re
from dataclasses import asdict, dataclass, field, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .central import centralized_optimize, sufficiently_effective
from .channel import (FADING_MODES, ChannelGains, DomainError, NodePosition, SystemConfig,
                      Topology, derive_seed, sample_gains)
from .game import (Market, best_response_all, jammer_utility, run_stackelberg,
                   source_best_response, source_utility)
from .nojam import f_tilde, feasible_nonzero_secrecy, optimize_no_jammer
from .rates import PowerAllocation, received_jamming, secrecy_rates

EXPERIMENTS = (
    "nojam_surface",
    "secrecy_vs_jampower",
    "demand_vs_price",
    "two_jammer_price_grid",
    "rate_vs_num_jammers",
    "central_vs_distributed",
)
SCALES = ("linear", "log")
POWER_AXES = ("p1", "p2", "pr", "pj")


class SpecError(ValueError):
    """Malformed or invalid experiment spec."""


class ExperimentError(RuntimeError):
    """A numerical step failed; the message names the sweep coordinates."""


@dataclass(frozen=True)
class Sweep:
    variable: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.steps)
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class GameOptions:
    damping: float = 0.5
    tol: float = 1e-6
    max_iter: int = 500


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    topology: Topology
    config: SystemConfig
    sweep: Sweep
    sweep2: Sweep | None = None
    seed: int = 0
    fading: str = "rayleigh"
    draws: int = 1
    market: Market | None = None
    powers: tuple[float, float, float] = (10.0, 10.0, 10.0)
    gains: ChannelGains | None = None
    game: GameOptions = field(default_factory=GameOptions)
    require_convergence: bool = False

    def __post_init__(self):
        if self.market is None:
            n = self.topology.num_jammers
            object.__setattr__(self, "market", Market.uniform(n, _DEFAULT_PRICE))


# per-experiment defaults: fading, jammer positions, sweeps, draws
_RING = tuple((2.5 * math.cos(t), 2.5 * math.sin(t))
              for t in np.linspace(0.25 * math.pi, 1.75 * math.pi, 6))
_DEFAULTS = {
    "nojam_surface": dict(fading="rayleigh", jammers=(),
                          sweep=Sweep("p1", 0.5, 10.0, 20), sweep2=Sweep("p2", 0.5, 10.0, 20)),
    "secrecy_vs_jampower": dict(fading="unit", jammers=((0.3, 0.4),),
                                sweep=Sweep("pj", 0.0, 10.0, 101)),
    "demand_vs_price": dict(fading="unit", jammers=((0.3, 0.4),),
                            sweep=Sweep("price", 1e-3, 100.0, 51, "log")),
    "two_jammer_price_grid": dict(fading="unit", jammers=((0.3, 0.4), (0.5, 0.5)),
                                  sweep=Sweep("price1", 0.01, 100.0, 40, "log"),
                                  sweep2=Sweep("price2", 0.01, 100.0, 40, "log")),
    "rate_vs_num_jammers": dict(fading="rayleigh", jammers=_RING, draws=200,
                                sweep=Sweep("num_jammers", 0, 6, 7)),
    "central_vs_distributed": dict(fading="rayleigh", jammers=((1.0, 1.0),), draws=10,
                                   sweep=Sweep("rate_gain", 1.0, 1000.0, 4, "log")),
}
_SWEEP_VARIABLES = {
    "nojam_surface": (("p1", "p2", "pr"), ("p1", "p2", "pr")),
    "secrecy_vs_jampower": (("pj",), None),
    "demand_vs_price": (("price",), None),
    "two_jammer_price_grid": (("price1",), ("price2",)),
    "rate_vs_num_jammers": (("num_jammers",), None),
    "central_vs_distributed": (("rate_gain",), None),
}
_DEFAULT_PRICE = 10.0

_TOP_KEYS = {"experiment", "seed", "fading", "draws", "require_convergence",
             "config", "topology", "sweep", "sweep2", "market", "powers", "gains", "game"}
_SECTION_KEYS = {
    "config": {"noise_power", "bandwidth", "power_cap", "pathloss_exponent", "rate_gain"},
    "topology": {"source1", "source2", "relay", "jammers"},
    "sweep": {"variable", "min", "max", "steps", "scale"},
    "sweep2": {"variable", "min", "max", "steps", "scale"},
    "market": {"prices", "cost_exponents"},
    "powers": {"p1", "p2", "pr"},
    "gains": {"s1r", "s2r", "jammers"},
    "game": {"damping", "tol", "max_iter"},
}


# ---------------------------------------------------------------- loading

def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(r"^\s*" + re.escape(key).replace(r"\.", r"\s*\.\s*") + r"\s*=")
    for n, line in enumerate(text.splitlines(), 1):
        if pattern.match(line):
            return n
    return None


def _fail(text, key, message):
    line = _line_of(text, key) if key else None
    where = f"line {line} ({key}): " if line else (f"{key}: " if key else "")
    raise SpecError(where + message)


def _number(text, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(text, key, f"expected a number, got {value!r}")
    if kind is int:
        if not float(value).is_integer():
            _fail(text, key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _point(text, key, value):
    if not (isinstance(value, list) and len(value) == 2):
        _fail(text, key, f"expected [x, y], got {value!r}")
    return NodePosition(_number(text, key, value[0]), _number(text, key, value[1]))


def _vector(text, key, value):
    if not isinstance(value, list):
        _fail(text, key, f"expected a list of numbers, got {value!r}")
    return tuple(_number(text, key, v) for v in value)


def _sweep(text, section, raw, default):
    if default is None and not raw:
        return None
    base = default or Sweep("", 0.0, 1.0, 2)
    values = asdict(base)
    for k, v in raw.items():
        key = f"{section}.{k}"
        if k in ("variable", "scale"):
            if not isinstance(v, str):
                _fail(text, key, f"expected a string, got {v!r}")
            values[k] = v
        elif k == "steps":
            values[k] = _number(text, key, v, int)
        else:
            values[k] = _number(text, key, v)
    return Sweep(**values)


def load_spec_text(text: str) -> ExperimentSpec:
    """Parse and validate a spec; raises :class:`SpecError` with line context."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"malformed spec: {exc}") from None

    for key, value in raw.items():
        if key not in _TOP_KEYS:
            _fail(text, key, "unknown key")
        if key in _SECTION_KEYS:
            if not isinstance(value, dict):
                _fail(text, key, "expected a section of dotted keys")
            for sub in value:
                if sub not in _SECTION_KEYS[key]:
                    _fail(text, f"{key}.{sub}", "unknown key")

    name = raw.get("experiment")
    if name is None:
        _fail(text, None, "missing required key 'experiment'")
    if name not in EXPERIMENTS:
        _fail(text, "experiment", f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    defaults = _DEFAULTS[name]

    try:
        cfg_raw = {k: _number(text, f"config.{k}", v) for k, v in raw.get("config", {}).items()}
        config = SystemConfig(**cfg_raw)
    except DomainError as exc:
        _fail(text, "config", str(exc))

    top = raw.get("topology", {})
    try:
        kwargs = {k: _point(text, f"topology.{k}", top[k])
                  for k in ("source1", "source2", "relay") if k in top}
        if "jammers" in top:
            if not isinstance(top["jammers"], list):
                _fail(text, "topology.jammers", "expected a list of [x, y] pairs")
            jammers = tuple(_point(text, "topology.jammers", p) for p in top["jammers"])
        else:
            jammers = tuple(NodePosition(*p) for p in defaults["jammers"])
        topology = Topology(jammers=jammers, **kwargs)
    except DomainError as exc:
        _fail(text, "topology", str(exc))

    seed = _number(text, "seed", raw.get("seed", 0), int)
    if seed < 0:
        _fail(text, "seed", "seed must be >= 0")
    fading = raw.get("fading", defaults["fading"])
    if fading not in FADING_MODES:
        _fail(text, "fading", f"unknown fading {fading!r}; expected one of {FADING_MODES}")
    draws = _number(text, "draws", raw.get("draws", defaults.get("draws", 1)), int)
    if draws < 1:
        _fail(text, "draws", "draws must be >= 1")
    require = raw.get("require_convergence", False)
    if not isinstance(require, bool):
        _fail(text, "require_convergence", "expected true or false")

    sweep = _sweep(text, "sweep", raw.get("sweep", {}), defaults["sweep"])
    sweep2 = _sweep(text, "sweep2", raw.get("sweep2", {}), defaults.get("sweep2"))
    for section, s, allowed in (("sweep", sweep, _SWEEP_VARIABLES[name][0]),
                                ("sweep2", sweep2, _SWEEP_VARIABLES[name][1])):
        if s is None:
            continue
        if allowed is None:
            _fail(text, section, f"{name} takes no second sweep")
        _check_sweep(text, section, s, allowed, config, topology)
    if sweep2 is not None and name == "nojam_surface" and sweep2.variable == sweep.variable:
        _fail(text, "sweep2.variable", "both sweeps vary the same power")

    n = topology.num_jammers
    if name in ("demand_vs_price", "secrecy_vs_jampower", "central_vs_distributed") and n < 1:
        _fail(text, "topology.jammers", f"{name} needs at least one jammer")
    if name == "two_jammer_price_grid" and n != 2:
        _fail(text, "topology.jammers", f"{name} needs exactly two jammers, got {n}")

    mk = raw.get("market", {})
    prices = _vector(text, "market.prices", mk["prices"]) if "prices" in mk else (_DEFAULT_PRICE,) * n
    exps = (_vector(text, "market.cost_exponents", mk["cost_exponents"])
            if "cost_exponents" in mk else (1.0,) * n)
    if len(prices) != n:
        _fail(text, "market.prices", f"{len(prices)} prices for {n} jammers")
    try:
        market = Market(prices, exps)
    except DomainError as exc:
        _fail(text, "market", str(exc))

    pw = raw.get("powers", {})
    cap = config.power_cap
    powers = tuple(_number(text, f"powers.{k}", pw[k]) if k in pw else cap for k in ("p1", "p2", "pr"))
    for k, p in zip(("p1", "p2", "pr"), powers):
        if not 0 <= p <= cap:
            _fail(text, f"powers.{k}", f"must lie in [0, {cap}], got {p}")
    if not powers[2] > 0:
        _fail(text, "powers.pr", "relay power must be > 0")

    gains = None
    if "gains" in raw:
        gr = raw["gains"]
        if not {"s1r", "s2r"} <= set(gr):
            _fail(text, "gains", "a gains override needs both gains.s1r and gains.s2r")
        gj = _vector(text, "gains.jammers", gr["jammers"]) if "jammers" in gr else ()
        if len(gj) != n:
            _fail(text, "gains.jammers", f"{len(gj)} jammer gains for {n} jammers")
        try:
            gains = ChannelGains(_number(text, "gains.s1r", gr["s1r"]),
                                 _number(text, "gains.s2r", gr["s2r"]), gj)
        except DomainError as exc:
            _fail(text, "gains", str(exc))
        if draws > 1:
            _fail(text, "gains", "a fixed gains override cannot be combined with draws > 1")

    gm = raw.get("game", {})
    game = GameOptions(
        damping=_number(text, "game.damping", gm.get("damping", 0.5)),
        tol=_number(text, "game.tol", gm.get("tol", 1e-6)),
        max_iter=_number(text, "game.max_iter", gm.get("max_iter", 500), int),
    )
    if not 0 < game.damping <= 1:
        _fail(text, "game.damping", "must lie in (0, 1]")
    if not game.tol > 0 or game.max_iter < 1:
        _fail(text, "game", "tol must be > 0 and max_iter >= 1")

    return ExperimentSpec(name, topology, config, sweep, sweep2, seed, fading, draws,
                          market, powers, gains, game, require)


def _check_sweep(text, section, s, allowed, config, topology):
    if s.variable not in allowed:
        _fail(text, f"{section}.variable", f"expected one of {allowed}, got {s.variable!r}")
    if s.scale not in SCALES:
        _fail(text, f"{section}.scale", f"expected one of {SCALES}, got {s.scale!r}")
    if s.steps < 2:
        _fail(text, f"{section}.steps", f"steps must be >= 2, got {s.steps}")
    if not (math.isfinite(s.min) and math.isfinite(s.max) and s.min < s.max):
        _fail(text, section, f"need finite min < max, got [{s.min}, {s.max}]")
    if s.scale == "log" and s.min <= 0:
        _fail(text, f"{section}.min", "log sweeps need min > 0")
    if s.variable in POWER_AXES and not (0 <= s.min and s.max <= config.power_cap):
        _fail(text, section, f"power sweep must stay in [0, {config.power_cap}]")
    if s.variable == "pr" and s.min <= 0:
        _fail(text, f"{section}.min", "relay power sweep must start above 0")
    if s.variable in ("price", "price1", "price2", "rate_gain") and s.min < 0:
        _fail(text, f"{section}.min", "must be >= 0")
    if s.variable == "num_jammers":
        values = s.values()
        if s.scale != "linear" or not np.allclose(values, np.round(values), rtol=0, atol=1e-9):
            _fail(text, section, "num_jammers sweep must hit whole numbers")
        if s.min < 0 or s.max > topology.num_jammers:
            _fail(text, section, f"num_jammers must lie in [0, {topology.num_jammers}]")


def load_spec(path) -> ExperimentSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from None
    return load_spec_text(text)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return "[" + ", ".join(_fmt(v) for v in value) + "]"


def spec_items(spec: ExperimentSpec) -> list[tuple[str, str]]:
    """Every spec field as ``(dotted key, TOML value)``."""
    items = [("experiment", _fmt(spec.name)), ("seed", _fmt(spec.seed)),
             ("fading", _fmt(spec.fading)), ("draws", _fmt(spec.draws)),
             ("require_convergence", _fmt(spec.require_convergence))]
    for k, v in asdict(spec.config).items():
        items.append((f"config.{k}", _fmt(float(v))))
    t = spec.topology
    for k in ("source1", "source2", "relay"):
        node = getattr(t, k)
        items.append((f"topology.{k}", _fmt([node.x, node.y])))
    items.append(("topology.jammers", "[" + ", ".join(_fmt([j.x, j.y]) for j in t.jammers) + "]"))
    for section, s in (("sweep", spec.sweep), ("sweep2", spec.sweep2)):
        if s is None:
            continue
        items += [(f"{section}.variable", _fmt(s.variable)), (f"{section}.min", _fmt(float(s.min))),
                  (f"{section}.max", _fmt(float(s.max))), (f"{section}.steps", _fmt(s.steps)),
                  (f"{section}.scale", _fmt(s.scale))]
    items += [("market.prices", _fmt(spec.market.prices)),
              ("market.cost_exponents", _fmt(spec.market.cost_exponents))]
    for k, p in zip(("p1", "p2", "pr"), spec.powers):
        items.append((f"powers.{k}", _fmt(float(p))))
    if spec.gains is not None:
        items += [("gains.s1r", _fmt(spec.gains.g_s1r)), ("gains.s2r", _fmt(spec.gains.g_s2r)),
                  ("gains.jammers", _fmt(spec.gains.g_jr))]
    items += [("game.damping", _fmt(float(spec.game.damping))), ("game.tol", _fmt(float(spec.game.tol))),
              ("game.max_iter", _fmt(spec.game.max_iter))]
    return items


def dump_spec(spec: ExperimentSpec) -> str:
    return "".join(f"{k} = {v}\n" for k, v in spec_items(spec))


# ---------------------------------------------------------------- results

@dataclass
class ResultTable:
    """Rectangular numeric table plus ``#`` metadata lines."""

    columns: tuple[str, ...]
    rows: list[tuple[float, ...]]
    metadata: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        width = len(self.columns)
        for n, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {n} has {len(row)} cells, expected {width}")

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows], dtype=float)

    def to_csv(self) -> str:
        out = io.StringIO()
        for k, v in self.metadata:
            out.write(f"# {k} = {v}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(format(float(x), ".17g") for x in row) + "\n")
        return out.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def spec(self) -> ExperimentSpec:
        """The spec echoed in the metadata block."""
        text = "".join(f"{k[5:]} = {v}\n" for k, v in self.metadata if k.startswith("spec."))
        return load_spec_text(text)


def read_csv(text: str) -> ResultTable:
    metadata, lines = [], []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(" = ")
            metadata.append((key, value))
        elif line:
            lines.append(line)
    columns = tuple(lines[0].split(","))
    rows = [tuple(float(x) for x in line.split(",")) for line in lines[1:]]
    return ResultTable(columns, rows, metadata)


# ---------------------------------------------------------------- runners

def _frame_gains(spec: ExperimentSpec, draw: int = 0, topology: Topology | None = None):
    if spec.gains is not None:
        return spec.gains
    seed = spec.seed if spec.draws == 1 else derive_seed(spec.seed, draw)
    return sample_gains(topology or spec.topology, spec.config, seed, spec.fading)


def _sources(spec):
    p1, p2, pr = spec.powers
    return PowerAllocation(p1, p2, pr, ())


def _guard(where, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DomainError, ArithmeticError) as exc:
        raise ExperimentError(f"at {where}: {exc}") from exc


def _run_nojam_surface(spec):
    gains = _frame_gains(spec)
    cfg = spec.config
    base = dict(zip(("p1", "p2", "pr"), spec.powers))
    rows = []
    for x in spec.sweep.values():
        for y in spec.sweep2.values():
            point = dict(base, **{spec.sweep.variable: x, spec.sweep2.variable: y})
            powers = PowerAllocation(point["p1"], point["p2"], point["pr"], ())
            where = f"{spec.sweep.variable}={x:.6g}, {spec.sweep2.variable}={y:.6g}"
            report = _guard(where, secrecy_rates, powers, gains, cfg)
            ft = _guard(where, f_tilde, powers, gains, cfg)
            rows.append((powers.p1, powers.p2, powers.pr, report.c1s, report.c2s,
                         report.secrecy_sum, ft.value))
    meta = [("result.feasible", _fmt(feasible_nonzero_secrecy(gains, cfg)))]
    opt = _guard("optimum", optimize_no_jammer, gains, cfg, best_effort=True)
    meta += [("result.p1_opt", _fmt(opt.p1_opt)), ("result.p2_opt", _fmt(opt.p2_opt)),
             ("result.pr_opt", _fmt(opt.pr_opt)), ("result.secrecy_sum_opt", _fmt(opt.secrecy_sum)),
             ("result.case", _fmt(opt.case_tag))]
    return ("p1", "p2", "pr", "c1s", "c2s", "secrecy_sum", "f_tilde"), rows, meta, gains


def _run_secrecy_vs_jampower(spec):
    gains = _frame_gains(spec)
    n = gains.num_jammers
    rows = []
    for i in range(n):
        for x in spec.sweep.values():
            pj = np.zeros(n)
            pj[i] = x
            powers = _sources(spec).with_jamming(pj)
            report = _guard(f"jammer={i}, pj={x:.6g}", secrecy_rates, powers, gains, spec.config)
            rows.append((i, x, received_jamming(powers, gains), report.c1s, report.c2s,
                         report.secrecy_sum))
    return ("jammer", "pj", "received_jamming", "c1s", "c2s", "secrecy_sum"), rows, [], gains


def _run_demand_vs_price(spec):
    gains = _frame_gains(spec)
    n = gains.num_jammers
    cfg = spec.config
    rows = []
    for m in spec.sweep.values():
        market = spec.market.with_price(0, m)
        base = _sources(spec).with_jamming(np.zeros(n))
        p = _guard(f"price={m:.6g}", source_best_response, 0, gains, market, base, cfg)
        pj = np.zeros(n)
        pj[0] = p
        powers = base.with_jamming(pj)
        rows.append((m, p, source_utility(powers, gains, market, cfg),
                     jammer_utility(0, market, p), secrecy_rates(powers, gains, cfg).secrecy_sum))
    cols = ("price", "bought_power", "source_utility", "jammer_utility", "secrecy_sum")
    return cols, rows, [], gains


def _equilibrium_meta(spec, gains, config, market, prefix="result."):
    trace = run_stackelberg(gains, config, market, _sources(spec).with_jamming(
        (0.0,) * gains.num_jammers), damping=spec.game.damping, tol=spec.game.tol,
        max_iter=spec.game.max_iter)
    meta = [(prefix + "converged", _fmt(trace.converged)),
            (prefix + "iterations", _fmt(trace.iterations)),
            (prefix + "prices", _fmt(tuple(float(v) for v in trace.prices))),
            (prefix + "powers", _fmt(tuple(float(v) for v in trace.powers)))]
    return trace, meta


def _run_two_jammer_price_grid(spec):
    gains = _frame_gains(spec)
    cfg = spec.config
    base = _sources(spec).with_jamming((0.0, 0.0))
    rows = []
    for m1 in spec.sweep.values():
        start = None
        for m2 in spec.sweep2.values():
            market = spec.market.with_prices((m1, m2))
            where = f"price1={m1:.6g}, price2={m2:.6g}"
            pj = _guard(where, best_response_all, gains, market, base, cfg, start)
            start = pj
            powers = base.with_jamming(pj)
            rows.append((m1, m2, pj[0], pj[1], source_utility(powers, gains, market, cfg),
                         jammer_utility(0, market, pj[0]), jammer_utility(1, market, pj[1]),
                         secrecy_rates(powers, gains, cfg).secrecy_sum))
    trace, meta = _guard("equilibrium", _equilibrium_meta, spec, gains, cfg, spec.market)
    cols = ("price1", "price2", "bought_power1", "bought_power2", "source_utility",
            "jammer_utility1", "jammer_utility2", "secrecy_sum")
    return cols, rows, meta, gains, [trace.converged]


def _run_rate_vs_num_jammers(spec):
    cfg = spec.config
    counts = [int(round(v)) for v in spec.sweep.values()]
    n_max = max(counts)
    central = np.zeros((spec.draws, len(counts)))
    effective = np.zeros((spec.draws, len(counts)))
    for d in range(spec.draws):
        gains = _frame_gains(spec, d)
        for k, n in enumerate(counts):
            sub = gains.first(n)
            where = f"draw={d}, num_jammers={n}"
            opt = _guard(where, centralized_optimize, sub, spec.powers, cfg, seed=spec.seed)
            central[d, k] = opt.secrecy_sum
            effective[d, k] = sum(
                _guard(where, sufficiently_effective, sub, i, spec.powers, cfg, full=opt)
                for i in range(n))
    rows = [(n, central[:, k].mean(), central[:, k].std(), effective[:, k].mean(), spec.draws)
            for k, n in enumerate(counts)]
    cols = ("num_jammers", "central_secrecy_mean", "central_secrecy_std",
            "effective_jammers_mean", "draws")
    return cols, rows, [("result.max_jammers", _fmt(n_max))], None


def _run_central_vs_distributed(spec):
    n = spec.topology.num_jammers
    rows, flags = [], []
    for a in spec.sweep.values():
        cfg = spec.config.with_(rate_gain=float(a))
        # opening prices scale with the rate gain so every a starts alike
        market = spec.market.with_prices(np.asarray(spec.market.prices) * a)
        for d in range(spec.draws):
            gains = _frame_gains(spec, d)
            where = f"rate_gain={a:.6g}, draw={d}"
            opt = _guard(where, centralized_optimize, gains, spec.powers, cfg, seed=spec.seed)
            base = _sources(spec).with_jamming((0.0,) * n)
            trace = _guard(where, run_stackelberg, gains, cfg, market, base,
                           damping=spec.game.damping, tol=spec.game.tol,
                           max_iter=spec.game.max_iter)
            flags.append(trace.converged)
            dist = secrecy_rates(base.with_jamming(trace.powers), gains, cfg).secrecy_sum
            gap = opt.secrecy_sum - dist
            rel = gap / opt.secrecy_sum if opt.secrecy_sum > 0 else 0.0
            rows.append((a, d, gains.g_s1r, gains.g_s2r, *gains.g_jr, int(trace.converged),
                         trace.iterations, *trace.prices, *trace.powers, opt.secrecy_sum,
                         dist, gap, rel))
    cols = ("rate_gain", "draw", "g_s1r", "g_s2r", *(f"g_j{i}r" for i in range(1, n + 1)),
            "converged", "iterations", *(f"price{i}" for i in range(1, n + 1)),
            *(f"power{i}" for i in range(1, n + 1)), "central_secrecy", "distributed_secrecy",
            "gap", "relative_gap")
    return cols, rows, [], None, flags


_RUNNERS = {
    "nojam_surface": _run_nojam_surface,
    "secrecy_vs_jampower": _run_secrecy_vs_jampower,
    "demand_vs_price": _run_demand_vs_price,
    "two_jammer_price_grid": _run_two_jammer_price_grid,
    "rate_vs_num_jammers": _run_rate_vs_num_jammers,
    "central_vs_distributed": _run_central_vs_distributed,
}


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    """Run ``spec`` and return its table.

    The same spec always yields the same table, byte for byte once
    written.  ``result.nonconverged`` in the metadata counts game runs
    that hit ``max_iter``; they stay in the table, flagged per row where
    the experiment has a ``converged`` column.
    """
    out = _RUNNERS[spec.name](spec)
    cols, rows, meta, gains = out[:4]
    flags = out[4] if len(out) > 4 else []
    metadata = [("tool.version", f"relaysec {__version__}")]
    metadata += [("spec." + k, v) for k, v in spec_items(spec)]
    if gains is not None and spec.gains is None:
        metadata += [("result.gains.s1r", _fmt(gains.g_s1r)), ("result.gains.s2r", _fmt(gains.g_s2r)),
                     ("result.gains.jammers", _fmt(gains.g_jr))]
    metadata += meta
    metadata.append(("result.nonconverged", _fmt(sum(not f for f in flags))))
    table = ResultTable(cols, [tuple(float(v) for v in r) for r in rows], metadata)
    return table


def nonconverged_runs(table: ResultTable) -> int:
    for k, v in table.metadata:
        if k == "result.nonconverged":
            return int(v)
    return 0


def with_seed(spec: ExperimentSpec, seed: int) -> ExperimentSpec:
    if seed < 0:
        raise SpecError("seed must be >= 0")
    return replace(spec, seed=int(seed))
