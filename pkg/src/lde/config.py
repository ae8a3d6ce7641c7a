"""Strict JSON scenario configuration.

Unknown keys, wrong types and missing scenario requirements are all rejected
before any computation, with the JSON line of the offending key in the
message.
"""
import dataclasses
import json
import math
import typing
from dataclasses import dataclass, field
from typing import List, Optional

from .errors import ConfigError, InvalidSpec
from .lattice import BOUNDARIES, MODELS, PROBE_LABELS, PROBE_NORMS, ChainSpec, CouplingTerm, ProbeSpec

SCENARIOS = {
    "heisenberg_ed": "exact chi0(r) of a spin-1/2 Heisenberg chain (Lehmann or correction vector)",
    "heisenberg_cft": "bosonization chi0(r/L) of the periodic Heisenberg ring, optional amplitude fit to ED",
    "aklt_sma": "single-mode-approximation chi0(r) of the AKLT chain: closed form and quadrature",
    "aklt_ed": "exact chi0(r) of the spin-1 bilinear-biquadratic chain",
    "effective_hamiltonian": "second-order probe Hamiltonian, its decomposition and validity report",
    "perturbation_validation": "exact chain+probe splittings against the second-order prediction",
    "thermal_scan": "thermal negativity of the probe pair and the entanglement threshold",
}
METHODS = ("auto", "lehmann", "correction_vector")
CFT_VARIANTS = ("real_time", "imaginary_time")


@dataclass(frozen=True)
class ChainConfig:
    model: str = field(metadata={"choices": MODELS})
    L: int
    boundary: str = field(default="open", metadata={"choices": BOUNDARIES})
    biquadratic_beta: float = 1.0 / 3.0

    def spec(self) -> ChainSpec:
        return ChainSpec(self.model, self.L, self.biquadratic_beta, self.boundary)


@dataclass(frozen=True)
class CouplingConfig:
    probe: str = field(metadata={"choices": ("a", "b")})
    chain_operator: str = field(metadata={"choices": ("Sx", "Sy", "Sz")})
    probe_operator: str = field(metadata={"choices": PROBE_LABELS})
    strength: float


@dataclass(frozen=True)
class ProbeConfig:
    site_m: int = 1
    site_n: Optional[int] = None
    coupling: str = field(default="heisenberg", metadata={"choices": ("heisenberg", "custom")})
    J_a: float = 1.0
    J_b: Optional[float] = None
    probe_norm: str = field(default="pauli", metadata={"choices": PROBE_NORMS})
    couplings: Optional[List[CouplingConfig]] = None

    def spec(self) -> ProbeSpec:
        if self.coupling == "heisenberg":
            return ProbeSpec.heisenberg(self.site_m, self.site_n, self.J_a, self.J_b, self.probe_norm)
        terms = [CouplingTerm(self.site_m if c.probe == "a" else self.site_n, c.chain_operator,
                              c.probe, c.probe_operator, c.strength) for c in self.couplings]
        return ProbeSpec(self.site_m, self.site_n, tuple(terms), 2, self.probe_norm)


@dataclass(frozen=True)
class SweepConfig:
    r: Optional[List[int]] = None
    beta: Optional[List[float]] = None
    J_p: Optional[List[float]] = None


@dataclass(frozen=True)
class AnalyticConfig:
    amplitude: float = 1.0
    fermi_velocity: float = math.pi / 2
    fit_amplitude: bool = False
    reference_r: Optional[int] = None
    variant: str = field(default="real_time", metadata={"choices": CFT_VARIANTS})
    J_p: float = 1.0
    coupling: Optional[float] = None


@dataclass(frozen=True)
class OutputConfig:
    path: str
    format: str = field(default="csv", metadata={"choices": ("csv", "json")})


@dataclass(frozen=True)
class Tolerances:
    lanczos: float = 1e-11
    linear: float = 1e-12
    threshold: float = 1e-10


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = field(metadata={"choices": tuple(SCENARIOS)})
    output: OutputConfig
    chain: Optional[ChainConfig] = None
    probes: Optional[ProbeConfig] = None
    sweep: SweepConfig = field(default_factory=SweepConfig)
    analytic: AnalyticConfig = field(default_factory=AnalyticConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    method: str = field(default="auto", metadata={"choices": METHODS})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class _Locator:
    """Best-effort line numbers for key paths in the raw JSON text."""

    def __init__(self, text: str):
        self.text = text

    def line(self, path) -> Optional[int]:
        pos = 0
        for key in path:
            if isinstance(key, int):
                continue
            hit = self.text.find(json.dumps(key), pos)
            if hit < 0:
                return None
            pos = hit
        return self.text.count("\n", 0, pos) + 1 if path else 1


def _fail(loc: _Locator, path, msg: str):
    where = ".".join(str(p) for p in path) or "<root>"
    line = loc.line(path)
    prefix = f"line {line}: " if line else ""
    raise ConfigError(f"{prefix}{where}: {msg}")


def _coerce(value, typ, loc, path, choices=None):
    origin = typing.get_origin(typ)
    args = typing.get_args(typ)
    if origin is typing.Union:
        if value is None:
            return None
        typ = next(a for a in args if a is not type(None))
        return _coerce(value, typ, loc, path, choices)
    if origin in (list, List):
        if not isinstance(value, list):
            _fail(loc, path, f"expected a list, got {type(value).__name__}")
        return [_coerce(v, args[0], loc, path + [i]) for i, v in enumerate(value)]
    if dataclasses.is_dataclass(typ):
        return _build(typ, value, loc, path)
    if typ is bool:
        if not isinstance(value, bool):
            _fail(loc, path, f"expected true/false, got {value!r}")
    elif typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            _fail(loc, path, f"expected an integer, got {value!r}")
    elif typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            _fail(loc, path, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            _fail(loc, path, "number must be finite")
    elif typ is str:
        if not isinstance(value, str):
            _fail(loc, path, f"expected a string, got {value!r}")
    if choices and value not in choices:
        _fail(loc, path, f"{value!r} is not allowed; choose one of: {', '.join(choices)}")
    return value


def _build(cls, data, loc, path):
    if not isinstance(data, dict):
        _fail(loc, path, f"expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        _fail(loc, path + [unknown[0]], f"unknown key {unknown[0]!r}; allowed keys: {', '.join(fields)}")
    kwargs = {}
    for name, f in fields.items():
        if name in data:
            kwargs[name] = _coerce(data[name], hints[name], loc, path + [name],
                                   f.metadata.get("choices"))
        elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
            _fail(loc, path, f"missing required key {name!r}")
    return cls(**kwargs)


def _require(cond, loc, path, msg):
    if not cond:
        _fail(loc, path, msg)


def _check_scenario(cfg: ScenarioConfig, loc: _Locator) -> None:
    s = cfg.scenario
    needs_chain = s in ("heisenberg_ed", "heisenberg_cft", "aklt_ed", "effective_hamiltonian",
                        "perturbation_validation")
    if s == "thermal_scan" and cfg.analytic.coupling is None:
        needs_chain = True
    if needs_chain:
        _require(cfg.chain is not None, loc, [], f"scenario {s!r} needs a 'chain' section")
    if s in ("heisenberg_ed", "heisenberg_cft", "aklt_sma", "aklt_ed"):
        _require(bool(cfg.sweep.r), loc, ["sweep"], f"scenario {s!r} needs a non-empty sweep.r list")
        for r in cfg.sweep.r:
            _require(r >= 1, loc, ["sweep", "r"], "separations must be >= 1")
    if s in ("heisenberg_ed", "heisenberg_cft"):
        _require(cfg.chain.model == "heisenberg_spin_half", loc, ["chain", "model"],
                 f"scenario {s!r} needs model 'heisenberg_spin_half'")
    if s == "aklt_ed":
        _require(cfg.chain.model == "bilinear_biquadratic_spin1", loc, ["chain", "model"],
                 "scenario 'aklt_ed' needs model 'bilinear_biquadratic_spin1'")
    if s == "heisenberg_cft":
        _require(cfg.chain.boundary == "periodic", loc, ["chain", "boundary"],
                 "the ring formula needs boundary 'periodic'")
        for r in cfg.sweep.r:
            _require(2 * r <= cfg.chain.L, loc, ["sweep", "r"], f"r={r} exceeds L/2")
        if cfg.analytic.fit_amplitude:
            _require(cfg.analytic.reference_r is not None, loc, ["analytic"],
                     "fit_amplitude needs analytic.reference_r")
            _require(1 <= cfg.analytic.reference_r and 2 * cfg.analytic.reference_r < cfg.chain.L,
                     loc, ["analytic", "reference_r"], "reference_r must satisfy 1 <= r < L/2")
    if s in ("heisenberg_ed", "aklt_ed") and cfg.chain.boundary == "open":
        m = cfg.probes.site_m if cfg.probes else 1
        for r in cfg.sweep.r:
            _require(m + r <= cfg.chain.L, loc, ["sweep", "r"], f"site {m}+{r} lies beyond the open chain")
    if s in ("effective_hamiltonian", "perturbation_validation") or (s == "thermal_scan" and needs_chain):
        _require(cfg.probes is not None, loc, [], f"scenario {s!r} needs a 'probes' section")
        _require(cfg.probes.site_n is not None, loc, ["probes"], "probes.site_n is required")
        if cfg.probes.coupling == "custom":
            _require(bool(cfg.probes.couplings), loc, ["probes"],
                     "custom coupling needs a non-empty probes.couplings list")
    if s == "perturbation_validation":
        _require(bool(cfg.sweep.J_p), loc, ["sweep"], "scenario needs a non-empty sweep.J_p list")
    if s == "thermal_scan":
        _require(bool(cfg.sweep.beta), loc, ["sweep"], "scenario needs a non-empty sweep.beta list")
        for b in cfg.sweep.beta:
            _require(b >= 0, loc, ["sweep", "beta"], "inverse temperatures must be >= 0")
    if cfg.chain is not None:
        try:
            spec = cfg.chain.spec()
            if cfg.probes is not None and cfg.probes.site_n is not None:
                cfg.probes.spec().check_chain(spec)
        except InvalidSpec as exc:
            _fail(loc, ["chain"], str(exc))


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: invalid JSON: {exc.msg}") from None
    loc = _Locator(text)
    if isinstance(data, dict) and "scenario" in data and data["scenario"] not in SCENARIOS:
        _fail(loc, ["scenario"], f"unknown scenario {data['scenario']!r}; allowed scenarios: "
              + ", ".join(SCENARIOS))
    cfg = _build(ScenarioConfig, data, loc, [])
    _check_scenario(cfg, loc)
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
