"""Scenario parameters: RF stage specs, system parameters and the two
built-in parameter sets.

Scenario documents are JSON objects whose keys mirror the
:class:`SystemParams` field names. Powers are in dBm, gains and
attenuations in dB and bandwidth in Hz.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Tuple, Union

from .units import vpp_to_fullscale_dbm

GainSpec = Union[float, Tuple[float, float]]


class ConfigError(ValueError):
    """Raised for malformed or invalid scenario documents."""


@dataclass(frozen=True)
class ComponentSpec:
    """One RF stage.

    ``gain_db`` is either a fixed gain or a ``(min, max)`` range for a
    variable-gain stage. A missing ``iip2_dbm``/``iip3_dbm`` means the stage
    is perfectly linear for that order.
    """

    name: str
    gain_db: GainSpec
    nf_db: float = 0.0
    iip2_dbm: Optional[float] = None
    iip3_dbm: Optional[float] = None

    def __post_init__(self):
        g = self.gain_db
        if isinstance(g, (list, tuple)):
            if len(g) != 2:
                raise ConfigError(f"{self.name}: gain range needs exactly (min, max)")
            lo, hi = float(g[0]), float(g[1])
            if lo > hi:
                raise ConfigError(f"{self.name}: gain range min {lo} > max {hi}")
            object.__setattr__(self, "gain_db", (lo, hi))
        else:
            object.__setattr__(self, "gain_db", float(g))
        if not self.nf_db >= 0:
            raise ConfigError(f"{self.name}: noise figure must be >= 0 dB")

    @property
    def is_variable(self) -> bool:
        return isinstance(self.gain_db, tuple)

    @property
    def gain_range_db(self) -> Tuple[float, float]:
        if self.is_variable:
            return self.gain_db
        return (self.gain_db, self.gain_db)

    def with_gain(self, gain_db: float) -> "ComponentSpec":
        """Fixed-gain copy of this stage; the setting must be in range."""
        lo, hi = self.gain_range_db
        if not lo - 1e-9 <= gain_db <= hi + 1e-9:
            raise ValueError(f"{self.name}: gain {gain_db} dB outside [{lo}, {hi}]")
        return dataclasses.replace(self, gain_db=float(gain_db))


_CASES = {"A": "A", "B": "B", "CASEA": "A", "CASEB": "B"}


@dataclass(frozen=True)
class SystemParams:
    """A complete full-duplex transceiver scenario."""

    bandwidth_hz: float
    snr_req_db: float
    rx_chain: Tuple[ComponentSpec, ...]
    tx_chain: Tuple[ComponentSpec, ...]
    a_ant_db: float
    a_rf_db: float
    a_dig_db: float
    adc_bits: int
    adc_pp_voltage: float
    papr_db: float
    allowed_sinr_loss_db: float = 3.0
    rf_ref_case: str = "A"
    soi_above_sens_db: float = 5.0
    adc_impedance_ohm: float = 50.0
    # input power of the TX variable-gain stage; sets the reachable TX power range
    tx_drive_dbm: float = -35.0
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "rx_chain", tuple(self.rx_chain))
        object.__setattr__(self, "tx_chain", tuple(self.tx_chain))
        case = _CASES.get(str(self.rf_ref_case).replace(" ", "").upper())
        if case is None:
            raise ConfigError(f"rf_ref_case must be 'A' or 'B', got {self.rf_ref_case!r}")
        object.__setattr__(self, "rf_ref_case", case)

        if isinstance(self.adc_bits, bool) or int(self.adc_bits) != self.adc_bits:
            raise ConfigError("adc_bits must be an integer")
        object.__setattr__(self, "adc_bits", int(self.adc_bits))
        if self.adc_bits < 1:
            raise ConfigError(f"adc_bits must be >= 1, got {self.adc_bits}")
        if not self.bandwidth_hz > 0:
            raise ConfigError("bandwidth_hz must be > 0")
        if not self.adc_pp_voltage > 0:
            raise ConfigError("adc_pp_voltage must be > 0")
        if not self.adc_impedance_ohm > 0:
            raise ConfigError("adc_impedance_ohm must be > 0")
        for key in ("a_ant_db", "a_rf_db", "a_dig_db"):
            if not getattr(self, key) >= 0:
                raise ConfigError(f"{key} must be >= 0 dB")
        if not self.rx_chain or not self.tx_chain:
            raise ConfigError("rx_chain and tx_chain must be non-empty")
        n_var = sum(c.is_variable for c in self.rx_chain)
        if n_var != 1:
            raise ConfigError(f"rx_chain must contain exactly one variable-gain stage, found {n_var}")
        if self.tx_chain[-1].name.upper() != "PA":
            raise ConfigError("tx_chain must end in a stage named 'PA'")
        if self.pa.iip3_dbm is None:
            raise ConfigError("PA stage needs an iip3_dbm figure")

    @property
    def pa(self) -> ComponentSpec:
        return self.tx_chain[-1]

    @property
    def vga_index(self) -> int:
        return next(i for i, c in enumerate(self.rx_chain) if c.is_variable)

    @property
    def rx_gain_range_db(self) -> Tuple[float, float]:
        lo = sum(c.gain_range_db[0] for c in self.rx_chain)
        hi = sum(c.gain_range_db[1] for c in self.rx_chain)
        return lo, hi

    @property
    def tx_power_range_dbm(self) -> Tuple[float, float]:
        """TX output power range for the feeding-amplifier drive level.

        The drive is applied at the variable-gain stage, so stages ahead of
        it do not count.
        """
        start = next((i for i, c in enumerate(self.tx_chain) if c.is_variable), 0)
        stages = self.tx_chain[start:]
        lo = self.tx_drive_dbm + sum(c.gain_range_db[0] for c in stages)
        hi = self.tx_drive_dbm + sum(c.gain_range_db[1] for c in stages)
        return lo, hi

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def rx_chain_at(self, rx_gain_db: float) -> Tuple[ComponentSpec, ...]:
        """RX chain with the variable stage set so the total gain is
        ``rx_gain_db``; the setting is clamped to the stage range."""
        fixed = sum(c.gain_db for c in self.rx_chain if not c.is_variable)
        vga = self.rx_chain[self.vga_index]
        lo, hi = vga.gain_range_db
        g = min(max(rx_gain_db - fixed, lo), hi)
        chain = list(self.rx_chain)
        chain[self.vga_index] = vga.with_gain(g)
        return tuple(chain)


def adc_fullscale_power(params: SystemParams) -> float:
    """Full-scale sinusoid power of the ADC in dBm."""
    return vpp_to_fullscale_dbm(params.adc_pp_voltage, params.adc_impedance_ohm)


def adc_target_power(params: SystemParams) -> float:
    """Average ADC input power held by the AGC, in dBm (full scale minus PAPR)."""
    return adc_fullscale_power(params) - params.papr_db


# ---------------------------------------------------------------------------
# built-in parameter sets

_TX_CHAIN = [
    {"name": "LPF", "gain_db": 0, "nf_db": 0},
    {"name": "Mixer", "gain_db": 5, "nf_db": 9, "iip3_dbm": 5},
    {"name": "VGA", "gain_db": [0, 35], "nf_db": 10, "iip3_dbm": 5},
    {"name": "PA", "gain_db": 27, "nf_db": 5, "iip3_dbm": 20},
]


def _rx_chain(lna_iip3, vga_iip3):
    # The LNA is also rated IIP2 = 43 dBm, but it is left out: only the
    # mixer and VGA put 2nd-order products on the signal band.
    return [
        {"name": "BPF", "gain_db": 0, "nf_db": 0},
        {"name": "LNA", "gain_db": 25, "nf_db": 4.1, "iip3_dbm": lna_iip3},
        {"name": "Mixer", "gain_db": 6, "nf_db": 4, "iip2_dbm": 42, "iip3_dbm": 15},
        {"name": "LPF", "gain_db": 0, "nf_db": 0},
        {"name": "VGA", "gain_db": [0, 69], "nf_db": 4, "iip2_dbm": 43, "iip3_dbm": vga_iip3},
    ]


BUILTIN_DOCUMENTS = {
    "paramset1": {
        "name": "paramset1",
        "bandwidth_hz": 12.5e6,
        "snr_req_db": 10.0,
        "rx_chain": _rx_chain(-9, 14),
        "tx_chain": _TX_CHAIN,
        "a_ant_db": 40.0,
        "a_rf_db": 40.0,
        "a_dig_db": 35.0,
        "adc_bits": 8,
        "adc_pp_voltage": 4.5,
        "papr_db": 10.0,
        "allowed_sinr_loss_db": 3.0,
        "rf_ref_case": "A",
        "soi_above_sens_db": 5.0,
    },
    "paramset2": {
        "name": "paramset2",
        "bandwidth_hz": 3e6,
        "snr_req_db": 5.0,
        "rx_chain": _rx_chain(-15, 10),
        "tx_chain": _TX_CHAIN,
        "a_ant_db": 40.0,
        "a_rf_db": 20.0,
        "a_dig_db": 35.0,
        "adc_bits": 12,
        "adc_pp_voltage": 4.5,
        "papr_db": 10.0,
        "allowed_sinr_loss_db": 3.0,
        "rf_ref_case": "A",
        "soi_above_sens_db": 5.0,
    },
}


def builtin_names() -> list:
    return sorted(BUILTIN_DOCUMENTS)


def builtin_params(name: Union[str, int]) -> SystemParams:
    """Return a built-in parameter set by name (``"paramset1"``, ``"1"``, ``1``)."""
    key = str(name)
    if key.isdigit():
        key = f"paramset{key}"
    if key not in BUILTIN_DOCUMENTS:
        raise ConfigError(f"unknown parameter set {name!r}; choose from {builtin_names()}")
    return load_params(copy.deepcopy(BUILTIN_DOCUMENTS[key]))


# ---------------------------------------------------------------------------
# (de)serialization

_COMPONENT_KEYS = {f.name for f in dataclasses.fields(ComponentSpec)}
_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SystemParams)}
_REQUIRED = {
    name
    for name, f in _PARAM_FIELDS.items()
    if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING
}
# sub-objects owned by other loaders
_FOREIGN_KEYS = {"simulation"}


def _component(doc: Any, where: str) -> ComponentSpec:
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{where}: expected an object, got {type(doc).__name__}")
    unknown = set(doc) - _COMPONENT_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    for key in ("name", "gain_db"):
        if key not in doc:
            raise ConfigError(f"{where}: missing required key {key!r}")
    try:
        return ComponentSpec(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_text(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_params(document: Union[str, Mapping[str, Any]], source: str = "<document>") -> SystemParams:
    """Parse and validate a scenario document (JSON text or a mapping).

    Unknown keys are rejected; missing required keys and invariant
    violations raise :class:`ConfigError`.
    """
    doc = _parse_text(document, source) if isinstance(document, str) else document
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{source}: top level must be an object")
    unknown = set(doc) - set(_PARAM_FIELDS) - _FOREIGN_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    missing = _REQUIRED - set(doc)
    if missing:
        raise ConfigError(f"{source}: missing required keys {sorted(missing)}")

    kwargs = {k: v for k, v in doc.items() if k in _PARAM_FIELDS}
    for chain_key in ("rx_chain", "tx_chain"):
        chain = kwargs[chain_key]
        if not isinstance(chain, Sequence) or isinstance(chain, str):
            raise ConfigError(f"{source}: {chain_key} must be a list of stages")
        kwargs[chain_key] = tuple(
            _component(c, f"{source}: {chain_key}[{i}]") for i, c in enumerate(chain)
        )
    try:
        return SystemParams(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_params_file(path: Union[str, Path]) -> SystemParams:
    path = Path(path)
    return load_params(path.read_text(), source=str(path))


def _component_dict(c: ComponentSpec) -> dict:
    d = {"name": c.name, "gain_db": list(c.gain_db) if c.is_variable else c.gain_db, "nf_db": c.nf_db}
    if c.iip2_dbm is not None:
        d["iip2_dbm"] = c.iip2_dbm
    if c.iip3_dbm is not None:
        d["iip3_dbm"] = c.iip3_dbm
    return d


def params_to_dict(params: SystemParams) -> dict:
    out = {}
    for name in _PARAM_FIELDS:
        value = getattr(params, name)
        if name in ("rx_chain", "tx_chain"):
            value = [_component_dict(c) for c in value]
        out[name] = value
    return out


def save_params(params: SystemParams) -> str:
    return json.dumps(params_to_dict(params), indent=2)
