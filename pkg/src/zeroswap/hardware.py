"""Hardware parameters, success-probability estimate and runtime accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class HardwareParams:
    n_sites: int = 256
    atom_loss_rate: float = 0.007
    trap_switch_us: float = 100.0
    u3_error: float = 0.000127
    aod_speed_um_per_us: float = 55.0
    u3_time_us: float = 2.0
    t1_s: float = 4.0
    cz_error: float = 0.0048
    t2_s: float = 1.49
    cz_time_us: float = 0.8
    swap_error: float = 0.0143
    readout_error: float = 0.05
    move_loss: float = 0.001

    def __post_init__(self):
        for name in ("atom_loss_rate", "u3_error", "cz_error", "swap_error",
                     "readout_error", "move_loss"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")
        for name in ("trap_switch_us", "aod_speed_um_per_us", "u3_time_us",
                     "t1_s", "t2_s", "cz_time_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def swap_time_us(self):
        return 3 * self.cz_time_us

    def swap_error_from_cz(self):
        """Error of a SWAP built from three CZ gates."""
        return 1.0 - (1.0 - self.cz_error) ** 3

    def move_time_us(self, distance_um):
        return distance_um / self.aod_speed_um_per_us


def load_defaults():
    """The checked-in defaults file as a nested dict."""
    text = resources.files("zeroswap").joinpath("data/defaults.toml").read_text()
    return tomllib.loads(text)


MACHINES = {name: (spec["sites_x"], spec["sites_y"])
            for name, spec in load_defaults()["machines"].items()}


def params_for_machine(machine, overrides=None):
    """HardwareParams for a machine preset, with optional field overrides."""
    if machine not in MACHINES:
        raise ValueError(f"unknown machine {machine!r}; choose from {sorted(MACHINES)}")
    sx, sy = MACHINES[machine]
    values = dict(load_defaults()["hardware"])
    values.update(overrides or {})
    values["n_sites"] = sx * sy
    known = {f.name for f in fields(HardwareParams)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown hardware parameter(s): {sorted(unknown)}")
    return HardwareParams(**values)


@dataclass(frozen=True)
class FidelityReport:
    p_success: float
    factors: dict

    def as_dict(self):
        return {"p_success": self.p_success, "factors": dict(self.factors)}


def estimate_success(schedule, n_qubits, params):
    """Product of per-component success factors for one logical shot.

    ``schedule`` needs ``cz_count``, ``u3_count``, ``trap_change_count`` and
    ``total_runtime_us``; both compiled schedules and SWAP-baseline results
    qualify.
    """
    t_s = schedule.total_runtime_us * 1e-6
    factors = {
        "cz": (1.0 - params.cz_error) ** schedule.cz_count,
        "u3": (1.0 - params.u3_error) ** schedule.u3_count,
        "readout": (1.0 - params.readout_error) ** n_qubits,
        "decoherence": (math.exp(-t_s / params.t1_s) * math.exp(-t_s / params.t2_s)) ** n_qubits,
        "movement": (1.0 - params.move_loss) ** schedule.trap_change_count,
        "atom_loss": (1.0 - params.atom_loss_rate) ** n_qubits,
    }
    p = 1.0
    for v in factors.values():
        p *= v
    return FidelityReport(p, factors)


def gate_phase_us(has_u3, has_cz, params):
    """U3 (Raman) and CZ (Rydberg) pulses run concurrently; the slower one sets the phase."""
    t = 0.0
    if has_u3:
        t = max(t, params.u3_time_us)
    if has_cz:
        t = max(t, params.cz_time_us)
    return t


def layer_duration_us(max_move_um, has_u3, has_cz, homing, trap_durations_us, params):
    out = params.move_time_us(max_move_um)
    back = out if homing else 0.0
    return out + gate_phase_us(has_u3, has_cz, params) + back + sum(trap_durations_us)


def compute_runtime(schedule):
    return sum(layer.duration_us for layer in schedule.layers)
