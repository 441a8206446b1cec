"""Parameter-sweep engine and figure presets.

A sweep evaluates a set of outputs over a 1-D or 2-D grid, one row per
grid point in outer-axis-major order. Individual points that violate a
formula precondition (or fail to converge) produce explicit
``NA[reason]`` markers in the affected cells; a sweep never aborts on a
point failure. Numbers are serialized with 17 significant digits and
every column header carries a unit annotation.
"""

from __future__ import annotations

import datetime
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DomainError, SolverError, ValidationError
from .gain import OperatingPoint, isolation, mechanical_gain, threshold_power
from .params import DeviceParams, DriveContext, make_drive, with_coupling
from .steady import SolverSettings, solve_steady

AXIS_QUANTITIES = ("delta_L", "omega_spin", "pump_power", "coupling_J")
OUTPUTS = ("photon_number_1", "x_s", "eta", "G", "N_b", "P_th", "R", "dn")
FIXED_KEYS = AXIS_QUANTITIES + ("sagnac_ratio", "direction")

_AXIS_COLUMNS = {
    "delta_L": ("delta_L[rad/s]", "delta_L_over_omega_m[1]"),
    "omega_spin": ("omega_spin[rad/s]", "delta_sag[rad/s]", "delta_sag_over_omega_m[1]"),
    "pump_power": ("pump_power[W]",),
    "coupling_J": ("coupling_J[rad/s]", "coupling_J_over_omega_m[1]"),
}
_OUTPUT_COLUMNS = {
    "photon_number_1": ("photon_number_1[1]",),
    "x_s": ("x_s[m]",),
    "eta": ("eta[1]",),
    "G": ("G[rad/s]", "G_over_gamma_m[1]"),
    "N_b": ("N_b[1]",),
    "P_th": ("P_th[W]",),
    "R": ("R[dB]",),
    "dn": ("dn_exact[1]", "dn_approx[1]"),
}


@dataclass(frozen=True)
class SweepAxis:
    quantity: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.quantity not in AXIS_QUANTITIES:
            raise ValidationError(
                f"axis quantity must be one of {AXIS_QUANTITIES}, got {self.quantity!r}")
        if self.count < 2:
            raise ValidationError(f"axis count must be >= 2, got {self.count!r}")
        if not self.lo < self.hi:
            raise ValidationError(f"axis range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.spacing not in ("linear", "log"):
            raise ValidationError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.lo <= 0:
            raise ValidationError("log spacing requires lo > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    outputs: tuple
    fixed: dict = field(default_factory=dict)
    output_path: str | None = None

    def __post_init__(self):
        if not (1 <= len(self.axes) <= 2):
            raise ValidationError(f"need 1 or 2 axes, got {len(self.axes)}")
        axis_q = [a.quantity for a in self.axes]
        if len(set(axis_q)) != len(axis_q):
            raise ValidationError("duplicate axis quantity")
        if not self.outputs:
            raise ValidationError("at least one output is required")
        for out in self.outputs:
            if out not in OUTPUTS:
                raise ValidationError(f"unknown output {out!r}, expected one of {OUTPUTS}")
        for key in self.fixed:
            if key not in FIXED_KEYS:
                raise ValidationError(f"unknown fixed override {key!r}")
            if key in axis_q:
                raise ValidationError(f"{key!r} is both an axis and a fixed override")
        if "omega_spin" in self.fixed and "sagnac_ratio" in self.fixed:
            raise ValidationError("give only one of omega_spin / sagnac_ratio")

    def to_dict(self) -> dict:
        return {
            "axes": [{"quantity": a.quantity, "lo": a.lo, "hi": a.hi,
                      "count": a.count, "spacing": a.spacing} for a in self.axes],
            "outputs": list(self.outputs),
            "fixed": dict(self.fixed),
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        unknown = set(data) - {"axes", "outputs", "fixed", "output_path"}
        if unknown:
            raise ValidationError(f"sweep spec: unknown keys {sorted(unknown)}")
        try:
            axes = tuple(SweepAxis(**a) for a in data["axes"])
        except TypeError as exc:
            raise ValidationError(f"malformed axis entry: {exc}") from None
        return cls(axes=axes, outputs=tuple(data.get("outputs", ())),
                   fixed=dict(data.get("fixed", {})),
                   output_path=data.get("output_path"))


@dataclass(frozen=True)
class SweepResult:
    columns: tuple
    rows: tuple
    provenance: dict

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            fh.write(f"# phonolaser {self.provenance['version']} sweep\n")
            fh.write(f"# generated: {self.provenance['generated']}\n")
            static = {k: v for k, v in self.provenance.items() if k != "generated"}
            fh.write("# provenance: " + json.dumps(static, sort_keys=True) + "\n")
            fh.write(",".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
        finally:
            if own:
                fh.close()

    def to_json(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w") if own else path_or_file
        try:
            json.dump({"provenance": self.provenance,
                       "columns": list(self.columns),
                       "rows": [list(r) for r in self.rows]},
                      fh, sort_keys=True)
            fh.write("\n")
        finally:
            if own:
                fh.close()


def _cell(value) -> str:
    if isinstance(value, str):
        return value.replace(",", ";").replace("\n", " ")
    return f"{value:.17g}"


def _marker(reason: str) -> str:
    return "NA[" + reason.replace(",", ";").replace("\n", " ") + "]"


def _evaluate_point(device: DeviceParams, base_drive: DriveContext,
                    settings: SolverSettings, spec: SweepSpec,
                    assignment: dict) -> list:
    params = device
    if "coupling_J" in assignment:
        params = with_coupling(device, assignment["coupling_J"])
    detuning = assignment.get("delta_L", base_drive.detuning)
    power = assignment.get("pump_power", base_drive.pump_power)
    direction = assignment.get("direction", base_drive.direction)
    if "omega_spin" in assignment:
        drive = make_drive(params, power, detuning, direction,
                           omega_spin=assignment["omega_spin"])
    elif "sagnac_ratio" in assignment:
        drive = make_drive(params, power, detuning, direction,
                           sagnac=assignment["sagnac_ratio"] * params.mech_freq)
    else:
        drive = make_drive(params, power, detuning, direction,
                           omega_spin=base_drive.omega_spin)

    row: list = []
    for axis in spec.axes:
        q = axis.quantity
        if q == "delta_L":
            row += [drive.detuning, drive.detuning / params.mech_freq]
        elif q == "omega_spin":
            row += [drive.omega_spin, drive.sagnac_shift,
                    drive.sagnac_shift / params.mech_freq]
        elif q == "pump_power":
            row += [drive.pump_power]
        else:
            row += [params.optical_coupling,
                    params.optical_coupling / params.mech_freq]

    state = None
    state_error = None

    def steady_state():
        nonlocal state, state_error
        if state is None and state_error is None:
            try:
                state = solve_steady(params, drive, settings)
            except (SolverError, ValidationError, DomainError) as exc:
                state_error = f"{type(exc).__name__}: {exc}"
        return state

    def breakdown():
        st = steady_state()
        if st is None:
            return None
        point = OperatingPoint(params=params, drive=drive,
                               phonon_occupation=abs(st.b) ** 2, mech_amplitude=st.b)
        return mechanical_gain(point)

    for out in spec.outputs:
        try:
            if out == "photon_number_1":
                st = steady_state()
                row.append(st.photon_number_1 if st else _marker(state_error))
            elif out == "x_s":
                st = steady_state()
                row.append(st.x_s if st else _marker(state_error))
            elif out == "eta":
                st = steady_state()
                if st is None:
                    row.append(_marker(state_error))
                    continue
                ref_drive = make_drive(params, power, detuning, direction, omega_spin=0.0)
                ref = solve_steady(params, ref_drive, settings)
                if ref.x_s <= 0.0:
                    row.append(_marker("eta_undefined: x_s(Omega=0) is zero"))
                else:
                    row.append(st.x_s / ref.x_s)
            elif out == "G":
                br = breakdown()
                if br is None:
                    row += [_marker(state_error)] * 2
                else:
                    row += [br.gain, br.gain / params.mech_damping]
            elif out == "N_b":
                br = breakdown()
                row.append(br.n_stimulated if br else _marker(state_error))
            elif out == "dn":
                br = breakdown()
                if br is None:
                    row += [_marker(state_error)] * 2
                else:
                    row += [br.dn_exact, br.dn_approx]
            elif out == "P_th":
                row.append(threshold_power(params, drive).power)
            elif out == "R":
                spin = drive.omega_spin
                if spin == 0.0:
                    row.append(0.0)
                else:
                    value = isolation(params, drive, omega_spin=abs(spin),
                                      settings=settings)
                    row.append(value if spin > 0 else -value)
        except (DomainError, ValidationError, SolverError) as exc:
            n_cols = len(_OUTPUT_COLUMNS[out])
            row += [_marker(f"{type(exc).__name__}: {exc}")] * n_cols
    return row


def run_sweep(spec: SweepSpec, device: DeviceParams, base_drive: DriveContext,
              settings: SolverSettings | None = None, jobs: int = 1) -> SweepResult:
    """Evaluate the sweep. Row order is outer-axis major and identical
    for any ``jobs``; worker parallelism never reorders results."""
    settings = settings or SolverSettings()
    columns: list = []
    for axis in spec.axes:
        columns += list(_AXIS_COLUMNS[axis.quantity])
    for out in spec.outputs:
        columns += list(_OUTPUT_COLUMNS[out])

    grids = [axis.values() for axis in spec.axes]
    assignments = []
    if len(grids) == 1:
        for v in grids[0]:
            a = dict(spec.fixed)
            a[spec.axes[0].quantity] = float(v)
            assignments.append(a)
    else:
        for v0 in grids[0]:
            for v1 in grids[1]:
                a = dict(spec.fixed)
                a[spec.axes[0].quantity] = float(v0)
                a[spec.axes[1].quantity] = float(v1)
                assignments.append(a)

    def work(a):
        return _evaluate_point(device, base_drive, settings, spec, a)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, assignments))
    else:
        rows = [work(a) for a in assignments]

    provenance = {
        "artifact": "phonolaser",
        "version": __version__,
        "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "spec": spec.to_dict(),
        "device": {
            "resonance": device.resonance, "wavelength": device.wavelength,
            "refractive_index": device.refractive_index,
            "radius_com": device.radius_com, "radius_spin": device.radius_spin,
            "quality_com": device.quality_com, "quality_spin": device.quality_spin,
            "effective_mass": device.effective_mass,
            "mech_freq": device.mech_freq, "mech_damping": device.mech_damping,
            "optical_coupling": device.optical_coupling,
            "dispersion_coeff": device.dispersion_coeff,
        },
        "base_drive": {
            "pump_power": base_drive.pump_power, "detuning": base_drive.detuning,
            "direction": base_drive.direction.value,
            "omega_spin": base_drive.omega_spin,
            "sagnac_shift": base_drive.sagnac_shift,
        },
        "solver": {"tolerance": settings.tolerance,
                   "max_iterations": settings.max_iterations,
                   "relaxation": settings.relaxation},
    }
    return SweepResult(columns=tuple(columns),
                       rows=tuple(tuple(r) for r in rows),
                       provenance=provenance)


_PRESET_NAMES = ("fig2a", "fig2b", "fig3", "fig4a", "fig4b")


def figure_preset(name: str, device: DeviceParams) -> SweepSpec:
    """Resolved sweep spec reproducing one of the reference figures.

    All presets use a left drive, J from the device, and pin the spin
    magnitude so that Delta_sag / omega_m = 0.1 (the '6 kHz equivalent'
    operating point). Grid densities: 400 points per 1-D axis, 200x200
    for the 2-D isolation map; override by editing the returned spec.
    """
    from .params import Direction, spin_for_shift

    wm = device.mech_freq
    spin6 = spin_for_shift(0.1 * wm, Direction.LEFT, device)
    spin_axis = SweepAxis("omega_spin", -spin6, spin6, 3, "linear")
    if name == "fig2a":
        return SweepSpec(
            axes=(SweepAxis("delta_L", -1.5 * wm, 1.5 * wm, 400), spin_axis),
            outputs=("photon_number_1", "x_s"),
            fixed={"pump_power": 10e-6})
    if name == "fig2b":
        return SweepSpec(
            axes=(SweepAxis("delta_L", -1.5 * wm, 1.5 * wm, 400), spin_axis),
            outputs=("eta",),
            fixed={"pump_power": 10e-6})
    if name == "fig3":
        return SweepSpec(
            axes=(SweepAxis("delta_L", 0.3 * wm, 0.7 * wm, 400), spin_axis),
            outputs=("G",),
            fixed={"pump_power": 10e-6})
    if name == "fig4a":
        return SweepSpec(
            axes=(SweepAxis("pump_power", 0.5e-6, 30e-6, 400), spin_axis),
            outputs=("N_b", "P_th"),
            fixed={"delta_L": 0.45 * wm})
    if name == "fig4b":
        return SweepSpec(
            axes=(SweepAxis("delta_L", 0.3 * wm, 0.7 * wm, 200),
                  SweepAxis("omega_spin", -spin6, spin6, 200)),
            outputs=("R",),
            fixed={"pump_power": 10e-6})
    raise ValidationError(f"unknown figure preset {name!r}, expected one of {_PRESET_NAMES}")
