"""Synthetic three-phase fault waveforms and the labeled-dataset CSV format.

The generator is a phasor model, not a network simulation. A window holds
``tau`` samples of six features, in order ``V_A, V_B, V_C, I_A, I_B, I_C``
(per unit). Pre-fault quantities are balanced 50 Hz sets carrying small
5th and 7th harmonics. At fault onset, half a cycle into the window, the
faulted phases pick up fault current (with a decaying DC offset set by the
point on wave) and their voltages sag. Fault severity falls off as
``1 / (R + r_base)`` and exponentially with distance.
"""
import csv
import enum
import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataFormatError, ParameterError, UnknownLabelError

FREQ_HZ = 50.0
SAMPLE_RATE_HZ = 3200.0
DEFAULT_TAU = 128
DEFAULT_SNR_DB = 40.0
R_BASE_OHM = 0.5
N_FEATURES = 6
FEATURE_NAMES = ("V_A", "V_B", "V_C", "I_A", "I_B", "I_C")

FULL_RESISTANCES = (0.01, 0.2, 2.0, 6.0, 10.0, 25.0, 50.0, 75.0, 100.0)
FULL_ANGLES = (0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0)
FULL_LOCATIONS = tuple(float(k) for k in range(1, 24))
FULL_LOAD_SCALES = tuple(s * p / 100.0 for p in (0, 10, 20, 30, 40, 50, 60) for s in (1, -1) if p or s == 1)

# model constants (per unit unless noted)
_LOAD_PF_ANGLE = math.acos(0.9)
_FAULT_GAIN = 200.0        # fault current (pu of load) at zero fault resistance
_SAG_DEPTH = 0.85          # voltage sag at full severity
_ATTENUATION_KM = 30.0     # e-folding distance of fault severity
_LINE_X_OHM = 1.2          # reactance seen by the fault loop
_DC_TIME_CONST_S = 0.02
_ZERO_SEQ_GAIN = 0.6      # ground-return share of the fault current
_HARMONICS = ((5, 0.04, 0.3), (7, 0.025, 1.1))  # (order, amplitude, phase)
_LOAD_TRIPLEN = (3, 0.05, 0.7)  # zero-sequence load harmonic in the currents


class FaultClass(str, enum.Enum):
    """The eleven fault types plus no-fault. ``TLG`` is ABCG, ``TSC`` is ABC."""

    AG = "AG"
    BG = "BG"
    CG = "CG"
    ABG = "ABG"
    BCG = "BCG"
    CAG = "CAG"
    AB = "AB"
    BC = "BC"
    CA = "CA"
    TLG = "TLG"
    TSC = "TSC"
    NF = "NF"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, label):
        if isinstance(label, cls):
            return label
        try:
            return cls(str(label).strip())
        except ValueError:
            raise UnknownLabelError(f"unknown fault class {label!r}") from None

    @property
    def phases(self):
        """Indices (0=A, 1=B, 2=C) of the faulted phases."""
        return _PHASES[self]

    @property
    def grounded(self):
        return self in _GROUNDED


FAULT_CLASSES = tuple(c for c in FaultClass if c is not FaultClass.NF)

_PHASES = {
    FaultClass.AG: (0,), FaultClass.BG: (1,), FaultClass.CG: (2,),
    FaultClass.ABG: (0, 1), FaultClass.BCG: (1, 2), FaultClass.CAG: (2, 0),
    FaultClass.AB: (0, 1), FaultClass.BC: (1, 2), FaultClass.CA: (2, 0),
    FaultClass.TLG: (0, 1, 2), FaultClass.TSC: (0, 1, 2), FaultClass.NF: (),
}
_GROUNDED = {FaultClass.AG, FaultClass.BG, FaultClass.CG, FaultClass.ABG,
             FaultClass.BCG, FaultClass.CAG, FaultClass.TLG}


@dataclass(frozen=True)
class CaseParams:
    """One simulated case. ``load_scale`` only affects no-fault windows."""

    fault_class: FaultClass
    resistance_ohm: float = 0.01
    incidence_angle_deg: float = 0.0
    location_km: float = 1.0
    load_scale: float = 0.0
    noise_snr_db: float = DEFAULT_SNR_DB
    seed: int = 0

    def validate(self):
        try:
            fc = FaultClass.parse(self.fault_class)
        except UnknownLabelError as exc:
            raise ParameterError(str(exc)) from None
        if not (self.resistance_ohm > 0 and math.isfinite(self.resistance_ohm)):
            raise ParameterError(f"resistance_ohm must be positive, got {self.resistance_ohm}")
        if not 0.0 <= self.incidence_angle_deg <= 180.0:
            raise ParameterError(f"incidence_angle_deg must be in [0, 180], got {self.incidence_angle_deg}")
        if not (self.location_km > 0 and math.isfinite(self.location_km)):
            raise ParameterError(f"location_km must be positive, got {self.location_km}")
        if not -0.6 <= self.load_scale <= 0.6:
            raise ParameterError(f"load_scale must be in [-0.6, 0.6], got {self.load_scale}")
        if math.isnan(self.noise_snr_db):
            raise ParameterError("noise_snr_db is NaN")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ParameterError(f"seed must be a nonnegative integer, got {self.seed}")
        return replace(self, fault_class=fc)


@dataclass
class LabeledDataset:
    """Parallel sequences of ``tau x r`` windows and their fault classes."""

    windows: list
    labels: list
    sample_rate_hz: float = SAMPLE_RATE_HZ

    def __post_init__(self):
        if len(self.windows) != len(self.labels):
            raise ParameterError(
                f"{len(self.windows)} windows but {len(self.labels)} labels"
            )
        self.labels = [FaultClass.parse(c) for c in self.labels]

    def __len__(self):
        return len(self.windows)

    def class_counts(self):
        counts = {}
        for c in self.labels:
            counts[c] = counts.get(c, 0) + 1
        return counts

    @property
    def n_features(self):
        return np.asarray(self.windows[0]).shape[1] if self.windows else 0


def _severity(params):
    return R_BASE_OHM / (params.resistance_ohm + R_BASE_OHM) * math.exp(-params.location_km / _ATTENUATION_KM)


def generate_case(params, tau=DEFAULT_TAU, sample_rate_hz=SAMPLE_RATE_HZ):
    """Generate one ``tau x 6`` window for ``params``.

    Output is a pure function of ``(params, tau, sample_rate_hz)``; the seed
    only drives the additive noise. Pass ``noise_snr_db=math.inf`` for a
    noiseless window.
    """
    params = params.validate()
    tau = int(tau)
    if tau < 64:
        raise ParameterError(f"tau must be >= 64, got {tau}")
    if not sample_rate_hz > 0:
        raise ParameterError(f"sample_rate_hz must be positive, got {sample_rate_hz}")

    omega = 2.0 * math.pi * FREQ_HZ
    t_fault = 0.5 / FREQ_HZ
    t = np.arange(tau) / sample_rate_hz
    # phase-A voltage sits at the incidence angle at fault onset
    theta0 = math.radians(params.incidence_angle_deg) - omega * t_fault
    shifts = np.array([0.0, -2.0 * math.pi / 3.0, 2.0 * math.pi / 3.0])
    arg = omega * t[:, None] + theta0 + shifts[None, :]       # tau x 3

    def balanced(amp, lag):
        out = amp * np.sin(arg - lag)
        for order, h_amp, h_phase in _HARMONICS:
            out += amp * h_amp * np.sin(order * (arg - lag) + h_phase)
        return out

    fc = params.fault_class
    load = 1.0 + (params.load_scale if fc is FaultClass.NF else 0.0)
    V = balanced(1.0, 0.0)
    I = balanced(load, _LOAD_PF_ANGLE)
    order, h_amp, h_phase = _LOAD_TRIPLEN
    I += (load * h_amp * np.sin(order * (omega * t + theta0 - _LOAD_PF_ANGLE) + h_phase))[:, None]

    phases = fc.phases
    if phases:
        sev = _severity(params)
        on = t >= t_fault
        dt = np.where(on, t - t_fault, 0.0)
        decay = np.exp(-dt / _DC_TIME_CONST_S)
        ramp = on.astype(float)
        zlag = math.atan2(_LINE_X_OHM, params.resistance_ohm + R_BASE_OHM)
        amp = _FAULT_GAIN * sev

        def fault_current(phase_arg):
            # steady fault current plus the DC offset that keeps it continuous at onset
            onset = phase_arg[np.argmax(on)] if on.any() else phase_arg[0]
            steady = np.sin(phase_arg - zlag)
            offset = np.sin(onset - zlag) * decay
            return amp * ramp * (steady - offset)

        if fc.grounded or len(phases) == 3:
            for p in phases:
                I[:, p] += fault_current(arg[:, p])
        else:
            a, b = phases
            # line-to-line loop driven by V_a - V_b (leads V_a by 30 degrees)
            loop = fault_current(arg[:, a] + math.pi / 6.0) * math.sqrt(3.0) / 2.0
            I[:, a] += loop
            I[:, b] -= loop
        if fc.grounded:
            # ground return adds a common-mode current to every phase
            lead = arg[:, phases[0]]
            I += (_ZERO_SEQ_GAIN * fault_current(lead + 0.4))[:, None]
        sag = 1.0 - _SAG_DEPTH * sev * ramp
        for p in phases:
            V[:, p] *= sag

    data = np.hstack([V, I])
    if math.isfinite(params.noise_snr_db):
        rng = np.random.default_rng(int(params.seed))
        rms = np.sqrt(np.mean(np.square(data), axis=0))
        scale = rms * 10.0 ** (-params.noise_snr_db / 20.0)
        data = data + rng.standard_normal(data.shape) * scale[None, :]
    return data


def case_grid(classes=FAULT_CLASSES, locations=(1.0,), resistances=(0.01,), angles=(0.0,),
              load_scales=(0.0,), noise_snr_db=DEFAULT_SNR_DB, seed=0):
    """Cartesian case grid in deterministic order.

    Fault classes expand over ``locations x resistances x angles``; ``NF``
    expands over ``load_scales x angles``. Case seeds are ``seed + index``.
    """
    cases = []
    for fc in classes:
        fc = FaultClass.parse(fc)
        if fc is FaultClass.NF:
            combos = [dict(load_scale=s, incidence_angle_deg=a) for s in load_scales for a in angles]
        else:
            combos = [dict(location_km=x, resistance_ohm=rr, incidence_angle_deg=a)
                      for x, rr, a in itertools.product(locations, resistances, angles)]
        for kw in combos:
            cases.append(CaseParams(fault_class=fc, noise_snr_db=noise_snr_db, seed=seed + len(cases), **kw))
    return cases


def full_grid(classes=FAULT_CLASSES, noise_snr_db=DEFAULT_SNR_DB, seed=0):
    """The full case grid: 23 locations x 9 resistances x 7 angles per fault type."""
    return case_grid(classes, FULL_LOCATIONS, FULL_RESISTANCES, FULL_ANGLES,
                     FULL_LOAD_SCALES, noise_snr_db, seed)


def desk_grid(seed=0, noise_snr_db=DEFAULT_SNR_DB):
    """Small grid: 3 locations x 3 resistances x 3 angles per fault type, plus
    13 load levels x 3 angles of no-fault (336 cases)."""
    return case_grid(tuple(FaultClass), locations=(2.0, 10.0, 20.0), resistances=(0.2, 6.0, 50.0),
                     angles=(0.0, 90.0, 150.0), load_scales=FULL_LOAD_SCALES,
                     noise_snr_db=noise_snr_db, seed=seed)


def generate_dataset(grid, per_case_windows=1, tau=DEFAULT_TAU, sample_rate_hz=SAMPLE_RATE_HZ):
    """One window per grid point per repetition, in grid order then repetition order.

    Repetition ``k`` of a case uses seed ``case.seed + k * len(grid)``.
    """
    grid = list(grid)
    if not grid:
        raise ParameterError("case grid is empty")
    if int(per_case_windows) < 1:
        raise ParameterError(f"per_case_windows must be >= 1, got {per_case_windows}")
    windows, labels = [], []
    for case in grid:
        for rep in range(int(per_case_windows)):
            p = replace(case, seed=case.seed + rep * len(grid))
            windows.append(generate_case(p, tau, sample_rate_hz))
            labels.append(FaultClass.parse(case.fault_class))
    return LabeledDataset(windows, labels, sample_rate_hz)


HEADER = ["label", "sample_rate_hz", "tau", "r"]


def save_csv(dataset, path):
    """Write ``dataset`` in the block CSV format (9 significant digits)."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(HEADER) + "\n")
        for k, (w, c) in enumerate(zip(dataset.windows, dataset.labels)):
            w = np.asarray(w, dtype=float)
            if k:
                fh.write("\n")
            fh.write(f"{c},{dataset.sample_rate_hz:.9g},{w.shape[0]},{w.shape[1]}\n")
            for row in w:
                fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def load_csv(path):
    """Read a dataset written by :func:`save_csv` (or any file in that format)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataFormatError(f"dataset file not found: {path}") from None
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    if [h.strip() for h in rows[0]] != HEADER:
        raise DataFormatError(f"{path}: header must be {','.join(HEADER)}")

    windows, labels, rates = [], [], set()
    pos = 1
    while pos < len(rows):
        if not rows[pos] or all(not f.strip() for f in rows[pos]):
            pos += 1
            continue
        meta = rows[pos]
        if len(meta) != 4:
            raise DataFormatError(f"{path}:{pos + 1}: expected window metadata 'label,sample_rate_hz,tau,r'")
        label = FaultClass.parse(meta[0])
        try:
            rate, tau, r = float(meta[1]), int(meta[2]), int(meta[3])
        except ValueError:
            raise DataFormatError(f"{path}:{pos + 1}: malformed window metadata") from None
        if tau < 1 or r < 1 or not rate > 0:
            raise DataFormatError(f"{path}:{pos + 1}: invalid window dimensions")
        block = rows[pos + 1: pos + 1 + tau]
        if len(block) != tau:
            raise DataFormatError(f"{path}:{pos + 1}: window truncated ({len(block)} of {tau} rows)")
        for j, row in enumerate(block):
            if len(row) != r:
                raise DataFormatError(f"{path}:{pos + 2 + j}: expected {r} columns, got {len(row)}")
        try:
            data = np.array(block, dtype=float)
        except ValueError:
            raise DataFormatError(f"{path}:{pos + 1}: non-numeric value in window") from None
        if not np.all(np.isfinite(data)):
            raise DataFormatError(f"{path}:{pos + 1}: window contains non-finite values")
        windows.append(data)
        labels.append(label)
        rates.add(rate)
        pos += 1 + tau
    if not windows:
        raise DataFormatError(f"{path}: no windows found")
    if len(rates) > 1:
        raise DataFormatError(f"{path}: mixed sample rates {sorted(rates)}")
    return LabeledDataset(windows, labels, rates.pop())
