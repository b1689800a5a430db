"""Scenario engine: declarative configs, validation, and figure-style runs.

A scenario is a YAML mapping (see scenarios/ for the built-ins) with:

    name:        identifier used in output files
    kind:        two_particle | phase_sweep | scan
    emit:        series | final            (two_particle only)
    barrier:     {kind, height, width, well_width, bias}
    coulomb:     null or {strength, a_c, sigma_c, epsilon_r, window_squared}
    material:    {mass_fraction, epsilon_r}
    stats:       fermion | boson | distinguishable
    packets:     two entries {side, energy_ev, sigma_x, x0}; x0 null = auto
    grid:        {half_width, n_points, n_points_2d}
    propagation: {dt, t_end, snapshot_stride, t1: fixed | auto}
    sweep:       list of axes {variable: energy|sigma|C, values: [...]}
    routes:      subset of [analytic, quadrant2d, limits, determinant]
    phase_sweep: {n_values, d_values}      (phase_sweep kind)
    scan:        {e_lo, e_hi, n_energies}  (scan kind)

Energies are kinetic energies in the packet's own contact (so for a biased
device the right packet's energy is measured from the lowered contact
floor).  Auto x0 places a packet 4 sigma outside the barrier region but
never closer than the reference 175 nm; auto t1 stops once the
barrier-strip probability has peaked and stayed below 1e-3 for 50 steps.

Outputs: one CSV per scenario (schema-versioned header, floats at 9
significant digits, bit-identical for identical configs) plus a JSON
sidecar with the resolved config, grid, timing and package version.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml

from . import __version__
from .errors import SimulationError
from .exchange import (FERMION, build_two_particle, exchange_sign,
                       limit_probabilities, probabilities_2d,
                       probabilities_analytic)
from .grids import Grid1D, half_line_overlap, save_field
from .nparticle import correlation_matrix, phase_space_sweep, prob_all_right
from .potentials import (BarrierSpec, CoulombSpec, sample_barrier,
                         staircase_profile, total_potential_2d)
from .propagate import PropagatorConfig, evolve_1d, evolve_2d
from .scattering import Profile, transmission_scan
from .units import Constants, constants_for
from .wavepackets import WavePacketSpec, gaussian, spectral_amplitude

AUTO_X0_REFERENCE = 175.0      # nm, the common initial offset of the source packets
AUTO_T1_THRESHOLD = 1e-3
AUTO_T1_HOLD_STEPS = 50

_ROUTES = ("analytic", "quadrant2d", "limits", "determinant")
_SWEEPVARS = ("energy", "sigma", "C")


@dataclass
class PacketConfig:
    side: str                       # 'L' | 'R'
    energy_ev: float
    sigma_x: float
    x0: Optional[float] = None      # None: placed automatically

    def __post_init__(self):
        if self.side not in ("L", "R"):
            raise ValueError(f"packet side must be 'L' or 'R', got {self.side!r}")


@dataclass
class ScenarioConfig:
    name: str
    kind: str
    barrier: BarrierSpec
    coulomb: Optional[CoulombSpec]
    constants: Constants
    stats: str
    packets: List[PacketConfig]
    half_width: float = 614.4
    n_points: int = 4096
    n_points_2d: int = 2048
    dt: float = 0.25
    t_end: float = 700.0
    snapshot_stride: int = 20
    t1_mode: str = "fixed"          # 'fixed' | 'auto'
    emit: str = "series"            # 'series' | 'final'
    sweep: List[dict] = field(default_factory=list)
    routes: List[str] = field(default_factory=lambda: ["analytic"])
    phase_n_values: List[int] = field(default_factory=list)
    phase_d_values: List[float] = field(default_factory=list)
    scan_grid: Optional[dict] = None
    raw: dict = field(default_factory=dict)

    def grid_1d(self) -> Grid1D:
        return Grid1D.symmetric(self.half_width, self.n_points)

    def grid_2d(self) -> Grid1D:
        return Grid1D.symmetric(self.half_width, self.n_points_2d)


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def load_config(source) -> ScenarioConfig:
    """Build a ScenarioConfig from a YAML path or an already-parsed dict."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            raw = yaml.safe_load(fh)
    else:
        raw = dict(source)
    _require(isinstance(raw, dict), "config must be a mapping")
    name = raw.get("name")
    _require(isinstance(name, str) and name, "config needs a name")
    kind = raw.get("kind", "two_particle")
    _require(kind in ("two_particle", "phase_sweep", "scan"),
             f"unknown kind {kind!r}")

    b = raw.get("barrier") or {}
    barrier = BarrierSpec(kind=b.get("kind", "double"),
                          height=float(b.get("height", 0.4)),
                          width=float(b.get("width", 0.8)),
                          well_width=float(b.get("well_width", 0.0) or 0.0),
                          bias=float(b.get("bias", 0.0)))
    c = raw.get("coulomb")
    coulomb = None
    if c:
        coulomb = CoulombSpec(strength_C=float(c.get("strength", 0.0)),
                              a_C=float(c.get("a_c", 1.2)),
                              sigma_C=float(c.get("sigma_c", 5.0)),
                              epsilon_r=float(c.get("epsilon_r", 11.6)),
                              window_squared=bool(c.get("window_squared", False)))
    m = raw.get("material") or {}
    constants = constants_for(float(m.get("mass_fraction", 0.067)),
                              float(m.get("epsilon_r", 11.6)))
    stats = raw.get("stats", FERMION)
    exchange_sign(stats)  # validates

    packets = []
    for p in raw.get("packets", []):
        packets.append(PacketConfig(
            side=p.get("side", "L"),
            energy_ev=float(p["energy_ev"]),
            sigma_x=float(p["sigma_x"]),
            x0=None if p.get("x0") is None else float(p["x0"])))
    if kind == "two_particle":
        _require(len(packets) == 2, "two_particle scenarios need exactly two packets")
        _require({p.side for p in packets} == {"L", "R"},
                 "two_particle scenarios need one packet per side")
    if kind == "phase_sweep":
        _require(len(packets) == 1 and packets[0].side == "L",
                 "phase_sweep needs a single left base packet")

    g = raw.get("grid") or {}
    pr = raw.get("propagation") or {}
    sweep = raw.get("sweep") or []
    _require(isinstance(sweep, list), "sweep must be a list of axes")
    for axis in sweep:
        _require(axis.get("variable") in _SWEEPVARS,
                 f"unknown sweep variable {axis.get('variable')!r}")
        _require(isinstance(axis.get("values"), list) and axis["values"],
                 "sweep axis needs a non-empty values list")
        if axis["variable"] == "C":
            _require(coulomb is not None, "a C sweep needs a coulomb section")
    routes = list(raw.get("routes", ["analytic"]))
    for r in routes:
        _require(r in _ROUTES, f"unknown route {r!r}")
    if kind == "two_particle" and coulomb is not None and coulomb.strength_C != 0.0:
        _require(routes == ["quadrant2d"] or set(routes) == {"quadrant2d"},
                 "non-separable (Coulomb) scenarios support only the quadrant2d route")

    ps = raw.get("phase_sweep") or {}
    sc = raw.get("scan")

    cfg = ScenarioConfig(
        name=name, kind=kind, barrier=barrier, coulomb=coulomb,
        constants=constants, stats=stats, packets=packets,
        half_width=float(g.get("half_width", 614.4)),
        n_points=int(g.get("n_points", 4096)),
        n_points_2d=int(g.get("n_points_2d", 2048)),
        dt=float(pr.get("dt", 0.25)),
        t_end=float(pr.get("t_end", 700.0)),
        snapshot_stride=int(pr.get("snapshot_stride", 20)),
        t1_mode=pr.get("t1", "fixed"),
        emit=raw.get("emit", "series"),
        sweep=sweep, routes=routes,
        phase_n_values=[int(n) for n in ps.get("n_values", [])],
        phase_d_values=[float(d) for d in ps.get("d_values", [])],
        scan_grid=sc, raw=raw)
    _require(cfg.t1_mode in ("fixed", "auto"), "t1 must be 'fixed' or 'auto'")
    _require(cfg.emit in ("series", "final"), "emit must be 'series' or 'final'")
    return cfg


# ---------------------------------------------------------------------------
# validation

def _sigma_at(sigma0, t, constants):
    # free-spreading width; hbar t / (2 m sigma^2) via the kinetic coefficient
    rate = constants.kinetic_coeff * t / (constants.hbar * sigma0 * sigma0)
    return sigma0 * math.sqrt(1.0 + rate * rate)


def _auto_x0(p: PacketConfig, barrier: BarrierSpec) -> float:
    off = max(AUTO_X0_REFERENCE, barrier.device_half_extent + 4.0 * p.sigma_x + 5.0)
    return -off if p.side == "L" else off


def resolved_packets(cfg: ScenarioConfig):
    """Packets with auto positions filled in and signed wave numbers."""
    out = []
    for p in cfg.packets:
        x0 = p.x0 if p.x0 is not None else _auto_x0(p, cfg.barrier)
        k0 = cfg.constants.energy_to_k(p.energy_ev)
        if p.side == "R":
            k0 = -k0
        out.append((p, WavePacketSpec(x0=x0, k0=k0, sigma_x=p.sigma_x)))
    return out


def validate(cfg: ScenarioConfig) -> List[str]:
    """Actionable diagnostics; an empty list means the scenario is runnable."""
    problems = []
    grid = cfg.grid_1d()
    guard = cfg.half_width * 2.0 * 0.05 / 2.0  # 5% guard band each side
    vmax = float(np.max(np.abs(sample_barrier(cfg.barrier, grid))))
    if cfg.coulomb is not None:
        vmax += abs(cfg.coulomb.strength_C) * cfg.constants.charge_coulomb_coeff / cfg.coulomb.a_C
    phase = vmax * cfg.dt / cfg.constants.hbar
    if phase >= 1.0:
        problems.append(
            f"potential phase per step max|V| dt/hbar = {phase:.2f} rad >= 1; "
            f"reduce dt below {cfg.constants.hbar / vmax:.3f} fs")
    for p, spec in resolved_packets(cfg):
        edge_gap = abs(spec.x0) - cfg.barrier.device_half_extent
        if edge_gap < 4.0 * spec.sigma_x:
            problems.append(
                f"packet at x0={spec.x0:+.1f} is only {edge_gap / spec.sigma_x:.1f} sigma "
                "from the barrier edge (needs >= 4 sigma)")
        v = abs(cfg.constants.velocity(spec.k0))
        t_ref = cfg.t_end
        if cfg.t1_mode == "auto":
            # auto mode stops soon after the packet clears the barrier strip
            arrival = abs(spec.x0) / v
            settle = (4.0 * _sigma_at(spec.sigma_x, arrival, cfg.constants)
                      + cfg.barrier.device_half_extent) / v
            t_ref = min(cfg.t_end, 1.2 * (arrival + settle))
        reach = max(abs(spec.x0), v * t_ref - abs(spec.x0)) \
            + 5.0 * _sigma_at(spec.sigma_x, t_ref, cfg.constants) + guard
        if reach > cfg.half_width:
            problems.append(
                f"packet from x0={spec.x0:+.1f} nm can reach {reach:.0f} nm by "
                f"t={t_ref:.0f} fs but the domain half-width is "
                f"{cfg.half_width:.0f} nm (guard bands included); enlarge the grid "
                "or shorten the run")
        kin_phase = cfg.constants.kinetic_coeff \
            * (abs(spec.k0) + 2.5 / spec.sigma_x) ** 2 * cfg.dt / cfg.constants.hbar
        if kin_phase >= math.pi / 2.0:
            problems.append(
                f"kinetic phase per step {kin_phase:.2f} rad at the packet's "
                "occupied wave numbers exceeds pi/2; reduce dt")
    return problems


# ---------------------------------------------------------------------------
# execution

def _scan_profile(cfg: ScenarioConfig) -> Profile:
    return staircase_profile(cfg.barrier)


class _AutoStop:
    """Stop once the barrier strip has filled and emptied below threshold."""

    def __init__(self, grid, strip_half_width, stride, dt):
        self.w = grid.region_weights(-strip_half_width, strip_half_width)
        self.dx = grid.dx
        self.armed = False
        self.below = 0
        self.hold = max(1, math.ceil(AUTO_T1_HOLD_STEPS / stride))

    def __call__(self, t, f) -> bool:
        mass = float(np.sum(np.abs(f.values) ** 2 * self.w) * self.dx)
        if mass > 10.0 * AUTO_T1_THRESHOLD:
            self.armed = True
            self.below = 0
            return False
        if self.armed and mass < AUTO_T1_THRESHOLD:
            self.below += 1
            return self.below >= self.hold
        self.below = 0
        return False


def _evolve_pair(cfg: ScenarioConfig, specs, v, grid, collect_series):
    """Evolve the two packets; returns (t1, snapshots list[(t, a, b)])."""
    fields0 = [gaussian(s, grid) for _, s in specs]
    pc = PropagatorConfig(t_end=cfg.t_end, dt=cfg.dt,
                          snapshot_stride=cfg.snapshot_stride)
    snaps_a = []
    stop = _AutoStop(grid, cfg.barrier.device_half_extent,
                     cfg.snapshot_stride, cfg.dt) if cfg.t1_mode == "auto" else None
    a_fin = evolve_1d(fields0[0], v, pc,
                      on_snapshot=lambda t, f: snaps_a.append((t, f)),
                      stop_when=stop, constants=cfg.constants)
    t1 = snaps_a[-1][0]
    pc_b = PropagatorConfig(t_end=t1, dt=cfg.dt,
                            snapshot_stride=cfg.snapshot_stride)
    snaps_b = []
    evolve_1d(fields0[1], v, pc_b,
              on_snapshot=lambda t, f: snaps_b.append((t, f)),
              constants=cfg.constants)
    if collect_series:
        merged = [(ta, fa, fb) for (ta, fa), (tb, fb) in zip(snaps_a, snaps_b)]
    else:
        merged = [(t1, snaps_a[-1][1], snaps_b[-1][1])]
    return t1, merged, fields0


def _order_lr(specs, fields_t):
    """Return (a_left, b_right) ordered fields regardless of config order."""
    if specs[0][0].side == "L":
        return fields_t
    return (fields_t[1], fields_t[0])


def _series_rows_analytic(cfg, specs, grid, v, dump, out_dir):
    strip = cfg.barrier.device_half_extent
    t1, snaps, fields0 = _evolve_pair(cfg, specs, v, grid, cfg.emit == "series")
    a0, b0 = _order_lr(specs, (fields0[0], fields0[1]))
    s0 = complex(np.sum(np.conj(a0.values) * b0.values) * grid.dx)
    rows = []
    for t, fa, fb in snaps:
        a, b = _order_lr(specs, (fa, fb))
        tri = probabilities_analytic(a, b, cfg.stats, t=t, strip_half_width=strip,
                                     initial_overlap=s0)
        rows.append(tri.as_row() + ("analytic",))
        _maybe_dump(dump, out_dir, cfg, t, {"a": a, "b": b})
    return t1, rows, snaps


def _series_rows_quadrant2d(cfg, specs, dump, out_dir):
    grid = cfg.grid_2d()
    strip = cfg.barrier.device_half_extent
    v2 = total_potential_2d(cfg.barrier, cfg.coulomb, grid)
    packs = [gaussian(s, grid) for _, s in specs]
    a0, b0 = _order_lr(specs, (packs[0], packs[1]))
    phi0 = build_two_particle(a0, b0, cfg.stats)
    rows = []

    def observe(t, phi):
        tri = probabilities_2d(phi, t=t, strip_half_width=strip)
        rows.append(tri.as_row() + ("quadrant2d",))
        _maybe_dump(dump, out_dir, cfg, t, {"phi": phi})

    pc = PropagatorConfig(t_end=cfg.t_end, dt=cfg.dt,
                          snapshot_stride=cfg.snapshot_stride)
    evolve_2d(phi0, v2, pc, on_snapshot=observe, constants=cfg.constants)
    if cfg.emit == "final":
        rows = rows[-1:]
    return rows


def _maybe_dump(dump_times, out_dir, cfg, t, fields):
    if not dump_times:
        return
    for td in dump_times:
        if abs(t - td) <= cfg.dt * cfg.snapshot_stride / 2.0:
            for tag, f in fields.items():
                save_field(Path(out_dir) / f"{cfg.name}_state_{tag}_t{t:.0f}fs.bin", f)


def _final_routes_rows(cfg, specs, grid, v, snaps, t1):
    """Rows for the limits and determinant routes at t1."""
    rows = []
    t, fa, fb = snaps[-1]
    a, b = _order_lr(specs, (fa, fb))
    strip = cfg.barrier.device_half_extent
    if "determinant" in cfg.routes:
        m_r = correlation_matrix([a, b], ["L", "R"], detect_side="R")
        m_l = correlation_matrix([a, b], ["L", "R"], detect_side="L")
        p_rr = prob_all_right(m_r, cfg.stats)
        p_ll = prob_all_right(m_l, cfg.stats)
        rows.append((t, 1.0 - p_ll - p_rr, p_ll, p_rr, 0.0, "determinant"))
    if "limits" in cfg.routes:
        r_a = float(np.real(half_line_overlap(a, a, "L")))
        t_a = float(np.real(half_line_overlap(a, a, "R")))
        tot = r_a + t_a
        for regime in ("max_overlap", "min_overlap"):
            tri = limit_probabilities(r_a / tot, t_a / tot, regime, cfg.stats, t=t)
            rows.append(tri.as_row() + (f"limits_{regime[:3]}",))
    return rows


def _sweep_space(cfg: ScenarioConfig):
    """Cartesian product of sweep axes as (names, tuples) lists."""
    if not cfg.sweep:
        return [], [()]
    names = [ax["variable"] for ax in cfg.sweep]
    grids = [[float(v) for v in ax["values"]] for ax in cfg.sweep]
    points = [()]
    for vals in grids:
        points = [pt + (v,) for pt in points for v in vals]
    return names, points


def _apply_sweep_point(cfg: ScenarioConfig, names, point) -> ScenarioConfig:
    raw = json.loads(json.dumps(cfg.raw))  # deep copy of the plain dict
    for name, val in zip(names, point):
        if name == "energy":
            for p in raw["packets"]:
                p["energy_ev"] = val
        elif name == "sigma":
            for p in raw["packets"]:
                p["sigma_x"] = val
        elif name == "C":
            raw["coulomb"]["strength"] = val
    return load_config(raw)


_SWEEP_COLUMN = {"energy": "energy_eV", "sigma": "sigma_nm", "C": "C"}


def run(cfg: ScenarioConfig, out_dir, routes: Optional[Sequence[str]] = None,
        workers: int = 1, dump_state: Sequence[float] = ()):
    """Execute a scenario; returns (csv_path, metadata_path, rows)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if routes:
        cfg = load_config({**cfg.raw, "routes": list(routes)})
    problems = validate(cfg) if cfg.kind == "two_particle" else []
    if problems:
        raise SimulationError("scenario does not validate:\n  " + "\n  ".join(problems))
    started = time.perf_counter()
    if cfg.kind == "scan":
        header, rows = _run_scan(cfg)
    elif cfg.kind == "phase_sweep":
        header, rows = _run_phase_sweep(cfg)
    else:
        header, rows = _run_two_particle(cfg, workers, dump_state, out_dir)
    wall = time.perf_counter() - started
    csv_path = out_dir / f"{cfg.name}.csv"
    _write_csv(csv_path, cfg, header, rows)
    meta_path = out_dir / f"{cfg.name}.meta.json"
    meta = {
        "scenario": cfg.raw,
        "resolved": {
            "grid_1d": {"half_width": cfg.half_width, "n_points": cfg.n_points,
                        "dx": cfg.grid_1d().dx},
            "grid_2d": {"n_points": cfg.n_points_2d, "dx": cfg.grid_2d().dx},
            "dt_fs": cfg.dt, "t_end_fs": cfg.t_end,
            "kinetic_coeff": cfg.constants.kinetic_coeff,
            "packets": [{"side": p.side, "x0": s.x0, "k0": s.k0,
                         "sigma_x": s.sigma_x}
                        for p, s in resolved_packets(cfg)]
            if cfg.kind != "scan" else [],
        },
        "version": __version__,
        "wall_time_s": round(wall, 3),
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    return csv_path, meta_path, rows


def _run_two_particle(cfg, workers, dump_state, out_dir):
    names, points = _sweep_space(cfg)
    cols = [_SWEEP_COLUMN[n] for n in names] + \
        ["t_fs", "P_LR", "P_LL", "P_RR", "P_barrier", "route"]

    def one_point(point):
        sub = _apply_sweep_point(cfg, names, point) if names else cfg
        rows = []
        if "analytic" in sub.routes or "limits" in sub.routes or \
                "determinant" in sub.routes:
            grid = sub.grid_1d()
            v = sample_barrier(sub.barrier, grid)
            specs = resolved_packets(sub)
            t1, a_rows, snaps = _series_rows_analytic(
                sub, specs, grid, v, dump_state, out_dir)
            if "analytic" in sub.routes:
                if sub.emit == "final":
                    a_rows = a_rows[-1:]
                rows.extend(a_rows)
            rows.extend(_final_routes_rows(sub, specs, grid, v, snaps, t1))
        if "quadrant2d" in sub.routes:
            specs = resolved_packets(sub)
            rows.extend(_series_rows_quadrant2d(sub, specs, dump_state, out_dir))
        return [point + r for r in rows]

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(one_point, points))
    else:
        chunks = [one_point(pt) for pt in points]
    rows = [r for chunk in chunks for r in chunk]
    return cols, rows


def _run_phase_sweep(cfg):
    _, spec = resolved_packets(cfg)[0]
    k0 = abs(spec.k0)
    sk = 1.0 / (2.0 * spec.sigma_x)
    # Dense analytic momentum density: position shifts of the packet chain
    # reach several microns, whose e^{i k D} phases oscillate far faster in
    # k than the spatial grid's dk resolves.
    npts = 4001
    k = np.linspace(max(k0 - 8.0 * sk, 16.0 * sk / npts), k0 + 8.0 * sk, npts)
    g2 = np.exp(-((k - k0) ** 2) / (2.0 * sk * sk))
    g2 /= g2.sum()
    rows = phase_space_sweep(g2, k, _scan_profile(cfg), spec.sigma_x,
                             cfg.phase_n_values, cfg.phase_d_values,
                             stats=cfg.stats, constants=cfg.constants)
    return ["N", "d", "P_norm"], rows


def _run_scan(cfg):
    sc = cfg.scan_grid or {}
    e_lo = float(sc.get("e_lo", 0.005))
    e_hi = float(sc.get("e_hi", 0.2))
    n = int(sc.get("n_energies", 2000))
    prof = _scan_profile(cfg)
    energies = np.linspace(e_lo, e_hi, n)
    floor = max(prof.v_left, prof.v_right)
    energies = energies[energies > floor + 1e-9]
    t_arr, r_arr, t_amp, r_amp = transmission_scan(prof, energies, cfg.constants)
    rows = [(float(e), float(tt), float(rr),
             float(np.angle(ta)), float(np.angle(ra)))
            for e, tt, rr, ta, ra in zip(energies, t_arr, r_arr, t_amp, r_amp)]
    return ["E_eV", "T", "R", "arg_t", "arg_r"], rows


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _write_csv(path, cfg, header, rows):
    with open(path, "w") as fh:
        fh.write(f"# extunnel-csv v1 scenario={cfg.name} kind={cfg.kind}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# built-ins

def builtin_names() -> List[str]:
    files = resources.files("extunnel").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".yaml"))


def load_builtin(name: str) -> ScenarioConfig:
    files = resources.files("extunnel").joinpath("scenarios")
    path = files.joinpath(f"{name}.yaml")
    if not path.is_file():
        raise ValueError(f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")
    with path.open() as fh:
        return load_config(yaml.safe_load(fh))
