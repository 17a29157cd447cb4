"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 numerical failure.  All angles are given in degrees.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click

from . import __version__
from .errors import ConfigurationError, DiracShiftError, EvanescentChannel, InvalidParameter, NumericalError
from .scattering import (
    BarrierConfig,
    IncidentBeam,
    amplitudes_closed_form,
    angles,
    coefficients,
    critical_angles,
    matching_solve,
)
from .shifts import (
    fd_shift_vector,
    shift_reflected_ky0,
    shift_reflected_vector,
    shift_transmitted_ky0,
    shift_transmitted_vector,
)
from .spin import BlochVector, chi_from_bloch

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

HEADER = "phi_in_deg,phi_r_deg,phi_t_deg,dz_r_lambdaC,dz_t_lambdaC,R,T,flags"
DEFAULT_TAU = (0.0, 0.92, math.sqrt(1.0 - 0.92**2))
NEAR_CRITICAL = 1e-3
NEGLIGIBLE_R = 1e-20

DZ_T_NOTE = (
    "Note: dz_t comes from the closed-form transmitted shift. Published dz_t tables "
    "for the default working point are internally inconsistent and are not used as a reference."
)

_DEFAULTS: Dict[str, Any] = {
    "energy": 3.0,
    "barrier": 0.25,
    "mass": 1.0,
    "tau": None,
    "bloch": None,
    "phi_start": 0.0,
    "phi_stop": 64.0,
    "phi_step": 2.0,
    "angles": None,
    "phi": 60.0,
    "ky": 0.0,
    "format": None,
    "out": None,
}


@dataclass
class RunConfig:
    """Resolved run parameters (angles in degrees)."""

    energy: float
    barrier: float
    mass: float
    tau: Tuple[float, float, float]
    ky: float
    fmt: str
    out: Optional[str]
    phi_start: float = 0.0
    phi_stop: float = 64.0
    phi_step: float = 2.0
    angles: Optional[List[float]] = None
    phi: float = 60.0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def barrier_config(self) -> BarrierConfig:
        return BarrierConfig(self.energy, self.barrier, self.mass)

    def angle_list(self) -> List[float]:
        if self.angles is not None:
            return sorted(self.angles)
        if not self.phi_step > 0:
            raise InvalidParameter("--phi-step must be positive")
        if self.phi_stop < self.phi_start:
            raise InvalidParameter("--phi-stop must not be below --phi-start")
        n = int(math.floor((self.phi_stop - self.phi_start) / self.phi_step + 1e-9)) + 1
        return [round(self.phi_start + i * self.phi_step, 10) for i in range(n)]


# -- parsing ----------------------------------------------------------------


def _floats(text, n: Optional[int], what: str) -> List[float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        try:
            vals = [float(v) for v in str(text).split(",") if v.strip() != ""]
        except ValueError:
            raise InvalidParameter(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InvalidParameter(f"{what}: expected {n} values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InvalidParameter(f"{what}: values must be finite")
    return vals


def _resolve_tau(tau, bloch, default=DEFAULT_TAU) -> Tuple[float, float, float]:
    if tau is not None and bloch is not None:
        raise InvalidParameter("give either --tau or --bloch, not both")
    if bloch is not None:
        theta, phi = _floats(bloch, 2, "--bloch")
        t = BlochVector.from_angles(math.radians(theta), math.radians(phi))
        return (t.tx, t.ty, t.tz)
    if tau is not None:
        v = _floats(tau, 3, "--tau")
        norm = math.sqrt(sum(x * x for x in v))
        if abs(norm - 1.0) > 1e-6:
            raise InvalidParameter(f"--tau must be a unit vector (|tau| = {norm:.6g})")
        return tuple(x / norm for x in v)  # type: ignore[return-value]
    return default


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidParameter(f"cannot read config file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"config file {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InvalidParameter("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _pick(name: str, flags: Dict[str, Any], filecfg: Dict[str, Any], default=None):
    if flags.get(name) is not None:
        return flags[name]
    if filecfg.get(name) is not None:
        return filecfg[name]
    return _DEFAULTS.get(name, default) if default is None else default


def build_config(flags: Dict[str, Any], default_format: str, default_tau=DEFAULT_TAU) -> RunConfig:
    """Merge the JSON config file (if any) with command-line flags; flags win."""
    try:
        return _build_config(flags, default_format, default_tau)
    except DiracShiftError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"bad parameter value: {exc}") from None


def _build_config(flags, default_format, default_tau) -> RunConfig:
    filecfg = _load_config(flags.get("config"))
    # a flag for one spin form overrides the other form from the file
    if flags.get("tau") is not None or flags.get("bloch") is not None:
        tau_src, bloch_src = flags.get("tau"), flags.get("bloch")
    else:
        tau_src, bloch_src = filecfg.get("tau"), filecfg.get("bloch")
    fmt = _pick("format", flags, filecfg) or default_format
    if fmt not in ("csv", "json"):
        raise InvalidParameter(f"--format must be csv or json, got {fmt!r}")
    ang = _pick("angles", flags, filecfg)
    cfg = RunConfig(
        energy=float(_pick("energy", flags, filecfg)),
        barrier=float(_pick("barrier", flags, filecfg)),
        mass=float(_pick("mass", flags, filecfg)),
        tau=_resolve_tau(tau_src, bloch_src, default_tau),
        ky=float(_pick("ky", flags, filecfg)),
        fmt=fmt,
        out=_pick("out", flags, filecfg),
        phi_start=float(_pick("phi_start", flags, filecfg)),
        phi_stop=float(_pick("phi_stop", flags, filecfg)),
        phi_step=float(_pick("phi_step", flags, filecfg)),
        angles=_floats(ang, None, "--angles") if ang is not None else None,
        phi=float(_pick("phi", flags, filecfg)),
    )
    for key in ("energy", "barrier", "mass", "ky", "phi"):
        if not math.isfinite(getattr(cfg, key)):
            raise InvalidParameter(f"--{key} must be finite")
    cfg.barrier_config  # validates the physics up front
    cfg.extra = {k: v for k, v in filecfg.items() if k not in _DEFAULTS and k != "config"}
    return cfg


# -- formatting ---------------------------------------------------------------


def _fmt(x: Optional[float], digits: int) -> str:
    if x is None:
        return ""
    s = f"{x:.{digits}f}"
    if s.startswith("-") and float(s) == 0.0:
        s = s[1:]
    return s


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _clean(x: float) -> float:
    return 0.0 if x == 0 else float(x)


# -- computations -----------------------------------------------------------


def _evanescent_error(phi: float) -> EvanescentChannel:
    return EvanescentChannel(f"phi = {phi} deg is past the first critical angle; lateral shifts are defined below it")


def _beam(cfg: RunConfig, phi_deg: float) -> IncidentBeam:
    return IncidentBeam.from_angle(
        cfg.barrier_config, math.radians(phi_deg), chi_from_bloch(cfg.tau), cfg.ky
    )


def sweep_row(cfg: RunConfig, phi_deg: float) -> Dict[str, Any]:
    """One sweep row with unformatted values (None marks an empty cell)."""
    bc = cfg.barrier_config
    beam = _beam(cfg, phi_deg)
    amps = amplitudes_closed_form(beam)
    r, t = coefficients(amps, beam)
    flags: List[str] = []
    row: Dict[str, Any] = {"phi_in_deg": phi_deg, "phi_r_deg": phi_deg, "R": r, "T": t}
    if beam.channel.evanescent:
        flags.append("evanescent")
        row.update(phi_t_deg=None, dz_r_lambdaC=None, dz_t_lambdaC=None)
    else:
        row["phi_t_deg"] = math.degrees(angles(beam)[2])
        if beam.channel.kx_prime < NEAR_CRITICAL * bc.k:
            flags.append("near_critical")
        phi = math.radians(phi_deg)
        if cfg.ky == 0.0:
            dz_r = shift_reflected_ky0(bc, phi, cfg.tau[1])
            dz_t = shift_transmitted_ky0(bc, phi, cfg.tau[1])
        else:
            dz_r = shift_reflected_vector(beam.k, cfg.tau, bc).dz
            dz_t = shift_transmitted_vector(beam.k, cfg.tau, bc).dz
        if bc.barrier == 0.0:
            # nothing is reflected, so there is no reflected beam to displace
            flags.append("no_reflection")
            dz_r = 0.0
        row.update(dz_r_lambdaC=dz_r, dz_t_lambdaC=dz_t)
    row["flags"] = ";".join(flags)
    return row


def sweep_rows(cfg: RunConfig) -> List[Dict[str, Any]]:
    return [sweep_row(cfg, phi) for phi in cfg.angle_list()]


def format_sweep_csv(rows: Sequence[Dict[str, Any]]) -> str:
    lines = [HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r["phi_in_deg"], 2),
                    _fmt(r["phi_r_deg"], 2),
                    _fmt(r["phi_t_deg"], 2),
                    _fmt(r["dz_r_lambdaC"], 4),
                    _fmt(r["dz_t_lambdaC"], 4),
                    _fmt(r["R"], 12),
                    _fmt(r["T"], 12),
                    r["flags"],
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _config_record(cfg: RunConfig) -> Dict[str, Any]:
    return {
        "energy": cfg.energy,
        "barrier": cfg.barrier,
        "mass": cfg.mass,
        "tau": list(cfg.tau),
        "ky": cfg.ky,
    }


def coeffs_record(cfg: RunConfig) -> Dict[str, Any]:
    beam = _beam(cfg, cfg.phi)
    amps = matching_solve(beam)
    r, t = coefficients(amps, beam)
    rec: Dict[str, Any] = {"config": _config_record(cfg), "phi_in_deg": cfg.phi}
    rec["channel"] = "evanescent" if beam.channel.evanescent else "propagating"
    for name in ("A", "B", "C", "D"):
        v = complex(getattr(amps, name))
        rec[name] = {"re": _clean(v.real), "im": _clean(v.imag)}
    rec["R"] = r
    rec["T"] = t
    rec["phi_t_deg"] = None if beam.channel.evanescent else math.degrees(angles(beam)[2])
    phi1, phi2 = critical_angles(cfg.barrier_config)
    rec["phi_cr1_deg"] = math.degrees(phi1)
    rec["phi_cr2_deg"] = math.degrees(phi2)
    return rec


def _compare(analytic: float, fd: float) -> Dict[str, Any]:
    diff = abs(fd - analytic)
    return {
        "analytic": _clean(analytic),
        "fd": _clean(fd),
        "abs_discrepancy": diff,
        "rel_discrepancy": diff / abs(analytic) if abs(analytic) >= 1e-12 else None,
    }


def shifts_record(cfg: RunConfig) -> Dict[str, Any]:
    bc = cfg.barrier_config
    beam = _beam(cfg, cfg.phi)
    rec: Dict[str, Any] = {"config": _config_record(cfg), "phi_in_deg": cfg.phi, "unit": "lambda_C"}
    if beam.channel.evanescent:
        raise _evanescent_error(cfg.phi)
    no_reflection = bc.barrier == 0.0
    for which, vec in (("reflected", shift_reflected_vector), ("transmitted", shift_transmitted_vector)):
        ana = vec(beam.k, cfg.tau, bc)
        if which == "reflected" and no_reflection:
            ana = type(ana)(0.0, 0.0)
        fd = fd_shift_vector(beam, which[0])
        rec[which] = {"dy": _compare(ana.dy, fd.dy), "dz": _compare(ana.dz, fd.dz)}
    if cfg.ky == 0.0:
        phi = math.radians(cfg.phi)
        rec["reflected"]["dz"]["closed_form_ky0"] = 0.0 if no_reflection else _clean(shift_reflected_ky0(bc, phi, cfg.tau[1]))
        rec["transmitted"]["dz"]["closed_form_ky0"] = _clean(shift_transmitted_ky0(bc, phi, cfg.tau[1]))
    if no_reflection:
        rec["note"] = "no reflected wave at zero barrier"
    return rec


def wavepacket_record(cfg: RunConfig, kza: Sequence[float], aperture: Optional[float], nodes: int, samples: int):
    from .wavepacket import SpectralGrid, incident_profile, measure_reflected_shift, reflected_profile

    bc = cfg.barrier_config
    beam = _beam(cfg, cfg.phi)
    if beam.channel.evanescent:
        raise _evanescent_error(cfg.phi)
    grid = SpectralGrid(nodes, samples)
    kz0 = beam.k.kz
    if aperture is not None:
        sizes = [aperture]
    else:
        if abs(kz0) < 1e-12:
            raise InvalidParameter("normal incidence: give --aperture instead of --kza")
        sizes = [x / abs(kz0) for x in kza]
    if cfg.ky == 0.0:
        analytic = shift_reflected_ky0(bc, math.radians(cfg.phi), cfg.tau[1])
    else:
        analytic = shift_reflected_vector(beam.k, cfg.tau, bc).dz
    r, _ = coefficients(amplitudes_closed_form(beam), beam)
    runs = []
    for a in sizes:
        entry: Dict[str, Any] = {"aperture": a, "kz0_a": abs(kz0) * a}
        inc = incident_profile(beam, a, grid)
        if r < NEGLIGIBLE_R:
            # nothing measurable comes back; report the mass, not a centroid of round-off
            mass = reflected_profile(beam, a, grid).mass / inc.mass
            entry.update(reflected_mass=mass, measured=None, rel_error=None, abs_error=None)
        else:
            res = measure_reflected_shift(beam, a, grid)
            entry.update(
                measured=_clean(res.shift),
                rel_error=abs(res.shift / analytic - 1.0) if abs(analytic) >= 1e-12 else None,
                abs_error=abs(res.shift - analytic),
                reflected_mass=res.profile.mass / inc.mass,
            )
        runs.append(entry)
    return {
        "config": _config_record(cfg),
        "phi_in_deg": cfg.phi,
        "analytic": _clean(analytic),
        "R": r,
        "runs": runs,
    }


def trajectory_record(cfg: RunConfig, field_strength: float, x_max: float, steps: int) -> Dict[str, Any]:
    from .trajectory import FieldConfig, closed_form_trajectory, energy_at, propagate

    fld = FieldConfig(field_strength, -1, cfg.energy, cfg.mass)
    res = propagate(fld, x_max, steps, cfg.tau)
    e1 = energy_at(fld, x_max)
    perp = math.hypot(cfg.tau[1], cfg.tau[2])
    closed = closed_form_trajectory(cfg.energy, e1, cfg.mass) * perp
    mag = math.hypot(res.dy, res.dz)
    return {
        "config": {**_config_record(cfg), "field": field_strength, "x_max": x_max, "steps": steps},
        "energy_final": e1,
        "integrated": {"dy": _clean(res.dy), "dz": _clean(res.dz), "magnitude": mag},
        "closed_form": closed,
        "rel_gap": abs(mag / closed - 1.0) if closed > 0 else None,
    }


# -- click plumbing -----------------------------------------------------------


def _run(fn):
    """Map library errors onto exit codes."""
    try:
        return fn()
    except NumericalError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    except (ConfigurationError, DiracShiftError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _common(f):
    opts = [
        click.option("--config", "config", type=click.Path(dir_okay=False), help="JSON file with run parameters; flags override it."),
        click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout."),
        click.option("--format", "format", type=click.Choice(["csv", "json"]), help="Output format."),
        click.option("--ky", type=float, help="Transverse wavenumber ky in mc/hbar (default 0)."),
        click.option("--bloch", help="Spin direction as 'theta,phi' in degrees on the Bloch sphere."),
        click.option("--tau", help="Spin direction as a unit vector 'x,y,z' (default 0,0.92,0.392)."),
        click.option("--mass", type=float, help="Rest mass (default 1)."),
        click.option("--barrier", type=float, help="Barrier height V0 in mc^2 (default 0.25)."),
        click.option("--energy", type=float, help="Energy in mc^2 (default 3)."),
    ]
    for o in opts:
        f = o(f)
    return f


def _single_angle(f):
    return click.option("--phi", type=float, help="Incident angle in degrees (default 60).")(f)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="diracshift")
def main():
    """Spin-dependent lateral shifts of Dirac plane waves at a potential step."""


@main.command(epilog=DZ_T_NOTE)
@_common
@click.option("--phi-start", type=float, help="First incident angle in degrees (default 0).")
@click.option("--phi-stop", type=float, help="Last incident angle in degrees, inclusive (default 64).")
@click.option("--phi-step", type=float, help="Angle step in degrees (default 2).")
@click.option("--angles", help="Explicit comma-separated list of angles in degrees; overrides the range.")
def sweep(**flags):
    """Tabulate angles, shifts and R, T over a range of incident angles."""

    def go():
        cfg = build_config(flags, "csv")
        rows = sweep_rows(cfg)
        if cfg.fmt == "csv":
            _emit(format_sweep_csv(rows), cfg.out)
        else:
            _emit(_json({"config": _config_record(cfg), "header": HEADER.split(","), "rows": rows}), cfg.out)

    _run(go)


@main.command()
@_common
@_single_angle
def coeffs(**flags):
    """Scattering amplitudes A, B, C, D and R, T at one angle (JSON)."""

    def go():
        cfg = build_config(flags, "json")
        _emit(_json(coeffs_record(cfg)), cfg.out)

    _run(go)


@main.command(epilog=DZ_T_NOTE)
@_common
@_single_angle
def shifts(**flags):
    """Analytic shifts compared against the finite-difference oracle (JSON)."""

    def go():
        cfg = build_config(flags, "json")
        _emit(_json(shifts_record(cfg)), cfg.out)

    _run(go)


@main.command()
@_common
@_single_angle
@click.option("--kza", default="50,100,200", show_default=True, help="Comma-separated kz0*a values.")
@click.option("--aperture", type=float, help="Single aperture half-width a in hbar/(mc); overrides --kza.")
@click.option("--nodes", type=int, default=16384, show_default=True, help="Spectral nodes.")
@click.option("--samples", type=int, default=8192, show_default=True, help="Output positions.")
def wavepacket(kza, aperture, nodes, samples, **flags):
    """Finite-beam synthesis of the reflected shift (JSON)."""

    def go():
        cfg = build_config(flags, "json")
        sizes = _floats(kza, None, "--kza")
        if not sizes or any(x <= 0 for x in sizes):
            raise InvalidParameter("--kza values must be positive")
        _emit(_json(wavepacket_record(cfg, sizes, aperture, nodes, samples)), cfg.out)

    _run(go)


@main.command()
@_common
@click.option("--field", "field_strength", type=float, default=1.0, show_default=True, help="Field strength in natural units.")
@click.option("--x-max", type=float, default=997.0, show_default=True, help="Length of the field region in hbar/(mc).")
@click.option("--steps", type=int, default=4000, show_default=True, help="Number of slabs (at least 1000).")
def trajectory(field_strength, x_max, steps, **flags):
    """Shift accumulated across a uniform accelerating field (JSON).

    --energy sets the entry energy; the spin defaults to +y here.
    """

    def go():
        cfg = build_config(flags, "json", default_tau=(0.0, 1.0, 0.0))
        _emit(_json(trajectory_record(cfg, field_strength, x_max, steps)), cfg.out)

    _run(go)


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
def verify(out):
    """Run the invariant suite and print a pass/fail table."""
    from .checks import format_report, run_checks

    results = run_checks()
    _emit(format_report(results), out)
    sys.exit(EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY)


if __name__ == "__main__":  # pragma: no cover
    main()
