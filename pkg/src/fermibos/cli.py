"""Scenario runner.

Parses INI-style scenario files, executes field / ion / ion-spectator /
dyson / multimode runs, and writes CSV time series with a fixed,
byte-reproducible format.  Exit codes are a stable contract:

    0  success
    2  scenario parse error (unknown key, malformed value)
    3  physics validation error (module precondition violated)
    4  boson truncation insufficient even after adaptive doubling
    5  a verification check failed
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dyson as dyson_mod
from . import evolve, ion
from .fock import build_basis
from .model import FieldScenario, MultimodeScenario, field_monomials, multimode_monomials
from .modes import CouplingProfile, ReductionError, Species, WavePacket, fit_effective_params

__all__ = ["main", "load_scenario", "run", "sweep", "verify", "Scenario"]

CSV_HEADER = "t,survival,mean_n,pop_vac,pop_f,pop_fbar,pop_pair,norm_error"

EXIT_PARSE = 2
EXIT_PHYSICS = 3
EXIT_TRUNCATION = 4
EXIT_VERIFY = 5


class ScenarioParseError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class VerifyFailure(Exception):
    pass


_SCHEMA = {
    "couplings": {"g1", "g2", "sigma_t", "T", "delta", "omega0", "k0"},
    "initial": {"state", "boson_n"},
    "integration": {"dt", "t_end", "n_max"},
    "run": {"mode", "target", "target_boson_n", "output"},
    "packets": {"f", "fbar", "bare_g", "bosons"},
}
_MODES = {"field", "ion", "ion-spectator", "dyson", "multimode"}
_STATES = set(evolve.FIELD_SECTORS)


@dataclass
class Scenario:
    profile: CouplingProfile
    initial: str
    boson_n: int
    dt: float
    t_end: float
    n_max: int
    mode: str
    target: str
    target_boson_n: int
    output: str
    packets: tuple[WavePacket, WavePacket] | None = None
    bare_g: float = 0.0
    bosons: tuple[tuple[float, float, int], ...] = ()


def _find_line(path: Path, needle: str) -> int | None:
    for i, text in enumerate(path.read_text().splitlines(), start=1):
        if needle in text:
            return i
    return None


def _get_float(cp, section, key, default, path):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ScenarioParseError(
            f"value of [{section}] {key} is not a number: {raw!r}", _find_line(path, key)
        ) from None


def _get_int(cp, section, key, default, path):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ScenarioParseError(
            f"value of [{section}] {key} is not an integer: {raw!r}", _find_line(path, key)
        ) from None


def _parse_packet(raw: str, species: Species, key: str, path: Path) -> WavePacket:
    parts = raw.split()
    if len(parts) != 3:
        raise ScenarioParseError(
            f"[packets] {key} must be 'p sigma_p x0'", _find_line(path, key)
        )
    try:
        p, sigma_p, x0 = (float(x) for x in parts)
    except ValueError:
        raise ScenarioParseError(
            f"[packets] {key} has a non-numeric entry: {raw!r}", _find_line(path, key)
        ) from None
    return WavePacket(p, sigma_p, x0, species)


def load_scenario(path: str | Path, overrides: dict | None = None) -> Scenario:
    """Parse and validate a scenario file.

    `overrides` replaces [couplings] values before the profile is built
    (used by sweep).  Parse failures raise ScenarioParseError; physics
    failures propagate as ValueError/ReductionError from the modules.
    """
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case (T vs t)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file: {exc}") from exc
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ScenarioParseError(str(exc), line) from exc

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ScenarioParseError(
                f"unknown section [{section}]", _find_line(path, f"[{section}]")
            )
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ScenarioParseError(
                    f"unknown key {key!r} in [{section}]", _find_line(path, key)
                )

    coup = {
        "g1": _get_float(cp, "couplings", "g1", 0.0, path),
        "g2": _get_float(cp, "couplings", "g2", 0.0, path),
        "sigma_t": _get_float(cp, "couplings", "sigma_t", 1.0, path),
        "T": _get_float(cp, "couplings", "T", 30.0, path),
        "delta": _get_float(cp, "couplings", "delta", 0.0, path),
        "omega0": _get_float(cp, "couplings", "omega0", 1.0, path),
        "k0": _get_float(cp, "couplings", "k0", 0.0, path),
    }
    if overrides:
        coup.update(overrides)

    state = cp.get("initial", "state", fallback="vac")
    if state not in _STATES:
        raise ScenarioParseError(
            f"initial state must be one of {sorted(_STATES)}", _find_line(path, "state")
        )
    boson_n = _get_int(cp, "initial", "boson_n", 0, path)

    mode = cp.get("run", "mode", fallback="field")
    if mode not in _MODES:
        raise ScenarioParseError(
            f"run mode must be one of {sorted(_MODES)}", _find_line(path, "mode")
        )
    target = cp.get("run", "target", fallback=state)
    if target not in _STATES:
        raise ScenarioParseError(
            f"target state must be one of {sorted(_STATES)}", _find_line(path, "target")
        )

    packets = None
    bare_g = 0.0
    bosons: tuple[tuple[float, float, int], ...] = ()
    if cp.has_section("packets"):
        raw_f = cp.get("packets", "f", fallback=None)
        raw_fbar = cp.get("packets", "fbar", fallback=None)
        if (raw_f is None) != (raw_fbar is None):
            raise ScenarioParseError("[packets] needs both 'f' and 'fbar'")
        bare_g = _get_float(cp, "packets", "bare_g", 0.0, path)
        if raw_f is not None:
            packets = (
                _parse_packet(raw_f, Species.FERMION, "f", path),
                _parse_packet(raw_fbar, Species.ANTIFERMION, "fbar", path),
            )
        raw_bosons = cp.get("packets", "bosons", fallback=None)
        if raw_bosons is not None:
            entries = []
            for chunk in raw_bosons.split(","):
                parts = chunk.split(":")
                if len(parts) != 3:
                    raise ScenarioParseError(
                        "[packets] bosons entries must be 'k:omega:n_max'",
                        _find_line(path, "bosons"),
                    )
                try:
                    entries.append((float(parts[0]), float(parts[1]), int(parts[2])))
                except ValueError:
                    raise ScenarioParseError(
                        f"[packets] bosons entry is malformed: {chunk!r}",
                        _find_line(path, "bosons"),
                    ) from None
            bosons = tuple(entries)

    if packets is not None and mode != "multimode":
        profile = fit_effective_params(
            packets[0], packets[1], coup["k0"], coup["omega0"], bare_g
        )
    else:
        profile = CouplingProfile(
            g1=coup["g1"],
            g2=coup["g2"],
            sigma_t=coup["sigma_t"],
            T=coup["T"],
            delta=coup["delta"],
            omega0=coup["omega0"],
            k0=coup["k0"],
        )

    if mode == "multimode" and packets is None:
        raise ScenarioParseError("multimode runs need a [packets] section with f and fbar")

    return Scenario(
        profile=profile,
        initial=state,
        boson_n=boson_n,
        dt=_get_float(cp, "integration", "dt", evolve.IntegratorConfig.default_dt(coup["omega0"]), path),
        t_end=_get_float(cp, "integration", "t_end", 30.0, path),
        n_max=_get_int(cp, "integration", "n_max", 8, path),
        mode=mode,
        target=target,
        target_boson_n=_get_int(cp, "run", "target_boson_n", boson_n, path),
        output=cp.get("run", "output", fallback=path.stem + ".csv"),
        packets=packets,
        bare_g=bare_g,
        bosons=bosons,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(series: evolve.TimeSeries, path: Path) -> None:
    """Fixed-format CSV: 17 significant digits, '\\n' endings."""
    lines = [CSV_HEADER]
    pops = series.populations
    for i, t in enumerate(series.times):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    t,
                    series.survival[i],
                    series.mean_boson[i],
                    pops["vac"][i],
                    pops["f"][i],
                    pops["fbar"][i],
                    pops["pair"][i],
                    series.norm_error[i],
                )
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _adaptive(runner, n_max_start: int):
    """Double n_max until the truncation budget holds; re-raise at the cap."""
    n_max = n_max_start
    while True:
        try:
            return runner(n_max), n_max
        except evolve.TruncationError:
            n_max *= 2
            if 4 * (n_max + 1) > 2**16:
                raise


def execute(scenario: Scenario) -> evolve.TimeSeries:
    """Run a scenario and return its TimeSeries."""
    cfg = evolve.IntegratorConfig(t_end=scenario.t_end, dt=scenario.dt)
    p = scenario.profile

    if scenario.mode == "field":
        series, _ = _adaptive(
            lambda nm: evolve.run_field(
                FieldScenario(p, build_basis(nm)),
                scenario.initial,
                cfg,
                boson_n=scenario.boson_n,
                target=scenario.target,
                target_boson_n=scenario.target_boson_n,
            ),
            scenario.n_max,
        )
        return series

    if scenario.mode == "ion":
        series, _ = _adaptive(
            lambda nm: evolve.run_ion(
                FieldScenario(p, build_basis(nm)),
                scenario.initial,
                cfg,
                boson_n=scenario.boson_n,
                target=scenario.target,
                target_boson_n=scenario.target_boson_n,
            ),
            scenario.n_max,
        )
        return series

    if scenario.mode == "ion-spectator":
        series, _ = _adaptive(lambda nm: _run_spectator(scenario, cfg, nm), scenario.n_max)
        return series

    if scenario.mode == "dyson":
        return _run_dyson(scenario, cfg)

    if scenario.mode == "multimode":
        return _run_multimode(scenario, cfg)

    raise AssertionError(f"unhandled mode {scenario.mode}")


def _run_spectator(scenario: Scenario, cfg, n_max: int) -> evolve.TimeSeries:
    cfg.validate(scenario.profile.omega0)
    basis = build_basis(n_max)
    s = FieldScenario(scenario.profile, basis)
    v = ion.encoding_isometry(basis)
    psi0_ion = v @ basis.state(*evolve.FIELD_SECTORS[scenario.initial], scenario.boson_n)
    qubit = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    times, states = evolve.propagate(ion.spectator_monomials(s), np.kron(qubit, psi0_ion), cfg)
    half = basis.dimension
    plus = (states[:, :half] + states[:, half:]) / math.sqrt(2.0)
    tgt_field = basis.state(
        *evolve.FIELD_SECTORS[scenario.target], scenario.target_boson_n
    )
    tgt = int(np.argmax(np.abs(v @ tgt_field)))
    series = evolve.ion_time_series(times, plus, basis, tgt)
    # leakage out of the sigma_x sector is exactly zero; keep norm honest
    minus = (states[:, :half] - states[:, half:]) / math.sqrt(2.0)
    series.norm_error = np.abs(
        np.sqrt(np.sum(np.abs(plus) ** 2 + np.abs(minus) ** 2, axis=1)) - 1.0
    )
    if np.any(series.top_level_population > evolve.TOP_LEVEL_BUDGET):
        raise evolve.TruncationError("top boson level population exceeds budget")
    return series


def _run_dyson(scenario: Scenario, cfg) -> evolve.TimeSeries:
    cfg.validate(scenario.profile.omega0)
    basis = build_basis(scenario.n_max)
    s = FieldScenario(scenario.profile, basis)
    initial = basis.index(*evolve.FIELD_SECTORS[scenario.initial], scenario.boson_n)
    target = basis.index(*evolve.FIELD_SECTORS[scenario.target], scenario.target_boson_n)
    times, amps = dyson_mod.dyson_trajectory(initial, s, cfg.t_end, cfg.n_steps)
    return evolve.field_time_series(times, amps, basis, target)


def _run_multimode(scenario: Scenario, cfg) -> evolve.TimeSeries:
    cfg.validate(scenario.profile.omega0)
    p = scenario.profile
    bosons = scenario.bosons or ((p.k0, p.omega0, scenario.n_max),)
    mm = MultimodeScenario(
        packets=scenario.packets,
        boson_modes=tuple((k, w) for k, w, _ in bosons),
        bare_g=scenario.bare_g,
        n_max=tuple(nm for _, _, nm in bosons),
    )
    monos = multimode_monomials(mm)
    dim = mm.dimension
    boson_dims = [nm + 1 for nm in mm.n_max_per_mode]
    n_boson = int(np.prod(boson_dims))

    occ = evolve.FIELD_SECTORS[scenario.initial]
    psi0 = np.zeros(dim, dtype=complex)
    psi0[(2 * occ[0] + occ[1]) * n_boson + _boson_index(boson_dims, scenario.boson_n)] = 1.0
    t_occ = evolve.FIELD_SECTORS[scenario.target]
    target = (2 * t_occ[0] + t_occ[1]) * n_boson + _boson_index(
        boson_dims, scenario.target_boson_n
    )
    times, states = evolve.propagate(monos, psi0, cfg)

    probs = np.abs(states) ** 2
    sector_masks = {}
    for name, (nb, nd) in evolve.FIELD_SECTORS.items():
        mask = np.zeros(dim, dtype=bool)
        start = (2 * nb + nd) * n_boson
        mask[start : start + n_boson] = True
        sector_masks[name] = mask
    boson_diag = np.zeros(dim)
    top_mask = np.zeros(dim, dtype=bool)
    for i in range(dim):
        rem = i % n_boson
        for d in reversed(boson_dims):
            rem, n = divmod(rem, d)
            boson_diag[i] += n
            if n == d - 1:
                top_mask[i] = True
    norms = np.sqrt(np.sum(probs, axis=1))
    return evolve.TimeSeries(
        times=times,
        survival=probs[:, target],
        mean_boson=probs @ boson_diag,
        populations={n_: probs[:, m].sum(axis=1) for n_, m in sector_masks.items()},
        norm_error=np.abs(norms - 1.0),
        top_level_population=probs[:, top_mask].sum(axis=1),
    )


def _boson_index(boson_dims: list[int], n_first_mode: int) -> int:
    """Flat index of |n, 0, 0, ...> over the boson factors."""
    idx = n_first_mode
    for d in boson_dims[1:]:
        idx *= d
    return idx


def run(scenario_path: str | Path, out_dir: str | Path | None = None) -> Path:
    """Execute a scenario and write its CSV; returns the output path."""
    scenario = load_scenario(scenario_path)
    series = execute(scenario)
    out = Path(scenario.output)
    if out_dir is not None:
        out = Path(out_dir) / out.name
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(series, out)
    return out


def sweep(
    scenario_path: str | Path,
    key: str,
    values: list[float],
    out_dir: str | Path | None = None,
) -> tuple[Path, list[tuple[float, str | None]]]:
    """Run the scenario once per coupling value, concurrently.

    Writes one CSV per value plus a summary CSV `value,peak_mean_n,
    min_survival`; failures are reported per value and do not stop the
    sweep.  Returns (summary path, [(value, error or None)]).
    """
    if key not in _SCHEMA["couplings"]:
        raise ScenarioParseError(f"sweep key must be one of {sorted(_SCHEMA['couplings'])}")
    base = Path(scenario_path)
    out_base = Path(out_dir) if out_dir is not None else Path(".")
    out_base.mkdir(parents=True, exist_ok=True)

    def one(value: float):
        scenario = load_scenario(base, overrides={key: value})
        series = execute(scenario)
        out = out_base / f"{base.stem}_{key}_{value:g}.csv"
        write_csv(series, out)
        return float(np.max(series.mean_boson)), float(np.min(series.survival))

    max_workers = int(os.environ.get("SIM_THREADS", "0")) or min(len(values), os.cpu_count() or 1)
    results: list[tuple[float, str | None]] = []
    rows = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(one, v) for v in values]
        for v, fut in zip(values, futures):
            try:
                peak, min_surv = fut.result()
                rows.append((v, peak, min_surv))
                results.append((v, None))
            except Exception as exc:  # keep sweeping past individual failures
                print(f"sweep value {key}={v:g} failed: {exc}", file=sys.stderr)
                results.append((v, str(exc)))

    summary = out_base / f"{base.stem}_sweep_summary.csv"
    lines = ["value,peak_mean_n,min_survival"]
    for v, peak, min_surv in rows:
        lines.append(f"{v:g},{_fmt(peak)},{_fmt(min_surv)}")
    summary.write_text("\n".join(lines) + "\n")
    return summary, results


def verify(scenario_path: str | Path, out=sys.stdout) -> bool:
    """Run the built-in certification suite for a scenario.

    Prints one pass/fail line per check; returns True only if all pass.
    """
    scenario = load_scenario(scenario_path)
    p = scenario.profile
    checks: list[tuple[str, bool, str]] = []
    rng = np.random.default_rng(7)

    basis = build_basis(scenario.n_max)
    s = FieldScenario(p, basis)
    v = ion.encoding_isometry(basis)

    # 1. ion-encoding conjugation identity at random times
    from .model import hamiltonian_field

    worst = 0.0
    for t in rng.uniform(0.0, scenario.t_end, size=100):
        diff = v @ hamiltonian_field(s, t) @ v.conj().T - ion.hamiltonian_ion(s, t)
        worst = max(worst, float(np.max(np.abs(diff))))
    checks.append(("encoding-identity", worst < 1e-12, f"max deviation {worst:.2e}"))

    # 2. spectator equivalence
    try:
        t_grid = np.linspace(0.0, scenario.t_end, 300)
        rep = ion.spectator_equivalence(s, t_grid, initial_label=scenario.initial)
        checks.append(
            (
                "spectator-equivalence",
                rep.passed,
                f"max observable diff {rep.max_observable_diff:.2e}, "
                f"leakage {rep.max_leakage:.2e}",
            )
        )
    except (ion.EncodingError, evolve.TruncationError) as exc:
        checks.append(("spectator-equivalence", False, str(exc)))

    # 3. dt-halving convergence
    try:
        cfg = evolve.IntegratorConfig(t_end=scenario.t_end, dt=scenario.dt)
        cfg.validate(p.omega0)
        cfg_half = evolve.IntegratorConfig(t_end=scenario.t_end, dt=scenario.dt / 2.0)
        a = evolve.run_field(s, scenario.initial, cfg, boson_n=scenario.boson_n,
                             check_truncation=False)
        b = evolve.run_field(s, scenario.initial, cfg_half, boson_n=scenario.boson_n,
                             check_truncation=False)
        m = min(len(a.times), (len(b.times) + 1) // 2)
        d_surv = float(np.max(np.abs(a.survival[:m] - b.survival[::2][:m])))
        d_mean = float(np.max(np.abs(a.mean_boson[:m] - b.mean_boson[::2][:m])))
        dmax = max(d_surv, d_mean)
        checks.append(("dt-convergence", dmax < 1e-3, f"halving changes observables by {dmax:.2e}"))
    except ValueError as exc:
        checks.append(("dt-convergence", False, str(exc)))

    # 4. truncation headroom
    try:
        cfg = evolve.IntegratorConfig(t_end=scenario.t_end, dt=scenario.dt)
        series, used_basis = evolve.run_field_adaptive(
            p, scenario.initial, cfg, n_max_start=scenario.n_max, boson_n=scenario.boson_n
        )
        top = float(np.max(series.top_level_population))
        checks.append(
            ("truncation-headroom", True, f"n_max={used_basis.n_max}, top-level {top:.2e}")
        )
    except (evolve.TruncationError, ValueError) as exc:
        checks.append(("truncation-headroom", False, str(exc)))

    # 5. Dyson residuals, weak coupling only
    if max(p.g1, p.g2) <= 0.05 * p.omega0:
        pairs = _dyson_pairs(s, scenario)
        rep = dyson_mod.dyson_vs_exact_report(s, pairs, t_end=scenario.t_end)
        worst = max(rep.rows, key=lambda r: r.residual / r.threshold)
        detail = (
            f"{len(rep.rows)} transitions, worst residual {worst.residual:.2e}"
            f" vs threshold {worst.threshold:.2e}"
        )
        checks.append(("dyson-residuals", rep.all_within, detail))
    else:
        checks.append(("dyson-residuals", True, "skipped: nonperturbative couplings"))

    ok = True
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", file=out)
        ok = ok and passed
    return ok


def _dyson_pairs(s: FieldScenario, scenario: Scenario):
    basis = s.basis
    i0 = basis.index(*evolve.FIELD_SECTORS[scenario.initial], scenario.boson_n)
    finals = [
        basis.index(*evolve.FIELD_SECTORS[name], n)
        for name in evolve.FIELD_SECTORS
        for n in (0, 1)
    ]
    return [(i0, f) for f in finals]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fermibos",
        description="Fermion/antifermion/boson field-mode simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write its CSV")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None, help="output directory override")

    p_sweep = sub.add_parser("sweep", help="run a scenario over several coupling values")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--key", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", default=None)

    p_verify = sub.add_parser("verify", help="run the certification suite for a scenario")
    p_verify.add_argument("scenario")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            out = run(args.scenario, args.out)
            print(f"wrote {out}")
            return 0
        if args.command == "sweep":
            try:
                values = [float(v) for v in args.values.split(",")]
            except ValueError:
                print("--values must be a comma-separated list of numbers", file=sys.stderr)
                return EXIT_PARSE
            summary, results = sweep(args.scenario, args.key, values, args.out)
            print(f"wrote {summary}")
            return 0 if all(err is None for _, err in results) else 1
        if args.command == "verify":
            ok = verify(args.scenario)
            return 0 if ok else EXIT_VERIFY
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except evolve.TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (ValueError, ReductionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return 0


if __name__ == "__main__":
    sys.exit(main())
