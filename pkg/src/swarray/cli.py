"""Command-line entry points.

Four subcommands wire JSON run configurations to the library pipeline:

* ``extract``     -- field-sample file to transmission/reception coefficients
* ``crlb``        -- bound maps and direction-averaged bound tables
* ``beampattern`` -- normalized beam-pattern grid and line cuts
* ``optimize``    -- differential-evolution geometry search

Configurations are validated strictly (unknown keys are rejected) and all
physical quantities carry explicit units in their key names (``_mm``,
``_m``, ``_ghz``, ``_mhz``, ``_deg``, ``_ns``), converted to SI on load.

Exit codes: 0 success, 2 configuration/validation failure, 3 runtime
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, elements, fisher, optimizer, sigmodel, swe
from .errors import ConfigError, SwarrayError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

_UNIT_SCALES = {
    "_mm": 1e-3,
    "_m": 1.0,
    "_ghz": 2.0 * np.pi * 1e9,
    "_mhz": 2.0 * np.pi * 1e6,
    "_hz": 2.0 * np.pi,
    "_deg": np.pi / 180.0,
    "_rad": 1.0,
    "_ns": 1e-9,
    "_s": 1.0,
}


def _to_si(key: str, value: float) -> float:
    for suffix, scale in _UNIT_SCALES.items():
        if key.endswith(suffix):
            return float(value) * scale
    return float(value)


def _require_keys(section: dict, allowed: set, required: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"{where}: missing required keys {sorted(missing)}")


def _load_config(path, schema: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(cfg, dict) or cfg.get("schema") != schema:
        raise ConfigError(f"{path}: expected schema tag {schema!r}")
    return cfg


# ---------------------------------------------------------------------------
# shared config fragments

_ELEMENT_KEYS = {
    "kind", "x_mm", "y_mm", "z_mm", "x_m", "y_m", "z_m",
    "rotation_deg", "rotation_rad", "axis", "x", "y", "z", "rotation",
}


def _element_field(entry: dict, base: str, names: dict, where: str):
    """Resolve one element coordinate: fixed value with units or a gamma ref."""
    ref = entry.get(base)
    fixed_keys = [k for k in entry if k.startswith(base + "_")]
    if ref is not None and fixed_keys:
        raise ConfigError(f"{where}: give either {base!r} ref or a fixed value, not both")
    if ref is not None:
        if not (isinstance(ref, dict) and set(ref) == {"ref"}):
            raise ConfigError(f"{where}: {base!r} must be {{\"ref\": <gamma name>}}")
        name = ref["ref"]
        if name not in names:
            raise ConfigError(f"{where}: unknown gamma parameter {name!r}")
        return elements.GammaRef(names[name])
    if len(fixed_keys) > 1:
        raise ConfigError(f"{where}: multiple units given for {base!r}")
    if fixed_keys:
        return _to_si(fixed_keys[0], entry[fixed_keys[0]])
    return 0.0


def _parse_elements(entries, names: dict, where: str) -> list[elements.ElementTemplate]:
    templates = []
    for i, entry in enumerate(entries):
        here = f"{where}[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{here}: element entries must be objects")
        _require_keys(entry, _ELEMENT_KEYS, {"kind"}, here)
        kind = entry["kind"]
        if kind not in ("hertzian_dipole", "crossed_dipole"):
            raise ConfigError(f"{here}: unsupported element kind {kind!r}")
        axis = entry.get("axis", "z" if kind == "hertzian_dipole" else "x")
        if isinstance(axis, list):
            axis = tuple(float(v) for v in axis)
        templates.append(
            elements.ElementTemplate(
                kind=kind,
                x=_element_field(entry, "x", names, here),
                y=_element_field(entry, "y", names, here),
                z=_element_field(entry, "z", names, here),
                rotation=_element_field(entry, "rotation", names, here),
                axis=axis,
            )
        )
    return templates


_MODEL_KEYS = {
    "fields_file", "elements", "sphere_radius_mm", "sphere_radius_m",
    "order", "carrier_ghz", "bin_spacing_mhz", "bins", "grid_n_theta", "grid_n_phi",
}


def _build_model(section: dict, base_dir: Path, where: str) -> elements.ReceptionModel:
    _require_keys(section, _MODEL_KEYS, {"order", "carrier_ghz", "bins"}, where)
    order = int(section["order"])
    omega0 = _to_si("carrier_ghz", section["carrier_ghz"])
    bins = int(section["bins"])
    spacing = _to_si("bin_spacing_mhz", section.get("bin_spacing_mhz", 0.0))
    if bins > 1 and spacing <= 0.0:
        raise ConfigError(f"{where}: bin_spacing_mhz required for more than one bin")

    if "fields_file" in section:
        if "elements" in section:
            raise ConfigError(f"{where}: give fields_file or elements, not both")
        fss = elements.load_field_samples(base_dir / section["fields_file"])
    else:
        if "elements" not in section:
            raise ConfigError(f"{where}: needs fields_file or an elements list")
        radius_keys = [k for k in ("sphere_radius_mm", "sphere_radius_m") if k in section]
        if not radius_keys:
            raise ConfigError(f"{where}: analytic models need a sphere radius")
        radius = _to_si(radius_keys[0], section[radius_keys[0]])
        templates = _parse_elements(section["elements"], {}, f"{where}.elements")
        specs = [t.build(np.zeros(0)) for t in templates]
        grid = swe.SphereGrid.for_order(
            order,
            n_theta=section.get("grid_n_theta"),
            n_phi=section.get("grid_n_phi"),
        )
        half = (bins - 1) // 2
        freqs = omega0 + np.arange(-half, half + 1) * spacing if bins > 1 else np.array([omega0])
        fss = elements.synthesize_array_fields(specs, grid, radius, freqs)
    return elements.build_reception_model(fss, order, omega0, spacing, bins)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_extract(args) -> int:
    fss = elements.load_field_samples(args.fields)
    sets = elements.extract_port_coefficients(fss, args.order)

    def pack(values: np.ndarray):
        return [[float(v.real), float(v.imag)] for v in values]

    payload = {
        "schema": "swarray-swc-v1",
        "source": str(args.fields),
        "order": args.order,
        "radius_m": fss.radius,
        "excitation": elements.FIELD_FILE_EXCITATION,
        "frequencies_rad_s": fss.frequencies.tolist(),
        "ports": fss.port_count,
        "coefficients": [
            {
                "port": port,
                "frequency_rad_s": float(tset.omega),
                "transmission": pack(tset.values),
                "reception": pack(swe.reception_from_transmission(tset).values),
            }
            for port, row in enumerate(sets)
            for tset in row
        ],
    }
    Path(args.out).write_text(json.dumps(payload))
    print(f"wrote {args.out}: {fss.port_count} ports x {len(fss.frequencies)} frequencies, order {args.order}")
    return EXIT_OK


_CRLB_KEYS = {"schema", "model", "noise_variance", "alphas_deg", "map_grid", "average_grid", "out_dir"}


def _direction_grid(n_theta: int, n_phi: int) -> np.ndarray:
    theta = (np.arange(n_theta) + 0.5) * (np.pi / n_theta)
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    return np.column_stack([np.repeat(theta, n_phi), np.tile(phi, n_theta)])


def _cmd_crlb(args) -> int:
    cfg = _load_config(args.config, "swarray-crlb-v1")
    base = Path(args.config).parent
    _require_keys(cfg, _CRLB_KEYS, {"schema", "model", "alphas_deg", "out_dir"}, "config")
    alphas_deg = cfg["alphas_deg"]
    if not alphas_deg:
        raise ConfigError("config: alphas_deg must list at least one polarization slant")
    alphas = np.radians(np.asarray(alphas_deg, dtype=float))
    model = _build_model(cfg["model"], base, "config.model")
    noise = fisher.NoiseModel.white(float(cfg.get("noise_variance", 0.01)))
    pulse = sigmodel.PulseSpectrum.flat(model.bins)

    out_dir = base / cfg["out_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)

    map_grid = cfg.get("map_grid", {})
    _require_keys(map_grid, {"n_theta", "n_phi"}, set(), "config.map_grid")
    dirs = _direction_grid(int(map_grid.get("n_theta", 18)), int(map_grid.get("n_phi", 24)))
    rows = analysis.crlb_map(model, pulse, noise, alphas, dirs)
    map_path = out_dir / "crlb_map.csv"
    analysis.write_crlb_map_csv(rows, map_path)

    avg_grid = cfg.get("average_grid", {})
    _require_keys(avg_grid, {"n_theta", "n_phi"}, set(), "config.average_grid")
    avg_path = out_dir / "crlb_average.csv"
    with open(avg_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["alpha_deg", "avg_bound_phi0_rad2", "avg_bound_theta0_rad2",
             "rms_phi0_mdeg", "rms_theta0_mdeg", "singular_nodes"]
        )
        for a_deg, a in zip(alphas_deg, alphas):
            avg = fisher.average_crlb(
                model, pulse, noise, float(a),
                n_theta=int(avg_grid.get("n_theta", 16)),
                n_phi=int(avg_grid.get("n_phi", 32)),
            )
            writer.writerow(
                [
                    f"{a_deg:.6f}",
                    f"{avg.azimuth:.12g}",
                    f"{avg.elevation:.12g}",
                    f"{np.degrees(np.sqrt(avg.azimuth)) * 1e3:.6f}",
                    f"{np.degrees(np.sqrt(avg.elevation)) * 1e3:.6f}",
                    avg.singular_nodes,
                ]
            )
    print(f"wrote {map_path} ({len(rows)} rows) and {avg_path} ({len(alphas_deg)} rows)")
    return EXIT_OK


_BEAM_KEYS = {"schema", "model", "true_theta0_deg", "true_phi0_deg", "alpha_deg",
              "grid_n_theta", "grid_n_phi", "out_dir"}


def _cmd_beampattern(args) -> int:
    cfg = _load_config(args.config, "swarray-beampattern-v1")
    base = Path(args.config).parent
    _require_keys(
        cfg, _BEAM_KEYS,
        {"schema", "model", "true_theta0_deg", "true_phi0_deg", "alpha_deg", "out_dir"},
        "config",
    )
    model = _build_model(cfg["model"], base, "config.model")
    true_dir = (np.radians(cfg["true_theta0_deg"]), np.radians(cfg["true_phi0_deg"]))
    alpha = np.radians(cfg["alpha_deg"])
    pol = np.array([0.0, np.sin(alpha), np.cos(alpha)])
    n_theta = int(cfg.get("grid_n_theta", 91))
    n_phi = int(cfg.get("grid_n_phi", 181))
    theta_nodes = np.linspace(0.0, np.pi, n_theta)
    phi_nodes = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    grid = analysis.beam_pattern_grid(model, true_dir, pol, theta_nodes, phi_nodes)

    out_dir = base / cfg["out_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)
    analysis.write_beam_pattern_csv(grid, out_dir / "beampattern_grid.csv")
    analysis.write_beam_pattern_cuts_csv(
        grid, out_dir / "beampattern_cut_theta.csv", out_dir / "beampattern_cut_phi.csv"
    )

    # peak sidelobe: largest value outside the main-lobe neighbourhood
    th_idx = np.argmin(np.abs(theta_nodes - true_dir[0]))
    ph_idx = np.argmin(np.abs(phi_nodes - true_dir[1]))
    mask = np.ones_like(grid.values, dtype=bool)
    half_w = max(1, n_theta // 18)
    mask[max(0, th_idx - half_w) : th_idx + half_w + 1, :] = False
    mask[:, max(0, ph_idx - half_w) : ph_idx + half_w + 1] = False
    sidelobe = float(np.max(grid.values[mask]))
    print(
        f"wrote beam-pattern CSVs to {out_dir}; peak value {grid.peak_value:.6f}, "
        f"max sidelobe {sidelobe:.6f}"
    )
    return EXIT_OK


_OPT_KEYS = {"schema", "scenario", "domain", "criterion", "de", "out_dir"}
_SCENARIO_KEYS = {
    "gamma", "initial", "elements", "sphere_radius_mm", "sphere_radius_m",
    "order", "carrier_ghz", "bin_spacing_mhz", "bins", "noise_variance", "min_spacing_mm",
}
_GAMMA_KEYS = {"name", "lower_mm", "upper_mm", "lower_m", "upper_m", "lower_deg",
               "upper_deg", "lower_rad", "upper_rad"}
_DOMAIN_KEYS = {"n_theta", "n_phi", "n_alpha", "tau_ns"}
_DE_KEYS = {"population", "generations", "mutation", "crossover", "seed", "parallel"}


def _parse_gamma(entries, where: str):
    names, lower, upper = {}, [], []
    for i, entry in enumerate(entries):
        here = f"{where}[{i}]"
        _require_keys(entry, _GAMMA_KEYS, {"name"}, here)
        lo_keys = [k for k in entry if k.startswith("lower_")]
        up_keys = [k for k in entry if k.startswith("upper_")]
        if len(lo_keys) != 1 or len(up_keys) != 1:
            raise ConfigError(f"{here}: exactly one lower_* and one upper_* bound required")
        names[entry["name"]] = i
        lower.append(_to_si(lo_keys[0].replace("lower", ""), entry[lo_keys[0]]))
        upper.append(_to_si(up_keys[0].replace("upper", ""), entry[up_keys[0]]))
    return names, np.array(lower), np.array(upper)


def _cmd_optimize(args) -> int:
    cfg = _load_config(args.config, "swarray-optimize-v1")
    base = Path(args.config).parent
    _require_keys(cfg, _OPT_KEYS, {"schema", "scenario", "out_dir"}, "config")

    scen_cfg = cfg["scenario"]
    _require_keys(
        scen_cfg, _SCENARIO_KEYS,
        {"gamma", "elements", "order", "carrier_ghz", "bins"},
        "config.scenario",
    )
    names, lower, upper = _parse_gamma(scen_cfg["gamma"], "config.scenario.gamma")
    templates = _parse_elements(scen_cfg["elements"], names, "config.scenario.elements")
    mapping = elements.GeometryMapping(templates=tuple(templates))

    radius_keys = [k for k in ("sphere_radius_mm", "sphere_radius_m") if k in scen_cfg]
    if not radius_keys:
        raise ConfigError("config.scenario: a sphere radius is required")
    radius = _to_si(radius_keys[0], scen_cfg[radius_keys[0]])

    domain_cfg = cfg.get("domain", {})
    _require_keys(domain_cfg, _DOMAIN_KEYS, set(), "config.domain")
    domain = optimizer.ParameterDomain.linear(
        n_theta=int(domain_cfg.get("n_theta", 16)),
        n_phi=int(domain_cfg.get("n_phi", 32)),
        n_alpha=int(domain_cfg.get("n_alpha", 8)),
        taus=(_to_si("tau_ns", domain_cfg.get("tau_ns", 0.0)),),
    )

    bins = int(scen_cfg["bins"])
    scenario = optimizer.ArrayScenario(
        mapping=mapping,
        radius=radius,
        order=int(scen_cfg["order"]),
        omega0=_to_si("carrier_ghz", scen_cfg["carrier_ghz"]),
        delta_omega=_to_si("bin_spacing_mhz", scen_cfg.get("bin_spacing_mhz", 0.0)),
        bins=bins,
        pulse=sigmodel.PulseSpectrum.flat(bins),
        noise=fisher.NoiseModel.white(float(scen_cfg.get("noise_variance", 0.01))),
        domain=domain,
        min_spacing=_to_si("min_spacing_mm", scen_cfg.get("min_spacing_mm", 0.0)),
    )

    de_cfg = cfg.get("de", {})
    _require_keys(de_cfg, _DE_KEYS, set(), "config.de")
    seed = args.seed if args.seed is not None else de_cfg.get("seed")
    parallel = args.parallel or int(de_cfg.get("parallel", _default_parallel()))
    config = optimizer.DeConfig(
        population=int(de_cfg.get("population", 18)),
        generations=int(de_cfg.get("generations", 40)),
        mutation=float(de_cfg.get("mutation", 0.8)),
        crossover=float(de_cfg.get("crossover", 0.9)),
        seed=None if seed is None else int(seed),
        parallel=parallel,
    )

    x0 = None
    if "initial" in scen_cfg:
        initial = scen_cfg["initial"]
        x0 = np.empty(len(names))
        for key, value in initial.items():
            base_name, _, unit = key.rpartition("_")
            if base_name not in names:
                raise ConfigError(f"config.scenario.initial: unknown gamma parameter {base_name!r}")
            x0[names[base_name]] = _to_si("_" + unit, value)

    criterion = args.criterion or cfg.get("criterion", "D")
    bounds = np.column_stack([lower, upper])
    result = optimizer.optimize_array(scenario, bounds, config, criterion=criterion, x0=x0)

    out_dir = base / cfg["out_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)
    inv_names = {v: k for k, v in names.items()}
    summary = {
        "criterion": criterion,
        "best_objective": result.best_objective,
        "best_gamma": {inv_names[i]: float(v) for i, v in enumerate(result.best_gamma)},
        "evaluations": result.evaluations,
        "wall_time_s": result.wall_time_s,
        "diagnostics": result.diagnostics,
        "trace": [
            {"generation": g, "best_objective": float(b), "mean_objective": float(m)}
            for g, (b, m) in enumerate(zip(result.trace_best, result.trace_mean), start=1)
        ],
    }
    (out_dir / "result.json").write_text(json.dumps(summary, indent=2))
    with open(out_dir / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_objective", "mean_objective"])
        for g, (b, m) in enumerate(zip(result.trace_best, result.trace_mean), start=1):
            writer.writerow([g, f"{b:.12g}", f"{m:.12g}"])
    (out_dir / "geometry.json").write_text(
        json.dumps({inv_names[i]: float(v) for i, v in enumerate(result.best_gamma)}, indent=2)
    )
    print(
        f"criterion {criterion}: best objective {result.best_objective:.6g} "
        f"after {result.evaluations} evaluations ({result.wall_time_s:.1f} s); "
        f"artifacts in {out_dir}"
    )
    return EXIT_OK


def _default_parallel() -> int:
    env = os.environ.get("SWARRAY_PARALLEL")
    return int(env) if env else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarray",
        description="Spherical-wave array characterization, bounds and geometry optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract mode coefficients from a field-sample file")
    p.add_argument("--fields", required=True, help="field-sample JSON file")
    p.add_argument("--order", required=True, type=int, help="truncation order")
    p.add_argument("--out", required=True, help="output coefficient file")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("crlb", help="bound maps and direction-averaged bound tables")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_crlb)

    p = sub.add_parser("beampattern", help="normalized beam pattern grid and cuts")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_beampattern)

    p = sub.add_parser("optimize", help="differential-evolution geometry search")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p.add_argument("--criterion", choices=("A", "D"), default=None)
    p.add_argument("--parallel", type=int, default=None, help="candidate evaluations in flight")
    p.set_defaults(func=_cmd_optimize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SwarrayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - last-resort mapping
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
