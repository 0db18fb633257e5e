"""Command line front end.

A run is described by an INI file ([group], [filtration], [task], [output])
plus a few flags; results land as a CSV table and a JSON summary in the
output directory.  Exit codes: 0 success, 2 configuration problems
(including growth-bound rejections and insufficient transfer inputs),
3 resource caps, 4 failed verification of a certified property or witness.
"""
import argparse
import configparser
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from .boxspace import build_box_space, isometry_profile
from .cache import GraphCache
from .cayley import GrowthBound, build_quotient_cayley, fit_growth, growth_profile
from .covers import (
    Cover,
    CoverSet,
    cover_prop41,
    diagonal_transfer,
    families_from_multiplicity_cover,
    verify_cover,
)
from .dimension import FiniteMetricSpace, asdim_profile, random_metric_space, rs_dim
from .errors import (
    BoxdimError,
    ConfigError,
    GrowthBoundError,
    InsufficientInputError,
    ResourceCapError,
    VerificationError,
)
from .groups import (
    Filtration,
    QuotientFamily,
    direct_product,
    free_abelian,
    hirsch_length,
    unitriangular,
)

TASKS = ("growth", "quotient", "boxspace", "isoradius", "cover", "families",
         "rsdim", "profile", "transfer", "cache_gc")


def _ints(text):
    return [int(t) for t in re.split(r"[,\s]+", text.strip()) if t]


def _require(section, key):
    value = section.get(key)
    if value is None:
        raise ConfigError(f"[{section.name}] is missing the {key!r} key")
    return value


def load_config(path):
    cfg = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cfg.read_file(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except configparser.Error as e:
        raise ConfigError(f"malformed config {path}: {e}") from None
    return cfg


def group_from_config(cfg):
    if "group" not in cfg:
        raise ConfigError("config needs a [group] section")
    sec = cfg["group"]
    kind = _require(sec, "kind")
    if kind == "free_abelian":
        return free_abelian(int(_require(sec, "rank")))
    if kind == "unitriangular":
        return unitriangular(int(_require(sec, "size")))
    if kind == "direct_product":
        factors = []
        for item in re.split(r"[,\s]+", _require(sec, "factors").strip()):
            if not item:
                continue
            name, _, arg = item.partition(":")
            if name == "free_abelian":
                factors.append(free_abelian(int(arg)))
            elif name == "unitriangular":
                factors.append(unitriangular(int(arg)))
            else:
                raise ConfigError(f"unknown factor kind {name!r}")
        if not factors:
            raise ConfigError("direct_product needs at least one factor")
        return direct_product(*factors)
    raise ConfigError(f"unknown group kind {kind!r}")


def moduli_from_config(cfg):
    if "filtration" not in cfg:
        raise ConfigError("config needs a [filtration] section")
    sec = cfg["filtration"]
    if sec.get("moduli"):
        moduli = _ints(sec["moduli"])
    elif sec.get("rule") == "powers":
        base = int(_require(sec, "base"))
        count = int(_require(sec, "count"))
        if base < 2 or count < 1:
            raise ConfigError(f"powers rule needs base >= 2 and count >= 1, "
                              f"got base={base} count={count}")
        moduli = [base ** i for i in range(1, count + 1)]
    else:
        raise ConfigError("[filtration] needs either moduli or rule = powers")
    nested = sec.getboolean("nested", fallback=True)
    return tuple(moduli), nested


def filtration_from_config(cfg, spec):
    moduli, nested = moduli_from_config(cfg)
    if nested:
        return Filtration(spec, moduli)
    return QuotientFamily(spec, moduli)


def growth_from_config(sec, spec, state_cap):
    """Explicit growth_c/growth_d if configured, else a fitted bound."""
    c = sec.get("growth_c")
    d = sec.get("growth_d")
    if c is not None and d is not None:
        return GrowthBound(C=Fraction(c), d=int(d), validated_range=(1, 0))
    r_max = sec.getint("growth_r_max", fallback=8)
    return fit_growth(growth_profile(spec, r_max, state_cap))


# --- witness serialization ----------------------------------------------------

def _families_json(cover):
    return [
        [{"label": s.label,
          "center": list(s.center) if s.center is not None else None,
          "radius": s.radius,
          "parts": [[ci, [int(v) for v in ids]] for ci, ids in s.parts]}
         for s in family]
        for family in cover.families
    ]


def cover_to_json(cover, R, S, check_disjoint, group, moduli, nested=True):
    return {
        "kind": "cover-witness",
        "group": group,
        "moduli": list(moduli),
        "nested": nested,
        "R": R,
        "S": S,
        "check_disjoint": check_disjoint,
        "families": _families_json(cover),
    }


def cover_from_json(box, data):
    families = []
    for family in data["families"]:
        sets = []
        for s in family:
            parts = tuple((int(ci), tuple(int(v) for v in ids))
                          for ci, ids in s["parts"])
            center = tuple(s["center"]) if s.get("center") is not None else None
            sets.append(CoverSet(label=s["label"], parts=parts,
                                 center=center, radius=s.get("radius")))
        families.append(tuple(sets))
    return Cover(space=box, families=tuple(families))


def verify_witness(args, cfg):
    try:
        with open(args.verify_witness) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read witness {args.verify_witness}: {e}") from None
    spec = group_from_config(cfg)
    if data.get("group") != spec.describe():
        raise ConfigError(f"witness group {data.get('group')!r} does not match "
                          f"the configured group {spec.describe()!r}")
    moduli = tuple(int(m) for m in data["moduli"])
    filtration = (Filtration(spec, moduli) if data.get("nested", True)
                  else QuotientFamily(spec, moduli))
    box = build_box_space(filtration, threads=args.threads, cache=args.cache)
    rows = data["rows"] if data.get("kind") == "profile-witness" else [data]
    checked = []
    for row in rows:
        cover = cover_from_json(box, row)
        report = verify_cover(cover, row["R"], row.get("S"),
                              check_disjoint=row.get("check_disjoint", True))
        if not report.ok:
            raise VerificationError(
                f"witness failed verification at R={row['R']}: "
                f"is_cover={report.is_cover} "
                f"oversized={report.oversized_witness} "
                f"close_pairs={report.close_pair_witnesses[:3]}")
        checked.append({"R": row["R"], "S": row.get("S"),
                        "r_multiplicity": report.r_multiplicity})
    return None, {"task": "verify", "witness": str(args.verify_witness),
                  "verified": True, "rows": checked}, None


# --- tasks ---------------------------------------------------------------------

def task_growth(args, cfg, sec):
    spec = group_from_config(cfg)
    r_max = sec.getint("r_max", fallback=8)
    profile = growth_profile(spec, r_max, args.state_cap)
    d = sec.getint("growth_d", fallback=None)
    bound = fit_growth(profile, d=d)
    rows = [["r", "ball_size"]]
    rows += [[str(r), str(sz)] for r, sz in enumerate(profile.sizes)]
    summary = {
        "task": "growth", "group": spec.describe(), "r_max": r_max,
        "hirsch_length": hirsch_length(spec),
        "sizes": list(profile.sizes),
        "loglog_slope": round(bound.slope, 6),
        "bound": {"C": str(bound.C), "d": bound.d,
                  "validated_range": list(bound.validated_range)},
    }
    return rows, summary, None


def _component_rows(box):
    rows = [["component", "modulus", "order", "degree", "diameter"]]
    for i, g in enumerate(box.components):
        rows.append([str(i), str(g.modulus), str(g.n_vertices),
                     str(g.degree), str(g.diameter)])
    return rows


def task_quotient(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    summary = {
        "task": "quotient", "group": spec.describe(),
        "moduli": list(box.moduli),
        "orders": [g.n_vertices for g in box.components],
        "diameters": list(box.diameters),
    }
    return _component_rows(box), summary, None


def task_boxspace(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    summary = {
        "task": "boxspace", "group": spec.describe(),
        "moduli": list(box.moduli),
        "component_count": box.component_count,
        "n_points": box.n_points,
        "hirsch_length": hirsch_length(spec),
        "diameters": list(box.diameters),
    }
    return _component_rows(box), summary, None


def task_isoradius(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    profile = isometry_profile(box, budget=args.state_cap)
    effective = profile.effective_radii
    rows = [["component", "modulus", "isometry_radius", "exact", "effective_radius"]]
    for i, r in enumerate(profile.radii):
        rows.append([str(i), str(box.moduli[i]), str(r.radius),
                     str(r.exact).lower(), str(effective[i])])
    thresholds = {}
    for k in _ints(sec.get("k_list", "")):
        t = profile.threshold(k)
        thresholds[str(k)] = t
    summary = {
        "task": "isoradius", "group": spec.describe(),
        "moduli": list(box.moduli),
        "radii": [r.radius for r in profile.radii],
        "exact": [r.exact for r in profile.radii],
        "effective_radii": list(effective),
        "thresholds": thresholds,
    }
    return rows, summary, None


def _cover_rows(cover):
    rows = [["family", "label", "center_component", "center_vertex",
             "radius", "n_points"]]
    for fi, s in cover.all_sets():
        ci, cv = s.center if s.center is not None else ("", "")
        rows.append([str(fi), s.label, str(ci), str(cv),
                     "" if s.radius is None else str(s.radius),
                     str(s.n_points())])
    return rows


def task_cover(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    R = sec.getint("r", fallback=None)
    if R is None:
        raise ConfigError("[task] cover needs r")
    growth = growth_from_config(sec, spec, args.state_cap)
    cover, report = cover_prop41(box, R, growth, threads=args.threads)
    summary = {
        "task": "cover", "group": spec.describe(), "moduli": list(box.moduli),
        "R": report.R, "S": report.S,
        "r_multiplicity": report.r_multiplicity,
        "K": report.params.K, "m": report.params.m, "S_0": report.params.S_0,
        "n_sets": cover.n_sets(),
        "max_set_diameter": report.max_set_diameter,
        "doubling_radii": list(report.doubling_radii),
        "packing_counts": list(report.packing_counts),
        "ok": report.ok,
    }
    witness = cover_to_json(cover, report.R, report.S, check_disjoint=False,
                            group=spec.describe(), moduli=box.moduli)
    return _cover_rows(cover), summary, witness


def task_families(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    R = sec.getint("r", fallback=None)
    if R is None:
        raise ConfigError("[task] families needs r")
    growth = growth_from_config(sec, spec, args.state_cap)
    base, base_report = cover_prop41(box, R, growth, threads=args.threads)
    cover = families_from_multiplicity_cover(base, R)
    report = verify_cover(cover, R, base_report.S)
    summary = {
        "task": "families", "group": spec.describe(), "moduli": list(box.moduli),
        "R": R, "S": base_report.S,
        "n_families": len(cover.families),
        "multiplicity_bound": base_report.r_multiplicity,
        "sets_per_family": [len(f) for f in cover.families],
        "family_min_distances": list(report.family_min_distances),
        "ok": report.ok,
    }
    witness = cover_to_json(cover, R, base_report.S, check_disjoint=True,
                            group=spec.describe(), moduli=box.moduli)
    return _cover_rows(cover), summary, witness


def task_rsdim(args, cfg, sec):
    source = sec.get("source", fallback="component")
    R = sec.getint("r", fallback=None)
    S = sec.getint("s", fallback=None)
    if R is None or S is None:
        raise ConfigError("[task] rsdim needs r and s")
    method = sec.get("method", fallback="exact")
    witness = None
    if source == "random":
        import random as _random
        points = sec.getint("points", fallback=8)
        max_distance = sec.getint("max_distance", fallback=6)
        space = random_metric_space(_random.Random(args.seed), points, max_distance)
        label = f"random(points={points}, max_distance={max_distance}, seed={args.seed})"
    elif source == "component":
        spec = group_from_config(cfg)
        filtration = filtration_from_config(cfg, spec)
        index = sec.getint("component", fallback=0)
        quotients = filtration.quotients()
        if not (0 <= index < len(quotients)):
            raise ConfigError(f"component index {index} out of range")
        graph = build_quotient_cayley(quotients[index], vertex_cap=args.vertex_cap,
                                      cache=args.cache)
        space = FiniteMetricSpace.from_graph(graph)
        label = f"{spec.describe()} mod {graph.modulus}"
    else:
        raise ConfigError(f"unknown rsdim source {source!r}")
    kwargs = {}
    if method == "exact":
        kwargs = {"n_cap": sec.getint("n_cap", fallback=8),
                  "point_cap": sec.getint("point_cap", fallback=60)}
    elif method == "exhaustive":
        kwargs = {"point_cap": sec.getint("point_cap", fallback=12)}
    result = rs_dim(space, R, S, method=method, **kwargs)
    rows = [["point", "family"]]
    if result.coloring is not None:
        for v in range(space.n_vertices):
            rows.append([str(v), str(result.coloring[v])])
    summary = {
        "task": "rsdim", "space": label, "R": R, "S": S, "method": result.method,
        "n": result.n, "exceeded_cap": result.exceeded_cap,
        "n_points": space.n_vertices,
    }
    if result.cover is not None and source == "component":
        witness = cover_to_json(result.cover, R, S, check_disjoint=True,
                                group=spec.describe(), moduli=[graph.modulus])
    return rows, summary, witness


def task_profile(args, cfg, sec):
    spec = group_from_config(cfg)
    filtration = filtration_from_config(cfg, spec)
    box = build_box_space(filtration, threads=args.threads, cache=args.cache,
                          vertex_cap=args.vertex_cap)
    r_list = _ints(_require(sec, "r_list"))
    S_cap = sec.getint("s_cap", fallback=None)
    if S_cap is None:
        raise ConfigError("[task] profile needs s_cap")
    mode = sec.get("mode", fallback="structured")
    growth = None
    if mode == "prop41":
        growth = growth_from_config(sec, spec, args.state_cap)
    table = asdim_profile(box, r_list, S_cap=S_cap, mode=mode, growth=growth,
                          threads=args.threads,
                          n_cap=sec.getint("n_cap", fallback=8),
                          point_cap=sec.getint("point_cap", fallback=60))
    rows = [list(r) for r in table.as_csv_rows()]
    summary = {
        "task": "profile", "group": spec.describe(), "moduli": list(box.moduli),
        "mode": mode, "S_cap": S_cap,
        "hirsch_length": hirsch_length(spec),
        "rows": [{"R": r.R, "s_achieved": r.s_achieved, "n_achieved": r.n_achieved,
                  "note": r.note} for r in table.rows],
    }
    witness_rows = []
    for r in table.rows:
        if r.cover is None:
            continue
        witness_rows.append({"R": r.R, "S": r.s_achieved,
                             "check_disjoint": r.mode != "prop41",
                             "families": _families_json(r.cover)})
    witness = None
    if witness_rows:
        witness = {"kind": "profile-witness",
                   "group": spec.describe(), "moduli": list(box.moduli),
                   "nested": True,
                   "rows": witness_rows}
    return rows, summary, witness


def _striped_coloring(radius, stripe):
    return {(x,): (x // stripe) % 2 for x in range(-radius, radius + 1)}


def task_transfer(args, cfg, sec):
    spec = group_from_config(cfg)
    if spec.describe() != free_abelian(1).describe():
        raise ConfigError("the built-in striped inputs need the rank-1 free "
                          "abelian group")
    R = sec.getint("r", fallback=2)
    S = sec.getint("s", fallback=3)
    r0 = sec.getint("r0", fallback=None)
    if r0 is None:
        raise ConfigError("[task] transfer needs r0")
    radii = _ints(_require(sec, "radii"))
    stripe = S + 1
    if stripe < R:
        raise ConfigError(f"striped inputs need S + 1 >= R, got S={S} R={R}")
    inputs = [(r, _striped_coloring(r, stripe)) for r in radii]
    result = diagonal_transfer(spec, inputs, R=R, S=S, r0=r0, n=1,
                               state_cap=args.state_cap)
    items = sorted(result.coloring.items())
    rows = [["coords", "family"]]
    rows += [[";".join(str(c) for c in v), str(fam)] for v, fam in items]
    summary = {
        "task": "transfer", "group": spec.describe(),
        "R": R, "S": S, "r0": r0,
        "input_radii": sorted(radii),
        "surviving_radii": list(result.surviving_radii),
        "discarded_radii": list(result.discarded_radii),
        "n_points": len(result.coloring),
    }
    return rows, summary, None


def task_cache_gc(args, cfg, sec):
    if args.cache is None:
        raise ConfigError("cache_gc needs --cache-dir or BOXDIM_CACHE_DIR")
    budget = sec.getint("budget", fallback=None)
    if budget is None:
        raise ConfigError("[task] cache_gc needs budget (bytes)")
    kept, deleted, freed = args.cache.gc(budget)
    summary = {"task": "cache_gc", "directory": str(args.cache.directory),
               "budget_bytes": budget,
               "kept": kept, "deleted": deleted, "freed_bytes": freed}
    return None, summary, None


TASK_FUNCS = {
    "growth": task_growth,
    "quotient": task_quotient,
    "boxspace": task_boxspace,
    "isoradius": task_isoradius,
    "cover": task_cover,
    "families": task_families,
    "rsdim": task_rsdim,
    "profile": task_profile,
    "transfer": task_transfer,
    "cache_gc": task_cache_gc,
}


# --- entry point -----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="boxdim",
        description="Box spaces of nilpotent groups: covers, dimension "
                    "profiles, and certified witnesses.")
    parser.add_argument("--config", required=True, help="INI run description")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for component builds and solves")
    parser.add_argument("--cache-dir", default=None,
                        help="graph cache directory (default: $BOXDIM_CACHE_DIR)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized spaces")
    parser.add_argument("--export-witness", default=None, metavar="PATH",
                        help="write the verified witness JSON here")
    parser.add_argument("--verify-witness", default=None, metavar="PATH",
                        help="re-verify a previously exported witness and exit")
    return parser


def run(args):
    cfg = load_config(args.config)
    if args.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    cache_dir = args.cache_dir or os.environ.get("BOXDIM_CACHE_DIR")
    args.cache = GraphCache(cache_dir) if cache_dir else None
    args.state_cap = 10 ** 7
    args.vertex_cap = 10 ** 6
    if "limits" in cfg:
        args.state_cap = cfg["limits"].getint("state_cap", fallback=args.state_cap)
        args.vertex_cap = cfg["limits"].getint("vertex_cap", fallback=args.vertex_cap)

    if args.verify_witness:
        csv_rows, summary, witness = verify_witness(args, cfg)
        name = "verify"
    else:
        if "task" not in cfg:
            raise ConfigError("config needs a [task] section")
        sec = cfg["task"]
        name = _require(sec, "name")
        if name not in TASK_FUNCS:
            raise ConfigError(f"unknown task {name!r}; expected one of {TASKS}")
        csv_rows, summary, witness = TASK_FUNCS[name](args, cfg, sec)

    out = cfg["output"] if "output" in cfg else {}
    outdir = Path(out.get("dir", "."))
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if csv_rows is not None:
        csv_path = outdir / out.get("csv", f"{name}.csv")
        with open(csv_path, "w", newline="") as fh:
            import csv as _csv
            _csv.writer(fh, lineterminator="\n").writerows(csv_rows)
        written.append(str(csv_path))
    summary_path = outdir / out.get("summary", "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(str(summary_path))
    if witness is not None and args.export_witness:
        with open(args.export_witness, "w") as fh:
            json.dump(witness, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(args.export_witness)
    print("wrote " + ", ".join(written))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, GrowthBoundError, InsufficientInputError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except ResourceCapError as e:
        print(f"resource cap exceeded: {e}", file=sys.stderr)
        return 3
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 4
    except BoxdimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
