"""Command-line front end: one subcommand per certification experiment.

Every subcommand resolves its parameters as flags > config file (JSON, via
--config) > built-in defaults, runs a seeded experiment, and emits
machine-readable JSON or CSV.  Reports carry a provenance block (package
version, git description, seed, resolved parameters); two runs with the same
config and seed produce byte-identical output apart from the timestamp field.

Heavy imports happen inside the handlers so that the HAMLB_THREADS
translation in the package __init__ runs before numpy configures its BLAS.
"""

from __future__ import annotations

import argparse
import csv
import json
import subprocess
import sys
import time
from pathlib import Path

DEFAULTS = {
    "worst-instance": {
        "delta": 0.25,
        "beta": 1.0,
        "seed": 0,
        "points": 41,
        "out": None,
    },
    "local-instance": {
        "beta": 1.0,
        "seed": 0,
        "threshold_exponent": 0.1,
        "family_size": 128,
        "steps": 8,
        "support": "exact",
        "out": None,
    },
    "verify-identities": {
        "max_n": 16,
        "csv_out": None,
    },
    "matrix-bound-sweep": {
        "dim": 32,
        "D": 100.0,
        "C": 1.0,
        "trials": 100,
        "seed": 0,
        "t_grid": None,
        "guard": 16.0,
        "out": None,
    },
    "discrimination-game": {
        "m": 20,
        "beta": 1.0,
        "delta": 0.25,
        "seed": 0,
        "schedule_seed": 0,
        "t_max": 4.0,
        "spike": "random",
        "restarts": 50,
        "iters": 60,
        "samples": 200,
        "out": None,
        "emit_csv": None,
    },
    "goodness-scaling": {
        "n_list": "10,12,14,16",
        "k": 3,
        "c": 2,
        "seeds": 5,
        "threshold_exponent": 0.1,
        "support": "exact",
        "out": None,
    },
}


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unknown"


_PATH_KEYS = ("out", "emit_csv", "csv_out")


def _provenance(params: dict, seed) -> dict:
    from . import __version__

    return {
        "version": __version__,
        "git": _git_describe(),
        "seed": seed,
        "parameters": {k: v for k, v in sorted(params.items()) if k not in _PATH_KEYS},
        "timestamp": time.time(),
    }


def _emit_json(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


def _merge(sub: str, args: argparse.Namespace) -> dict:
    """flags > config file > DEFAULTS."""
    merged = dict(DEFAULTS[sub])
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        with open(cfg_path, encoding="utf-8") as fh:
            cfg = json.load(fh)
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if key in ("quick", "config"):
                continue
            merged[key] = val
    for key, val in vars(args).items():
        if key in ("command", "config", "quick", "func"):
            continue
        if val is not None:
            merged[key] = val
    return merged


def _require(parser: argparse.ArgumentParser, merged: dict, *keys: str) -> None:
    missing = [f"--{k.replace('_', '-')}" for k in keys if merged.get(k) is None]
    if missing:
        parser.error(f"the following arguments are required: {', '.join(missing)}")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------- subcommands


def cmd_worst_instance(parser, args) -> int:
    p = _merge("worst-instance", args)
    _require(parser, p, "n")
    from .worst_case import (
        GUARD,
        build_worst_instance,
        default_t_grid,
        distance_bound,
        resonance_time,
        sup_block_distance,
    )

    points = min(int(p["points"]), 17) if args.quick else int(p["points"])
    inst = build_worst_instance(
        int(p["n"]), float(p["delta"]), float(p["beta"]), int(p["seed"])
    )
    rt = resonance_time(inst)
    grid = default_t_grid(inst, points=points)
    rep = sup_block_distance(inst, t_grid=grid, refine=not args.quick)
    bound = GUARD * distance_bound(inst)
    report = {
        "n": inst.n,
        "delta": inst.delta,
        "beta": inst.beta,
        "seed": inst.seed,
        "t_grid": [float(t) for t in rep["t_grid"]],
        "distances": [float(d) for d in rep["distances"]],
        "bound": bound,
        "max_ratio": (rep["sup"] / bound) if bound > 0 else 0.0,
        "sup": rep["sup"],
        "t_at_sup": rep["t_at_sup"],
        "guard": GUARD,
        "certificate": {
            "certified": inst.certificate.certified,
            "max_coeff": inst.certificate.max_coeff,
            "attempts": inst.certificate.attempts,
        },
        "resonance_time": rt if rt != float("inf") else None,
        "provenance": _provenance(p, int(p["seed"])),
    }
    _emit_json(report, p["out"])
    return 0


def cmd_local_instance(parser, args) -> int:
    p = _merge("local-instance", args)
    _require(parser, p, "n", "k", "c")
    import numpy as np

    from .local_case import (
        covariance_psd_check,
        goodness_check,
        per_step_split_bound,
        random_subset_family,
        sample_local_instance,
    )
    from .pauli_core import subset_mask

    n, k, c = int(p["n"]), int(p["k"]), int(p["c"])
    fam_size = min(int(p["family_size"]), 32) if args.quick else int(p["family_size"])
    steps = min(int(p["steps"]), 4) if args.quick else int(p["steps"])
    inst = sample_local_instance(
        n, k, c, float(p["beta"]), int(p["seed"]), support_degree=str(p["support"])
    )
    good = goodness_check(inst, float(p["threshold_exponent"]))
    family = random_subset_family(n, c, int(p["seed"]), max_size=fam_size)
    psd = covariance_psd_check(n, k, c, family)

    g = inst.g.values
    state = np.full(g.size, 1.0 / np.sqrt(g.size), dtype=complex)
    spike = subset_mask(n, family[0])
    t0 = np.pi / (4.0 * float(np.abs(g).max()))
    per_step = []
    for j in range(steps):
        rec = per_step_split_bound(
            inst, spike, state, t0 * 2.0**j, float(p["threshold_exponent"])
        )
        per_step.append(
            {
                "t": rec.t,
                "threshold": rec.threshold,
                "exact_dist": rec.exact_dist,
                "proj_v_norm": rec.proj_v_norm,
                "vbar_block_sup": rec.vbar_block_sup,
                "split_bound": rec.split_bound,
                "split_bound_ok": bool(rec.exact_dist <= rec.split_bound + 1e-9),
                "claimed_vbar_term": rec.claimed_vbar_term,
                "claimed_satisfied": rec.claimed_satisfied,
            }
        )
    report = {
        "params": {
            "n": n,
            "k": k,
            "c": c,
            "beta": inst.beta,
            "seed": inst.seed,
            "sigma2": inst.sigma2,
            "support": str(p["support"]),
            "threshold_exponent": float(p["threshold_exponent"]),
        },
        "max_goodness_fraction": good.max_fraction,
        "goodness": {
            "threshold": good.threshold,
            "mean_fraction": good.mean_fraction,
            "median_fraction": good.quantile(0.5),
            "family_size": good.family_size,
        },
        "psd": {
            "min_eig": psd.min_eigenvalue,
            "floor": psd.floor,
            "satisfied": psd.satisfied,
            "family_size": psd.family_size,
        },
        "per_step": per_step,
        "provenance": _provenance(p, int(p["seed"])),
    }
    _emit_json(report, p["out"])
    return 0


def cmd_verify_identities(parser, args) -> int:
    p = _merge("verify-identities", args)
    from .combinatorics import (
        minimal_nonnegative_n,
        verify_complex_identity,
        verify_reconstruction,
        verify_simple_identity,
    )

    max_n = min(int(p["max_n"]), 12) if args.quick else int(p["max_n"])
    rows = []
    ok_all = True

    cases = fails = 0
    for l in range(0, 65):
        for t in range(0, l + 1):
            cases += 1
            if not verify_simple_identity(l, t):
                fails += 1
    ok_all &= fails == 0
    rows.append(("pairwise-count identity (l<=64)", cases, fails))

    cases = fails = 0
    for n in range(4, max_n + 1):
        for c in range(2, min(4, n // 2) + 1):
            for k in range((3 * c + 1) // 2, min(3 * c, n) + 1):
                for r in range(1, c + 1):
                    cases += 1
                    if not verify_complex_identity(n, k, c, r):
                        fails += 1
    ok_all &= fails == 0
    rows.append((f"alternating-sum identity (n<={max_n})", cases, fails))

    cases = fails = 0
    for n in range(4, max_n + 1):
        for c in range(2, min(4, n // 2) + 1):
            for k in range((3 * c + 1) // 2, min(3 * c, n) + 1):
                cases += 1
                if not verify_reconstruction(n, k, c):
                    fails += 1
    ok_all &= fails == 0
    rows.append((f"count reconstruction (n<={max_n})", cases, fails))

    width = max(len(r[0]) for r in rows) + 2
    print(f"{'check':<{width}}{'cases':>8}  status")
    for name, cases, fails in rows:
        status = "pass" if fails == 0 else f"FAIL ({fails})"
        print(f"{name:<{width}}{cases:>8}  {status}")

    out = sys.stdout if p["csv_out"] is None else open(p["csv_out"], "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["k", "c", "minimal_n"])
        for c in range(2, 5):
            for k in range((3 * c + 1) // 2, 3 * c + 1):
                writer.writerow([k, c, minimal_nonnegative_n(k, c, n_max=64)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0 if ok_all else 1


def cmd_matrix_bound_sweep(parser, args) -> int:
    p = _merge("matrix-bound-sweep", args)
    from .dense_linalg import PerturbationSweepConfig, perturbation_sweep

    trials = min(int(p["trials"]), 20) if args.quick else int(p["trials"])
    t_grid = p["t_grid"]
    if isinstance(t_grid, str):
        t_grid = _float_list(t_grid)
    cfg = PerturbationSweepConfig(
        dim=int(p["dim"]),
        min_gap=float(p["D"]),
        delta_norm=float(p["C"]),
        trials=trials,
        seed=int(p["seed"]),
        t_grid=t_grid,
    )
    res = perturbation_sweep(cfg)
    if p["out"] is None:
        res.write_csv(sys.stdout)
    else:
        with open(p["out"], "w", encoding="utf-8", newline="") as fh:
            res.write_csv(fh)
    guard = float(p["guard"])
    print(
        f"max ratio {res.max_ratio:.6f} over {len(res.rows)} rows (guard {guard:g})",
        file=sys.stderr,
    )
    return 0 if res.max_ratio <= guard else 1


def _game_instance(parser, p):
    """Build (instance, spike_mask, envelope) from merged game parameters."""
    family = p.get("family")
    n = int(p["n"])
    if family == "worst":
        from .worst_case import GUARD, build_worst_instance, distance_bound

        inst = build_worst_instance(n, float(p["delta"]), float(p["beta"]), int(p["seed"]))
        return inst, None, GUARD * distance_bound(inst)
    if family == "local":
        _require(parser, p, "k", "c")
        import numpy as np

        from .local_case import GUARD, SpikeEnsemble, sample_local_instance
        from .pauli_core import subset_mask

        inst = sample_local_instance(
            n, int(p["k"]), int(p["c"]), float(p["beta"]), int(p["seed"]),
            support_degree=str(p.get("support", "exact")),
        )
        spike = p.get("spike", "random")
        if spike == "random":
            rng = np.random.default_rng(np.random.SeedSequence([0x53504B, int(p["seed"])]))
            mask = int(SpikeEnsemble(n, int(p["c"])).sample(rng, 1)[0])
        else:
            mask = subset_mask(n, tuple(_int_list(str(spike))))
        theta = float(n) ** (0.1 * (int(p["k"]) - int(p["c"])))
        envelope = GUARD * float(p["beta"]) * min(2.0 / theta, 2.0)
        return inst, mask, envelope
    parser.error("--family must be 'worst' or 'local'")


def cmd_discrimination_game(parser, args) -> int:
    p = _merge("discrimination-game", args)
    _require(parser, p, "family", "n")
    from .game_sim import (
        adversarial_schedule_search,
        average_case_game,
        evolutions_for,
        random_schedule,
        run_game,
    )

    m = min(int(p["m"]), 10) if args.quick else int(p["m"])
    inst, spike_mask, envelope = _game_instance(parser, p)
    params_out = {k: v for k, v in p.items() if k not in ("out", "emit_csv")}
    params_out["m"] = m
    if spike_mask is not None:
        params_out["spike_mask"] = spike_mask

    if getattr(args, "search", False):
        restarts = min(int(p["restarts"]), 10) if args.quick else int(p["restarts"])
        iters = min(int(p["iters"]), 30) if args.quick else int(p["iters"])
        res = adversarial_schedule_search(
            inst, m, restarts=restarts, seed=int(p["schedule_seed"]),
            iters=iters, spike_mask=spike_mask,
        )
        report = {
            "params": params_out,
            "best_total": res.best_total,
            "best_times": [float(t) for t in res.best_schedule.times],
            "best_deltas": [float(d) for d in res.best_transcript.deltas],
            "evaluations": res.evaluations,
            "history": res.history,
            "envelope": envelope,
            "exceeds_envelope": bool(res.best_total > envelope),
            "provenance": _provenance(p, int(p["schedule_seed"])),
        }
        _emit_json(report, p["out"])
        return 0

    if getattr(args, "average", False):
        if p["family"] != "local":
            parser.error("--average requires --family local")
        samples = min(int(p["samples"]), 50) if args.quick else int(p["samples"])
        sched = random_schedule(2 ** int(p["n"]), m, int(p["schedule_seed"]),
                                t_range=(0.0, float(p["t_max"])))
        rep = average_case_game(inst, sched, samples, int(p["schedule_seed"]))
        report = {
            "params": params_out,
            "samples": rep.samples,
            "mean_total": rep.mean_total,
            "se_total": rep.se_total,
            "per_step_envelope": rep.per_step_envelope,
            "envelope_bound": rep.envelope_bound,
            "envelope_satisfied": rep.envelope_satisfied,
            "projector_diag_exact": rep.projector_diag_exact,
            "quadratic_form_gap": rep.quadratic_form_gap,
            "provenance": _provenance(p, int(p["schedule_seed"])),
        }
        _emit_json(report, p["out"])
        return 0

    ev0, ev1 = evolutions_for(inst, spike_mask)
    sched = random_schedule(ev0.dim, m, int(p["schedule_seed"]),
                            t_range=(0.0, float(p["t_max"])))
    tr = run_game(ev0, ev1, sched)
    report = {
        "params": params_out,
        "times": [float(t) for t in tr.times],
        "deltas": [float(d) for d in tr.deltas],
        "delta_sum": tr.delta_sum,
        "total_dist": tr.total_dist,
        "telescoping_ok": bool(tr.total_dist <= tr.delta_sum + 1e-9),
        "helstrom": tr.helstrom,
        "euclidean_bound": tr.euclidean_bound,
        "step_opnorms": [float(b) for b in tr.step_opnorms]
        if tr.step_opnorms is not None
        else None,
        "provenance": _provenance(p, int(p["schedule_seed"])),
    }
    _emit_json(report, p["out"])
    if p["emit_csv"]:
        with open(p["emit_csv"], "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "t_k", "delta_k", "bound_k"])
            for i in range(tr.m):
                bound_k = tr.step_opnorms[i] if tr.step_opnorms is not None else ""
                writer.writerow([i + 1, tr.times[i], tr.deltas[i], bound_k])
    return 0


def cmd_goodness_scaling(parser, args) -> int:
    p = _merge("goodness-scaling", args)
    import numpy as np

    from .local_case import goodness_check, sample_local_instance

    n_list = p["n_list"]
    if isinstance(n_list, str):
        n_list = _int_list(n_list)
    seeds = min(int(p["seeds"]), 2) if args.quick else int(p["seeds"])
    if args.quick:
        n_list = [n for n in n_list if n <= 14] or n_list[:1]
    k, c = int(p["k"]), int(p["c"])

    rows = []
    medians = {}
    for n in n_list:
        vals = []
        for s in range(seeds):
            inst = sample_local_instance(
                n, k, c, 1.0, s, support_degree=str(p["support"])
            )
            rep = goodness_check(inst, float(p["threshold_exponent"]))
            rows.append((n, k, c, rep.max_fraction))
            vals.append(rep.max_fraction)
        medians[n] = float(np.median(vals))

    out = sys.stdout if p["out"] is None else open(p["out"], "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["n", "k", "c", "max_fraction"])
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    for n in n_list:
        print(f"n={n}: median max_fraction {medians[n]:.4f} over {seeds} seeds",
              file=sys.stderr)
    return 0


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamlb",
        description="Constructs hard Hamiltonian-learning instances and "
        "certifies their perturbation bounds, goodness statistics, and "
        "discrimination-game envelopes with exact small-scale simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (flags override it)")
        sp.add_argument("--quick", action="store_true",
                        help="cap sizes/trials for a fast pass")

    sp = sub.add_parser(
        "worst-instance",
        help="spiked dense-spectrum instance: block distances vs the envelope",
    )
    common(sp)
    sp.add_argument("--n", type=int, help="qubit count (required)")
    sp.add_argument("--delta", type=float, help="coefficient decay exponent (default 0.25)")
    sp.add_argument("--beta", type=float, help="spike strength (default 1)")
    sp.add_argument("--seed", type=int, help="instance seed (default 0)")
    sp.add_argument("--points", type=int, help="time-grid size (default 41)")
    sp.add_argument("--out", help="JSON output path (default stdout)")
    sp.set_defaults(func=cmd_worst_instance)

    sp = sub.add_parser(
        "local-instance",
        help="Gaussian k-local instance: goodness, covariance PSD floor, split bound",
    )
    common(sp)
    sp.add_argument("--n", type=int, help="qubit count (required)")
    sp.add_argument("--k", type=int, help="interaction locality (required)")
    sp.add_argument("--c", type=int, help="flip-set size (required)")
    sp.add_argument("--beta", type=float, help="spike strength (default 1)")
    sp.add_argument("--seed", type=int, help="instance seed (default 0)")
    sp.add_argument("--threshold-exponent", type=float,
                    help="goodness threshold n^(e*(k-c)) exponent e (default 0.1)")
    sp.add_argument("--family-size", type=int,
                    help="subset family size for the PSD check (default 128)")
    sp.add_argument("--steps", type=int, help="split-bound time points (default 8)")
    sp.add_argument("--support", choices=["exact", "upto"],
                    help="interaction support |S| = k or |S| <= k (default exact)")
    sp.add_argument("--out", help="JSON output path (default stdout)")
    sp.set_defaults(func=cmd_local_instance)

    sp = sub.add_parser(
        "verify-identities",
        help="exact combinatorial identity sweep + minimal-n nonnegativity CSV",
    )
    common(sp)
    sp.add_argument("--max-n", type=int, help="largest n in the sweep (default 16)")
    sp.add_argument("--csv-out", help="CSV path for the minimal-n report (default stdout)")
    sp.set_defaults(func=cmd_verify_identities)

    sp = sub.add_parser(
        "matrix-bound-sweep",
        help="randomized diagonal-perturbation envelope check, CSV output",
    )
    common(sp)
    sp.add_argument("--dim", type=int, help="matrix dimension (default 32)")
    sp.add_argument("--D", type=float, help="minimum diagonal gap (default 100)")
    sp.add_argument("--C", type=float, help="perturbation operator norm (default 1)")
    sp.add_argument("--trials", type=int, help="random trials (default 100)")
    sp.add_argument("--seed", type=int, help="sweep seed (default 0)")
    sp.add_argument("--t-grid", help="comma-separated times (default geometric)")
    sp.add_argument("--guard", type=float, help="ratio guard for exit code (default 16)")
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.set_defaults(func=cmd_matrix_bound_sweep)

    sp = sub.add_parser(
        "discrimination-game",
        help="interleaved-evolution game transcript, search, or spike average",
    )
    common(sp)
    sp.add_argument("--family", choices=["worst", "local"], help="instance family (required)")
    sp.add_argument("--n", type=int, help="qubit count (required)")
    sp.add_argument("--k", type=int, help="locality (local family)")
    sp.add_argument("--c", type=int, help="flip-set size (local family)")
    sp.add_argument("--delta", type=float, help="decay exponent (worst family, default 0.25)")
    sp.add_argument("--beta", type=float, help="spike strength (default 1)")
    sp.add_argument("--seed", type=int, help="instance seed (default 0)")
    sp.add_argument("--m", type=int, help="rounds (default 20)")
    sp.add_argument("--schedule-seed", type=int, help="schedule/search seed (default 0)")
    sp.add_argument("--t-max", type=float, help="max round time for random schedules (default 4)")
    sp.add_argument("--spike", help="flip set as comma list of qubits, or 'random'")
    sp.add_argument("--search", action="store_true",
                    help="hill-climb schedules for the largest total distance")
    sp.add_argument("--restarts", type=int, help="search restarts (default 50)")
    sp.add_argument("--iters", type=int, help="search iterations per restart (default 60)")
    sp.add_argument("--average", action="store_true",
                    help="Monte-Carlo over the spike ensemble (local family)")
    sp.add_argument("--samples", type=int, help="spike samples for --average (default 200)")
    sp.add_argument("--emit-csv", help="also write per-round CSV (k, t_k, delta_k, bound_k)")
    sp.add_argument("--out", help="JSON output path (default stdout)")
    sp.set_defaults(func=cmd_discrimination_game)

    sp = sub.add_parser(
        "goodness-scaling",
        help="max goodness fraction across n, CSV (n, k, c, max_fraction)",
    )
    common(sp)
    sp.add_argument("--n-list", help="comma-separated qubit counts (default 10,12,14,16)")
    sp.add_argument("--k", type=int, help="locality (default 3)")
    sp.add_argument("--c", type=int, help="flip-set size (default 2)")
    sp.add_argument("--seeds", type=int, help="instances per n (default 5)")
    sp.add_argument("--threshold-exponent", type=float, help="goodness exponent (default 0.1)")
    sp.add_argument("--support", choices=["exact", "upto"], help="support mode (default exact)")
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.set_defaults(func=cmd_goodness_scaling)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
