"""Command-line driver: census, verify, mc, ribbon and circuit commands.

Exit codes: 0 pass, 1 invariant failure, 2 input error, 3 cap exhaustion.
All randomness flows from one seed through counter-based Philox streams, so
identical (command, seed, config) runs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Dict, List, Optional

import numpy as np

from s3qd import anyon, gates, group, ribbon, state, verify
from s3qd.anyon import AnyonState, flux_particle
from s3qd.lattice import RibbonParseError, build_lattice, parse_ribbon

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=trial << 32))


def _emit(payload: dict, fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = []
        for key in sorted(payload):
            lines.append(f"{key}: {payload[key]}")
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- census ------------------------------------------------------------------------


def cmd_census(args) -> int:
    rep = state.census_1x1_torus()
    payload = rep.as_dict()
    selection = {}
    for (g1, g2), f in sorted(rep.flux_of_config.items()):
        cls = group.class_of(f).label
        selection[cls] = selection.get(cls, 0) + 1
    payload["single_particle_flux_census"] = selection
    payload["fig7_representatives"] = [
        [group.element_name(h), group.element_name(v)] for h, v in state.fig7_representatives()
    ]
    _emit(payload, args.format, args.out)
    ok = rep.ground_count == 8 and rep.excited_count == 28 \
        and "C2" not in rep.excited_flux_classes
    return EXIT_OK if ok else EXIT_FAIL


# --- verify ------------------------------------------------------------------------


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    checks = verify.run_suites(names, seed=args.seed, tol=args.tolerance)
    failures = 0
    lines = []
    for name, ok, info in checks:
        status = "PASS" if ok else "FAIL"
        failures += (not ok)
        suffix = f"  [{info}]" if info else ""
        lines.append(f"{status}  {name}{suffix}")
    summary = f"{len(checks) - failures}/{len(checks)} checks passed"
    text = "\n".join(lines + [summary]) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if failures == 0 else EXIT_FAIL


# --- monte carlo -------------------------------------------------------------------


def _mc_flux_c3(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
    vac_first = 0
    all_vac4 = 0
    for t in range(trials):
        rng = _trial_rng(seed, t)
        st = AnyonState((flux_particle(group.CLASS_C3),), {(group.MU,): 1.0 + 0j})
        outcomes, _, _ = anyon.measure_flux_channel(st, [0], rng, rounds=4)
        vac_first += (outcomes[0] == "vacuum")
        all_vac4 += all(o == "vacuum" for o in outcomes)
    return [
        _stat("c3 false-negative rate (1 round)", vac_first, trials, 0.25),
        _stat("c3 false-negative rate (4 rounds)", all_vac4, trials, 0.25 ** 4),
    ]


def _mc_flux_c2(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
    plus = 0
    other = 0
    for t in range(trials):
        rng = _trial_rng(seed, t)
        st = AnyonState((flux_particle(group.CLASS_C2),), {(group.SIGMA,): 1.0 + 0j})
        outcomes, _, _ = anyon.measure_flux_channel(st, [0], rng, rounds=1)
        plus += (outcomes[0] == "two_plus")
        other += (outcomes[0] in ("vacuum", "minus"))
    return [
        _stat("c2 remnant |2+> fraction", plus, trials, 0.5),
        _stat("c2 vacuum-or-minus fraction", other, trials, 0.0),
    ]


def _mc_qubit_dual(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
    step_yes = 0
    wrong = 0
    plus = np.array([1, 1, 0], dtype=complex) / math.sqrt(2)
    for t in range(trials):
        rng = _trial_rng(seed, t)
        reg = gates.LogicalRegister(1, rng, mode="exact", caps=caps)
        reg.set_state(plus)
        yes1 = reg.compare_dual(("q", 0), 0)
        if not yes1:
            yes1 = reg.comparison_verdict(("q", 0), 2)
        step_yes += bool(yes1)
        reg2 = gates.LogicalRegister(1, _trial_rng(seed ^ 0x5a5a, t), mode="exact", caps=caps)
        reg2.set_state(plus)
        outcome, _res = reg2.measure_qubit_x(("q", 0))
        wrong += (outcome == "-")
    return [
        _stat("per-step at-least-one-yes on |+>", step_yes, trials, 8.0 / 9.0),
        _stat("|+> misassigned after 3 steps", wrong, trials, (1.0 / 9.0) ** 3),
    ]


def _mc_plus_prep(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
    first = 0
    within5 = 0
    for t in range(trials):
        rng = _trial_rng(seed, t)
        reg = gates.LogicalRegister(1, rng, mode="sampled", caps=caps)
        reg.stock("dual0", caps.prepare + 1)
        reg.stock("2", caps.prepare + 1)
        try:
            res = gates.prepare_plus(reg)
        except gates.CapExhausted:
            continue
        first += (res.repetitions == 1)
        within5 += (res.repetitions <= 5)
    return [
        _stat("plus prep per-round success", first, trials, 2.0 / 3.0),
        _stat("plus prep success within 5 rounds", within5, trials, 1.0 - (1.0 / 3.0) ** 5),
    ]


def _mc_xi_prep(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
    first = 0
    for t in range(trials):
        rng = _trial_rng(seed, t)
        reg = gates.LogicalRegister(1, rng, mode="exact", caps=caps)
        reg.stock("plus", 2 * caps.prepare + 4)
        reg.stock("dual1", 600)
        reg.stock("0", 600)
        res = gates.prepare_xi(reg)
        first += (res.repetitions == 1)
    return [_stat("magic-state success per attempt", first, trials, 0.25)]


def _mc_signflip(n_reps: int):
    def run(trials: int, seed: int, caps: gates.Caps) -> List[dict]:
        rng = _trial_rng(seed, 0)
        # outcome trits are uniform regardless of the input state
        draws = rng.integers(0, 3, size=(trials, n_reps))
        flips = (draws + 2) % 3
        target = 0
        success = 0
        for row in flips:
            counts = [0, 0, 0]
            done = False
            for m in row:
                counts[m] += 1
                if counts[target] % 2 == 1 and all(
                        counts[o] % 2 == 0 for o in range(3) if o != target):
                    done = True
                    break
            success += done
        p = gates.sign_flip_success_probability(n_reps)
        return [_stat(f"sign-flip success within N={n_reps}", success, trials, p)]
    return run


PROTOCOLS = {
    "flux_c3": _mc_flux_c3,
    "flux_c2": _mc_flux_c2,
    "qubit_dual": _mc_qubit_dual,
    "plus_prep": _mc_plus_prep,
    "xi_prep": _mc_xi_prep,
    "signflip_N1": _mc_signflip(1),
    "signflip_N11": _mc_signflip(11),
    "signflip_N35": _mc_signflip(35),
}


def _stat(label: str, hits: int, trials: int, analytic: float) -> dict:
    emp = hits / trials
    sigma = math.sqrt(max(analytic * (1 - analytic), 1e-12) / trials)
    z = (emp - analytic) / sigma if sigma > 0 else 0.0
    return {"label": label, "trials": trials, "empirical": emp,
            "analytic": analytic, "z": z, "within_3_sigma": bool(abs(z) <= 3.0)}


def cmd_mc(args) -> int:
    if args.protocol not in PROTOCOLS:
        sys.stderr.write(f"unknown protocol {args.protocol!r}; "
                         f"choose from {sorted(PROTOCOLS)}\n")
        return EXIT_INPUT
    caps = gates.Caps(sign_flip=args.cap_sign_flip, prepare=args.cap_prepare,
                      measure=args.cap_measure, flux_rounds=args.cap_flux_rounds)
    stats = PROTOCOLS[args.protocol](args.trials, args.seed, caps)
    payload = {"protocol": args.protocol, "seed": args.seed, "stats": stats}
    _emit(payload, args.format, args.out)
    return EXIT_OK if all(s["within_3_sigma"] for s in stats) else EXIT_FAIL


# --- ribbon and circuit ---------------------------------------------------------------


def cmd_ribbon(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        sys.stderr.write(f"cannot read ribbon file: {exc}\n")
        return EXIT_INPUT
    try:
        path = parse_ribbon(text)
    except RibbonParseError as exc:
        sys.stderr.write(f"ribbon parse error: {exc}\n")
        return EXIT_INPUT
    lat = path.lattice
    if args.state_in:
        try:
            with open(args.state_in, encoding="utf-8") as fh:
                psi = state.parse_state(fh.read(), lat)
        except (OSError, ValueError) as exc:
            sys.stderr.write(f"cannot read input state: {exc}\n")
            return EXIT_INPUT
    else:
        psi = state.ground_state(lat)
    try:
        if args.anyon:
            label = ribbon.AnyonRibbonLabel.parse(args.anyon)
            out = ribbon.apply_anyon_ribbon(psi, path, label)
        else:
            z_name, v_name = args.label.split(",")
            out = ribbon.apply_ribbon(psi, path, group.parse_element(z_name),
                                      group.parse_element(v_name))
    except ValueError as exc:
        sys.stderr.write(f"bad ribbon label: {exc}\n")
        return EXIT_INPUT
    if out.is_zero():
        sys.stderr.write("ribbon operator annihilated the state\n")
        return EXIT_FAIL
    out = out.normalized()
    if args.state_out:
        with open(args.state_out, "w", encoding="utf-8") as fh:
            fh.write(state.dump_state(out))
    summary: Dict[str, object] = {"terms": len(out)}
    try:
        viol = state.violations(out)
        summary["flux_violations"] = sum(v.kind == "flux" for v in viol)
        summary["charge_violations"] = sum(v.kind == "charge" for v in viol)
        summary["violations"] = [
            {"kind": v.kind, "vertex": v.site[0], "plaquette": v.site[1],
             "flux_class": v.flux_class, "expectation": round(v.expectation, 6)}
            for v in viol
        ]
    except state.MixedSyndromeError as exc:
        summary["violations"] = f"mixed syndrome: {exc}"
    _emit(summary, args.format, args.out)
    return EXIT_OK


def cmd_circuit(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"cannot read circuit file: {exc}\n")
        return EXIT_INPUT
    circuit = spec["circuit"] if isinstance(spec, dict) else spec
    caps = gates.Caps(sign_flip=args.cap_sign_flip, prepare=args.cap_prepare,
                      measure=args.cap_measure, flux_rounds=args.cap_flux_rounds)
    try:
        result = gates.run_circuit(circuit, mode=args.mode, seed=args.seed, caps=caps)
    except (gates.CapExhausted, anyon.Inconclusive) as exc:
        sys.stderr.write(f"cap exhausted: {exc}\n")
        return EXIT_CAP
    except (ValueError, KeyError, gates.AncillaError, gates.LeakageError) as exc:
        sys.stderr.write(f"bad circuit: {exc}\n")
        return EXIT_INPUT
    if result["state"] is not None:
        result["state"] = [[z.real, z.imag] for z in result["state"]]
    _emit(result, args.format, args.out)
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s3qd",
        description="Desk-scale S3 quantum double simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=1e-9)
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--cap-sign-flip", type=int, default=101)
        p.add_argument("--cap-prepare", type=int, default=64)
        p.add_argument("--cap-measure", type=int, default=64)
        p.add_argument("--cap-flux-rounds", type=int, default=4)

    p = sub.add_parser("census", help="1x1 torus ground/excited census")
    common(p)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("suite", choices=("algebra", "ribbon", "gates", "all"))
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("mc", help="Monte Carlo protocol statistics")
    p.add_argument("--protocol", required=True)
    p.add_argument("--trials", type=int, default=10000)
    common(p)
    p.set_defaults(fn=cmd_mc)

    p = sub.add_parser("ribbon", help="apply a ribbon file to a state")
    p.add_argument("--file", required=True)
    p.add_argument("--label", default="e,e", help="micro label z,v (element names)")
    p.add_argument("--anyon", default=None, help="anyon label C:irrep:c:j:c':j'")
    p.add_argument("--state-in", default=None)
    p.add_argument("--state-out", default=None)
    common(p)
    p.set_defaults(fn=cmd_ribbon)

    p = sub.add_parser("circuit", help="run a circuit JSON file")
    p.add_argument("--file", required=True)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    common(p)
    p.set_defaults(fn=cmd_circuit)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        sys.stderr.write("--trials must be at least 1\n")
        return EXIT_INPUT
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
