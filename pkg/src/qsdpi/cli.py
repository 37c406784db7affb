"""Command-line frontend.

Subcommands: eta, order {degrade, less-noisy, more-capable, complete,
regularized, approx}, capacity, weyl {build, degrade-test, gamma0,
ln-mixture}, gaussian {eta, sweep, g-check}, lsi, figure2.

Channel files are JSON: either a named family, e.g.
``{"kind": "depolarizing", "p": 0.5, "dim": 2}``, or explicit Kraus
operators ``{"kind": "kraus", "ops": [[[[re, im], ...], ...], ...]}``.
Reports are deterministic (byte-identical for identical configs and seeds);
entropic values are in nats unless --bits is given.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import capacities, contraction, divergences, functional, gaussian, orders, weyl
from .channels import QuantumChannel, build_channel
from .errors import NoClosedForm, QsdpiError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALSIFIED = 2

LN2 = float(np.log(2.0))


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return f"{float(x):.12g}"
    return str(x)


def _complex_matrix(entries) -> np.ndarray:
    return np.array([[complex(e[0], e[1]) for e in row] for row in entries])


def load_channel(path: str) -> tuple[QuantumChannel, dict]:
    with open(path) as fh:
        cfg = json.load(fh)
    kind = cfg.pop("kind")
    if kind == "kraus":
        ops = [_complex_matrix(op) for op in cfg["ops"]]
        return QuantumChannel(ops, name="kraus"), {"kind": "kraus"}
    chan = build_channel(kind, **cfg)
    return chan, {"kind": kind, **cfg}


def load_state(path: str) -> np.ndarray:
    with open(path) as fh:
        cfg = json.load(fh)
    if "matrix" in cfg:
        return _complex_matrix(cfg["matrix"])
    if cfg.get("kind") == "maximally_mixed":
        d = int(cfg["dim"])
        return np.eye(d) / d
    raise ValueError("state file needs 'matrix' or kind 'maximally_mixed'")


class Report:
    def __init__(self, bits: bool = False):
        self.lines: list[str] = []
        self.scale = 1.0 / LN2 if bits else 1.0
        self.unit = "bits" if bits else "nats"

    def add(self, key: str, value, entropic: bool = False):
        if entropic and isinstance(value, (float, np.floating)):
            value = float(value) * self.scale
        self.lines.append(f"{key} = {_fmt(value)}")

    def raw(self, text: str):
        self.lines.append(text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _echo_config(rep: Report, args, keys):
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            rep.add(f"config.{k}", v)


def cmd_eta(args) -> int:
    chan, meta = load_channel(args.channel)
    rep = Report(args.bits)
    rep.add("channel", json.dumps(meta, sort_keys=True))
    _echo_config(rep, args, ("seed", "restarts", "divergence"))
    try:
        closed = contraction.closed_form_eta(meta["kind"], **{
            k: v for k, v in meta.items() if k != "kind"})
        rep.add("closed_form", closed)
    except (NoClosedForm, TypeError, QsdpiError):
        rep.add("closed_form", "unavailable")
    sigma = load_state(args.sigma) if args.sigma else None
    est = contraction.estimate_eta(chan, divergence=args.divergence, sigma=sigma,
                                   restarts=args.restarts, seed=args.seed)
    rep.add("estimate_lower", est.value_lower)
    _emit(args, rep.text())
    return EXIT_OK


def cmd_order(args) -> int:
    M, meta_m = load_channel(args.channel)
    rep = Report(args.bits)
    rep.add("channel", json.dumps(meta_m, sort_keys=True))
    code = EXIT_OK
    if args.mode == "degrade":
        N, meta_n = load_channel(args.channel2)
        rep.add("channel2", json.dumps(meta_n, sort_keys=True))
        verdict = orders.check_degradable(M, N, tol=args.tol)
        rep.raw(verdict.render())
        if verdict.status != "certified":
            code = EXIT_FALSIFIED
    elif args.mode in ("less-noisy", "more-capable"):
        N, meta_n = load_channel(args.channel2)
        rep.add("channel2", json.dumps(meta_n, sort_keys=True))
        variant = "ln" if args.mode == "less-noisy" else "mc"
        verdict = orders.falsify_less_noisy(M, N, variant=variant,
                                            trials=args.trials, seed=args.seed)
        rep.raw(verdict.render())
        if verdict.status == "falsified":
            code = EXIT_FALSIFIED
    elif args.mode == "complete":
        N, meta_n = load_channel(args.channel2)
        rep.add("channel2", json.dumps(meta_n, sort_keys=True))
        verdict = orders.check_complete_ln(M, N, trials=args.trials, seed=args.seed)
        rep.raw(verdict.render())
        if verdict.status == "falsified":
            code = EXIT_FALSIFIED
    elif args.mode == "regularized":
        N, meta_n = load_channel(args.channel2)
        rep.add("channel2", json.dumps(meta_n, sort_keys=True))
        verdict = orders.check_regularized_ln(M, N, trials=args.trials, seed=args.seed)
        rep.raw(verdict.render())
        if verdict.status == "falsified":
            code = EXIT_FALSIFIED
    else:  # approx
        N, meta_n = load_channel(args.channel2)
        rep.add("channel2", json.dumps(meta_n, sort_keys=True))
        report = orders.approx_orders_from_diamond(M, N)
        rep.raw(orders.render_approx_orders(report))
    _emit(args, rep.text())
    return code


def cmd_capacity(args) -> int:
    rep = Report(args.bits)
    _echo_config(rep, args, ("kind", "eps", "dim_b", "seed", "restarts"))
    rep.raw(capacities.render_capacity_bounds(
        args.kind, args.eps, dim_b=args.dim_b,
        weakly_additive=args.weakly_additive))
    if args.channel:
        chan, meta = load_channel(args.channel)
        rep.add("channel", json.dumps(meta, sort_keys=True))
        rep.add("q1", capacities.q1(chan, restarts=args.restarts,
                                    seed=args.seed), entropic=True)
        rep.add("holevo_chi", capacities.holevo_chi(
            chan, restarts=args.restarts, seed=args.seed), entropic=True)
    _emit(args, rep.text())
    return EXIT_OK


def cmd_weyl(args) -> int:
    rep = Report(args.bits)
    code = EXIT_OK
    if args.mode == "build":
        pmf = (weyl.read_pmf(args.pmf) if args.pmf
               else weyl.omega_delta(args.n, args.delta))
        A = weyl.weyl_eigenvalues(pmf)
        rep.add("n", pmf.n)
        rep.add("eigenvalue_modulus_min", float(np.abs(A).min()))
        rep.add("eigenvalue_modulus_max", float(np.abs(A).max()))
        if args.pmf_out:
            weyl.write_pmf(args.pmf_out, pmf)
            rep.add("pmf_written", args.pmf_out)
    elif args.mode == "degrade-test":
        f = weyl.read_pmf(args.pmf) if args.pmf else weyl.omega_delta(args.n, args.gamma)
        h = weyl.read_pmf(args.pmf2) if args.pmf2 else weyl.omega_delta(args.n, args.delta)
        res = weyl.degradation_witness(f, h)
        rep.add("witness_exists", res.ok)
        if not res.ok:
            rep.add("reason", res.reason)
            code = EXIT_FALSIFIED
    elif args.mode == "gamma0":
        rep.add("gamma0", weyl.gamma0(args.n, args.delta))
    else:  # ln-mixture
        verdict = weyl.check_ln_mixture(args.n, args.delta, trials=args.trials,
                                        seed=args.seed)
        rep.raw(verdict.render())
        if verdict.status == "falsified":
            code = EXIT_FALSIFIED
    _emit(args, rep.text())
    return code


def _gaussian_spec(args) -> gaussian.GaussianChannelSpec:
    return gaussian.GaussianChannelSpec(
        args.family, args.E, lam=args.lam, kappa=args.kappa, cutoff=args.cutoff)


def cmd_gaussian(args) -> int:
    rep = Report(args.bits)
    if args.mode == "eta":
        spec = _gaussian_spec(args)
        _echo_config(rep, args, ("family", "lam", "kappa", "E", "cutoff"))
        rep.add("E1", ",".join(_fmt(e) for e in args.E1))
        rep.add("eta_closed_form", gaussian.eta_closed_form(spec, args.E1))
        rep.add("moe_proven_regime", spec.moe_proven_regime())
    elif args.mode == "sweep":
        spec = _gaussian_spec(args)
        _echo_config(rep, args, ("family", "lam", "kappa", "E", "cutoff"))
        res = gaussian.eta_lower_sweep(spec, args.E1[0], args.delta)
        if args.format == "csv":
            lines = ["delta,ratio"]
            lines += [f"{_fmt(r['delta'])},{_fmt(r['ratio'])}" for r in res["rows"]]
            _emit(args, "\n".join(lines) + "\n")
            return EXIT_OK
        for r in res["rows"]:
            rep.add(f"ratio[delta={_fmt(r['delta'])}]", r["ratio"])
        rep.add("closed_form_target", res["target"])
        rep.add("monotone_increasing", res["increasing"])
        rep.add("moe_proven_regime", res["proven_regime"])
    else:  # g-check
        grid = np.linspace(args.grid_min, args.grid_max, args.grid_points)
        rep.add("family", args.family)
        rep.add("max_violation", gaussian.g_inequality_check(args.family, grid))
    _emit(args, rep.text())
    return EXIT_OK


def cmd_lsi(args) -> int:
    chan, meta = load_channel(args.channel)
    d = chan.dim_in
    sigma = load_state(args.sigma) if args.sigma else np.eye(d) / d
    gen = functional.SemigroupGenerator(chan, sigma)
    rep = Report(args.bits)
    rep.add("channel", json.dumps(meta, sort_keys=True))
    _echo_config(rep, args, ("seed", "restarts"))
    rep.add("estimate_lsi", functional.estimate_lsi(gen, restarts=args.restarts,
                                                    seed=args.seed))
    if meta.get("kind") == "depolarizing":
        rep.add("lsi_depolarizing_closed_form", functional.lsi_depolarizing(d))
        rep.add("sdpi_constant", functional.depolarizing_sdpi_constant(
            meta.get("p", 0.0), sigma))
    rep.add("reversible", gen.reversible)
    _emit(args, rep.text())
    return EXIT_OK


def figure2_rows(p_grid):
    """The four curves bracketing eta(E_{1/2} tensor D_p)."""
    rows = []
    for p in p_grid:
        if not 0.0 <= p <= 1.0:
            from .errors import OutOfRange

            raise OutOfRange(f"p = {p} outside [0, 1]")
        h = divergences.binary_entropy(p / 2.0)
        lower = (LN2 - 0.5 * h) / LN2
        base = max(0.5, (1.0 - p) ** 2)
        rows.append({
            "p": p,
            "lower": lower,
            "upper_tight": 0.5 * (1.0 + (1.0 - p) ** 2),
            "upper_loose": 1.5 * base,
            "lower_loose": base,
        })
    return rows


def cmd_figure2(args) -> int:
    rows = figure2_rows(args.p)
    lines = ["p,lower,upper_tight,upper_loose,lower_loose"]
    for r in rows:
        lines.append(",".join(_fmt(r[k]) for k in
                              ("p", "lower", "upper_tight", "upper_loose",
                               "lower_loose")))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsdpi")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=20)
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("report", "csv"), default="report")
        p.add_argument("--bits", action="store_true")

    p = sub.add_parser("eta", help="contraction coefficient estimate")
    p.add_argument("--channel", required=True)
    p.add_argument("--sigma", default=None)
    p.add_argument("--divergence", default="re")
    common(p)
    p.set_defaults(fn=cmd_eta)

    p = sub.add_parser("order", help="channel partial-order queries")
    p.add_argument("mode", choices=("degrade", "less-noisy", "more-capable",
                                    "complete", "regularized", "approx"))
    p.add_argument("--channel", required=True)
    p.add_argument("--channel2", required=True)
    common(p)
    p.set_defaults(fn=cmd_order)

    p = sub.add_parser("capacity", help="capacity bounds from order levels")
    p.add_argument("--kind", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--dim-b", type=int, default=2)
    p.add_argument("--weakly-additive", action="store_true")
    p.add_argument("--channel", default=None)
    common(p)
    p.set_defaults(fn=cmd_capacity)

    p = sub.add_parser("weyl", help="Weyl-covariant channel tooling")
    p.add_argument("mode", choices=("build", "degrade-test", "gamma0",
                                    "ln-mixture"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--pmf", default=None)
    p.add_argument("--pmf2", default=None)
    p.add_argument("--pmf-out", default=None)
    common(p)
    p.set_defaults(fn=cmd_weyl)

    p = sub.add_parser("gaussian", help="truncated-Fock Gaussian checks")
    p.add_argument("mode", choices=("eta", "sweep", "g-check"))
    p.add_argument("--family", default="additive",
                   choices=("attenuator", "amplifier", "additive"))
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--E1", type=float, nargs="+", default=[1.0])
    p.add_argument("--delta", type=float, nargs="+", default=[0.1, 0.03, 0.01])
    p.add_argument("--cutoff", type=int, default=60)
    p.add_argument("--grid-min", type=float, default=0.25)
    p.add_argument("--grid-max", type=float, default=5.0)
    p.add_argument("--grid-points", type=int, default=20)
    common(p)
    p.set_defaults(fn=cmd_gaussian)

    p = sub.add_parser("lsi", help="log-Sobolev estimates")
    p.add_argument("--channel", required=True)
    p.add_argument("--sigma", default=None)
    common(p)
    p.set_defaults(fn=cmd_lsi)

    p = sub.add_parser("figure2", help="erasure/depolarizing bound curves")
    p.add_argument("--p", type=float, nargs="+",
                   default=[0.0, 0.25, 0.5, 0.75, 1.0])
    common(p)
    p.set_defaults(fn=cmd_figure2)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (QsdpiError, OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
