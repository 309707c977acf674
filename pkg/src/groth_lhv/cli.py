"""Command-line front end.

Every command prints one JSON document (or CSV for ``thresholds --format
csv``) and exits 0 on success, 1 when a requested check fails and 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from . import bell_engine, inn22, krivine, lhv
from .constants import MC_SIGMAS
from .core import RandomSource
from .errors import GrothLhvError

log = logging.getLogger("groth_lhv")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _samples(text: str) -> int:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x.is_integer() or x < 2:
        raise argparse.ArgumentTypeError("samples must be an integer >= 2")
    return int(x)


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def _emit(doc, out):
    out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def _invocation(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


# -- thresholds -------------------------------------------------------------

def threshold_rows(state: str = "werner"):
    """(name, value, provenance) rows; Krivine entries are computed, not stored."""
    if state == "werner":
        c3 = krivine.solve_c3()
        return [
            ("separable", 1 / 3, "Werner states are separable iff p <= 1/3"),
            ("lhv_general_measurements", 5 / 12, "local model for all measurements (Barrett)"),
            ("lhv_projective_werner", 1 / 2, "Werner's local model for projective measurements"),
            ("lhv_projective_krivine", c3.model_visibility,
             f"2 c3 / pi with c3 = {c3.c:.10f} solved from the order-3 normalization integral"),
            ("chsh_violation", 1 / math.sqrt(2), "CHSH is violated for p > 1/sqrt 2"),
        ]
    if state == "general":
        _, root = krivine.taylor_embedding(1)
        lower = krivine.GROTHENDIECK_LEDGER["K_G_lower"][0]
        k8 = krivine.GROTHENDIECK_LEDGER["K_G(8)_upper"][0]
        return [
            ("p_c_lower", root.model_visibility,
             "1/K_G >= 2 ln(1 + sqrt 2) / pi (Krivine's bound, computed)"),
            ("p_c_upper", 1 / lower, f"1/K_G <= 1/{lower} (Reeds, Davies)"),
            ("two_qubit_any_state", 1 / k8, f"1/K_G(8) >= 1/{k8} for arbitrary two-qubit states"),
        ]
    raise UsageError(f"unknown state family {state!r}")


def cmd_thresholds(args, out):
    rows = threshold_rows(args.state)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "p", "provenance"])
        for name, value, prov in rows:
            w.writerow([name, repr(value), prov])
        out.write(buf.getvalue())
        return EXIT_OK
    doc = {"invocation": _invocation(args), "state": args.state,
           "thresholds": [{"name": n, "p": v, "provenance": p} for n, v, p in rows]}
    if args.state == "general":
        doc["window"] = [rows[0][1], rows[1][1]]
    _emit(doc, out)
    return EXIT_OK


# -- simulate ---------------------------------------------------------------

def load_settings(path: str):
    """JSON list of {"a": [...], "b": [...]}; vectors are normalized on load."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read settings file: {exc}") from None
    if not isinstance(data, list) or not data:
        raise UsageError("settings file must hold a non-empty JSON list")
    pairs = []
    for k, item in enumerate(data):
        try:
            a = np.asarray(item["a"], dtype=float)
            b = np.asarray(item["b"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise UsageError(f"settings entry {k} needs numeric 'a' and 'b' lists") from None
        vecs = []
        for name, v in (("a", a), ("b", b)):
            nrm = np.linalg.norm(v)
            if v.ndim != 1 or nrm == 0 or not np.isfinite(nrm):
                raise UsageError(f"settings entry {k}: bad vector {name}")
            if abs(nrm - 1) > 1e-6:
                log.warning("settings entry %d: |%s| = %.8g, normalizing", k, name, nrm)
            vecs.append(v / nrm)
        pairs.append(tuple(vecs))
    return pairs


def build_model(name: str, source_dim: int, tail_tol: float):
    if name == "werner":
        return lhv.werner_model()
    if name == "krivine3d":
        emb, root = krivine.spherical_embedding_3d(tail_tol)
    elif name == "krivine2d":
        emb, root = krivine.circle_embedding_2d(tail_tol)
    elif name == "taylor":
        emb, root = krivine.taylor_embedding(source_dim, tail_tol)
    else:
        raise UsageError(f"unknown model {name!r}")
    return krivine.rounding_model(emb, root, singlet_sign=True)


def _fit_dim(v, model_name, dim):
    if len(v) == dim:
        return v
    if model_name == "krivine2d" and len(v) == 3:
        if abs(v[2]) > 1e-6:
            raise UsageError("krivine2d needs settings in the x-y plane")
        return v[:2] / np.linalg.norm(v[:2])
    raise UsageError(f"model needs {dim}-dimensional settings, got {len(v)}")


def cmd_simulate(args, out):
    pairs = load_settings(args.settings)
    dims = {len(v) for pair in pairs for v in pair}
    if len(dims) != 1:
        raise UsageError("all settings vectors must have the same dimension")
    model = build_model(args.model, dims.pop(), args.tail_tol)
    vis = getattr(model, "visibility", None)
    dim = 3 if args.model == "werner" else model.emb.source_dim
    if args.visibility is not None:
        if vis is None or args.visibility > vis:
            raise UsageError(f"model reaches visibility {vis}; cannot simulate {args.visibility}")
        model = lhv.simulate_visibility(model, vis, args.visibility)
        vis = args.visibility
    results, all_ok = [], True
    for k, (a, b) in enumerate(pairs):
        a, b = _fit_dim(a, args.model, dim), _fit_dim(b, args.model, dim)
        est = lhv.estimate(model, a, b, args.samples, RandomSource(args.seed, k),
                           shards=args.threads, threads=args.threads)
        pj, pa, pb = model.predicted(a, b)
        ok = (est.joint.within(pj, MC_SIGMAS) and est.marginal_a.within(pa, MC_SIGMAS)
              and est.marginal_b.within(pb, MC_SIGMAS))
        all_ok &= ok
        entry = {"settings": {"a": a.tolist(), "b": b.tolist()}, "N": args.samples,
                 "seed": args.seed, "stream": k}
        entry.update(est.to_dict())
        entry["predicted"] = {"joint": pj, "margA": pa, "margB": pb}
        entry["singlet_joint"] = -float(np.dot(a, b))
        entry["within_4_stderr"] = ok
        results.append(entry)
    doc = {"invocation": _invocation(args), "model": model.label,
           "model_visibility": vis, "estimates": results}
    if hasattr(model, "correlation_error_bound"):
        doc["truncation_error_bound"] = model.correlation_error_bound
    _emit(doc, out)
    return EXIT_FAIL if (args.check and not all_ok) else EXIT_OK


# -- bound -------------------------------------------------------------------

def cmd_bound(args, out):
    try:
        M = bell_engine.read_matrix_csv(args.matrix)
    except (OSError, GrothLhvError, ValueError) as exc:
        raise UsageError(f"cannot read matrix: {exc}") from None
    raw_local = bell_engine.local_bound(M, args.cap)
    ineq = bell_engine.normalize(M, args.cap)
    rep = bell_engine.seesaw_vector_bound(ineq, args.dim, args.restarts, RandomSource(args.seed))
    doc = {"invocation": _invocation(args)}
    doc.update(rep.to_dict())
    doc["raw_local"] = raw_local
    _emit(doc, out)
    return EXIT_OK


# -- krivine ------------------------------------------------------------------

def cmd_krivine(args, out):
    if args.order == "3":
        emb, root = krivine.spherical_embedding_3d(args.tail_tol)
    elif args.order == "2":
        emb, root = krivine.circle_embedding_2d(args.tail_tol)
    else:
        emb, root = krivine.taylor_embedding(args.source_dim, args.tail_tol)
    doc = {"invocation": _invocation(args)}
    doc.update(root.to_dict())
    doc.update({"truncation_order": emb.truncation_order, "tail_bound": emb.tail_bound,
                "target_dim": emb.target_dim,
                "weights": [[lab, w] for lab, w in emb.ledger]})
    ok = root.residual <= 1e-10 and emb.tail_bound <= args.tail_tol
    if args.order == "3":
        quad = krivine.solve_c3()
        doc["c_quadrature"] = quad.c
        doc["c_agreement"] = abs(quad.c - root.c)
        ok &= doc["c_agreement"] <= 1e-6
    if args.order == "2":
        doc["planar_gap"] = krivine.planar_gap(root)
    doc["ok"] = bool(ok)
    _emit(doc, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- inn22 --------------------------------------------------------------------

def cmd_inn22(args, out):
    n = args.n
    if not 2 <= n <= 12:
        raise UsageError("--n must lie in [2, 12]")
    ineq = inn22.generate(n)
    doc = {"invocation": _invocation(args), "n": n, "s1": inn22.s1(n), "s2": inn22.s2(n),
           "table": ineq.table().tolist()}
    ok = True
    if args.verify_decomposition or n == 2:
        cert = inn22.decompose(n)
        exact, _ = inn22.verify_identity(cert)
        doc.update({"identity_exact": exact,
                    "chsh_terms": len(cert.chsh_terms),
                    "negative_terms": len(cert.negative_terms),
                    "certificate": {"chsh": ["".join(map(str, t)) if n < 10 else list(t)
                                             for t in cert.chsh_terms],
                                    "negative": [list(t) for t in cert.negative_terms]}})
        ok &= exact and len(cert.chsh_terms) == inn22.s1(n) and len(cert.negative_terms) == inn22.s2(n)
    if n == 2:
        doc["note"] = ("I_2222 is the CHSH inequality: with uniform marginals "
                       "I'_2 = (S - 2) / 4 where S is the CHSH correlation sum")
    counter = 0
    if args.trials:
        rep = inn22.check_chsh_implication(args.trials, RandomSource(args.seed), ns=(n,))
        counter = rep.counterexamples
        doc["implication_search"] = rep.to_dict()
    doc["counterexamples"] = counter
    ok &= counter == 0
    doc["ok"] = bool(ok)
    _emit(doc, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groth-lhv",
                                description="Bell inequalities, Grothendieck bounds and local models")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("thresholds", help="visibility thresholds for noisy entangled states")
    t.add_argument("--state", choices=["werner", "general"], default="werner")
    t.add_argument("--format", choices=["json", "csv"], default="json")
    t.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of a local model's correlations")
    s.add_argument("--model", required=True, choices=["werner", "krivine3d", "krivine2d", "taylor"])
    s.add_argument("--settings", required=True, help="JSON list of {a: [...], b: [...]}")
    s.add_argument("--samples", type=_samples, default=10**6)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--visibility", type=float, default=None,
                   help="mix with noise down to this visibility")
    s.add_argument("--tail-tol", type=float, default=1e-6)
    s.add_argument("--check", action="store_true",
                   help="exit 1 unless every estimate is within 4 stderr of the model's exact value")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bound", help="local bound and see-saw vector bound of a correlation inequality")
    b.add_argument("matrix", help="CSV file of m rows of reals")
    b.add_argument("--dim", type=int, default=3)
    b.add_argument("--restarts", type=int, default=10)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--cap", type=int, default=24, help="largest m enumerated exhaustively")
    b.set_defaults(func=cmd_bound)

    k = sub.add_parser("krivine", help="normalization root and embedding for a sign-rounding model")
    k.add_argument("--order", choices=["2", "3", "taylor"], default="3")
    k.add_argument("--tail-tol", type=float, default=1e-6)
    k.add_argument("--source-dim", type=int, default=3, help="input dimension for --order taylor")
    k.set_defaults(func=cmd_krivine)

    i = sub.add_parser("inn22", help="I_nn22 coefficients and CHSH decomposition")
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--verify-decomposition", action="store_true")
    i.add_argument("--trials", type=_samples, default=0)
    i.add_argument("--seed", type=_seed, default=0)
    i.set_defaults(func=cmd_inn22)
    return p


def main(argv=None, out=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        print("groth-lhv: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"groth-lhv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrothLhvError as exc:
        print(f"groth-lhv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
