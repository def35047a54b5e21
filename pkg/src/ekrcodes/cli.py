"""Command line entry point.

Exit codes: 0 success (a computed "false" is still a success), 1 when a
claimed artifact fails verification, 2 on usage errors, 3 when a cap is
exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .codes import ers_create, extend_code, mds_weight_distribution, weight_distribution_enumerated
from .config import CONFIG
from .errors import (
    EKRError,
    FormulaMismatch,
    NotAScheme,
    NotConstant,
    OrderTooLarge,
    TableMismatch,
    TooLarge,
    VerificationFailed,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


# output -----------------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def dumps(payload: dict) -> str:
    body = dict(_plain(payload))
    body["schema_version"] = SCHEMA_VERSION
    return json.dumps(body, sort_keys=True)


def _table(payload: dict) -> str:
    lines = []
    for key in sorted(payload):
        val = payload[key]
        if isinstance(val, list) and val and isinstance(val[0], list):
            lines.append(f"{key}:")
            lines.extend("  " + " ".join(f"{x:>6}" for x in map(str, row)) for row in val)
        elif isinstance(val, dict):
            lines.append(f"{key}:")
            lines.extend(f"  {k}: {v}" for k, v in sorted(val.items()))
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


def emit(payload: dict) -> None:
    if CONFIG.output_format == "table":
        print(_table(_plain(payload)))
    else:
        print(dumps(payload))


# avoid-set cache -----------------------------------------------------------------

def _cache_file(code, T) -> Path | None:
    if CONFIG.cache_dir is None:
        return None
    digest = hashlib.sha256(code.to_json().encode()).hexdigest()[:16]
    tag = "-".join(str(t) for t in sorted(T))
    return Path(CONFIG.cache_dir) / f"avoid_q{code.q}_k{code.k}_T{tag}_{digest}.json"


def _load_avoid(code, T) -> None:
    from .spectral import AvoidSet, _normalize_T

    T = _normalize_T(code, T)
    path = _cache_file(code, T)
    if path is None:
        return
    if path.exists():
        data = json.loads(path.read_text())
        if data.get("version") == __version__ and data.get("code") == code.to_dict():
            duals = np.array(data["duals"], dtype=np.int64).reshape(-1, code.k)
            duals.flags.writeable = False
            code._cache[("avoid", T)] = AvoidSet(T, duals, code.field)
            return
    from .spectral import avoiding_hyperplanes

    M = avoiding_hyperplanes(code, T)
    path.parent.mkdir(parents=True, exist_ok=True)
    entry = {"version": __version__, "code": code.to_dict(), "T": sorted(T), "duals": M.duals.tolist()}
    path.write_text(json.dumps(entry, sort_keys=True))


def _code(args):
    return ers_create(args.q, args.k)


def _parse_T(text: str) -> set[int]:
    try:
        return {int(x) for x in text.split(",") if x.strip()}
    except ValueError as e:
        raise UsageError(f"bad --T value {text!r}") from e


# subcommands -----------------------------------------------------------------

def cmd_field(args):
    from .gf import field_create

    F = field_create(args.p, args.h)
    out = {"p": F.p, "h": F.h, "q": F.q, "modulus": list(F.modulus), "primitive": F.primitive}
    if args.table:
        out["mul"] = F.mul_table()
        out["add"] = F.add_table()
    emit(out)


def cmd_code(args):
    code = _code(args)
    out = {"code": code.to_dict(), "degree": args.k}
    if args.wdist:
        enum = weight_distribution_enumerated(code)
        closed = mds_weight_distribution(code.n, code.k, code.q)
        out["weight_distribution"] = enum
        out["weight_distribution_closed_form"] = closed
        out["weight_distribution_matches"] = enum == closed
    if args.extend:
        ext = extend_code(code)
        out["added_points"] = [str(P) for P in ext.added]
        out["extended"] = ext.code.to_dict()
    emit(out)


def cmd_nrc(args):
    from .spectral import nrc_profile, s_t_profile

    if args.what == "profile":
        emit(nrc_profile(args.q, args.k).to_json())
    else:
        emit(s_t_profile(args.q, args.k).to_json())


def _spectrum_payload(args):
    from .spectral import b_graph_spectrum, gamma_T_spectrum

    code = _code(args)
    if args.graph == "b":
        spec = b_graph_spectrum(code, args.i)
        return code, spec, {"graph": "b", "i": args.i, **spec.to_json()}
    T = {0} if args.graph == "gamma0" else _parse_T(args.T)
    _load_avoid(code, T)
    spec = gamma_T_spectrum(code, T)
    return code, spec, {"graph": args.graph, "T": sorted(T), **spec.to_json()}


def cmd_spectrum(args):
    from .spectral import verify_b_graph_spectrum, verify_spectrum_exact

    code, spec, out = _spectrum_payload(args)
    out.update({"q": args.q, "k": args.k})
    if args.verify:
        if args.graph == "b":
            ok = verify_b_graph_spectrum(code, args.i, spec)
        else:
            ok = verify_spectrum_exact(code, out["T"], spec)
        out["verified"] = ok
        emit(out)
        return EXIT_OK if ok else EXIT_VERIFY
    emit(out)


def cmd_ekr(args):
    from .ekr import ekr_report, module_property_check, strict_condition_check, weak_ekr_check

    code = _code(args)
    _load_avoid(code, {0})
    if args.check == "weak":
        w = weak_ekr_check(code)
        out = {"weak": w.status.value, "max_family_size": w.max_family_size}
    elif args.check == "module":
        ok, witness = module_property_check(code)
        out = {"module": ok, "witness": None if witness is None else str(witness)}
    elif args.check == "strict":
        s = strict_condition_check(code)
        out = {"strict_condition": s.holds, "reason": s.reason,
               "no_three_collinear": s.no_three_collinear,
               "strict_margin": None if s.worst_margin is None else str(s.worst_margin),
               "witness": None if s.witness is None else str(s.witness)}
    else:
        out = ekr_report(code).to_json()
    emit(out)


def bounds_payload(q: int, k: int, t: int) -> dict:
    """Best integer upper bound on t-intersecting families of degree <= k polynomials.

    ``strict`` marks the t = k regime, where the general bound is strict.
    For k = t = 3 and q >= 9 a power of 3 the Delsarte clique bound from the
    enumerated hom3 eigenmatrix is also applied.
    """
    import math

    from .ekr import t_int_upper_bound

    value, strict = t_int_upper_bound(q, k, t)
    best = math.ceil(value) - 1 if strict else int(value)
    out = {"q": q, "k": k, "t": t, "t_int": str(value), "strict": strict}
    if k == 3 and t == 3 and q % 3 == 0 and q >= 9:
        from .schemes import build_scheme, scheme_clique_bound

        cb = scheme_clique_bound(build_scheme("hom3", q), ["R3"])
        out["delsarte"] = cb.bound
        best = min(best, cb.bound)
    out["bound"] = best
    return out


def cmd_bounds(args):
    emit(bounds_payload(args.q, args.k, args.t))


def cmd_search(args):
    from .search import classify_maximum_families, family_checks, max_intersecting_family

    code = _code(args)
    if args.census:
        res = classify_maximum_families(code, args.t, timeout=args.timeout)
    else:
        res = max_intersecting_family(code, args.t, timeout=args.timeout)
    out = {"q": args.q, "k": args.k, "t": args.t, "max_size": res.max_size, "proven": res.proven,
           "node_count": res.node_count, "witness": res.witness.coeffs.tolist()}
    if args.t == 1:
        checks = family_checks(code, res.witness)
        out["witness_checks"] = {"few_or_many": checks.few_or_many, "expander_mixing": checks.expander_mixing,
                                 "absorption": checks.absorption, "more_than_few": checks.more_than_few}
    if res.census is not None:
        tags: dict[str, int] = {}
        for _, tag in res.census:
            tags[tag] = tags.get(tag, 0) + 1
        out["census"] = {"families": len(res.census), "tags": tags}
    if args.cert:
        cert = dict(res.certificate(), schema_version=SCHEMA_VERSION)
        Path(args.cert).write_text(json.dumps(_plain(cert), sort_keys=True))
        out["certificate"] = str(args.cert)
    emit(out)


def cmd_verify(args):
    if args.cert:
        from .search import verify_certificate

        try:
            data = json.loads(Path(args.cert).read_text())
            code = ers_create(int(data["q"]), int(data["k"]))
            fam = verify_certificate(data, code)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
            if isinstance(e, EKRError):
                raise
            raise VerificationFailed(f"malformed certificate: {e}") from e
        emit({"verified": True, "size": len(fam), "t": int(data.get("t", 1))})
        return EXIT_OK
    if args.spectrum:
        from .spectral import BipartiteSpectrum, Spectrum, verify_b_graph_spectrum, verify_spectrum_exact

        try:
            data = json.loads(Path(args.spectrum).read_text())
            code = ers_create(int(data["q"]), int(data["k"]))
            if data["graph"] == "b":
                spec = BipartiteSpectrum(tuple((e["value"], e["pair_mult"]) for e in data["squares"]),
                                         int(data["zero_mult"]))
                ok = verify_b_graph_spectrum(code, int(data["i"]), spec)
            else:
                spec = Spectrum(tuple((e["value"], e["mult"]) for e in data["eigenvalues"]))
                ok = verify_spectrum_exact(code, data["T"], spec)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
            if isinstance(e, EKRError):
                raise
            raise VerificationFailed(f"malformed spectrum file: {e}") from e
        emit({"verified": ok})
        return EXIT_OK if ok else EXIT_VERIFY
    raise UsageError("verify needs --cert or --spectrum")


def cmd_scheme(args):
    from .schemes import build_scheme, scheme_report

    rel = [r for r in args.bounds.split(",") if r] if args.bounds else None
    out = scheme_report(build_scheme(args.family, args.q), verify=args.verify, relations=rel)
    emit(out)
    if args.verify and not out["verified"]:
        return EXIT_VERIFY


def cmd_stability(args):
    from .spectral import stability_report

    emit(stability_report(args.q, args.k))


# parser ------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("json", "table"), default=d("json"), help="output format")
    parser.add_argument("--enum-cap", type=int, default=d(None), help="enumeration cap")
    parser.add_argument("--search-cap", type=int, default=d(None), help="search vertex cap")
    parser.add_argument("--census-cap", type=int, default=d(None), help="census vertex cap")
    parser.add_argument("--threads", type=int, default=d(1), help="accepted for compatibility; runs single-threaded")
    parser.add_argument("--cache-dir", default=d(None), help="directory for avoid-set cache files")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ekrcodes", description="EKR checks for linear codes and polynomial spaces")
    p.add_argument("--version", action="version", version=__version__)
    _common(p, False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        _common(sp, True)
        sp.set_defaults(func=func)
        return sp

    def qk(sp):
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--k", type=int, required=True, help="polynomial degree; the code has dimension k+1")

    sp = add("field", cmd_field, "finite field tables")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--table", action="store_true")

    sp = add("code", cmd_code, "extended Reed-Solomon codes")
    sp.add_argument("kind", choices=("ers",))
    qk(sp)
    sp.add_argument("--extend", action="store_true")
    sp.add_argument("--wdist", action="store_true")

    sp = add("nrc", cmd_nrc, "hyperplane intersections of the normal rational curve")
    qk(sp)
    sp.add_argument("what", choices=("profile", "st"))

    sp = add("spectrum", cmd_spectrum, "exact spectra")
    qk(sp)
    sp.add_argument("--graph", choices=("gamma0", "gammaT", "b"), default="gamma0")
    sp.add_argument("--T", default="0", help="comma-separated agreement counts for gammaT")
    sp.add_argument("--i", type=int, default=0, help="coordinate for the b graph")
    sp.add_argument("--verify", action="store_true")

    sp = add("ekr", cmd_ekr, "weak, module and strict EKR checks")
    qk(sp)
    sp.add_argument("action", choices=("check",))
    sp.add_argument("check", choices=("weak", "module", "strict", "all"))
    sp.add_argument("--json", action="store_true", help="same as --format json")

    sp = add("bounds", cmd_bounds, "t-intersecting family bounds")
    qk(sp)
    sp.add_argument("--t", type=int, required=True)

    sp = add("search", cmd_search, "exact maximum intersecting families")
    qk(sp)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--census", action="store_true")
    sp.add_argument("--timeout", type=float, default=None)
    sp.add_argument("--cert", default=None)

    sp = add("verify", cmd_verify, "re-verify a certificate or spectrum file")
    sp.add_argument("--cert", default=None)
    sp.add_argument("--spectrum", default=None)

    sp = add("scheme", cmd_scheme, "translation schemes and eigenmatrices")
    sp.add_argument("--family", choices=("hom2", "hom3", "ternary2"), required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--bounds", default=None, help="comma-separated relations, e.g. R3")

    sp = add("stability", cmd_stability, "stability hypotheses for one instance")
    qk(sp)
    return p


def _configure(args) -> None:
    for name in ("enum_cap", "search_cap", "census_cap", "threads"):
        val = getattr(args, name)
        if val is not None and val <= 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if args.enum_cap is not None:
        CONFIG.enum_cap = args.enum_cap
    if args.search_cap is not None:
        CONFIG.search_cap = args.search_cap
    if args.census_cap is not None:
        CONFIG.census_cap = args.census_cap
    CONFIG.threads = args.threads
    CONFIG.cache_dir = Path(args.cache_dir) if args.cache_dir else None
    CONFIG.output_format = "json" if getattr(args, "json", False) else args.format


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    saved = (CONFIG.enum_cap, CONFIG.search_cap, CONFIG.census_cap, CONFIG.threads,
             CONFIG.cache_dir, CONFIG.output_format)
    try:
        _configure(args)
        code = args.func(args)
        return EXIT_OK if code is None else code
    except (TooLarge, OrderTooLarge) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (VerificationFailed, TableMismatch, FormulaMismatch, NotAScheme, NotConstant) as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (UsageError, EKRError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        (CONFIG.enum_cap, CONFIG.search_cap, CONFIG.census_cap, CONFIG.threads,
         CONFIG.cache_dir, CONFIG.output_format) = saved


if __name__ == "__main__":
    sys.exit(main())
