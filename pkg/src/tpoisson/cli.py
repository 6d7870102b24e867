"""Command-line interface: ``tpoisson <subcommand> ...``.

Exit status: 0 property holds / success, 1 property fails (witness printed),
2 usage error, 3 undecided or resource bound hit.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import algebra as alg
from . import documents
from . import exactla as la
from . import reps, superalg
from . import zassenhaus as zs
from .errors import ConfigurationError, DecompositionError, InternalError, ResourceError, TPError, UsageError
from .expr import format_element, parse_element

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.report: dict = {}
        self.lines: list[str] = []

    def set(self, **kw):
        self.report.update(kw)

    def say(self, line: str):
        self.lines.append(line)

    def flush(self, stream=None):
        stream = stream or sys.stdout
        if self.as_json:
            stream.write(json.dumps(_jsonable(self.report), sort_keys=True) + "\n")
        else:
            for line in self.lines:
                stream.write(line + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --- argument helpers ------------------------------------------------------------------


def _zassenhaus(args) -> zs.ZassenhausPair:
    if args.p is None or args.n is None:
        raise UsageError("--p and --n are required")
    return zs.build_zassenhaus(args.p, args.n)


def _element(args, z, text, default=None) -> np.ndarray:
    if text is None:
        if default is None:
            raise UsageError("missing element argument")
        text = default
    return parse_element(text, z.p, z.N)


def _q_from_args(args, z) -> np.ndarray:
    inv_text = getattr(args, "q_inverse", None)
    if inv_text is not None:
        if args.q is not None:
            raise UsageError("give either --q or --q-inverse, not both")
        u = parse_element(inv_text, z.p, z.N)
        q = zs.bullet_inverse(z, u)
        if q is None:
            raise UsageError("--q-inverse element is not bullet-invertible")
        return q
    return _element(args, z, args.q, "e-1")


def _algebra(args):
    """Algebra from a document file, or W_n(q) built from --p/--n/--q."""
    if getattr(args, "file", None):
        obj = documents.load(args.file)
        return obj, None
    z = _zassenhaus(args)
    q = _q_from_args(args, z)
    return zs.mutate(z, q), z


def _two_product(args) -> alg.TwoProductAlgebra:
    obj, _ = _algebra(args)
    if not isinstance(obj, alg.TwoProductAlgebra):
        raise UsageError("this command needs a two-product algebra document")
    return obj


def _report_identity(out: _Out, rep, name: str | None = None, labels=None) -> None:
    name = name or rep.identity_id
    if rep.holds:
        out.say(f"{name}: holds")
        return
    wit = rep.witness
    pretty = wit
    if labels is not None:
        pretty = tuple(labels[i] if isinstance(i, int) and 0 <= i < len(labels) else i for i in wit)
    out.say(f"{name}: FAILS at {pretty}, residual {np.asarray(rep.residual).tolist()}")


# --- subcommands --------------------------------------------------------------------------


def cmd_gen(args, out: _Out) -> int:
    z = _zassenhaus(args)
    q = _q_from_args(args, z)
    a = zs.mutate(z, q)
    text = documents.dumps(a)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        out.say(f"wrote W_{args.n}({format_element(q)}) over F_{args.p} (dim {a.dim}) to {args.out}")
    else:
        out.say(text.rstrip("\n"))
    out.set(command="gen", q=format_element(q), dim=a.dim, out=args.out, document=json.loads(text))
    return EXIT_OK


def cmd_verify(args, out: _Out) -> int:
    a = _two_product(args)
    ids = list(args.identity or [])
    if args.tp or not ids:
        ids = list(alg.TP_AXIOMS) + ["lemma21", "lemma22"] + [i for i in ids if i not in alg.TP_AXIOMS]
    results = []
    ok = True
    for name in ids:
        rep = alg.check_identity(a, name)
        ok &= rep.holds
        _report_identity(out, rep, labels=a.basis_labels)
        results.append({"identity": name, "holds": rep.holds, "witness": rep.witness, "residual": rep.residual})
    status = EXIT_OK if ok else EXIT_FAIL
    if args.simple:
        verdict = alg.simplicity(a, seed=args.seed, budget=args.budget or 32)
        out.say(f"simplicity: {verdict.verdict} (tier {verdict.tier})")
        out.set(simplicity=verdict.verdict, simplicity_tier=verdict.tier)
        if verdict.verdict == "not_simple":
            status = max(status, EXIT_FAIL)
        elif verdict.verdict == "undecided" and status == EXIT_OK:
            status = EXIT_UNDECIDED
    out.set(command="verify", holds=ok, results=results)
    return status


def cmd_decompose(args, out: _Out) -> int:
    a = _two_product(args)
    res = alg.decompose(a, seed=args.seed, random_budget=args.budget or 16)
    blocks = []
    for k, b in enumerate(res.blocks):
        unit = None if b.unit is None else b.unit.tolist()
        out.say(f"block {k}: {b.kind}, dim {b.space.dim}" + ("" if unit is None else f", unit {unit}"))
        blocks.append({"kind": b.kind, "dim": b.space.dim, "basis": b.space.basis, "unit": unit})
    out.set(command="decompose", blocks=blocks)
    return EXIT_OK


def cmd_halfder(args, out: _Out) -> int:
    a = _two_product(args)
    space = alg.half_derivations(a, args.which)
    out.say(f"dim of 1/2-derivations of the {args.which} product: {space.dim}")
    out.set(command="halfder", which=args.which, dim=space.dim, basis=space.basis)
    return EXIT_OK


def cmd_tpspace(args, out: _Out) -> int:
    a = _two_product(args)
    lie = alg.TwoProductAlgebra(a.p, np.zeros_like(a.bracket), a.bracket, a.basis_labels)
    sols = alg.tp_structures_on(lie)
    out.say(f"dim of symmetric products satisfying transposed Leibniz: {len(sols)}")
    info = []
    z = None
    if args.p is not None and args.n is not None:
        z = _zassenhaus(args)
    for k, t in enumerate(sols):
        cand = alg.TwoProductAlgebra(a.p, t, a.bracket)
        assoc = alg.check_identity(cand, "associativity").holds
        entry = {"associative": assoc}
        if z is not None and z.N == a.dim and np.array_equal(a.bracket, z.bracket):
            q = zs.mutation_tensor(z, t)
            entry["mutation_parameter"] = None if q is None else format_element(q)
        info.append(entry)
        out.say(f"solution {k}: associative={assoc}" + (
            f", mutation by {entry['mutation_parameter']}" if "mutation_parameter" in entry else ""))
    out.set(command="tpspace", dim=len(sols), solutions=info)
    return EXIT_OK


def cmd_normalform(args, out: _Out) -> int:
    z = _zassenhaus(args)
    q = _q_from_args(args, z)
    nf = zs.normal_form(z, q)
    text = format_element(nf.q)
    out.say(text)
    for f in nf.flags:
        out.say(f"flag: {f}")
    out.set(
        command="normalform",
        q=format_element(q),
        normal_form=text,
        coefficients=nf.q,
        trace=[list(t.alphas) for t in nf.trace],
        flags=nf.flags,
    )
    return EXIT_OK


def cmd_isocheck(args, out: _Out) -> int:
    z = _zassenhaus(args)
    q = _q_from_args(args, z)
    q2 = _element(args, z, args.q2)
    found = zs.brute_force_iso(z, q, q2, budget=args.budget or 10_000)
    if found is None:
        out.say("no admissible automorphism found")
        out.set(command="isocheck", isomorphic=False, witness=None)
        return EXIT_FAIL
    out.say(f"isomorphic via y = sum alpha_i x^(i), alpha = {list(found.alphas)}")
    out.set(command="isocheck", isomorphic=True, witness=list(found.alphas))
    return EXIT_OK


def _rep_from_args(args):
    if getattr(args, "file", None):
        r = documents.load(args.file)
        if not isinstance(r, reps.Representation):
            raise UsageError("this command needs a representation document")
        return r
    z = _zassenhaus(args)
    return reps.build_M(z, _q_from_args(args, z), _element(args, z, args.a, "0"))


def cmd_rep(args, out: _Out) -> int:
    r = _rep_from_args(args)
    rep = reps.check_representation(r)
    if args.out:
        documents.save(r, args.out)
        out.say(f"wrote representation (module dim {r.module_dim}) to {args.out}")
    _report_identity(out, rep, "representation axioms")
    out.set(command="rep", holds=rep.holds, witness=rep.witness, module_dim=r.module_dim,
            checked=rep.detail.get("checked"))
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_irr(args, out: _Out) -> int:
    r = _rep_from_args(args)
    v = reps.irreducible(r, seed=args.seed, budget=args.budget or 32)
    line = f"{v.verdict} (tier {v.tier}"
    line += f", envelope dim {v.envelope_dim})" if v.envelope_dim is not None else ")"
    out.say(line)
    out.set(command="irr", verdict=v.verdict, tier=v.tier, envelope_dim=v.envelope_dim,
            witness=None if v.witness is None else v.witness.basis)
    return {"irreducible": EXIT_OK, "reducible": EXIT_FAIL}.get(v.verdict, EXIT_UNDECIDED)


def cmd_kantor(args, out: _Out) -> int:
    a = _two_product(args)
    s = superalg.kantor_double(a)
    sc = superalg.check_supercommutativity(s)
    _report_identity(out, sc)
    ok = sc.holds
    jr = None
    if ok:
        jr = superalg.check_jordan_super(s)
        _report_identity(out, jr)
        ok = jr.holds
    if args.out:
        documents.save(s, args.out)
    out.set(command="kantor", dim=s.dim, supercommutative=sc.holds,
            jordan=None if jr is None else jr.holds, witness=(jr or sc).witness)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_weakleibniz(args, out: _Out) -> int:
    obj, _ = _algebra(args)
    if isinstance(obj, alg.TwoProductAlgebra):
        one = superalg.depolarize(obj)
    elif isinstance(obj, superalg.OneProductAlgebra):
        one = obj
    else:
        raise UsageError("need a two-product or one-product algebra")
    rep = superalg.check_weak_leibniz(one)
    _report_identity(out, rep)
    out.set(command="weakleibniz", holds=rep.holds, witness=rep.witness)
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_qpdiag(args, out: _Out) -> int:
    a = _two_product(args)
    d = superalg.qp_operator(a)
    out.say(d.summary())
    out.set(command="qpdiag", kind=d.kind, spectrum=list(d.spectrum), nilpotency_index=d.nilpotency_index,
            Q=d.Q, minimal_polynomial=None if d.minimal_polynomial is None
            else list(d.minimal_polynomial.coefficients))
    return EXIT_OK


COMMANDS = {
    "gen": (cmd_gen, "build W_n(q) and write its structure constants"),
    "verify": (cmd_verify, "check identities (default: all transposed Poisson axioms)"),
    "decompose": (cmd_decompose, "split into unital and nilpotent ideals"),
    "halfder": (cmd_halfder, "dimension of the 1/2-derivation space"),
    "tpspace": (cmd_tpspace, "symmetric products satisfying transposed Leibniz for a bracket"),
    "normalform": (cmd_normalform, "normal form of q under admissible automorphisms"),
    "isocheck": (cmd_isocheck, "exhaustive isomorphism search between W_n(q) and W_n(q2)"),
    "rep": (cmd_rep, "build M_q(a) and check the representation axioms"),
    "irr": (cmd_irr, "irreducibility of M_q(a)"),
    "kantor": (cmd_kantor, "Kantor double and graded Jordan identity"),
    "weakleibniz": (cmd_weakleibniz, "depolarise and check the weak-Leibniz identities"),
    "qpdiag": (cmd_qpdiag, "diagnose Q = ad(1)"),
}

_TAKES_FILE = {"verify", "decompose", "halfder", "tpspace", "rep", "irr", "kantor", "weakleibniz", "qpdiag"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="odd prime")
    common.add_argument("--n", type=int, help="W(1;n) parameter")
    common.add_argument("--q", help='element literal, e.g. "e-1 + 2*e3" (default e-1)')
    common.add_argument("--q-inverse", dest="q_inverse", help="use the bullet inverse of this element as q")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--out", help="write the constructed object as JSON")

    parser = argparse.ArgumentParser(prog="tpoisson", description="Transposed Poisson algebras over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name in _TAKES_FILE:
            sp.add_argument("file", nargs="?", help="algebra document (otherwise built from --p/--n/--q)")
        if name == "verify":
            sp.add_argument("--tp", action="store_true", help="all transposed Poisson axioms and derived identities")
            sp.add_argument("--identity", action="append", help="identity id (repeatable)")
            sp.add_argument("--simple", action="store_true", help="also decide simplicity")
        if name == "halfder":
            sp.add_argument("--which", choices=("bracket", "circ"), default="bracket")
        if name == "isocheck":
            sp.add_argument("--q2", required=True, help="target element")
        if name in ("rep", "irr"):
            sp.add_argument("--a", help="element a of M_q(a) (default 0)")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    out = _Out(args.json)
    fn = COMMANDS[args.command][0]
    try:
        status = fn(args, out)
    except (UsageError, ConfigurationError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ResourceError as exc:
        stderr.write(f"resource bound: {exc}\n")
        return EXIT_UNDECIDED
    except (DecompositionError, InternalError) as exc:
        out.set(error=str(exc))
        out.say(f"failed: {exc}")
        out.flush(stdout)
        return EXIT_FAIL
    except TPError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    out.set(exit_status=status)
    out.flush(stdout)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
