"""``surftri`` command line.

Every command reads a map (and for ``verify-span`` a patch) from a file
or standard input and writes map text, a patch block and/or a result
record to standard output.  Exit status: 0 success or accept, 2 not found
or reject, 1 usage, input or I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field

from . import genlab, mapio, oracle, spanner, topology
from .errors import BudgetExceeded, NotFound, SurfaceMapError, VerifierRejected
from .mapcore import SurfaceMap, euler_genus, validate_triangulation

OK, REJECT, USAGE = 0, 2, 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class ResultRecord:
    """Structured result of one command; ``digest`` hashes the normalised map text."""
    command: str
    digest: str
    values: dict = field(default_factory=dict)
    witness: str | None = None

    def as_dict(self) -> dict:
        return {"command": self.command, "digest": self.digest, "values": self.values,
                "witness": self.witness}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))

    def to_text(self) -> str:
        out = [f"record {self.command}", f"digest {self.digest}"]
        for k in sorted(self.values):
            out.append(f"{k} {_fmt(self.values[k])}")
        out.append("end")
        return "\n".join(out) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(map(_fmt, v))
    if v is None:
        return "none"
    return str(v)


def digest(m: SurfaceMap | None) -> str:
    if m is None:
        return "none"
    return hashlib.sha256(mapio.serialize_map(m).encode()).hexdigest()


# -- input --------------------------------------------------------------

def _read(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


_LAST_DIGEST = ["none"]


def _load(path):
    m = mapio.parse_map(_read(path))
    _LAST_DIGEST[0] = digest(m)
    return m


def _cycle(m: SurfaceMap, text: str):
    try:
        verts = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad cycle {text!r}: expected vertex numbers") from None
    return topology.make_cycle(m, verts)


# -- commands -----------------------------------------------------------
# each returns (status, map_text_or_None, patch_text_or_None, record)

def cmd_validate(a):
    m = _load(a.input)
    rep = validate_triangulation(m)
    vals = {"vertices": m.vertex_count, "edges": m.edge_count, "faces": m.face_count,
            "holes": len(m.holes), "triangulation": rep.ok, "connected": m.is_connected}
    status = OK if rep.ok and m.is_connected else REJECT
    return status, mapio.serialize_map(m), None, ResultRecord("validate", digest(m), vals)


def cmd_genus(a):
    m = _load(a.input)
    eg, orientable = euler_genus(m)
    vals = {"euler_genus": eg, "orientable": orientable, "chi": m.euler_characteristic,
            "holes": len(m.holes)}
    return OK, None, None, ResultRecord("genus", digest(m), vals)


def cmd_facewidth(a):
    m = _load(a.input)
    fw = topology.facewidth(m)
    wit = " ".join(fw.witness)
    return OK, None, None, ResultRecord("facewidth", digest(m), {"facewidth": fw.width,
                                                                 "witness": wit}, wit)


def cmd_cut(a):
    m = _load(a.input)
    c = _cycle(m, a.cycle)
    pieces = topology.cut_along(m, c)
    vals = {"pieces": len(pieces)}
    texts = []
    for i, p in enumerate(pieces):
        pm = p.map
        vals[f"piece{i}"] = [pm.vertex_count, pm.edge_count, pm.face_count, len(pm.holes),
                             euler_genus(pm)[0]]
        texts.append(mapio.serialize_map(pm))
    vals["piece_fields"] = "V E F holes euler_genus"
    return OK, "".join(texts) if a.emit else None, None, ResultRecord("cut", digest(m), vals)


def cmd_classify(a):
    m = _load(a.input)
    c = _cycle(m, a.cycle)
    return OK, None, None, ResultRecord("classify-cycle", digest(m),
                                        {"cycle": str(c), "class": topology.classify_cycle(m, c)})


def cmd_homotopic(a):
    m = _load(a.input)
    c, d = _cycle(m, a.cycle), _cycle(m, a.other)
    same = topology.are_homotopic_disjoint(m, c, d)
    rec = ResultRecord("homotopic", digest(m), {"homotopic": same})
    return (OK if same else REJECT), None, None, rec


def _patch_output(command, m, patch: spanner.SpanningPatch, extra=None):
    vals = dict(patch.as_dict())
    vals["verdict"] = "accept"
    vals.update(extra or {})
    ptext = mapio.serialize_patch(patch.kept_edges, patch.hole_walks)
    return OK, mapio.serialize_map(m), ptext, ResultRecord(command, digest(m), vals, ptext)


def cmd_find_span(a):
    m = _load(a.input)
    if a.surface == "torus":
        patch = spanner.find_spanning_cylinder_torus(m, retries=a.retries, workers=a.workers)
    else:
        patch = spanner.find_spanning_sphere_general(m, retries=a.retries, workers=a.workers)
    return _patch_output("find-span", m, patch)


def cmd_verify_span(a):
    stream = mapio.parse_stream(_read(a.input))
    if stream.map is None or stream.patch is None:
        raise UsageError("verify-span needs a map block followed by a patch block")
    m = stream.map
    _LAST_DIGEST[0] = digest(m)
    res = spanner.verify_spanning_patch(m, stream.patch.kept_edges)
    if res.accepted:
        return _patch_output("verify-span", m, res.patch)
    vals = {"verdict": "reject", "reasons": "; ".join(res.reasons)}
    return REJECT, None, None, ResultRecord("verify-span", digest(m), vals)


def cmd_subdivide(a):
    m = _load(a.input)
    sub = genlab.face_subdivision(m)
    vals = {"vertices": sub.vertex_count, "edges": sub.edge_count, "faces": sub.face_count}
    return OK, mapio.serialize_map(sub), None, ResultRecord("subdivide", digest(m), vals)


def cmd_certify(a):
    m = _load(a.input)
    cert = genlab.no_spanning_certificate(m, a.gprime)
    vals = {k: v for k, v in cert.as_dict().items() if v is not None}
    return OK, None, None, ResultRecord("certify-no-span", digest(m), vals)


def cmd_gen(a):
    kind = a.kind
    args = a.params
    try:
        if kind == "torus-grid":
            mm, nn = (int(x) for x in args) if len(args) == 2 else _bad_gen(kind, "m n")
            m = genlab.torus_grid(mm, nn)
        elif kind == "refine":
            steps, seed = (int(x) for x in args) if len(args) == 2 else _bad_gen(kind, "steps seed")
            m = genlab.random_refinement(_load(a.input), steps, seed)
        elif kind == "fixture":
            if len(args) != 1 or args[0] not in genlab.FIXTURES:
                _bad_gen(kind, "|".join(sorted(genlab.FIXTURES)))
            m = genlab.FIXTURES[args[0]]()
        elif kind == "double-grid":
            mm, nn = (int(x) for x in args) if len(args) == 2 else (6, 6)
            m = genlab.double_grid(mm, nn).map
        else:
            raise UsageError(f"unknown generator {kind!r}")
    except ValueError as exc:
        if isinstance(exc, SurfaceMapError):
            raise
        raise UsageError(f"gen {kind}: parameters must be integers") from None
    vals = {"generator": kind, "params": list(args), "vertices": m.vertex_count,
            "edges": m.edge_count, "faces": m.face_count}
    return OK, mapio.serialize_map(m), None, ResultRecord("gen", digest(m), vals)


def _bad_gen(kind, usage):
    raise UsageError(f"usage: gen {kind} {usage}")


def cmd_connect_sum(a):
    ma, mb = _load(a.first), _load(a.second)
    glued = genlab.connected_sum(ma, mb, a.fa, a.fb)
    m = glued.map
    vals = {"vertices": m.vertex_count, "edges": m.edge_count, "faces": m.face_count,
            "euler_genus": euler_genus(m)[0], "b_vertex": glued.b_vertex}
    return OK, mapio.serialize_map(m), None, ResultRecord("connect-sum", digest(m), vals)


def cmd_oracle(a):
    m = _load(a.input)
    patch = oracle.face_subset_oracle(m, a.holes, budget=a.budget, workers=a.workers)
    return _patch_output("oracle", m, patch)


def cmd_widths(a):
    h = a.h
    if h < 1:
        raise UsageError("widths: h must be at least 1")
    vals = {f"phi({h},{q})": spanner.phi(h, q) for q in range(4)}
    vals[f"gamma({h})"] = spanner.gamma(h)
    return OK, None, None, ResultRecord("widths", "none", vals)


# -- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes for parallel searches (default 1)")
    common.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET,
                        help="oracle node budget (default 10^8)")
    common.add_argument("--retries", type=int, default=64,
                        help="candidate cycles tried by the pair finder (default 64)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--machine", action="store_true",
                        help="emit one canonical JSON record instead of text blocks")

    p = _Parser(prog="surftri", description="Surface triangulations and spanning spheres with holes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, inp=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if inp:
            sp.add_argument("input", nargs="?", help="map file (default: standard input)")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check a map and echo it")
    add("genus", cmd_genus, "Euler genus and orientability")
    add("facewidth", cmd_facewidth, "facewidth with a witness")
    sp = add("cut", cmd_cut, "cut along a cycle")
    sp.add_argument("--cycle", required=True, help="vertex sequence, e.g. '0 1 2'")
    sp.add_argument("--emit", action="store_true", help="also print the pieces")
    sp = add("classify-cycle", cmd_classify, "contractible / separating / nonseparating")
    sp.add_argument("--cycle", required=True)
    sp = add("homotopic", cmd_homotopic, "are two disjoint cycles homotopic")
    sp.add_argument("--cycle", required=True)
    sp.add_argument("--other", required=True)
    sp = add("find-span", cmd_find_span, "find a spanning sphere with holes")
    sp.add_argument("--surface", choices=("torus", "general"), default="general")
    add("verify-span", cmd_verify_span, "verify a map followed by a patch")
    add("subdivide", cmd_subdivide, "face subdivision with black/white tags")
    sp = add("certify-no-span", cmd_certify, "counting certificate on a face subdivision")
    sp.add_argument("--gprime", type=int, required=True, help="number of holes of the target")
    sp = add("gen", cmd_gen, "generators: torus-grid m n | refine steps seed | "
                             "fixture k7|k6|sphere | double-grid [m n]", inp=False)
    sp.add_argument("kind")
    sp.add_argument("params", nargs="*")
    sp.add_argument("--input", default=None, help="map to refine (default: standard input)")
    sp = add("connect-sum", cmd_connect_sum, "connected sum of two maps", inp=False)
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--fa", type=int, default=0, help="face of the first map (default 0)")
    sp.add_argument("--fb", type=int, default=0, help="face of the second map (default 0)")
    sp = add("oracle", cmd_oracle, "exhaustive face-subset search")
    sp.add_argument("--holes", type=int, required=True)
    sp = add("widths", cmd_widths, "phi(h, 0..3) and gamma(h)", inp=False)
    sp.add_argument("h", type=int)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    _LAST_DIGEST[0] = "none"
    try:
        args = build_parser().parse_args(argv)
        status, mtext, ptext, rec = args.fn(args)
    except UsageError as exc:
        print(exc, file=stderr)
        return USAGE
    except (NotFound, BudgetExceeded) as exc:
        vals = {"verdict": "budget-exceeded" if isinstance(exc, BudgetExceeded) else "not-found",
                "message": str(exc)}
        for key in ("tried", "stage", "exhaustive", "nodes"):
            if getattr(exc, key, None) is not None:
                vals[key] = getattr(exc, key)
        rec = ResultRecord(args.command, _LAST_DIGEST[0], vals)
        stdout.write(rec.to_json() + "\n" if args.machine else rec.to_text())
        return REJECT
    except VerifierRejected as exc:
        print(f"internal error: {exc}", file=stderr)
        return USAGE
    except SurfaceMapError as exc:
        print(f"error: {exc}", file=stderr)
        return USAGE
    if args.machine:
        stdout.write(rec.to_json() + "\n")
    else:
        stdout.write((mtext or "") + (ptext or "") + rec.to_text())
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
