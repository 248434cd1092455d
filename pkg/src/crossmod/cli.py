"""Command-line interface: JSON document ingestion, command dispatch,
machine-readable reports.

Document format (JSON, UTF-8): all rationals are strings "num/den" (or
"num"), all tensors sparse.

    {
      "version": "1",
      "algebras": {name: {"dim": n,
                          "bracket": [[i, j, k, "num/den"], ...]}},
      "maps":     {name: {"source": alg, "target": alg,
                          "entries": [[row, col, "num/den"], ...]}},
      "actions":  {name: {"actor": alg, "module": alg,
                          "entries": [[i, row, col, "num/den"], ...]}},
      "crossed_modules": {name: {"h": alg, "g": alg,
                                 "t": map, "alpha": action}},
      "cochains": {name: {"kind": "alt" | "bilinear",
                          "degree": k, "source": alg | int,
                          "values_dim": v,
                          "entries": [[i1, ..., ik, c, "num/den"], ...]}},
      "butterflies": {name: {"source": cm, "target": cm,
                             "phi": map, "f": map, "lam": cochain}}
    }

Reports go to stdout as JSON.  Exit codes: 0 = ok, 1 = mathematical
"no/none" answer, 2 = malformed input.
"""

import argparse
import json
import random
import sys

from gmpy2 import mpq

from .linalg import (zeros_vec, zeros_mat, identity, qstr, mat_vec)
from .lie import (LieAlgebra, ActionTensor, validate_lie, validate_action,
                  standard_algebras, abelian, so3, heisenberg3)
from .cochains import (AltCochain, Bilinear, cohomology, is_cocycle,
                       bilinear_from_function, cochain_from_function,
                       flatten, alt_to_bilinear)
from .crossed import (build_crossed_module, kl_class, default_splitting,
                      extend_section)
from .adjust import (adjustment_exists, construct_adjustment,
                     check_adjustment, adjusted_kl, classify_adjustments,
                     solve_morphism, integrate_nilpotent, is_adjustment)
from .butterfly import (CocycleData, validate_cocycle_data, reconstruct,
                        extract, compose, homotopy_maps, is_invertible,
                        classify_self_butterfly, connect_same_kl,
                        transfer_adjustment, make_neat, identity_data)
from . import catalog as cat


class SpecError(Exception):
    pass


def _q(s):
    try:
        return mpq(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise SpecError("bad rational: %r" % (s,))


def _qvec(v):
    return [qstr(x) for x in v]


def _qmat(m):
    return [[qstr(x) for x in row] for row in m]


class SpecDocument:
    def __init__(self, doc):
        if not isinstance(doc, dict):
            raise SpecError("top-level document must be an object")
        self.raw = doc
        self.algebras = {}
        self.maps = {}
        self.actions = {}
        self.crossed = {}
        self.cochains = {}
        self.butterflies = {}
        for name, spec in doc.get("algebras", {}).items():
            self.algebras[name] = self._parse_algebra(name, spec)
        for name, spec in doc.get("maps", {}).items():
            self.maps[name] = self._parse_map(name, spec)
        for name, spec in doc.get("actions", {}).items():
            self.actions[name] = self._parse_action(name, spec)
        for name, spec in doc.get("crossed_modules", {}).items():
            self.crossed[name] = self._parse_crossed(name, spec)
        for name, spec in doc.get("cochains", {}).items():
            self.cochains[name] = self._parse_cochain(name, spec)
        for name, spec in doc.get("butterflies", {}).items():
            self.butterflies[name] = self._parse_butterfly(name, spec)

    def _dim(self, name, spec, key, minimum=0):
        v = spec.get(key)
        if not isinstance(v, int) or v < minimum:
            raise SpecError("%s: bad %s" % (name, key))
        return v

    def _parse_algebra(self, name, spec):
        n = self._dim(name, spec, "dim")
        c = [[zeros_vec(n) for _ in range(n)] for _ in range(n)]
        for ent in spec.get("bracket", []):
            try:
                i, j, k, val = ent
            except (TypeError, ValueError):
                raise SpecError("%s: bad bracket entry %r" % (name, ent))
            if not all(isinstance(x, int) and 0 <= x < n
                       for x in (i, j, k)):
                raise SpecError("%s: bracket index out of range" % name)
            v = _q(val)
            c[i][j][k] += v
            c[j][i][k] -= v
        L = LieAlgebra(n, c)
        rep = validate_lie(L)
        if not rep["ok"]:
            raise SpecError("%s: not a Lie algebra (%s at %s)"
                            % (name, rep["reason"], rep["witness"]))
        return L

    def _ref(self, table, name, what):
        if name not in table:
            raise SpecError("unresolved %s reference: %r" % (what, name))
        return table[name]

    def _parse_map(self, name, spec):
        src = self._ref(self.algebras, spec.get("source"), "algebra")
        tgt = self._ref(self.algebras, spec.get("target"), "algebra")
        m = zeros_mat(tgt.dim, src.dim)
        for ent in spec.get("entries", []):
            try:
                r, c, val = ent
            except (TypeError, ValueError):
                raise SpecError("%s: bad map entry %r" % (name, ent))
            if not (0 <= r < tgt.dim and 0 <= c < src.dim):
                raise SpecError("%s: map index out of range" % name)
            m[r][c] = _q(val)
        return {"source": spec["source"], "target": spec["target"],
                "matrix": m}

    def _parse_action(self, name, spec):
        actor = self._ref(self.algebras, spec.get("actor"), "algebra")
        module = self._ref(self.algebras, spec.get("module"), "algebra")
        a = [zeros_mat(module.dim, module.dim) for _ in range(actor.dim)]
        for ent in spec.get("entries", []):
            try:
                i, r, c, val = ent
            except (TypeError, ValueError):
                raise SpecError("%s: bad action entry %r" % (name, ent))
            if not (0 <= i < actor.dim and 0 <= r < module.dim
                    and 0 <= c < module.dim):
                raise SpecError("%s: action index out of range" % name)
            a[i][r][c] = _q(val)
        act = ActionTensor(actor.dim, module.dim, a)
        rep = validate_action(actor, module, act)
        if not rep["ok"]:
            raise SpecError("%s: invalid action (%s at %s)"
                            % (name, rep["reason"], rep["witness"]))
        return {"actor": spec["actor"], "module": spec["module"],
                "tensor": act}

    def _parse_crossed(self, name, spec):
        h = self._ref(self.algebras, spec.get("h"), "algebra")
        g = self._ref(self.algebras, spec.get("g"), "algebra")
        t = self._ref(self.maps, spec.get("t"), "map")
        alpha = self._ref(self.actions, spec.get("alpha"), "action")
        if t["source"] != spec.get("h") or t["target"] != spec.get("g"):
            raise SpecError("%s: map t must go h -> g" % name)
        if alpha["actor"] != spec.get("g") \
                or alpha["module"] != spec.get("h"):
            raise SpecError("%s: action must be g on h" % name)
        M, report = build_crossed_module(h, g, t["matrix"],
                                         alpha["tensor"])
        if M is None:
            bad = [k for k, v in report.items()
                   if isinstance(v, dict) and not v.get("ok")]
            raise SpecError("%s: crossed-module axioms fail: %s"
                            % (name, bad))
        return M

    def _parse_cochain(self, name, spec):
        kind = spec.get("kind", "alt")
        src = spec.get("source")
        if isinstance(src, str):
            n = self._ref(self.algebras, src, "algebra").dim
        elif isinstance(src, int) and src >= 0:
            n = src
        else:
            raise SpecError("%s: bad cochain source" % name)
        vdim = self._dim(name, spec, "values_dim")
        if kind == "bilinear":
            b = [[zeros_vec(vdim) for _ in range(n)] for _ in range(n)]
            for ent in spec.get("entries", []):
                try:
                    i, j, c, val = ent
                except (TypeError, ValueError):
                    raise SpecError("%s: bad entry %r" % (name, ent))
                if not (0 <= i < n and 0 <= j < n and 0 <= c < vdim):
                    raise SpecError("%s: index out of range" % name)
                b[i][j][c] = _q(val)
            return Bilinear(n, vdim, b)
        if kind != "alt":
            raise SpecError("%s: unknown cochain kind %r" % (name, kind))
        k = self._dim(name, spec, "degree")
        data = {}
        for ent in spec.get("entries", []):
            if len(ent) != k + 2:
                raise SpecError("%s: bad entry %r" % (name, ent))
            idx = tuple(ent[:k])
            c = ent[k]
            if not all(isinstance(x, int) and 0 <= x < n for x in idx) \
                    or list(idx) != sorted(set(idx)) \
                    or not (0 <= c < vdim):
                raise SpecError("%s: bad index tuple %r" % (name, ent))
            v = data.setdefault(idx, zeros_vec(vdim))
            v[c] = _q(ent[k + 1])
        return AltCochain(k, n, vdim, data)

    def _parse_butterfly(self, name, spec):
        M1 = self._ref(self.crossed, spec.get("source"), "crossed module")
        M2 = self._ref(self.crossed, spec.get("target"), "crossed module")
        phi = self._ref(self.maps, spec.get("phi"), "map")["matrix"]
        f = self._ref(self.maps, spec.get("f"), "map")["matrix"]
        lam = self._ref(self.cochains, spec.get("lam"), "cochain")
        if not isinstance(lam, AltCochain) or lam.degree != 2 \
                or lam.source_dim != M1.g.dim \
                or lam.values_dim != M2.h.dim:
            raise SpecError("%s: lam must be a 2-cochain on g1 valued "
                            "in h2" % name)
        if len(phi) != M2.g.dim or (phi and len(phi[0]) != M1.g.dim):
            raise SpecError("%s: phi has wrong shape" % name)
        if len(f) != M2.h.dim or (f and len(f[0]) != M1.h.dim):
            raise SpecError("%s: f has wrong shape" % name)
        return CocycleData(M1, M2, phi, f, lam)


def load_document(path):
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SpecError("cannot read document: %s" % e)
    return SpecDocument(doc)


def _need(doc, table, name, what):
    obj = getattr(doc, table).get(name)
    if obj is None:
        raise SpecError("missing %s %r" % (what, name))
    return obj


def _first(table, what):
    if not table:
        raise SpecError("document has no %s" % what)
    return next(iter(table.values()))


def _named_or_first(doc, table, name, what):
    if name:
        return _need(doc, table, name, what)
    return _first(getattr(doc, table), what)


# ---------------------------------------------------------------------------
# commands; each returns (payload, status) with status in {0, 1}

def cmd_validate(doc, args):
    payload = {"algebras": sorted(doc.algebras),
               "crossed_modules": sorted(doc.crossed),
               "butterflies": {}}
    status = 0
    for name, d in doc.butterflies.items():
        rep = validate_cocycle_data(d)
        payload["butterflies"][name] = rep["ok"]
        if not rep["ok"]:
            status = 1
    return payload, status


def cmd_homotopy(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    return {"dim_h": M.h.dim, "dim_g": M.g.dim,
            "dim_a": M.dim_a, "dim_f": M.dim_f,
            "f_bracket": [[i, j, k, qstr(M.f_alg.c[i][j][k])]
                          for i in range(M.dim_f)
                          for j in range(M.dim_f)
                          for k in range(M.dim_f)
                          if M.f_alg.c[i][j][k]]}, 0


def cmd_cohomology(doc, args):
    L = _named_or_first(doc, "algebras", args.algebra, "algebra")
    H = cohomology(L, args.values_dim, args.k)
    return {"degree": args.k, "dim": H.dim,
            "cocycles": H.cocycles.dim,
            "coboundaries": H.coboundaries.dim}, 0


def cmd_kl(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    C, H3, coords = kl_class(M)
    trivial = all(x == 0 for x in coords)
    return {"h3_dim": H3.dim,
            "class_coordinates": _qvec(coords),
            "representative": [[list(k) + [c, qstr(v[c])]
                                for c in range(len(v)) if v[c]]
                               for k, v in sorted(C.data.items())],
            "trivial": trivial}, 0


def cmd_adjust_exists(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    ok, wit = adjustment_exists(M)
    if not ok:
        return {"exists": False}, 1
    B, xi = wit
    return {"exists": True, "witness_B": _flat_bilinear(B)}, 0


def cmd_adjust_construct(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    ok, wit = adjustment_exists(M)
    if not ok:
        return {"exists": False}, 1
    eta = construct_adjustment(M, default_splitting(M), *wit)
    return {"eta": _flat_bilinear(eta),
            "adjusted_class": _flat_bilinear(adjusted_kl(M, eta))}, 0


def cmd_adjust_classify(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    out = classify_adjustments(M, M.lift)
    if out is None:
        return {"exists": False}, 1
    base, dirs = out
    return {"exists": True, "affine_dimension": len(dirs),
            "base_point": _flat_bilinear(base)}, 0


def cmd_adjust_check(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    eta = _named_or_first(doc, "cochains", args.cochain, "cochain")
    if isinstance(eta, AltCochain):
        eta = alt_to_bilinear(eta)
    s = doc.maps[args.section]["matrix"] if args.section else None
    rep = check_adjustment(M, eta, s)
    payload = {k: v["ok"] if isinstance(v, dict) else v
               for k, v in rep.items()}
    return payload, 0 if rep["ok"] else 1


def cmd_morphism(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    names = sorted(doc.cochains)
    if len(names) < 2:
        raise SpecError("morphism needs two cochains in the document")
    eta1 = doc.cochains[names[0]]
    eta2 = doc.cochains[names[1]]
    if isinstance(eta1, AltCochain):
        eta1 = alt_to_bilinear(eta1)
    if isinstance(eta2, AltCochain):
        eta2 = alt_to_bilinear(eta2)
    s = M.lift
    phi = solve_morphism(M, (s, eta1), (s, eta2))
    if phi is None:
        return {"connected": False}, 1
    return {"connected": True, "phi": _qmat(phi)}, 0


def cmd_butterfly_validate(doc, args):
    d = _named_or_first(doc, "butterflies", args.butterfly, "butterfly")
    rep = validate_cocycle_data(d)
    payload = {k: v["ok"] if isinstance(v, dict) else v
               for k, v in rep.items()}
    if rep["ok"]:
        payload["invertible"] = is_invertible(d)
    return payload, 0 if rep["ok"] else 1


def cmd_butterfly_reconstruct(doc, args):
    d = _named_or_first(doc, "butterflies", args.butterfly, "butterfly")
    rep = validate_cocycle_data(d)
    if not rep["ok"]:
        return {"valid": False}, 1
    b = reconstruct(d)
    d2 = extract(b)
    roundtrip = (d2.phi == d.phi and d2.f == d.f
                 and not any((d2.lam.data.get(k) or d.lam.data.get(k))
                             and d2.lam.value(k) != d.lam.value(k)
                             for k in set(d2.lam.data) | set(d.lam.data)))
    return {"middle_dim": b.k_alg.dim, "roundtrip": roundtrip}, 0


def cmd_butterfly_compose(doc, args):
    names = sorted(doc.butterflies)
    if len(names) < 2:
        raise SpecError("compose needs two butterflies in the document")
    d = compose(doc.butterflies[names[0]], doc.butterflies[names[1]])
    rep = validate_cocycle_data(d)
    return {"valid": rep["ok"]}, 0 if rep["ok"] else 1


def cmd_butterfly_classify(doc, args):
    d = _named_or_first(doc, "butterflies", args.butterfly, "butterfly")
    coords, H2, _ = classify_self_butterfly(d)
    return {"h2_dim": H2.dim, "class_coordinates": _qvec(coords)}, 0


def cmd_transfer(doc, args):
    d = _named_or_first(doc, "butterflies", args.butterfly, "butterfly")
    M1, M2 = d.M1, d.M2
    ok, wit = adjustment_exists(M1)
    if not ok:
        return {"source_has_adjustment": False}, 1
    s1, s2 = M1.lift, M2.lift
    eta1 = construct_adjustment(M1, extend_section(M1, s1), *wit)
    dn = make_neat(d, s1, s2)
    eta2 = transfer_adjustment(dn, s1, s2, eta1)
    return {"eta2": _flat_bilinear(eta2),
            "adjusted_class_target": _flat_bilinear(
                adjusted_kl(M2, eta2))}, 0


def cmd_connect(doc, args):
    names = sorted(doc.crossed)
    if len(names) < 2:
        raise SpecError("connect needs two crossed modules")
    M1, M2 = doc.crossed[names[0]], doc.crossed[names[1]]
    d = connect_same_kl(M1, default_splitting(M1), M2,
                        default_splitting(M2))
    if d is None:
        return {"connected": False}, 1
    return {"connected": True, "invertible": is_invertible(d)}, 0


def cmd_integrate(doc, args):
    M = _named_or_first(doc, "crossed", args.module, "crossed module")
    ok, wit = adjustment_exists(M)
    if not ok:
        return {"exists": False}, 1
    eta = construct_adjustment(M, default_splitting(M), *wit)
    z = [_q(x) for x in (args.log_coords or "0").split(",")]
    x = [_q(v) for v in (args.vector or "0").split(",")]
    if len(z) != M.g.dim or len(x) != M.g.dim:
        raise SpecError("log coords and vector must have dim %d"
                        % M.g.dim)
    val = integrate_nilpotent(M, eta, z, x)
    return {"kappa": _qvec(val)}, 0


def _flat_bilinear(B):
    return [[i, j, c, qstr(v)]
            for i, row in enumerate(B.b)
            for j, vec in enumerate(row)
            for c, v in enumerate(vec) if v]


# ---------------------------------------------------------------------------
# catalog emission

def _algebra_spec(L):
    return {"dim": L.dim,
            "bracket": [[i, j, k, qstr(L.c[i][j][k])]
                        for i in range(L.dim)
                        for j in range(i + 1, L.dim)
                        for k in range(L.dim) if L.c[i][j][k]]}


def _module_spec(doc, prefix, M):
    doc["algebras"][prefix + "_h"] = _algebra_spec(M.h)
    doc["algebras"][prefix + "_g"] = _algebra_spec(M.g)
    doc["maps"][prefix + "_t"] = {
        "source": prefix + "_h", "target": prefix + "_g",
        "entries": [[r, c, qstr(v)] for r, row in enumerate(M.t)
                    for c, v in enumerate(row) if v]}
    doc["actions"][prefix + "_alpha"] = {
        "actor": prefix + "_g", "module": prefix + "_h",
        "entries": [[i, r, c, qstr(v)]
                    for i, m in enumerate(M.alpha.a)
                    for r, row in enumerate(m)
                    for c, v in enumerate(row) if v]}
    doc["crossed_modules"][prefix] = {
        "h": prefix + "_h", "g": prefix + "_g",
        "t": prefix + "_t", "alpha": prefix + "_alpha"}


def emit_catalog(spec, path):
    """spec strings:
    product:<abelian(n)|so3|heisenberg3|sl2>:<a_dim>
    torus:<n>  |  matrix_aut:<n>  |  truncation:<so3|abelian(n)>:<depth>"""
    parts = spec.split(":")
    doc = {"version": "1", "algebras": {}, "maps": {}, "actions": {},
           "crossed_modules": {}, "cochains": {}, "butterflies": {}}

    def base_algebra(tag):
        if tag == "so3":
            return so3()
        if tag == "heisenberg3":
            return heisenberg3()
        if tag == "sl2":
            from .lie import sl2
            return sl2()
        if tag.startswith("abelian(") and tag.endswith(")"):
            return abelian(int(tag[8:-1]))
        raise SpecError("unknown base algebra %r" % tag)

    if parts[0] == "product" and len(parts) == 3:
        M = cat.product_module(int(parts[2]), base_algebra(parts[1]))
    elif parts[0] == "torus" and len(parts) == 2:
        M = cat.categorical_torus(int(parts[1]))
    elif parts[0] == "matrix_aut" and len(parts) == 2:
        M = cat.matrix_aut(int(parts[1]))
    elif parts[0] == "truncation" and len(parts) == 3:
        F = base_algebra(parts[1])
        B = bilinear_from_function(
            F.dim, 1, lambda i, j: [mpq(1 if i == j else 0)])
        M = cat.path_truncation_module(B, F, 1, int(parts[2]))
    else:
        raise SpecError("unknown catalog spec %r" % spec)
    _module_spec(doc, "m", M)
    out = json.dumps(doc, indent=1, sort_keys=True)
    if path == "-":
        sys.stdout.write(out + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(out)
    return doc


COMMANDS = {
    "validate": cmd_validate,
    "homotopy": cmd_homotopy,
    "cohomology": cmd_cohomology,
    "kl": cmd_kl,
    "adjust-exists": cmd_adjust_exists,
    "adjust-construct": cmd_adjust_construct,
    "adjust-classify": cmd_adjust_classify,
    "adjust-check": cmd_adjust_check,
    "morphism": cmd_morphism,
    "butterfly-validate": cmd_butterfly_validate,
    "butterfly-reconstruct": cmd_butterfly_reconstruct,
    "butterfly-compose": cmd_butterfly_compose,
    "butterfly-classify": cmd_butterfly_classify,
    "transfer": cmd_transfer,
    "connect": cmd_connect,
    "integrate-nilpotent": cmd_integrate,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="crossmod",
        description="Exact computations with central crossed modules of "
                    "Lie algebras.")
    parser.add_argument("command",
                        choices=sorted(COMMANDS) + ["catalog"])
    parser.add_argument("spec", nargs="?", default="-",
                        help="path to a JSON document, or - for stdin; "
                             "for `catalog`, a catalog spec string")
    parser.add_argument("--out", default="-",
                        help="output path for `catalog` (default stdout)")
    parser.add_argument("--module", help="crossed module name")
    parser.add_argument("--algebra", help="algebra name")
    parser.add_argument("--cochain", help="cochain name")
    parser.add_argument("--section", help="section map name")
    parser.add_argument("--butterfly", help="butterfly name")
    parser.add_argument("--k", type=int, default=3,
                        help="cohomology degree")
    parser.add_argument("--values-dim", type=int, default=1)
    parser.add_argument("--log-coords",
                        help="comma-separated rationals for the group "
                             "element in logarithmic coordinates")
    parser.add_argument("--vector",
                        help="comma-separated rationals for the algebra "
                             "argument")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=64)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        if args.command == "catalog":
            emit_catalog(args.spec, args.out)
            if args.verbose:
                print("wrote catalog document", file=sys.stderr)
            return 0
        doc = load_document(args.spec)
        random.seed(args.seed)
        payload, status = COMMANDS[args.command](doc, args)
    except SpecError as e:
        report = {"command": args.command, "status": "malformed",
                  "error": str(e)}
        print(json.dumps(report, sort_keys=True))
        return 2
    report = {"command": args.command,
              "status": "ok" if status == 0 else "fail",
              "payload": payload}
    print(json.dumps(report, sort_keys=True))
    if args.verbose:
        print("%s: %s" % (args.command, report["status"]),
              file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
