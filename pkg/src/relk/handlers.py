"""Command handlers shared by the command line and the HTTP service.

Each handler takes a loaded Problem plus names and returns an Outcome: text
lines for people, a results dict for machines, and the exit code.
"""

from dataclasses import dataclass, field

import numpy as np

from . import engine, intk, maps
from . import matcore as mc
from .errors import NotComputable, RelkError, ResolutionError
from .problem import FORMAT, element_to_json, fixture_dir, fixture_document, dumps
from .triples import (
    K0Triple,
    K1Triple,
    RawK0Triple,
    RawK1Triple,
    normalize_k0,
    normalize_k1,
    rotation_2x2,
    validate,
    verify_elementary,
    verify_iso,
    whitehead_k1,
)


@dataclass
class Outcome:
    command: str
    exit_code: int = 0
    text: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def machine(self):
        return {"format": FORMAT, "command": self.command, "exit_code": self.exit_code, "results": self.results}


def failure(command, exc):
    code = exc.exit_code if isinstance(exc, RelkError) else 1
    kind = type(exc).__name__
    lead = {2: "resolution error", 3: "not computable in this regime", 4: "invalid lift or certificate"}.get(code, "error")
    return Outcome(command, code, ["%s: %s (%s)" % (lead, exc, kind)], {"error": {"type": kind, "message": str(exc)}})


def _pres(p):
    return {"describe": p.describe(), "invariant_factors": p.invariant_factors, "generators": list(p.generator_tags)}


def _fmt(z):
    z = complex(z)
    re, im = round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0
    if im == 0:
        return "%g" % re
    if re == 0:
        return "%gi" % im
    return "%g%+gi" % (re, im)


def _matrix_lines(m, indent="      "):
    return [indent + "[" + ", ".join(_fmt(z) for z in row) + "]" for row in np.asarray(m)]


def _element_lines(name, x):
    out = ["    %s: scalar part" % name]
    out += _matrix_lines(x.scalar)
    for i, b in enumerate(x.blocks):
        out.append("    %s: block %d" % (name, i + 1))
        out += _matrix_lines(b)
    return out


def _triple_lines(t):
    if isinstance(t, K0Triple):
        return _element_lines("p", t.p) + _element_lines("q", t.q) + _element_lines("v", t.v)
    out = _element_lines("p", t.p) + _element_lines("u", t.u)
    out.append("    g: sampled on %d nodes, g(1/2):" % t.g.grid[0])
    out += _element_lines("g(1/2)", t.g.at(t.g.grid[0] // 2))[1:]
    return out


def _triple_json(t):
    if isinstance(t, K0Triple):
        return {"kind": "k0", "p": element_to_json(t.p), "q": element_to_json(t.q), "v": element_to_json(t.v)}
    return {"kind": "k1", "p": element_to_json(t.p), "u": element_to_json(t.u), "g_nodes": t.g.grid[0],
            "g_first": element_to_json(t.g.first()), "g_last": element_to_json(t.g.last())}


def _report_json(rep):
    return {
        "title": rep.title,
        "groups": [{"name": g.name, **_pres(g)} for g in rep.groups],
        "maps": [{"name": m.name, "source": m.source.name, "target": m.target.name, "matrix": m.matrix} for m in rep.maps],
        "exactness": rep.exactness,
        "exact": rep.exact,
        "notes": rep.notes,
    }


# commands


def kgroups(prob, alg=None):
    a = prob.algebra(alg)
    k0, k1 = intk.k_groups(a)
    text = ["algebra %s" % a, "K0 = %s, K1 = %s" % (k0.describe(), k1.describe())]
    text += ["  generator: %s" % t for t in k0.generator_tags]
    return Outcome("kgroups", 0, text, {"algebra": str(a), "K0": _pres(k0), "K1": _pres(k1)})


def relative(prob, hom=None):
    phi = prob.hom(hom)
    rel = engine.relative_groups_fd(phi, prob.grid, prob.tolerance)
    rep = engine.six_term_thm1(phi, prob.grid, prob.tolerance)
    text = ["homomorphism %s: %s -> %s" % (phi.label, phi.source, phi.target),
            "K0(A;B) = %s" % rel.k0.describe(), "K1(A;B) = %s" % rel.k1.describe()]
    for g, y in zip(rel.k0_generators, rel.k0_basis):
        bad = validate(g, prob.tolerance)
        text.append("  K0 generator with nu0 = %s, (v*v, vv*, v) form, %s" % (y, "valid" if bad.ok else "INVALID"))
        text += _triple_lines(g)
    for g, c in zip(rel.k1_generators, rel.k1_reps):
        bad = validate(g, prob.tolerance)
        text.append("  K1 generator (1, 1, loop) of loop class %s, %s" % (c, "valid" if bad.ok else "INVALID"))
    text.append("exactness:")
    text += ["  at %s: %s" % (v["node"], "exact" if v["exact"] else v["detail"]) for v in rep.exactness]
    results = {
        "K0": _pres(rel.k0), "K1": _pres(rel.k1),
        "k0_generators": [{"nu0": y, "triple": _triple_json(g), "valid": validate(g, prob.tolerance).ok}
                          for g, y in zip(rel.k0_generators, rel.k0_basis)],
        "k1_generators": [{"loop_class": c, "valid": validate(g, prob.tolerance).ok}
                          for g, c in zip(rel.k1_generators, rel.k1_reps)],
        "sequence": _report_json(rep),
    }
    for name, t in prob.triples.items():
        if t.hom is not phi:
            continue
        if isinstance(t, K0Triple):
            c = engine.class_of_k0_triple_fd(t, rel)
        elif isinstance(t, K1Triple):
            c = engine.class_of_k1_triple_fd(t, rel, tol=prob.tolerance)
        else:
            continue
        text.append("class of %s = %s" % (name, c))
        results.setdefault("classes", {})[name] = c
    code = 0 if rep.exact else 1
    return Outcome("relative", code, text, results)


def sixterm(prob, ladder=None):
    lad = prob.ladder(ladder)
    rep = engine.six_term_thm2(lad, prob.grid, prob.tolerance)
    return Outcome("sixterm", 0 if rep.exact else 1, rep.lines(), _report_json(rep))


def _psi_class(lad, triple, degree, prob):
    """Class over psi, or None when the regime has no decision procedure."""
    if isinstance(lad, engine.IntervalLadder):
        return lad.class_psi_k1(triple, prob.tolerance) if degree == 1 else []
    if getattr(lad, "is_finite_dimensional", lambda: False)():
        rel = engine.relative_groups_fd(lad.psi, prob.grid, prob.tolerance)
        if degree == 0:
            return engine.class_of_k0_triple_fd(triple, rel)
        return engine.class_of_k1_triple_fd(triple, rel, tol=prob.tolerance)
    return None


def boundary(prob, ladder=None, which="index", triple=None):
    lad = prob.ladder(ladder)
    sigma = prob.triple(triple)
    tol = prob.tolerance
    text, results = [], {"map": which}
    if which == "index":
        if not isinstance(sigma, K1Triple):
            raise ResolutionError("the index map takes a K1 triple over gamma")
        if isinstance(lad, engine.DiskLadder) and sigma.note == "(1, z, g)":
            res = lad.boundary(tol)
            d = res.detail["expected_defect"]
            ok = d <= 1e-6
            text.append("index map with the displayed lift (l = 1, h = g)")
            text.append("output %s expected matrix, max defect %.3g %s 1e-6" % ("matches" if ok else "DIFFERS from",
                                                                                d, "<=" if ok else ">"))
            results.update({"max_defect": d, "matches": ok, "bound": 1e-6})
            results["class"] = None
            text.append("class: not decided for this ladder")
            return Outcome("boundary", 0 if ok else 1, text, results)
        res = maps.index_map(sigma, lad, tol=tol)
        degree = 0
    elif which == "exp":
        if not isinstance(sigma, K0Triple):
            raise ResolutionError("the exponential map takes a K0 triple over gamma")
        res = maps.exp_map(sigma, lad, grid=prob.grid, tol=tol)
        degree = 1
    else:
        raise ResolutionError("map must be index or exp")
    out = res.triple
    bad = validate(out, mc.Tolerance(tol.composite, tol.composite))
    text.append("%s map output (sign %+d), %s" % (which, res.sign, "valid" if bad.ok else "INVALID"))
    text += ["  " + ln for ln in bad.lines()]
    if isinstance(out, K0Triple) or out.u.size() < 1e3:
        if len(out.p.batch_shape) == 0:
            text += _triple_lines(out)
    results["valid"] = bad.ok
    results["sign"] = res.sign
    try:
        c = _psi_class(lad, out, degree, prob)
    except NotComputable:
        c = None
    if c is None:
        text.append("class: not decided for this ladder")
        results["class"] = None
    else:
        c = [res.sign * x for x in c]
        target = "K1(C0(R)) ≅ Z" if isinstance(lad, engine.IntervalLadder) else "K%d(psi)" % degree
        text.append("class = %s in %s" % (" ".join(str(x) for x in c) or "0", target))
        results["class"] = c
    return Outcome("boundary", 0 if bad.ok else 1, text, results)


def verify(prob, triple=None, certificate=None):
    sigma = prob.triple(triple)
    tol = prob.tolerance
    text, results = [], {}
    rep = validate(sigma, tol)
    checks = [("valid", rep)]
    if certificate is not None:
        cert = prob.certificate(certificate)
        if isinstance(cert, dict) and cert["kind"] == "rotation":
            raw, c = rotation_2x2(sigma, prob.grid, tol)
            checks.append(("rotation elementary", verify_elementary(raw, c, tol)))
        elif isinstance(cert, dict) and cert["kind"] == "whitehead":
            if isinstance(sigma, K1Triple) or isinstance(sigma, RawK1Triple):
                summed, c = whitehead_k1(sigma, tol=tol)
                checks.append(("whitehead elementary", verify_elementary(summed, c, tol)))
            else:
                raise ResolutionError("the whitehead certificate applies to K1 triples")
        elif isinstance(cert, dict) and cert["kind"] == "iso":
            checks.append(("isomorphic", verify_iso(sigma, cert["other"], cert["cert"], tol)))
        else:
            checks.append(("elementary", verify_elementary(sigma, cert, tol)))
    ok = True
    for name, r in checks:
        ok = ok and r.ok
        text.append("%s: %s" % (name, "pass" if r.ok else "FAIL"))
        text += ["  " + ln for ln in r.lines()]
        results[name] = {"ok": r.ok, "violations": [{"check": n, "defect": v} for n, v in r.violations]}
    if isinstance(sigma, (RawK0Triple, RawK1Triple)):
        norm = normalize_k0(sigma, tol)[0] if isinstance(sigma, RawK0Triple) else normalize_k1(sigma, tol)[0]
        nv = validate(norm, tol)
        text.append("normalized form: %s" % ("valid" if nv.ok else "INVALID"))
        ok = ok and nv.ok
    return Outcome("verify", 0 if ok else 1, text, results)


def fixtures(write=None, name=None):
    fx = engine.fixtures()
    if name is not None:
        fx = [f for f in fx if f.name == name]
        if not fx:
            raise ResolutionError("unknown fixture %r" % name)
    text, rows = [], []
    for f in fx:
        line = "%-10s %s" % (f.name, f.title)
        if f.expected:
            line += "  expected %s" % ", ".join("%s=%s" % (k, f.expected[k]) for k in sorted(f.expected))
        text.append(line)
        rows.append({"name": f.name, "title": f.title, "expected": f.expected, "note": f.note,
                     "triples": sorted(f.triples)})
    if write:
        from pathlib import Path

        out = Path(write)
        out.mkdir(parents=True, exist_ok=True)
        for f in fx:
            (out / (f.name + ".json")).write_text(dumps(fixture_document(f)) + "\n")
        text.append("wrote %d files to %s" % (len(fx), out))
    return Outcome("fixtures", 0, text, {"fixtures": rows, "directory": str(fixture_dir())})
