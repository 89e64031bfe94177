"""Problem files: a JSON document naming algebras, homomorphisms, ladders,
triples and certificates.

Complex entries are written as [re, im] pairs.  Canonical form has sorted keys,
two-space indentation and floats printed with 17 significant digits, so a
canonical file survives load + dump byte for byte.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matcore as mc
from .algmodel import FDAlgebra, Homomorphism, Ladder, SampledElement, UnitizedElement
from .errors import ResolutionError
from .triples import HomotopyCertificate, IsoCertificateK0, K0Triple, K1Triple, RawK0Triple, RawK1Triple

FORMAT = 1
PARTS = ("psi", "phi", "gamma")


# canonical text


def _num(x):
    x = float(x) + 0.0
    if not np.isfinite(x):
        raise ValueError("non-finite number %r" % x)
    return format(x, ".17g")


def dumps(obj, indent=0):
    """Canonical JSON text."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(str(k)), dumps(obj[k], indent + 1)) for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError("cannot serialize %r" % type(obj))


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data, what):
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ResolutionError("%s: matrix entries must be [re, im] pairs" % what)
    if a.ndim == 2 and a.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    if a.ndim != 3 or a.shape[-1] != 2 or a.shape[0] != a.shape[1]:
        raise ResolutionError("%s: expected a square matrix of [re, im] pairs, got shape %s" % (what, a.shape))
    return a[..., 0] + 1j * a[..., 1]


def element_to_json(x, body=False):
    out = {"scalar": matrix_to_json(x.scalar)}
    if body:
        out["body"] = [matrix_to_json(b) for b in x.body]
    else:
        out["blocks"] = [matrix_to_json(b) for b in x.blocks]
    return out


def element_from_json(data, alg, what):
    if not isinstance(data, dict) or "scalar" not in data:
        raise ResolutionError("%s: element needs a scalar part" % what)
    sc = matrix_from_json(data["scalar"], what + ".scalar")
    key = "body" if "body" in data else "blocks"
    raw = data.get(key, [])
    if len(raw) != alg.num_blocks:
        raise ResolutionError("%s: %d blocks given, algebra %s has %d" % (what, len(raw), alg, alg.num_blocks))
    mats = [matrix_from_json(b, "%s.%s[%d]" % (what, key, i)) for i, b in enumerate(raw)]
    try:
        if key == "body":
            return UnitizedElement.from_body(alg, sc, mats)
        return UnitizedElement(alg, sc, mats)
    except ValueError as exc:
        raise ResolutionError("%s: %s" % (what, exc))


def path_from_json(data, alg, what):
    if not isinstance(data, dict) or "samples" not in data:
        raise ResolutionError("%s: sampled element needs samples" % what)
    els = [element_from_json(s, alg, "%s.samples[%d]" % (what, i)) for i, s in enumerate(data["samples"])]
    if len(els) < 2:
        raise ResolutionError("%s: at least two samples are needed" % what)
    stacked = UnitizedElement(alg, np.stack([e.scalar for e in els]),
                              [np.stack([e.blocks[j] for e in els]) for j in range(alg.num_blocks)])
    return SampledElement(data.get("domain", "interval"), stacked, data.get("boundary", "none"))


def path_to_json(path, body=False):
    n = path.grid[0]
    return {"domain": path.domain, "boundary": path.boundary,
            "samples": [element_to_json(path.at(i), body) for i in range(n)]}


# the loaded problem


@dataclass
class Problem:
    doc: dict
    algebras: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    ladders: dict = field(default_factory=dict)
    triples: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    source: str = ""

    @property
    def settings(self):
        return self.doc.get("settings", {})

    @property
    def tolerance(self):
        t = float(self.settings.get("tolerance", 1e-9))
        return mc.Tolerance(t, max(100 * t, 1e-7))

    @property
    def grid(self):
        return int(self.settings.get("grid", 257))

    def _get(self, table, name, kind):
        if name is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise ResolutionError("several %ss defined; name one of: %s" % (kind, ", ".join(sorted(table)) or "none"))
        if name not in table:
            raise ResolutionError("unknown %s %r (known: %s)" % (kind, name, ", ".join(sorted(table)) or "none"))
        return table[name]

    def algebra(self, name=None):
        return self._get(self.algebras, name, "algebra")

    def hom(self, name=None):
        return self._get(self.homs, name, "homomorphism")

    def ladder(self, name=None):
        return self._get(self.ladders, name, "ladder")

    def triple(self, name=None):
        return self._get(self.triples, name, "triple")

    def certificate(self, name=None):
        return self._get(self.certificates, name, "certificate")


def _fixture_hook(name, grid):
    from .engine import fixture  # local: engine pulls in the full stack

    try:
        return fixture(name, grid)
    except KeyError:
        raise ResolutionError("unknown builtin fixture %r" % name)


def _resolve_hom(prob, name, what):
    if name in prob.homs:
        return prob.homs[name]
    if "." in name:
        lad, part = name.rsplit(".", 1)
        if lad in prob.ladders and part in PARTS:
            return getattr(prob.ladders[lad], part)
    raise ResolutionError("%s: unknown homomorphism %r" % (what, name))


def _load_triple(prob, name, entry):
    what = "triples.%s" % name
    if "builtin" in entry:
        fx, _, key = str(entry["builtin"]).partition(".")
        f = _fixture_hook(fx, prob.grid)
        if key not in f.triples:
            raise ResolutionError("%s: fixture %s has no triple %r" % (what, fx, key))
        return f.triples[key]
    kind = entry.get("kind")
    if "hom" not in entry:
        raise ResolutionError("%s: missing hom" % what)
    hom = _resolve_hom(prob, entry["hom"], what)
    src, tgt = hom.source, hom.target
    if kind == "k0":
        return K0Triple(*(element_from_json(entry[k], a, "%s.%s" % (what, k)) for k, a in
                          (("p", src), ("q", src), ("v", tgt))), hom, name)
    if kind == "k0raw":
        return RawK0Triple(*(element_from_json(entry[k], a, "%s.%s" % (what, k)) for k, a in
                             (("e", src), ("f", src), ("b", tgt))), hom)
    if kind in ("k1", "k1raw"):
        a = element_from_json(entry["p" if kind == "k1" else "e"], src, what + ".p")
        b = element_from_json(entry["u" if kind == "k1" else "a"], src, what + ".u")
        g = path_from_json(entry["g"], tgt, what + ".g")
        return K1Triple(a, b, g, hom, name) if kind == "k1" else RawK1Triple(a, b, g, hom)
    raise ResolutionError("%s: kind must be k0, k0raw, k1 or k1raw" % what)


def _load_certificate(prob, name, entry):
    what = "certificates.%s" % name
    kind = entry.get("kind")
    if kind in ("rotation", "whitehead"):
        return {"kind": kind}
    if kind == "path":
        tname = entry.get("triple")
        t = prob.triple(tname)
        src = t.hom.source
        path = path_from_json(entry["path"], src if isinstance(t, (K1Triple, RawK1Triple)) else t.hom.target,
                              what + ".path")
        gp = None
        if "g_path" in entry:
            # g_t(s) for each t, given as a list of paths
            rows = [path_from_json(p, t.hom.target, "%s.g_path[%d]" % (what, i)) for i, p in enumerate(entry["g_path"])]
            el = rows[0].element
            stacked = UnitizedElement(el.algebra, np.stack([r.element.scalar for r in rows]),
                                      [np.stack([r.element.blocks[j] for r in rows]) for j in range(el.algebra.num_blocks)])
            gp = SampledElement("square", stacked)
        return HomotopyCertificate(path, gp, "path")
    if kind == "iso":
        t = prob.triple(entry.get("triple"))
        other = prob.triple(entry.get("other"))
        c = element_from_json(entry["c"], t.hom.source, what + ".c")
        d = element_from_json(entry["d"], t.hom.source, what + ".d")
        return {"kind": "iso", "other": other, "cert": IsoCertificateK0(c, d)}
    raise ResolutionError("%s: kind must be rotation, whitehead, path or iso" % what)


def _normalize(doc):
    """Round numbers through float so the canonical text is stable."""
    return json.loads(dumps(doc))


def load(data, source=""):
    """Parse and validate a problem document (a dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ResolutionError("%s: not valid JSON (%s)" % (source or "problem", exc))
    if not isinstance(data, dict):
        raise ResolutionError("problem must be a JSON object")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise ResolutionError("unsupported format %r" % fmt)
    prob = Problem(data, source=source)
    for name, entry in data.get("algebras", {}).items():
        try:
            prob.algebras[name] = FDAlgebra(tuple(entry["blocks"]), entry.get("label", name))
        except (KeyError, TypeError, ValueError) as exc:
            raise ResolutionError("algebras.%s: %s" % (name, exc))
    for name, entry in data.get("homomorphisms", {}).items():
        what = "homomorphisms.%s" % name
        src = prob.algebra(entry.get("source")) if entry.get("source") in prob.algebras else None
        tgt = prob.algebra(entry.get("target")) if entry.get("target") in prob.algebras else None
        if src is None or tgt is None:
            raise ResolutionError("%s: unknown source or target algebra" % what)
        try:
            if "pieces" in entry:
                pieces = [(int(p["target_block"]), int(p["source_block"]),
                           np.asarray(p["isometry"], dtype=float)[..., 0] + 1j * np.asarray(p["isometry"], dtype=float)[..., 1])
                          for p in entry["pieces"]]
                prob.homs[name] = Homomorphism(src, tgt, pieces, name)
            else:
                us = entry.get("unitaries")
                if us is not None:
                    us = [None if u is None else matrix_from_json(u, what + ".unitaries") for u in us]
                prob.homs[name] = Homomorphism.standard(src, tgt, entry["multiplicities"], us, name)
        except (KeyError, TypeError, ValueError) as exc:
            raise ResolutionError("%s: %s" % (what, exc))
    for name, entry in data.get("ladders", {}).items():
        what = "ladders.%s" % name
        if "builtin" in entry:
            f = _fixture_hook(entry["builtin"], prob.grid)
            if f.ladder is None:
                raise ResolutionError("%s: fixture %s has no ladder" % (what, entry["builtin"]))
            prob.ladders[name] = f.ladder
            continue
        hom = prob.homs.get(entry.get("hom"))
        if hom is None:
            raise ResolutionError("%s: unknown homomorphism %r" % (what, entry.get("hom")))
        from .errors import LadderInvalid

        try:
            prob.ladders[name] = Ladder.from_ideals(hom, entry.get("ideal_A", []), entry.get("ideal_B", []), name)
        except LadderInvalid as exc:
            raise ResolutionError("%s: %s" % (what, exc))
    for name, entry in data.get("triples", {}).items():
        try:
            prob.triples[name] = _load_triple(prob, name, entry)
        except KeyError as exc:
            raise ResolutionError("triples.%s: missing entry %s" % (name, exc))
    for name, entry in data.get("certificates", {}).items():
        try:
            prob.certificates[name] = _load_certificate(prob, name, entry)
        except KeyError as exc:
            raise ResolutionError("certificates.%s: missing entry %s" % (name, exc))
    return prob


def serialize(prob):
    return dumps(_normalize(prob.doc)) + "\n"


# fixture files


def fixture_dir():
    env = os.environ.get("RELK_FIXTURE_DIR")
    return Path(env) if env else Path(__file__).with_name("fixtures")


def open_problem(ref):
    """A path to a problem file, or the name of a fixture file."""
    p = Path(ref)
    if not p.exists():
        cand = fixture_dir() / (ref if ref.endswith(".json") else ref + ".json")
        if not cand.exists():
            raise ResolutionError("no problem file %r (also looked in %s)" % (ref, fixture_dir()))
        p = cand
    return load(p.read_text(), str(p))


def hom_to_json(hom):
    return {"source": hom.source.label, "target": hom.target.label,
            "multiplicities": hom.multiplicity_matrix()}


def fixture_document(f):
    """The problem file for one fixture."""
    doc = {"format": FORMAT, "name": f.name, "title": f.title, "settings": {"tolerance": 1e-9, "grid": 257}}
    if f.note:
        doc["note"] = f.note
    doc["expected"] = f.expected
    if f.hom is not None:
        hom = f.hom
        names = {"source": "A", "target": "B"}
        doc["algebras"] = {"A": {"blocks": list(hom.source.block_sizes), "label": str(hom.source)},
                           "B": {"blocks": list(hom.target.block_sizes), "label": str(hom.target)}}
        doc["homomorphisms"] = {"phi": {"source": names["source"], "target": names["target"],
                                        "multiplicities": hom.multiplicity_matrix()}}
        doc["triples"] = {}
        for k, t in f.triples.items():
            if isinstance(t, K0Triple):
                doc["triples"][k] = {"kind": "k0", "hom": "phi", "p": element_to_json(t.p, True),
                                     "q": element_to_json(t.q, True), "v": element_to_json(t.v, True)}
            else:
                doc["triples"][k] = {"kind": "k1", "hom": "phi", "p": element_to_json(t.p, True),
                                     "u": element_to_json(t.u, True), "g": path_to_json(t.g, True)}
        if any(isinstance(t, K0Triple) for t in f.triples.values()):
            doc["certificates"] = {"rotation": {"kind": "rotation"}}
    else:
        doc["ladders"] = {"L": {"builtin": f.name}}
        doc["triples"] = {k: {"builtin": "%s.%s" % (f.name, k)} for k in f.triples}
    return _normalize(doc)
