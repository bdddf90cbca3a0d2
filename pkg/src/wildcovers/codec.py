"""JSON encodings for fields, series, matrices, curves and reports.

Field elements of a prime field are bare integers; elements of an extension
are ``{"p", "modulus", "coeffs"}`` objects, abbreviated to the bare
coefficient list inside series and matrices, whose field is stated once.
"""

from __future__ import annotations

from .arith import GF, FieldDescriptor, FqElement
from .curves import EllipticFunction, EllipticGlobalRing, EllipticMarkedCurve, EllipticVerdict, ProjectiveLine
from .errors import ParseError, UsageError
from .series import LaurentSeries
from .unipotent import FqRing, LaurentRing, OrbitReport, P1GlobalRing, UnipotentMatrix


def _parsing(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UsageError:
            raise
        except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
            raise ParseError(f"malformed payload for {fn.__name__}: {exc!r}") from exc
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- fields and elements -------------------------------------------------

def field_to_json(F: FieldDescriptor) -> dict:
    return {"p": F.p, "modulus": list(F.modulus)}


@_parsing
def field_from_json(obj) -> FieldDescriptor:
    if isinstance(obj, int):
        return GF(obj)
    return FieldDescriptor(int(obj["p"]), tuple(int(c) for c in obj["modulus"]))


def element_to_json(a: FqElement, compact: bool = False):
    if a.field.e == 1:
        return a.coeffs[0]
    if compact:
        return list(a.coeffs)
    return {"p": a.field.p, "modulus": list(a.field.modulus), "coeffs": list(a.coeffs)}


@_parsing
def element_from_json(obj, field: FieldDescriptor | None = None) -> FqElement:
    if isinstance(obj, dict):
        F = field_from_json(obj)
        if field is not None and F != field:
            raise UsageError(f"element field {F} does not match {field}")
        return F.element(obj["coeffs"])
    if field is None:
        raise ParseError("a bare element needs a field from context")
    if isinstance(obj, bool):
        raise ParseError("booleans are not field elements")
    if isinstance(obj, int):
        return field.element(obj)
    return field.element([int(c) for c in obj])


# -- series --------------------------------------------------------------

def series_to_json(s: LaurentSeries) -> dict:
    return {
        "field": field_to_json(s.field),
        "val": s.val,
        "prec": s.prec,
        "coeffs": [element_to_json(c, compact=True) for c in s.coeffs],
    }


@_parsing
def series_from_json(obj, field: FieldDescriptor | None = None) -> LaurentSeries:
    """Accepts ``coeffs`` + ``val`` or a sparse ``terms`` mapping exponent -> coefficient."""
    if "field" in obj:
        F = field_from_json(obj["field"])
    elif field is not None:
        F = field
    else:
        raise ParseError("series payload has no field")
    prec = obj.get("prec")
    prec = None if prec is None else int(prec)
    if "terms" in obj:
        terms = {int(k): element_from_json(v, F) for k, v in obj["terms"].items()}
        return LaurentSeries.from_terms(F, terms, prec)
    coeffs = [element_from_json(c, F) for c in obj["coeffs"]]
    return LaurentSeries(F, int(obj.get("val", 0)), coeffs, prec)


# -- curves and models ---------------------------------------------------

def curve_to_json(E: EllipticMarkedCurve) -> dict:
    return {"p": E.p, "A": E.A, "B": E.B}


@_parsing
def curve_from_json(obj) -> EllipticMarkedCurve:
    return EllipticMarkedCurve(int(obj["p"]), int(obj["A"]), int(obj["B"]))


@_parsing
def model_from_json(obj, field: FieldDescriptor | None = None):
    if obj == "p1" or (isinstance(obj, dict) and obj.get("model") == "p1"):
        if field is None:
            raise ParseError("the p1 model needs a field")
        return ProjectiveLine(field)
    return curve_from_json(obj)


def efunc_to_json(g: EllipticFunction) -> dict:
    return {"a": list(g.a), "b": list(g.b)}


# -- matrices ------------------------------------------------------------

def _entry_to_json(v):
    if isinstance(v, FqElement):
        return element_to_json(v, compact=True)
    if isinstance(v, LaurentSeries):
        return series_to_json(v)
    return efunc_to_json(v)


def matrix_to_json(M: UnipotentMatrix) -> dict:
    ring = M.ring
    out = {"n": M.n, "ring": ring.tag}
    if isinstance(ring, EllipticGlobalRing):
        out["curve"] = curve_to_json(ring.curve)
    else:
        out["field"] = field_to_json(ring.field)
    entries = {}
    for (i, j), v in M.entries.items():
        if v.is_zero() and not (isinstance(v, LaurentSeries) and not v.is_exact):
            continue
        entries[f"{i},{j}"] = _entry_to_json(v)
    out["entries"] = entries
    return out


@_parsing
def matrix_from_json(obj, field: FieldDescriptor | None = None) -> UnipotentMatrix:
    tag = obj.get("ring", "fq")
    n = int(obj["n"])
    if tag == "elliptic":
        E = curve_from_json(obj["curve"])
        ring = EllipticGlobalRing(E)
        decode = lambda v: EllipticFunction(E, v.get("a", ()), v.get("b", ()))  # noqa: E731
    else:
        F = field_from_json(obj["field"]) if "field" in obj else field
        if F is None:
            raise ParseError("matrix payload has no field")
        if tag == "fq":
            ring = FqRing(F)
            decode = lambda v: element_from_json(v, F)  # noqa: E731
        elif tag in ("laurent", "p1"):
            ring = LaurentRing(F) if tag == "laurent" else P1GlobalRing(F)
            decode = lambda v: series_from_json(v, F)  # noqa: E731
        else:
            raise UsageError(f"unsupported ring {tag!r}")
    entries = {}
    for key, v in obj.get("entries", {}).items():
        i, j = (int(s) for s in key.split(","))
        entries[i, j] = decode(v)
    return UnipotentMatrix(n, ring, entries)


# -- reports -------------------------------------------------------------

def orbit_report_to_json(r: OrbitReport) -> dict:
    return {
        "n": r.n,
        "q": r.q,
        "class_count": r.class_count,
        "class_sizes": list(r.class_sizes),
        "representatives": [matrix_to_json(M) for M in r.representatives],
    }


def verdict_to_json(v: EllipticVerdict) -> dict:
    return {
        "count": v.count,
        "alpha": v.alpha,
        "deuring": v.deuring,
        "anomalous": v.anomalous,
        "injective": v.injective,
        "surjective": v.surjective,
        "equivalence": v.equivalence,
        "discrepancy": v.discrepancy,
    }


@_parsing
def verdict_from_json(obj) -> EllipticVerdict:
    return EllipticVerdict(*(obj[k] for k in ("count", "alpha", "deuring", "anomalous",
                                              "injective", "surjective", "equivalence")))
