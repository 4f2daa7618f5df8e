"""JSON serialization and validation of the external file formats.

Complex numbers are [re, im] pairs, series are coefficient arrays starting
at x^1, holomorphic u-jets are Taylor coefficient arrays starting at the
constant term, and rational functions are {poly, poles, principal} triples.
Validation reports the JSON path of the first offending element.
"""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np

from .models import BackgroundData, FoliationPairData, SingularModel, TangencyModel
from .normalform import NormalFormTable
from .series import XJet
from .tangency import BranchJet, TangencyCurveJets
from .ufunc import LaurentJet, MarkedPoints, PoleSum


class SchemaError(ValueError):
    """Input failed validation; ``path`` locates the first offending element."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# ---------------------------------------------------------------------------
# primitive readers

def _complex(obj: Any, path: str) -> complex:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        raise SchemaError(path, "expected a [re, im] number pair")
    z = complex(obj[0], obj[1])
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise SchemaError(path, "number must be finite")
    return z


def _complex_list(obj: Any, path: str) -> list:
    if not isinstance(obj, list):
        raise SchemaError(path, "expected an array of [re, im] pairs")
    return [_complex(c, f"{path}[{i}]") for i, c in enumerate(obj)]


def _require(obj: dict, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return obj[key]


def _as_pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _pairs(values) -> list:
    return [_as_pair(complex(c)) for c in values]


# ---------------------------------------------------------------------------
# foliation pair data

def foliation_pair_to_json(fp: FoliationPairData) -> dict:
    return {
        "k0": fp.k0,
        "points": {"p": _pairs(fp.points.p), "q": _pairs(fp.points.q)},
        "singular": [
            {"lambda": _as_pair(sm.lam), "s": _pairs(sm.s_jet.coeffs[1:])}
            for sm in fp.singular
        ],
        "tangency": [
            {"involution": _pairs(tm.involution_jet.coeffs[1:]),
             "z": _pairs(tm.z_jet.coeffs[1:])}
            for tm in fp.tangency
        ],
        "background": {
            "eps": [[_taylor_pairs(j) for j in rows] for rows in fp.background.eps],
            "sig": [[_taylor_pairs(j) for j in rows] for rows in fp.background.sig],
        },
    }


def _taylor_pairs(jet: LaurentJet) -> list:
    # background jets are holomorphic; serialize from the constant term up
    return _pairs([jet.coefficient(e) for e in range(0, max(jet.max_exp, 0) + 1)])


def _jet_rows(obj: Any, centers: Sequence[complex], k0: int, path: str) -> list:
    if not isinstance(obj, list) or len(obj) != len(centers):
        raise SchemaError(path, f"expected one entry per marked point ({len(centers)})")
    out = []
    for i, rows in enumerate(obj):
        if not isinstance(rows, list) or len(rows) < k0:
            raise SchemaError(f"{path}[{i}]", f"expected at least {k0} coefficient rows")
        jets = []
        for r, row in enumerate(rows):
            coeffs = _complex_list(row, f"{path}[{i}][{r}]")
            if not coeffs:
                coeffs = [0j]
            jets.append(LaurentJet(centers[i], 0, coeffs, exact_tail=True))
        out.append(jets)
    return out


def foliation_pair_from_json(obj: Any, path: str = "$",
                             displacements_required: bool = True) -> FoliationPairData:
    pts_obj = _require(obj, "points", path)
    p = _complex_list(_require(pts_obj, "p", f"{path}.points"), f"{path}.points.p")
    q = _complex_list(pts_obj.get("q", []), f"{path}.points.q")
    if not p:
        raise SchemaError(f"{path}.points.p", "need at least one singular location")
    try:
        points = MarkedPoints(p, q)
    except ValueError as exc:
        raise SchemaError(f"{path}.points", str(exc)) from None
    k0 = _require(obj, "k0", path)
    if not isinstance(k0, int) or k0 < 1:
        raise SchemaError(f"{path}.k0", "expected an integer >= 1")

    sing_obj = _require(obj, "singular", path)
    if not isinstance(sing_obj, list) or len(sing_obj) != len(p):
        raise SchemaError(f"{path}.singular", f"expected {len(p)} entries")
    singular = []
    for i, entry in enumerate(sing_obj):
        epath = f"{path}.singular[{i}]"
        lam = _complex(_require(entry, "lambda", epath), f"{epath}.lambda")
        if displacements_required or "s" in entry:
            s = _complex_list(_require(entry, "s", epath), f"{epath}.s")
        else:
            s = [0j] * k0
        if len(s) < k0:
            s = s + [0j] * (k0 - len(s))
        try:
            singular.append(SingularModel(i, p[i], lam, XJet([0j] + s)))
        except ValueError as exc:
            raise SchemaError(epath, str(exc)) from None

    tang_obj = obj.get("tangency", [])
    if not isinstance(tang_obj, list) or len(tang_obj) != len(q):
        raise SchemaError(f"{path}.tangency", f"expected {len(q)} entries")
    tangency = []
    for j, entry in enumerate(tang_obj):
        epath = f"{path}.tangency[{j}]"
        if displacements_required or "z" in entry:
            z = _complex_list(_require(entry, "z", epath), f"{epath}.z")
        else:
            z = [1.0 + 0j] + [0j] * (k0 - 1)
        if len(z) < k0:
            z = z + [0j] * (k0 - len(z))
        try:
            if "involution" in entry:
                iota = _complex_list(entry["involution"], f"{epath}.involution")
                tangency.append(TangencyModel(j, q[j], XJet([0j] + iota), XJet([0j] + z)))
            elif "g" in entry:
                g = _complex_list(entry["g"], f"{epath}.g")
                tangency.append(TangencyModel.from_g(j, q[j], g, XJet([0j] + z)))
            else:
                raise SchemaError(epath, "need either 'involution' or 'g'")
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(epath, str(exc)) from None

    background = None
    if obj.get("background") is not None:
        bpath = f"{path}.background"
        bobj = obj["background"]
        eps = _jet_rows(_require(bobj, "eps", bpath), p, k0, f"{bpath}.eps")
        sig = _jet_rows(_require(bobj, "sig", bpath), q, k0, f"{bpath}.sig")
        try:
            background = BackgroundData(eps, sig)
        except ValueError as exc:
            raise SchemaError(bpath, str(exc)) from None
    try:
        return FoliationPairData(points, singular, tangency, background, k0)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# curves

def curve_to_json(curve: TangencyCurveJets) -> dict:
    def branch(b: BranchJet) -> dict:
        return {"anchor": _as_pair(b.anchor), "coeffs": _pairs(b.coeffs)}

    return {
        "branches_p": [branch(b) for b in curve.branches_p],
        "branches_q": [branch(b) for b in curve.branches_q],
    }


def curve_from_json(obj: Any, path: str = "$") -> TangencyCurveJets:
    def branches(key: str) -> tuple:
        arr = _require(obj, key, path)
        if not isinstance(arr, list):
            raise SchemaError(f"{path}.{key}", "expected an array of branches")
        out = []
        for i, b in enumerate(arr):
            bpath = f"{path}.{key}[{i}]"
            anchor = _complex(_require(b, "anchor", bpath), f"{bpath}.anchor")
            coeffs = _complex_list(_require(b, "coeffs", bpath), f"{bpath}.coeffs")
            if not coeffs:
                raise SchemaError(f"{bpath}.coeffs", "need at least the first coefficient")
            out.append(BranchJet(anchor, coeffs))
        return tuple(out)

    return TangencyCurveJets(branches("branches_p"), branches("branches_q"))


# ---------------------------------------------------------------------------
# normal-form table

def _laurent_to_json(jet: LaurentJet) -> dict:
    return {"center": _as_pair(jet.center), "min_exp": jet.min_exp,
            "coeffs": _pairs(jet.coeffs)}


def _polesum_to_json(ps: PoleSum) -> dict:
    return {"poly": _pairs(ps.poly), "poles": _pairs(ps.poles),
            "principal": [_pairs(pc) for pc in ps.principal]}


def table_to_json(table: NormalFormTable) -> dict:
    return {
        "k0": table.k0,
        "a_global": [_polesum_to_json(ps) for ps in table.a_global],
        "b_global": [_polesum_to_json(ps) for ps in table.b_global],
        "a_sing": [[_laurent_to_json(j) for j in col] for col in table.a_sing],
        "b_sing": [[_laurent_to_json(j) for j in col] for col in table.b_sing],
        "a_tang": [[_laurent_to_json(j) for j in col] for col in table.a_tang],
        "b_tang": [[_laurent_to_json(j) for j in col] for col in table.b_tang],
    }


# ---------------------------------------------------------------------------
# realization inputs/outputs

def realize_input_from_json(obj: Any, path: str = "$"):
    fp = foliation_pair_from_json(_require(obj, "template", path), f"{path}.template",
                                  displacements_required=False)
    curve = curve_from_json(_require(obj, "curve", path), f"{path}.curve")
    correction = None
    if obj.get("correction") is not None:
        correction = _complex_list(obj["correction"], f"{path}.correction")
        if len(correction) != 4:
            raise SchemaError(f"{path}.correction", "expected exactly 4 coefficients")
    return fp, curve, correction


def certificate_to_json(cert) -> dict:
    return {
        "k0": cert.k0,
        "verdict": cert.verdict,
        "failing": list(cert.failing),
        "lambda_factors": [{"name": n, "value": _as_pair(v)} for n, v in cert.lambda_factors],
        "det_A": _pairs(cert.det_A),
        "det_A_tilde": _pairs(cert.det_A_tilde),
        "cond_A": [float(c) for c in cert.cond_A],
        "block_dets": [{"name": n, "value": _as_pair(v)} for n, v in cert.block_dets],
        "block_route_trivial": cert.block_route_trivial,
        "rank_margins": [float(x) for x in cert.rank_margins],
        "surjectivity_routes_disagree": cert.surjectivity_routes_disagree,
        "curve_quadratics": _pairs(cert.curve_quadratics),
    }


def realization_to_json(res) -> dict:
    return {
        "s": [_pairs(jet.coeffs[1:]) for jet in res.s_jets],
        "z": [_pairs(jet.coeffs[1:]) for jet in res.z_jets],
        "residual": float(res.residual),
        "correction_used": _pairs(res.correction_used),
        "certificate": certificate_to_json(res.certificate),
        "curve": curve_to_json(res.curve),
    }


def curve_to_csv(curve: TangencyCurveJets) -> str:
    lines = ["branch,kind,anchor_re,anchor_im,k,coeff_re,coeff_im"]
    for kind, branches in (("p", curve.branches_p), ("q", curve.branches_q)):
        for idx, b in enumerate(branches):
            for k, c in enumerate(b.coeffs, start=1):
                lines.append(
                    f"{idx},{kind},{b.anchor.real!r},{b.anchor.imag!r},{k},{c.real!r},{c.imag!r}"
                )
    return "\n".join(lines) + "\n"
