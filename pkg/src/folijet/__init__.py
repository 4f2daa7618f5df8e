"""Canonical normal-form jets, tangency-curve parametrizations and the
inverse realization solver for plane foliation pairs in blow-up coordinates.

Main entry points:

* :func:`folijet.normalform.compute_normal_form` — canonical coefficients.
* :func:`folijet.tangency.tangency_curves` — branch jets of the curve of
  tangencies.
* :func:`folijet.realize.realize` — recover displacement jets from a curve.
* ``folijet`` CLI — batch front end over JSON files.
"""

__version__ = "0.1.0"

from .models import (  # noqa: F401
    BackgroundData,
    FoliationPairData,
    SingularModel,
    TangencyModel,
)
from .normalform import NormalFormTable, compute_normal_form  # noqa: F401
from .realize import (  # noqa: F401
    GenericityCertificate,
    RealizationResult,
    check_genericity,
    realize,
    shift_quadratics,
)
from .series import XJet, compose, revert  # noqa: F401
from .tangency import BranchJet, TangencyCurveJets, tangency_curves  # noqa: F401
from .tolerance import DEFAULT_TOL, ToleranceConfig  # noqa: F401
from .ufunc import LaurentJet, MarkedPoints, PoleSum  # noqa: F401
