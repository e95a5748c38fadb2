"""Cech cohomology, the plus construction and sheaf-condition checks for
presheaves of rational vector spaces on finite poset sites."""

__version__ = "0.1.0"

from .cech import (cochain_complex, coboundary, cohomology, cohomology_at_cover, cohomology_report,
                   h0_presheaf, h_minus1_presheaf, hn_presheaf)
from .classify import Verdict, classify, xi
from .errors import (BudgetExceeded, FunctorialityError, InconsistentDiagramError, InvalidSiteError,
                     NaturalityError, PreconditionError, PresheafCechError, WellDefinednessError)
from .linalg import BACKEND, Matrix
from .plus import plus, sheafify
from .presheaf import (NatTransformation, Presheaf, SetPresheaf, abelianize, constant_presheaf,
                       is_flasque, validate_presheaf, zero_presheaf)
from .site import Cover, FinitePosetSite, validate_site
