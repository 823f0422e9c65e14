"""Critical values of twisted modular L-functions over the false Tate tower
at p = 3, their p-adic normalizations, and the congruences between them."""

__version__ = "0.1.0"

from .qseries import Form, PowerSeries, build_form, eisenstein, e2star  # noqa: F401
