"""Prime-universal diagonal quadratic forms: representation sieves, local
representation, good-vector transfers, covering-congruence checks and escalation."""

__version__ = "0.1.0"

from .forms import DiagonalForm, GramForm, parse_form  # noqa: F401
