"""Galerkin simulator for a viscoelastic Kirchhoff beam with delayed feedback."""

from ._core import (
    KirchdelayError,
    characteristic_roots,
    fit_decay,
    mode_matrices,
    run,
    validate,
    xi_window,
)

__all__ = [
    "KirchdelayError",
    "characteristic_roots",
    "fit_decay",
    "mode_matrices",
    "run",
    "validate",
    "xi_window",
]
