import math

import numpy as np
import pytest

from quadspec import (
    CoefficientSpec,
    DirichletPencilConfig,
    PeriodicPencilConfig,
    assemble_dirichlet_pencil,
    assemble_periodic_pencil,
    make_grid,
)
from quadspec.operators import SparseOperator
from quadspec.pencil import QuadraticPencil


def dirichlet_pencil(n, c=1.0, dim=2, extent=1.0):
    g = make_grid(dim, "dirichlet-box", extent, n)
    return assemble_dirichlet_pencil(DirichletPencilConfig(g, c))


def periodic_pencil(n, coeffs, dim=2, extent=2 * math.pi, origin=None):
    g = make_grid(dim, "periodic-torus", extent, n, origin=origin)
    specs = []
    for c in coeffs:
        if isinstance(c, str):
            c = CoefficientSpec.parse(c)
        specs.append(c if isinstance(c, CoefficientSpec) else CoefficientSpec.constant(c))
    return assemble_periodic_pencil(PeriodicPencilConfig(g, specs))


def scalar_pencil(h0, h1):
    return QuadraticPencil(SparseOperator(np.array([[h0]], dtype=float)),
                           SparseOperator(np.array([[h1]], dtype=float)), label="scalar")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# -- acceptance report ---------------------------------------------------------

_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    detail = dict(report.user_properties).get("detail", "")
    _ACCEPTANCE.setdefault(number, []).append((report.passed, report.nodeid.split("::")[-1], detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        runs = _ACCEPTANCE[number]
        ok = all(passed for passed, _, _ in runs)
        details = "; ".join(d for _, _, d in runs if d)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {details}")
