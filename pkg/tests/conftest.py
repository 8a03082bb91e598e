import itertools
import math

import numpy as np
import pytest

from chaos_bounds.form_core import SymmetricMultilinearForm, expand


def random_form(rng, k_values=(1, 2, 3), n_max=8, coeff=3):
    """Integer-coefficient form with every sorted key drawn from [-coeff, coeff]."""
    while True:
        k = int(rng.choice(k_values))
        n = int(rng.integers(k, n_max + 1))
        coeffs = {
            key: int(rng.integers(-coeff, coeff + 1))
            for key in itertools.combinations(range(1, n + 1), k)
        }
        form = SymmetricMultilinearForm(k, n, coeffs)
        if form.coeffs:
            return form


def brute_force_values(form):
    """Z at every sign vector, summing over ordered tuples directly."""
    full = expand(form)
    out = []
    for signs in itertools.product((1, -1), repeat=form.n):
        out.append(sum(v * math.prod(signs[j - 1] for j in key) for key, v in full.items()))
    return out


def brute_force_moment(form, order):
    vals = brute_force_values(form)
    return sum(v**order for v in vals) / len(vals)


@pytest.fixture
def all_pairs3():
    return SymmetricMultilinearForm(2, 3, {(1, 2): 1, (1, 3): 1, (2, 3): 1})


@pytest.fixture
def pair2():
    return SymmetricMultilinearForm(2, 2, {(1, 2): 1})


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion, printed at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, passed, detail):
        lines[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(lines[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
