import pytest

from goalreach.robustness import BASE


@pytest.fixture(scope="session")
def base():
    return BASE


@pytest.fixture(scope="session")
def problem_at():
    cache = {}

    def make(xi=17.0, **kw):
        key = (xi, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = BASE.problem(xi=xi, **kw)
        return cache[key]

    return make
