import numpy as np
import pytest

from ctsid import LtiSystem, check_nonpathological, aircraft


@pytest.fixture(scope="session")
def aircraft_system():
    return aircraft.system()


@pytest.fixture(scope="session")
def aircraft_input():
    return aircraft.reference_input()


def controllability_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def random_controllable_system(
    rng: np.random.Generator,
    n: int,
    m: int,
    T: float = 0.1,
    scale: float = 2.0,
) -> LtiSystem:
    """Random (A, B, x0) with entries in [-scale, scale], controllable and
    with a non-pathological sampling time T; redraws until both hold."""
    while True:
        a = rng.uniform(-scale, scale, size=(n, n))
        b = rng.uniform(-scale, scale, size=(n, m))
        x0 = rng.uniform(-scale, scale, size=n)
        ctrb = controllability_matrix(a, b)
        if np.linalg.matrix_rank(ctrb) < n:
            continue
        sys_ = LtiSystem(a=a, b=b, x0=x0)
        ok, _ = check_nonpathological(sys_, T)
        if ok:
            return sys_
