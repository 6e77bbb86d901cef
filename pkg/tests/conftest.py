import numpy as np
import pytest

from curvlab.models import METRIC_KEYS, STANDARD_J, builtin_model


def model_ini(name, metric, J=None, lower="0 0 0 0", upper="1 1 1 1", periodic=None, extra=""):
    """INI text for a user model; ``metric`` maps a subset of g-keys (others default to 0/1 on the diagonal)."""
    J = dict(STANDARD_J if J is None else J)
    g = {k: ("1" if k[1] == k[2] else "0") for k in METRIC_KEYS}
    g.update(metric)
    lines = ["[model]", f"name = {name}"]
    lines += [extra] if extra else []
    lines += ["", "[domain]", f"lower = {lower}", f"upper = {upper}"]
    if periodic:
        lines.append(f"periodic = {periodic}")
    lines += ["", "[metric]"] + [f"{k} = {v}" for k, v in g.items()]
    lines += ["", "[complex_structure]"] + [f"{k} = {v}" for k, v in J.items()]
    return "\n".join(lines) + "\n"


@pytest.fixture
def write_model(tmp_path):
    def write(*args, **kwargs):
        path = tmp_path / f"{args[0]}.ini"
        path.write_text(model_ini(*args, **kwargs))
        return path

    return write


@pytest.fixture(scope="session")
def models():
    return {name: builtin_model(name) for name in ("torus", "cp2", "ball", "kt", "s2xs2")}


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
