import numpy as np
import pytest

from fpt.config import ExpressionSpec, PiecewiseSpec, load_config, parse_config
from fpt.errors import ConfigError, ConstraintViolation, ExpressionSyntaxError, MissingField, TypeMismatch, UnknownField

MINIMAL = """
[drift]
slopes = 0
intercepts = 0
[query]
x0 = 0
barrier = 1
"""


def test_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert isinstance(cfg.drift, PiecewiseSpec)
    assert cfg.inversion.method == "euler_summation" and cfg.inversion.terms == 32
    assert cfg.t_max == 2.0 and cfg.steps == 50
    assert cfg.mc is None
    np.testing.assert_allclose(cfg.time_grid()[[0, -1]], [0.04, 2.0])
    assert cfg.piecewise()(3.0) == 0.0


def test_expression_form():
    cfg = parse_config("""
[drift]
expression = -tanh(x)   # restoring
resolution = 8
[query]
x0 = -0.5
barrier = 1
[grid]
times = 0.5, 1, 2
[mc]
n_paths = 500
seed = 7
bridge_correction = off
""")
    assert isinstance(cfg.drift, ExpressionSpec)
    assert cfg.domain() == (-8.5, 9.0)
    assert len(cfg.piecewise().breakpoints) == 8 * 17.5 + 1
    assert len(cfg.piecewise(2).breakpoints) == 2 * 17.5 + 1
    assert cfg.time_grid().tolist() == [0.5, 1.0, 2.0]
    assert cfg.mc.horizon == 2.0 and not cfg.mc.bridge_correction and cfg.mc.seed == 7
    assert cfg.simulation_drift()(0.3) == pytest.approx(-np.tanh(0.3))
    fn = cfg.drift_function()
    assert fn.m1 == pytest.approx(1.1, rel=1e-3) and fn.m2 == pytest.approx(1.1, rel=1e-3)


@pytest.mark.parametrize("text,error", [
    (MINIMAL.replace("x0 = 0", "x0 = 2"), ConstraintViolation),
    (MINIMAL + "expression = x\n", UnknownField),  # lands in [query]
    (MINIMAL.replace("[drift]", "[drift]\nexpression = x"), ConstraintViolation),
    (MINIMAL + "[extra]\n", UnknownField),
    (MINIMAL.replace("barrier = 1", ""), MissingField),
    (MINIMAL.replace("x0 = 0", "x0 = zero"), TypeMismatch),
    (MINIMAL.replace("intercepts = 0", ""), MissingField),
    (MINIMAL.replace("slopes = 0", "slopes = 1"), ConstraintViolation),
    (MINIMAL + "[grid]\nt_max = -1\n", ConstraintViolation),
    (MINIMAL + "[grid]\nsteps = 0\n", ConstraintViolation),
    (MINIMAL + "[grid]\ntimes = 1, 0.5\n", ConstraintViolation),
    (MINIMAL + "[grid]\ntimes = 1\nsteps = 3\n", ConstraintViolation),
    (MINIMAL + "[inversion]\nmethod = talbot\n", ConstraintViolation),
    (MINIMAL + "[inversion]\nterms = 8\n", ConstraintViolation),
    (MINIMAL + "[mc]\nn_paths = 50\n", ConstraintViolation),
    (MINIMAL + "[mc]\nbridge_correction = maybe\n", TypeMismatch),
    ("[query]\nx0 = 0\nbarrier = 1\n", MissingField),
    ("[drift]\nexpression = 2 *\n[query]\nx0 = 0\nbarrier = 1\n", ExpressionSyntaxError),
    ("not an ini file", TypeMismatch),
])
def test_rejections(text, error):
    with pytest.raises(error):
        parse_config(text)


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MINIMAL)
    assert load_config(path).barrier == 1.0
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
