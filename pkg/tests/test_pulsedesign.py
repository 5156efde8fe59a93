import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qcemu import pulsedesign as pd
from qcemu.algorithms import G_MAT
from qcemu.gateset import CNOT_MAT, equal_up_to_phase
from qcemu.hamiltonian import CHLOROFORM_J
from qcemu.propagators import PropagatorConfig
from qcemu.statevector import basis_state, expectation

PI = math.pi

# (tau/2pi, omega, h1x, h2x, phix, h1y, h2y, phiy) as printed at (k, N, M) = (1, 1, 4)
PULSE_TABLE = {
    "X1": (8, 1.00, -0.0312500, -0.0078125, -PI / 2, -0.0312500, -0.0078125, 0),
    "X2": (128, 0.25, -0.0078125, -0.0019531, -PI / 2, -0.0078125, -0.0019531, 0),
    "Y1": (8, 1.00, 0.0312500, 0.0078125, 0, 0.0312500, 0.0078125, PI / 2),
    "Y2": (128, 0.25, 0.0078125, 0.0019531, 0, 0.0078125, 0.0019531, PI / 2),
    "X1'": (8, 1.00, 0.0559593, 0.0139898, -PI / 2, 0.0559593, 0.0139898, 0),
    "X2'": (128, 0.25, 0.0445131, 0.0111283, -PI / 2, 0.0445131, 0.0111283, 0),
    "Y1'": (8, 1.00, -0.0559593, -0.0139898, 0, -0.0559593, -0.0139898, PI / 2),
    "X1''": (8, 1.00, 0.0872093, 0.0218023, -PI / 2, 0.0872093, 0.0218023, 0),
    "X2''": (128, 0.25, 0.0523256, 0.0130914, -PI / 2, 0.0523256, 0.0130914, 0),
}
COLUMNS = ("tau", "omega", "h1x", "h2x", "phix", "h1y", "h2y", "phiy")
# printed 0.0130914 contradicts h2 = gamma h1 = 0.0130814; see test_x2pp_h2_cell_is_inconsistent
MISPRINTED = {("X2''", "h2x"), ("X2''", "h2y")}


def cell_matches(got, printed, digits=7):
    """1e-6 relative, or equal to the printed value after rounding to its digits."""
    if printed == 0:
        return abs(got) < 1e-12
    return abs(got - printed) <= 1e-6 * abs(printed) or round(got, digits) == round(printed, digits)


CELLS = [(n, c) for n in PULSE_TABLE for c in COLUMNS if (n, c) not in MISPRINTED]


@pytest.mark.parametrize("name,col", CELLS)
def test_pulse_table_cell(name, col):
    specs = pd.pulse_specs(pd.TwoPiKParams(1, 1, 4))
    got = specs[name].row()[COLUMNS.index(col)]
    want = PULSE_TABLE[name][COLUMNS.index(col)]
    assert cell_matches(got, want), (got, want)


@pytest.mark.xfail(strict=True, reason="printed h2 of X2'' breaks h2 = gamma h1; generated value is 0.0130814")
def test_x2pp_h2_cell_is_inconsistent():
    spec = pd.pulse_specs(pd.TwoPiKParams(1, 1, 4))["X2''"]
    assert cell_matches(spec.h2x, PULSE_TABLE["X2''"][3])


def test_x2pp_printed_cells_violate_gamma_rule():
    h1, h2 = PULSE_TABLE["X2''"][2:4]
    assert abs(h2 - 0.25 * h1) > 9e-6
    for name, row in PULSE_TABLE.items():
        if name != "X2''":
            assert abs(row[3] - 0.25 * row[2]) < 1e-7


def test_design_pulse_examples():
    p = pd.TwoPiKParams(1, 1, 4)
    s = pd.design_pulse(p, 1, "x", PI / 2)
    assert (s.duration_over_2pi, s.omega) == (8, 1.0)
    assert_allclose((abs(s.h1x), abs(s.h2x)), (0.03125, 0.0078125))
    s = pd.design_pulse(p, 2, "x", PI / 2)
    assert (s.duration_over_2pi, s.omega) == (128, 0.25)
    assert_allclose((abs(s.h1x), abs(s.h2x)), (0.0078125, 0.001953125))
    z = pd.design_pulse(p, 1, "y", 0.0)
    assert z.h1x == z.h2x == z.h1y == z.h2y == 0


@settings(max_examples=50, deadline=None)
@given(k=st.integers(1, 50), N=st.integers(1, 5), dM=st.integers(1, 5), spin=st.sampled_from([1, 2]),
       axis=st.sampled_from("xy"), angle=st.floats(0, 2 * PI))
def test_amplitude_ratio_is_gamma(k, N, dM, spin, axis, angle):
    p = pd.TwoPiKParams(k, N, N + dM)
    s = pd.design_pulse(p, spin, axis, angle)
    assert abs(s.h2x - p.gamma * s.h1x) <= 1e-12 * max(1, abs(s.h1x))
    assert abs(s.h2y - p.gamma * s.h1y) <= 1e-12 * max(1, abs(s.h1y))
    # the resonant spin turns through `angle` in the rotating frame
    h_res = s.h1x if spin == 1 else s.h2x
    assert_allclose(abs(h_res) * 2 * PI * s.duration_over_2pi, angle, atol=1e-9)


def test_params_validation_and_labels():
    for bad in [(0, 1, 4), (1, 4, 4), (1, 5, 4), (1, -1, 4)]:
        with pytest.raises(ValueError):
            pd.TwoPiKParams(*bad)
    p = pd.TwoPiKParams.from_s(64)
    assert (p.k, p.s, p.gamma) == (8, 64, 0.25)
    assert p.separation == 2 * 8 * 1 * 4 * 3
    with pytest.raises(ValueError):
        pd.TwoPiKParams.from_s(12)
    with pytest.raises(ValueError):
        pd.design_pulse(p, 3, "x", 1.0)
    with pytest.raises(ValueError):
        pd.design_pulse(p, 1, "z", 1.0)


def test_pulse_duration_exact():
    p = pd.TwoPiKParams(1, 1, 4)
    assert_allclose(pd.pulse_duration_exact(p, 0.0), 16 * PI / 3)
    assert_allclose(pd.pulse_duration_exact(p, 4 * PI), 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        pd.pulse_duration_exact(p, 4.5 * PI)


def test_condition_residual_shrinks_with_k():
    res = [pd.condition_residual(pd.TwoPiKParams(k, 1, 4), PI / 2) for k in (1, 4, 16, 64)]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-5


def test_interaction_step_duration():
    step = pd.interaction_step()
    assert_allclose(step.duration, 1162790.6977, atol=5e-5)
    assert_allclose(pd.interaction_time() * CHLOROFORM_J, -PI, rtol=1e-15)
    assert step.model.is_diagonal


def test_phase_fix_angles_reduced():
    ang = pd.phase_fix_angles()
    for v in ang.values():
        assert -4 * PI < v <= 0
    # exp(i theta S^z) == exp(-i tau (h1 - h) S^z) modulo 4 pi
    tau, h = pd.interaction_time(), -CHLOROFORM_J / 2
    assert_allclose((ang["1'"] + tau * (1.0 - h)) % (4 * PI), 0, atol=1e-6)


@pytest.mark.parametrize("v", [1, 2, 3])
@pytest.mark.parametrize("s", [8, 64])
def test_cnot_variants_exact_on_ideal_machine(v, s):
    runner = pd.MicroRunner(ideal=True)
    U = runner.sequence_unitary(pd.cnot_variant(v, pd.TwoPiKParams.from_s(s)))
    assert equal_up_to_phase(U, CNOT_MAT, tol=1e-9)
    for col in range(4):
        out = basis_state(2, col)
        runner.run(out, pd.cnot_variant(v, pd.TwoPiKParams.from_s(s)))
        assert_allclose(np.abs(out.amplitudes), np.abs(CNOT_MAT[:, col]), atol=1e-9)


def test_grover_g_step_ideal():
    U = pd.MicroRunner(ideal=True).sequence_unitary(pd.grover_g_step(pd.TwoPiKParams()))
    assert equal_up_to_phase(U, G_MAT, tol=1e-9)
    # G^2 is the parity sign pattern diag(1, -1, -1, 1) up to a global phase
    assert equal_up_to_phase(U @ U, np.diag([1, -1, -1, 1]), tol=1e-9)


def test_grover_strings_ideal():
    runner = pd.MicroRunner(ideal=True)
    for item in range(4):
        out = runner.run(basis_state(2, 0), pd.grover_sequence(item, pd.TwoPiKParams()))
        assert_allclose(abs(out.amplitudes[item]), 1.0, atol=1e-9)
    with pytest.raises(ValueError):
        pd.grover_string(4)
    with pytest.raises(ValueError):
        pd.cnot_variant(4, pd.TwoPiKParams())


def test_sequence_order_is_rightmost_first():
    lib = pd.pulse_library(pd.TwoPiKParams())
    seq = pd.sequence_from_string(pd.CNOT_STRINGS[1], lib)
    assert [m.label for m in seq] == ["Y2", "I'", "Yb2", "X2'", "Yb1", "X1'", "Y1"]


@pytest.mark.slow
def test_spin1_pulse_leaves_spin2_alone():
    p = pd.TwoPiKParams.from_s(64)
    runner = pd.MicroRunner(PropagatorConfig("st4-pair", dt=0.01))
    lib = pd.pulse_library(p)
    for name in ("X1", "Y1", "X1'"):
        for idx in range(4):
            before = expectation(basis_state(2, idx), 2)
            after = expectation(runner.run(basis_state(2, idx), [lib[name]]), 2)
            assert max(abs(a - b) for a, b in zip(before, after)) <= 0.02


@pytest.mark.slow
@pytest.mark.parametrize("spin,angle", [(1, PI / 2), (1, PI), (1, 2 * PI), (2, PI / 2), (2, PI)])
def test_pulse_matches_rotation_at_s64(spin, angle):
    runner = pd.MicroRunner(PropagatorConfig("st4-pair", dt=0.01))
    m = pd.pulse_microinstruction("p", pd.TwoPiKParams.from_s(64), spin, "x", angle)
    U, V = runner.unitary(m), pd.ideal_unitary(m)
    assert abs(np.trace(V.conj().T @ U)) / 4 >= 1 - 1e-4


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="2pi k rule error falls as 1/k^2; a 2pi spin-2 turn needs s near 256 for 1e-4")
def test_large_spin2_rotation_at_s64():
    runner = pd.MicroRunner(PropagatorConfig("st4-pair", dt=0.01))
    m = pd.pulse_microinstruction("p", pd.TwoPiKParams.from_s(64), 2, "x", 2 * PI)
    U, V = runner.unitary(m), pd.ideal_unitary(m)
    assert abs(np.trace(V.conj().T @ U)) / 4 >= 1 - 1e-4
