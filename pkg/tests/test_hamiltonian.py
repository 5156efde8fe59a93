import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qcemu import hamiltonian as hm
from qcemu.hamiltonian import FieldTerm, SpinModel
from qcemu.statevector import StateVector, basis_state, expectation

from conftest import dense_hamiltonian, random_state


def random_model(L, rng, time_dependent=False):
    cpl = {}
    for j in range(1, L + 1):
        for k in range(j + 1, L + 1):
            for a in "xyz":
                if rng.random() < 0.6:
                    cpl[(j, k, a)] = rng.normal()
    fld = {}
    for j in range(1, L + 1):
        for a in "xyz":
            if time_dependent:
                fld[(j, a)] = FieldTerm(rng.normal(), rng.normal(), rng.uniform(0, 3), rng.uniform(0, 6))
            else:
                fld[(j, a)] = rng.normal()
    return SpinModel.make(L, cpl, fld)


def test_single_spin_eigenstate():
    m = SpinModel.make(1, {}, {(1, "z"): 1.0})
    assert_allclose(hm.apply_h(basis_state(1, 0), m).amplitudes, [-0.5, 0])


def test_chloroform_on_00():
    m = hm.build_chloroform()
    out = hm.apply_h(basis_state(2, 0), m).amplitudes
    assert_allclose(out, [0.1075e-6 - 0.625, 0, 0, 0], rtol=0, atol=1e-16)
    assert m.coupling_map == {(1, 2, "z"): -0.43e-6}
    assert m.field_map[(1, "z")].static == 1.0
    assert m.field_map[(2, "z")].static == 0.25


def test_norm_bound_examples():
    assert_allclose(hm.norm_bound(hm.build_chloroform()), 0.6250001075, rtol=1e-15)
    assert hm.norm_bound(SpinModel.make(3)) == 0.0


@pytest.mark.parametrize("L", [1, 2, 3, 4])
@pytest.mark.parametrize("td", [False, True])
def test_apply_h_matches_dense_oracle(L, td):
    rng = np.random.default_rng(10 * L + td)
    m = random_model(L, rng, td)
    psi = random_state(L, rng)
    for t in (0.0, 0.7, 3.1):
        got = hm.apply_h(StateVector(L, psi), m, t).amplitudes
        assert_allclose(got, dense_hamiltonian(m, t) @ psi, atol=1e-12)
        assert_allclose(hm.dense_matrix(m, t), dense_hamiltonian(m, t), atol=1e-12)


def test_apply_h_leaves_input_alone():
    rng = np.random.default_rng(2)
    psi = StateVector(3, random_state(3, rng))
    before = psi.amplitudes.copy()
    hm.apply_h(psi, random_model(3, rng))
    assert_allclose(psi.amplitudes, before)


def test_apply_h_size_mismatch():
    with pytest.raises(ValueError):
        hm.apply_h(basis_state(2, 0), SpinModel.make(3))


@settings(max_examples=40, deadline=None)
@given(L=st.integers(1, 5), seed=st.integers(0, 2 ** 32 - 1))
def test_hermitian_and_bounded(L, seed):
    rng = np.random.default_rng(seed)
    m = random_model(L, rng, time_dependent=True)
    t = rng.uniform(0, 10)
    psi, phi = random_state(L, rng), random_state(L, rng)
    a = np.vdot(psi, hm.apply_h_raw(phi, m, t))
    b = np.vdot(phi, hm.apply_h_raw(psi, m, t))
    assert abs(a - np.conj(b)) < 1e-12
    ev = np.linalg.eigvalsh(hm.dense_matrix(m, t))
    assert np.abs(ev).max() <= hm.norm_bound(m) + 1e-12


def test_static_model_is_time_independent():
    rng = np.random.default_rng(4)
    m = random_model(3, rng)
    psi = random_state(3, rng)
    assert m.is_static
    assert_allclose(hm.apply_h_raw(psi, m, 0.0), hm.apply_h_raw(psi, m, 123.4), atol=0)


def test_field_term_value():
    f = FieldTerm(0.5, 2.0, 3.0, 0.25)
    assert_allclose(f.value(1.3), 0.5 + 2.0 * np.sin(3.0 * 1.3 + 0.25))
    assert_allclose(f.frequency, 3.0 / (2 * np.pi))
    assert f.bound() == 2.5


def test_model_validation():
    with pytest.raises(ValueError):
        SpinModel.make(2, {(1, 1, "z"): 1.0})
    with pytest.raises(ValueError):
        SpinModel.make(2, {(1, 3, "z"): 1.0})
    with pytest.raises(ValueError):
        SpinModel.make(2, {(1, 2, "w"): 1.0})
    with pytest.raises(ValueError):
        SpinModel.make(2, {}, {(1, "z"): float("nan")})
    with pytest.raises(ValueError):
        hm.Microinstruction("bad", 0.0, SpinModel.make(1))
    # canonical ordering and hashability
    a = SpinModel.make(2, {(2, 1, "x"): 1.0})
    b = SpinModel.make(2, {(1, 2, "x"): 1.0})
    assert a == b and hash(a) == hash(b)


def test_build_ising_empty_is_zero():
    m = hm.build_ising(3)
    assert_allclose(hm.dense_matrix(m), 0)


def test_spin_bath_couplings():
    m = hm.build_spin_bath(24, 8.0, 0.4, seed=3)
    cm = m.coupling_map
    for a in "xyz":
        assert cm[(1, 2, a)] == -16.0
    Jn = hm.bath_couplings(24, 8.0, 0.4, seed=3)
    assert np.all((Jn > 0) & (Jn < 0.4))
    for n in range(3, 25):
        for a in "xyz":
            assert cm[(1, n, a)] == cm[(2, n, a)] == -Jn[n - 3]
    assert not any(j > 2 for (j, k, a) in cm)


def test_spin_bath_matches_heisenberg_form():
    # J0 (S1+S2)^2 + sum Jn In.(S1+S2) minus the constant 3 J0 / 2
    L, J0 = 4, 8.0
    m = hm.build_spin_bath(L, J0, 0.4, seed=1)
    Jn = hm.bath_couplings(L, J0, 0.4, seed=1)
    from conftest import SPIN, embed
    S = lambda j, a: embed({j: SPIN[a]}, L)
    tot = [S(1, a) + S(2, a) for a in "xyz"]
    H = J0 * sum(T @ T for T in tot) - 1.5 * J0 * np.eye(1 << L)
    for n in range(3, L + 1):
        H += Jn[n - 3] * sum(S(n, a) @ T for a, T in zip("xyz", tot))
    assert_allclose(hm.dense_matrix(m), H, atol=1e-12)


def test_random_bath_state():
    a = hm.random_bath_state(8, seed=5)
    b = hm.random_bath_state(8, seed=5)
    assert_allclose(a.amplitudes, b.amplitudes)
    assert abs(np.linalg.norm(a.amplitudes) - 1) < 1e-12
    assert_allclose(expectation(a, 1).qz, 0.0, atol=1e-12)   # <S1z> = +1/2
    assert_allclose(expectation(a, 2).qz, 1.0, atol=1e-12)   # <S2z> = -1/2
    with pytest.raises(ValueError):
        hm.random_bath_state(2)


def test_quantum_dot_and_josephson():
    m = hm.build_quantum_dot(4, 1.5, hx=[0.1, 0.2, 0.3, 0.4], P=[1, 0, 0, 1])
    cm = m.coupling_map
    assert cm[(1, 2, "z")] == 1.5 and cm[(2, 3, "z")] == 3.0 and cm[(3, 4, "z")] == 1.5
    assert m.field_map[(1, "z")].static == -1.5
    assert (2, "z") not in m.field_map
    j = hm.build_josephson(3, 0.7, EI=0.2, hz=[0.0, 1.0, 0.0])
    assert j.coupling_map == {(1, 2, "y"): 0.4, (2, 3, "y"): 0.4}
    assert j.field_map[(2, "x")].static == 0.7
    with pytest.raises(ValueError):
        hm.build_quantum_dot(1, 1.0)
    segs = hm.schedule(lambda **kw: hm.build_quantum_dot(2, **kw), [(0.5, {"E0": 1.0}), (0.25, {"E0": 2.0})])
    assert [s.duration for s in segs] == [0.5, 0.25]


def test_product_state_order():
    psi = hm.product_state([[0, 1], [1, 0]])   # qubit 1 = |1>, qubit 2 = |0>
    assert_allclose(psi.amplitudes, [0, 1, 0, 0])


def test_pair_factorization_reproduces_full_evolution():
    from qcemu import propagators as pr
    L, J0 = 7, 8.0
    m = hm.build_spin_bath(L, J0, seed=2)
    psi = hm.random_bath_state(L, seed=2).amplitudes
    rest = hm.without_pair_coupling(m)
    assert (1, 2, "z") not in rest.coupling_map and len(rest.couplings) == len(m.couplings) - 3
    sign = 0.5 - (np.arange(1 << L) & 1)
    for t in (0.0, 0.37, 1.3, 2.9):
        full = pr.kernel_chebyshev(psi, m, 0.0, t) if t else psi
        slow = pr.kernel_chebyshev(psi, rest, 0.0, t) if t else psi
        mz, c = hm.pair_magnetization_terms(slow)
        assert_allclose(mz + 2 * np.real(np.exp(2j * J0 * t) * c), np.sum(sign * np.abs(full) ** 2), atol=1e-12)
