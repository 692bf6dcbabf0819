import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from fiberent.errors import DomainError, ShapeError
from fiberent.hilbert import build_basis, excitation_operator
from fiberent.model import (
    AUTO_T4,
    LINDBLAD_LABELS,
    SystemParams,
    driveless_hamiltonian,
    hamiltonian,
    laser_term,
    lindblad_set,
    microwave_term,
    resonance_detuning,
    validate_short_fiber,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def mp_resonance(g, nu):
    mpmath.mp.dps = 50
    g, nu = mpmath.mpf(g), mpmath.mpf(nu)
    g1sq = g**2 + 2 * nu**2
    g3sq = mpmath.sqrt(g**4 + 4 * nu**4)
    return -mpmath.sqrt(g1sq + g3sq) / mpmath.sqrt(2)


def test_resonance_detuning_is_minus_golden_ratio_at_unit_couplings():
    assert resonance_detuning(1.0, 1.0) == pytest.approx(-GOLDEN, abs=1e-12)
    assert resonance_detuning(1.0, 1.0) == pytest.approx(-math.sqrt((3 + math.sqrt(5)) / 2), abs=1e-15)


def test_resonance_detuning_single_cavity_limit():
    assert resonance_detuning(1.0, 1e-9) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("g, nu", [(1.0, 0.9), (1.0, 0.5), (2.0, 0.3), (0.7, 1.4)])
def test_resonance_detuning_matches_high_precision(g, nu):
    assert resonance_detuning(g, nu) == pytest.approx(float(mp_resonance(g, nu)), abs=1e-12)


@pytest.mark.parametrize("g, nu", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_resonance_detuning_domain(g, nu):
    with pytest.raises(DomainError):
        resonance_detuning(g, nu)


def test_params_validation():
    with pytest.raises(DomainError):
        SystemParams(beta=-0.1)
    with pytest.raises(DomainError):
        SystemParams(g=0.0)
    with pytest.raises(DomainError):
        SystemParams(delta="resonant")
    assert SystemParams(delta=0.3).resolved_delta == 0.3
    assert SystemParams(nu=1.0, delta=AUTO_T4).resolved_delta == pytest.approx(-GOLDEN)


@pytest.fixture
def generic():
    return SystemParams(g=0.7, nu=0.45, omega=0.013, omega_mw=0.0031, delta=-0.37)


def element(basis, h, bra, ket):
    return basis.ket(*bra).conj() @ h.matrix @ basis.ket(*ket)


def test_hamiltonian_matrix_elements(basis, generic):
    h = hamiltonian(basis, generic)
    assert element(basis, h, ("e1", "000"), ("11", "100")) == pytest.approx(generic.g)
    assert element(basis, h, ("1e", "000"), ("11", "001")) == pytest.approx(generic.g)
    assert element(basis, h, ("00", "100"), ("00", "010")) == pytest.approx(generic.nu)
    assert element(basis, h, ("00", "001"), ("00", "010")) == pytest.approx(generic.nu)
    assert element(basis, h, ("00", "000"), ("e0", "000")) == pytest.approx(generic.omega)
    assert element(basis, h, ("00", "000"), ("0e", "000")) == pytest.approx(generic.omega)
    assert element(basis, h, ("00", "000"), ("10", "000")) == pytest.approx(generic.omega_mw)
    assert element(basis, h, ("00", "000"), ("01", "000")) == pytest.approx(-generic.omega_mw)
    # cavity A does not talk to atom B
    assert element(basis, h, ("1e", "000"), ("11", "100")) == 0


def test_hamiltonian_diagonal(basis, generic):
    d = np.diag(hamiltonian(basis, generic).matrix).real
    exc = np.array([s.excitation for s in basis.states])
    np.testing.assert_array_equal(d[exc == 0], 0.0)
    np.testing.assert_allclose(d[exc == 1], generic.delta)


def _frame_phases():
    """Symbolic rotating-frame check.

    For every basis state compute the lab energy and the frame generator.
    The rotating-frame diagonal is their difference; a coupling is static
    when the frame phase cancels the explicit drive phase.
    """
    w1, we, w, = sp.symbols("omega_1 omega_e omega", real=True)
    wmw = w1
    wcav = we - w1
    level_energy = {"0": 0, "1": w1, "e": we}
    level_frame = {"0": 0, "1": wmw, "e": w}

    def lab(atoms, photons):
        return sum(level_energy[c] for c in atoms) + wcav * sum(int(c) for c in photons)

    def frame(atoms, photons):
        return sum(level_frame[c] for c in atoms) + (w - wmw) * sum(int(c) for c in photons)

    return w1, we, w, lab, frame


def test_rotating_frame_diagonal_is_detuning_times_excitation(basis):
    w1, we, w, lab, frame = _frame_phases()
    for s in basis.states:
        atoms = s.qA.symbol + s.qB.symbol
        photons = f"{s.nA}{s.nF}{s.nB}"
        assert sp.simplify(lab(atoms, photons) - frame(atoms, photons) - (we - w) * s.excitation) == 0


def test_rotating_frame_removes_drive_phases():
    w1, we, w, lab, frame = _frame_phases()
    # (final state, initial state, explicit frequency of the term)
    terms = [
        (("11", "100"), ("e1", "000"), 0),       # g |1><e| a^dag
        (("00", "010"), ("00", "100"), 0),       # nu b^dag a_A
        (("00", "000"), ("e0", "000"), w),       # Omega e^{i w t} |0><e|
        (("01", "000"), ("e1", "000"), w),
        (("00", "000"), ("10", "000"), w1),      # Omega_MW e^{i w_MW t} |0><1|
        (("00", "100"), ("10", "100"), w1),
    ]
    for final, initial, freq in terms:
        # interaction picture factor exp(i (F_final - F_initial) t) times exp(i freq t)
        assert sp.simplify(frame(*final) - frame(*initial) + freq) == 0
        # and the lab-frame term is then static with the rotating-frame energies
        assert sp.simplify((lab(*final) - frame(*final)) - (lab(*initial) - frame(*initial))
                           - (we - w) * (final[0].count("e") + sum(map(int, final[1]))
                                         - initial[0].count("e") - sum(map(int, initial[1])))) == 0


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.1, 3), st.floats(0.05, 3), st.floats(0, 0.1), st.floats(0, 0.1), st.floats(-4, 4),
)
def test_hamiltonian_is_hermitian(g, nu, om, mw, delta):
    basis = build_basis(1)
    m = hamiltonian(basis, SystemParams(g=g, nu=nu, omega=om, omega_mw=mw, delta=delta)).matrix
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12


def test_driveless_part_conserves_excitation(basis, generic):
    n = excitation_operator(basis).matrix
    h0 = driveless_hamiltonian(basis, generic.g, generic.nu, generic.delta).matrix
    np.testing.assert_array_equal(h0 @ n - n @ h0, 0)


def test_laser_changes_excitation_by_one_and_microwave_preserves_it(basis, generic):
    exc = np.array([s.excitation for s in basis.states])
    laser = laser_term(basis, generic.omega).matrix
    mw = microwave_term(basis, generic.omega_mw).matrix
    rows, cols = np.nonzero(laser)
    assert rows.size and np.all(np.abs(exc[rows] - exc[cols]) == 1)
    rows, cols = np.nonzero(mw)
    assert rows.size and np.all(exc[rows] == exc[cols])


def test_triplet_is_dark_to_microwave(basis):
    t = (basis.ket("01") + basis.ket("10")) / np.sqrt(2)
    np.testing.assert_allclose(microwave_term(basis, 0.37).apply(t), 0, atol=1e-15)
    s = (basis.ket("01") - basis.ket("10")) / np.sqrt(2)
    assert np.linalg.norm(microwave_term(basis, 0.37).apply(s)) > 0.5


def test_hamiltonian_is_linear_in_laser_amplitude(basis, generic):
    h1 = hamiltonian(basis, generic).matrix
    h2 = hamiltonian(basis, generic.replace(omega=2 * generic.omega)).matrix
    np.testing.assert_allclose(h2 - h1, laser_term(basis, generic.omega).matrix, atol=1e-15)


def test_model_requires_single_excitation_basis(generic):
    for n in (0, 2):
        with pytest.raises(ShapeError):
            hamiltonian(build_basis(n), generic)
        with pytest.raises(ShapeError):
            lindblad_set(build_basis(n), generic)


def test_lindblad_examples(basis):
    p = SystemParams(beta=0.3, kappa=0.2, gamma=0.18)
    ls = lindblad_set(basis, p)
    assert ls.labels == LINDBLAD_LABELS
    np.testing.assert_allclose(ls["gamma2"].apply(basis.ket("e1")), math.sqrt(0.09) * basis.ket("11"))
    np.testing.assert_allclose(ls["beta"].apply(basis.ket("00", "010")), math.sqrt(0.3) * basis.ket("00"))
    np.testing.assert_allclose(ls["gamma3"].apply(basis.ket("1e")), math.sqrt(0.09) * basis.ket("10"))
    np.testing.assert_allclose(ls["kappa2"].apply(basis.ket("01", "001")), math.sqrt(0.2) * basis.ket("01"))


def test_lindblad_operators_map_one_excitation_to_ground(basis):
    ls = lindblad_set(basis, SystemParams(beta=0.3, kappa=0.2, gamma=0.18))
    zero = basis.excitation_mask(0)
    one = ~zero
    for op in ls:
        m = op.matrix
        assert not np.any(m[:, zero])
        assert not np.any(m[one][:, one])
        assert np.any(m[np.ix_(zero, one)])


def test_zero_rate_channels_are_zero_matrices(basis):
    ls = lindblad_set(basis, SystemParams(beta=0.1))
    assert len(ls) == 7
    assert np.any(ls["beta"].matrix)
    for label in LINDBLAD_LABELS[1:]:
        assert not np.any(ls[label].matrix)
    with pytest.raises(KeyError):
        ls["delta"]


def test_dissipator_weight_scales_with_rate(basis):
    a = lindblad_set(basis, SystemParams(beta=0.1))["beta"].matrix
    b = lindblad_set(basis, SystemParams(beta=0.2))["beta"].matrix
    np.testing.assert_allclose(b.conj().T @ b, 2 * a.conj().T @ a)


def test_short_fiber_limit():
    assert validate_short_fiber(1.0, 2 * math.pi * 1e8)
    assert 1.0 * 2 * math.pi * 1e8 / (2 * math.pi * 2.998e8) == pytest.approx(0.3336, abs=1e-4)
    c = 299792458.0
    assert validate_short_fiber(1.0, 2 * math.pi * c)
    assert not validate_short_fiber(1.0, 2 * math.pi * c * 1.0001)
    assert validate_short_fiber(1e-12, 1e9)
    for bad in ((0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)):
        with pytest.raises(DomainError):
            validate_short_fiber(*bad)
