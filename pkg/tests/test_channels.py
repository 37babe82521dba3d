import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkb.channels import (
    L_UC,
    AddedNoise,
    ThermalAmp,
    ThermalLoss,
    apply_channel,
    build_joint_state,
    cloner_symplectic,
    dilate_single_mode,
    eve_omega_for_zeta,
    make_channel,
)
from gkb.errors import DomainError
from gkb.symplectic import symplectic_eigenvalues, symplectic_form


def omega_form(n, dtype=float):
    return np.kron(np.eye(n, dtype=dtype), np.array([[0, 1], [-1, 0]], dtype=dtype))


@pytest.mark.parametrize(
    "cls, kwargs, param",
    [
        (ThermalLoss, {"eta": 0.0}, "eta"),
        (ThermalLoss, {"eta": 1.0}, "eta"),
        (ThermalLoss, {"eta": 1.2}, "eta"),
        (ThermalLoss, {"eta": 0.5, "omega": 0.9}, "omega"),
        (ThermalAmp, {"g": 1.0}, "g"),
        (ThermalAmp, {"g": 2.0, "omega": 0.5}, "omega"),
        (AddedNoise, {"zeta": 0.0}, "zeta"),
        (AddedNoise, {"zeta": -1.0}, "zeta"),
    ],
)
def test_parameter_domains(cls, kwargs, param):
    with pytest.raises(DomainError) as err:
        cls(**kwargs)
    assert err.value.param == param


def test_pure_loss_boundary_admitted():
    assert ThermalLoss(0.5, 1.0).omega == 1.0


def test_make_channel():
    assert make_channel("thermal_amp", g=2.0, omega=3.0) == ThermalAmp(2.0, 3.0)
    with pytest.raises(DomainError):
        make_channel("phase_flip")


def test_apply_channel_examples():
    assert np.allclose(apply_channel(ThermalLoss(0.5, 1.0), np.eye(2)).matrix, np.eye(2))
    assert np.allclose(apply_channel(ThermalAmp(2.0, 3.0), np.eye(2)).matrix, 5.0 * np.eye(2))
    assert np.allclose(apply_channel(AddedNoise(0.25), 2.0 * np.eye(2)).matrix, 2.5 * np.eye(2))


def test_luc_symplectic_exact():
    assert L_UC.dtype.kind == "i"
    om = omega_form(3, np.int64)
    assert np.array_equal(L_UC @ om @ L_UC.T, om)


def test_loss_cloner_transparent_limit():
    c = cloner_symplectic(ThermalLoss(1.0 - 1e-14))
    assert c.wiring == ("B", "E")
    assert np.allclose(c.matrix, np.eye(4), atol=1e-6)


def test_amp_cloner_symplectic():
    m = cloner_symplectic(ThermalAmp(2.0)).matrix
    assert np.max(np.abs(m @ symplectic_form(2) @ m.T - symplectic_form(2))) < 1e-12


@given(st.floats(1e-6, 1 - 1e-6), st.floats(1.0 + 1e-6, 1e3))
def test_two_mode_cloners_symplectic(eta, g):
    om = symplectic_form(2)
    for spec in (ThermalLoss(eta), ThermalAmp(g)):
        m = cloner_symplectic(spec).matrix
        assert np.max(np.abs(m @ om @ m.T - om)) < 1e-12 * max(1.0, g)


@pytest.mark.parametrize("zeta, omega", [(4.0, 1.0), (2.0, 1.25), (0.38, 0.0475 + 2.0 / 0.38)])
def test_eve_omega_for_zeta(zeta, omega):
    w = eve_omega_for_zeta(zeta)
    assert w == pytest.approx(omega, abs=1e-12)
    assert 4.0 * (w - np.sqrt(w * w - 1.0)) == pytest.approx(zeta, abs=1e-12)


@pytest.mark.parametrize("zeta", [0.0, 4.5])
def test_eve_omega_for_zeta_domain(zeta):
    with pytest.raises(DomainError):
        eve_omega_for_zeta(zeta)


@given(st.floats(1e-3, 4.0))
def test_eve_omega_round_trip(zeta):
    w = eve_omega_for_zeta(zeta)
    assert w >= 1.0
    assert 4.0 * (w - np.sqrt(w * w - 1.0)) == pytest.approx(zeta, rel=1e-9)


def test_joint_state_marginals():
    st_loss = build_joint_state(ThermalLoss(0.6, 3.0), 1e6)
    assert st_loss.labels == ("A", "B", "E", "e")
    assert np.allclose(st_loss.marginal(["B"]).matrix, (0.6e6 + 1.2) * np.eye(2), rtol=1e-12)
    st_noise = build_joint_state(AddedNoise(0.38), 100.0)
    assert np.allclose(st_noise.marginal(["B"]).matrix, 100.76 * np.eye(2), atol=1e-10)
    assert np.allclose(st_noise.marginal(["A"]).matrix, 100.0 * np.eye(2))


@pytest.mark.parametrize("spec", [ThermalLoss(0.3, 2.0), ThermalAmp(1.7, 4.0), AddedNoise(0.38), AddedNoise(4.0)])
def test_joint_state_pure(spec):
    st_ = build_joint_state(spec, 100.0)
    assert np.allclose(symplectic_eigenvalues(st_.cm), 1.0, atol=1e-6)
    assert st_.is_pure()
    # pure global state: complementary subsystems have equal entropy
    assert st_.entropy(["A", "B"]) == pytest.approx(st_.entropy(["E", "e"]), abs=1e-6)


@given(
    st.sampled_from(["loss", "amp", "noise"]),
    st.floats(0.05, 0.95),
    st.floats(1.0, 10.0),
    st.floats(1.0, 10.0),
    st.floats(-1.0, 1.0),
)
def test_dilation_matches_channel(kind, p, omega, nu, r):
    spec = {"loss": ThermalLoss(p, omega), "amp": ThermalAmp(1.0 + 3 * p, omega), "noise": AddedNoise(4.0 * p)}[kind]
    v = nu * np.diag([np.exp(2 * r), np.exp(-2 * r)])
    out = dilate_single_mode(spec, v).marginal(["B"]).matrix
    assert np.allclose(out, apply_channel(spec, v).matrix, atol=1e-9 * nu * np.exp(2 * abs(r)))


def test_added_noise_beyond_cloner_range_has_no_dilation():
    with pytest.raises(DomainError):
        build_joint_state(AddedNoise(5.0), 100.0)
