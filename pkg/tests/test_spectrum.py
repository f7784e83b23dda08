import math

import pytest
from hypothesis import given, strategies as st

from noncentral.errors import ChannelInvalidError, DomainError
from noncentral.potential import PotentialParams
from noncentral.spectrum import (
    ABParams, HartmannParams, QuantumNumbers, ab_energy, distinct_energies, energy_level, enumerate_ab_levels,
    enumerate_levels, hartmann_energy, lambda_value, quantization_function, quantization_omega,
)

# closed form at Z=1, B=3, C=1, qn=(0,0,1); cross-checked against the ODE oracle in test_oracle.py
E_B3C1_001 = -0.05615068759589764

small = st.integers(0, 6)


def qns():
    return st.builds(QuantumNumbers, small, small, small)


def valid_params():
    return st.tuples(st.floats(0.1, 4.0), st.floats(0.0, 6.0), st.floats(-3.0, 3.0)).filter(
        lambda t: t[1] - abs(t[2]) >= 0
    ).map(lambda t: PotentialParams(*t))


@pytest.mark.parametrize(
    "B, C, nu, expected",
    [(0, 0, 2, 4.0), (3, 1, 1, math.sqrt(5) + math.sqrt(3))],
)
def test_lambda_examples(B, C, nu, expected):
    assert lambda_value(PotentialParams(1, B, C), nu) == pytest.approx(expected, rel=1e-15)


def test_lambda_quoted_digits():
    assert lambda_value(PotentialParams(1, 3, 1), 1) == pytest.approx(3.9681188, abs=5e-8)


def test_invalid_channel():
    with pytest.raises(ChannelInvalidError):
        lambda_value(PotentialParams(1, 0, 1), 0)
    with pytest.raises(ChannelInvalidError):
        energy_level(PotentialParams(1, 0, -1), QuantumNumbers(0, 0, 0))


def test_quantum_numbers_validated():
    with pytest.raises(DomainError):
        QuantumNumbers(-1, 0, 0)
    with pytest.raises(DomainError):
        QuantumNumbers(0, 0.5, 0)


def test_energy_examples():
    assert energy_level(PotentialParams(1), QuantumNumbers(0, 0, 0)).energy == -0.5
    lv = energy_level(PotentialParams(1, 3, 1), QuantumNumbers(0, 0, 1))
    assert lv.energy == pytest.approx(E_B3C1_001, rel=1e-14)
    assert lv.energy == pytest.approx(-0.0561506, abs=1e-7)
    assert lv.n_eff == pytest.approx(2.9840594, abs=5e-8)
    assert energy_level(PotentialParams(1), QuantumNumbers(1, 0, 1)).energy == pytest.approx(-1 / 18, rel=1e-15)


def test_level_fields():
    lv = energy_level(PotentialParams(1, 3, 1), QuantumNumbers(2, 1, 1))
    assert lv.degeneracy == 4
    assert lv.lam == lambda_value(PotentialParams(1, 3, 1), 1)
    assert lv.n_eff == pytest.approx(3 + 1 + lv.lam / 2)


def test_units_scale_like_hartree():
    base = energy_level(PotentialParams(1, 3, 1), QuantumNumbers(0, 1, 2)).energy
    p = PotentialParams(1, 3, 1, m=2.0, hbar=0.5, e2=3.0)
    # E scales with m e^4 / hbar^2, B and C are dimensionless
    assert energy_level(p, QuantumNumbers(0, 1, 2)).energy == pytest.approx(base * p.hartree, rel=1e-14)


def test_enumerate_hydrogen_shells():
    levels = enumerate_levels(PotentialParams(1), 1, 1)
    got = [(lv.energy, lv.degeneracy, lv.n_sum, lv.nu) for lv in levels]
    assert got == [
        (-0.5, 1, 0, 0),
        (-0.125, 2, 1, 0),
        (-0.125, 1, 0, 1),
        (pytest.approx(-1 / 18), 2, 1, 1),
    ]


def test_enumerate_all_invalid_is_empty():
    assert enumerate_levels(PotentialParams(1, 0, 1), 3, 0) == []


def test_enumerate_skips_invalid_channels_only():
    levels = enumerate_levels(PotentialParams(1, 0, 1), 1, 2)
    assert {lv.nu for lv in levels} == {1, 2}


def test_enumerate_sorted_and_monotone_in_nsum():
    levels = enumerate_levels(PotentialParams(1, 3, 1), 4, 3)
    keys = [(lv.energy, lv.nu, lv.n_sum) for lv in levels]
    assert keys == sorted(keys)
    for nu in range(4):
        es = [lv.energy for lv in sorted(levels, key=lambda lv: lv.n_sum) if lv.nu == nu]
        assert all(a < b for a, b in zip(es, es[1:]))


@pytest.mark.parametrize(
    "gamma, sigma, qn, expected",
    [
        (1.0, 1.0, QuantumNumbers(0, 0, 1), -1 / (2 * (1 + math.sqrt(2)) ** 2)),
        (2.0, 1.0, QuantumNumbers(0, 0, 0), -4 / (2 * 9)),
    ],
)
def test_hartmann_examples(gamma, sigma, qn, expected):
    assert hartmann_energy(HartmannParams(gamma, sigma), qn).energy == pytest.approx(expected, rel=1e-14)


def test_hartmann_quoted_digits():
    e = hartmann_energy(HartmannParams(1, 1), QuantumNumbers(0, 0, 1)).energy
    assert e == pytest.approx(-0.0857864, abs=5e-8)


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), qns())
def test_hartmann_is_substitution(gamma, sigma, qn):
    h = HartmannParams(gamma, sigma)
    mapped = PotentialParams(Z=gamma * sigma**2, B=(gamma * sigma) ** 2, C=0.0)
    assert hartmann_energy(h, qn).energy == pytest.approx(energy_level(mapped, qn).energy, rel=1e-12)


def test_ab_examples():
    lv = ab_energy(ABParams(1, 2.5), QuantumNumbers(0, 0, 3))
    assert lv.m_abs == 0.5
    assert lv.energy == pytest.approx(-1 / (2 * 1.5**2), rel=1e-14)
    assert not lv.is_coulombian
    lv = ab_energy(ABParams(1, 3.0), QuantumNumbers(1, 2, 3))
    assert lv.m_abs == 0 and lv.is_coulombian
    assert lv.energy == pytest.approx(-1 / (2 * 16))
    assert ab_energy(ABParams(1, 0.0), QuantumNumbers(0, 0, 2)).energy == pytest.approx(-1 / 18, rel=1e-14)


def test_ab_flux_quantization_restores_coulomb():
    ab = ABParams(1, 3.0)
    levels = enumerate_ab_levels(ab, 3, range(6))
    assert all(lv.is_coulombian for lv in levels)
    m_values = sorted({int(round(lv.m_abs)) for lv in levels})
    coulomb = [
        energy_level(PotentialParams(1), QuantumNumbers(n, 0, m)).energy for m in m_values for n in range(4)
    ]
    assert distinct_energies(levels) == pytest.approx(distinct_energies(coulomb), rel=1e-12)
    # and each is a hydrogen level -1/(2 n^2) with integer n
    for e in distinct_energies(levels):
        n = math.sqrt(-0.5 / e)
        assert n == pytest.approx(round(n), abs=1e-12)


@given(st.floats(0.1, 3.0), st.floats(-6.0, 6.0), qns())
def test_ab_is_substitution(Z, alpha, qn):
    ab = ABParams(Z, alpha)
    assert ab_energy(ab, qn).energy == pytest.approx(energy_level(ab.channel_params(qn.nu), qn).energy, rel=1e-12)


def test_quantization_omega_examples():
    assert quantization_omega(PotentialParams(1), QuantumNumbers(0, 0, 0)) == 0.5
    w = quantization_omega(PotentialParams(1, 3, 1), QuantumNumbers(0, 0, 1))
    assert w == pytest.approx(1 / (2 + math.sqrt(5) + math.sqrt(3)), rel=1e-15)
    assert -2 * w * w == pytest.approx(E_B3C1_001, rel=1e-13)


@given(valid_params(), qns())
def test_omega_energy_consistency(params, qn):
    lv = energy_level(params, qn)
    w = quantization_omega(params, qn)
    assert -2 * params.m * w * w == pytest.approx(lv.energy, rel=1e-12)
    assert lv.omega == pytest.approx(w, rel=1e-15)
    assert quantization_function(params, qn, w) == pytest.approx(0.0, abs=1e-12 * params.a)


@given(valid_params(), qns(), st.floats(1.5, 4.0))
def test_omega_linear_in_charge(params, qn, k):
    scaled = PotentialParams(params.Z * k, params.B, params.C)
    assert quantization_omega(scaled, qn) == pytest.approx(k * quantization_omega(params, qn), rel=1e-14)


@given(st.sampled_from([1.0, 2.0, 0.5]), qns())
def test_coulomb_reduction(Z, qn):
    n = qn.n_sum + qn.nu + 1
    assert energy_level(PotentialParams(Z), qn).energy == pytest.approx(-(Z**2) / (2 * n * n), rel=1e-15)


@given(valid_params(), small, small, small)
def test_permutation_invariance(params, a, b, nu):
    assert energy_level(params, QuantumNumbers(a, b, nu)).energy == energy_level(params, QuantumNumbers(b, a, nu)).energy


@given(valid_params(), small, small)
def test_monotonicity(params, n_sum, nu):
    lam = lambda_value(params, nu)
    assert lambda_value(params, nu + 1) >= lam
    bigger_b = PotentialParams(params.Z, params.B + 0.5, params.C)
    assert lambda_value(bigger_b, nu) >= lam
    e = energy_level(params, QuantumNumbers(n_sum, 0, nu)).energy
    assert energy_level(params, QuantumNumbers(n_sum + 1, 0, nu)).energy > e
    assert energy_level(params, QuantumNumbers(n_sum, 0, nu + 1)).energy >= e
    assert e < 0
