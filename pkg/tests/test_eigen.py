import numpy as np
import pytest
import scipy.linalg as sla
from scipy.optimize import brentq
from scipy.special import jvp

from dunking import eigen, fem, mesh

from conftest import uniform_fields


def _dense_reference(m, k):
    forms = fem.assemble_forms(m, uniform_fields(m))
    w, _ = sla.eigh(forms.A0.toarray(), forms.M.toarray())
    return np.sort(w)[:k]


def test_generalized_eigs_match_dense():
    m = mesh.generate_canonical("disk", 3)
    forms = fem.assemble_forms(m, uniform_fields(m))
    pairs = eigen.generalized_eigs(forms.A0, forms.M, 8)
    ref = _dense_reference(m, 8)
    got = np.array([p.value for p in pairs])
    assert np.allclose(got, ref, rtol=1e-8, atol=1e-10)


def test_eigenvectors_mass_orthonormal():
    m = mesh.generate_canonical("disk", 3)
    forms = fem.assemble_forms(m, uniform_fields(m))
    pairs = eigen.generalized_eigs(forms.A0, forms.M, 6)
    V = np.column_stack([p.vector for p in pairs])
    G = V.T @ (forms.M @ V)
    assert np.max(np.abs(G - np.eye(6))) < 1e-8
    for p in pairs:
        r = forms.A0 @ p.vector - p.value * (forms.M @ p.vector)
        assert np.linalg.norm(r) < 1e-7 * max(1.0, abs(p.value))


def test_constrained_eigs_skip_the_constant():
    m = mesh.generate_canonical("square", 3)
    forms = fem.assemble_forms(m, uniform_fields(m))
    pairs = eigen.generalized_eigs(forms.A0, forms.M, 3, constraint=forms.c)
    # with the mean-zero constraint the zero eigenvalue disappears
    assert pairs[0].value > 1.0
    for p in pairs:
        assert abs(forms.c @ p.vector) < 1e-8


def test_disk_neumann_eigenvalue_bessel_oracle(disk5):
    """mu = first nonzero Neumann eigenvalue of the unit disk.

    Oracle: mu = (x*)^2 with x* the first positive root of J1'(x),
    computed independently by bracketed root finding.
    """
    x_star = brentq(lambda x: jvp(1, x, 1), 1.5, 2.5, xtol=1e-12)
    mu_exact = x_star ** 2
    sc = eigen.stability_constants(disk5)
    assert abs(sc.mu - mu_exact) / mu_exact < 0.01
    gs = mesh.geometry_stats(disk5)
    assert abs(sc.gamma_sq_over_mu - gs.gamma ** 2 / sc.mu) < 1e-12


def test_disk_steklov_eigenvalue_exact(disk5):
    # first nonzero Steklov eigenvalue of the unit disk is 1/R = 1
    sc = eigen.stability_constants(disk5)
    assert abs(sc.lambda_steklov - 1.0) < 0.01
    assert abs(sc.gamma_over_lambda - 2.0) < 0.02


def test_stability_constants_square(square4):
    # square side L: mu = (pi/L)^2, lambda = smallest positive Steklov value
    sc = eigen.stability_constants(square4)
    assert abs(sc.mu - np.pi ** 2) / np.pi ** 2 < 0.01
    # reference ratio from the bundled constant table
    assert abs(sc.gamma_sq_over_mu - 1.6211389) < 0.02


def test_eigenpair_export(tmp_path):
    m = mesh.generate_canonical("disk", 2)
    forms = fem.assemble_forms(m, uniform_fields(m))
    pairs = eigen.generalized_eigs(forms.A0, forms.M, 4)
    p = tmp_path / "eigs.csv"
    eigen.write_eigenpairs(p, pairs)
    vals = np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2)[:, 1]
    assert np.allclose(vals, [q.value for q in pairs], rtol=1e-12)


def test_more_pairs_than_rank_rejected():
    m = mesh.generate_canonical("disk", 1)
    forms = fem.assemble_forms(m, uniform_fields(m))
    with pytest.raises(ValueError):
        eigen.generalized_eigs(forms.A0, forms.M, forms.M.shape[0] + 5)
