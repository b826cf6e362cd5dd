import numpy as np
import pytest
from scipy.integrate import solve_bvp

from mpattractors.engine import attraction_profile
from mpattractors.errors import EmptyRegion, NoConvergence, NotSemiInvariant, UnsupportedNonlinearity
from mpattractors.labs.elliptic import (
    CERT_TOL,
    ConstantGuess,
    EllipticProblem,
    Given,
    HarmonicExtension,
    SolverOptions,
    WindowConstants,
    attraction_profile_elliptic,
    constant_data,
    fourier_data,
    interior_bound_check,
    interior_gradient_check,
    piecewise_data,
    plateau_assign,
    profile_monotone_check,
    prolong,
    solve,
    solve_elliptic,
    stencil_residual,
    subharmonic_defect,
    trajectory_shift_closure_check,
    translation_semigroup,
)
from mpattractors.labs.nonlinearity import Nonlinearity, equilibrium_set
from mpattractors.phase import Field, annulus, dumbbell, from_mask, interval, strip

PLATEAU2 = Nonlinearity.plateau(2)
CUBIC = Nonlinearity.cubic()


def annulus_problem(spacing):
    d = annulus(1.0, 40.0, spacing)
    g = fourier_data(d, 1.0, [(3, 1.5, 0.0)], inner_terms=[(1, 1.5, 0.5)], split_radius=10.0)
    return EllipticProblem(d, g, PLATEAU2)


@pytest.fixture(scope="module")
def annulus_coarse():
    p = annulus_problem(0.4)
    return p, solve(p, ConstantGuess(0.0))


def brute_residual(p, u):
    # cell-by-cell loop over the stencil, no array tricks
    dom = p.domain
    vals = np.where(dom.boundary, p.boundary_data, u.values)
    worst = 0.0
    for cell in zip(*np.nonzero(dom.interior)):
        lap = 0.0
        for ax in range(dom.ndim):
            for step in (1, -1):
                nb = list(cell)
                nb[ax] = (nb[ax] + step) % dom.extents[ax]
                lap += vals[tuple(nb)] - vals[cell]
        worst = max(worst, abs(lap / dom.spacing**2 - p.nonlinearity(vals[cell])))
    return worst


# equilibria ------------------------------------------------------------------


def test_equilibrium_sets():
    np.testing.assert_array_equal(equilibrium_set(PLATEAU2), [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(equilibrium_set(CUBIC), [-1.0, 0.0, 1.0])
    np.testing.assert_array_equal(equilibrium_set(Nonlinearity.custom(factors=[(0.0, 1)])), [0.0])
    with pytest.raises(UnsupportedNonlinearity):
        equilibrium_set(Nonlinearity.custom(coefficients=[0.0, 0.0, 0.0, 1.0]))


# residual oracle -------------------------------------------------------------


def test_stencil_oracle_matches_brute_force():
    rng = np.random.default_rng(0)
    inside = rng.random((14, 11)) < 0.7
    inside[[0, -1], :] = False
    inside[:, [0, -1]] = False
    d = from_mask(inside, 0.5)
    p = EllipticProblem(d, rng.normal(size=d.extents), PLATEAU2)
    u = Field(d, rng.normal(size=d.extents))
    assert stencil_residual(p, u) == pytest.approx(brute_residual(p, u), rel=1e-12)
    sparse = np.abs(p.residual_vector(u.values[d.interior])).max()
    assert stencil_residual(p, u) == pytest.approx(sparse, rel=1e-12)


def test_stencil_oracle_periodic_strip():
    d = strip(3.0, 2.0, 0.5)
    rng = np.random.default_rng(1)
    p = EllipticProblem(d, rng.normal(size=d.extents), CUBIC)
    u = Field(d, rng.normal(size=d.extents))
    assert stencil_residual(p, u) == pytest.approx(brute_residual(p, u), rel=1e-12)


# solver ----------------------------------------------------------------------


@pytest.mark.parametrize("k", [0.0, 1.0, 2.0])
def test_constant_data_is_exact(k):
    d = annulus(1.0, 6.0, 0.25)
    p = EllipticProblem(d, constant_data(d, k), PLATEAU2)
    for init in (HarmonicExtension(), ConstantGuess(k)):
        res = solve(p, init)
        assert np.array_equal(res.field.values[d.active], np.full(int(d.active.sum()), k))
        assert res.residual == 0.0 and res.iters == 0


def test_other_guesses_give_certified_solutions():
    # solutions need not be unique; any output must still be certified
    d = annulus(1.0, 6.0, 0.25)
    p = EllipticProblem(d, constant_data(d, 1.0), PLATEAU2)
    for c in (0.5, 1.5, -0.3):
        res = solve(p, ConstantGuess(c))
        assert stencil_residual(p, res.field) <= CERT_TOL


def test_interval_zero_solution():
    d = interval(10.0, 0.05)
    p = EllipticProblem(d, np.zeros(d.extents), CUBIC)
    u = solve_elliptic(p, ConstantGuess(0.0))
    assert u.sup_norm() <= 1e-8


def test_certificate_on_annulus(annulus_coarse):
    p, res = annulus_coarse
    assert res.residual <= CERT_TOL
    assert stencil_residual(p, res.field) <= CERT_TOL
    # Dirichlet data held exactly
    np.testing.assert_array_equal(res.field.values[p.domain.boundary], p.boundary_data[p.domain.boundary])


def test_krylov_path_bit_reproducible():
    d = annulus(1.0, 8.0, 0.1)
    p = EllipticProblem(d, fourier_data(d, 1.0, [(3, 1.5, 0.0)]), PLATEAU2)
    opts = SolverOptions(direct_limit=100)
    np.random.seed(123)
    before = np.random.get_state()[1].copy()
    a = solve(p, ConstantGuess(0.0), opts)
    assert np.array_equal(np.random.get_state()[1], before)
    b = solve(p, ConstantGuess(0.0), opts)
    assert a.field.values.tobytes() == b.field.values.tobytes()
    assert a.history == b.history and a.residual <= CERT_TOL


def test_no_convergence_carries_history():
    p = annulus_problem(0.8)
    with pytest.raises(NoConvergence) as exc:
        solve(p, ConstantGuess(0.0), SolverOptions(max_iters=1))
    assert len(exc.value.history) >= 2


def test_given_init_and_prolong():
    coarse = strip(4.0, 2.0, 0.2)
    fine = strip(4.0, 2.0, 0.1)
    x, y = coarse.coords()
    lin = Field(coarse, 0.3 * y + 1.0)
    xf, yf = fine.coords()
    np.testing.assert_allclose(prolong(lin, fine).values, 0.3 * yf + 1.0, atol=1e-12)
    pc = EllipticProblem(coarse, piecewise_data(coarse, [-0.5, 0.5], axis=1), CUBIC)
    pf = EllipticProblem(fine, piecewise_data(fine, [-0.5, 0.5], axis=1), CUBIC)
    uc = solve_elliptic(pc, ConstantGuess(1.0))
    res = solve(pf, Given(prolong(uc, fine)))
    assert res.residual <= CERT_TOL
    assert res.newton_steps <= 6


def test_strip_matches_cross_section_oracle():
    W, h = 40.0, 0.2
    d = strip(W, 2.0, h)
    g = piecewise_data(d, [-0.5, 0.5], axis=1)
    p = EllipticProblem(d, g, CUBIC)
    u = solve_elliptic(p, ConstantGuess(1.0))
    y = d.axis_coords(1)
    sol = solve_bvp(lambda t, z: np.vstack([z[1], z[0] ** 3 - z[0]]),
                    lambda za, zb: np.array([za[0] + 0.5, zb[0] - 0.5]),
                    y, np.vstack([np.ones_like(y), np.zeros_like(y)]), tol=1e-8, max_nodes=100000)
    assert sol.success
    mid = d.extents[0] // 2
    assert np.abs(u.values[mid] - sol.sol(y)[0]).max() <= 1e-2
    # translation invariance along the strip
    assert np.abs(u.values - u.values[mid]).max() <= 1e-9
    prof = attraction_profile_elliptic(u, [-1.0, 0.0, 1.0], [1.0, 2.0, 4.0, 8.0])
    assert np.all(np.diff(prof.sup_dists) <= 0)


# interior estimates ----------------------------------------------------------


def test_gradient_check_constant_and_empty():
    d = annulus(1.0, 6.0, 0.25)
    u = Field.constant(d, 1.0)
    assert interior_gradient_check(u, 1.0)["max_grad"] == 0.0
    with pytest.raises(EmptyRegion):
        interior_gradient_check(u, 100.0)


def test_gradient_refinement_stable(annulus_coarse):
    p, res = annulus_coarse
    fine = annulus_problem(0.2)
    uf = solve_elliptic(fine, Given(prolong(res.field, fine.domain)))
    rep = interior_gradient_check(res.field, 10.0, refined=uf)
    assert rep["pass"], rep


def test_interior_bound(annulus_coarse):
    _, res = annulus_coarse
    rep = interior_bound_check(res.field, PLATEAU2)
    assert rep["pass"] and rep["bound"] == pytest.approx(2.1)


# profiles and plateaus -------------------------------------------------------


def test_profile_constant_is_zero():
    d = annulus(1.0, 8.0, 0.25)
    for k in (0.0, 1.0, 2.0):
        prof = attraction_profile_elliptic(Field.constant(d, k), [0, 1, 2], [1.0, 2.0, 3.0])
        assert np.all(prof.sup_dists == 0.0)


def test_profile_skips_empty_bands():
    d = annulus(1.0, 8.0, 0.25)
    prof = attraction_profile_elliptic(Field.constant(d, 0.0), [0], [1.0, 50.0])
    assert prof.skipped == [50.0] and len(prof.entries) == 1


def test_annulus_profile_decays(annulus_coarse):
    p, res = annulus_coarse
    D_list = [1, 2, 3, 5, 8, 10, 12, 15]
    rep = profile_monotone_check(res.field, [0, 1, 2], D_list)
    assert rep["pass"], rep["violations"]
    prof = rep["profile"]
    assert prof.sup_dists[-1] <= 1e-3
    # log-linear decay, as the linearisation at the plateau predicts
    slope = np.polyfit(prof.depths[3:], np.log(prof.sup_dists[3:]), 1)[0]
    assert slope < -1.0


def test_monotone_check_flags_deep_increase():
    inside = np.zeros((61, 61), dtype=bool)
    inside[1:-1, 1:-1] = True
    d = from_mask(inside, 0.25)
    vals = np.zeros(d.extents)
    deep = np.argwhere(d.interior & (np.abs(d.depth - 5.5) < 0.01))[0]
    vals[tuple(deep)] = 0.5
    rep = profile_monotone_check(Field(d, vals), [0], [1.0, 2.0, 3.0, 4.0, 5.0])
    assert not rep["pass"]
    assert rep["violations"][0]["D"] == 4.0 and rep["violations"][0]["allowed"] == 0.0


def test_annulus_single_plateau(annulus_coarse):
    _, res = annulus_coarse
    pa = plateau_assign(res.field, [0, 1, 2], 15.0)
    assert len(pa.components) == 1 and pa.components[0].resolved
    assert pa.components[0].N_u == 0.0


def test_plateau_constant_two():
    d = annulus(1.0, 8.0, 0.25)
    p = EllipticProblem(d, constant_data(d, 2.0), PLATEAU2)
    pa = plateau_assign(solve_elliptic(p), [0, 1, 2], 2.0)
    assert [(c.N_u, c.deviation) for c in pa.components] == [(2.0, 0.0)]


def test_plateau_ties_unresolved():
    d = annulus(1.0, 8.0, 0.25)
    pa = plateau_assign(Field.constant(d, 0.0), [0.0, 0.005], 2.0)
    assert pa.components[0].N_u is None


def test_plateau_periodic_seam_merges():
    d = strip(6.0, 8.0, 0.5)
    pa = plateau_assign(Field.constant(d, 1.0), [1.0], 1.0)
    assert len(pa.components) == 1


def test_dumbbell_two_plateaus():
    d = dumbbell(20.0, 3, 4.0, 0.25)
    p = EllipticProblem(d, piecewise_data(d, [0.0, 2.0]), PLATEAU2)
    u = solve_elliptic(p, HarmonicExtension())
    pa = plateau_assign(u, [0, 1, 2], 6.0)
    assert len(pa.components) == 2
    assert sorted(pa.values) == [0.0, 2.0]


# subharmonicity --------------------------------------------------------------


def test_subharmonic_examples(annulus_coarse):
    d = from_mask(np.pad(np.ones((20, 20), bool), 1), 0.5)
    assert subharmonic_defect(Field.constant(d, 1.5), 1.0) == 0.0
    x, _ = d.coords()
    assert subharmonic_defect(Field(d, x), 1.0) == 2.0
    _, res = annulus_coarse
    assert subharmonic_defect(res.field) >= -1e-4


# translations ----------------------------------------------------------------


def test_shift_closure_on_strip():
    d = strip(6.0, 4.0, 0.25)
    p = EllipticProblem(d, piecewise_data(d, [-0.5, 0.5], axis=1), CUBIC)
    u = solve_elliptic(p, ConstantGuess(1.0))
    assert trajectory_shift_closure_check(p, u, (3, 0)) <= 1e-8
    k = EllipticProblem(d, constant_data(d, 1.0), CUBIC)
    assert trajectory_shift_closure_check(k, Field.constant(d, 1.0), (5, 0)) == 0.0


def test_shift_closure_rejects_annulus():
    d = annulus(1.0, 6.0, 0.5)
    p = EllipticProblem(d, constant_data(d, 0.0), PLATEAU2)
    with pytest.raises(NotSemiInvariant):
        trajectory_shift_closure_check(p, Field.constant(d, 0.0), (1, 0))


def test_engine_profile_over_domain_arrow():
    d = annulus(1.0, 8.0, 0.25)
    S = translation_semigroup(d)
    seeds = [Field.constant(d, k) for k in (0.0, 1.0, 2.0)]
    prof = attraction_profile(S, seeds, WindowConstants((0.0, 1.0, 2.0)), [1.0, 2.0, 3.0])
    assert np.all(prof.sup_dists == 0.0)
