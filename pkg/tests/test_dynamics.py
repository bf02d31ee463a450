import numpy as np
import pytest

from dcesim import (
    ConfigInvalid,
    DensityMatrix,
    DimensionMismatch,
    EmptySeries,
    LindbladSpec,
    ModelParams,
    NormDriftExceeded,
    TimeGrid,
    TimeSeries,
    TruncationWarning,
    basis_state,
    build_operator,
    coupling_operator,
    evolve_lindblad,
    evolve_schrodinger,
    ground_state,
    make_space,
    max_over_time,
    observables_series,
    static_hamiltonian,
    validate_truncation,
)
from conftest import number_series


def test_time_grid_sampling():
    grid = TimeGrid(t_max=200.0, dt=1e-3, sample_every=100)
    assert grid.n_steps == 200000
    assert grid.n_samples == 2001
    t = grid.times()
    assert t[0] == 0.0
    assert t[-1] == pytest.approx(200.0)


def test_time_grid_validation():
    with pytest.raises(ConfigInvalid):
        TimeGrid(t_max=1.0, dt=-1e-3)
    with pytest.raises(ConfigInvalid):
        TimeGrid(t_max=1e-4, dt=1e-3)


def test_decoupled_evolution_is_stationary():
    sp = make_space(5)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.0)
    grid = TimeGrid(t_max=10.0, dt=1e-3, sample_every=100)
    series = evolve_schrodinger(p, sp, ground_state(sp), grid)
    n_vals = number_series(series)
    assert np.all(n_vals == 0.0)
    overlaps = np.abs(series.values @ ground_state(sp).amplitudes.conj())
    assert np.min(overlaps) > 1.0 - 1e-12  # stationary up to a global phase


def test_decoupled_energy_constant():
    sp = make_space(5)
    p = ModelParams(Omega=1.3, omega_d=0.7, g0=0.0)
    grid = TimeGrid(t_max=20.0, dt=1e-3, sample_every=100)
    psi0 = (basis_state(sp, 0, 1).amplitudes + basis_state(sp, 1, 2).amplitudes) \
        / np.sqrt(2)
    from dcesim import StateVector

    series = evolve_schrodinger(p, sp, StateVector(sp, psi0), grid)
    h0 = static_hamiltonian(p, sp)
    energies = observables_series(series, [h0]).values[:, 0]
    assert np.max(np.abs(energies - energies[0])) < 1e-10


def test_against_expm_oracle_static():
    # static coupling: psi(t) = expm(-iHt) psi0, an independent propagator
    from scipy.linalg import expm

    sp = make_space(5)
    p = ModelParams(Omega=1.0, omega_d=0.0, g0=0.1)
    grid = TimeGrid(t_max=10.0, dt=1e-3, sample_every=1000)
    series = evolve_schrodinger(p, sp, ground_state(sp), grid)
    h = static_hamiltonian(p, sp).matrix + 0.1 * coupling_operator(sp, "full").matrix
    for i, t in enumerate(series.times):
        ref = expm(-1j * h * t) @ ground_state(sp).amplitudes
        assert np.linalg.norm(series.values[i] - ref) < 1e-9


def test_against_dop853_oracle_driven():
    # independent adaptive integrator on the driven problem
    from scipy.integrate import solve_ivp

    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)
    grid = TimeGrid(t_max=10.0, dt=1e-3, sample_every=500)
    series = evolve_schrodinger(p, sp, ground_state(sp), grid)
    h0 = static_hamiltonian(p, sp).matrix
    v = coupling_operator(sp, "full").matrix

    def rhs(t, y):
        return -1j * (h0 @ y + (0.1 * np.cos(t)) * (v @ y))

    sol = solve_ivp(
        rhs, (0.0, 10.0), ground_state(sp).amplitudes.astype(complex),
        t_eval=series.times, method="DOP853", rtol=1e-11, atol=1e-13,
    )
    dev = np.max(np.linalg.norm(series.values - sol.y.T, axis=1))
    assert dev < 1e-7


def test_jc_regime_ground_state_inert(jc_run_200):
    n_vals = number_series(jc_run_200)
    assert np.max(n_vals) < 0.02


def test_dce_regime_monotonic_photon_growth(dce_run_200):
    series = dce_run_200
    obs = observables_series(
        series,
        [build_operator(series.space, "number"), build_operator(series.space, "s_z")],
    )
    t = obs.times
    n_vals = obs.values[:, 0]
    picks = [n_vals[np.argmin(np.abs(t - tk))] for tk in (50.0, 100.0, 150.0, 200.0)]
    assert all(a < b for a, b in zip(picks, picks[1:]))
    assert np.max(np.abs(obs.values[:, 1] + 0.5)) < 0.1


def test_norm_drift_within_tolerance(dce_run_200):
    assert abs(np.linalg.norm(dce_run_200.values[-1]) - 1.0) < 1e-8


def test_step_halving_convergence():
    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)
    n_op = [build_operator(sp, "number")]
    vals = []
    for dt, se in ((1e-3, 100), (5e-4, 200)):
        grid = TimeGrid(t_max=20.0, dt=dt, sample_every=se)
        series = evolve_schrodinger(p, sp, ground_state(sp), grid)
        vals.append(observables_series(series, n_op).values[-1, 0])
    assert abs(vals[0] - vals[1]) < 1e-6


def test_huge_step_raises_norm_drift():
    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)
    grid = TimeGrid(t_max=50.0, dt=0.5, sample_every=10)
    with pytest.raises(NormDriftExceeded):
        evolve_schrodinger(p, sp, ground_state(sp), grid)


def test_truncation_warning_on_tiny_space():
    sp = make_space(2)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.3, fock_cutoff=2)
    grid = TimeGrid(t_max=30.0, dt=1e-3, sample_every=100)
    with pytest.warns(TruncationWarning):
        evolve_schrodinger(p, sp, ground_state(sp), grid)


def test_unruh_anti_rwa_two_state_oscillation():
    # counter-rotating terms only: dynamics confined to {|g,0>, |e,1>}
    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=2.0, g0=0.1, variant="anti_rwa")
    grid = TimeGrid(t_max=200.0, dt=1e-3, sample_every=100)
    series = evolve_schrodinger(p, sp, ground_state(sp), grid)
    n_vals = number_series(series)
    assert np.max(n_vals) <= 1.0 + 1e-6
    assert np.max(n_vals) > 0.95
    pops = np.abs(series.values) ** 2
    outside = pops.sum(axis=1) - pops[:, sp.index(0, 0)] - pops[:, sp.index(1, 1)]
    assert np.max(outside) < 1e-10


def test_observables_series_trivial_cases():
    sp = make_space(3)
    times = np.linspace(0.0, 1.0, 5)
    vac = np.tile(ground_state(sp).amplitudes, (5, 1))
    series = TimeSeries(times, vac, space=sp)
    obs = observables_series(series, [build_operator(sp, "number")])
    assert np.all(obs.values == 0.0)

    e1 = np.tile(basis_state(sp, 1, 1).amplitudes, (5, 1))
    series = TimeSeries(times, e1, space=sp)
    obs = observables_series(
        series, [build_operator(sp, "number"), build_operator(sp, "s_z")]
    )
    assert np.allclose(obs.values[:, 0], 1.0)
    assert np.allclose(obs.values[:, 1], 0.5)
    assert obs.columns == ("number", "s_z")


def test_observables_series_space_mismatch():
    sp = make_space(3)
    other = make_space(4)
    series = TimeSeries(
        np.array([0.0]), ground_state(sp).amplitudes[None, :], space=sp
    )
    with pytest.raises(DimensionMismatch):
        observables_series(series, [build_operator(other, "number")])


def test_validate_truncation_reports():
    sp = make_space(3)
    times = np.linspace(0.0, 2.0, 5)
    vac = np.tile(ground_state(sp).amplitudes, (5, 1))
    rep = validate_truncation(TimeSeries(times, vac, space=sp), sp, 1e-3)
    assert rep.max_cutoff_population == 0.0
    assert not rep.violated

    # crafted ramp into the cutoff state
    amps = np.zeros((5, sp.total_dim), complex)
    weights = np.array([0.0, 1e-4, 5e-4, 2e-3, 1e-2])
    amps[:, sp.index(0, 0)] = np.sqrt(1.0 - weights)
    amps[:, sp.index(0, 3)] = np.sqrt(weights)
    rep = validate_truncation(TimeSeries(times, amps, space=sp), sp, 1e-3)
    assert rep.violated
    assert rep.first_violation_time == pytest.approx(1.5)
    assert rep.max_cutoff_population == pytest.approx(1e-2)


def test_validate_truncation_jc_clean(jc_run_200):
    rep = validate_truncation(jc_run_200, jc_run_200.space, 1e-3)
    assert not rep.violated


def test_validate_truncation_threshold_domain():
    sp = make_space(3)
    series = TimeSeries(
        np.array([0.0]), ground_state(sp).amplitudes[None, :], space=sp
    )
    with pytest.raises(ConfigInvalid):
        validate_truncation(series, sp, 0.0)


def test_lindblad_gamma_zero_matches_schrodinger():
    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)
    grid = TimeGrid(t_max=10.0, dt=1e-3, sample_every=200)
    pure = evolve_schrodinger(p, sp, ground_state(sp), grid)
    rho0 = DensityMatrix.from_state(ground_state(sp))
    mixed = evolve_lindblad(p, sp, rho0, LindbladSpec(collapse=()), grid)
    for i in range(len(pure)):
        proj = np.outer(pure.values[i], pure.values[i].conj())
        assert np.max(np.abs(mixed.values[i] - proj)) < 1e-6


def test_lindblad_damped_cavity_analytic():
    # H = H0, rho0 = |g,1><g,1|, C = sqrt(gamma) a  =>  <N>(t) = e^{-gamma t}
    gamma = 0.25
    sp = make_space(4)
    p = ModelParams(Omega=1.0, omega_d=0.0, g0=0.0)
    grid = TimeGrid(t_max=12.0, dt=1e-3, sample_every=100)
    rho0 = DensityMatrix.from_state(basis_state(sp, 0, 1))
    series = evolve_lindblad(p, sp, rho0, LindbladSpec(collapse=((gamma, "a"),)), grid)
    n_vals = observables_series(series, [build_operator(sp, "number")]).values[:, 0]
    assert np.max(np.abs(n_vals - np.exp(-gamma * series.times))) < 1e-6


def test_lindblad_qubit_decay_analytic():
    # relaxation channel alone: excited population decays as e^{-gamma t}
    gamma = 0.1
    sp = make_space(2)
    p = ModelParams(Omega=1.0, omega_d=0.0, g0=0.0)
    grid = TimeGrid(t_max=10.0, dt=1e-3, sample_every=100)
    rho0 = DensityMatrix.from_state(basis_state(sp, 1, 0))
    series = evolve_lindblad(
        p, sp, rho0, LindbladSpec(collapse=((gamma, "sigma_minus"),)), grid
    )
    sz = observables_series(series, [build_operator(sp, "s_z")]).values[:, 0]
    assert np.max(np.abs((sz + 0.5) - np.exp(-gamma * series.times))) < 1e-6


def test_lindblad_trace_hermiticity_positivity():
    sp = make_space(7)
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.025)
    grid = TimeGrid(t_max=30.0, dt=1e-3, sample_every=100)
    rho0 = DensityMatrix.from_state(ground_state(sp))
    lspec = LindbladSpec(collapse=((0.025, "a"), (0.025, "sigma_minus")))
    series = evolve_lindblad(p, sp, rho0, lspec, grid)
    traces = np.real(np.einsum("tii->t", series.values))
    assert np.max(np.abs(traces - 1.0)) < 1e-6
    herm = max(np.max(np.abs(m - m.conj().T)) for m in series.values)
    assert herm < 1e-8
    min_eig = min(np.linalg.eigvalsh(m).min().real for m in series.values)
    assert min_eig > -1e-6


def test_lindblad_literal_amplitude_switch():
    # literal reading applies the prefactor unsquare-rooted: rate scales as its square
    gamma = 0.2
    sp = make_space(3)
    p = ModelParams(Omega=1.0, omega_d=0.0, g0=0.0)
    grid = TimeGrid(t_max=5.0, dt=1e-3, sample_every=100)
    rho0 = DensityMatrix.from_state(basis_state(sp, 0, 1))
    literal = evolve_lindblad(
        p, sp, rho0,
        LindbladSpec(collapse=((gamma, "a"),), literal_amplitudes=True), grid,
    )
    n_vals = observables_series(literal, [build_operator(sp, "number")]).values[:, 0]
    assert np.max(np.abs(n_vals - np.exp(-gamma**2 * literal.times))) < 1e-6


def test_max_over_time():
    t = np.linspace(0, 1, 11)
    zeros = TimeSeries(t, np.zeros((11, 1)), columns=("x",))
    assert max_over_time(zeros) == 0.0
    ramp = TimeSeries(t, np.linspace(0, 3, 11)[:, None], columns=("x",))
    assert max_over_time(ramp) == 3.0
    with pytest.raises(EmptySeries):
        max_over_time(TimeSeries(np.zeros(0), np.zeros((0, 1)), columns=("x",)))


def test_csv_export_format(tmp_path):
    t = np.array([0.0, 0.1])
    vals = np.array([[0.0, -0.5], [1.0 / 3.0, 0.25]])
    series = TimeSeries(t, vals, columns=("N", "Sz"))
    path = tmp_path / "out.csv"
    series.to_csv(path, provenance={"generator": "test"})
    lines = path.read_text().splitlines()
    assert lines[0] == "# generator=test"
    assert lines[1] == "t,N,Sz"
    assert lines[2] == "0,0,-0.5"
    # 17 significant digits restore the double exactly
    assert float(lines[3].split(",")[1]) == 1.0 / 3.0


def test_cutoff_monotonicity():
    # enlarging the space never worsens agreement with the next-larger cutoff
    p = ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)
    grid = TimeGrid(t_max=200.0, dt=1e-3, sample_every=100)
    curves = {}
    import warnings

    for n_max in (7, 9, 11, 13):
        sp = make_space(n_max)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            series = evolve_schrodinger(
                p.with_(fock_cutoff=n_max), sp, ground_state(sp), grid
            )
        curves[n_max] = number_series(series)
    devs = [
        np.max(np.abs(curves[a] - curves[b]))
        for a, b in ((7, 9), (9, 11), (11, 13))
    ]
    assert devs[0] > devs[1] > devs[2]
