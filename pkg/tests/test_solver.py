import numpy as np
import pytest

from vanqver import dynamics
from vanqver.fermion import build_initial_hamiltonian, build_navigator
from vanqver.schedule import AnnealSpec, Schedule
from vanqver.solver import (CHEMICAL_ACCURACY, MolecularProblem,
                            OptimizeConfig, VariationalParams, optimize,
                            run_anneal, standard_aqc, sweep,
                            time_to_chemical_accuracy)


@pytest.fixture(scope="module")
def h2():
    return MolecularProblem.from_fixture("h2")


@pytest.fixture(scope="module")
def h2_converged(h2):
    return optimize(h2, 0.1, OptimizeConfig(epsilon_tol=1e-3))


class TestProblem:
    def test_hf_energy_matches_reference_expectation(self, h2):
        from vanqver.fermion import reference_state
        direct = dynamics.expectation(reference_state(h2.smap), h2.h_fin)
        assert direct == pytest.approx(h2.hf_energy, abs=1e-9)

    def test_fci_matches_dense_oracle(self, h2):
        w = dynamics.full_spectrum(h2.h_fin, k=1).eigenvalues[0]
        assert w == pytest.approx(h2.e_fci, abs=1e-9)

    def test_missing_fixture(self):
        with pytest.raises(FileNotFoundError):
            MolecularProblem.from_fixture("unobtainium")


class TestVariationalParams:
    def test_sign_mask_enforced(self, h2):
        params = h2.initial_params()
        bad = VariationalParams(eta=-params.eta, theta=params.theta,
                                sign_mask=params.sign_mask)
        with pytest.raises(ValueError):
            bad.validate()

    def test_floor_enforced(self, h2):
        params = h2.initial_params()
        tiny = VariationalParams(eta=params.eta * 1e-5, theta=params.theta,
                                 sign_mask=params.sign_mask)
        with pytest.raises(ValueError):
            tiny.validate()


class TestRunAnneal:
    def test_zero_time_gives_hf_energy(self, h2):
        energy, _ = run_anneal(h2.initial_params(), h2, Schedule(T=0.0))
        assert energy == pytest.approx(h2.hf_energy, abs=1e-12)

    def test_deterministic(self, h2):
        params = h2.initial_params()
        e1, _ = run_anneal(params, h2, Schedule(T=0.07))
        e2, _ = run_anneal(params, h2, Schedule(T=0.07))
        assert e1 == e2

    def test_theta_zero_reduces_to_two_term_anneal(self, h2):
        # With theta = 0 and eta equal to the Fock coefficients the anneal is
        # the plain driver+target evolution of the same Hamiltonians.
        params = VariationalParams(eta=h2.eta_hf,
                                   theta=h2.theta_template,
                                   sign_mask=np.sign(h2.eta_hf))
        sched = Schedule(T=0.4)
        energy, _ = run_anneal(params, h2, sched, n_time_steps=400)
        h_ini = build_initial_hamiltonian(h2.eta_hf, h2.smap)
        spec = AnnealSpec.build(h_ini, h2.h_fin, None, sched, 400)
        from vanqver.fermion import reference_state
        psi = dynamics.evolve(spec, reference_state(h2.smap))
        assert energy == pytest.approx(dynamics.expectation(psi, h2.h_fin),
                                       abs=1e-9)

    def test_workspace_matches_generic_evolution(self, h2):
        # Same anneal through the cached sector engine (split steps) and
        # through the general propagator (plain midpoint exponentials); at a
        # fine stepping both integrator errors vanish and the results must
        # agree to propagation accuracy.
        rng = np.random.default_rng(3)
        theta = h2.theta_template.with_values(rng.normal(size=3))
        params = VariationalParams(eta=h2.initial_params().eta * 1.7,
                                   theta=theta,
                                   sign_mask=np.sign(h2.eta_hf))
        sched = Schedule(T=0.2)
        e_fast, psi_fast = run_anneal(params, h2, sched, n_time_steps=4000)
        h_ini = build_initial_hamiltonian(params.eta, h2.smap)
        h_nav = build_navigator(theta, h2.smap)
        spec = AnnealSpec(h_ini, h2.h_fin, h_nav, sched, 4000, conserved=())
        from vanqver.fermion import reference_state
        psi = dynamics.evolve(spec, reference_state(h2.smap))
        assert abs(e_fast - dynamics.expectation(psi, h2.h_fin)) <= 1e-8
        assert np.max(np.abs(psi_fast - psi)) <= 1e-7


class TestStandardAqc:
    def test_short_time_stays_near_hf(self, h2):
        energy = standard_aqc(h2, 0.01)
        assert abs(energy - h2.hf_energy) < 0.01

    def test_long_time_reaches_chemical_accuracy(self, h2):
        energy = standard_aqc(h2, 13.0)
        assert abs(energy - h2.e_fci) <= CHEMICAL_ACCURACY

    def test_matched_short_time_fails(self, h2):
        energy = standard_aqc(h2, 0.1)
        assert abs(energy - h2.e_fci) > CHEMICAL_ACCURACY


class TestOptimize:
    def test_reaches_chemical_accuracy_at_t_01(self, h2, h2_converged):
        assert h2_converged.converged
        assert abs(h2_converged.final_energy - h2.e_fci) <= CHEMICAL_ACCURACY

    def test_final_energy_is_trajectory_minimum(self, h2_converged):
        energies = [p.energy for p in h2_converged.trajectory]
        assert h2_converged.final_energy == pytest.approx(min(energies),
                                                          abs=1e-12)

    def test_sign_mask_preserved_along_trajectory(self, h2, h2_converged):
        mask = np.sign(h2.eta_hf)
        for point in h2_converged.trajectory:
            assert np.all(np.sign(point.eta) == mask)

    def test_zero_iterations_returns_initial_energy(self, h2):
        record = optimize(h2, 0.05, OptimizeConfig(max_iterations=0))
        initial, _ = run_anneal(h2.initial_params(), h2, Schedule(T=0.05))
        assert record.final_energy == pytest.approx(initial, abs=1e-12)
        assert record.n_iterations == 0
        assert not record.converged

    def test_t_zero_returns_hf(self, h2):
        record = optimize(h2, 0.0, OptimizeConfig(max_iterations=2))
        assert record.final_energy == pytest.approx(h2.hf_energy, abs=1e-12)

    def test_variational_bound(self, h2, h2_converged):
        for point in h2_converged.trajectory:
            assert point.energy >= h2.e_fci - 1e-9

    def test_deterministic_rerun(self, h2):
        cfg = OptimizeConfig(max_iterations=2)
        r1 = optimize(h2, 0.05, cfg)
        r2 = optimize(h2, 0.05, cfg)
        assert r1.final_energy == r2.final_energy
        assert r1.n_evaluations == r2.n_evaluations

    def test_dominates_standard_at_matched_time(self, h2):
        for T in (0.1, 0.5):
            record = optimize(h2, T)
            assert record.final_energy <= standard_aqc(h2, T) + 1e-9

    def test_energy_delta_termination(self, h2):
        cfg = OptimizeConfig(epsilon_tol=1e-4, termination="energy-delta",
                             max_iterations=50)
        record = optimize(h2, 0.05, cfg)
        assert record.converged

    def test_json_round_trip_shape(self, h2_converged):
        blob = h2_converged.to_json_dict()
        assert "wall_time" not in blob
        assert blob["final_energy"] == h2_converged.final_energy
        assert len(blob["trajectory"]) == len(h2_converged.trajectory)


class TestTimeToChemicalAccuracy:
    def test_h2_standard_matches_reported_time(self, h2):
        result = time_to_chemical_accuracy(h2, "standard", bracket=(6.0, 20.0))
        assert 6.0 <= result.t_ca <= 20.0
        # Reported crossing is 13; allow the same +-20% band as the other
        # standard baselines.
        assert result.t_ca == pytest.approx(13.0, rel=0.2)

    def test_bracket_auto_expansion(self, h2):
        result = time_to_chemical_accuracy(h2, "standard", bracket=(6.0, 7.0))
        assert result.t_ca == pytest.approx(13.0, rel=0.2)

    def test_bracket_auto_shrink_message(self, h2):
        result = time_to_chemical_accuracy(h2, "standard", bracket=(20.0, 40.0))
        assert any("already accurate" in note for note in result.notes)
        assert result.t_ca <= 20.0

    def test_rejects_bad_bracket(self, h2):
        with pytest.raises(ValueError):
            time_to_chemical_accuracy(h2, "standard", bracket=(1.0, 0.5))
        with pytest.raises(ValueError):
            time_to_chemical_accuracy(h2, "plasma")

    @pytest.mark.slow
    def test_h2_navigated_crossing_at_least_as_early_as_reported(self, h2):
        # The navigated crossing is an optimizer artifact below the reported
        # figure; only the upper side of the band is asserted (the search
        # here finds accuracy earlier than the reported 0.048).
        result = time_to_chemical_accuracy(
            h2, "vanqver", OptimizeConfig(epsilon_tol=1e-3,
                                          max_iterations=30),
            bracket=(0.001, 0.2))
        assert result.t_ca <= 0.048 * 1.5


class TestSweep:
    def test_empty_grid(self, h2):
        assert sweep(h2, "T", [], mode="standard") == []

    def test_t_grid_rows(self, h2):
        rows = sweep(h2, "T", [0.05, 13.0], mode="standard")
        assert len(rows) == 2
        assert rows[0]["error"] == "" and rows[1]["error"] == ""
        assert abs(rows[1]["E_final"] - h2.e_fci) <= CHEMICAL_ACCURACY

    def test_failures_recorded_not_raised(self, h2):
        rows = sweep(h2, "T", [0.05, -1.0], mode="standard")
        assert rows[0]["error"] == ""
        assert rows[1]["error"] != ""

    def test_distance_sweep_uses_problem_factory(self):
        from vanqver.fixtures import p4_fixture_name
        factory = lambda d: MolecularProblem.from_fixture(p4_fixture_name(d))
        rows = sweep(factory, "distance", [0.8], mode="standard", T=0.05)
        assert rows[0]["error"] == ""
        assert rows[0]["d"] == "0.80"

    def test_needs_fixed_t_for_tolerance(self, h2):
        rows = sweep(h2, "tolerance", [1e-3], mode="vanqver", T=None)
        assert rows[0]["error"] != ""
