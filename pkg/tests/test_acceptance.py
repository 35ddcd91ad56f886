"""Acceptance gate: one test per criterion, each printing a PASS line with
its measured figure when the assertion holds.

Criteria with runtime limits assert them; the heavyweight runs (estimator
Monte-Carlo, end-to-end evolution) stay far inside their budgets.
"""

import time

import numpy as np
import pytest

from swarray import analysis, elements, fisher, modes, optimizer, sigmodel, swe
from swarray.constants import SPEED_OF_LIGHT
from swarray.errors import DelayAmbiguityError

from conftest import TILT_AXIS, build_tilted_dipole_model

OMEGA0 = 2 * np.pi * 8e9
DW = 2 * np.pi * 25e6


def _report(criterion: int, message: str):
    print(f"PASS criterion {criterion}: {message}")


class TestAcceptance:
    def test_01_index_algebra(self):
        start = time.monotonic()
        assert modes.mode_count(25) == 1350
        for j in range(1, 1351):
            s, m, n = modes.triple_from_mode_index(j)
            assert modes.mode_index_from_triple(s, m, n) == j
            jj = modes.conjugate_m_index(j)
            assert modes.conjugate_m_index(jj) == j
            assert modes.triple_from_mode_index(jj) == (s, -m, n)
        elapsed = time.monotonic() - start
        assert elapsed < 1.0
        _report(1, f"bijection and involution over 1350 modes in {elapsed:.3f} s")

    def test_02_swc_round_trip(self):
        start = time.monotonic()
        order = 8
        radius = 0.06
        kr = OMEGA0 / SPEED_OF_LIGHT * radius
        grid = swe.SphereGrid.for_order(order)
        rng = np.random.default_rng(7)
        J = modes.mode_count(order)
        values = rng.standard_normal(J) + 1j * rng.standard_normal(J)
        cs = swe.CoefficientSet(order=order, values=values, role="transmission", omega=OMEGA0)
        field = swe.synthesize_field(cs, grid, radius)
        rec = swe.extract_transmission(field, grid, kr, order, OMEGA0)
        rel = np.max(np.abs(rec.values - values)) / np.max(np.abs(values))
        assert rel < 1e-8

        dip_grid = swe.SphereGrid.for_order(6)
        dip = elements.dipole_field(elements.ElementSpec("hertzian_dipole"), dip_grid, 0.05, OMEGA0)
        ts = swe.extract_transmission(dip[0], dip_grid, OMEGA0 / SPEED_OF_LIGHT * 0.05, 6, OMEGA0)
        j201 = modes.mode_index_from_triple(2, 0, 1)
        others = np.delete(np.abs(ts.values), j201 - 1) / np.abs(ts.values[j201 - 1])
        assert np.max(others) < 1e-10
        elapsed = time.monotonic() - start
        assert elapsed < 30.0
        _report(2, f"round-trip rel err {rel:.2e}, dipole spurious modes {np.max(others):.2e}, {elapsed:.2f} s")

    def test_03_orthogonality(self):
        order = 6
        kr = 4.1
        grid = swe.SphereGrid.for_order(order)
        basis = swe._vswf_basis(order, 3, kr, grid)
        weighted = basis * grid.theta_weights[:, None, None] * grid.phi_spacing
        gram = np.einsum("itpc,jtpc->ij", weighted, basis)
        jhat = modes.conjugate_m_index(np.arange(1, modes.mode_count(order) + 1)) - 1
        paired = gram[:, jhat]
        diag = np.diag(paired)
        ratio = np.max(np.abs(paired - np.diag(diag))) / np.min(np.abs(diag))
        assert ratio < 1e-10
        _report(3, f"off-diagonal/diagonal {ratio:.2e} for order {order}")

    def test_04_gradient_suite(self, tilted_model_p21, white_noise):
        start = time.monotonic()
        pulse = sigmodel.PulseSpectrum.flat(21)
        rng = np.random.default_rng(2024)
        steps = 1e-7 * np.array([1e-9, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        worst = 0.0
        for _ in range(50):
            alpha = rng.uniform(0.1, np.pi - 0.1)
            params = sigmodel.SignalParams(
                tau=rng.uniform(0.0, 30e-9),
                theta0=rng.uniform(0.1, np.pi - 0.1),
                phi0=rng.uniform(0.0, 2 * np.pi),
                p_theta=np.sin(alpha),
                p_phi=np.cos(alpha),
                phase_theta=rng.uniform(0.0, 2 * np.pi),
                phase_phi=rng.uniform(0.0, 2 * np.pi),
            )
            grad = fisher.signal_gradient(params, tilted_model_p21, pulse)
            vec = params.as_vector()
            for k in range(7):
                up, down = vec.copy(), vec.copy()
                up[k] += steps[k]
                down[k] -= steps[k]
                wp = sigmodel.assemble_signal_vector(sigmodel.SignalParams(*up), tilted_model_p21, pulse)
                wm = sigmodel.assemble_signal_vector(sigmodel.SignalParams(*down), tilted_model_p21, pulse)
                fd = (wp - wm) / (2 * steps[k])
                rel = np.max(np.abs(grad[:, k] - fd)) / np.max(np.abs(grad[:, k]))
                worst = max(worst, rel)
        assert worst < 1e-6
        elapsed = time.monotonic() - start
        assert elapsed < 120.0
        _report(4, f"worst derivative rel err {worst:.2e} over 50 draws in {elapsed:.1f} s")

    def test_05_fim_structure(self, tilted_model_p21, white_noise):
        pulse = sigmodel.PulseSpectrum.flat(21)
        params = sigmodel.SignalParams(0.0, 0.9, 1.2, np.sin(0.5), np.cos(0.5), 0.1, 0.9)
        res = fisher.fim(params, tilted_model_p21, pulse, white_noise)
        assert np.array_equal(res.matrix, res.matrix.T)
        assert res.eig_min >= -1e-10 * np.trace(res.matrix)

        moved = sigmodel.SignalParams(12e-9, 0.9, 1.2, np.sin(0.5), np.cos(0.5), 0.1, 0.9)
        res_moved = fisher.fim(moved, tilted_model_p21, pulse, white_noise)
        scale = np.sqrt(np.outer(np.diag(res.matrix), np.diag(res.matrix)))
        tau_dev = np.max(np.abs(res.matrix - res_moved.matrix) / scale)
        assert tau_dev < 1e-9

        c = 2.5 - 1.0j
        scaled = fisher.fim(
            params, tilted_model_p21, sigmodel.PulseSpectrum(samples=c * np.ones(21)), white_noise
        )
        pulse_dev = np.max(np.abs(scaled.matrix - abs(c) ** 2 * res.matrix) / scale) / abs(c) ** 2
        assert pulse_dev < 1e-12

        eta = sigmodel.LinearSignalParams(3e-9, 0.9, 1.2, 0.5)
        lin = fisher.fim_linear(eta, tilted_model_p21, pulse, white_noise).matrix
        vec = eta.as_vector()
        steps = 1e-7 * np.array([1e-9, 1.0, 1.0, 1.0])
        cols = []
        for k in range(4):
            up, down = vec.copy(), vec.copy()
            up[k] += steps[k]
            down[k] -= steps[k]
            wp = sigmodel.assemble_signal_vector(
                sigmodel.LinearSignalParams(*up).to_full(), tilted_model_p21, pulse
            )
            wm = sigmodel.assemble_signal_vector(
                sigmodel.LinearSignalParams(*down).to_full(), tilted_model_p21, pulse
            )
            cols.append((wp - wm) / (2 * steps[k]))
        d = np.stack(cols, axis=1)
        fd_fim = (2.0 / white_noise.variance) * np.real(d.conj().T @ d)
        reparam_dev = np.max(np.abs(lin - fd_fim)) / np.max(np.abs(fd_fim))
        assert reparam_dev < 1e-6
        _report(
            5,
            f"PSD, delay-invariance {tau_dev:.1e}, pulse scaling {pulse_dev:.1e}, "
            f"reparameterization vs finite differences {reparam_dev:.1e}",
        )

    def test_06_estimator_sanity(self):
        start = time.monotonic()
        bins = 21
        half = (bins - 1) // 2
        freqs = OMEGA0 + np.arange(-half, half + 1) * DW
        grid = swe.SphereGrid.for_order(4)
        fss = elements.synthesize_array_fields(
            [elements.ElementSpec("hertzian_dipole")], grid, 0.05, freqs
        )
        model = elements.build_reception_model(fss, 4, OMEGA0, DW, bins)
        pulse = sigmodel.PulseSpectrum.flat(bins)
        tau_true = 12.3e-9
        direction = dict(theta0=np.pi / 3, phi0=0.0, p_theta=1.0, p_phi=0.0)
        w_true = sigmodel.assemble_signal_vector(
            sigmodel.SignalParams(tau=tau_true, **direction), model, pulse
        )
        q = sigmodel.assemble_signal_vector(
            sigmodel.SignalParams(tau=0.0, **direction), model, pulse
        )
        snr = 100.0  # 20 dB per sample
        sigma2 = float(np.mean(np.abs(w_true) ** 2) / snr)
        bound = 1.0 / (2.0 / sigma2 * np.sum(model.omega_grid**2 * np.abs(w_true) ** 2))

        tau_max = model.tau_max
        n_grid = 16384
        tau_grid = np.linspace(0.0, tau_max, n_grid, endpoint=False)
        correlator = np.exp(-1j * np.outer(tau_grid, model.omega_grid))
        rng = np.random.default_rng(2024)
        trials = 500
        estimates = np.empty(trials)
        for t in range(trials):
            noise = rng.standard_normal(bins) + 1j * rng.standard_normal(bins)
            x = w_true + np.sqrt(sigma2 / 2.0) * noise
            score = np.real(correlator @ (np.conj(x) * q))
            i = int(np.argmax(score))
            lo, hi = (i - 1) % n_grid, (i + 1) % n_grid
            denom = score[lo] - 2 * score[i] + score[hi]
            delta = 0.5 * (score[lo] - score[hi]) / denom if denom != 0.0 else 0.0
            estimates[t] = tau_grid[i] + delta * (tau_grid[1] - tau_grid[0])
        variance = float(np.var(estimates, ddof=1))
        elapsed = time.monotonic() - start
        assert variance >= bound
        assert variance <= 3.0 * bound
        assert elapsed < 300.0
        _report(
            6,
            f"ML delay variance / bound = {variance / bound:.3f} "
            f"over {trials} trials in {elapsed:.1f} s",
        )

    def test_07_beam_pattern(self, tilted_model_p5):
        # tilted three-element array with 70 mm spacing: about 1.9
        # wavelengths at the carrier, well beyond half-wave sampling
        pol = np.array([0.0, np.sin(np.pi / 4), np.cos(np.pi / 4)])
        true_dir = (np.pi / 6, np.pi / 3)
        peak = analysis.beam_pattern(tilted_model_p5, true_dir, true_dir, pol)
        assert abs(peak - 1.0) < 1e-12

        theta = np.linspace(0.02, np.pi - 0.02, 90)
        phi = np.linspace(0.0, 2.0 * np.pi, 180, endpoint=False)
        grid = analysis.beam_pattern_grid(tilted_model_p5, true_dir, pol, theta, phi)
        assert np.all(grid.values <= 1.0 + 1e-12)
        dist_t = np.abs(theta[:, None] - true_dir[0])
        dist_p = np.minimum(
            np.abs(phi[None, :] - true_dir[1]), 2 * np.pi - np.abs(phi[None, :] - true_dir[1])
        )
        away = (dist_t > 0.25) | (dist_p > 0.25)
        sidelobe = float(np.max(grid.values[away]))
        assert 0.3 < sidelobe < 1.0 - 1e-9
        _report(7, f"peak {peak:.12f}, max sidelobe {sidelobe:.4f} (< 1)")

    def test_08_crlb_structure(self, tilted_model_p5, white_noise):
        pulse = sigmodel.PulseSpectrum.flat(5)
        co = fisher.average_crlb(tilted_model_p5, pulse, white_noise, alpha=np.pi / 2)
        cross = fisher.average_crlb(tilted_model_p5, pulse, white_noise, alpha=0.0)
        ratio = cross.elevation / co.elevation
        assert ratio >= 10.0

        thetas = np.concatenate([[0.01], np.linspace(0.5, np.pi - 0.5, 9)])
        dirs = np.column_stack([thetas, np.full_like(thetas, 0.9)])
        rows = analysis.crlb_map(tilted_model_p5, pulse, white_noise, [np.pi / 4], dirs)
        divergence = rows[0].bound_phi0 / np.median([r.bound_phi0 for r in rows[1:]])
        assert divergence >= 100.0
        _report(
            8,
            f"cross/co average elevation-bound ratio {ratio:.1f}, "
            f"azimuth-bound divergence toward the pole {divergence:.0f}x",
        )

    def test_09_end_to_end_optimization(self):
        start = time.monotonic()
        mapping = elements.GeometryMapping(
            templates=(
                elements.ElementTemplate("crossed_dipole", rotation=elements.GammaRef(3)),
                elements.ElementTemplate(
                    "crossed_dipole", x=elements.GammaRef(0), rotation=elements.GammaRef(4)
                ),
                elements.ElementTemplate(
                    "crossed_dipole",
                    x=elements.GammaRef(1),
                    y=elements.GammaRef(2),
                    rotation=elements.GammaRef(5),
                ),
            )
        )
        scenario = optimizer.ArrayScenario(
            mapping=mapping,
            radius=0.15,
            order=6,
            omega0=OMEGA0,
            delta_omega=DW,
            bins=5,
            pulse=sigmodel.PulseSpectrum.flat(5),
            noise=fisher.NoiseModel.white(0.01),
            domain=optimizer.ParameterDomain.linear(n_theta=8, n_phi=16, n_alpha=4),
        )
        bounds = np.array(
            [
                [0.035, 0.070],
                [0.000, 0.070],
                [0.035, 0.070],
                [0.0, np.pi],
                [0.0, np.pi],
                [0.0, np.pi],
            ]
        )
        x0 = np.array([0.070, 0.0, 0.070, 0.0, 0.0, 0.0])
        config = optimizer.DeConfig(population=8, generations=10, seed=11)
        result = optimizer.optimize_array(scenario, bounds, config, criterion="D", x0=x0)
        elapsed = time.monotonic() - start
        assert elapsed < 600.0
        assert np.all(np.diff(result.trace_best) <= 0.0)
        assert result.best_objective < result.diagnostics["initial_objective"]
        _report(
            9,
            f"objective {result.diagnostics['initial_objective']:.3e} -> "
            f"{result.best_objective:.3e} in {elapsed:.1f} s "
            f"({result.evaluations} evaluations)",
        )

    def test_10_delay_ambiguity_bound(self, tilted_model_p21):
        assert tilted_model_p21.delta_omega == pytest.approx(2 * np.pi * 25e6)
        assert tilted_model_p21.tau_max == pytest.approx(40e-9, rel=1e-12)
        pulse = sigmodel.PulseSpectrum.flat(21)
        params_ok = sigmodel.SignalParams(39.99e-9, 0.5, 0.1, 1.0, 0.0)
        sigmodel.assemble_signal_vector(params_ok, tilted_model_p21, pulse)
        for tau in (40e-9, 41e-9, 1e-6):
            bad = sigmodel.SignalParams(tau, 0.5, 0.1, 1.0, 0.0)
            with pytest.raises(DelayAmbiguityError):
                sigmodel.assemble_signal_vector(bad, tilted_model_p21, pulse)
        _report(10, "25 MHz bin spacing enforces the 40 ns unambiguous-delay limit")
