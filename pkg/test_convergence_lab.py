#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Testes do Laboratório de Convergência
"""

import sys
import os
import math
from dataclasses import replace

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from services.convergence_lab import (
    DETERMINISTIC, FDD, J1, J2, LabSetup, RegimeError, calibrate_ks_threshold,
    classify_regime, convergence_lab, default_addition_pair, run_replicas
)
from services.stable_rng import ConstantGap, ConstantJump, DiscretePareto, ParetoTail, SeedStream


def _raises(build, error=RegimeError):
    try:
        build()
    except error:
        return True
    return False


def test_regime_table():
    """Expoente e modo de convergência em cada regime"""
    print("🔍 Testando classificação de regimes...")
    subordinated = classify_regime(0.5, 0.5)
    assert subordinated.regime_id == 'subordinated'
    assert subordinated.position_exponent == 4.0 and subordinated.position_mode == FDD

    drifted = classify_regime(1.5, 0.7, mu=1.3)
    assert drifted.regime_id == 'drifted_heavy_medium'
    assert abs(drifted.position_exponent - 1 / 0.7) < 1e-12 and drifted.position_mode == J2

    light = classify_regime(0.5, 1.5, nu=3.0)
    assert light.regime_id == 'light_medium'
    assert light.position_exponent == 2.0 and light.position_mode == J1

    balanced = classify_regime(1.5, 1.5, mu=1.3, nu=3.0)
    assert balanced.regime_id == 'ballistic' and balanced.position_mode == DETERMINISTIC
    assert balanced.position_exponent == 1.0
    assert abs(balanced.fluctuation_exponent - 1 / 1.5) < 1e-12 and balanced.fluctuation_mode == J2

    heavy_walk = classify_regime(1.8, 1.2, mu=1.0, nu=6.0)
    assert abs(heavy_walk.fluctuation_exponent - 1 / 1.2) < 1e-12 and heavy_walk.fluctuation_mode == J2
    light_walk = classify_regime(1.2, 1.8, mu=1.0, nu=2.25)
    assert abs(light_walk.fluctuation_exponent - 1 / 1.2) < 1e-12 and light_walk.fluctuation_mode == J1

    assert classify_regime(1.5, 0.5, mu=0.0).regime_id == 'subordinated'
    assert classify_regime(1.5, 0.5, 0.3).position_exponent == 2.0
    assert _raises(lambda: classify_regime(1.0, 0.5))
    assert _raises(lambda: classify_regime(1.5, 1.0))
    assert _raises(lambda: classify_regime(1.5, 2.5))
    print("✅ Regimes OK")


def test_regime_table_without_nu():
    """Só (α, β, μ): a tabela de regimes é total sem ν"""
    table = [
        ((0.5, 0.5, None), 'subordinated', 4.0, FDD, None, None),
        ((1.5, 0.5, 0.3), 'drifted_heavy_medium', 2.0, J2, None, None),
        ((0.5, 1.5, 0.0), 'light_medium', 2.0, J1, None, None),
        ((1.8, 1.2, 0.5), 'ballistic', 1.0, DETERMINISTIC, 1 / 1.2, J2),
        ((1.2, 1.8, 0.5), 'ballistic', 1.0, DETERMINISTIC, 1 / 1.2, J1),
        ((1.5, 1.5, 1.0), 'ballistic', 1.0, DETERMINISTIC, 1 / 1.5, J2),
    ]
    for args, regime_id, gamma, mode, fluctuation, fluctuation_mode in table:
        regime = classify_regime(*args)
        assert regime.regime_id == regime_id, args
        assert abs(regime.position_exponent - gamma) < 1e-12 and regime.position_mode == mode, args
        assert regime.nu is None
        if fluctuation is None:
            assert regime.fluctuation_exponent is None
        else:
            assert abs(regime.fluctuation_exponent - fluctuation) < 1e-12
            assert regime.fluctuation_mode == fluctuation_mode

    setup = LabSetup(classify_regime(1.8, 1.2, 0.5), ParetoTail(1.2), DiscretePareto(1.8, 0.75), seed=1)
    assert _raises(lambda: convergence_lab.exponent_fit(setup, 1.0, [16, 32, 64, 128, 256], 10,
                                                        target='fluctuation'))


def test_lab_setup():
    """LabSetup deriva μ e ν das leis"""
    setup = LabSetup.from_parameters(1.5, 0.7, p_plus=0.75, seed=3)
    assert setup.regime.regime_id == 'drifted_heavy_medium'
    assert abs(setup.regime.mu - setup.jump_law.mean) < 1e-15
    symmetric = LabSetup.from_parameters(1.5, 0.7, p_plus=0.5)
    assert symmetric.regime.regime_id == 'subordinated'
    assert abs(symmetric.regime.position_exponent - 1 / (1.5 * 0.7)) < 1e-12
    assert LabSetup.from_parameters(1.5, 1.5, p_plus=0.75).regime.nu == 3.0
    assert _raises(lambda: LabSetup.from_parameters(1.5, 0.7, gap='gamma'))
    assert setup.describe()['seed'] == 3


def test_ks_threshold():
    """Limiar KS calibrado perto do quantil assintótico de 99%"""
    threshold = calibrate_ks_threshold((1000, 1000))
    assert 0.05 < threshold < 0.1
    assert calibrate_ks_threshold((1000, 1000)) == threshold


def test_oracle_agreement():
    """Lacunas estáveis exatas: simulação e oráculo condicional têm a mesma lei"""
    print("🔍 Testando oráculo exato...")
    setup = LabSetup.from_parameters(0.5, 0.5, gap='stable', seed=11)
    report = convergence_lab.oracle_test(setup, 16, 1.0, 1000, jobs=1)
    assert report.statistic <= 1.5 * report.threshold, report
    assert report.sizes == (1000, 1000)

    shifted = convergence_lab.oracle_test(setup, 16, 1.0, 1000, exponent_shift=0.5, jobs=1)
    assert not shifted.verdict
    assert _raises(lambda: convergence_lab.exact_marginal_oracle(
        LabSetup.from_parameters(0.5, 0.5), 16, 1.0, SeedStream(1, 0, 'oracle')))
    print(f"✅ D={report.statistic:.4f} (controle D={shifted.statistic:.4f})")


def test_fdd_negative_control():
    """Expoente deslocado reprova a autoconsistência; menos de 1000 réplicas é recusado"""
    print("🔍 Testando controle negativo de fdd...")
    setup = LabSetup.from_parameters(1.5, 1.5, p_plus=0.5, seed=5)
    shifted = convergence_lab.fdd_self_consistency(setup, 1.0, 32, 4, 1000, exponent_shift=1.0, jobs=1)
    assert not shifted.verdict
    assert shifted.verdict == (shifted.statistic <= shifted.threshold)
    assert _raises(lambda: convergence_lab.fdd_self_consistency(setup, 1.0, 32, 4, 999))
    print(f"✅ D={shifted.statistic:.4f}")


def test_fdd_joint_structure():
    """Teste conjunto: três marginais e uma linha bidimensional"""
    setup = LabSetup.from_parameters(1.5, 1.5, p_plus=0.5, seed=6)
    report = convergence_lab.fdd_joint_test(setup, 16, 2, 300, jobs=1)
    table = report.tables['ks']
    assert len(table) == 4
    assert table['t'].iloc[-1] == '0.5,1.0'
    assert 0 < table['threshold'].iloc[-1] < 1


def test_exponent_ballistic():
    """Voo determinístico Y_n = 3n: inclinação 1"""
    print("🔍 Testando ajuste de expoente...")
    regime = classify_regime(1.5, 1.5, mu=2.0, nu=1.5)
    setup = LabSetup(regime, ConstantGap(1.5), ConstantJump(2, 1.5), seed=1)
    fit = convergence_lab.exponent_fit(setup, 1.0, [16, 32, 64, 128, 256], 3, jobs=1)
    assert fit.statistic == 'median_abs'
    assert np.allclose(fit.values, [3.0 * n for n in fit.n_grid])
    assert abs(fit.slope - 1.0) < 1e-9 and fit.verdict(0.05)
    print("✅ Inclinação 1")


def test_exponent_medium():
    """Somas de k lacunas Pareto(1/2): escala k^2"""
    setup = LabSetup.from_parameters(0.5, 0.5, seed=2)
    fit = convergence_lab.exponent_fit(setup, 1.0, [64, 128, 256, 512, 1024], 1000, target='medium', jobs=1)
    assert fit.expected == 2.0
    assert fit.verdict(0.15), fit.slope
    assert list(fit.table()['n']) == [64, 128, 256, 512, 1024]


def test_exponent_grid_rules():
    """Grade curta ou não geométrica é recusada"""
    setup = LabSetup.from_parameters(1.5, 0.7, p_plus=0.75)
    assert _raises(lambda: convergence_lab.exponent_fit(setup, 1.0, [16, 32, 64, 128], 10))
    assert _raises(lambda: convergence_lab.exponent_fit(setup, 1.0, [16, 32, 64, 100, 256], 10))
    assert _raises(lambda: convergence_lab.exponent_fit(setup, 1.0, [16, 32, 64, 128, 256], 10,
                                                        target='fluctuation'))


def test_addition_continuity():
    """Saltos disjuntos: J2 ≤ 3/k + folga e bijeção fundida de custo 1/k"""
    print("🔍 Testando continuidade da soma...")
    x, y = default_addition_pair()
    report = convergence_lab.addition_continuity_experiment(x, y, (4, 8, 16, 32), 800)
    table = report.tables['distances']
    assert report.verdict
    assert list(table['k']) == [4, 8, 16, 32]
    assert np.all(np.diff(table['distance']) <= 0)
    assert report.details['monotone'] and report.details['converging']
    fine = table[table['k'] >= 8]
    assert np.all(fine['merged_witness_cost'] <= 1.0 / fine['k'] + 1e-9)
    print("✅ Continuidade OK")


def test_addition_trend():
    """Deslocamentos crescentes: dentro da cota, mas sem tendência até a folga"""
    x, y = default_addition_pair()
    report = convergence_lab.addition_continuity_experiment(x, y, (32, 16, 8, 4), 800)
    assert report.details['within_bound']
    assert not report.details['monotone'] and not report.details['converging']
    assert not report.verdict


def test_addition_shared_jump():
    """Salto compartilhado: a distância estaciona em 1"""
    x, y = default_addition_pair(shared=True)
    assert _raises(lambda: convergence_lab.addition_continuity_experiment(x, y, (4, 8), 400))
    report = convergence_lab.addition_continuity_experiment(x, y, (4, 8, 16, 32), 400, require_disjoint=False)
    assert not report.verdict
    assert report.details['plateau'] > 0.4
    assert not report.details['converging']
    assert report.details['shared_jumps'] == [0.5]


def test_reorder_suite():
    """Cota de reordenação em todas as réplicas"""
    setup = LabSetup.from_parameters(1.5, 1.5, p_plus=0.75, seed=4)
    report = convergence_lab.reorder_suite(setup, 256, 1.0, 5, jobs=1)
    assert report.verdict
    assert len(report.tables['replicas']) == 5
    assert report.details['worst_ratio'] <= 1.0
    assert _raises(lambda: convergence_lab.reorder_suite(LabSetup.from_parameters(1.5, 1.5, p_plus=0.25), 64))


def test_decomposition_suite():
    """Resíduos de arredondamento nas instâncias (α, β) da grade"""
    print("🔍 Testando decomposição em lote...")
    report = convergence_lab.decomposition_suite(9, 512, 1.0, seed=7, jobs=1)
    table = report.tables['residuals']
    assert report.verdict
    assert len(table) == 9
    assert sorted(set(zip(table['alpha'], table['beta']))) == [(a, b) for a in (1.2, 1.5, 1.8)
                                                               for b in (1.2, 1.5, 1.8)]
    print(f"✅ Resíduo máximo {report.details['max_residual']:.3e}")


def test_j2_gap_structure():
    """J2 nunca excede J1 por réplica; pré-condição β < 1 com deriva"""
    setup = LabSetup.from_parameters(1.5, 0.6, p_plus=0.75, seed=9)
    report = convergence_lab.j2_gap_experiment(setup, (64, 128), 3, 200, jobs=1)
    assert report.details['j2_below_j1']
    assert list(report.tables['medians']['n']) == [64, 128]
    assert _raises(lambda: convergence_lab.j2_gap_experiment(LabSetup.from_parameters(1.5, 1.5, p_plus=0.75)))
    assert _raises(lambda: convergence_lab.j2_gap_experiment(LabSetup.from_parameters(1.5, 0.6)))


def test_j2_gap_trend():
    """Mediana de J2 cai com n; grade invertida reprova a tendência"""
    print("🔍 Testando tendência de J2...")
    setup = LabSetup.from_parameters(1.5, 0.6, p_plus=0.75, seed=9)
    report = convergence_lab.j2_gap_experiment(setup, (64, 256, 1024), 15, 400, jobs=1)
    assert report.details['j2_decreasing'], report.tables['medians']
    reversed_grid = convergence_lab.j2_gap_experiment(setup, (1024, 64), 15, 400, jobs=1)
    assert not reversed_grid.details['j2_decreasing']
    assert not reversed_grid.verdict
    print(f"✅ J2: {list(report.tables['medians']['median_j2'].round(4))}")


def test_exponent_position_heavy_medium():
    """Lacunas estáveis exatas: inclinação 1/(αβ) sem deriva e 1/β com deriva"""
    print("🔍 Testando expoentes de posição...")
    grid = [64, 128, 256, 512, 1024]
    for setup in (LabSetup.from_parameters(0.5, 0.5, gap='stable', seed=21),
                  LabSetup.from_parameters(1.5, 0.7, p_plus=0.75, gap='stable', seed=22)):
        fit = convergence_lab.exponent_fit(setup, 1.0, grid, 300, jobs=1)
        assert fit.statistic == 'iqr'
        assert fit.verdict(0.2), (setup.regime.regime_id, fit.slope, fit.expected)
        assert not replace(fit, expected=fit.expected + 0.6).verdict(0.2)
        print(f"✅ {setup.regime.regime_id}: {fit.slope:.3f} (esperado {fit.expected:.3f})")


def test_exponent_fluctuations():
    """Regime balístico: flutuações em 1/β quando α > β e em 1/α quando α < β"""
    print("🔍 Testando expoentes de flutuação...")
    grid = [512, 1024, 2048, 4096, 8192]
    for alpha, beta in ((1.8, 1.2), (1.2, 1.8)):
        setup = LabSetup.from_parameters(alpha, beta, p_plus=0.75, seed=23)
        fit = convergence_lab.exponent_fit(setup, 1.0, grid, 300, target='fluctuation', jobs=1)
        assert abs(fit.expected - 1 / min(alpha, beta)) < 1e-12
        # termo 1/max(α, β) ainda pesa nesta grade e puxa a inclinação para baixo
        assert fit.verdict(0.25), (alpha, beta, fit.slope)
        assert not replace(fit, expected=fit.expected + 0.6).verdict(0.25)
        print(f"✅ α={alpha} β={beta}: {fit.slope:.3f} (esperado {fit.expected:.3f})")


def test_fdd_self_consistency_passes():
    """Regime subordinado com lacunas estáveis: n e 4n têm a mesma lei reescalada"""
    setup = LabSetup.from_parameters(0.5, 0.5, gap='stable', seed=12)
    report = convergence_lab.fdd_self_consistency(setup, 1.0, 64, 4, 1000, jobs=1)
    assert report.verdict, report
    assert report.sizes == (1000, 1000)


def test_jobs_and_replica_order():
    """Resultados não dependem de jobs nem da ordem das réplicas"""
    print("🔍 Testando independência de jobs...")
    assert run_replicas(math.sqrt, [1, 4, 9, 16], 2) == run_replicas(math.sqrt, [1, 4, 9, 16], 1)

    setup = LabSetup.from_parameters(1.5, 0.7, p_plus=0.75, seed=13)
    serial = convergence_lab._scaled_positions(setup, 64, [0.5, 1.0], range(8), 1.0, jobs=1)
    pooled = convergence_lab._scaled_positions(setup, 64, [0.5, 1.0], range(8), 1.0, jobs=2)
    backwards = convergence_lab._scaled_positions(setup, 64, [0.5, 1.0], range(7, -1, -1), 1.0, jobs=1)
    assert np.array_equal(serial, pooled)
    assert np.array_equal(serial[::-1], backwards)

    stable = LabSetup.from_parameters(0.5, 0.5, gap='stable', seed=14)
    first = convergence_lab.fdd_self_consistency(stable, 1.0, 16, 4, 1000, jobs=1)
    second = convergence_lab.fdd_self_consistency(stable, 1.0, 16, 4, 1000, jobs=2)
    assert first.to_dict() == second.to_dict()
    print("✅ Independência OK")


def test_run_spec():
    """Arquivo de experimento com controle negativo esperado"""
    print("🔍 Testando run_spec...")
    spec = {
        'seed': 5,
        'tests': [
            {'name': 'decomposition', 'replicas': 3, 'n': 256},
            {'name': 'addition', 'shared': True, 'm': 400, 'expect_fail': True},
        ],
    }
    report = convergence_lab.run_spec(spec, jobs=1)
    assert report.verdict
    assert [t['name'] for t in report.details['tests']] == ['decomposition', 'addition']
    assert _raises(lambda: convergence_lab.run_spec({'tests': [{'name': 'unknown', 'alpha': 1.5, 'beta': 0.5}]}))
    assert _raises(lambda: convergence_lab.run_spec({'seed': 1}))
    print("✅ run_spec OK")


if __name__ == "__main__":
    from test_simple import collect, run_tests
    sys.exit(0 if run_tests("Laboratório de Convergência", collect(dict(globals()))) else 1)
