#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Testes do Gerador de Variáveis Estáveis
"""

import sys
import os
import math

import numpy as np
from scipy import stats

sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from services.stable_rng import (
    ConstantGap, DiscretePareto, ExactPositiveStable, ParetoTail, SeedStream,
    StableParamError, StableParams, stable_sampler
)


def test_pareto_mean():
    """ParetoTail(1.5) tem média 3; média truncada em 1000 confere com 1 + 2(1 − 1000^{−1/2})"""
    print("🔍 Testando média de Pareto...")
    law = ParetoTail(1.5, 1.0)
    assert law.mean == 3.0
    draws = stable_sampler.sample_gap(law, SeedStream(7, 0, 'medium'), 10 ** 6)
    assert draws.min() >= 1.0
    truncated = 1.0 + 2.0 * (1.0 - 1000 ** -0.5)
    assert abs(np.minimum(draws, 1000.0).mean() - truncated) <= 0.05
    assert abs(truncated - law.mean) <= 0.15
    print(f"✅ Média truncada {np.minimum(draws, 1000.0).mean():.4f}")


def test_discrete_pareto_mean():
    """DiscretePareto(1.5, 0.75) tem média 0.5·ζ(1.5); média truncada confere com a soma parcial"""
    print("🔍 Testando média de Pareto discreta...")
    law = DiscretePareto(1.5, 0.75)
    assert abs(law.mean - 1.3062) < 1e-3
    draws = stable_sampler.sample_jump(law, SeedStream(7, 0, 'walk'), 10 ** 6)
    assert draws.dtype == np.int64
    assert np.all(draws != 0)
    truncated = 0.5 * np.sum(np.arange(1, 1001, dtype=float) ** -1.5)
    clipped = np.clip(draws, -1000, 1000).mean()
    assert abs(clipped - truncated) <= 0.05, clipped
    assert abs(truncated - law.mean) <= 0.05
    print(f"✅ Média truncada {clipped:.4f}")


def test_discrete_pareto_tail():
    """P(|ξ| ≥ k) = k^{−α} nos primeiros k"""
    law = DiscretePareto(0.5, 0.5)
    draws = np.abs(stable_sampler.sample_jump(law, SeedStream(11, 0, 'walk'), 200000))
    for k in (1, 4, 16):
        assert abs(np.mean(draws >= k) - k ** -0.5) < 0.01
    assert draws.max() <= 2 ** 52


def test_levy_half_tail():
    """S_{1/2}(1,1,0) é a lei de Lévy: P(X ≤ 4) = erfc(sqrt(1/8))"""
    print("🔍 Testando lei de Lévy...")
    draws = stable_sampler.sample_stable(StableParams(0.5, 1.0, 1.0, 0.0), SeedStream(3, 0, 'oracle'), 200000)
    assert np.all(draws > 0)
    expected = math.erfc(math.sqrt(1.0 / 8.0))
    assert abs(np.mean(draws <= 4.0) - expected) < 0.01
    assert abs(expected - stats.levy.cdf(4.0)) < 1e-12
    print("✅ Cauda de Lévy OK")


def test_gaussian_case():
    """α = 2 dá normal de variância 2σ²"""
    draws = stable_sampler.sample_stable(StableParams(2.0, 0.0, 1.0, 0.0), SeedStream(5), 200000)
    assert abs(draws.var() - 2.0) < 0.05
    assert abs(draws.mean()) < 0.02


def test_stream_determinism():
    """Mesmo fluxo, mesmos valores; réplica ou papel diferente, valores diferentes"""
    law = DiscretePareto(1.5, 0.5)
    a = stable_sampler.sample_jump(law, SeedStream(1, 4, 'walk'), 100)
    b = stable_sampler.sample_jump(law, SeedStream(1, 4, 'walk'), 100)
    c = stable_sampler.sample_jump(law, SeedStream(1, 5, 'walk'), 100)
    d = stable_sampler.sample_jump(law, SeedStream(1, 4, 'medium'), 100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_prefix_consistency():
    """Os primeiros k saltos não dependem de quantos foram pedidos"""
    law = DiscretePareto(1.2, 0.7)
    stream = SeedStream(9, 2, 'walk')
    long = stable_sampler.sample_jump(law, stream, 1000)
    short = stable_sampler.sample_jump(law, stream, 10)
    assert np.array_equal(long[:10], short)
    assert stable_sampler.sample_jump(law, stream) == short[0]


def test_exact_stable_sums():
    """Soma de 8 cópias de S_β(1,1,0) tem a lei de 8^{1/β}·Z"""
    print("🔍 Testando estabilidade exata...")
    law = ExactPositiveStable(0.7)
    sums = law.sample(SeedStream(3, 0, 'medium').generator(), (4000, 8)).sum(axis=1)
    singles = 8 ** (1.0 / 0.7) * law.sample(SeedStream(3, 1, 'medium').generator(), 4000)
    assert stats.ks_2samp(sums, singles).pvalue > 0.001
    assert law.mean is None
    print("✅ Estabilidade OK")


def test_gap_sums():
    """Somas de lacunas: constante exata, agregado estável limitado por baixo"""
    assert stable_sampler.sample_gap_sum(ConstantGap(1.5), 10, SeedStream(1)) == 15.0
    assert stable_sampler.sample_gap_sum(ParetoTail(0.5), 0, SeedStream(1)) == 0.0

    law = ParetoTail(1.5, 2.0)
    gen = SeedStream(2, 0, 'medium').generator()
    aggregated = law.sample_sum(10 ** 7, gen, explicit=2 ** 10)
    assert aggregated >= 2.0 * 10 ** 7
    assert 0 < law.stable_scale < np.inf

    heavy = ParetoTail(0.5)
    total = heavy.sample_sum(10 ** 6, SeedStream(2, 1, 'medium').generator(), explicit=2 ** 10)
    assert total >= 10 ** 6


def test_pareto_survival():
    """P(ζ > 10) = 10^{−β} para ParetoTail com x_min = 1"""
    print("🔍 Testando cauda de Pareto...")
    for beta in (0.5, 1.5):
        draws = stable_sampler.sample_gap(ParetoTail(beta), SeedStream(13, 0, 'medium'), 200000)
        assert abs(np.mean(draws > 10.0) - 10.0 ** -beta) < 0.005, beta
    print("✅ Cauda de Pareto OK")


def test_exact_stable_sums_by_count():
    """Soma de k cópias tem a lei de k^{1/β}·Z para k = 2, 10 e 100"""
    law = ExactPositiveStable(0.6)
    for offset, k in enumerate((2, 10, 100)):
        sums = law.sample(SeedStream(17, offset, 'medium').generator(), (3000, k)).sum(axis=1)
        singles = k ** (1.0 / 0.6) * law.sample(SeedStream(17, 10 + offset, 'medium').generator(), 3000)
        assert stats.ks_2samp(sums, singles).pvalue > 1e-3, k


def test_symmetric_stable_median():
    """S_{1.5}(1, 0, 0) é simétrica: mediana 0 e caudas iguais"""
    draws = stable_sampler.sample_stable(StableParams(1.5, 0.0, 1.0, 0.0), SeedStream(19, 0, 'oracle'), 200000)
    assert abs(np.median(draws)) < 0.02
    assert abs(np.mean(draws <= -1.0) - np.mean(draws >= 1.0)) < 0.01
    assert stats.ks_2samp(draws[:50000], -draws[50000:100000]).pvalue > 1e-3


def test_aggregate_gap_sum_law():
    """Agregado estável além do corte tem a mesma lei da soma explícita"""
    print("🔍 Testando agregado de lacunas...")
    law, count = ParetoTail(0.5), 1000
    gen = SeedStream(23, 0, 'medium').generator()
    aggregated = np.array([law.sample_sum(count, gen, explicit=10) for _ in range(2000)])
    explicit = law.sample(SeedStream(23, 1, 'medium').generator(), (2000, count)).sum(axis=1)
    assert np.all(aggregated >= count * law.x_min)
    assert stats.ks_2samp(aggregated, explicit).pvalue > 1e-3
    print("✅ Agregado OK")


def test_invalid_params():
    """Parâmetros fora do domínio levantam StableParamError"""
    print("🔍 Testando validação de parâmetros...")
    for build in (lambda: StableParams(2.5), lambda: StableParams(1.0), lambda: StableParams(1.5, 2.0),
                  lambda: DiscretePareto(1.0), lambda: DiscretePareto(1.5, 1.5),
                  lambda: ParetoTail(1.0), lambda: ExactPositiveStable(1.2),
                  lambda: SeedStream(1, 0, 'unknown')):
        try:
            build()
        except StableParamError:
            continue
        raise AssertionError("Parâmetro inválido aceito")
    print("✅ Validação OK")


if __name__ == "__main__":
    from test_simple import collect, run_tests
    sys.exit(0 if run_tests("Gerador Estável", collect(dict(globals()))) else 1)
