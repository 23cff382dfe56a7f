#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Gerador de Variáveis Estáveis
Amostragem estável (Chambers-Mallows-Stuck), leis de lacunas e saltos, fluxos de sementes
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Union, Any

import numpy as np
from scipy import special

from config import Config

logger = logging.getLogger(__name__)

# Papéis de fluxo; o código entra na spawn_key da SeedSequence
ROLES = {'medium': 0, 'walk': 1, 'oracle': 2, 'null': 3}

# |ξ| ≤ 2^52 mantém posições exatamente representáveis
JUMP_CAP = 2 ** 52


class StableParamError(ValueError):
    """Parâmetros de lei estável ou de lacunas/saltos inválidos"""


@dataclass(frozen=True)
class SeedStream:
    """Fluxo determinístico (raiz, réplica, papel) independente de ordem e paralelismo"""

    root: int
    replica: int = 0
    role: str = 'walk'

    def __post_init__(self):
        if self.role not in ROLES:
            raise StableParamError(f"Papel de fluxo desconhecido: '{self.role}'")
        if self.root < 0 or self.replica < 0:
            raise StableParamError("Raiz e réplica devem ser não negativas")

    def generator(self, *extra: int) -> np.random.Generator:
        """Gerador PCG64 para este fluxo; 'extra' separa sub-fluxos (ex.: lado e bloco do meio)"""
        sequence = np.random.SeedSequence(
            self.root,
            spawn_key=(self.replica, ROLES[self.role]) + tuple(int(e) for e in extra)
        )
        return np.random.Generator(np.random.PCG64(sequence))

    def with_role(self, role: str) -> 'SeedStream':
        return SeedStream(self.root, self.replica, role)

    def for_replica(self, replica: int) -> 'SeedStream':
        return SeedStream(self.root, replica, self.role)


RandomSource = Union[SeedStream, np.random.Generator]


def _generator(source: RandomSource) -> np.random.Generator:
    if isinstance(source, np.random.Generator):
        return source
    if isinstance(source, SeedStream):
        return source.generator()
    raise StableParamError(f"Fonte aleatória inválida: {type(source).__name__}")


@dataclass(frozen=True)
class StableParams:
    """Lei estável na parametrização 1: índice α, assimetria β, escala σ, locação δ"""

    index: float
    skew: float = 0.0
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not 0 < self.index <= 2:
            raise StableParamError(f"Índice {self.index} fora de (0,2]")
        if self.index == 1:
            raise StableParamError("Índice 1 não é suportado")
        if not -1 <= self.skew <= 1:
            raise StableParamError(f"Assimetria {self.skew} fora de [-1,1]")
        if not self.scale > 0:
            raise StableParamError(f"Escala {self.scale} deve ser positiva")

    def describe(self) -> Dict[str, Any]:
        return {
            'index': self.index, 'skew': self.skew, 'scale': self.scale, 'shift': self.shift,
            'parameterization': 1
        }


def _cms(params: StableParams, gen: np.random.Generator, size) -> np.ndarray:
    alpha, beta = params.index, params.skew
    u = gen.uniform(-np.pi / 2, np.pi / 2, size)
    w = gen.standard_exponential(size)

    if alpha == 2:
        # Gaussiana com variância 2σ²
        return params.shift + params.scale * 2.0 * np.sin(u) * np.sqrt(w)

    b = math.atan(beta * math.tan(math.pi * alpha / 2)) / alpha
    t1 = np.sin(alpha * (u + b)) / (math.cos(alpha * b) * np.cos(u)) ** (1.0 / alpha)
    t2 = (np.cos(alpha * b + (alpha - 1.0) * u) / w) ** ((1.0 - alpha) / alpha)
    return params.shift + params.scale * t1 * t2


# ---------------------------------------------------------------------------
# Leis de lacunas (ζ > 0, meio) e de saltos (ξ ∈ ℤ, caminhada)
# ---------------------------------------------------------------------------

class GapLaw:
    """Lei das lacunas positivas do meio"""

    beta: float

    @property
    def mean(self) -> Optional[float]:
        """ν = E ζ, ou None quando infinito"""
        raise NotImplementedError

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def sample_sum(self, count: int, gen: np.random.Generator,
                   explicit: int = Config.GAP_SUM_EXPLICIT) -> float:
        """Soma de 'count' lacunas i.i.d."""
        if count <= 0:
            return 0.0
        return math.fsum(self.sample(gen, count))

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class ExactPositiveStable(GapLaw):
    """Lacunas estáveis positivas exatas: S_β(1, 1, 0), β ∈ (0,1)"""

    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise StableParamError(f"ExactPositiveStable exige β em (0,1), recebido {self.beta}")

    @property
    def mean(self) -> Optional[float]:
        return None

    @property
    def params(self) -> StableParams:
        return StableParams(self.beta, 1.0, 1.0, 0.0)

    def sample(self, gen, size):
        return _cms(self.params, gen, size)

    def sample_sum(self, count, gen, explicit=Config.GAP_SUM_EXPLICIT):
        if count <= 0:
            return 0.0
        if count <= explicit:
            return math.fsum(self.sample(gen, count))
        # estabilidade: soma de k cópias = k^{1/β}·Z
        return float(count ** (1.0 / self.beta) * _cms(self.params, gen, None))

    def describe(self):
        return {'law': 'exact_positive_stable', 'beta': self.beta, 'mean': None,
                'normalization': 'S_beta(1,1,0), parametrizacao 1; soma de k copias = k^(1/beta) Z'}


@dataclass(frozen=True)
class ParetoTail(GapLaw):
    """Lacunas de Pareto: P(ζ > x) = (x_min/x)^β para x ≥ x_min"""

    beta: float
    x_min: float = 1.0

    def __post_init__(self):
        if not 0 < self.beta < 2 or self.beta == 1:
            raise StableParamError(f"ParetoTail exige β em (0,1)∪(1,2), recebido {self.beta}")
        if not self.x_min > 0:
            raise StableParamError(f"x_min={self.x_min} deve ser positivo")

    @property
    def mean(self):
        if self.beta < 1:
            return None
        return self.x_min * self.beta / (self.beta - 1.0)

    @property
    def stable_scale(self) -> float:
        """σ da lei estável atratora: σ^β = x_min^β Γ(1−β) cos(πβ/2)"""
        value = self.x_min ** self.beta * special.gamma(1.0 - self.beta) * math.cos(math.pi * self.beta / 2)
        return float(value ** (1.0 / self.beta))

    def sample(self, gen, size):
        u = 1.0 - gen.random(size)
        return self.x_min * u ** (-1.0 / self.beta)

    def sample_sum(self, count, gen, explicit=Config.GAP_SUM_EXPLICIT):
        if count <= 0:
            return 0.0
        if count <= explicit:
            return math.fsum(self.sample(gen, count))

        # agregado estável (TLC generalizado) além do corte explícito
        z = float(_cms(StableParams(self.beta, 1.0, 1.0, 0.0), gen, None))
        total = count ** (1.0 / self.beta) * self.stable_scale * z
        if self.beta > 1:
            total += count * self.mean
        return max(total, count * self.x_min)

    def describe(self):
        return {'law': 'pareto_tail', 'beta': self.beta, 'x_min': self.x_min, 'mean': self.mean,
                'normalization': 'P(zeta > x) = (x_min/x)^beta; agregado estavel com escala sigma_beta'}


@dataclass(frozen=True)
class ConstantGap(GapLaw):
    """Lacunas determinísticas ζ ≡ valor"""

    value: float = 1.0
    beta: float = 1.5

    def __post_init__(self):
        if not self.value > 0:
            raise StableParamError(f"Lacuna constante {self.value} deve ser positiva")

    @property
    def mean(self):
        return self.value

    def sample(self, gen, size):
        return np.full(size if size is not None else (), self.value, dtype=float)

    def sample_sum(self, count, gen, explicit=Config.GAP_SUM_EXPLICIT):
        return float(max(count, 0) * self.value)

    def describe(self):
        return {'law': 'constant_gap', 'value': self.value, 'mean': self.value}


class JumpLaw:
    """Lei dos saltos inteiros da caminhada"""

    alpha: float

    @property
    def mean(self) -> Optional[float]:
        raise NotImplementedError

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class DiscretePareto(JumpLaw):
    """P(|ξ| ≥ k) = k^{−α} para k ≥ 1, sinal + com probabilidade p_plus"""

    alpha: float
    p_plus: float = 0.5

    def __post_init__(self):
        if not 0 < self.alpha < 2 or self.alpha == 1:
            raise StableParamError(f"DiscretePareto exige α em (0,1)∪(1,2), recebido {self.alpha}")
        if not 0 <= self.p_plus <= 1:
            raise StableParamError(f"p_plus={self.p_plus} fora de [0,1]")

    @property
    def mean(self):
        if self.alpha < 1:
            return None
        # E|ξ| = Σ_{k≥1} k^{−α} = ζ(α)
        return float((2.0 * self.p_plus - 1.0) * special.zeta(self.alpha, 1))

    def sample(self, gen, size):
        count = 1 if size is None else int(size)
        u = gen.random((count, 2))
        magnitude = np.floor((1.0 - u[:, 0]) ** (-1.0 / self.alpha))
        magnitude = np.minimum(magnitude, JUMP_CAP).astype(np.int64)
        jumps = np.where(u[:, 1] < self.p_plus, magnitude, -magnitude)
        return jumps[0] if size is None else jumps

    def describe(self):
        return {'law': 'discrete_pareto', 'alpha': self.alpha, 'p_plus': self.p_plus, 'mean': self.mean,
                'normalization': 'P(|xi| >= k) = k^(-alpha), |xi| <= 2^52'}


@dataclass(frozen=True)
class ConstantJump(JumpLaw):
    """Saltos determinísticos ξ ≡ valor"""

    value: int = 1
    alpha: float = 1.5

    @property
    def mean(self):
        return float(self.value)

    def sample(self, gen, size):
        if size is None:
            return np.int64(self.value)
        return np.full(int(size), self.value, dtype=np.int64)

    def describe(self):
        return {'law': 'constant_jump', 'value': self.value, 'mean': float(self.value)}


class StableSampler:
    """Serviço de amostragem das leis primitivas"""

    def __init__(self):
        """Inicializa o serviço com os limites configurados"""
        self.gap_sum_explicit = Config.GAP_SUM_EXPLICIT

    def sample_stable(self, params: StableParams, stream: RandomSource, size: Optional[int] = None):
        """Uma (ou 'size') variável(is) estável(is) pelo método de Chambers-Mallows-Stuck"""
        values = _cms(params, _generator(stream), size)
        return float(values) if size is None else values

    def sample_gap(self, law: GapLaw, stream: RandomSource, size: Optional[int] = None):
        values = law.sample(_generator(stream), size)
        return float(values) if size is None else values

    def sample_jump(self, law: JumpLaw, stream: RandomSource, size: Optional[int] = None):
        values = law.sample(_generator(stream), size)
        return int(values) if size is None else values

    def sample_gap_sum(self, law: GapLaw, count: int, stream: RandomSource) -> float:
        """Soma de 'count' lacunas (explícita até o corte, agregada além dele)"""
        try:
            if count < 0:
                raise StableParamError(f"Número de lacunas negativo: {count}")
            return float(law.sample_sum(int(count), _generator(stream), self.gap_sum_explicit))

        except Exception as e:
            logger.error(f"Erro ao somar {count} lacunas: {str(e)}")
            raise


# Instância global do serviço
stable_sampler = StableSampler()

sample_stable = stable_sampler.sample_stable
sample_gap = stable_sampler.sample_gap
sample_jump = stable_sampler.sample_jump
sample_gap_sum = stable_sampler.sample_gap_sum
