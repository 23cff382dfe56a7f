#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Álgebra de Caminhos em Escada
Reescalas do meio, da caminhada e do voo; composição, soma, convenções de lado e
a decomposição de flutuações
"""

import logging
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Optional, Tuple

import numpy as np

from services.medium_walk import Flight, Medium, Walk

logger = logging.getLogger(__name__)

TWO_SIDED = 'two_sided'
CADLAG = 'cadlag'


class PathDomainError(ValueError):
    """Domínio, convenção ou pré-condição de reescala incompatível"""


@dataclass(frozen=True)
class RescaleTag:
    """Origem de um caminho reescalado"""

    process: str
    scale: float
    exponent: float
    centering: Optional[float] = None


@dataclass(frozen=True, eq=False)
class StepPath:
    """
    Função constante por partes em [a, b): values[j] vale na célula entre edges[j] e edges[j+1].
    Convenção 'two_sided': células [e_j, e_{j+1}) em t ≥ 0 e (e_j, e_{j+1}] em t < 0;
    'cadlag': [e_j, e_{j+1}) em toda parte.
    """

    edges: np.ndarray
    values: np.ndarray
    convention: str = TWO_SIDED
    tag: Optional[RescaleTag] = None
    extend: Optional[Callable[[float, float], 'StepPath']] = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'values', values)

        if self.convention not in (TWO_SIDED, CADLAG):
            raise PathDomainError(f"Convenção desconhecida: '{self.convention}'")
        if edges.ndim != 1 or len(edges) < 2 or len(values) != len(edges) - 1:
            raise PathDomainError("Um caminho precisa de m+1 bordas e m valores (m ≥ 1)")
        if not np.all(np.diff(edges) > 0):
            raise PathDomainError("Bordas devem ser estritamente crescentes")

        a, b = edges[0], edges[-1]
        if a < 0 and b < 0:
            raise PathDomainError(f"Domínio [{a}, {b}) deve conter 0 ou estar em ℝ⁺")
        if a < 0 < b:
            zero = np.flatnonzero(edges == 0.0)
            if zero.size == 0:
                raise PathDomainError("Domínio que contém 0 precisa de 0 como borda")
            j = int(zero[0])
            if values[j - 1] != values[j]:
                raise PathDomainError("Caminho bilateral deve ser contínuo em 0")

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self.edges[0]), float(self.edges[-1])

    @property
    def m(self) -> int:
        return len(self.values)

    def cell_index(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a, b = self.domain
        if np.any(t < a) or np.any(t >= b):
            raise PathDomainError(f"Tempo fora do domínio [{a}, {b})")

        index = np.searchsorted(self.edges, t, side='right') - 1
        if self.convention == TWO_SIDED and a < 0:
            left = np.searchsorted(self.edges, t, side='left') - 1
            index = np.where(t < 0, left, index)
        return np.clip(index, 0, self.m - 1)

    def evaluate(self, t):
        values = self.values[self.cell_index(t)]
        return float(values) if np.ndim(values) == 0 else values

    def __call__(self, t):
        return self.evaluate(t)


def _same_domain(x: StepPath, y: StepPath):
    if x.domain != y.domain:
        raise PathDomainError(f"Domínios diferentes: {x.domain} e {y.domain}")
    if x.convention != y.convention and x.domain[0] < 0:
        raise PathDomainError("Convenções de lado diferentes")


def _merged(x: StepPath, y: StepPath, combine: Callable) -> StepPath:
    edges = np.union1d(x.edges, y.edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return StepPath(edges, combine(x.evaluate(mid), y.evaluate(mid)), x.convention)


def _medium_cells(medium: Medium, scale: float, k_neg: int, k_pos: int,
                  mode: str, beta: float, nu: Optional[float]) -> StepPath:
    ks = np.arange(-k_neg, k_pos + 1, dtype=np.int64)
    edges = ks / scale
    # célula negativa ((k−1)/s, k/s] carrega ω_k, positiva [k/s, (k+1)/s) carrega ω_k
    sites = np.concatenate([ks[1:k_neg + 1], ks[k_neg:-1]])
    omega = medium.targets_long(sites)

    if mode == 'hat':
        values = (omega / np.longdouble(scale ** (1.0 / beta))).astype(float)
        tag = RescaleTag('omega_hat', scale, 1.0 / beta)
    elif mode == 'bar':
        values = (omega / np.longdouble(scale)).astype(float)
        tag = RescaleTag('omega_bar', scale, 1.0)
    else:
        centered = omega - sites.astype(np.longdouble) * np.longdouble(nu)
        values = (centered / np.longdouble(scale ** (1.0 / beta))).astype(float)
        tag = RescaleTag('omega_tilde', scale, 1.0 / beta, nu)

    extend = partial(_medium_covering, medium, scale, mode, beta, nu)
    return StepPath(edges, values, TWO_SIDED, tag, extend)


def _medium_covering(medium: Medium, scale: float, mode: str, beta: float,
                     nu: Optional[float], lo: float, hi: float) -> StepPath:
    k_neg = max(int(np.ceil(-lo * scale)) + 2, 1)
    k_pos = max(int(np.ceil(hi * scale)) + 2, 1)
    return _medium_cells(medium, scale, k_neg, k_pos, mode, beta, nu)


class PathAlgebra:
    """Serviço de construção e combinação de caminhos em escada"""

    def rescale_medium(self, medium: Medium, scale: float, mode: str, beta: float,
                       nu: Optional[float] = None, M: Optional[float] = None) -> StepPath:
        """
        ω̂ (hat, β<1), ω̄ e ω̃ (bar/tilde, β∈(1,2), ν finito) na escala espacial 'scale'
        em [−M, M); sem M usa o alcance já gerado do meio.
        """
        if mode not in ('hat', 'bar', 'tilde'):
            raise PathDomainError(f"Reescala desconhecida: '{mode}'")
        if mode == 'hat' and not 0 < beta < 1:
            raise PathDomainError(f"ω̂ exige β em (0,1), recebido {beta}")
        if mode in ('bar', 'tilde') and not (1 < beta < 2 and nu is not None and np.isfinite(nu)):
            raise PathDomainError(f"ω̄/ω̃ exigem β em (1,2) e ν finito (β={beta}, ν={nu})")
        if not scale > 0:
            raise PathDomainError(f"Escala {scale} deve ser positiva")

        if M is not None:
            k = max(int(np.ceil(M * scale)), 1)
            medium.ensure(-k + 1, k - 1)
            return _medium_cells(medium, scale, k, k, mode, beta, nu)

        lo, hi = medium.generated_range
        return _medium_cells(medium, scale, max(-lo, 0) + 1, hi + 1, mode, beta, nu)

    def rescale_walk(self, walk: Walk, n: int, mode: str, alpha: float,
                     mu: Optional[float] = None, T: Optional[float] = None) -> StepPath:
        """Ŝ, S̄ ou S̃ em [0, T): a célula [k/n, (k+1)/n) carrega S_k"""
        if mode not in ('hat', 'bar', 'tilde'):
            raise PathDomainError(f"Reescala desconhecida: '{mode}'")
        if mode in ('bar', 'tilde') and not (1 < alpha < 2 and mu is not None and np.isfinite(mu)):
            raise PathDomainError(f"S̄/S̃ exigem α em (1,2) e μ finito (α={alpha}, μ={mu})")
        T = walk.n / n if T is None else T
        cells = int(np.ceil(n * T))
        if cells < 1 or cells - 1 > walk.n:
            raise PathDomainError(f"Caminhada de {walk.n} passos não cobre [0, {T}) na escala {n}")

        ks = np.arange(cells)
        edges = np.concatenate([ks / n, [T]])
        positions = walk.positions[:cells].astype(float)
        if mode == 'hat':
            values, tag = positions / n ** (1.0 / alpha), RescaleTag('walk_hat', n, 1.0 / alpha)
        elif mode == 'bar':
            values, tag = positions / n, RescaleTag('walk_bar', n, 1.0)
        else:
            values = (positions - ks * mu) / n ** (1.0 / alpha)
            tag = RescaleTag('walk_tilde', n, 1.0 / alpha, mu)
        return StepPath(edges, values, CADLAG, tag)

    def rescale_flight(self, flight: Flight, n: int, mode: str, exponent: float = 1.0,
                       center: Optional[float] = None, T: Optional[float] = None) -> StepPath:
        """
        Ŷ (hat: Y_k/n^γ), Ȳ (bar: Y_k/n) ou Ỹ (tilde: (Y_k − center·k)/n^e) em [0, T).
        Ỹ usa o centro em escada ⌊nt⌋, que difere do linear por no máximo 'center'.
        """
        T = flight.n / n if T is None else T
        cells = int(np.ceil(n * T))
        if cells < 1 or cells - 1 > flight.n:
            raise PathDomainError(f"Voo de {flight.n} passos não cobre [0, {T})")
        ks = np.arange(cells)
        edges = np.concatenate([ks / n, [T]])
        y = flight.positions[:cells]

        if mode == 'hat':
            return StepPath(edges, y / n ** exponent, CADLAG, RescaleTag('flight_hat', n, exponent))
        if mode == 'bar':
            return StepPath(edges, y / n, CADLAG, RescaleTag('flight_bar', n, 1.0))
        if mode == 'tilde':
            if center is None:
                raise PathDomainError("Ỹ exige o centro νμ")
            return StepPath(edges, (y - center * ks) / n ** exponent, CADLAG,
                            RescaleTag('flight_tilde', n, exponent, center))
        raise PathDomainError(f"Reescala desconhecida: '{mode}'")

    def _covering(self, w: StepPath, lo: float, hi: float) -> StepPath:
        a, b = w.domain
        if lo >= a and hi < b:
            return w
        if w.extend is None:
            raise PathDomainError(f"Imagem [{lo}, {hi}] fora do domínio [{a}, {b})")
        return w.extend(min(lo, a), max(hi, b))

    def compose(self, w: StepPath, s: StepPath) -> StepPath:
        """(w∘s)(t) = w(s(t)), com as bordas de s"""
        w = self._covering(w, float(s.values.min()), float(s.values.max()))
        return StepPath(s.edges, w.evaluate(s.values), s.convention)

    def compose_with_drift(self, w: StepPath, slope: float, T: float) -> StepPath:
        """w∘(slope·id) em [0, T), quebrando nas pré-imagens das bordas de w"""
        if slope == 0:
            raise PathDomainError("Inclinação nula")
        image = sorted((0.0, slope * T))
        w = self._covering(w, image[0], image[1])
        inner = w.edges[(w.edges > image[0]) & (w.edges < image[1])]
        edges = np.unique(np.concatenate([[0.0, T], inner / slope]))
        edges = edges[(edges >= 0.0) & (edges <= T)]
        mid = 0.5 * (edges[:-1] + edges[1:])
        return StepPath(edges, w.evaluate(slope * mid), CADLAG)

    def add(self, x: StepPath, y: StepPath) -> StepPath:
        _same_domain(x, y)
        return _merged(x, y, np.add)

    def scale(self, x: StepPath, c: float) -> StepPath:
        return StepPath(x.edges, c * x.values, x.convention)

    def shift(self, x: StepPath, c: float) -> StepPath:
        return StepPath(x.edges, x.values + c, x.convention)

    def cadlag_ify(self, f: StepPath) -> StepPath:
        """Versão càdlàg: valores nas bordas negativas passam a vir da célula à direita"""
        if f.convention == CADLAG or f.domain[0] >= 0:
            return f
        return replace(f, convention=CADLAG, extend=None)

    def restrict(self, path: StepPath, a: float, b: float) -> StepPath:
        lo, hi = path.domain
        if not lo <= a < b <= hi:
            raise PathDomainError(f"[{a}, {b}) não está contido em [{lo}, {hi})")
        inner = path.edges[(path.edges > a) & (path.edges < b)]
        edges = np.concatenate([[a], inner, [b]])
        mid = 0.5 * (edges[:-1] + edges[1:])
        return StepPath(edges, path.evaluate(mid), path.convention, path.tag)

    def jump_times(self, path: StepPath) -> np.ndarray:
        return path.edges[1:-1][path.values[1:] != path.values[:-1]]

    def is_continuous_at(self, path: StepPath, t: float) -> bool:
        return not np.any(self.jump_times(path) == t)

    def shift_jumps(self, path: StepPath, delta: float) -> StepPath:
        """Desloca todos os tempos de salto por delta (domínio em ℝ⁺)"""
        a, b = path.domain
        if a < 0:
            raise PathDomainError("shift_jumps exige domínio em ℝ⁺")
        compact = self.compress(path)
        inner = compact.edges[1:-1] + delta
        if inner.size and (inner[0] <= a or inner[-1] >= b):
            raise PathDomainError(f"Deslocamento {delta} tira um salto do domínio [{a}, {b})")
        return StepPath(np.concatenate([[a], inner, [b]]), compact.values, path.convention)

    def compress(self, path: StepPath) -> StepPath:
        """Funde células vizinhas de mesmo valor (mantendo 0 como borda)"""
        keep = np.concatenate([[True], path.values[1:] != path.values[:-1]])
        inner = path.edges[1:-1]
        keep[1:] |= inner == 0.0
        edges = np.concatenate([path.edges[:-1][keep], [path.edges[-1]]])
        return StepPath(edges, path.values[keep], path.convention, path.tag)

    def fluctuation_decomposition_residual(self, flight: Flight, n: int, T: float,
                                           alpha: float, beta: float, mu: float, nu: float,
                                           density: int = 4) -> float:
        """
        sup_t |n(Ȳ(t) − μνt) − [n^{1/β} ω̃(S̄(t)) + n^{1/α} ν S̃(t) + νμ(⌊nt⌋ − nt)]|
        sobre a grade t = j/(n·density) em [0, T).
        """
        try:
            if not (1 < alpha < 2 and 1 < beta < 2):
                raise PathDomainError(f"Decomposição exige α, β em (1,2) (α={alpha}, β={beta})")
            if mu is None or mu == 0 or nu is None or not np.isfinite(nu):
                raise PathDomainError("Decomposição exige μ ≠ 0 e ν finito")

            walk_bar = self.rescale_walk(flight.walk, n, 'bar', alpha, mu, T)
            walk_tilde = self.rescale_walk(flight.walk, n, 'tilde', alpha, mu, T)
            medium_bar = self.rescale_medium(flight.medium, n, 'bar', beta, nu)
            medium_tilde = self.rescale_medium(flight.medium, n, 'tilde', beta, nu)

            flight_bar = self.compose(medium_bar, walk_bar)
            medium_tilde_at_walk = self.compose(medium_tilde, walk_bar)

            t = np.arange(int(np.ceil(n * T * density))) / (n * density)
            t = t[t < T]
            lhs = n * (flight_bar.evaluate(t) - mu * nu * t)
            rhs = (n ** (1.0 / beta) * medium_tilde_at_walk.evaluate(t)
                   + n ** (1.0 / alpha) * nu * walk_tilde.evaluate(t)
                   + nu * mu * (np.floor(n * t) - n * t))
            residual = float(np.max(np.abs(lhs - rhs)))
            logger.debug(f"Resíduo da decomposição (n={n}): {residual:.3e}")
            return residual

        except Exception as e:
            logger.error(f"Erro ao calcular resíduo da decomposição (n={n}): {str(e)}")
            raise


# Instância global do serviço
path_algebra = PathAlgebra()

rescale_medium = path_algebra.rescale_medium
rescale_walk = path_algebra.rescale_walk
rescale_flight = path_algebra.rescale_flight
compose = path_algebra.compose
compose_with_drift = path_algebra.compose_with_drift
add = path_algebra.add
scale = path_algebra.scale
shift = path_algebra.shift
cadlag_ify = path_algebra.cadlag_ify
restrict = path_algebra.restrict
jump_times = path_algebra.jump_times
is_continuous_at = path_algebra.is_continuous_at
shift_jumps = path_algebra.shift_jumps
compress = path_algebra.compress
fluctuation_decomposition_residual = path_algebra.fluctuation_decomposition_residual
