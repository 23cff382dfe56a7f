#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Meio Aleatório, Caminhada e Voo
Meio de Lévy em ℤ com crescimento preguiçoso, caminhada discreta e o voo Y_k = ω_{S_k}
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from services.stable_rng import GapLaw, JumpLaw, SeedStream, stable_sampler

logger = logging.getLogger(__name__)

POSITIVE, NEGATIVE = 0, 1


class MediumRangeError(ValueError):
    """Índice fora do alcance gerado de um meio fixo"""


class Medium:
    """
    Meio ω: ω_0 = 0, ω_k = Σ_{i=1}^{k} ζ_i (k > 0), ω_k = −Σ_{i=k}^{−1} ζ_i (k < 0).
    Lacunas geradas em blocos de tamanho fixo; o bloco b do lado s usa o sub-fluxo (s, b),
    de modo que construção preguiçosa e antecipada produzem os mesmos valores.
    """

    def __init__(self, gap_law: GapLaw, stream: Optional[SeedStream],
                 block: int = Config.MEDIUM_BLOCK):
        self.gap_law = gap_law
        self.stream = stream
        self.block = int(block)
        # prefixos em precisão estendida: _prefix[s][k] = Σ das k primeiras lacunas do lado s
        self._prefix = [np.zeros(1, dtype=np.longdouble), np.zeros(1, dtype=np.longdouble)]
        self._gaps = [np.empty(0), np.empty(0)]

    @classmethod
    def from_gaps(cls, positive: Sequence[float], negative: Sequence[float] = ()) -> 'Medium':
        """Meio fixo: positive[i] = ζ_{i+1}, negative[i] = ζ_{−(i+1)}"""
        medium = cls(gap_law=None, stream=None)
        for side, gaps in ((POSITIVE, positive), (NEGATIVE, negative)):
            gaps = np.asarray(gaps, dtype=float)
            if gaps.size and not np.all(gaps > 0):
                raise MediumRangeError("Lacunas do meio devem ser positivas")
            medium._append(side, gaps)
        return medium

    @property
    def is_fixed(self) -> bool:
        return self.stream is None

    @property
    def generated_range(self) -> Tuple[int, int]:
        """(k_min, k_max) com ω_k disponível"""
        return -len(self._gaps[NEGATIVE]), len(self._gaps[POSITIVE])

    def _append(self, side: int, gaps: np.ndarray):
        prefix = self._prefix[side]
        extension = prefix[-1] + np.cumsum(gaps.astype(np.longdouble))
        self._prefix[side] = np.concatenate([prefix, extension])
        self._gaps[side] = np.concatenate([self._gaps[side], gaps])

    def _grow(self, side: int, needed: int):
        have = len(self._gaps[side])
        if needed <= have:
            return
        if self.is_fixed:
            raise MediumRangeError(
                f"Meio fixo cobre {have} lacunas no lado {'+' if side == POSITIVE else '-'}, "
                f"{needed} necessárias"
            )

        have_blocks = have // self.block
        needed_blocks = -(-needed // self.block)
        # crescimento preguiçoso dobra o alcance gerado
        target_blocks = max(needed_blocks, 2 * have_blocks)
        for b in range(have_blocks, target_blocks):
            gen = self.stream.generator(side, b)
            self._append(side, np.asarray(self.gap_law.sample(gen, self.block), dtype=float))

        logger.debug(f"Meio estendido no lado {side}: {len(self._gaps[side])} lacunas")

    def ensure(self, lo: int, hi: int) -> 'Medium':
        """Garante ω_k para lo ≤ k ≤ hi"""
        if hi > 0:
            self._grow(POSITIVE, int(hi))
        if lo < 0:
            self._grow(NEGATIVE, int(-lo))
        return self

    def exact_ensure(self, lo: int, hi: int) -> 'Medium':
        """Como ensure, mas sem dobrar: gera apenas os blocos necessários"""
        for side, needed in ((POSITIVE, hi), (NEGATIVE, -lo)):
            if needed > 0 and needed > len(self._gaps[side]):
                if self.is_fixed:
                    self._grow(side, needed)
                have_blocks = len(self._gaps[side]) // self.block
                for b in range(have_blocks, -(-needed // self.block)):
                    gen = self.stream.generator(side, b)
                    self._append(side, np.asarray(self.gap_law.sample(gen, self.block), dtype=float))
        return self

    def targets_long(self, ks: Union[int, Iterable[int]]) -> np.ndarray:
        """ω_k em precisão estendida (vetorizado)"""
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size:
            self.ensure(int(ks.min()), int(ks.max()))
        positive = self._prefix[POSITIVE][np.clip(ks, 0, None)]
        negative = -self._prefix[NEGATIVE][np.clip(-ks, 0, None)]
        return np.where(ks >= 0, positive, negative)

    def targets(self, ks: Union[int, Iterable[int]]) -> np.ndarray:
        return self.targets_long(ks).astype(float)

    def target(self, k: int) -> float:
        return float(self.targets_long(np.array([k]))[0])

    def gap(self, k: int) -> float:
        """ζ_k (k ≠ 0): ω_{k+1} − ω_k para k < 0, ω_k − ω_{k−1} para k > 0"""
        if k == 0:
            raise MediumRangeError("Não existe lacuna de índice 0")
        self.ensure(min(k, 0), max(k, 0))
        if k > 0:
            return float(self._gaps[POSITIVE][k - 1])
        return float(self._gaps[NEGATIVE][-k - 1])


class SparseMedium:
    """ω apenas nos sítios visitados, construído por somas de lacunas entre sítios consecutivos"""

    def __init__(self, gap_law: GapLaw, stream: SeedStream, sites: Iterable[int]):
        self.gap_law = gap_law
        self.stream = stream
        sites = np.unique(np.asarray(list(sites), dtype=np.int64))
        values = {0: np.longdouble(0)}

        for side, chosen in ((POSITIVE, sites[sites > 0]), (NEGATIVE, -sites[sites < 0][::-1])):
            gen = stream.generator(2 + side)
            total = np.longdouble(0)
            previous = 0
            for k in chosen:
                total += np.longdouble(self.gap_law.sample_sum(int(k - previous), gen))
                previous = int(k)
                values[int(k) if side == POSITIVE else -int(k)] = total if side == POSITIVE else -total

        self._values = values
        logger.debug(f"Meio esparso com {len(values)} sítios")

    def targets(self, ks: Union[int, Iterable[int]]) -> np.ndarray:
        ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
        try:
            return np.array([float(self._values[int(k)]) for k in ks])
        except KeyError as e:
            raise MediumRangeError(f"Sítio {e} não pertence ao meio esparso")

    def target(self, k: int) -> float:
        return float(self.targets([k])[0])


@dataclass(frozen=True, eq=False)
class Walk:
    """Caminhada S_0 = 0, S_k = Σ_{i≤k} ξ_i"""

    increments: np.ndarray
    positions: np.ndarray

    @property
    def n(self) -> int:
        return len(self.increments)

    @property
    def span(self) -> Tuple[int, int]:
        return int(self.positions.min()), int(self.positions.max())


@dataclass(frozen=True, eq=False)
class Flight:
    """Voo Y_k = ω_{S_k} com o meio que o suporta"""

    medium: Medium
    walk: Walk
    positions: np.ndarray

    @property
    def n(self) -> int:
        return self.walk.n


class FlightStreams(NamedTuple):
    medium: SeedStream
    walk: SeedStream

    @classmethod
    def for_replica(cls, root: int, replica: int) -> 'FlightStreams':
        return cls(SeedStream(root, replica, 'medium'), SeedStream(root, replica, 'walk'))


StreamsLike = Union[FlightStreams, SeedStream, Tuple[SeedStream, SeedStream]]


def _as_streams(streams: StreamsLike) -> FlightStreams:
    if isinstance(streams, FlightStreams):
        return streams
    if isinstance(streams, SeedStream):
        return FlightStreams.for_replica(streams.root, streams.replica)
    medium, walk = streams
    return FlightStreams(medium, walk)


class MediumBuilder:
    """Serviço de construção de meios, caminhadas e voos"""

    def __init__(self):
        """Inicializa com os tamanhos configurados"""
        self.block = Config.MEDIUM_BLOCK
        self.dense_sites = Config.DENSE_SITES

    def build_walk(self, law: JumpLaw, n: int, stream: SeedStream) -> Walk:
        if n < 0:
            raise MediumRangeError(f"Comprimento de caminhada negativo: {n}")
        increments = np.asarray(stable_sampler.sample_jump(law, stream, n), dtype=np.int64)
        positions = np.concatenate([[0], np.cumsum(increments)]).astype(np.int64)
        return Walk(increments=increments, positions=positions)

    def build_medium(self, gap_law: GapLaw, stream: SeedStream) -> Medium:
        return Medium(gap_law, stream, self.block)

    def target(self, medium: Medium, k: int) -> float:
        return medium.target(k)

    def build_flight(self, gap_law: GapLaw, jump_law: JumpLaw, n: int, streams: StreamsLike) -> Flight:
        """Caminhada de n passos e o meio gerado sobre [min S, max S]"""
        try:
            streams = _as_streams(streams)
            walk = self.build_walk(jump_law, n, streams.walk)
            lo, hi = walk.span
            if hi - lo > self.dense_sites:
                logger.warning(f"⚠️ Voo denso sobre {hi - lo} sítios (limite esparso {self.dense_sites})")

            medium = self.build_medium(gap_law, streams.medium).exact_ensure(lo, hi)
            positions = medium.targets(walk.positions)
            return Flight(medium=medium, walk=walk, positions=positions)

        except Exception as e:
            logger.error(f"Erro ao construir voo de {n} passos: {str(e)}")
            raise

    def sample_positions(self, gap_law: GapLaw, jump_law: JumpLaw, n: int,
                         times: Sequence[float], streams: StreamsLike) -> np.ndarray:
        """Y_{⌊nt⌋} para cada t, com meio denso quando o alcance visitado permite"""
        try:
            streams = _as_streams(streams)
            steps = np.floor(n * np.asarray(times, dtype=float)).astype(np.int64)
            if steps.size and steps.min() < 0:
                raise MediumRangeError(f"Tempos negativos em sample_positions: {list(times)}")
            walk = self.build_walk(jump_law, int(steps.max()) if steps.size else 0, streams.walk)
            sites = walk.positions[steps]
            lo, hi = min(int(sites.min()), 0), max(int(sites.max()), 0)

            if hi - lo <= self.dense_sites:
                medium = self.build_medium(gap_law, streams.medium).exact_ensure(lo, hi)
                return medium.targets(sites)
            return SparseMedium(gap_law, streams.medium, sites).targets(sites)

        except Exception as e:
            logger.error(f"Erro ao amostrar posições (n={n}): {str(e)}")
            raise

    def dump_flight(self, flight: Flight, path: str, metadata: Optional[dict] = None) -> List[str]:
        from artifacts import artifact_manager
        return artifact_manager.save_flight(flight, path, metadata or {})


# Instância global do serviço
medium_builder = MediumBuilder()

build_walk = medium_builder.build_walk
build_flight = medium_builder.build_flight
target = medium_builder.target
sample_positions = medium_builder.sample_positions
dump_flight = medium_builder.dump_flight
