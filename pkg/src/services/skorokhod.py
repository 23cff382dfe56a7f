#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Distâncias de Skorokhod
Estimadores J1, J2 e J_{3/2} em grade de células, oráculo exaustivo, cota de Hausdorff
dos gráficos, reordenação da caminhada e fusão de mudanças de tempo
"""

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from config import Config
from services.medium_walk import Walk
from services.path_algebra import PathDomainError, StepPath

logger = logging.getLogger(__name__)

BRUTEFORCE_MAX_CELLS = 8


class SolverLimitError(ValueError):
    """Instância grande demais para o solver exato"""


@dataclass
class DistanceResult:
    """Valor estimado, testemunha e folga de discretização"""

    metric: str
    value: float
    witness: Dict[str, Any]
    m: int
    slack: float

    def summary(self) -> Dict[str, Any]:
        return {
            'metric': self.metric,
            'value': self.value,
            'slack': self.slack,
            'm': self.m,
            'witness_kind': self.witness.get('kind'),
            'witness_size': int(len(self.witness.get('rows', ()))),
        }


@dataclass
class _Grid:
    times: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: float
    domain: Tuple[float, float]

    @property
    def m(self) -> int:
        return len(self.times)

    @property
    def slack(self) -> float:
        return 2.0 * (self.domain[1] - self.domain[0]) / self.m

    def cost(self, rows, cols) -> np.ndarray:
        """C[i,j] = max(|t_j − t_i|, |f(t_j) − g(t_i)|): célula i de g contra célula j de f"""
        return np.maximum(np.abs(self.times[cols] - self.times[rows]), np.abs(self.f[cols] - self.g[rows]))

    def full_cost(self) -> np.ndarray:
        rows, cols = np.meshgrid(np.arange(self.m), np.arange(self.m), indexing='ij')
        return self.cost(rows, cols)

    def band(self, eps: float) -> int:
        return min(self.m - 1, int(eps / self.h) + 1)


def count_jumps(path: StepPath) -> int:
    return int(np.count_nonzero(np.diff(path.values)))


def _check_resolution(f: StepPath, g: StepPath, m: int, metric: str) -> bool:
    """m abaixo do número de saltos funde saltos vizinhos na mesma célula"""
    jumps = max(count_jumps(f), count_jumps(g))
    if m < jumps:
        logger.warning(f"⚠️ {metric}: grade de {m} células para {jumps} saltos; saltos próximos serão fundidos")
        return False
    return True


def _sample_grid(f: StepPath, g: StepPath, m: int) -> _Grid:
    if f.domain != g.domain:
        raise PathDomainError(f"Domínios diferentes: {f.domain} e {g.domain}")
    if m < 1:
        raise PathDomainError(f"Grade com {m} células")
    a, b = f.domain
    h = (b - a) / m
    times = a + h * np.arange(m)
    sample_at = times if a >= 0 else times + 0.5 * h
    return _Grid(times, np.asarray(f.evaluate(sample_at), float), np.asarray(g.evaluate(sample_at), float), h, (a, b))


def _band_edges(grid: _Grid, eps: float):
    """Todos os pares (i, j) com C ≤ eps, percorrendo as diagonais |i − j| ≤ eps/h"""
    rows, cols, costs = [], [], []
    w = grid.band(eps)
    for d in range(-w, w + 1):
        i = np.arange(max(0, -d), min(grid.m, grid.m - d))
        c = grid.cost(i, i + d)
        ok = c <= eps
        rows.append(i[ok])
        cols.append(i[ok] + d)
        costs.append(c[ok])
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(costs)


def _candidate_costs(grid: _Grid, lo: float, hi: float) -> np.ndarray:
    _, _, costs = _band_edges(grid, hi)
    return np.unique(costs[costs >= lo])


def _bisect(grid: _Grid, feasible, rounds: int) -> float:
    """Menor custo de grade factível: bisseção em [0, sup|f−g|] seguida de ajuste exato"""
    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, float(np.max(np.abs(grid.f - grid.g)))
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    # o ótimo é um custo C[i,j] em (lo, hi]
    for candidate in _candidate_costs(grid, lo, hi):
        if candidate > lo and feasible(float(candidate)):
            return float(candidate)
    return hi


# ---------------------------------------------------------------------------
# J2: cobertura por arestas do grafo ε
# ---------------------------------------------------------------------------

def _j2_feasible(grid: _Grid, eps: float) -> bool:
    row_ok = np.zeros(grid.m, dtype=bool)
    col_ok = np.zeros(grid.m, dtype=bool)
    w = grid.band(eps)
    for d in sorted(range(-w, w + 1), key=abs):
        i = np.arange(max(0, -d), min(grid.m, grid.m - d))
        ok = grid.cost(i, i + d) <= eps
        row_ok[i[ok]] = True
        col_ok[i[ok] + d] = True
        if row_ok.all() and col_ok.all():
            return True
    return False


def _cheapest_per(keys: np.ndarray, costs: np.ndarray) -> np.ndarray:
    order = np.lexsort((costs, keys))
    _, first = np.unique(keys[order], return_index=True)
    return order[first]


def _j2_witness(grid: _Grid, eps: float) -> Dict[str, Any]:
    rows, cols, costs = _band_edges(grid, eps)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(grid.m, grid.m))
    matching = maximum_bipartite_matching(graph, perm_type='column')

    matched_rows = np.flatnonzero(matching >= 0)
    pair_rows, pair_cols = [matched_rows], [matching[matched_rows]]

    exposed_rows = np.setdiff1d(np.arange(grid.m), matched_rows)
    exposed_cols = np.setdiff1d(np.arange(grid.m), matching[matched_rows])
    by_row = _cheapest_per(rows, costs)
    by_col = _cheapest_per(cols, costs)
    row_choice = dict(zip(rows[by_row], cols[by_row]))
    col_choice = dict(zip(cols[by_col], rows[by_col]))
    if exposed_rows.size:
        pair_rows.append(exposed_rows)
        pair_cols.append(np.array([row_choice[i] for i in exposed_rows]))
    if exposed_cols.size:
        pair_rows.append(np.array([col_choice[j] for j in exposed_cols]))
        pair_cols.append(exposed_cols)

    pair_rows = np.concatenate(pair_rows).astype(np.int64)
    pair_cols = np.concatenate(pair_cols).astype(np.int64)
    order = np.lexsort((pair_cols, pair_rows))
    return {
        'kind': 'cell_cover',
        'rows': pair_rows[order],
        'cols': pair_cols[order],
        'perfect': bool(len(matched_rows) == grid.m),
    }


# ---------------------------------------------------------------------------
# J1: alinhamento monótono em escada
# ---------------------------------------------------------------------------

def _j1_rows(grid: _Grid, eps: float, keep: bool):
    """DP por linhas: alcançáveis a partir de (0,0) com passos →, ↓, ↘ dentro de C ≤ eps"""
    m = grid.m
    w = grid.band(eps)
    prev = np.zeros(m, dtype=bool)
    stored = []
    for i in range(m):
        lo, hi = max(0, i - w), min(m, i + w + 1)
        j = np.arange(lo, hi)
        ok = grid.cost(np.full(len(j), i), j) <= eps
        if i == 0:
            seeds = np.zeros(len(j), dtype=bool)
            seeds[0] = True
        else:
            diag = np.zeros(len(j), dtype=bool)
            diag[j > 0] = prev[j[j > 0] - 1]
            seeds = prev[lo:hi] | diag
        seeds &= ok
        count = np.cumsum(seeds)
        barrier = np.maximum.accumulate(np.where(~ok, count, 0))
        reach = ok & (count - barrier > 0)

        prev = np.zeros(m, dtype=bool)
        prev[lo:hi] = reach
        if keep:
            stored.append((lo, reach))
        if not reach.any():
            return False, stored
    return bool(prev[m - 1]), stored


def _j1_feasible(grid: _Grid, eps: float) -> bool:
    return _j1_rows(grid, eps, keep=False)[0]


def _reached(stored, i: int, j: int) -> bool:
    if i < 0 or j < 0:
        return False
    lo, reach = stored[i]
    return lo <= j < lo + len(reach) and bool(reach[j - lo])


def _j1_witness(grid: _Grid, eps: float) -> Dict[str, Any]:
    feasible, stored = _j1_rows(grid, eps, keep=True)
    if not feasible:
        raise SolverLimitError(f"Limiar {eps} não é factível para J1")

    i = j = grid.m - 1
    steps = [(i, j)]
    while (i, j) != (0, 0):
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            if _reached(stored, i - di, j - dj):
                i, j = i - di, j - dj
                break
        steps.append((i, j))
    steps.reverse()

    rows = np.array([s[0] for s in steps], dtype=np.int64)
    cols = np.array([s[1] for s in steps], dtype=np.int64)
    # cada passo recebe um subintervalo da sua linha e da sua coluna
    row_total = np.bincount(rows, minlength=grid.m)
    col_total = np.bincount(cols, minlength=grid.m)
    row_rank = np.concatenate([np.arange(c) for c in row_total if c])
    col_rank = np.empty(len(cols), dtype=np.int64)
    for c in np.unique(cols):
        where = np.flatnonzero(cols == c)
        col_rank[where] = np.arange(len(where))
    x = grid.times[rows] + grid.h * row_rank / row_total[rows]
    y = grid.times[cols] + grid.h * col_rank / col_total[cols]
    b = grid.domain[1]
    return {
        'kind': 'increasing_knots',
        'rows': rows,
        'cols': cols,
        'x': np.append(x, b),
        'y': np.append(y, b),
    }


# ---------------------------------------------------------------------------
# J_{3/2}: no máximo K trechos monótonos
# ---------------------------------------------------------------------------

def _run_ends(ok: np.ndarray) -> Dict[Tuple[int, int], List[Tuple[int, int]]]:
    """Para cada início (i0, j0) factível, as extremidades (i1, j1) de caminhos monótonos"""
    m = ok.shape[0]
    ends = {}
    for i0 in range(m):
        for j0 in range(m):
            if not ok[i0, j0]:
                continue
            reach = np.zeros((m, m), dtype=bool)
            reach[i0, j0] = True
            for i in range(i0, m):
                for j in range(j0, m):
                    if (i, j) == (i0, j0) or not ok[i, j]:
                        continue
                    reach[i, j] = ((i > i0 and reach[i - 1, j])
                                   or (j > j0 and reach[i, j - 1])
                                   or (i > i0 and j > j0 and reach[i - 1, j - 1]))
            ends[(i0, j0)] = [(int(a), int(b)) for a, b in zip(*np.nonzero(reach))]
    return ends


def _mask(lo: int, hi: int) -> int:
    if hi < lo:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << lo


def _j32_search(ok: np.ndarray, K: int) -> Optional[List[Tuple[int, int, int, int]]]:
    """Trechos cujas faixas de linhas e colunas ladrilham a grade (compartilhando só bordas)"""
    m = ok.shape[0]
    full = _mask(0, m - 1)
    ends = _run_ends(ok)
    memo = {}

    def search(start: int, covered: int, interior: int, left: int):
        key = (start, covered, interior, left)
        if key in memo:
            return memo[key]
        result = None
        if left > 0:
            for j0 in range(m):
                for i1, j1 in ends.get((start, j0), ()):
                    span = _mask(j0, j1)
                    inner = _mask(j0 + 1, j1 - 1)
                    if span & interior or inner & covered:
                        continue
                    now_covered, now_interior = covered | span, interior | inner
                    if i1 == m - 1:
                        if now_covered == full:
                            result = [(start, j0, i1, j1)]
                            break
                        continue
                    for nxt in (i1 + 1, i1):
                        if nxt == start and i1 == start and now_covered == covered:
                            continue
                        rest = search(nxt, now_covered, now_interior, left - 1)
                        if rest is not None:
                            result = [(start, j0, i1, j1)] + rest
                            break
                    if result is not None:
                        break
                if result is not None:
                    break
        memo[key] = result
        return result

    return search(0, 0, 0, K)


class SkorokhodSolver:
    """Serviço de estimação das distâncias J1, J2 e J_{3/2}"""

    def __init__(self):
        """Inicializa com os limites configurados"""
        self.rounds = Config.BISECTION_ROUNDS
        self.j32_max_cells = Config.J32_MAX_CELLS

    def d_j2_estimate(self, f: StepPath, g: StepPath, m: int) -> DistanceResult:
        """J2 na grade: toda célula de g e toda célula de f tem parceiro com custo ≤ ε"""
        try:
            start_time = time.time()
            _check_resolution(f, g, m, 'J2')
            grid = _sample_grid(f, g, m)
            value = _bisect(grid, lambda eps: _j2_feasible(grid, eps), self.rounds)
            witness = _j2_witness(grid, value)
            cost = float(grid.cost(witness['rows'], witness['cols']).max())
            logger.debug(f"J2 (m={m}) = {cost:.6g} em {time.time() - start_time:.2f}s")
            return DistanceResult('j2', cost, witness, m, grid.slack)

        except Exception as e:
            logger.error(f"Erro ao estimar J2 (m={m}): {str(e)}")
            raise

    def d_j1_estimate(self, f: StepPath, g: StepPath, m: int) -> DistanceResult:
        """J1 na grade: alinhamento monótono de (0,0) a (m−1,m−1)"""
        try:
            start_time = time.time()
            _check_resolution(f, g, m, 'J1')
            grid = _sample_grid(f, g, m)
            value = _bisect(grid, lambda eps: _j1_feasible(grid, eps), self.rounds)
            witness = _j1_witness(grid, value)
            cost = float(grid.cost(witness['rows'], witness['cols']).max())
            logger.debug(f"J1 (m={m}) = {cost:.6g} em {time.time() - start_time:.2f}s")
            return DistanceResult('j1', cost, witness, m, grid.slack)

        except Exception as e:
            logger.error(f"Erro ao estimar J1 (m={m}): {str(e)}")
            raise

    def d_j2_bruteforce(self, f: StepPath, g: StepPath, m: int) -> float:
        """Enumeração exaustiva das correspondências de células (m ≤ 8)"""
        if m > BRUTEFORCE_MAX_CELLS:
            raise SolverLimitError(f"Força bruta limitada a m ≤ {BRUTEFORCE_MAX_CELLS}, recebido {m}")
        cost = _sample_grid(f, g, m).full_cost()
        return max(_exhaustive_min_max(cost), _exhaustive_min_max(cost.T))

    def graph_hausdorff_lower(self, f: StepPath, g: StepPath, m: int, chunk: int = 1024) -> float:
        """Hausdorff (norma do máximo) entre os gráficos amostrados"""
        grid = _sample_grid(f, g, m)
        points_g = np.column_stack([grid.times, grid.g])
        points_f = np.column_stack([grid.times, grid.f])
        row_best = np.empty(grid.m)
        col_best = np.full(grid.m, np.inf)
        for start in range(0, grid.m, chunk):
            block = cdist(points_g[start:start + chunk], points_f, 'chebyshev')
            row_best[start:start + chunk] = block.min(axis=1)
            col_best = np.minimum(col_best, block.min(axis=0))
        return float(max(row_best.max(), col_best.max()))

    def d_j32_estimate(self, f: StepPath, g: StepPath, m: int, K: int) -> DistanceResult:
        """J_{3/2} com no máximo K trechos monótonos, busca exata (m ≤ J32_MAX_CELLS)"""
        try:
            if m > self.j32_max_cells:
                raise SolverLimitError(f"J_{{3/2}} exato limitado a m ≤ {self.j32_max_cells}, recebido {m}")
            if K < 1:
                raise SolverLimitError(f"K={K} deve ser positivo")
            grid = _sample_grid(f, g, m)
            cost = grid.full_cost()
            candidates = np.unique(cost)

            lo, hi = 0, len(candidates) - 1
            best = _j32_search(cost <= candidates[hi], K)
            if best is None:
                raise SolverLimitError(f"Nenhuma cobertura com K={K} trechos")
            while lo < hi:
                mid = (lo + hi) // 2
                runs = _j32_search(cost <= candidates[mid], K)
                if runs is not None:
                    hi, best = mid, runs
                else:
                    lo = mid + 1

            rows, cols = [], []
            for i0, j0, i1, j1 in best:
                path = _run_path(cost <= candidates[hi], i0, j0, i1, j1)
                rows.extend(p[0] for p in path)
                cols.extend(p[1] for p in path)
            witness = {'kind': 'runs', 'runs': best,
                       'rows': np.array(rows, dtype=np.int64), 'cols': np.array(cols, dtype=np.int64)}
            value = float(grid.cost(witness['rows'], witness['cols']).max())
            return DistanceResult('j32', value, witness, m, grid.slack)

        except Exception as e:
            logger.error(f"Erro ao estimar J_{{3/2}} (m={m}, K={K}): {str(e)}")
            raise

    def replay_witness(self, f: StepPath, g: StepPath, result: DistanceResult) -> float:
        """
        Custo da bijeção reconstruída da testemunha, verificado na grade: cada célula é
        subdividida entre seus parceiros e os níveis comparados nos representantes de célula
        (não em f∘λ contínua)
        """
        grid = _sample_grid(f, g, result.m)
        rows, cols = result.witness['rows'], result.witness['cols']
        row_total = np.bincount(rows, minlength=grid.m)
        col_total = np.bincount(cols, minlength=grid.m)
        row_rank = np.zeros(len(rows), dtype=np.int64)
        col_rank = np.zeros(len(cols), dtype=np.int64)
        for keys, rank in ((rows, row_rank), (cols, col_rank)):
            for key in np.unique(keys):
                where = np.flatnonzero(keys == key)
                rank[where] = np.arange(len(where))

        h = grid.h
        x0 = grid.times[rows] + h * row_rank / row_total[rows]
        x1 = grid.times[rows] + h * (row_rank + 1) / row_total[rows]
        y0 = grid.times[cols] + h * col_rank / col_total[cols]
        y1 = grid.times[cols] + h * (col_rank + 1) / col_total[cols]
        displacement = np.maximum(np.abs(y0 - x0), np.abs(y1 - x1))
        level = np.abs(grid.f[cols] - grid.g[rows])
        return float(np.max(np.maximum(displacement, level)))

    def reorder_bijection(self, walk: Walk, n: int, T: float) -> 'Reordering':
        """ρ_n: a célula i vai para a célula p(i), p = argsort estável de S_0..S_{N−1}"""
        cells = int(np.ceil(n * T))
        if cells < 1 or cells - 1 > walk.n:
            raise PathDomainError(f"Caminhada de {walk.n} passos não cobre [0, {T}) na escala {n}")
        permutation = np.argsort(walk.positions[:cells], kind='stable')
        return Reordering(permutation=permutation, n=n, T=cells / n)

    def check_reordering(self, walk: Walk, n: int, T: float, mu: float,
                     alpha: Optional[float] = None) -> 'ReorderCheck':
        """sup_i |i − p(i)| ≤ 2D/μ + 1, com D = sup_{u<N} |S_{⌊u⌋} − μu|"""
        if not mu > 0:
            raise PathDomainError(f"Verificação de reordenação exige μ > 0, recebido {mu}")
        rho = self.reorder_bijection(walk, n, T)
        cells = len(rho.permutation)
        k = np.arange(cells)
        s = walk.positions[:cells].astype(float)
        deviation = float(np.max(np.maximum(np.abs(s - mu * k), np.abs(s - mu * (k + 1)))))
        bound = 2.0 * deviation / mu + 1.0
        displacement = int(np.max(np.abs(k - rho.permutation)))
        sorted_values = s[rho.permutation]
        return ReorderCheck(
            verdict=bool(displacement <= bound + 1e-9),
            max_displacement=displacement,
            bound=bound,
            deviation=deviation,
            C=deviation / n ** (1.0 / alpha) if alpha else None,
            monotone=bool(np.all(np.diff(sorted_values) >= 0)),
        )

    def merge_time_changes(self, first: 'TimeChange', second: 'TimeChange',
                           intervals_first: Sequence[Tuple[float, float]],
                           intervals_second: Sequence[Tuple[float, float]],
                           domain: Optional[Tuple[float, float]] = None) -> 'TimeChange':
        """λ = first nas famílias de intervalos de first, second nas de second, identidade fora"""
        domain = domain or first.domain
        families = [(float(a), float(b), 0) for a, b in intervals_first]
        families += [(float(a), float(b), 1) for a, b in intervals_second]
        families.sort()
        for (a0, b0, _), (a1, b1, _) in zip(families, families[1:]):
            if a1 <= b0:
                raise PathDomainError(f"Intervalos sobrepostos: [{a0}, {b0}] e [{a1}, {b1}]")

        pieces = []
        for a, b, owner in families:
            source = first if owner == 0 else second
            restricted = source.restricted(a, b)
            for lo, hi, xs, ys in restricted.pieces:
                if ys.min() < a - 1e-12 or ys.max() > b + 1e-12:
                    raise PathDomainError(f"Mudança de tempo não fixa o intervalo [{a}, {b}]")
            pieces.extend(restricted.pieces)
        return TimeChange(domain, pieces)


def _exhaustive_min_max(cost: np.ndarray) -> float:
    """min sobre todas as funções φ de linhas em colunas de max_i C[i, φ(i)]"""
    m, k = cost.shape
    head = min(2, m)
    tail = m - head
    if tail:
        maps = np.array(list(itertools.product(range(k), repeat=tail)))
        tail_costs = cost[np.arange(head, m), maps].max(axis=1)
    else:
        tail_costs = np.zeros(1)
    best = np.inf
    for prefix in itertools.product(range(k), repeat=head):
        prefix_cost = max(cost[i, j] for i, j in enumerate(prefix))
        best = min(best, float(np.maximum(prefix_cost, tail_costs).min()))
    return best


def _run_path(ok: np.ndarray, i0: int, j0: int, i1: int, j1: int) -> List[Tuple[int, int]]:
    path = [(i1, j1)]
    i, j = i1, j1
    while (i, j) != (i0, j0):
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            pi, pj = i - di, j - dj
            if pi >= i0 and pj >= j0 and ok[pi, pj] and _monotone_reachable(ok, i0, j0, pi, pj):
                i, j = pi, pj
                break
        path.append((i, j))
    path.reverse()
    return path


def _monotone_reachable(ok: np.ndarray, i0: int, j0: int, i1: int, j1: int) -> bool:
    reach = np.zeros((i1 - i0 + 1, j1 - j0 + 1), dtype=bool)
    for i in range(i1 - i0 + 1):
        for j in range(j1 - j0 + 1):
            if not ok[i0 + i, j0 + j]:
                continue
            if i == 0 and j == 0:
                reach[i, j] = True
            else:
                reach[i, j] = ((i > 0 and reach[i - 1, j]) or (j > 0 and reach[i, j - 1])
                               or (i > 0 and j > 0 and reach[i - 1, j - 1]))
    return bool(reach[-1, -1])


@dataclass
class Reordering:
    """Bijeção por células que ordena S_0..S_{N−1}"""

    permutation: np.ndarray
    n: int
    T: float

    @property
    def displacement(self) -> float:
        return float(np.max(np.abs(np.arange(len(self.permutation)) - self.permutation))) / self.n

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        cell = np.clip(np.floor(t * self.n).astype(np.int64), 0, len(self.permutation) - 1)
        return t - cell / self.n + self.permutation[cell] / self.n

    def apply(self, path: StepPath) -> StepPath:
        """path∘ρ_n, com as células de tamanho 1/n"""
        cells = len(self.permutation)
        edges = np.arange(cells + 1) / self.n
        mid = (self.permutation + 0.5) / self.n
        return StepPath(edges, path.evaluate(mid), path.convention)


@dataclass
class ReorderCheck:
    verdict: bool
    max_displacement: int
    bound: float
    deviation: float
    C: Optional[float]
    monotone: bool

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class TimeChange:
    """Bijeção linear por partes: pedaços (lo, hi, xs, ys) em [lo, hi), identidade fora deles"""

    domain: Tuple[float, float]
    pieces: List[Tuple[float, float, np.ndarray, np.ndarray]] = field(default_factory=list)

    @classmethod
    def identity(cls, domain: Tuple[float, float]) -> 'TimeChange':
        return cls(domain, [])

    @classmethod
    def from_knots(cls, domain: Tuple[float, float], xs: Sequence[float], ys: Sequence[float]) -> 'TimeChange':
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        if not (np.all(np.diff(xs) > 0) and np.all(np.diff(ys) > 0)):
            raise PathDomainError("Nós de mudança de tempo devem ser estritamente crescentes")
        return cls(domain, [(float(xs[0]), float(xs[-1]), xs, ys)])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t.copy()
        for lo, hi, xs, ys in self.pieces:
            inside = (t >= lo) & (t <= hi)
            out[inside] = np.interp(t[inside], xs, ys)
        return out

    def displacement(self, grid: Optional[np.ndarray] = None) -> float:
        """sup|λ − id| (nos nós; linear entre eles) ou numa grade dada"""
        if grid is not None:
            grid = np.asarray(grid, dtype=float)
            return float(np.max(np.abs(self(grid) - grid))) if grid.size else 0.0
        if not self.pieces:
            return 0.0
        return float(max(np.max(np.abs(ys - xs)) for _, _, xs, ys in self.pieces))

    def restricted(self, lo: float, hi: float) -> 'TimeChange':
        """Pedaços recortados a [lo, hi]; onde não há pedaço, a identidade vira pedaço explícito"""
        pieces = []
        cursor = lo
        for plo, phi, xs, ys in sorted(self.pieces, key=lambda p: p[0]):
            a, b = max(lo, plo), min(hi, phi)
            if a >= b:
                continue
            if a > cursor:
                pieces.append((cursor, a, np.array([cursor, a]), np.array([cursor, a])))
            inner = xs[(xs > a) & (xs < b)]
            knots = np.concatenate([[a], inner, [b]])
            pieces.append((a, b, knots, np.interp(knots, xs, ys)))
            cursor = b
        if cursor < hi:
            pieces.append((cursor, hi, np.array([cursor, hi]), np.array([cursor, hi])))
        return TimeChange(self.domain, pieces)


def jump_shift_map(domain: Tuple[float, float], jump: float, delta: float, radius: float) -> TimeChange:
    """Mudança de tempo que leva 'jump' a 'jump + delta' e fixa [jump − radius, jump + radius]"""
    if not abs(delta) < radius:
        raise PathDomainError(f"|δ|={abs(delta)} deve ser menor que o raio {radius}")
    return TimeChange.from_knots(domain, [jump - radius, jump, jump + radius],
                                 [jump - radius, jump + delta, jump + radius])


# Instância global do serviço
skorokhod_solver = SkorokhodSolver()

d_j1_estimate = skorokhod_solver.d_j1_estimate
d_j2_estimate = skorokhod_solver.d_j2_estimate
d_j2_bruteforce = skorokhod_solver.d_j2_bruteforce
graph_hausdorff_lower = skorokhod_solver.graph_hausdorff_lower
d_j32_estimate = skorokhod_solver.d_j32_estimate
replay_witness = skorokhod_solver.replay_witness
reorder_bijection = skorokhod_solver.reorder_bijection
check_reordering = skorokhod_solver.check_reordering
merge_time_changes = skorokhod_solver.merge_time_changes
