#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Configuração
Padrões por variáveis de ambiente e mesclagem da configuração de execução
"""

import os
import json
import logging
from dataclasses import dataclass, field, asdict, fields
from typing import Dict, List, Optional, Any

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Configuração inválida ou pré-condição de regime violada"""


class Config:
    VERSION = "1.0.0"

    SEED = int(os.getenv("LEVY_LAB_SEED", 20240521))
    JOBS = int(os.getenv("LEVY_LAB_JOBS", os.cpu_count() or 1))
    OUTPUT_DIR = os.getenv("LEVY_LAB_OUTPUT_DIR", "levy_lab_output")
    LOG_LEVEL = os.getenv("LEVY_LAB_LOG_LEVEL", "INFO")

    MEDIUM_BLOCK = int(os.getenv("LEVY_LAB_MEDIUM_BLOCK", 4096))
    DENSE_SITES = int(os.getenv("LEVY_LAB_DENSE_SITES", 2 ** 20))
    GAP_SUM_EXPLICIT = int(os.getenv("LEVY_LAB_GAP_SUM_EXPLICIT", 2 ** 16))

    KS_ROUNDS = int(os.getenv("LEVY_LAB_KS_ROUNDS", 200))
    KS_QUANTILE = float(os.getenv("LEVY_LAB_KS_QUANTILE", 0.99))
    BISECTION_ROUNDS = int(os.getenv("LEVY_LAB_BISECTION_ROUNDS", 40))
    J32_MAX_CELLS = int(os.getenv("LEVY_LAB_J32_MAX_CELLS", 12))


def parse_n_grid(text: str) -> List[int]:
    """Interpreta 'lo:hi:xF' (grade geométrica) ou uma lista separada por vírgulas"""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("x"):
            raise ConfigError(f"Grade de n inválida: '{text}' (use lo:hi:xF)")
        lo, hi, ratio = int(parts[0]), int(parts[1]), int(parts[2][1:])
        if lo < 1 or hi < lo or ratio < 2:
            raise ConfigError(f"Grade de n inválida: '{text}'")
        grid = []
        value = lo
        while value <= hi:
            grid.append(value)
            value *= ratio
        return grid
    return [int(item) for item in text.split(",") if item.strip()]


@dataclass
class RunConfig:
    """Configuração mesclada de uma execução (arquivo de spec > flags > padrões)"""

    command: str = ""
    alpha: Optional[float] = None
    beta: Optional[float] = None
    p_plus: float = 0.5
    gap: str = "pareto"
    x_min: float = 1.0
    n: int = 1024
    n_grid: List[int] = field(default_factory=list)
    T: float = 1.0
    times: List[float] = field(default_factory=lambda: [1.0])
    factor: int = 4
    replicas: int = 1000
    m: int = 2000
    K: int = 2
    metric: str = "j2"
    seed: int = Config.SEED
    fmt: str = "json"
    inputs: List[str] = field(default_factory=list)
    options: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def drift(self) -> Optional[float]:
        """Sinal da deriva implícito em p_plus (apenas para alpha > 1)"""
        if self.alpha is None or self.alpha < 1:
            return None
        return 2.0 * self.p_plus - 1.0

    def validate(self) -> "RunConfig":
        """Verifica as pré-condições do comando antes de qualquer amostragem"""
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if value is None:
                continue
            if not 0 < value < 2 or value == 1:
                raise ConfigError(f"{name}={value} fora de (0,1)∪(1,2)")

        if not 0.0 <= self.p_plus <= 1.0:
            raise ConfigError(f"p_plus={self.p_plus} fora de [0,1]")
        if self.gap not in ("pareto", "stable"):
            raise ConfigError(f"Lei de lacunas desconhecida: '{self.gap}'")
        if self.gap == "stable" and self.beta is not None and self.beta > 1:
            raise ConfigError("Lacunas estáveis exatas exigem beta < 1")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"Formato desconhecido: '{self.fmt}'")
        if self.n < 0 or self.replicas < 1 or self.m < 1 or self.K < 1:
            raise ConfigError("n, replicas, m e K devem ser positivos")

        needs_laws = {"simulate", "reorder-check", "fdd-test", "oracle-test",
                      "exponent", "j2-gap"}
        if self.command in needs_laws and self.alpha is None:
            raise ConfigError(f"'{self.command}' exige --alpha")
        if self.command in needs_laws - {"reorder-check"} and self.beta is None:
            raise ConfigError(f"'{self.command}' exige --beta")

        drift = self.drift
        if self.command == "reorder-check":
            if self.alpha < 1 or drift is None or drift <= 0:
                raise ConfigError("reorder-check exige alpha em (1,2) e deriva positiva (p_plus > 0.5)")
        if self.command == "j2-gap":
            if not (self.beta < 1 and self.alpha > 1 and drift not in (None, 0.0)):
                raise ConfigError("j2-gap exige beta < 1, alpha em (1,2) e deriva não nula")
        if self.command == "oracle-test" and self.gap != "stable":
            raise ConfigError("oracle-test exige --gap stable (lacunas estáveis exatas)")
        if self.command == "exponent" and len(self.n_grid) < 5:
            raise ConfigError("exponent exige uma grade geométrica com pelo menos 5 valores de n")
        if self.command == "distance" and len(self.inputs) != 2:
            raise ConfigError("distance exige exatamente dois arquivos de caminho")
        return self


def _flatten_spec(spec: Dict[str, Any]) -> Dict[str, Any]:
    """Aceita o formato {regime, laws, n_grid, replicas, seed, tests[]} ou um artefato com 'config'"""
    if "config" in spec and isinstance(spec["config"], dict):
        return dict(spec["config"])

    flat: Dict[str, Any] = {}
    for key, value in spec.items():
        if key in ("regime", "laws") and isinstance(value, dict):
            flat.update(value)
        elif key == "tests":
            flat.setdefault("options", {})["tests"] = value
        else:
            flat[key] = value
    return flat


def merge_run_config(defaults: RunConfig,
                     flags: Optional[Dict[str, Any]] = None,
                     spec: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Mescla padrões, flags e arquivo de spec (nesta ordem de prioridade crescente)"""
    known = {f.name for f in fields(RunConfig)}
    merged = defaults.to_dict()

    for source_name, source in (("flags", flags or {}), ("spec", _flatten_spec(spec or {}))):
        for key, value in source.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"Chave desconhecida em {source_name}: '{key}'")
            if key == "n_grid" and isinstance(value, str):
                value = parse_n_grid(value)
            if key == "options" and isinstance(value, dict):
                merged["options"] = {**merged.get("options", {}), **value}
                continue
            merged[key] = value

    config = RunConfig(**merged)
    logger.debug(f"Configuração mesclada: {json.dumps(config.to_dict(), sort_keys=True)}")
    return config
