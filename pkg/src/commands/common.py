#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Infraestrutura Comum dos Comandos
Opções compartilhadas, mesclagem de configuração e gravação de resultados
"""

import json
import logging
import time
from dataclasses import fields
from typing import Any, Callable, Dict, Optional

import click
import pandas as pd

from artifacts import artifact_manager, to_jsonable
from config import Config, ConfigError, RunConfig, merge_run_config

logger = logging.getLogger(__name__)

RUN_KEYS = {f.name for f in fields(RunConfig)}
RUNTIME_KEYS = {'spec', 'jobs', 'out'}


def run_options(func: Callable) -> Callable:
    """--spec, --seed, --jobs, --out, --format"""
    options = [
        click.option('--spec', type=click.Path(exists=True, dir_okay=False), default=None,
                     help='Arquivo JSON de experimento ou artefato (sobrepõe as flags)'),
        click.option('--seed', type=int, default=None, help='Semente raiz (padrão: LEVY_LAB_SEED)'),
        click.option('--jobs', type=int, default=None, help='Processos paralelos para as réplicas'),
        click.option('--out', type=click.Path(file_okay=False), default=None, help='Diretório de saída'),
        click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def law_options(func: Callable) -> Callable:
    """--alpha, --beta, --pplus, --gap, --xmin"""
    options = [
        click.option('--alpha', type=float, default=None, help='Índice α dos saltos'),
        click.option('--beta', type=float, default=None, help='Índice β das lacunas'),
        click.option('--pplus', 'p_plus', type=float, default=None, help='P(ξ > 0)'),
        click.option('--gap', type=click.Choice(['pareto', 'stable']), default=None),
        click.option('--xmin', 'x_min', type=float, default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


class CommandRunner:
    """Executor dos subcomandos: configuração mesclada, artefatos e código de saída"""

    def __init__(self):
        self.started: Dict[str, float] = {}

    def prepare(self, command: str, params: Dict[str, Any]) -> RunConfig:
        """Mescla padrões, flags e --spec e valida as pré-condições do comando"""
        logger.info(f"🚀 Iniciando '{command}'")
        self.started[command] = time.time()

        flags: Dict[str, Any] = {'command': command}
        extra: Dict[str, Any] = {}
        for key, value in params.items():
            if key in RUNTIME_KEYS or value is None or value == ():
                continue
            if key == 'times' and isinstance(value, str):
                value = [float(item) for item in value.split(',') if item.strip()]
            if key == 'inputs':
                value = list(value)
            if key in RUN_KEYS:
                flags[key] = value
            else:
                extra[key] = value
        flags['options'] = extra

        spec = artifact_manager.read_json(params['spec']) if params.get('spec') else None
        config = merge_run_config(RunConfig(command=command), flags, spec)
        if config.command != command:
            raise ConfigError(f"Arquivo de spec pertence a '{config.command}', não a '{command}'")
        config.validate()
        logger.info(f"📋 Configuração: {json.dumps(to_jsonable(config.to_dict()), sort_keys=True)}")
        return config

    def jobs(self, params: Dict[str, Any]) -> int:
        return int(params.get('jobs') or Config.JOBS)

    def finish(self, config: RunConfig, result: Dict[str, Any], verdict: Optional[bool] = None,
               tables: Optional[Dict[str, pd.DataFrame]] = None, out: Optional[str] = None) -> int:
        """Grava o relatório, ecoa o resumo em stdout e devolve 0 (aprovado) ou 2 (reprovado)"""
        config_dict = config.to_dict()
        artifact_manager.save_report(config.command, config_dict, result, tables, out, config.fmt)

        summary = {'command': config.command, 'verdict': verdict, 'config': config_dict,
                   'version': Config.VERSION, 'result': result}
        click.echo(json.dumps(to_jsonable(summary), sort_keys=True))

        elapsed = time.time() - self.started.pop(config.command, time.time())
        if verdict is False:
            logger.warning(f"❌ '{config.command}' reprovado ({elapsed:.1f}s)")
            return 2
        logger.info(f"✅ '{config.command}' concluído ({elapsed:.1f}s)")
        return 0


# Instância global do executor
command_runner = CommandRunner()
