#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Comandos de Métricas
distance, reorder-check e decompose-check
"""

import logging

import click
import pandas as pd

from artifacts import artifact_manager
from commands.common import command_runner, law_options, run_options
from services.convergence_lab import LabSetup, convergence_lab
from services.skorokhod import skorokhod_solver

logger = logging.getLogger(__name__)

# Grupo registrado no comando raiz
metrics_commands = click.Group('metrics')


@metrics_commands.command('distance')
@click.argument('inputs', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option('--metric', type=click.Choice(['j1', 'j2', 'j32', 'hausdorff', 'bruteforce']), default=None)
@click.option('--m', 'm', type=int, default=None, help='Número de células da grade')
@click.option('--K', 'K', type=int, default=None, help='Máximo de trechos monótonos (j32)')
@run_options
def distance_command(**params):
    """Distância entre dois arquivos de caminho"""
    config = command_runner.prepare('distance', params)
    f, _ = artifact_manager.load_path(config.inputs[0])
    g, _ = artifact_manager.load_path(config.inputs[1])
    m = config.m

    tables = {}
    if config.metric == 'hausdorff':
        result = {'metric': 'hausdorff', 'value': skorokhod_solver.graph_hausdorff_lower(f, g, m), 'm': m}
    elif config.metric == 'bruteforce':
        result = {'metric': 'bruteforce', 'value': skorokhod_solver.d_j2_bruteforce(f, g, m), 'm': m}
    else:
        if config.metric == 'j1':
            distance = skorokhod_solver.d_j1_estimate(f, g, m)
        elif config.metric == 'j2':
            distance = skorokhod_solver.d_j2_estimate(f, g, m)
        else:
            distance = skorokhod_solver.d_j32_estimate(f, g, m, config.K)
        result = distance.summary()
        result['replay_cost'] = skorokhod_solver.replay_witness(f, g, distance)
        tables['witness'] = pd.DataFrame({'g_cell': distance.witness['rows'], 'f_cell': distance.witness['cols']})
    return command_runner.finish(config, result, None, tables, params.get('out'))


@metrics_commands.command('reorder-check')
@law_options
@click.option('--n', type=int, default=None)
@click.option('--T', 'T', type=float, default=None)
@click.option('--replicas', type=int, default=None)
@run_options
def reorder_check_command(**params):
    """Cota de deslocamento da reordenação que ordena a caminhada"""
    config = command_runner.prepare('reorder-check', params)
    # o meio não participa da reordenação; β só completa o regime
    setup = LabSetup.from_parameters(config.alpha, config.beta or 1.5, config.p_plus, 'pareto',
                                     config.x_min, config.seed)
    report = convergence_lab.reorder_suite(setup, config.n, config.T, config.replicas,
                                          command_runner.jobs(params))
    return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))


@metrics_commands.command('decompose-check')
@click.option('--n', type=int, default=None)
@click.option('--T', 'T', type=float, default=None)
@click.option('--replicas', type=int, default=None, help='Número de instâncias (α, β)')
@run_options
def decompose_check_command(**params):
    """Resíduo da decomposição de flutuações em instâncias aleatórias"""
    config = command_runner.prepare('decompose-check', params)
    report = convergence_lab.decomposition_suite(config.replicas, config.n, config.T, config.seed,
                                                 jobs=command_runner.jobs(params))
    return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))
