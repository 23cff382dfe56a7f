#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Comandos de Simulação
sample-stable e simulate
"""

import logging
import math
import os

import click
import numpy as np
import pandas as pd

from artifacts import artifact_manager
from commands.common import command_runner, law_options, run_options
from config import Config
from services.convergence_lab import DETERMINISTIC, LabSetup
from services.medium_walk import medium_builder
from services.path_algebra import path_algebra
from services.stable_rng import SeedStream, StableParams, stable_sampler

logger = logging.getLogger(__name__)

# Grupo registrado no comando raiz
simulation_commands = click.Group('simulation')


@simulation_commands.command('sample-stable')
@click.option('--index', type=float, default=None, help='Índice de estabilidade')
@click.option('--skew', type=float, default=None)
@click.option('--scale', type=float, default=None)
@click.option('--shift', type=float, default=None)
@click.option('--count', type=int, default=None, help='Número de amostras (padrão 1000)')
@run_options
def sample_stable_command(**params):
    """Amostra uma lei estável (parametrização 1)"""
    config = command_runner.prepare('sample-stable', params)
    options = config.options
    if options.get('index') is None:
        raise click.UsageError("sample-stable exige --index")

    stable = StableParams(options['index'], options.get('skew', 0.0), options.get('scale', 1.0),
                          options.get('shift', 0.0))
    draws = stable_sampler.sample_stable(stable, SeedStream(config.seed, 0, 'walk'), int(options.get('count', 1000)))
    quantiles = dict(zip(['q05', 'q25', 'q50', 'q75', 'q95'],
                         np.percentile(draws, [5, 25, 50, 75, 95]).tolist()))
    result = {'law': stable.describe(), 'count': len(draws), 'quantiles': quantiles}
    return command_runner.finish(config, result, None, {'draws': pd.DataFrame({'x': draws})}, params.get('out'))


@simulation_commands.command('simulate')
@law_options
@click.option('--n', type=int, default=None, help='Número de passos')
@click.option('--T', 'T', type=float, default=None, help='Horizonte dos caminhos reescalados')
@run_options
def simulate_command(**params):
    """Simula um voo e grava S, Y e os caminhos reescalados"""
    config = command_runner.prepare('simulate', params)
    setup = LabSetup.from_parameters(config.alpha, config.beta, config.p_plus, config.gap, config.x_min, config.seed)
    regime = setup.regime
    out = params.get('out') or Config.OUTPUT_DIR
    n, T = config.n, config.T

    flight = medium_builder.build_flight(setup.gap_law, setup.jump_law, int(math.ceil(n * T)), setup.streams(0))
    written = medium_builder.dump_flight(flight, os.path.join(out, 'simulate_flight.csv'),
                                         {'seed': config.seed, 'gap_law': setup.gap_law.describe(),
                                          'jump_law': setup.jump_law.describe()})

    header = {'n': n, 'alpha': regime.alpha, 'beta': regime.beta, 'mu': regime.mu, 'nu': regime.nu,
              'seed': config.seed}
    if regime.has_drift:
        walk_path = path_algebra.rescale_walk(flight.walk, n, 'bar', regime.alpha, regime.mu, T)
    else:
        walk_path = path_algebra.rescale_walk(flight.walk, n, 'hat', regime.alpha, T=T)
    if regime.position_mode == DETERMINISTIC:
        flight_path = path_algebra.rescale_flight(flight, n, 'bar', T=T)
    else:
        flight_path = path_algebra.rescale_flight(flight, n, 'hat', regime.position_exponent, T=T)
    written.append(artifact_manager.save_path(walk_path, os.path.join(out, 'simulate_walk_path.csv'), header))
    written.append(artifact_manager.save_path(flight_path, os.path.join(out, 'simulate_flight_path.csv'), header))

    lo, hi = flight.walk.span
    result = {
        'regime': regime.to_dict(),
        'steps': flight.n,
        'walk_span': [lo, hi],
        'final_position': float(flight.positions[-1]),
        'files': [os.path.basename(path) for path in written],
    }
    return command_runner.finish(config, result, None, None, out)
