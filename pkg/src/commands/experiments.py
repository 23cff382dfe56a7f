#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Comandos de Experimentos
fdd-test, oracle-test, exponent, j2-gap, addition-test, run-spec e replay
"""

import logging

import click
import pandas as pd

from artifacts import artifact_manager
from commands.common import command_runner, law_options, run_options
from config import ConfigError
from services.convergence_lab import LabSetup, convergence_lab, default_addition_pair

logger = logging.getLogger(__name__)

# Grupo registrado no comando raiz
experiment_commands = click.Group('experiments')


def _setup(config) -> LabSetup:
    return LabSetup.from_parameters(config.alpha, config.beta, config.p_plus, config.gap, config.x_min, config.seed)


@experiment_commands.command('fdd-test')
@law_options
@click.option('--n', type=int, default=None)
@click.option('--factor', type=int, default=None)
@click.option('--times', type=str, default=None, help='Tempos separados por vírgula')
@click.option('--replicas', type=int, default=None)
@click.option('--joint', is_flag=True, default=None, help='Marginais em 0.25, 0.5, 1 e KS bidimensional')
@click.option('--exponent-shift', type=float, default=None, help='Controle negativo: expoente deslocado')
@run_options
def fdd_test_command(**params):
    """Autoconsistência das distribuições finito-dimensionais entre n e factor·n"""
    config = command_runner.prepare('fdd-test', params)
    setup, jobs = _setup(config), command_runner.jobs(params)

    if config.options.get('joint'):
        report = convergence_lab.fdd_joint_test(setup, config.n, config.factor, config.replicas, jobs=jobs)
        return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))

    reports = [convergence_lab.fdd_self_consistency(setup, t, config.n, config.factor, config.replicas,
                                                    float(config.options.get('exponent_shift', 0.0)), jobs)
               for t in config.times]
    table = pd.DataFrame([{'t': t, **r.to_dict()} for t, r in zip(config.times, reports)])
    verdict = all(r.verdict for r in reports)
    return command_runner.finish(config, {'regime': setup.regime.to_dict(), 'ks': table}, verdict,
                                 {'ks': table}, params.get('out'))


@experiment_commands.command('oracle-test')
@law_options
@click.option('--n', type=int, default=None)
@click.option('--ngrid', 'n_grid', type=str, default=None, help='Vários n: lo:hi:xF ou lista')
@click.option('--times', type=str, default=None)
@click.option('--replicas', type=int, default=None)
@click.option('--scaling', type=click.Choice(['subordinated', 'drifted']), default=None)
@click.option('--exponent-shift', type=float, default=None)
@run_options
def oracle_test_command(**params):
    """KS entre Ŷ^{(n)}(t) simulado e o oráculo condicional exato"""
    config = command_runner.prepare('oracle-test', params)
    setup, jobs = _setup(config), command_runner.jobs(params)

    rows = []
    for n in config.n_grid or [config.n]:
        for t in config.times:
            report = convergence_lab.oracle_test(setup, n, t, config.replicas, config.options.get('scaling'),
                                                 float(config.options.get('exponent_shift', 0.0)), jobs)
            rows.append({'n': n, 't': t, **report.to_dict()})
    table = pd.DataFrame(rows)
    verdict = bool(table['verdict'].all())
    return command_runner.finish(config, {'regime': setup.regime.to_dict(), 'ks': table}, verdict,
                                 {'ks': table}, params.get('out'))


@experiment_commands.command('exponent')
@law_options
@click.option('--ngrid', 'n_grid', type=str, default=None, help='Grade geométrica lo:hi:xF')
@click.option('--times', type=str, default=None, help='Tempo t (o primeiro da lista)')
@click.option('--replicas', type=int, default=None)
@click.option('--target', type=click.Choice(['position', 'fluctuation', 'medium', 'walk']), default=None)
@click.option('--statistic', type=click.Choice(['iqr', 'median_abs']), default=None)
@click.option('--tolerance', type=float, default=None, help='Tolerância da inclinação (padrão 0.1)')
@run_options
def exponent_command(**params):
    """Ajuste log-log do expoente de escala"""
    config = command_runner.prepare('exponent', params)
    setup = _setup(config)
    fit = convergence_lab.exponent_fit(setup, config.times[0], config.n_grid, config.replicas,
                                       config.options.get('target', 'position'),
                                       config.options.get('statistic'), command_runner.jobs(params))
    tolerance = float(config.options.get('tolerance', 0.1))
    verdict = fit.verdict(tolerance)
    result = {'regime': setup.regime.to_dict(), 'fit': fit.to_dict(), 'tolerance': tolerance}
    return command_runner.finish(config, result, verdict, {'fit': fit.table()}, params.get('out'))


@experiment_commands.command('j2-gap')
@law_options
@click.option('--ngrid', 'n_grid', type=str, default=None)
@click.option('--replicas', type=int, default=None)
@click.option('--m', 'm', type=int, default=None)
@click.option('--T', 'T', type=float, default=None)
@run_options
def j2_gap_command(**params):
    """Medianas de J2 e J1 entre ω̂∘S̄ e ω̂∘(μ·id)"""
    config = command_runner.prepare('j2-gap', params)
    report = convergence_lab.j2_gap_experiment(_setup(config), config.n_grid or (2 ** 10, 2 ** 12, 2 ** 14),
                                               config.replicas, config.m, config.T, command_runner.jobs(params))
    return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))


@experiment_commands.command('addition-test')
@click.argument('inputs', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option('--schedule', type=str, default=None, help='Valores de k separados por vírgula')
@click.option('--m', 'm', type=int, default=None)
@click.option('--shared', is_flag=True, default=None, help='Controle negativo: salto compartilhado em 0.5')
@run_options
def addition_test_command(**params):
    """Continuidade da soma em J2 sob perturbações de saltos disjuntos"""
    config = command_runner.prepare('addition-test', params)
    shared = bool(config.options.get('shared', False))
    if config.inputs:
        if len(config.inputs) != 2:
            raise ConfigError("addition-test aceita exatamente dois arquivos de caminho")
        x, _ = artifact_manager.load_path(config.inputs[0])
        y, _ = artifact_manager.load_path(config.inputs[1])
    else:
        x, y = default_addition_pair(shared)

    schedule = config.options.get('schedule', '4,8,16,32')
    if isinstance(schedule, str):
        schedule = [int(k) for k in schedule.split(',') if k.strip()]
    report = convergence_lab.addition_continuity_experiment(x, y, schedule, config.m,
                                                            require_disjoint=not shared)
    return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))


@experiment_commands.command('run-spec')
@click.argument('spec_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--jobs', type=int, default=None)
@click.option('--out', type=click.Path(file_okay=False), default=None)
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None)
def run_spec_command(spec_file, **params):
    """Executa os testes de um arquivo de experimento {regime, laws, n_grid, replicas, seed, tests[]}"""
    config = command_runner.prepare('run-spec', {**params, 'spec': spec_file})
    base = {key: value for key, value in config.to_dict().items() if key not in ('options', 'command')}
    base = {key: value for key, value in base.items() if value is not None}
    report = convergence_lab.run_spec({**base, 'tests': config.options.get('tests', [])},
                                      command_runner.jobs(params))
    return command_runner.finish(config, report.to_dict(), report.verdict, report.tables, params.get('out'))


@experiment_commands.command('replay')
@click.argument('artifact', type=click.Path(exists=True, dir_okay=False))
@click.option('--jobs', type=int, default=None)
@click.option('--out', type=click.Path(file_okay=False), default=None)
@click.pass_context
def replay_command(ctx, artifact, jobs, out):
    """Reexecuta a configuração embutida num artefato"""
    embedded = artifact_manager.read_json(artifact).get('config')
    if not isinstance(embedded, dict) or not embedded.get('command'):
        raise ConfigError(f"Artefato sem configuração embutida: {artifact}")

    root = ctx.find_root()
    command = root.command.get_command(root, embedded['command'])
    if command is None or embedded['command'] == 'replay':
        raise ConfigError(f"Comando '{embedded['command']}' não pode ser reexecutado")
    logger.info(f"🔁 Reexecutando '{embedded['command']}' a partir de {artifact}")
    if embedded['command'] == 'run-spec':
        return ctx.invoke(command, spec_file=artifact, jobs=jobs, out=out)
    return ctx.invoke(command, spec=artifact, jobs=jobs, out=out)
