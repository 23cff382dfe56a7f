#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Testes da Linha de Comando
Códigos de saída, artefatos e reexecução byte a byte
"""

import sys
import os
import json
import tempfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from run import main
from artifacts import artifact_manager
from services.path_algebra import CADLAG, StepPath


def _read(path: str) -> bytes:
    with open(path, 'rb') as handle:
        return handle.read()


def test_version():
    """--version termina com código 0"""
    assert main(['--version']) == 0


def test_decompose_and_replay():
    """decompose-check aprova e replay reproduz o artefato byte a byte"""
    print("🔍 Testando decompose-check e replay...")
    first, second = tempfile.mkdtemp(), tempfile.mkdtemp()
    assert main(['decompose-check', '--n', '256', '--replicas', '3', '--seed', '13',
                 '--jobs', '1', '--out', first]) == 0
    artifact = os.path.join(first, 'decompose-check.json')
    report = json.loads(_read(artifact))
    assert report['config']['command'] == 'decompose-check'
    assert report['config']['seed'] == 13
    assert report['result']['verdict'] is True

    assert main(['replay', artifact, '--jobs', '1', '--out', second]) == 0
    assert _read(artifact) == _read(os.path.join(second, 'decompose-check.json'))
    print("✅ Replay idêntico")


def test_usage_errors():
    """Pré-condições violadas e opções desconhecidas terminam com código 1"""
    print("🔍 Testando erros de uso...")
    out = tempfile.mkdtemp()
    assert main(['exponent', '--alpha', '1.5', '--beta', '0.7', '--ngrid', '256:1024:x2', '--out', out]) == 1
    assert main(['simulate', '--alpha', '1.0', '--beta', '0.5', '--out', out]) == 1
    assert main(['j2-gap', '--alpha', '1.5', '--beta', '1.5', '--pplus', '0.75', '--out', out]) == 1
    assert main(['oracle-test', '--alpha', '0.5', '--beta', '0.5', '--out', out]) == 1
    assert main(['decompose-check', '--bogus']) == 1
    assert not os.listdir(out)
    print("✅ Erros de uso OK")


def test_addition_exit_codes():
    """addition-test: 0 com saltos disjuntos, 2 com salto compartilhado"""
    print("🔍 Testando códigos de veredito...")
    out = tempfile.mkdtemp()
    assert main(['addition-test', '--m', '400', '--out', out]) == 0
    assert main(['addition-test', '--shared', '--m', '400', '--out', out]) == 2
    report = json.loads(_read(os.path.join(out, 'addition-test.json')))
    assert report['config']['options']['shared'] is True
    print("✅ Vereditos OK")


def test_simulate_deterministic():
    """simulate grava voo e caminhos, idênticos para a mesma semente"""
    print("🔍 Testando simulate...")
    first, second = tempfile.mkdtemp(), tempfile.mkdtemp()
    args = ['simulate', '--alpha', '1.5', '--pplus', '0.75', '--beta', '1.5', '--n', '128', '--seed', '3']
    assert main(args + ['--out', first]) == 0
    assert main(args + ['--out', second]) == 0
    for name in ('simulate_flight.csv', 'simulate_flight.json', 'simulate_walk_path.csv',
                 'simulate_flight_path.csv', 'simulate.json'):
        assert _read(os.path.join(first, name)) == _read(os.path.join(second, name)), name

    path, meta = artifact_manager.load_path(os.path.join(first, 'simulate_flight_path.csv'))
    assert path.domain == (0.0, 1.0) and path.m == 128
    assert meta['seed'] == 3
    print("✅ simulate OK")


def test_distance_command():
    """distance lê dois arquivos de caminho e grava a testemunha"""
    print("🔍 Testando distance...")
    out = tempfile.mkdtemp()
    f_file = artifact_manager.save_path(StepPath([0.0, 0.5, 1.0], [0.0, 1.0], CADLAG), os.path.join(out, 'f.csv'))
    g_file = artifact_manager.save_path(StepPath([0.0, 0.6, 1.0], [0.0, 1.0], CADLAG), os.path.join(out, 'g.csv'))
    assert main(['distance', f_file, g_file, '--metric', 'j1', '--m', '500', '--format', 'csv', '--out', out]) == 0
    report = json.loads(_read(os.path.join(out, 'distance.json')))
    assert abs(report['result']['value'] - 0.1) <= report['result']['slack']
    assert report['result']['replay_cost'] <= report['result']['value'] + report['result']['slack']
    assert os.path.exists(os.path.join(out, 'distance_witness.csv'))
    assert main(['distance', f_file, '--out', out]) == 1
    print("✅ distance OK")


def test_sample_stable_and_reorder():
    """sample-stable e reorder-check com parâmetros pequenos"""
    out = tempfile.mkdtemp()
    assert main(['sample-stable', '--index', '0.5', '--skew', '1', '--count', '500', '--out', out]) == 0
    report = json.loads(_read(os.path.join(out, 'sample-stable.json')))
    assert report['result']['count'] == 500 and report['result']['quantiles']['q05'] > 0
    assert main(['reorder-check', '--alpha', '1.5', '--pplus', '0.75', '--n', '256', '--replicas', '3',
                 '--jobs', '1', '--out', out]) == 0
    assert main(['reorder-check', '--alpha', '1.5', '--pplus', '0.5', '--out', out]) == 1


def test_run_spec_file():
    """run-spec executa um arquivo de experimento com controle negativo"""
    out = tempfile.mkdtemp()
    spec_file = os.path.join(out, 'experiment.json')
    with open(spec_file, 'w', encoding='utf-8') as handle:
        json.dump({'seed': 5, 'tests': [{'name': 'decomposition', 'replicas': 2, 'n': 128},
                                        {'name': 'addition', 'shared': True, 'm': 300, 'expect_fail': True}]},
                  handle)
    assert main(['run-spec', spec_file, '--jobs', '1', '--out', out]) == 0
    report = json.loads(_read(os.path.join(out, 'run-spec.json')))
    assert report['result']['verdict'] is True


if __name__ == "__main__":
    from test_simple import collect, run_tests
    sys.exit(0 if run_tests("Linha de Comando", collect(dict(globals()))) else 1)
