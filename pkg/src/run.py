#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Linha de Comando Principal
Simulação e verificação de voos de Lévy em meios aleatórios de Lévy
"""

import os
import sys
import logging
import traceback
from typing import List, Optional

import click
from dotenv import load_dotenv

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Carrega variáveis de ambiente
load_dotenv()

from config import Config

# Configuração de logging (stderr; stdout fica com o resumo JSON)
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Importa grupos de comandos
from commands.simulation import simulation_commands
from commands.metrics import metrics_commands
from commands.experiments import experiment_commands


def create_cli() -> click.Group:
    """Cria o comando raiz e registra os grupos de subcomandos"""

    @click.group(name='levy-lab')
    @click.version_option(Config.VERSION, prog_name='Levy Lab')
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  default=None, help='Nível de log (padrão: LEVY_LAB_LOG_LEVEL)')
    def cli(log_level):
        """Voos de Lévy em meios aleatórios de Lévy: simulação, métricas e experimentos"""
        if log_level:
            logging.getLogger().setLevel(log_level.upper())

    # Registra grupos
    for group in (simulation_commands, metrics_commands, experiment_commands):
        for name, command in group.commands.items():
            cli.add_command(command, name)
    return cli


cli = create_cli()


def main(argv: Optional[List[str]] = None) -> int:
    """Executa a linha de comando: 0 aprovado, 2 reprovado, 1 erro de uso"""
    try:
        result = cli.main(args=argv, prog_name='levy-lab', standalone_mode=False)
        return result if isinstance(result, int) else 0

    except click.exceptions.Abort:
        logger.error("Execução interrompida")
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except ValueError as e:
        logger.error(f"❌ Erro de uso: {str(e)}")
        return 1
    except Exception as e:
        logger.error(f"Erro não tratado: {str(e)}")
        logger.error(traceback.format_exc())
        return 1


run = main

if __name__ == '__main__':
    sys.exit(main())
