#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy Lab v1.0 - Gerenciador de Artefatos
Relatórios JSON, tabelas CSV, arquivos de caminho e dumps de voo
"""

import os
import io
import json
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config import Config

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Converte tipos numpy/pandas recursivamente para JSON"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict(orient='records'))
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


class ArtifactManager:
    """Gerenciador de escrita e leitura de artefatos em disco"""

    def __init__(self, output_dir: Optional[str] = None):
        """Inicializa com o diretório de saída configurado"""
        self.output_dir = output_dir or Config.OUTPUT_DIR

    def _resolve(self, name: str, output_dir: Optional[str] = None) -> str:
        directory = output_dir or self.output_dir
        os.makedirs(directory, exist_ok=True)
        return os.path.join(directory, name)

    def write_json(self, name: str, payload: Dict[str, Any], output_dir: Optional[str] = None) -> str:
        """Escreve JSON determinístico (chaves ordenadas, sem carimbo de tempo)"""
        path = self._resolve(name, output_dir)
        try:
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write(json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False))
                handle.write('\n')
            logger.info(f"✅ Artefato salvo: {path}")
            return path
        except Exception as e:
            logger.error(f"Erro ao salvar artefato {path}: {str(e)}")
            raise

    def write_table(self, name: str, frame: pd.DataFrame, output_dir: Optional[str] = None) -> str:
        path = self._resolve(name, output_dir)
        try:
            frame.to_csv(path, index=False, float_format='%.17g')
            logger.info(f"✅ Tabela salva: {path}")
            return path
        except Exception as e:
            logger.error(f"Erro ao salvar tabela {path}: {str(e)}")
            raise

    def read_json(self, path: str) -> Dict[str, Any]:
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                return json.load(handle)
        except Exception as e:
            logger.error(f"Erro ao ler {path}: {str(e)}")
            raise

    def save_report(self, command: str, config: Dict[str, Any], result: Dict[str, Any],
                    tables: Optional[Dict[str, pd.DataFrame]] = None,
                    output_dir: Optional[str] = None, fmt: str = 'json') -> List[str]:
        """Relatório {config, version, result} e, em formato csv, uma tabela por chave"""
        payload = {'config': config, 'version': Config.VERSION, 'result': result}
        written = [self.write_json(f"{command}.json", payload, output_dir)]
        if fmt == 'csv':
            for key, frame in (tables or {}).items():
                written.append(self.write_table(f"{command}_{key}.csv", frame, output_dir))
        return written

    def save_path(self, path_obj, file: str, header: Optional[Dict[str, Any]] = None) -> str:
        """Linha '# {json}' seguida de CSV breakpoint,value (borda esquerda de cada célula)"""
        meta = dict(header or {})
        meta.update({'domain': list(path_obj.domain), 'convention': path_obj.convention})
        if path_obj.tag is not None:
            meta.setdefault('tag', path_obj.tag.__dict__)
        frame = pd.DataFrame({'breakpoint': path_obj.edges[:-1], 'value': path_obj.values})
        directory = os.path.dirname(file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(file, 'w', encoding='utf-8') as handle:
            handle.write('# ' + json.dumps(to_jsonable(meta), sort_keys=True) + '\n')
            frame.to_csv(handle, index=False, float_format='%.17g')
        logger.info(f"✅ Caminho salvo: {file}")
        return file

    def load_path(self, file: str) -> Tuple[Any, Dict[str, Any]]:
        from services.path_algebra import StepPath

        try:
            with open(file, 'r', encoding='utf-8') as handle:
                first = handle.readline()
                if not first.startswith('#'):
                    raise ValueError(f"Arquivo de caminho sem cabeçalho: {file}")
                meta = json.loads(first[1:].strip())
                frame = pd.read_csv(io.StringIO(handle.read()))
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Erro ao ler caminho {file}: {str(e)}")
            raise ValueError(f"Arquivo de caminho inválido: {file}")

        a, b = meta['domain']
        edges = np.append(frame['breakpoint'].to_numpy(dtype=float), b)
        if edges[0] != a:
            raise ValueError(f"Primeira borda {edges[0]} difere do domínio {a}")
        return StepPath(edges, frame['value'].to_numpy(dtype=float), meta.get('convention', 'two_sided')), meta

    def save_flight(self, flight, file: str, metadata: Dict[str, Any]) -> List[str]:
        """CSV i,S,Y e JSON auxiliar com semente e leis"""
        frame = pd.DataFrame({
            'i': np.arange(flight.n + 1),
            'S': flight.walk.positions,
            'Y': flight.positions,
        })
        directory = os.path.dirname(file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(file, index=False, float_format='%.17g')
        sidecar = os.path.splitext(file)[0] + '.json'
        with open(sidecar, 'w', encoding='utf-8') as handle:
            handle.write(json.dumps(to_jsonable({**metadata, 'n': flight.n}), sort_keys=True, indent=2))
            handle.write('\n')
        logger.info(f"✅ Voo salvo: {file}")
        return [file, sidecar]


# Instância global do gerenciador
artifact_manager = ArtifactManager()
