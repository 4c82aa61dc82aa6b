"""
Модуль с функциями для работы с файлами и директориями.

Функции:
    - return_or_create_dir:
        Вернуть или создать директорию.

    - write_files_atomic:
        Записать набор файлов через временные файлы и переименование.

    - write_df_atomic, write_json_atomic:
        Записать один CSV или JSON тем же способом.

    - dict_from_json_file:
        Вернуть словарь из JSON файла.

    - matrix_to_csv:
        Перевести матрицу или меру в текст CSV с 17 значащими цифрами.

    - matrix_from_csv:
        Прочитать матрицу из текста CSV.
"""
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd

from smc_stability.common.constants import FLOAT_FORMAT
from smc_stability.common.logger_config import logger


def return_or_create_dir(path_to_dir: Path) -> Path:
    """ Вернуть или создать директорию. """
    path_to_dir = Path(path_to_dir)
    if not path_to_dir.is_dir():
        os.makedirs(path_to_dir, exist_ok=True)
        logger.info('Создана директория %s', path_to_dir)
    return path_to_dir


def _stage(path: Path, write_into: Callable) -> str:
    """ Записать во временный файл рядом с path; вернуть имя временного файла. """
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as tmp_file:
            write_into(tmp_file)
    except BaseException:
        os.remove(tmp_name)
        raise
    return tmp_name


def write_files_atomic(writers: dict) -> list[Path]:
    """ Записать набор файлов {путь: функция записи}: сначала все во временные файлы,
    затем переименовать. При ошибке записи ни один файл набора не появляется. """
    staged = []
    try:
        for path, write_into in writers.items():
            path = Path(path)
            staged.append((_stage(path, write_into), path))
    except BaseException:
        for tmp_name, _ in staged:
            os.remove(tmp_name)
        raise
    for tmp_name, path in staged:
        os.replace(tmp_name, path)
        logger.info('Записан файл %s', path)
    return [path for _, path in staged]


def csv_writer(df: pd.DataFrame) -> Callable:
    """ Функция записи DataFrame в CSV с 17 значащими цифрами. """
    return lambda file: df.to_csv(file, index=False, float_format=FLOAT_FORMAT)


def write_df_atomic(df: pd.DataFrame, path: Path) -> Path:
    """ Записать DataFrame в CSV через временный файл. """
    return write_files_atomic({path: csv_writer(df)})[0]


def _to_jsonable(value):
    """ Привести numpy-типы, Enum и NaN к виду, пригодному для JSON. """
    if isinstance(value, dict):
        return {str(key): _to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, 'value') and hasattr(value, 'name'):
        return _to_jsonable(value.value)
    return value


def json_writer(data: dict) -> Callable:
    """ Функция записи словаря в JSON. """
    return lambda file: file.write(json.dumps(_to_jsonable(data), ensure_ascii=False, indent=2))


def write_json_atomic(data: dict, path: Path) -> Path:
    """ Записать словарь в JSON через временный файл. """
    return write_files_atomic({path: json_writer(data)})[0]


def dict_from_json_file(json_file: Path) -> dict:
    """ Вернуть словарь из JSON файла. """
    with open(json_file, 'r', encoding='utf-8') as file:
        return json.load(file)


def matrix_to_csv(matrix) -> str:
    """ Матрица (или вектор меры) в текст CSV, по строкам, 17 значащих цифр. """
    array = np.atleast_2d(np.asarray(matrix, dtype=float))
    return pd.DataFrame(array).to_csv(index=False, header=False, float_format=FLOAT_FORMAT)


def matrix_from_csv(text: str) -> np.ndarray:
    """ Прочитать матрицу из текста CSV. """
    return pd.read_csv(io.StringIO(text), header=None).to_numpy(dtype=float)
