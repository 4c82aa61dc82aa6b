"""
Конфигурация логгинга.

    - attach_log_file:
        Добавить запись лога в файл внутри директории эксперимента.
"""
import logging
from pathlib import Path

from smc_stability.common.constants import OutputFiles

logger = logging.getLogger('smc_stability')
logger.setLevel(logging.DEBUG)
logger.propagate = False

# Удаление всех существующих обработчиков из логгера
if logger.hasHandlers():
    logger.handlers.clear()

formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

# Создание stream handler для вывода в консоль
console_handler = logging.StreamHandler()
console_handler.setLevel(logging.INFO)
console_handler.setFormatter(formatter)
logger.addHandler(console_handler)


def attach_log_file(out_dir: Path) -> Path:
    """ Добавить file handler, пишущий log_file.log в директорию эксперимента.
    Прежние file handler удаляются. """
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler):
            logger.removeHandler(handler)
            handler.close()

    log_file = Path(out_dir) / OutputFiles.LOG.value
    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
    return log_file


def detach_log_file() -> None:
    """ Закрыть и убрать file handler. """
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler):
            logger.removeHandler(handler)
            handler.close()
