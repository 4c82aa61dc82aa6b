""" Запуск экспериментов стенда устойчивости из командной строки.

    smc-stability run <config.json> [--out DIR] [--workers K]
    smc-stability validate <config.json>
"""
import argparse
import sys
from pathlib import Path
from typing import Optional

import psutil

from smc_stability.common.config import ExperimentConfig, read_config
from smc_stability.common.constants import ExitCode, MsgForUser
from smc_stability.common.exceptions import ConfigError, StabilityLabError
from smc_stability.common.file_worker import return_or_create_dir
from smc_stability.common.logger_config import attach_log_file, detach_log_file, logger
from smc_stability.stabilitylab.experiment_runner import run_experiment, write_outcome

DEFAULT_OUT_DIR = Path('results')


def _say(message: str, level: str = 'info') -> None:
    """ Сообщение для пользователя: в консоль и в лог. """
    getattr(logger, level)(message)
    print(message)


def dispatch(config: ExperimentConfig, out_dir: Path, workers: int = 1) -> ExitCode:
    """ Выполнить эксперимент и записать результаты в out_dir.
    Нарушенное предусловие или любая другая ошибка - код 1, неопределённый результат - код 2. """
    out_dir = return_or_create_dir(out_dir)
    attach_log_file(out_dir)
    try:
        _say(MsgForUser.LAUNCH_OF_PROGRAM.value)
        logger.info('Эксперимент %s, seed = %s, workers = %s', config.kind.value, config.seed, workers)
        outcome = run_experiment(config, workers)
        write_outcome(outcome, config, out_dir)
    except StabilityLabError as error:
        _say(MsgForUser.PRECONDITION_FAILED.value + error.msg, 'error')
        return ExitCode.PRECONDITION
    except Exception as error:
        logger.exception(error)
        _say(MsgForUser.UNEXPECTED_ERROR.value + f'{type(error).__name__}: {error}', 'error')
        return ExitCode.PRECONDITION
    finally:
        detach_log_file()

    if outcome.status is ExitCode.INCONCLUSIVE:
        _say(MsgForUser.EXPERIMENT_INCONCLUSIVE.value, 'warning')
    print(MsgForUser.EXPERIMENT_FINISHED.value + str(out_dir))
    return outcome.status


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='smc-stability',
                                     description='Эксперименты устойчивости SMC-сэмплера')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='выполнить эксперимент по конфигурации')
    run.add_argument('config', type=Path)
    run.add_argument('--out', type=Path, default=None,
                     help='директория результатов (по умолчанию output_dir из конфигурации)')
    run.add_argument('--workers', type=int, default=None,
                     help='число процессов (по умолчанию число логических CPU)')

    validate = commands.add_parser('validate', help='только проверить конфигурацию')
    validate.add_argument('config', type=Path)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """ Точка входа консольной команды smc-stability. """
    args = create_parser().parse_args(argv)
    try:
        config = read_config(args.config)
    except ConfigError as error:
        _say(MsgForUser.CONFIG_IS_INVALID.value + error.msg, 'error')
        return int(ExitCode.PRECONDITION)

    if args.command == 'validate':
        print(MsgForUser.CONFIG_IS_VALID.value)
        for warning in config.warnings:
            print(warning)
        return int(ExitCode.SUCCESS)

    out_dir = args.out or Path(config.output_dir or DEFAULT_OUT_DIR / config.kind.value)
    workers = args.workers or config.workers or psutil.cpu_count() or 1
    return int(dispatch(config, out_dir, workers))


if __name__ == '__main__':
    sys.exit(main())
