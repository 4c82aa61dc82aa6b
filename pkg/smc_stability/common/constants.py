"""
Константы и структуры данных с постоянными значениями, которые используются в более,
чем в одном модуле.
"""
from enum import Enum, IntEnum
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# Директория с поставляемыми конфигурациями экспериментов.
CONFIGS_DIR = BASE_DIR / 'configs'

# Размеры сеток и выборок.
SCHEDULE_GRID_POINTS = 10 ** 4
PROBE_PROPOSALS = 10 ** 5
RANDOM_ETA_DRAWS = 100
MIN_REPLICATES_PER_CELL = 100
NOISE_FLOOR_SE = 3.0
PROBE_BAND_SE = 3.0
REFERENCE_BUDGET_FACTOR = 10
G_TILDE_THRESHOLD = 1e-3

# Формат вещественных чисел во всех выходных файлах.
FLOAT_FORMAT = '%.17g'

# Колонки таблицы траекторий сэмплера.
COLS_TRAJECTORY = ['replicate', 'n', 'k', 'ess', 'log_w_max', 'log_w_min',
                   'eta_V', 'eta_Gtilde']


##########################################################################
# Классы Enum.
##########################################################################
class ExperimentKind(Enum):
    """ Виды экспериментов, которые запускаются из конфигурации. """
    BIAS_DECAY = 'bias-decay'
    N_SCALING = 'n-scaling'
    DRIFT_CHECK = 'drift-check'
    COUNTEREXAMPLE = 'counterexample'
    LEMMA1_AUDIT = 'lemma1-audit'
    RUN = 'run'
    NORM_CONST_CHECK = 'norm-const-check'
    FG_SUFFICIENCY = 'fg-sufficiency'


class Defaults(Enum):
    """ Значения по умолчанию для конфигурации. """
    GAMMA_FLOOR = 0.7
    S = 1.0
    P = 1.0
    ALPHA = 0.25
    BETA = 0.5
    REPLICATES = 100
    INCREMENT_SCALE = 1.0
    N_GRID = (10,)
    PARTICLES_GRID = (1000,)


class Tolerance(Enum):
    """ Допуски численных проверок. """
    IDENTITY = 1e-12
    DUAL_ROUTE = 1e-10
    LIPSCHITZ_SAFETY = 1.01


class ExitCode(IntEnum):
    """ Коды завершения программы. """
    SUCCESS = 0
    PRECONDITION = 1
    INCONCLUSIVE = 2


class StreamPurpose(IntEnum):
    """ Назначение потока случайных чисел, первый элемент ключа потока. """
    INIT = 0
    STEP = 1
    KERNEL = 2
    PROBE = 3
    REFERENCE = 4
    ETA_DRAW = 5
    DATA = 6


class Status(Enum):
    """ Итоговый статус отчёта эксперимента. """
    SUCCESS = 'success'
    INCONCLUSIVE = 'inconclusive'
    FAILED = 'failed'


class OutputFiles(Enum):
    """ Имена выходных файлов эксперимента. """
    SUMMARY = 'summary.json'
    LOG = 'log_file.log'
    TRAJECTORIES = 'trajectories.csv'


class MsgForUser(Enum):
    """ Сообщения для пользователя. """
    LAUNCH_OF_PROGRAM = 'Запуск эксперимента устойчивости SMC.'
    CONFIG_IS_VALID = 'Конфигурация корректна.'
    CONFIG_IS_INVALID = 'Конфигурация некорректна: '
    EXPERIMENT_FINISHED = 'Эксперимент завершён, результаты в директории: '
    EXPERIMENT_INCONCLUSIVE = 'Эксперимент завершён без определённого вывода (шум выше сигнала).'
    PRECONDITION_FAILED = 'Нарушено предусловие эксперимента: '
    UNEXPECTED_ERROR = 'Эксперимент прерван ошибкой: '
    OUT_OF_THEORY = 'вне гипотез устойчивости темперирования'
    SUP_NOT_VERIFIED = 'Супремум log π̄ для цели задан оценкой сверху и не проверен'
