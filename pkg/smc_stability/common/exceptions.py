"""Исключения"""


class StabilityLabError(Exception):
    """ Базовое исключение пакета. Текст ошибки хранится в атрибуте msg. """
    def __init__(self, msg: str = 'Ошибка стенда устойчивости'):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


class IndexOutOfRangeError(StabilityLabError):
    """ Индекс шага k (или пара k, ℓ) вне допустимого диапазона. """
    def __init__(self, what: str, value, low, high):
        super().__init__(f'Индекс {what} = {value} вне диапазона [{low}, {high}]')


class ParameterRangeError(StabilityLabError):
    """ Параметр (γ, β, α, δ, ε) вне допустимого диапазона. """
    def __init__(self, name: str, value, allowed: str):
        super().__init__(f'Параметр {name} = {value} вне допустимого диапазона {allowed}')


class UnsupportedModelError(StabilityLabError):
    """ Оракул вызван для модели без точных матриц. """
    def __init__(self, reason: str = 'у модели нет точных матриц ядер'):
        super().__init__(f'Операция не поддерживается для модели: {reason}')


class DegenerateModelError(StabilityLabError):
    """ Нулевая нормировка потока - признак ошибки построения модели. """
    def __init__(self, k: int):
        super().__init__(f'Нулевая нормировка η на шаге k = {k}')


class InvalidMeasureError(StabilityLabError):
    """ Вектор не является вероятностной мерой. """
    def __init__(self, reason: str):
        super().__init__(f'Некорректная мера: {reason}')


class InvalidKernelError(StabilityLabError):
    """ Матрица ядра не стохастическая. """
    def __init__(self, k: int, reason: str):
        super().__init__(f'Некорректная матрица ядра M_k при k = {k}: {reason}')


class PotentialBoundError(StabilityLabError):
    """ Значение потенциала нарушает ограничение сверху или не конечно. """
    def __init__(self, k: int, reason: str):
        super().__init__(f'Потенциал G_k при k = {k}: {reason}')


class AsymmetricIncrementError(StabilityLabError):
    """ Плотность приращения не симметрична относительно нуля. """
    def __init__(self, name: str, max_gap: float):
        super().__init__(
            f'Приращение {name} не симметрично: max |log q(y) - log q(-y)| = {max_gap:.3g}')


class ScheduleError(StabilityLabError):
    """ Расписание темперирования не прошло проверку на сетке. """
    def __init__(self, name: str, reason: str):
        super().__init__(f'Расписание {name}: {reason}')


class TotalDegeneracyError(StabilityLabError):
    """ Все веса частиц равны нулю (log-вес -inf). """
    def __init__(self, replicate: int, k: int):
        super().__init__(f'Полное вырождение весов: повтор {replicate}, шаг k = {k}')
        self.replicate = replicate
        self.k = k


class NonFiniteEstimateError(StabilityLabError):
    """ Тестовая функция вернула не конечное значение в частице. """
    def __init__(self, index: int, value):
        super().__init__(f'Не конечное значение f = {value} в частице с индексом {index}')
        self.index = index


class PreconditionError(StabilityLabError):
    """ Нарушено предусловие операции или эксперимента. """
    def __init__(self, reason: str):
        super().__init__(f'Нарушено предусловие: {reason}')


class ConfigError(StabilityLabError):
    """ Ошибка в конфигурации, path - путь к ключу через точку. """
    def __init__(self, path: str, reason: str):
        super().__init__(f'Ошибка конфигурации в ключе <{path}>: {reason}')
        self.path = path
