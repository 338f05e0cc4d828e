"""
Иерархия исключений проекта.
Все ошибки библиотеки наследуются от PrivateKdeError; ошибки валидации
входных данных дополнительно наследуют ValueError.
"""


class PrivateKdeError(Exception):
    """Базовое исключение проекта"""


# --- Paillier ---

class PaillierError(PrivateKdeError):
    """Ошибки криптосистемы Paillier"""


class KeySizeError(PaillierError, ValueError):
    """Недопустимая длина ключа"""


class KeyMismatchError(PaillierError, ValueError):
    """Операция над шифртекстами разных ключей"""


class PlaintextRangeError(PaillierError, ValueError):
    """Открытый текст вне [0, n)"""


class InvalidCiphertextError(PaillierError, ValueError):
    """Шифртекст вне [0, n^2) или не обратим по модулю n^2"""


# --- Фиксированная точка ---

class FixedPointError(PrivateKdeError):
    """Ошибки параметров квантования"""


class PrecisionError(FixedPointError, ValueError):
    """F слишком мал для заданных m, sigma, B"""


class HeadroomError(FixedPointError, ValueError):
    """Суммы ядер не помещаются в модуль n"""


class MaskRangeError(FixedPointError, ValueError):
    """Маска вне допустимого диапазона"""


# --- Garbled circuits / OT ---

class GarbledCircuitError(PrivateKdeError):
    """Ошибки построения или вычисления garbled circuit"""


class GarbledEvaluationError(GarbledCircuitError):
    """Ни одна строка таблицы не расшифровалась: неверные метки"""


class ObliviousTransferError(PrivateKdeError):
    """Ошибки oblivious transfer"""


# --- Протокол ---

class ProtocolError(PrivateKdeError):
    """Ошибки четырехстороннего протокола"""


class TransportError(ProtocolError):
    """Сбой транспорта DH <-> CSP"""


class WireFormatError(ProtocolError, ValueError):
    """Неверный формат сообщения"""


# --- Данные ---

class DatasetError(PrivateKdeError):
    """Ошибки наборов данных"""


class DimensionMismatchError(DatasetError, ValueError):
    """Размерность запроса не совпадает с размерностью данных"""


class FeatureRangeError(DatasetError, ValueError):
    """Признак вне [0, 1]"""


class MalformedDataError(DatasetError, ValueError):
    """Слишком много битых строк или нечисловые признаки"""


# --- Атаки ---

class AttackError(PrivateKdeError):
    """Ошибки атак на k-NN"""


class DegenerateGeometryError(AttackError, ValueError):
    """Центры сфер аффинно зависимы"""


class InconsistentRadiiError(AttackError, ValueError):
    """Радиусы не имеют общей точки пересечения"""


class SearchBoundError(AttackError):
    """Граница поиска D меньше истинного расстояния"""


class OracleExhaustedError(AttackError):
    """Исчерпан лимит обращений к оракулу"""


class NoDistanceSignal(AttackError):
    """Выход классификатора не дает сигнала о расстоянии"""


class UnsupportedReductionError(AttackError, ValueError):
    """Редукция к 1-NN невозможна при данных k и числе классов"""


class ProbeStraddleError(AttackError):
    """Пробы попали в разные ячейки Вороного"""
