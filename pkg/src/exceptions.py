"""
Кастомные исключения библиотеки оценивания
"""

from typing import Optional


class EstimationError(Exception):
    """Базовое исключение для всех ошибок библиотеки"""

    def __init__(self, message: str, code: Optional[str] = None, detail: Optional[str] = None):
        self.message = message
        self.code = code
        self.detail = detail
        super().__init__(self.message)

    def __str__(self):
        if self.code and self.detail:
            return f"{self.message} (код: {self.code}, детали: {self.detail})"
        if self.detail:
            return f"{self.message} ({self.detail})"
        return self.message


class DomainError(EstimationError):
    """Аргумент вне области определения функции"""

    def __init__(self, message: str = "Аргумент вне области определения", **kwargs):
        super().__init__(message, code=kwargs.pop("code", "domain"), **kwargs)


class PreconditionError(EstimationError):
    """Нарушено предусловие операции (размерности, нормировка θ* и т.п.)"""

    def __init__(self, message: str = "Нарушено предусловие операции", **kwargs):
        super().__init__(message, code=kwargs.pop("code", "precondition"), **kwargs)


class LinkEvaluationError(EstimationError):
    """Функция связи вернула нечисловое значение"""

    def __init__(self, message: str = "Функция связи вернула нечисловое значение",
                 index: Optional[int] = None, **kwargs):
        self.index = index
        if index is not None and "detail" not in kwargs:
            kwargs["detail"] = f"индекс {index}"
        super().__init__(message, code=kwargs.pop("code", "link"), **kwargs)


class UnsupportedError(EstimationError):
    """Операция не поддерживается для данного вида функции связи или регуляризатора"""

    def __init__(self, message: str = "Операция не поддерживается", **kwargs):
        super().__init__(message, code=kwargs.pop("code", "unsupported"), **kwargs)


class DivergenceError(EstimationError):
    """Итерации решателя разошлись"""

    def __init__(self, message: str = "Итерации разошлись",
                 iteration: Optional[int] = None, **kwargs):
        self.iteration = iteration
        if iteration is not None and "detail" not in kwargs:
            kwargs["detail"] = f"итерация {iteration}"
        super().__init__(message, code=kwargs.pop("code", "divergence"), **kwargs)


class ConfigError(EstimationError):
    """Ошибка конфигурации эксперимента"""

    def __init__(self, message: str = "Некорректная конфигурация",
                 line: Optional[int] = None, field: Optional[str] = None, **kwargs):
        self.line = line
        self.field = field
        if "detail" not in kwargs:
            if line is not None:
                kwargs["detail"] = f"строка {line}"
            elif field is not None:
                kwargs["detail"] = f"поле '{field}'"
        super().__init__(message, code=kwargs.pop("code", "config"), **kwargs)


class BoundUndefinedError(EstimationError):
    """Теоретическая оценка не определена (скорость сходимости >= 1)"""

    def __init__(self, message: str = "Теоретическая оценка не определена", **kwargs):
        super().__init__(message, code=kwargs.pop("code", "bound"), **kwargs)


class ResourceError(EstimationError):
    """Нехватка ресурса: память, исчерпанный генератор мини-батчей"""

    def __init__(self, message: str = "Недостаточно ресурсов", **kwargs):
        super().__init__(message, code=kwargs.pop("code", "resource"), **kwargs)
