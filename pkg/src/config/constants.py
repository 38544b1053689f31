"""
Константы приложения

Все численные допуски, значения по умолчанию и форматы вывода в одном месте
"""

import math

# ============================================================================
# Численные допуски
# ============================================================================

# Допуск на единичную норму θ*
UNIT_NORM_TOL = 1e-8

# Допуск выполнимости после проекции
FEASIBILITY_TOL = 1e-9

# Порог, начиная с которого b_n считается асимптотическим рядом (по t/2)
GAMMA_RATIO_SERIES_MIN = 16.0

# Точность обращения φ
PHI_INVERSE_XTOL = 1e-13

# Множитель расходимости: ошибка > DIVERGENCE_FACTOR * начальная ошибка
DIVERGENCE_FACTOR = 1e6


# ============================================================================
# Функции связи
# ============================================================================

# Минимальное число выборок Монте-Карло для статистик нелинейности
MIN_LINK_MC_SAMPLES = 1000

# Размер блока испытаний при оценке вероятности концентрации
PROBE_CHUNK_TRIALS = 1000

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

SIGN_VARIANCE = 1.0 - 2.0 / math.pi


# ============================================================================
# Геометрия
# ============================================================================

# Сетка λ по умолчанию: логарифмическая, 50 точек на [0.01, 10]
LAMBDA_GRID_SIZE = 50
LAMBDA_GRID_MIN = 0.01
LAMBDA_GRID_MAX = 10.0

# Число выборок Монте-Карло для ширины и гауссова расстояния
MC_SAMPLES = 100_000

# Размер блока выборок при оценке Монте-Карло
MC_CHUNK = 20_000


# ============================================================================
# Решатели
# ============================================================================

# Число итераций по умолчанию (эксперимент с однобитовыми наблюдениями)
DEFAULT_MAX_ITERS = 200

# Правила выбора шага: точное 1/b_n² или приближение 1/n
STEP_RULES = ("bn", "n")
DEFAULT_STEP_RULE = "bn"


# ============================================================================
# Эксперименты
# ============================================================================

DEFAULT_SEED = 2016

DEFAULT_TRIALS = 100

# Окно усреднения для «плато» ошибки
PLATEAU_WINDOW = 10

# Итераций PSGD на одну размерность p
PSGD_ITERS_PER_DIM = 40

EXPERIMENT_KINDS = ("onebit-vs-linear", "psgd-scaling")

SOLVER_NAMES = ("pgd", "psgd", "proxgd", "proxgd-resampled")

# Максимальное число одновременно выполняемых испытаний
MAX_WORKERS = 4


# ============================================================================
# Форматы вывода
# ============================================================================

TRACE_CSV_HEADER = ("iter", "error", "residual", "wall_ms")

SCHEDULE_CSV_HEADER = ("iter", "lambda_tau", "M_tau")

BOUND_CSV_HEADER = ("iter", "bound")

# 17 значащих цифр, без локали
FLOAT_FORMAT = "{:.17g}"

CSV_LINE_TERMINATOR = "\n"

SUMMARY_FILENAME = "summary.json"

MEAN_FILENAME = "mean.csv"


# ============================================================================
# Коды возврата CLI
# ============================================================================

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_ERROR = 2


# ============================================================================
# Логирование
# ============================================================================

LOGGER_NAME = "nlshrink"

LOG_FILENAME = "nlshrink.log"

# Максимальный размер лог файла (байты)
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10 MB

# Количество резервных копий лог файлов
LOG_BACKUP_COUNT = 3

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

CONSOLE_LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


# ============================================================================
# Статистика прогонов
# ============================================================================

# Интервал вывода статистики (каждые N завершенных испытаний)
STATS_REPORT_INTERVAL = 10
