"""
nlshrink - оценивание структурированного параметра по нелинейным наблюдениям
итерационными проекциями и сжатием
"""

__version__ = "1.0.0"
