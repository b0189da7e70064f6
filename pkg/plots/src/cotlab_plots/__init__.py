"""Figure generation for cotlab CSV reports."""

from .figures import (
    EmptyDataError,
    FigureSpec,
    SchemaMismatchError,
    ks_statistic,
    render,
    render_all,
)

__version__ = "0.1.0"
