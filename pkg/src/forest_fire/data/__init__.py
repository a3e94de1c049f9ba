from .datagen import MixtureSpec, gaussian_circle, gaussian_line, holdout_split, make_doublets

__all__ = ['MixtureSpec', 'gaussian_circle', 'gaussian_line', 'holdout_split', 'make_doublets']
