from .files import read_labels, read_matrix, write_labels, write_matrix, write_report, write_trace

__all__ = ['read_labels', 'read_matrix', 'write_labels', 'write_matrix', 'write_report', 'write_trace']
