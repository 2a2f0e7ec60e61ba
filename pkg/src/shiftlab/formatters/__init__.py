# shiftlab.formatters package
__all__ = ["console"]
