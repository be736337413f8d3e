from .core import make_list
