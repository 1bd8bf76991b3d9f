version = (0, 3, 0)
__version__ = '.'.join(str(part) for part in version)
