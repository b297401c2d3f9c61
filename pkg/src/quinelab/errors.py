"""Exception hierarchy. Everything here maps to CLI exit status 1."""


class QuinelabError(Exception):
    pass


class UnsupportedConfiguration(QuinelabError):
    """Machine parameters for which outputs cannot be re-read as programs."""


class MergeError(QuinelabError):
    pass


class CalibrationError(QuinelabError):
    pass


class MapFileError(QuinelabError):
    pass


class ConfigError(QuinelabError):
    """Bad config file or flag value. The CLI treats this as a usage error."""
