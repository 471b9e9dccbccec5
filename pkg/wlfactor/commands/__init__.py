from wlfactor.commands import factor, fixture, scheme, verify, wl

COMMANDS = (factor, verify, wl, scheme, fixture)

__all__ = ["COMMANDS"]
