"""Build an argparse parser from a config dataclass and parse into it."""
import argparse
import dataclasses


def parse(config_cls, description=None, argv=None):
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(config_cls):
        flag = "--" + f.name.replace("_", "-")
        default = f.default
        if isinstance(default, bool):
            ap.add_argument(flag, dest=f.name, action="store_false" if default else "store_true")
        elif isinstance(default, tuple):
            kind = type(default[0]) if default else str
            ap.add_argument(flag, dest=f.name, default=default,
                            type=lambda s, kind=kind: tuple(kind(x) for x in s.split(",")))
        else:
            ap.add_argument(flag, dest=f.name, default=default, type=type(default))
    return config_cls(**vars(ap.parse_args(argv)))
