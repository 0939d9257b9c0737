import argparse

from phmaps import __version__

from .maps import register as register_maps
from .reports import register as register_reports


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phmaps", description="Construct and check homogeneous p-harmonic maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    register_maps(sub)
    register_reports(sub)
    return parser
