#!/usr/bin/env python3
"""
Console and logging helpers for h1loc
"""

import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager

from colorama import Fore, Style
from colorama import init as colorama_init

# Initialize colorama for cross-platform support
colorama_init(autoreset=False)

logger = logging.getLogger("h1loc")

_LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(level: int = logging.INFO, log_file: str | None = None, console: bool = False):
    """Configure logging for the h1loc loggers.

    Call once at startup from the main entry point. With *log_file* a file
    handler records everything at DEBUG. *console* mirrors records at *level*
    and above to stderr, which is what ``--verbose`` asks for. Without
    either, a NullHandler keeps library use silent.
    """
    root = logging.getLogger("h1loc")
    root.setLevel(logging.DEBUG)

    if root.handlers:
        return

    fmt = logging.Formatter(_LOG_FORMAT, datefmt=_DATE_FORMAT)
    if log_file:
        fh = logging.FileHandler(log_file)
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(fmt)
        root.addHandler(fh)
    if console:
        sh = logging.StreamHandler(sys.stderr)
        sh.setLevel(level)
        sh.setFormatter(fmt)
        root.addHandler(sh)
    if not root.handlers:
        root.addHandler(logging.NullHandler())


class ColorPrinter:
    """Colored status lines on stderr; reports themselves go to stdout"""

    RED = Fore.RED
    GREEN = Fore.GREEN
    YELLOW = Fore.YELLOW
    BLUE = Fore.BLUE
    PURPLE = Fore.MAGENTA
    CYAN = Fore.CYAN
    BOLD = Style.BRIGHT
    NC = Style.RESET_ALL  # No Color

    def header(self, message: str):
        """Print a section header"""
        print(f"\n{self.BOLD}{self.PURPLE}#----- {message} -----#{self.NC}\n", file=sys.stderr)
        logger.info(message)

    def step(self, message: str):
        """Print a step"""
        print(f"{self.BLUE}[+] {self.CYAN}{message}{self.NC}", file=sys.stderr)
        logger.info(message)

    def success(self, message: str):
        """Print a success line"""
        print(f"{self.GREEN}[✓] {message}{self.NC}", file=sys.stderr)
        logger.info(message)

    def error(self, message: str):
        """Print an error line"""
        print(f"{self.RED}[✗] {message}{self.NC}", file=sys.stderr)
        logger.error(message)

    def warning(self, message: str):
        """Print a warning"""
        print(f"{self.YELLOW}[!] {message}{self.NC}", file=sys.stderr)
        logger.warning(message)


@contextmanager
def stopwatch() -> Iterator[list[float]]:
    """Yield a one-slot list that holds the elapsed seconds on exit."""
    elapsed = [0.0]
    start = time.perf_counter()
    try:
        yield elapsed
    finally:
        elapsed[0] = time.perf_counter() - start

