"""Run polarfield."""

import os
import platform
import sys

from polarfield.log_utils import setup_logging

THREADS_ENV = "POLARFIELD_THREADS"
BLAS_THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def pin_threads() -> None:
    """Pin BLAS thread pools to ``POLARFIELD_THREADS`` before numpy is loaded."""
    threads = os.environ.get(THREADS_ENV)
    if not threads:
        return
    for name in BLAS_THREAD_VARIABLES:
        os.environ[name] = threads


def run() -> None:
    """Run polarfield cli."""
    # Set process name
    if platform.system() == "Windows":
        import ctypes

        ctypes.windll.kernel32.SetConsoleTitleW("polarfield")  # type: ignore
    else:
        import setproctitle

        setproctitle.setproctitle("polarfield")

    pin_threads()
    setup_logging()

    from polarfield.cli import main

    sys.exit(main())


if __name__ == "__main__":
    run()
