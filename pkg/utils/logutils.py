import logging
import os
import sys

LOGGER_NAME = "utils"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s\n\nLog time: %(asctime)s\n"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(log_dir="logs", level="INFO", file_name="muubkit.log"):
    """Routes the toolkit's loggers to `<log_dir>/<file_name>`.

    Warnings and errors are mirrored to stderr; stdout stays reserved for
    command output. Calling it again replaces the previous handlers.
    """
    root = logging.getLogger(LOGGER_NAME)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    root.propagate = False

    try:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(os.path.join(log_dir, file_name), encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
        root.addHandler(file_handler)
    except OSError as e:
        print(f"Error: cannot open log file in {log_dir}: {e}", file=sys.stderr)

    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(logging.WARNING)
    stderr_handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root.addHandler(stderr_handler)
    return root
