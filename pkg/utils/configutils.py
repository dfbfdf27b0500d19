import os
from dataclasses import dataclass, field, asdict
from enum import Enum

from dotenv import load_dotenv

TOOL_NAME = "muub-kit"
TOOL_VERSION = "0.1.0"

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 200
DEFAULT_MAX_D = 13
FLOAT_TOLERANCE = 1e-10
COMPLEX_PRODUCT_TOLERANCE = 1e-12


class Mode(Enum):
    EXACT = "exact"
    FLOAT = "float"

    def __repr__(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    PRETTY = "pretty"

    def __repr__(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


def _env_int(name, default):
    raw = os.environ.get(name)
    try:
        return int(raw) if raw not in (None, "") else default
    except ValueError:
        return default


@dataclass(frozen=True)
class Settings:
    """Environment-level defaults; command line flags take precedence."""
    no_color: bool = False
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    workers: int = 1
    log_dir: str = "logs"
    log_level: str = "INFO"


def load_settings(dotenv_path=None) -> Settings:
    load_dotenv(dotenv_path)
    return Settings(
        no_color=_env_flag("MUUB_NO_COLOR"),
        seed=_env_int("MUUB_SEED", DEFAULT_SEED),
        samples=_env_int("MUUB_SAMPLES", DEFAULT_SAMPLES),
        workers=max(1, _env_int("MUUB_WORKERS", 1)),
        log_dir=os.environ.get("MUUB_LOG_DIR", "logs") or "logs",
        log_level=(os.environ.get("MUUB_LOG_LEVEL", "INFO") or "INFO").upper(),
    )


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    r: int | None = None
    s: int | None = None
    a: int | None = None
    b: int | None = None
    all: bool = False
    n: int | None = None
    mode: Mode = Mode.EXACT
    output_format: OutputFormat = OutputFormat.JSON
    out: str | None = None
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    max_d: int = DEFAULT_MAX_D
    workers: int = 1
    inject_fault: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        data = asdict(self)
        data["mode"] = str(self.mode)
        data["output_format"] = str(self.output_format)
        if not self.extra:
            del data["extra"]
        if not self.inject_fault:
            del data["inject_fault"]
        return data

    @staticmethod
    def from_dict(data: dict):
        return RunConfig(
            command=data["command"],
            d=data.get("d"),
            r=data.get("r"),
            s=data.get("s"),
            a=data.get("a"),
            b=data.get("b"),
            all=data.get("all", False),
            n=data.get("n"),
            mode=Mode(data.get("mode", "exact")),
            output_format=OutputFormat(data.get("output_format", "json")),
            out=data.get("out"),
            seed=data.get("seed", DEFAULT_SEED),
            samples=data.get("samples", DEFAULT_SAMPLES),
            max_d=data.get("max_d", DEFAULT_MAX_D),
            workers=data.get("workers", 1),
            inject_fault=data.get("inject_fault", False),
            extra=dict(data.get("extra", {})),
        )
