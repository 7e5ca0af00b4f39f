"""Configuration documents and spectrum CSV files.

A configuration is an INI-style document::

    [mirror.srm]
    reflectance = 0.90
    transmittance = 0.10
    loss = 0.0

with sections ``mirror.{prm,srm,tsrm,end}``, ``space.{src,tsrc,prc}``,
``noise`` and ``scan``. Every key is required and unknown keys are errors.
Angles are degrees in the file and radians everywhere else.
"""

import configparser
import csv
import io
from importlib import resources

import numpy as np

from .errors import TsrError
from .optics import MirrorSpec, SpaceSpec, TsrModel
from .quadrature import SpectrumSeries

_MIRROR_KEYS = ("reflectance", "transmittance", "loss")
SCHEMA = {
    "mirror.prm": _MIRROR_KEYS,
    "mirror.srm": _MIRROR_KEYS,
    "mirror.tsrm": _MIRROR_KEYS,
    "mirror.end": _MIRROR_KEYS,
    "space.src": ("length_m", "detuning_rad"),
    "space.tsrc": ("length_m", "detuning_rad"),
    "space.prc": ("length_m",),
    "noise": (
        "internal_loss",
        "homodyne_angle_deg",
        "homodyne_efficiency",
        "input_squeezing_db",
        "squeeze_angle_deg",
    ),
    "scan": ("f_min_hz", "f_max_hz", "points"),
}
_INTEGER_KEYS = {("scan", "points")}

CSV_HEADER = ("frequency_hz", "noise_db")


class ConfigError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class CsvError(ValueError):
    pass


def bundled_path(name):
    """Filesystem path of a file shipped in ``tsrsim/data``."""
    return resources.files("tsrsim") / "data" / name


def _locate(text):
    """Map section -> line and (section, key) -> (line, value column), 1-based."""
    sections, keys = {}, {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, lineno)
        elif current is not None and line and line[0] not in "#;":
            for sep in ("=", ":"):
                if sep in raw:
                    key, _, rest = raw.partition(sep)
                    col = len(raw) - len(rest.lstrip()) + 1
                    keys.setdefault((current, key.strip().lower()), (lineno, col))
                    break
    return sections, keys


def parse_config(text):
    """Parse a configuration document into ``{section: {key: number}}``.

    Raises:
        ConfigError: syntax errors, missing or unknown sections/keys, bad numbers.
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", exc.lineno, 1) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno, 1) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno, 1) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", lineno, 1) from None

    sections, keys = _locate(text)
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]", sections.get(name), 1)
        for key in parser[name]:
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in [{name}]", *keys.get((name, key), (None, None)))

    doc = {}
    for name, expected in SCHEMA.items():
        if name not in parser:
            raise ConfigError(f"missing section [{name}]")
        doc[name] = {}
        for key in expected:
            if key not in parser[name]:
                raise ConfigError(f"missing key {key!r} in [{name}]", sections.get(name), 1)
            raw = parser[name][key]
            line, col = keys.get((name, key), (None, None))
            try:
                value = int(raw) if (name, key) in _INTEGER_KEYS else float(raw)
            except ValueError:
                raise ConfigError(f"{name}.{key}: not a number: {raw!r}", line, col) from None
            if not np.isfinite(value):
                raise ConfigError(f"{name}.{key}: must be finite", line, col)
            doc[name][key] = value
    _validate(doc, keys)
    return doc


def _validate(doc, keys):
    try:
        config_to_model(doc)
    except TsrError as exc:
        raise ConfigError(str(exc)) from None
    scan = doc["scan"]
    if not 0 < scan["f_min_hz"] < scan["f_max_hz"]:
        raise ConfigError("scan: need 0 < f_min_hz < f_max_hz", *keys.get(("scan", "f_min_hz"), (None, None)))
    if scan["points"] < 2:
        raise ConfigError("scan.points must be >= 2", *keys.get(("scan", "points"), (None, None)))


def read_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(doc):
    lines = []
    for name, expected in SCHEMA.items():
        lines.append(f"[{name}]")
        for key in expected:
            value = doc[name][key]
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def _mirror(section):
    return MirrorSpec(section["reflectance"], section["transmittance"], section["loss"])


def config_to_model(doc):
    noise = doc["noise"]
    return TsrModel(
        end_mirror=_mirror(doc["mirror.end"]),
        srm=_mirror(doc["mirror.srm"]),
        tsrm=_mirror(doc["mirror.tsrm"]),
        prm=_mirror(doc["mirror.prm"]),
        src_space=SpaceSpec(doc["space.src"]["length_m"], doc["space.src"]["detuning_rad"]),
        tsrc_space=SpaceSpec(doc["space.tsrc"]["length_m"], doc["space.tsrc"]["detuning_rad"]),
        prc_length=doc["space.prc"]["length_m"],
        internal_loss=noise["internal_loss"],
        homodyne_angle=np.radians(noise["homodyne_angle_deg"]),
        homodyne_efficiency=noise["homodyne_efficiency"],
        input_squeezing=noise["input_squeezing_db"],
        squeeze_angle=np.radians(noise["squeeze_angle_deg"]),
    )


def scan_grid(doc):
    s = doc["scan"]
    return np.linspace(s["f_min_hz"], s["f_max_hz"], s["points"])


def format_number(x):
    return f"{x:.9g}"


def write_spectrum_csv(series, stream):
    stream.write(",".join(CSV_HEADER) + "\n")
    for f, v in zip(series.frequencies, series.values):
        stream.write(f"{format_number(f)},{format_number(v)}\n")


def spectrum_to_csv(series):
    buf = io.StringIO()
    write_spectrum_csv(series, buf)
    return buf.getvalue()


def parse_spectrum_csv(text):
    """Read ``frequency_hz,noise_db`` records into a SpectrumSeries.

    Records may come in any order; they are sorted by frequency.
    Repeated frequencies are an error.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise CsvError(f"line 1: expected header {','.join(CSV_HEADER)}")
    freqs, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise CsvError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            freqs.append(float(row[0]))
            values.append(float(row[1]))
        except ValueError:
            raise CsvError(f"line {lineno}: not a number") from None
    if not freqs:
        raise CsvError("no data records")
    order = np.argsort(freqs, kind="stable")
    try:
        return SpectrumSeries(np.array(freqs)[order], np.array(values)[order])
    except ValueError as exc:
        raise CsvError(str(exc)) from None


def read_spectrum_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_spectrum_csv(fh.read())
