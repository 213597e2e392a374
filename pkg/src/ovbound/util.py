import logging
import math
import cmath
import yaml

from importlib import metadata

import numpy as np

import ovbound.exception as exception

logger = logging.getLogger(__name__)

def validate(val, message, extype=exception.ValidationException):
    if not val:
        raise extype(message)

def get_version():
    try:
        return metadata.version("ovbound")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"

def parse_real(obj, name="value"):
    validate(obj is not None, f"Missing {name}")

    try:
        val = float(str(obj).strip())
    except ValueError:
        raise exception.ValidationException(f"Unparseable {name}: {obj!r}") from None

    if not math.isfinite(val):
        raise exception.ValidationException(f"Non-finite {name}: {obj!r}")

    return val

def parse_real_list(obj, name="value"):
    validate(isinstance(obj, str) and obj.strip() != "", f"Empty list of {name}s")

    return [parse_real(item, name) for item in obj.split(",")]

def parse_plan(obj):
    """
    Parses a 'RADII,ANGLES,RMAX' string in to the plan triple
    """
    split = str(obj).split(",")
    if len(split) != 3:
        raise exception.ValidationException(f"Invalid plan ({obj}). Must be 'RADII,ANGLES,RMAX'")

    try:
        radii_count = int(split[0])
        angles_count = int(split[1])
    except ValueError:
        raise exception.ValidationException(f"Invalid counts in plan: {obj}") from None

    return radii_count, angles_count, parse_real(split[2], "r_max")

def is_power_of_two(val):
    return isinstance(val, (int, np.integer)) and val > 0 and (val & (val - 1)) == 0

def as_scalar(val):
    """
    Collapses 0-d numpy results back to python scalars
    """
    if isinstance(val, np.ndarray) and val.ndim == 0:
        return val.item()

    if isinstance(val, np.generic):
        return val.item()

    return val

def round_sig(val, digits=12):
    if val is None:
        return None

    val = float(val)
    if not math.isfinite(val):
        return None

    return float(f"{val:.{digits}g}")

def argument_degrees(val):
    return math.degrees(cmath.phase(complex(val)))

def plain(obj, digits=12):
    """
    Converts a report structure to plain json-compatible values with floats
    rounded to a fixed number of significant digits
    """
    if isinstance(obj, dict):
        return {key: plain(obj[key], digits) for key in obj}

    if isinstance(obj, (list, tuple)):
        return [plain(x, digits) for x in obj]

    if isinstance(obj, np.ndarray):
        return [plain(x, digits) for x in obj.tolist()]

    obj = as_scalar(obj)

    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj

    if isinstance(obj, int):
        return obj

    if isinstance(obj, complex):
        return {"re": round_sig(obj.real, digits), "im": round_sig(obj.imag, digits)}

    if isinstance(obj, float):
        return round_sig(obj, digits)

    raise exception.OVBInternalException(f"Unsupported type in report: {type(obj)}")

def yaml_load(source):
    loader = yaml.SafeLoader

    return yaml.load(source, Loader=loader)
