import json
import logging
import os
from datetime import datetime

from . import settings
from .fn_embed import FnEmbWitness
from .space_embed import SpaceEmbWitness
from .verdict import Obstruction, Verdict, VerificationReport

logger = logging.getLogger(__name__)


# ============================================================
# Plain-data views
# ============================================================
def witness_to_dict(w):
    if isinstance(w, FnEmbWitness):
        return w.as_dict()
    if isinstance(w, SpaceEmbWitness):
        return {"kind": w.kind, **w.description}
    if isinstance(w, dict):
        return {str(k): v for k, v in w.items()}
    return w


def verdict_to_dict(v):
    """Yes carries the witness description, No the obstruction."""
    if v.yes:
        return {"verdict": "yes", "witness": witness_to_dict(v.witness)}
    return {"verdict": "no", "obstruction": v.obstruction.as_dict()}


def to_plain(obj):
    """Recursively turn engine results into JSON-ready values."""
    if isinstance(obj, Verdict):
        return verdict_to_dict(obj)
    if isinstance(obj, (Obstruction, VerificationReport)):
        return obj.as_dict()
    if isinstance(obj, (SpaceEmbWitness, FnEmbWitness)):
        return witness_to_dict(obj)
    if hasattr(obj, "as_dict"):
        return to_plain(obj.as_dict())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    return obj


def to_json(report, indent=None):
    indent = settings.json_indent() if indent is None else indent
    return json.dumps(to_plain(report), indent=indent, sort_keys=True, default=str)


# ============================================================
# Files
# ============================================================
def save_report(report, name, outdir=None):
    """
    Write a report as timestamped JSON.

    Parameters
    ----------
    report : dict, Verdict or VerificationReport
        Anything ``to_plain`` understands.
    name : str
        Report name, e.g. 'reduction check'; spaces become underscores.
    outdir : str
        Output directory, created if missing. Defaults to the configured one.

    Returns
    -------
    str
        Path of the written file.
    """
    outdir = outdir or settings.output_dir()
    os.makedirs(outdir, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    safe_name = name.replace(" ", "_")
    fname = os.path.join(outdir, f"{safe_name}_{timestamp}.json")

    with open(fname, "w") as f:
        f.write(to_json(report))
        f.write("\n")
    logger.info("Saved: %s", fname)
    return fname
