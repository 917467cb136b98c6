"""Byte-stable JSON and CSV emission (floats always at 17 significant digits)."""
import json
import math

CSV_COLUMNS = ("n", "k", "w_max", "nodes", "delta_full", "delta_half", "zeta", "eta",
               "theta", "bound_paper", "bound_conservative", "mass_error", "quad_error")


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_lines(rows, columns=CSV_COLUMNS):
    yield ",".join(columns)
    for row in rows:
        cells = []
        for col in columns:
            v = row[col]
            cells.append(str(v) if isinstance(v, int) and not isinstance(v, bool) else fmt_float(v))
        yield ",".join(cells)
