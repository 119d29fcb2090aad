import csv
import json
from collections.abc import Iterable
from typing import Any, TextIO

from pydantic import BaseModel

from .models import OutputFormat, SweepConfig


def format_cell(value: Any) -> str:
    """CSV cell text: floats as shortest round-trip repr (<= 17 significant digits), lowercase booleans"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(records: Iterable[BaseModel], record_type: type[BaseModel], stream: TextIO) -> int:
    """Header row naming the record fields, then one LF-terminated row per record"""
    fields = list(record_type.model_fields)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(fields)
    count = 0
    for record in records:
        row = record.model_dump()
        writer.writerow([format_cell(row[name]) for name in fields])
        count += 1
    return count


def write_json(records: Iterable[BaseModel], config: SweepConfig, stream: TextIO) -> int:
    """Top-level object {"config": ..., "records": [...]}"""
    dumped = [record.model_dump(mode="json") for record in records]
    payload = {"config": config.model_dump(mode="json"), "records": dumped}
    json.dump(payload, stream, indent=2, allow_nan=False)
    stream.write("\n")
    return len(dumped)


def write_records(records: Iterable[BaseModel], record_type: type[BaseModel], config: SweepConfig, stream: TextIO) -> int:
    """Write records in the configured format; returns the number written"""
    if config.output_format is OutputFormat.JSON:
        return write_json(records, config, stream)
    return write_csv(records, record_type, stream)
