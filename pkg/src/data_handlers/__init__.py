from .globals import TOOL_NAME, VERSION, NA
from .model_file import save_model, load_model
from .utils import file_digest, config_echo, header_lines, load_record
from .tsv import (
    write_track,
    write_segments,
    write_sensor_track,
    write_loss_history,
    write_truth,
    read_truth,
    write_summary,
    open_output,
)

__all__ = [
    "TOOL_NAME",
    "VERSION",
    "NA",
    "save_model",
    "load_model",
    "file_digest",
    "config_echo",
    "header_lines",
    "load_record",
    "write_track",
    "write_segments",
    "write_sensor_track",
    "write_loss_history",
    "write_truth",
    "read_truth",
    "write_summary",
    "open_output",
]
