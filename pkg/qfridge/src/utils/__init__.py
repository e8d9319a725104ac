__all__ = (
    "JSON_ENC",
    "add_axis_args",
    "add_family_args",
    "add_misc_args",
    "add_model_args",
    "add_opts_args",
    "add_time_args",
    "encode_json_str",
    "format_duration",
    "parse_axis",
    "parse_family",
    "unpack_default",
)

from .helper import (
    JSON_ENC,
    add_axis_args,
    add_family_args,
    add_misc_args,
    add_model_args,
    add_opts_args,
    add_time_args,
    encode_json_str,
    format_duration,
    parse_axis,
    parse_family,
    unpack_default,
)
