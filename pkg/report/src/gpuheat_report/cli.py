"""Command line: render a report from one or more trace CSVs."""

import argparse
import sys

from .render import IMAGE_FORMATS, ReportSpec, render_report
from .trace import TraceFormatError


def _trace_arg(value):
    path, sep, label = value.rpartition(":")
    if not sep or not path or not label:
        raise argparse.ArgumentTypeError(
            f"expected <path>:<label>, got {value!r}"
        )
    return path, label


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gpuheat-report",
        description="Render charts and an HTML index from simulation trace CSVs.",
    )
    parser.add_argument(
        "--trace",
        dest="traces",
        metavar="PATH:LABEL",
        type=_trace_arg,
        action="append",
        required=True,
        help="trace CSV with a label; repeat for overlays",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--format", choices=IMAGE_FORMATS, default="png", help="image format"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ReportSpec(
            traces=tuple(args.traces), output_dir=args.out, image_format=args.format
        )
        payload = render_report(spec)
    except (TraceFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for label, data in payload["traces"].items():
        fit = data["two_segment_fit"]
        fit_text = (
            f"knee {fit['knee_c']:.1f} °C, {fit['slope_s_per_c'] * 1000:.0f} ms/°C"
            if fit
            else "no fit"
        )
        print(
            f"{label}: {data['fragments_completed']} fragments, "
            f"gpu peak {data['peak_temp_gpu_c']:.1f} °C, {fit_text}"
        )
    print(f"report written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
