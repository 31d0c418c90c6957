"""``hsi-convert <in_cube> <in_gt> <out_cube> <out_labels> [--dataset NAME]``"""

import argparse
import sys

from .convert import ConversionError, convert
from .descriptors import DATASETS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="hsi-convert",
        description="Convert a MATLAB-container benchmark scene into HSIC/HSIL files.",
    )
    ap.add_argument("in_cube", help="input .mat file holding the reflectance cube")
    ap.add_argument("in_gt", help="input .mat file holding the ground-truth grid")
    ap.add_argument("out_cube", help="output .hsic path")
    ap.add_argument("out_labels", help="output .hsil path")
    ap.add_argument("--dataset", choices=sorted(DATASETS), default=None,
                    help="name the scene instead of auto-detecting by variable key")
    args = ap.parse_args(argv)
    try:
        summary = convert(args.in_cube, args.in_gt, args.out_cube,
                          args.out_labels, dataset=args.dataset)
    except ConversionError as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error[io]: {e}", file=sys.stderr)
        return 1
    for line in summary.lines():
        print(line)
    print(f"wrote {args.out_cube} and {args.out_labels}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
