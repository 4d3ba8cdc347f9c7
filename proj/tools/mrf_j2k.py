#!/usr/bin/env python3
"""JPEG 2000 filter for the medroi external-codec protocol.

  mrf_j2k.py encode QUALITY   MRF1 frame on stdin -> J2K codestream on stdout
  mrf_j2k.py decode           J2K codestream on stdin -> MRF1 frame on stdout

QUALITY 0 is reversible (lossless); QUALITY n > 0 targets an n:1 rate.

  export MEDROI_CODEC_J2K="python3 mrf_j2k.py encode {quality}"
  export MEDROI_CODEC_J2K_DECODE="python3 mrf_j2k.py decode"
"""

import io
import struct
import sys

from PIL import Image

HEADER = struct.Struct("<4sHHB")


def encode(quality: int) -> None:
    data = sys.stdin.buffer.read()
    magic, w, h, depth = HEADER.unpack_from(data)
    if magic != b"MRF1" or depth not in (8, 16):
        sys.exit("mrf_j2k: bad frame header")
    samples = data[HEADER.size:]
    mode, raw = ("L", "L") if depth == 8 else ("I;16", "I;16")
    img = Image.frombytes(mode, (w, h), samples, "raw", raw)
    out = io.BytesIO()
    opts = {"irreversible": False}
    if quality > 0:
        opts = {"irreversible": True, "quality_mode": "rates", "quality_layers": [quality]}
    img.save(out, format="JPEG2000", no_jp2=True, **opts)
    sys.stdout.buffer.write(out.getvalue())


def decode() -> None:
    img = Image.open(io.BytesIO(sys.stdin.buffer.read()))
    img.load()
    depth = 8 if img.mode == "L" else 16
    if depth == 16 and img.mode != "I;16":
        img = img.convert("I;16")
    raw = img.tobytes("raw", "L" if depth == 8 else "I;16")
    sys.stdout.buffer.write(HEADER.pack(b"MRF1", img.width, img.height, depth) + raw)


def main() -> None:
    if len(sys.argv) >= 2 and sys.argv[1] == "encode":
        encode(int(sys.argv[2]) if len(sys.argv) > 2 else 0)
    elif len(sys.argv) >= 2 and sys.argv[1] == "decode":
        decode()
    else:
        sys.exit(__doc__)


if __name__ == "__main__":
    main()
