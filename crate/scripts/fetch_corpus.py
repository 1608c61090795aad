#!/usr/bin/env python3
"""Fetch the benchmark corpus into ./corpus as binary PPM files.

Test images are not vendored in the repository. This script pulls them from
public package registries (and the USC-SIPI database when reachable) and
converts everything to 8-bit P6 PPM.

Sources, tried in order per image:
  lenna    npm package `lena` (512x512 RGB ndarray)
  baboon   npm package `baboon-image` (512x512 PNG)
  peppers  USC-SIPI misc/4.2.07 (512x512 TIFF)
  fruits   OpenCV samples/data/fruits.jpg from the opencv-python sdist
  extra    scikit-image bundled photos (astronaut, coffee, chelsea), if installed

Images that cannot be fetched are reported and skipped. Requires npm, curl
and Pillow.

Usage: scripts/fetch_corpus.py [--out corpus] [--no-extra]
"""

import argparse
import base64
import io
import json
import re
import subprocess
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

from PIL import Image

SIPI_PEPPERS = "https://sipi.usc.edu/database/download.php?vol=misc&img=4.2.07"
PYPI_OPENCV = "https://pypi.org/pypi/opencv-python/json"


def write_ppm(img: Image.Image, path: Path) -> None:
    img = img.convert("RGB")
    w, h = img.size
    path.write_bytes(b"P6\n%d %d\n255\n" % (w, h) + img.tobytes())
    print(f"  wrote {path} ({w}x{h})")


def npm_tarball(package: str, workdir: Path) -> tarfile.TarFile:
    out = subprocess.run(
        ["npm", "pack", package, "--silent", "--pack-destination", str(workdir)],
        check=True,
        capture_output=True,
        text=True,
    ).stdout.strip().splitlines()[-1]
    return tarfile.open(workdir / out)


def fetch_lenna(workdir: Path) -> Image.Image:
    tar = npm_tarball("lena", workdir)
    src = tar.extractfile("package/lena.js").read().decode()
    payload = re.search(r"base64decode\(\s*'([^']+)'", src).group(1)
    raw = base64.b64decode(payload)
    # ndarray shape [512, 512, 3] with strides [3, 1536, 1]: row-major RGB.
    return Image.frombytes("RGB", (512, 512), raw)


def fetch_baboon(workdir: Path) -> Image.Image:
    tar = npm_tarball("baboon-image", workdir)
    return Image.open(io.BytesIO(tar.extractfile("package/baboon.png").read()))


def fetch_peppers(workdir: Path) -> Image.Image:
    data = urllib.request.urlopen(SIPI_PEPPERS, timeout=30).read()
    return Image.open(io.BytesIO(data))


def fetch_fruits(workdir: Path) -> Image.Image:
    meta = json.load(urllib.request.urlopen(PYPI_OPENCV, timeout=30))
    sdist = next(u for u in meta["urls"] if u["packagetype"] == "sdist")
    path = workdir / sdist["filename"]
    subprocess.run(["curl", "-sSfL", "-o", str(path), sdist["url"]], check=True)
    with tarfile.open(path) as tar:
        member = next(m for m in tar.getmembers() if m.name.endswith("samples/data/fruits.jpg"))
        return Image.open(io.BytesIO(tar.extractfile(member).read())).copy()


def extra_images():
    try:
        from skimage import data
    except ImportError:
        return {}
    return {name: (lambda n=name: Image.fromarray(getattr(data, n)())) for name in ("astronaut", "coffee", "chelsea")}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="corpus", type=Path)
    ap.add_argument("--no-extra", action="store_true", help="skip scikit-image photos")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sources = {
        "lenna": fetch_lenna,
        "baboon": fetch_baboon,
        "peppers": fetch_peppers,
        "fruits": fetch_fruits,
    }
    missing = []
    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        for name, fetch in sources.items():
            target = args.out / f"{name}.ppm"
            if target.exists():
                print(f"  {target} exists, skipping")
                continue
            try:
                write_ppm(fetch(workdir), target)
            except Exception as exc:  # noqa: BLE001 - report and continue
                print(f"  could not fetch {name}: {exc}", file=sys.stderr)
                missing.append(name)
        if not args.no_extra:
            for name, load in extra_images().items():
                target = args.out / f"{name}.ppm"
                if not target.exists():
                    write_ppm(load(), target)

    if missing:
        print(f"missing: {', '.join(missing)}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
