#!/usr/bin/env python3
"""Fetch the 512x512 8-bit test images into data/ as binary PGM.

lena.pgm    from scipy 0.16.1's source distribution (scipy/misc/lena.dat)
grass.pgm   from scikit-image's bundled data
camera.pgm  from scikit-image's bundled data

Each output is checked against data/MANIFEST.sha256 when an entry exists.
"""

import argparse
import hashlib
import io
import re
import pathlib
import pickle
import sys
import tarfile
import urllib.parse
import urllib.request

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
SIMPLE_INDEX = "https://pypi.org/simple/scipy/"
SDIST = "scipy-0.16.1.tar.gz"


def write_pgm(path, img):
    img = np.asarray(img)
    if img.dtype != np.uint8:
        if img.min() < 0 or img.max() > 255:
            raise ValueError(f"{path}: values outside 0..255")
        img = img.astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(img.tobytes())


def scipy_sdist(cache):
    if cache and cache.exists():
        return cache.read_bytes()
    page = urllib.request.urlopen(SIMPLE_INDEX).read().decode()
    m = re.search(r'href="([^"]*/' + re.escape(SDIST) + r')#sha256=([0-9a-f]+)"', page)
    if not m:
        raise RuntimeError(f"{SDIST} not listed on {SIMPLE_INDEX}")
    url = urllib.parse.urljoin(SIMPLE_INDEX, m.group(1))
    print(f"downloading {url}", file=sys.stderr)
    data = urllib.request.urlopen(url).read()
    if hashlib.sha256(data).hexdigest() != m.group(2):
        raise RuntimeError(f"{SDIST}: sha256 does not match the index")
    if cache:
        cache.write_bytes(data)
    return data


def lena(sdist_bytes):
    with tarfile.open(fileobj=io.BytesIO(sdist_bytes)) as tar:
        member = next(m for m in tar.getmembers() if m.name.endswith("scipy/misc/lena.dat"))
        raw = tar.extractfile(member).read()
    return np.array(pickle.loads(raw, encoding="latin1"))


def skimage_image(name):
    import skimage.data
    return getattr(skimage.data, name)()


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=pathlib.Path, default=ROOT / "data")
    ap.add_argument("--sdist", type=pathlib.Path, help="local scipy-0.16.1.tar.gz (downloaded if missing)")
    ap.add_argument("--skip-lena", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    images = {}
    if not args.skip_lena:
        images["lena.pgm"] = lena(scipy_sdist(args.sdist))
    for name in ("grass", "camera"):
        try:
            images[f"{name}.pgm"] = skimage_image(name)
        except Exception as e:  # scikit-image missing or image not bundled
            print(f"warning: {name}: {e}", file=sys.stderr)

    manifest = {}
    mpath = args.out / "MANIFEST.sha256"
    if mpath.exists():
        for line in mpath.read_text().splitlines():
            if line.strip():
                digest, fname = line.split()
                manifest[fname] = digest

    bad = 0
    for fname, img in images.items():
        path = args.out / fname
        write_pgm(path, img)
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        want = manifest.get(fname)
        status = "new" if want is None else ("ok" if want == digest else "MISMATCH")
        bad += status == "MISMATCH"
        print(f"{status:8s} {digest}  {path}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
