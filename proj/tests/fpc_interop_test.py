"""C++ writes a corpus, Python reads it and writes predictions, C++ evaluates them."""

import csv
import os
import subprocess
import sys
import tempfile

sys.path.insert(0, sys.argv[3])
import fpc  # noqa: E402

fpm, data = sys.argv[1], sys.argv[2]
assert fpc.crc64(b"123456789") == 0x995DC9BBDF1939FA

with tempfile.TemporaryDirectory() as work:
    corpus = os.path.join(work, "corpus")
    subprocess.run([fpm, "gen-dataset", os.path.join(data, "heldout", "camera.pgm"),
                    "-o", corpus, "--overlaps", "0.65", "--noise-stds", "0"], check=True)
    rows, skipped = fpc.read_manifest(os.path.join(corpus, "manifest.csv"))
    assert len(rows) == 1 and not skipped
    row = rows[0]
    cube_path = os.path.join(corpus, row["cube_path"])
    cube, meta, up = fpc.read_cube(cube_path)
    assert cube.shape == (25, 32, 32) and not up
    assert fpc.crc64(cube.astype("<f4").tobytes()) == row["checksum"]
    assert sorted(meta["permutation"]) == list(range(25))
    assert abs(cube.max() - 1.0) < 1e-6

    truth, _, _ = fpc.read_cube(os.path.join(corpus, meta["ground_truth"]))
    fpc.write_cube(fpc.prediction_path(cube_path), truth[0], {"source_id": meta["source_id"]})
    fpc.write_cube(fpc.prediction_path(cube_path, shuffled=True), truth[0] * 0.5)
    back, _, _ = fpc.read_cube(fpc.prediction_path(cube_path))
    assert (back == truth).all()

    subprocess.run([fpm, "evaluate", "-c", corpus, "-o", work, "--sweep", "overlap",
                    "--overlaps", "0.65", "--methods", "FPNET,FPNET-R", "--iterations", "1"],
                   check=True)
    with open(os.path.join(work, "overlap_sweep.csv")) as f:
        recs = {r["method"]: r for r in csv.DictReader(f)}
    assert float(recs["FPNET"]["psnr_db"]) == 99.0, recs
    assert float(recs["FPNET-R"]["psnr_db"]) < 20.0, recs
print("fpc interop ok")
