"""Smoke test for the wcec Python bindings.

Build first:  pip install --no-build-isolation -e crates/py
Then run:     python3 python/smoke_test.py
"""

import random

import wcec


def translating(width, height, frames, step, seed=7):
    """Gray CFA frames cut from a wider random-gradient scene."""
    rng = random.Random(seed)
    sw = width + step * (frames - 1)
    scene = [
        [(r * 3 + c * 2 + rng.randint(-4, 4)) % 256 for c in range(sw)]
        for r in range(height)
    ]
    out = []
    for t in range(frames):
        ox = step * t
        samples = bytes(scene[r][c + ox] for r in range(height) for c in range(width))
        out.append(wcec.CfaFrame(width, height, samples, "rggb"))
    return out


def main():
    assert [wcec.zigzag_map(v) for v in (0, -1, 1, -2, 2)] == [0, 1, 2, 3, 4]
    assert all(wcec.zigzag_unmap(wcec.zigzag_map(v)) == v for v in range(-300, 300))
    assert len(wcec.candidate_offsets(3)) == 49
    assert len(wcec.candidate_offsets(3, cfa_phase=True)) == 9
    assert wcec.candidate_offsets(1)[0] == (-1, -1)

    rgb = bytes([255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255])
    cfa = wcec.mosaic(2, 2, rgb, "rggb")
    assert cfa.samples == bytes([255, 255, 0, 255])
    assert wcec.parse_pgm(wcec.emit_pgm(cfa)) == cfa

    flat = wcec.CfaFrame(10, 10, bytes([90] * 100))
    assert wcec.classify_frame(flat, 5, 10.0) == [True] * 4

    frames = translating(40, 30, 4, 2)
    for flags in (
        {},
        {"recode_residuals": True},
        {"smooth": False, "cfa_phase": True},
    ):
        blob = wcec.encode_sequence(frames, **flags)
        assert blob[:4] == b"WCEC"
        assert wcec.decode_sequence(blob) == frames, flags
        stats = wcec.stream_stats(blob)
        assert stats["frames"] == 4
        assert stats["s_in"] == 40 * 30 * 4
        assert stats["s_out"] == len(blob)
        assert abs(stats["cr"] - stats["s_in"] / stats["s_out"]) < 1e-9
        assert [f["kind"] for f in stats["frame_stats"]] == ["intra"] + ["inter"] * 3

    rows = wcec.run_bench(frames)
    assert [r["config"] for r in rows] == [
        "smooth", "smooth+recode", "motion", "motion+recode", "intra-baseline",
    ]
    assert all(r["lossless"] for r in rows)

    try:
        wcec.decode_sequence(b"nope")
    except ValueError:
        pass
    else:
        raise AssertionError("garbage decoded")

    try:
        wcec.encode_sequence(frames, search_radius=4)
    except ValueError:
        pass
    else:
        raise AssertionError("radius 4 accepted")

    best = max(rows, key=lambda r: r["cr"])
    print(f"wcec smoke test OK ({best['config']} CR {best['cr']:.2f})")


if __name__ == "__main__":
    main()
