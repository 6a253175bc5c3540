import numpy as np
import pytest


def _write(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for row in rows:
            fh.write(" ".join(str(v) for v in row) + "\n")
    return path


@pytest.fixture
def trajectory_file(tmp_path):
    """Synthetic 40-row trajectory in the cli column grammar."""
    t = np.linspace(0.0, 2.0, 40)
    rows = [(f"{ti:.17g}", f"{np.cos(ti):.17g}", f"{np.sin(ti):.17g}",
             f"{0.5*ti:.17g}", "-", "1") for ti in t]
    return _write(tmp_path / "traj.txt", ["demo trajectory"], rows)


@pytest.fixture
def zigzag_file(tmp_path):
    t = np.linspace(0.0, 1.0, 30)
    rows = [(f"{ti:.17g}", f"{ti:.17g}", "0", f"{(-1)**i * ti:.17g}",
             "zig" if i % 2 else "zag", "1") for i, ti in enumerate(t)]
    return _write(tmp_path / "zigzag.txt", ["stochastic demo"], rows)


@pytest.fixture
def dirac_file(tmp_path):
    t = np.linspace(0.0, 1.0, 25)
    rows = [(f"{ti:.17g}", f"{ti:.17g}", "0", "0", "-", "0.6") for ti in t]
    return _write(tmp_path / "dirac.txt", ["deterministic demo"], rows)


@pytest.fixture
def jumps_file(tmp_path):
    rows = [("0.25", "0.25", "0", "0.1", "zag", "zig"),
            ("0.5", "0.5", "0", "-0.2", "zig", "zag"),
            ("0.75", "0.75", "0", "0.3", "zag", "zig")]
    return _write(tmp_path / "jumps.txt", ["jump log"], rows)


@pytest.fixture
def hcurve_file(tmp_path):
    rows = [(str(t), f"{2.0*np.exp(-0.1*t):.6f}") for t in range(0, 55, 5)]
    return _write(tmp_path / "hcurve.txt", ["h curve"], rows)
