import csv
from pathlib import Path

import pytest

from fgplate import tables

COUNTS = {4: 72, 5: 96, 6: 96, 7: 96, 8: 96, 9: 32, 10: 36, 11: 32, 12: 192}


@pytest.mark.parametrize("table, count", COUNTS.items())
def test_entry_counts(table, count):
    items = tables.entries(table)
    assert len(items) == count
    assert all(e.reference > 0 for e in items)


def test_unknown_table():
    with pytest.raises(ValueError):
        tables.entries(13)


@pytest.mark.parametrize("table", [4, 10])
def test_cells_are_distinct_cases(table):
    items = tables.entries(table)
    assert len({e.case for e in items}) == len(items)


def test_table4_grid_symmetric_in_kx_ky():
    # homogeneous in-plane indices enter the square plate symmetrically
    ref = {(e.case.a_over_h0, e.case.bc, e.case.gradation): e.reference for e in tables.entries(4)}
    for (ratio, bc, g), v in ref.items():
        swapped = type(g)(g.ky, g.kx, g.kz)
        assert ref[(ratio, bc, swapped)] == v


def test_table12_bindings_and_foundations():
    items = tables.entries(12)
    labels = {e.binding for e in items}
    assert labels == {f"{b};{f}" for b in tables.T12_BINDINGS for f in tables.T12_FOUNDATIONS}
    si = [e for e in items if e.binding.endswith("kw_si")]
    assert all(e.case.kw_si == tables.WINKLER_T12 and e.case.kw_bar == 0 for e in si)


def test_csv_format_round_trip(tmp_path):
    rows = tables.reproduce(11, mesh=4, workers=1)[:4]
    text = tables.to_csv(rows)
    first, header = text.splitlines()[:2]
    assert first == f"# {tables.FORMAT}"
    assert header == ",".join(tables.COLUMNS)
    path = tmp_path / "t.csv"
    path.write_text(text)
    back = tables.read_csv(path)
    assert [float(r["fem"]) for r in back] == pytest.approx([r["fem"] for r in rows], rel=1e-9)
    assert tables.mean_abs_rel_error(back) == pytest.approx(tables.mean_abs_rel_error(rows), rel=1e-8)


def test_read_csv_rejects_foreign_file(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("table,row\n1,2\n")
    with pytest.raises(ValueError):
        tables.read_csv(path)


def test_reproduce_worker_count_does_not_change_output():
    serial = tables.to_csv(tables.reproduce(9, mesh=4, workers=1))
    pooled = tables.to_csv(tables.reproduce(9, mesh=4, workers=2))
    assert serial == pooled


def test_golden_table9_coarse_mesh():
    golden = Path(__file__).parent / "golden" / "table9_mesh4.csv"
    lines = golden.read_text().splitlines()
    fresh = tables.to_csv(tables.reproduce(9, mesh=4, workers=1)).splitlines()
    assert fresh[:2] == lines[:2]
    old, new = tables.read_csv(golden), list(csv.DictReader(fresh[1:]))
    for a, b in zip(old, new, strict=True):
        assert {k: v for k, v in a.items() if k not in ("fem", "rel_error")} == \
               {k: v for k, v in b.items() if k not in ("fem", "rel_error")}
        assert float(b["fem"]) == pytest.approx(float(a["fem"]), rel=1e-8)
