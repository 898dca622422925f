"""Published benchmark grids (SUS304/Si3N4 plates) and their FEM reproduction.

Each table expands into :class:`Entry` rows: a case, the descriptor
columns that locate it in the printed grid, and the published value.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .case import PlateCase, Problem
from .material import Gradation, ThicknessKind
from .parallel import ordered_map
from .solver import analyze

FORMAT = "fgplate-reproduce/1"
COLUMNS = ("table", "row", "problem", "bc", "a_over_h0", "thickness_type", "kx", "ky", "kz",
           "kw_bar", "kw_si", "binding", "mesh", "fem", "reference", "rel_error")
TABLE_IDS = tuple(range(4, 13))


@dataclass(frozen=True)
class Entry:
    table: int
    case: PlateCase
    reference: float
    binding: str = ""


def _rows(block: str) -> list[list[float]]:
    return [[float(v) for v in line.split()] for line in block.strip().splitlines()]


def _case(problem, bc, ratio, kx, ky, kz, kind=1, **kw) -> PlateCase:
    return PlateCase.from_ratio(
        ratio, problem=Problem(problem), bc=bc, thickness_kind=ThicknessKind(kind),
        gradation=Gradation(kx, ky, kz), **kw)


# rows: kz in (2, 6) x ky in (2, 4, 8); columns: kx in (2, 4, 8)
_T4 = {
    (20, "CCCC"): """
        0.3488 0.3521 0.3538
        0.3521 0.3540 0.3550
        0.3538 0.3550 0.3555
        0.3512 0.3534 0.3545
        0.3534 0.3546 0.3553
        0.3545 0.3553 0.3556""",
    (20, "SSSS"): """
        0.9471 0.9558 0.9614
        0.9558 0.9602 0.9634
        0.9614 0.9634 0.9651
        0.9543 0.9600 0.9637
        0.9600 0.9629 0.9650
        0.9637 0.9650 0.9661""",
    (50, "CCCC"): """
        0.8379 0.8458 0.8500
        0.8458 0.8503 0.8527
        0.8500 0.8527 0.8541
        0.8436 0.8489 0.8516
        0.8489 0.8519 0.8534
        0.8516 0.8534 0.8543""",
    (50, "SSSS"): """
        2.3385 2.3601 2.3739
        2.3601 2.3710 2.3789
        2.3739 2.3789 2.3830
        2.3562 2.3704 2.3795
        2.3704 2.3776 2.3828
        2.3795 2.3828 2.3855""",
}

# rows: thickness type 1..3 x kz in (1, 2) x ky in (1, 2, 5, 10); columns: kx in (1, 2, 5, 10)
_FREQUENCY = {
    5: ("CCCC", 10, """
        1.4903 1.4435 1.4020 1.3900
        1.4435 1.4172 1.3930 1.3858
        1.4020 1.3930 1.3844 1.3818
        1.3900 1.3858 1.3818 1.3807
        1.4579 1.4256 1.3964 1.3877
        1.4256 1.4070 1.3897 1.3845
        1.3964 1.3897 1.3834 1.3815
        1.3877 1.3845 1.3815 1.3806
        1.9789 1.9170 1.8655 1.8509
        1.9203 1.8852 1.8547 1.8459
        1.8681 1.8557 1.8444 1.8412
        1.8522 1.8465 1.8412 1.8398
        1.9374 1.8948 1.8586 1.8480
        1.8971 1.8723 1.8507 1.8443
        1.8604 1.8513 1.8431 1.8407
        1.8490 1.8447 1.8407 1.8396
        1.7353 1.6804 1.6318 1.6175
        1.6804 1.6496 1.6213 1.6128
        1.6318 1.6213 1.6113 1.6083
        1.6175 1.6128 1.6083 1.6069
        1.6972 1.6594 1.6253 1.6149
        1.6594 1.6377 1.6175 1.6113
        1.6253 1.6175 1.6101 1.6078
        1.6149 1.6113 1.6078 1.6068"""),
    6: ("CCCC", 100, """
        1.6527 1.6009 1.5552 1.5423
        1.6009 1.5720 1.5455 1.5378
        1.5552 1.5455 1.5363 1.5336
        1.5423 1.5378 1.5336 1.5324
        1.6180 1.5820 1.5495 1.5401
        1.5820 1.5613 1.5422 1.5365
        1.5495 1.5422 1.5353 1.5332
        1.5401 1.5365 1.5332 1.5323
        2.3973 2.3229 2.2631 2.2475
        2.3284 2.2866 2.2515 2.2420
        2.2671 2.2530 2.2404 2.2369
        2.2494 2.2429 2.2370 2.2354
        2.3513 2.2994 2.2565 2.2449
        2.3031 2.2731 2.2476 2.2406
        2.2594 2.2487 2.2391 2.2365
        2.2464 2.2412 2.2365 2.2353
        1.9719 1.9096 1.8547 1.8391
        1.9096 1.8750 1.8432 1.8340
        1.8547 1.8432 1.8323 1.8290
        1.8391 1.8340 1.8290 1.8276
        1.9304 1.8871 1.8481 1.8366
        1.8871 1.8623 1.8393 1.8325
        1.8481 1.8393 1.8311 1.8286
        1.8366 1.8325 1.8286 1.8275"""),
    7: ("SSSS", 10, """
        0.8762 0.8492 0.8248 0.8166
        0.8492 0.8341 0.8199 0.8149
        0.8248 0.8199 0.8151 0.8131
        0.8166 0.8149 0.8131 0.8122
        0.8538 0.8388 0.8213 0.8154
        0.8388 0.8280 0.8177 0.8140
        0.8213 0.8178 0.8142 0.8127
        0.8154 0.8140 0.8127 0.8120
        1.2433 1.2051 1.1716 1.1605
        1.2066 1.1850 1.1651 1.1580
        1.1730 1.1659 1.1585 1.1553
        1.1613 1.1659 1.1555 1.1539
        1.2119 1.1872 1.1651 1.1576
        1.1882 1.1739 1.1607 1.1560
        1.1660 1.1612 1.1563 1.1542
        1.1581 1.1563 1.1543 1.1532
        1.0214 0.9902 0.9618 0.9520
        0.9902 0.9726 0.9559 0.9497
        0.9618 0.9559 0.9499 0.9473
        0.9520 0.9497 0.9473 0.9460
        0.9948 0.9746 0.9559 0.9493
        0.9746 0.9631 0.9520 0.9478
        0.9559 0.9520 0.9480 0.9462
        0.9493 0.9478 0.9462 0.9454"""),
    8: ("SSSS", 100, """
        0.9083 0.8802 0.8545 0.8463
        0.8802 0.8645 0.8498 0.8446
        0.8547 0.8498 0.8448 0.8427
        0.8463 0.8446 0.8428 0.8418
        0.8888 0.8692 0.8511 0.8450
        0.8692 0.8581 0.8475 0.8437
        0.8511 0.8475 0.8439 0.8423
        0.8450 0.8437 0.8423 0.8416
        1.3394 1.2983 1.2629 1.2514
        1.3002 1.2772 1.2562 1.2488
        1.2644 1.2570 1.2494 1.2461
        1.2519 1.2492 1.2462 1.2445
        1.3059 1.2793 1.2559 1.2482
        1.2806 1.2654 1.2515 1.2465
        1.2569 1.2520 1.2469 1.2447
        1.2486 1.2468 1.2448 1.2437
        1.0706 1.0379 1.0083 0.9981
        1.0379 1.0196 1.0022 0.9958
        1.0083 1.0022 0.9961 0.9933
        0.9981 0.9958 0.9933 0.9920
        1.0428 1.0217 1.0021 0.9953
        1.0217 1.0096 0.9981 0.9938
        1.0021 0.9981 0.9940 0.9921
        0.9953 0.9938 0.9921 0.9912"""),
}

# keyed (problem, bc, a/h0); columns kz in (0, 1, 2, 5)
_T9 = {
    ("uni-buckling", "SSSS", 10): "3.8020 2.9917 2.8400 2.6722",
    ("uni-buckling", "SSSS", 100): "4.0001 3.1570 3.0052 2.8354",
    ("uni-buckling", "CCCC", 10): "8.4122 6.4972 6.1262 5.7586",
    ("uni-buckling", "CCCC", 100): "10.0786 7.8449 7.4636 7.0869",
    ("bi-buckling", "SSSS", 10): "1.9010 1.4958 1.4200 1.3361",
    ("bi-buckling", "SSSS", 100): "2.0001 1.5785 1.5026 1.4177",
    ("bi-buckling", "CCCC", 10): "4.5997 3.5586 3.3621 3.1675",
    ("bi-buckling", "CCCC", 100): "5.3059 4.1301 3.9294 3.7312",
}

# CCCC, kz = 0; keyed (problem, a/h0); rows ky in (1, 2, 5), columns kx in (1, 2, 5).
# The printed column labels read 1, 5, 10, but the symmetric biaxial block
# only closes (row ky=2, col 1 == row ky=1, col 2) with kx = 1, 2, 5.
_T10 = {
    ("uni-buckling", 10): "5.6584 5.3713 5.1274\n5.4215 5.2428 5.0841\n5.1971 5.1154 5.0401",
    ("uni-buckling", 100): "6.9119 6.5737 6.2798\n6.6300 6.4163 6.2243\n6.3630 6.2619 6.1688",
    ("bi-buckling", 10): "3.1155 2.9729 2.8430\n2.9729 2.8872 2.8064\n2.8430 2.8064 2.7713",
    ("bi-buckling", 100): "3.6455 3.4832 3.3347\n3.4832 3.3843 3.2913\n3.3347 3.2913 3.2499",
}

# kx = ky = 1; same layout as _T9
_T11 = {
    ("uni-buckling", "SSSS", 10): "2.5997 2.4503 2.4192 2.3835",
    ("uni-buckling", "SSSS", 100): "2.7524 2.5934 2.5618 2.5253",
    ("uni-buckling", "CCCC", 10): "5.6584 5.3354 5.2615 5.1814",
    ("uni-buckling", "CCCC", 100): "6.9119 6.5170 6.4390 6.3532",
    ("bi-buckling", "SSSS", 10): "1.3024 1.2258 1.2100 1.1920",
    ("bi-buckling", "SSSS", 100): "1.3780 1.2971 1.2812 1.2628",
    ("bi-buckling", "CCCC", 10): "3.1155 2.9318 2.8916 2.8483",
    ("bi-buckling", "CCCC", 100): "3.6455 3.4326 3.3910 3.3454",
}

# keyed (bc, a/h0); columns (bending, uni, bi) x column index c in (1, 5)
_T12 = {
    ("SSSS", 10): "0.4733 0.4871 2.4503 2.3835 1.2258 1.1920",
    ("SSSS", 20): "0.9073 0.9327 2.5572 2.4894 1.2791 1.2449",
    ("SSSS", 50): "2.2406 2.3029 2.5888 2.5207 1.2948 1.2605",
    ("SSSS", 100): "4.4734 4.5974 2.5934 2.5253 1.2971 1.2628",
    ("CCCC", 10): "0.1891 0.1948 5.3354 5.1814 2.9318 2.8483",
    ("CCCC", 20): "0.3341 0.3434 6.1846 6.0226 3.2926 3.2061",
    ("CCCC", 50): "0.8029 0.8245 6.4732 6.3096 3.4142 3.3271",
    ("CCCC", 100): "1.5965 1.6392 6.5170 6.3532 3.4326 3.3454",
}
WINKLER_T12 = 81.0
T12_BINDINGS = ("kz", "ky")
# The 3^4 modulus is read two ways: a dimensional N/m^3 value on the 1 m plate
# (negligible, matches the foundation-free buckling columns) or as kw_bar.
T12_FOUNDATIONS = ("kw_si", "kw_bar")


def _table4():
    for (ratio, bc), block in _T4.items():
        rows = _rows(block)
        for r, (kz, ky) in enumerate((kz, ky) for kz in (2, 6) for ky in (2, 4, 8)):
            for c, kx in enumerate((2, 4, 8)):
                yield Entry(4, _case("bending", bc, ratio, kx, ky, kz), rows[r][c])


def _frequency(table):
    bc, ratio, block = _FREQUENCY[table]
    rows = _rows(block)
    grid = [(t, kz, ky) for t in (1, 2, 3) for kz in (1, 2) for ky in (1, 2, 5, 10)]
    for r, (kind, kz, ky) in enumerate(grid):
        for c, kx in enumerate((1, 2, 5, 10)):
            yield Entry(table, _case("free-vibration", bc, ratio, kx, ky, kz, kind), rows[r][c])


def _through_thickness(table, data, kx):
    for (problem, bc, ratio), line in data.items():
        for kz, ref in zip((0, 1, 2, 5), _rows(line)[0]):
            yield Entry(table, _case(problem, bc, ratio, kx, kx, kz), ref)


def _table10():
    for (problem, ratio), block in _T10.items():
        rows = _rows(block)
        for r, ky in enumerate((1, 2, 5)):
            for c, kx in enumerate((1, 2, 5)):
                yield Entry(10, _case(problem, "CCCC", ratio, kx, ky, 0), rows[r][c])


def _table12():
    problems = ("bending", "uni-buckling", "bi-buckling")
    for foundation in T12_FOUNDATIONS:
        winkler = {foundation: WINKLER_T12}
        for binding in T12_BINDINGS:
            for (bc, ratio), line in _T12.items():
                refs = _rows(line)[0]
                for p, problem in enumerate(problems):
                    for j, c in enumerate((1, 5)):
                        ky, kz = (1, c) if binding == "kz" else (c, 1)
                        case = _case(problem, bc, ratio, 1, ky, kz, **winkler)
                        yield Entry(12, case, refs[2 * p + j], f"{binding};{foundation}")


def entries(table: int) -> list[Entry]:
    if table == 4:
        return list(_table4())
    if table in _FREQUENCY:
        return list(_frequency(table))
    if table == 9:
        return list(_through_thickness(9, _T9, 0))
    if table == 10:
        return list(_table10())
    if table == 11:
        return list(_through_thickness(11, _T11, 1))
    if table == 12:
        return list(_table12())
    raise ValueError(f"unknown table {table}; expected one of {TABLE_IDS}")


def _solve(job):
    case, mesh = job
    return analyze(case, n=mesh).nondimensional


def reproduce(table: int, mesh: int = 32, workers: int | None = None) -> list[dict]:
    """FEM value, published value and relative error for every grid cell."""
    items = entries(table)
    values = ordered_map(_solve, [(e.case, mesh) for e in items], workers)
    rows = []
    for i, (e, fem) in enumerate(zip(items, values)):
        c, g = e.case, e.case.gradation
        rows.append({
            "table": table, "row": i, "problem": c.problem.value, "bc": c.bc,
            "a_over_h0": c.a_over_h0, "thickness_type": c.thickness_kind.value,
            "kx": g.kx, "ky": g.ky, "kz": g.kz, "kw_bar": c.kw_bar, "kw_si": c.kw_si,
            "binding": e.binding, "mesh": mesh, "fem": fem, "reference": e.reference,
            "rel_error": (fem - e.reference) / e.reference,
        })
    return rows


def _fmt(v):
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# {FORMAT}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in COLUMNS])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != f"# {FORMAT}":
        raise ValueError(f"{path}: not a {FORMAT} file")
    return list(csv.DictReader(lines[1:]))


def mean_abs_rel_error(rows: list[dict]) -> float:
    return sum(abs(float(r["rel_error"])) for r in rows) / len(rows)
