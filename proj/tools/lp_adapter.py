#!/usr/bin/env python3
"""Reference external solver adapter for swmsim.

    SWMSIM_LP_SOLVER="python3 tools/lp_adapter.py {input} {output}"

Reads the MPS (or LP) file written by swmsim, solves it with HiGHS through
highspy, and writes "name value" lines plus an "objective" line. Falls back to
scipy.optimize.linprog with a small MPS reader when highspy is missing.
"""
import sys


def solve_highspy(path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(path) != highspy.HighsStatus.kOk:
        raise SystemExit(f"highspy could not read {path}")
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        raise SystemExit(f"HiGHS status: {h.modelStatusToString(h.getModelStatus())}")
    lp = h.getLp()
    values = h.getSolution().col_value
    names = [lp.col_names_[i] for i in range(lp.num_col_)]
    return names, list(values), h.getInfo().objective_function_value


def read_mps(path):
    """Free-format MPS with N and L rows only, as written by swmsim."""
    section, rows, obj_row = None, {}, None
    cols, col_index, entries, rhs = [], {}, [], {}
    maximize = False
    with open(path) as f:
        for line in f:
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            parts = line.split()
            if section == "OBJSENSE":
                maximize = parts[0].upper() in ("MAX", "MAXIMIZE")
            elif section == "ROWS":
                kind, name = parts
                if kind == "N":
                    obj_row = name
                elif kind == "L":
                    rows[name] = len(rows)
                else:
                    raise SystemExit(f"unsupported row type {kind}")
            elif section == "COLUMNS":
                col = parts[0]
                if col not in col_index:
                    col_index[col] = len(cols)
                    cols.append(col)
                for r, v in zip(parts[1::2], parts[2::2]):
                    entries.append((r, col_index[col], float(v)))
            elif section == "RHS":
                for r, v in zip(parts[1::2], parts[2::2]):
                    rhs[r] = float(v)
            elif section in ("BOUNDS", "RANGES"):
                raise SystemExit(f"unsupported section {section}")
    return maximize, obj_row, rows, cols, entries, rhs


def solve_scipy(path):
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    maximize, obj_row, rows, cols, entries, rhs = read_mps(path)
    c = np.zeros(len(cols))
    ri, ci, vals = [], [], []
    for r, j, v in entries:
        if r == obj_row:
            c[j] = v
        else:
            ri.append(rows[r])
            ci.append(j)
            vals.append(v)
    A = coo_matrix((vals, (ri, ci)), shape=(len(rows), len(cols))).tocsr()
    b = np.zeros(len(rows))
    for r, v in rhs.items():
        if r in rows:
            b[rows[r]] = v
    sign = -1.0 if maximize else 1.0
    res = linprog(sign * c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SystemExit(f"linprog: {res.message}")
    offset = -rhs.get(obj_row, 0.0)
    return cols, list(res.x), float(c @ res.x) + offset


def main():
    if len(sys.argv) != 3:
        raise SystemExit("usage: lp_adapter.py INPUT OUTPUT")
    src, dst = sys.argv[1], sys.argv[2]
    try:
        names, values, objective = solve_highspy(src)
    except ImportError:
        if not src.endswith(".mps"):
            raise SystemExit("the scipy fallback reads MPS only")
        names, values, objective = solve_scipy(src)
    with open(dst, "w") as out:
        out.write(f"objective {objective!r}\n")
        for n, v in zip(names, values):
            out.write(f"{n} {v!r}\n")


if __name__ == "__main__":
    main()
