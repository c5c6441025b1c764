"""Command-line front end: compute quotient graphs, export them, verify results."""
from __future__ import annotations

import hashlib
import json
import os
import sys
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from . import bassserre as bs
from . import quatorders as qo
from . import treequot as tq
from .errors import BudgetError, HypothesisError, OpenCaseError, StructureError
from .realcyc import build_field

FLAVORS = ("gamma1", "gammaplus", "gamma0")

# ---------------------------------------------------------------------------
# expected results


@dataclass(frozen=True)
class ExpectedRecord:
    n: int
    flavor: str
    presentation: str | None = None
    chi: Fraction | None = None
    genus: int | None = None
    extra: dict = field(default_factory=dict)
    stretch: bool = False


def _r(n, flavor, pres=None, chi=None, genus=None, stretch=False, **extra):
    return ExpectedRecord(n, flavor, pres, Fraction(chi) if chi is not None else None, genus, extra, stretch)


# Published values for the unit groups of the maximal orders.
EXPECTED: list[ExpectedRecord] = [
    _r(8, "gamma1", "S4 *_{D4} S4", "-1/24", 0),
    _r(8, "gamma0", "S4 *_{D4} D8", "-1/48", 0),
    _r(12, "gamma1", "A4 *_{D2} D6", "-1/12", 0),
    _r(12, "gamma0", "S4 *_{D4} D12", "-1/24", 0),
    _r(16, "gamma1", "S4 *_{D4} D8 *_{D4} S4", "-5/48", 0),
    _r(16, "gamma0", "S4 *_{D4} D16", "-5/96", 0),
    _r(20, "gamma1", "A5 *_{A4} A5 *_{D2} D10", "-1/4", 0),
    _r(20, "gamma0", "A5 *_{A4} S4 *_{D4} D20", "-1/8", 0),
    _r(24, "gamma1", "*_{D4}{S4, S4, D12}", "-1/8", 0),
    _r(24, "gamma0", "S4 *_{D4} D24", "-1/16", 0),
    _r(28, "gamma1", "A4 *_{D2} D14 *_{C14} D14 *_{D2} A4 * Z^{*4}", "-13/3", 4),
    _r(28, "gammaplus", "S4 *_{D4} D28 *_{C28} D28 *_{D4} S4 * Z^{*2}", "-13/6", 2),
    _r(28, "gamma0", "D28 *_{C28} D28 *_{D4} S4 * C2^{*2}", "-13/12", 0, vertex_types=3),
    _r(36, "gamma1", "C9 * C3^{*3} * A4 *_{D2} D18 * Z^{*3}", None, 3),
    _r(36, "gamma0", "D9 *_{C2} D3 * C3 * S4 *_{D4} D36 * Z", "-217/72", 1),
    _r(32, "gamma0", "D32 *_{D4} S4 * C3^{*4} * C2^{*8} * Z^{*16}", "-1455/64", 16, True, vertex_types=58, trivial_stabilizers=40),
    _r(40, "gamma1", None, None, 34, True, direct_sum_factors=1),
    _r(40, "gamma0", None, "-287/16", 16, True),
    _r(48, "gamma1", None, None, 20, True),
    _r(48, "gamma0", None, "-365/32", 8, True),
    _r(60, "gamma0", None, "-15/2", 5, True, vertex_types=7, direct_sum_factors=1),
]


def expected_for(n: int, flavor: str) -> ExpectedRecord | None:
    for rec in EXPECTED:
        if rec.n == n and rec.flavor == flavor:
            return rec
    return None


# ---------------------------------------------------------------------------
# computation


@dataclass
class Result:
    n: int
    flavor: str
    graph: tq.QuotientGraph | None
    hgraph: bs.HGraphOfGroups | None
    presentation: bs.Presentation
    mass: bs.MassReport
    data: dict  # serialised form
    clifford: bs.Presentation | None = None


def compute(n: int, flavor: str, max_vertices: int = 500, alg: qo.QuatAlgebra | None = None, progress=None) -> Result:
    if alg is None:
        alg = qo.QuatAlgebra(build_field(n))
    graph = tq.bfs_quotient(alg, flavor, max_vertices=max_vertices, progress=progress)
    tq.locate_T_vertex(alg, graph)
    H = bs.from_quotient(graph)
    P = bs.fundamental_group(H)
    mass = bs.mass_and_genus(H)
    if mass.chi != P.chi():
        raise StructureError(f"mass {mass.chi} differs from presentation chi {P.chi()}")
    clifford = None
    if flavor == "gamma0" and graph.t_mark is not None:
        _, clifford = bs.detect_clifford_subpath(H, n, bs.t_location_in(H, graph))
    return Result(n, flavor, graph, H, P, mass, graph_to_json(graph, P, mass), clifford)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _element_json(x) -> list[str]:
    return [str(v) for v in x.vector()]


def graph_to_json(graph: tq.QuotientGraph, P: bs.Presentation, mass: bs.MassReport) -> dict:
    vertices = []
    for V in graph.vertices:
        marks = sorted(V.marks)
        if graph.t_mark == ("vertex", V.id) and "T" not in marks:
            marks.append("T")
        vertices.append(
            {
                "id": V.id,
                "label": str(V.stabilizer.label),
                "order_hnf": V.order.to_json(),
                "marks": marks,
                "mass": _frac(Fraction(1, V.stabilizer.order)),
                "depth": V.depth,
            }
        )
    edges = []
    for d in graph.edges():
        e = {
            "u": d.source,
            "v": d.target,
            "label": str(d.stabilizer.label),
            "half": d.half,
            "transporter": _element_json(d.transporter),
        }
        if d.half:
            e["half_label"] = str(graph.half_groups[d.id].label)
            e["marks"] = ["T"] if graph.t_mark is not None and graph.t_mark[0] == "edge" and graph.t_mark[1] in (d.id, d.reverse) else []
        edges.append(e)
    return {
        "n": graph.n,
        "flavor": graph.flavor,
        "vertices": vertices,
        "edges": edges,
        "chi": _frac(mass.chi),
        "genus": mass.genus,
        "presentation": str(P),
        "version": __version__,
    }


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def _clifford_edges(graph: tq.QuotientGraph) -> set[int]:
    """Dart ids (both directions) on the shortest path from M to T."""
    if graph.t_mark is None:
        return set()
    m = next((V.id for V in graph.vertices if "M" in V.marks), None)
    if m is None:
        return set()
    kind, ident = graph.t_mark
    target = ident if kind == "vertex" else graph.darts[ident].source
    prev = {m: None}
    dq = deque([m])
    while dq:
        v = dq.popleft()
        for d in graph.darts_at(v):
            if not d.half and d.target not in prev:
                prev[d.target] = d
                dq.append(d.target)
    out: set[int] = set()
    cur = target
    while prev.get(cur) is not None:
        d = prev[cur]
        out |= {d.id, d.reverse}
        cur = d.source
    if kind == "edge":
        out |= {ident, graph.darts[ident].reverse}
    return out


def export_dot(graph: tq.QuotientGraph | None, alg: qo.QuatAlgebra | None = None) -> str:
    """DOT text: squares are vertices where the gamma1 stabiliser is a proper
    subgroup of the gamma+ one, colours alternate with tree distance from M."""
    lines = ["graph quotient {", "  node [fontname=Helvetica];"]
    if graph is None or not graph.vertices:
        lines.append("}")
        return "\n".join(lines) + "\n"
    magenta = _clifford_edges(graph)
    for V in graph.vertices:
        shape = "circle"
        if alg is not None:
            g1 = tq.stabilizer_vertex(alg, V.order, "gamma1").order
            gp = tq.stabilizer_vertex(alg, V.order, "gammaplus").order
            shape = "square" if g1 < gp else "circle"
        color = "red" if V.depth % 2 == 0 else "blue"
        marks = sorted(V.marks | ({"T"} if graph.t_mark == ("vertex", V.id) else set()))
        xl = f', xlabel="{",".join(marks)}"' if marks else ""
        lines.append(f'  v{V.id} [label="{V.stabilizer.label}", shape={shape}, color={color}{xl}];')
    for d in graph.edges():
        style = ', color=magenta, penwidth=2' if d.id in magenta else ""
        if d.half:
            # the elided midpoint carries the larger group
            lab = f"{d.stabilizer.label}/{graph.half_groups[d.id].label}"
            tmark = ', headlabel="T"' if graph.t_mark is not None and graph.t_mark[0] == "edge" and graph.t_mark[1] in (d.id, d.reverse) else ""
            lines.append(f'  v{d.source} -- v{d.source} [label="{lab}", style=dashed{style}{tmark}];')
        else:
            lines.append(f'  v{d.source} -- v{d.target} [label="{d.stabilizer.label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cache


def cache_path(root: Path, n: int, flavor: str) -> Path:
    return root / str(n) / f"{flavor}.json"


def cache_save(root: Path, data: dict, partial: bool = False) -> Path:
    p = cache_path(root, data["n"], data["flavor"])
    p.parent.mkdir(parents=True, exist_ok=True)
    body = dict(data)
    body["partial"] = partial
    body.pop("checksum", None)
    body["checksum"] = hashlib.sha256(dumps(body).encode()).hexdigest()
    p.write_text(dumps(body))
    return p


def cache_load(root: Path, n: int, flavor: str) -> dict | None:
    p = cache_path(root, n, flavor)
    if not p.exists():
        return None
    body = json.loads(p.read_text())
    chk = body.pop("checksum", None)
    if chk != hashlib.sha256(dumps(body).encode()).hexdigest():
        return None
    if body.pop("partial", False) or body.get("version") != __version__:
        return None
    return body


def _cache_root(cache: str | None) -> Path | None:
    env = os.environ.get("AMALGAM_CACHE")
    if env:
        return Path(env)
    return Path(cache) if cache else None


# ---------------------------------------------------------------------------
# verification


def compare(rec: ExpectedRecord, data: dict) -> list[str]:
    """Differences between a computed record and the expected one."""
    diffs = []
    if rec.presentation is not None:
        got = bs.parse_presentation(data["presentation"])
        want = bs.parse_presentation(rec.presentation)
        if not bs.presentations_equivalent(got, want):
            diffs.append(f"presentation: expected {rec.presentation!r}, got {data['presentation']!r}")
    if rec.chi is not None and Fraction(data["chi"]) != rec.chi:
        diffs.append(f"chi: expected {_frac(rec.chi)}, got {data['chi']}")
    if rec.genus is not None and data["genus"] != rec.genus:
        diffs.append(f"genus: expected {rec.genus}, got {data['genus']}")
    ex = rec.extra
    if "vertex_types" in ex and len(data["vertices"]) != ex["vertex_types"]:
        diffs.append(f"vertex types: expected {ex['vertex_types']}, got {len(data['vertices'])}")
    if "trivial_stabilizers" in ex:
        k = sum(1 for v in data["vertices"] if v["label"] == "C1")
        if k != ex["trivial_stabilizers"]:
            diffs.append(f"trivial stabilisers: expected {ex['trivial_stabilizers']}, got {k}")
    if "direct_sum_factors" in ex:
        k = bs.parse_presentation(data["presentation"]).direct_sum_count()
        if k != ex["direct_sum_factors"]:
            diffs.append(f"G + Z factors: expected {ex['direct_sum_factors']}, got {k}")
    return diffs


def _parse_range(specs: tuple[str, ...]) -> list[int]:
    out: list[int] = []
    for s in specs:
        for part in s.split(","):
            if ".." in part:
                a, b = part.split("..")
                out.extend(n for n in range(int(a), int(b) + 1) if n % 4 == 0)
            elif part:
                out.append(int(part))
    return sorted(set(out))


def _flavors(flavor: str) -> tuple[str, ...]:
    return FLAVORS if flavor == "all" else (flavor,)


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(__version__)
def main():
    """Unit groups of maximal orders in definite quaternion algebras over Q(zeta_n)^+."""


def _common(f):
    f = click.option("--max-vertices", default=500, show_default=True, help="vertex budget per quotient graph")(f)
    f = click.option("--threads", default=1, show_default=True, help="worker bound (computation is sequential)")(f)
    f = click.option("--cache", "cache", default=None, type=click.Path(file_okay=False), help="cache directory (AMALGAM_CACHE overrides)")(f)
    f = click.option("--flavor", type=click.Choice(FLAVORS + ("all",)), default="all", show_default=True)(f)
    return f


@main.command("compute")
@click.option("-n", "n", type=int, required=True, help="cyclotomic level")
@_common
@click.option("--out", type=click.Path(file_okay=False), default=None, help="directory for JSON output")
@click.option("--dot", is_flag=True, help="also write DOT files")
@click.option("--verify-covers", is_flag=True, help="check the covers gamma1 -> gamma+ -> gamma0")
def cmd_compute(n, flavor, cache, threads, max_vertices, out, dot, verify_covers):
    """Compute quotient graphs and presentations for level n."""
    try:
        ctx = build_field(n)
    except HypothesisError as exc:
        click.echo(f"hypothesis fails for n = {n}: {exc}", err=True)
        sys.exit(2)
    alg = qo.QuatAlgebra(ctx)
    root = _cache_root(cache)
    graphs: dict[str, tq.QuotientGraph] = {}
    flavors = FLAVORS if verify_covers else _flavors(flavor)
    for fl in flavors:
        data = cache_load(root, n, fl) if root is not None and not (dot or verify_covers) else None
        if data is None:
            t0 = time.perf_counter()
            try:
                res = compute(n, fl, max_vertices, alg)
            except BudgetError as exc:
                click.echo(f"n = {n} {fl}: {exc}", err=True)
                if root is not None and exc.partial is not None:
                    cache_save(root, {"n": n, "flavor": fl, "vertices": len(exc.partial.vertices), "version": __version__}, partial=True)
                sys.exit(3)
            except OpenCaseError as exc:
                click.echo(f"n = {n} {fl}: unresolved case: {exc}", err=True)
                sys.exit(4)
            data = res.data
            graphs[fl] = res.graph
            if root is not None:
                cache_save(root, data)
            elapsed = time.perf_counter() - t0
            click.echo(f"n = {n} {fl}: {len(data['vertices'])} vertices, {elapsed:.1f}s", err=True)
            if dot:
                _write(out, f"{n}_{fl}.dot", export_dot(res.graph, alg))
        if fl in _flavors(flavor):
            click.echo(f"{fl}: {data['presentation']}  chi = {data['chi']}  genus = {data['genus']}")
            if out is not None:
                _write(out, f"{n}_{fl}.json", dumps(data))
    if verify_covers:
        for fine, coarse in (("gamma1", "gammaplus"), ("gammaplus", "gamma0")):
            rep = tq.cover_check(alg, graphs[fine], graphs[coarse])
            click.echo(f"cover {fine} -> {coarse}: degree {rep.degree}, ramified at {rep.ramified}, etale {rep.etale}")


def _write(out: str | None, name: str, text: str) -> None:
    d = Path(out) if out is not None else Path(".")
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


@main.command("verify")
@click.argument("levels", nargs=-1)
@_common
@click.option("--stretch", is_flag=True, help="include the long-running records")
def cmd_verify(levels, flavor, cache, threads, max_vertices, stretch):
    """Recompute levels (e.g. 8..24) and compare with the published results."""
    ns = _parse_range(levels) if levels else sorted({r.n for r in EXPECTED if stretch or not r.stretch})
    root = _cache_root(cache)
    failures = 0
    for n in ns:
        recs = [r for r in EXPECTED if r.n == n and r.flavor in _flavors(flavor) and (stretch or not r.stretch or levels)]
        if not recs:
            continue
        alg = None
        for rec in recs:
            data = cache_load(root, n, rec.flavor) if root is not None else None
            if data is None:
                if alg is None:
                    alg = qo.QuatAlgebra(build_field(n))
                try:
                    data = compute(n, rec.flavor, max_vertices, alg).data
                except (BudgetError, OpenCaseError, StructureError) as exc:
                    click.echo(f"FAIL n={n} {rec.flavor}: {type(exc).__name__}: {exc}")
                    failures += 1
                    continue
                if root is not None:
                    cache_save(root, data)
            diffs = compare(rec, data)
            if diffs:
                failures += 1
                click.echo(f"FAIL n={n} {rec.flavor}")
                for line in diffs:
                    click.echo(f"  {line}")
            else:
                click.echo(f"ok   n={n} {rec.flavor}: {data['presentation']}  chi = {data['chi']}  genus = {data['genus']}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
