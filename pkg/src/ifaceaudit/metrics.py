"""Interface quality metrics and correlation analysis.

Per interface: size, DM/RDM (duplicated declarations), UM/RUM and NUM
(unused and never-used declarations), and IUC, the mean over client
classes of the fraction of the interface's methods each client uses.
System level: SDM/SUM/SNUM and their ratios to the total number of
interface methods, ReIM/RReIM (redundant re-declarations), NULC/RNULC
(lines of never-used implementations), and shared-implementation counts.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .detect import AnomalySet
from .model import CodeModel, MethodDecl, TypeRef

Number = int | float | Fraction


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class InterfaceMetrics:
    interface: TypeRef
    size: int
    dm: int
    um: int | None  # None: exempt from the unused analysis
    num: int | None
    rdm: float
    rum: float | None
    iuc: float | None  # None: no clients
    client_count: int

    @property
    def exempt(self) -> bool:
        return self.um is None


@dataclass(frozen=True)
class SystemMetrics:
    total_interface_methods: int
    sdm: int
    sum: int
    snum: int
    rsdm: float
    rsum: float
    rsnum: float
    distinct_dup_signatures: int
    reim: int
    rreim: float
    nulc: int
    rnulc: float
    shared_impl_count: int
    shared_impl_ratio: float
    system_loc: int = 0
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Correlation:
    x: str
    y: str
    n: int
    pearson: float | None
    spearman: float | None


@dataclass(frozen=True)
class CorrelationReport:
    entries: tuple[Correlation, ...]

    def get(self, x: str, y: str = "iuc") -> Correlation:
        for e in self.entries:
            if e.x == x and e.y == y:
                return e
        raise KeyError((x, y))


# -- IUC -----------------------------------------------------------------------


def iuc_exact(model: CodeModel, i: TypeRef | str) -> Fraction | None:
    decl = model.interface(i)
    clients = model.clients(decl.ref)
    if not clients or decl.size == 0:
        return None
    used_counts: dict[str, int] = defaultdict(int)
    client_names = {c.qualified for c in clients}
    for d in decl.methods:
        for c in model.callers_reaching(decl.ref, d) & client_names:
            used_counts[c] += 1
    total = sum(Fraction(used_counts[c], decl.size) for c in sorted(client_names))
    return total / len(client_names)


def iuc(model: CodeModel, i: TypeRef | str) -> float | None:
    """Interface usage cohesion, or None when the interface has no clients."""
    value = iuc_exact(model, i)
    return None if value is None else float(value)


# -- per interface / system -----------------------------------------------------


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def interface_metrics(model: CodeModel, anomalies: AnomalySet) -> list[InterfaceMetrics]:
    duplicated = anomalies.duplicated_declarations
    out = []
    for decl in model.sorted_interfaces():
        q = decl.ref.qualified
        dm = sum(1 for d in decl.methods if d in duplicated)
        um = len(anomalies.unused[q]) if q in anomalies.unused else None
        num = len(anomalies.never_used[q]) if q in anomalies.never_used else None
        out.append(
            InterfaceMetrics(
                interface=decl.ref,
                size=decl.size,
                dm=dm,
                um=um,
                num=num,
                rdm=_ratio(dm, decl.size),
                rum=None if um is None else _ratio(um, decl.size),
                iuc=iuc(model, decl.ref),
                client_count=len(model.clients(decl.ref)),
            )
        )
    return out


def never_used_implementations(
    model: CodeModel, anomalies: AnomalySet
) -> dict[MethodDecl, frozenset[MethodDecl]]:
    """Concrete methods overriding only never-used declarations, with those declarations."""
    never = frozenset(d for ds in anomalies.never_used.values() for d in ds)
    overridden: dict[MethodDecl, set[MethodDecl]] = defaultdict(set)
    for d, impls in model.override_map().items():
        for m in impls:
            overridden[m].add(d)
    return {m: frozenset(ds) for m, ds in overridden.items() if ds <= never}


def system_metrics(
    model: CodeModel, anomalies: AnomalySet, per_interface: Sequence[InterfaceMetrics]
) -> SystemMetrics:
    total = sum(m.size for m in per_interface)
    sdm = sum(m.dm for m in per_interface)
    s_um = sum(m.um for m in per_interface if m.um is not None)
    snum = sum(m.num for m in per_interface if m.num is not None)
    ds = len(anomalies.clone_groups)
    reim = sdm - ds

    nulc = sum(m.loc for m in never_used_implementations(model, anomalies))

    duplicated = anomalies.duplicated_declarations
    dup_owners: dict[MethodDecl, set[str]] = defaultdict(set)
    for d, impls in model.override_map().items():
        if d in duplicated:
            for m in impls:
                dup_owners[m].add(d.owner.qualified)
    shared = sum(1 for owners in dup_owners.values() if len(owners) >= 2)

    notes = []
    if total == 0:
        notes.append("no interface methods: interface ratios reported as 0")
    if model.system_loc == 0:
        notes.append("system LOC is 0: RNULC reported as 0")
    if not dup_owners:
        notes.append("no implementations of duplicate methods: shared ratio reported as 0")
    return SystemMetrics(
        total_interface_methods=total,
        sdm=sdm,
        sum=s_um,
        snum=snum,
        rsdm=_ratio(sdm, total),
        rsum=_ratio(s_um, total),
        rsnum=_ratio(snum, total),
        distinct_dup_signatures=ds,
        reim=reim,
        rreim=_ratio(reim, total),
        nulc=nulc,
        rnulc=_ratio(nulc, model.system_loc),
        shared_impl_count=shared,
        shared_impl_ratio=_ratio(shared, len(dup_owners)),
        system_loc=model.system_loc,
        notes=tuple(notes),
    )


# -- correlation --------------------------------------------------------------------


def pearson(xs: Sequence[Number], ys: Sequence[Number]) -> float | None:
    """Product-moment correlation; None when n < 2 or a variable is constant.

    Sums are taken in exact rational arithmetic over the (exact) input
    values, so perfectly linear data yields exactly +/-1.
    """
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} != {len(ys)}")
    n = len(xs)
    if n < 2:
        return None
    fx = [Fraction(x) for x in xs]
    fy = [Fraction(y) for y in ys]
    mx, my = sum(fx) / n, sum(fy) / n
    dx = [x - mx for x in fx]
    dy = [y - my for y in fy]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum(a * b for a, b in zip(dx, dy))
    r = math.sqrt(float(sxy * sxy / (sxx * syy)))
    return math.copysign(min(r, 1.0), sxy) if sxy else 0.0


def fractional_ranks(values: Sequence[Number]) -> list[Fraction]:
    """1-based ranks; tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks: list[Fraction] = [Fraction(0)] * len(values)
    start = 0
    while start < len(order):
        stop = start
        while stop + 1 < len(order) and values[order[stop + 1]] == values[order[start]]:
            stop += 1
        rank = Fraction(start + stop + 2, 2)
        for k in order[start : stop + 1]:
            ranks[k] = rank
        start = stop + 1
    return ranks


def spearman(xs: Sequence[Number], ys: Sequence[Number]) -> float | None:
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} != {len(ys)}")
    return pearson(fractional_ranks(xs), fractional_ranks(ys))


PAIRINGS = ("dm", "rdm", "um", "rum")


def correlate(per_interface: Sequence[InterfaceMetrics]) -> CorrelationReport:
    """Correlate DM, RDM, UM, RUM against IUC over interfaces with defined IUC."""
    entries = []
    for x in PAIRINGS:
        sample = [
            (getattr(m, x), m.iuc)
            for m in per_interface
            if m.iuc is not None and getattr(m, x) is not None
        ]
        xs = [a for a, _ in sample]
        ys = [b for _, b in sample]
        entries.append(Correlation(x, "iuc", len(sample), pearson(xs, ys), spearman(xs, ys)))
    return CorrelationReport(tuple(entries))
