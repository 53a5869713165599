"""Brute-force reference implementation used to cross-check the analyzer.

Everything here is recomputed from the raw declaration lists with fixpoint
loops and nested scans, sharing no indexes or helpers with the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath


@dataclass
class Raw:
    """Plain-data view of a model: names are qualified strings."""

    iface_extends: dict[str, set[str]]
    iface_methods: dict[str, list[tuple]]  # (signature key, decl object)
    class_extends: dict[str, str | None]
    class_implements: dict[str, set[str]]
    class_methods: dict[str, list[tuple]]  # (signature key, loc, public, abstract, decl)
    calls: list[tuple[str, str, str, int]]  # caller, receiver, name, argc
    exempt: set[str]
    system_loc: int


def sig_key(sig) -> tuple:
    return (sig.return_type, sig.name, tuple(sig.param_types))


def raw_of(model) -> Raw:
    return Raw(
        iface_extends={
            q: {e.qualified for e in d.extends if e.qualified in model.interfaces}
            for q, d in model.interfaces.items()
        },
        iface_methods={
            q: [(sig_key(m.signature), m) for m in d.methods] for q, d in model.interfaces.items()
        },
        class_extends={
            q: (d.extends.qualified if d.extends is not None and d.extends.qualified in model.classes else None)
            for q, d in model.classes.items()
        },
        class_implements={
            q: {e.qualified for e in d.implements if e.qualified in model.interfaces}
            for q, d in model.classes.items()
        },
        class_methods={
            q: [(sig_key(m.signature), m.loc, m.is_public, m.is_abstract, m) for m in d.methods]
            for q, d in model.classes.items()
        },
        calls=[
            (c.caller.qualified, c.receiver_type.qualified, c.method_name, c.arg_count)
            for c in model.calls
        ],
        exempt=set(model.unused_exempt),
        system_loc=model.system_loc,
    )


class Oracle:
    def __init__(self, raw: Raw) -> None:
        self.raw = raw
        # super-interface closure by fixpoint iteration
        sup = {q: set(v) for q, v in raw.iface_extends.items()}
        changed = True
        while changed:
            changed = False
            for q in sup:
                extra = set()
                for s in sup[q]:
                    extra |= sup[s]
                if not extra <= sup[q]:
                    sup[q] |= extra
                    changed = True
        self.sup = sup
        self.sub = {q: {j for j in sup if q in sup[j]} for q in sup}
        impl = {}
        for q in raw.iface_methods:
            targets = {q} | self.sub[q]
            members = {c for c, imp in raw.class_implements.items() if imp & targets}
            grown = True
            while grown:
                grown = False
                for c, parent in raw.class_extends.items():
                    if parent in members and c not in members:
                        members.add(c)
                        grown = True
            impl[q] = members
        self.impl = impl

    def reaches(self, call, q, key) -> bool:
        _, recv, name, argc = call
        return (
            name == key[1]
            and argc == len(key[2])
            and recv in ({q} | self.sub[q] | self.impl[q])
        )

    def clients(self, q) -> set[str]:
        out = set()
        for call in self.raw.calls:
            if call[0] in self.impl[q]:
                continue
            for key, _ in self.raw.iface_methods[q]:
                if self.reaches(call, q, key):
                    out.add(call[0])
        return out

    def unused(self) -> tuple[dict, dict]:
        um, num = {}, {}
        for q, methods in self.raw.iface_methods.items():
            if q in self.raw.exempt:
                continue
            um[q], num[q] = set(), set()
            for key, decl in methods:
                by_client = by_anyone = False
                for call in self.raw.calls:
                    if self.reaches(call, q, key):
                        by_anyone = True
                        if call[0] not in self.impl[q]:
                            by_client = True
                if not by_client:
                    um[q].add(decl)
                if not by_anyone:
                    num[q].add(decl)
        return um, num

    def clone_groups(self) -> dict[tuple, set]:
        """Signature key -> set of (interface, decl), for keys declared in 2+ interfaces."""
        flat = [(q, key, d) for q, ms in self.raw.iface_methods.items() for key, d in ms]
        groups: dict[tuple, set] = {}
        for a in range(len(flat)):
            for b in range(len(flat)):
                if flat[a][0] != flat[b][0] and flat[a][1] == flat[b][1]:
                    groups.setdefault(flat[a][1], set()).add((flat[a][0], flat[a][2]))
        return groups

    def duplicate_pairs(self) -> set[tuple[str, str]]:
        out = set()
        for a, ma in self.raw.iface_methods.items():
            if not ma:
                continue
            for b, mb in self.raw.iface_methods.items():
                if a != b and {k for k, _ in ma} <= {k for k, _ in mb}:
                    out.add((a, b))
        return out

    def iuc(self, q) -> Fraction | None:
        size = len(self.raw.iface_methods[q])
        cs = self.clients(q)
        if not cs or size == 0:
            return None
        total = Fraction(0)
        for c in cs:
            used = 0
            for key, _ in self.raw.iface_methods[q]:
                if any(call[0] == c and self.reaches(call, q, key) for call in self.raw.calls):
                    used += 1
            total += Fraction(used, size)
        return total / len(cs)

    def overridden_by(self, owner, key, public, abstract) -> set:
        if not public or abstract:
            return set()
        out = set()
        for q, ms in self.raw.iface_methods.items():
            if owner in self.impl[q]:
                for k, d in ms:
                    if k == key:
                        out.add(d)
        return out

    def system(self) -> dict:
        total = sum(len(ms) for ms in self.raw.iface_methods.values())
        groups = self.clone_groups()
        sdm = sum(len(g) for g in groups.values())
        um, num = self.unused()
        s_um = sum(len(v) for v in um.values())
        s_num = sum(len(v) for v in num.values())
        never = set().union(*num.values()) if num else set()
        duplicated = {d for g in groups.values() for _, d in g}
        nulc = shared = with_dup = 0
        for owner, ms in self.raw.class_methods.items():
            for key, loc, public, abstract, _ in ms:
                over = self.overridden_by(owner, key, public, abstract)
                if over and over <= never:
                    nulc += loc
                dup_owners = {d.owner.qualified for d in over if d in duplicated}
                if dup_owners:
                    with_dup += 1
                    if len(dup_owners) >= 2:
                        shared += 1

        def ratio(a, b):
            return Fraction(a, b) if b else Fraction(0)

        return {
            "total_interface_methods": total,
            "sdm": sdm,
            "sum": s_um,
            "snum": s_num,
            "rsdm": ratio(sdm, total),
            "rsum": ratio(s_um, total),
            "rsnum": ratio(s_num, total),
            "distinct_dup_signatures": len(groups),
            "reim": sdm - len(groups),
            "rreim": ratio(sdm - len(groups), total),
            "nulc": nulc,
            "rnulc": ratio(nulc, self.raw.system_loc),
            "shared_impl_count": shared,
            "shared_impl_ratio": ratio(shared, with_dup),
        }


# -- correlation ------------------------------------------------------------------

mpmath.mp.dps = 60


def pearson_mp(xs, ys):
    n = len(xs)
    if n < 2:
        return None
    X = [mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator for x in xs]
    Y = [mpmath.mpf(Fraction(y).numerator) / Fraction(y).denominator for y in ys]
    mx, my = mpmath.fsum(X) / n, mpmath.fsum(Y) / n
    sxx = mpmath.fsum((x - mx) ** 2 for x in X)
    syy = mpmath.fsum((y - my) ** 2 for y in Y)
    if sxx == 0 or syy == 0:
        return None
    sxy = mpmath.fsum((x - mx) * (y - my) for x, y in zip(X, Y))
    return sxy / mpmath.sqrt(sxx * syy)


def ranks_brute(values):
    """Mean 1-based rank: (number smaller) + (number equal + 1) / 2."""
    out = []
    for v in values:
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(Fraction(2 * less + equal + 1, 2))
    return out


def spearman_mp(xs, ys):
    return pearson_mp(ranks_brute(xs), ranks_brute(ys))
