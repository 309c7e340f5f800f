"""Explicit (K, eps)-actions for monoids whose unit group acts locally amenably.

``build_witness`` runs the finite construction end to end:

1. pick delta with (1 - delta)^3 > 1 - eps;
2. split K into units K_G and non-units K_S, and form the non-unit products;
3. map the unit group G onto Gbar, its image in the product of the
   stabiliser quotients of the non-unit elements of K and K*K;
4. find a Følner set F in Gbar for the image of K_G;
5. take a finite (K_G, delta)-action of G on a set P;
6. Y = K_S together with the translates of the non-units of K and K*K by F;
7. size a block Z so that Z x F x P carries more than 1 - delta of the points;
8. X = Y + Z x F x P + {bottom} and tabulate the three-case action.

The checker in ``witness`` has the final word: a build whose witness does not
pass at eps raises ``WitnessRejected``.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import HypothesesNotMet, WitnessRejected, CapExceeded
from .groups import DEFAULT_SEARCH_BUDGET, find_folner, joint_quotient_image, sofic_group_action
from .monoids import AMENABLE, FINITE, NONAMENABLE, UNKNOWN, cancellativity_check
from .structured import Bicyclic
from .witness import (DEFAULT_GROUND_CAP, ActionWitness, check_witness, fmt, passes,
                      witness_from_action)

# criteria reported by check_hypotheses; "locally-amenable" is the one build_witness needs
CONDITIONS = ("locally-amenable", "amenable-units", "finite-nonunits", "finite-r-classes",
              "cancellative-amenable-units", "finite-l-classes",
              "finite-or-abelian-schutzenberger", "amenable-schutzenberger", "regular")


# -- delta ---------------------------------------------------------------------

def _icbrt(n):
    """Floor of the real cube root of a non-negative integer."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x ** 3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def simplest_between(lo, hi):
    """The fraction with the smallest denominator in [lo, hi], 0 <= lo <= hi."""
    fl = lo.numerator // lo.denominator
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    return fl + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl))


def choose_delta(eps):
    """A small-denominator delta <= (1 - cbrt(1 - eps)) / 2, so (1 - delta)^3 > 1 - eps."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    target = 1 - eps
    S = 10 ** (len(str(eps.denominator)) + 12)
    k = _icbrt(target.numerator * S ** 3 // target.denominator)
    while Fraction(k, S) ** 3 < target:
        k += 1
    half_gap = (1 - Fraction(k, S)) / 2        # never above the exact half gap
    delta = simplest_between(half_gap * Fraction(9, 10), half_gap)
    while not (1 - delta) ** 3 > target:
        delta /= 2
    return delta


# -- hypotheses -------------------------------------------------------------------

@dataclass
class HypothesisReport:
    units_equal_j_class: bool
    units_source: str                 # "computed" or "declared"
    unit_group_sofic_capable: bool
    local_amenability: list           # [{"orbit": label, "status": ...}]
    orbit_declaration: str
    matched_conditions: list
    failing_clause: str = ""
    detail: str = ""

    @property
    def all_orbits_amenable(self):
        return (self.orbit_declaration == "all"
                and all(o["status"] in (FINITE, AMENABLE) for o in self.local_amenability))

    def to_dict(self):
        return {
            "units_equal_j_class": self.units_equal_j_class,
            "units_source": self.units_source,
            "unit_group_sofic_capable": self.unit_group_sofic_capable,
            "orbit_declaration": self.orbit_declaration,
            "local_amenability": self.local_amenability,
            "matched_conditions": self.matched_conditions,
            "failing_clause": self.failing_clause,
        }


def _sofic_capable(G):
    if G.is_finite or G.amenable is True:
        return True
    return G.kind == "residually-finite" and bool(getattr(G, "quotient_homs", None))


def _relevant_nonunits(M, K):
    K = list({M.encode(k): k for k in K}.values())
    out = {}
    for x in K + [M.multiply(a, b) for a in K for b in K]:
        if not M.is_unit(x):
            out.setdefault(M.encode(x), x)
    return list(out.values())


def _finite_conditions(M):
    from .green import circle_action, eggbox_summary, green_relations
    g = green_relations(M)
    summary = eggbox_summary(M, g)
    non_unit = [rec for rec in summary if not rec["contains_identity"]]
    canc = cancellativity_check(M)
    # every orbit, every quotient and every Schützenberger group is finite here
    for rec in non_unit:
        circle_action(M, rec["d_class"], g)
    extra = ["amenable-units", "finite-nonunits", "finite-r-classes"]
    if canc["left"] or canc["right"]:
        extra.append("cancellative-amenable-units")
    extra += ["finite-l-classes", "finite-or-abelian-schutzenberger", "amenable-schutzenberger"]
    if all(rec["regular"] for rec in summary):
        extra.append("regular")
    return extra


def check_hypotheses(M, K=None):
    """Which of the soficity criteria apply to M.

    Finite monoids are analysed completely.  Structured monoids report their
    declared facts and the provider status of the orbit quotients of the
    non-units in K and K*K; a declaration is never upgraded to a verification.
    """
    G = M.unit_group
    sofic = _sofic_capable(G)
    if M.is_finite:
        ue = M.units_equal_j_class
        source = "computed"
        reps = {}
        for s in M.elements():
            if not M.is_unit(s):
                reps.setdefault(min(M.orbit(s)), s)
        orbits = [{"orbit": M.label(s), "status": M.stabiliser_quotient(s).status}
                  for s in reps.values()]
        declaration = "all"
    else:
        ue = M.declared["units_equal_j_class"]
        source = "declared"
        declaration = M.declared.get("orbit_amenability", "unknown")
        orbits = []
        for s in _relevant_nonunits(M, K or []):
            q = M.stabiliser_quotient(s)
            orbits.append({"orbit": M.label(s), "status": q.status,
                           "quotient": q.quotient.describe()})
    report = HypothesisReport(ue, source, sofic, orbits, declaration, [])
    if not ue:
        report.failing_clause = "J-class of the identity is not the group of units"
    elif not sofic:
        report.failing_clause = "unit group has no sofic approximation provider"
    else:
        bad = [o for o in orbits if o["status"] == NONAMENABLE]
        unknown = [o for o in orbits if o["status"] == UNKNOWN]
        if bad or declaration == "none":
            report.failing_clause = "orbit quotient declared non-amenable"
            if bad:
                report.detail = f"orbit of {bad[0]['orbit']}: quotient {bad[0].get('quotient', '')}".strip()
            else:
                report.detail = "declared for every non-unit orbit"
        elif unknown or declaration != "all":
            report.failing_clause = "orbit quotient amenability unknown"
    matched = []
    if ue and sofic and report.all_orbits_amenable:
        matched.append("locally-amenable")
    if ue and sofic:
        if M.is_finite:
            matched += _finite_conditions(M)
        else:
            d = M.declared
            if G.amenable is True:
                matched.append("amenable-units")
            if d.get("nonunits_finite"):
                matched.append("finite-nonunits")
            if d.get("finite_r_classes"):
                matched.append("finite-r-classes")
            if (d.get("left_cancellative") or d.get("right_cancellative")) and G.amenable is True:
                matched.append("cancellative-amenable-units")
    report.matched_conditions = [c for c in CONDITIONS if c in matched]
    return report


# -- the construction ------------------------------------------------------------

@dataclass
class ProvenanceLog:
    epsilon: Fraction
    delta: Fraction
    K_in_G: list
    K_in_S: list
    K2_in_S: list
    Gbar: str
    Gbar_order: object
    F_size: int
    F_quality: Fraction
    P_size: int
    P_kind: str
    P_certificate: dict
    Y_size: int
    Z_size: int
    N: int
    good_fraction: Fraction
    block_fraction: Fraction
    folner_strategy: str
    report: dict = field(default_factory=dict)

    def to_dict(self):
        cert = {k: (fmt(v) if isinstance(v, Fraction) else v) for k, v in self.P_certificate.items()}
        return {
            "epsilon": fmt(self.epsilon),
            "delta": fmt(self.delta),
            "K_in_G": self.K_in_G,
            "K_in_S": self.K_in_S,
            "K2_in_S": self.K2_in_S,
            "Gbar": self.Gbar,
            "Gbar_order": self.Gbar_order,
            "F_size": self.F_size,
            "F_quality": fmt(self.F_quality),
            "P_size": self.P_size,
            "P_kind": self.P_kind,
            "P_certificate": cert,
            "Y_size": self.Y_size,
            "Z_size": self.Z_size,
            "N": self.N,
            "good_fraction": fmt(self.good_fraction),
            "block_fraction": fmt(self.block_fraction),
            "folner_strategy": self.folner_strategy,
            "report": self.report,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n"


def smallest_block_count(y_size, block, delta):
    """Least |Z| >= 1 with |Z| * block / (y_size + |Z| * block + 1) > 1 - delta."""
    bound = (1 - delta) * (y_size + 1) / (delta * block)
    return max(1, bound.numerator // bound.denominator + 1)


def build_witness(M, K, eps, budget=DEFAULT_SEARCH_BUDGET, cap=DEFAULT_GROUND_CAP, workers=1):
    """Build a (K, eps)-action of M; returns (ActionWitness, ProvenanceLog)."""
    eps = Fraction(eps)
    K = list({M.encode(k): k for k in K}.values())
    hyp = check_hypotheses(M, K)
    if "locally-amenable" not in hyp.matched_conditions:
        raise HypothesesNotMet(hyp.failing_clause or "hypotheses not met", hyp.detail)

    delta = choose_delta(eps)
    G = M.unit_group
    KG = [k for k in K if M.is_unit(k)]
    KS = [k for k in K if not M.is_unit(k)]
    K2 = list({M.encode(x): x for x in (M.multiply(a, b) for a in K for b in K)}.values())
    K2S = [x for x in K2 if not M.is_unit(x)]

    # Gbar and the translation action * of Gbar on the relevant orbits
    reps = list({M.encode(x): x for x in KS + K2S}.values())
    rep_index = {M.encode(x): i for i, x in enumerate(reps)}
    quotients = [M.stabiliser_quotient(x) for x in reps]
    Gbar, bar = joint_quotient_image(G, quotients)

    def star(s, f):
        i = rep_index[M.encode(s)]
        return quotients[i].translate(s, f[i])

    gKG = [M.to_group(k) for k in KG]
    Kbar = list(dict.fromkeys(bar(g) for g in gKG))
    if Kbar:
        F = find_folner(Gbar, Kbar, delta, budget)
    else:
        from .groups import FolnerSet
        F = FolnerSet(Gbar, [Gbar.identity], Fraction(1), [])
    Fel = list(F.elements)
    fpos = {f: i for i, f in enumerate(Fel)}
    F_quality = F.quality_for(Kbar)

    P = sofic_group_action(G, gKG, delta, budget)

    Y = {}
    for s in KS:
        Y.setdefault(M.encode(s), s)
    for s in KS + K2S:
        for f in Fel:
            y = star(s, f)
            Y.setdefault(M.encode(y), y)
    Yel = list(Y.values())
    ypos = {e: i for i, e in enumerate(Y)}

    nY, nF, nP = len(Yel), len(Fel), P.size
    block = nF * nP
    nZ = smallest_block_count(nY, block, delta)
    N = nY + nZ * block + 1
    if N > cap:
        raise CapExceeded("ground set", N, cap)
    bot = N - 1

    acting = {M.encode(M.one): M.one}
    for x in K + K2:
        acting.setdefault(M.encode(x), x)
    encs = list(acting)
    elems = list(acting.values())
    offsets = nY + np.arange(nZ, dtype=np.int64)[:, None] * block

    tables = np.empty((len(elems), N), dtype=np.int64)
    for row, m in enumerate(elems):
        tab = tables[row]
        for i, n in enumerate(Yel):
            tab[i] = ypos.get(M.encode(M.multiply(m, n)), bot)
        local = np.full(block, bot, dtype=np.int64)
        inside = np.zeros(block, dtype=bool)
        if M.is_unit(m):
            g = M.to_group(m)
            mbar = bar(g)
            ptab = P.table(g)
            for fi, f in enumerate(Fel):
                j = fpos.get(Gbar.multiply(mbar, f))
                if j is not None:
                    local[fi * nP:(fi + 1) * nP] = j * nP + ptab
                    inside[fi * nP:(fi + 1) * nP] = True
        elif M.encode(m) in rep_index:
            for fi, f in enumerate(Fel):
                local[fi * nP:(fi + 1) * nP] = ypos[M.encode(star(m, f))]
        tab[nY:bot] = np.where(inside[None, :], offsets + local[None, :], local[None, :]).ravel()
        tab[bot] = bot

    pos = {e: i for i, e in enumerate(encs)}
    products = [(pos[M.encode(a)], pos[M.encode(b)], pos[M.encode(M.multiply(a, b))])
                for a in K for b in K]
    W = ActionWitness(N, encs, [M.label(m) for m in elems], tables, products)

    good_f = sum(1 for f in Fel if all(Gbar.multiply(k, f) in fpos for k in Kbar))
    good_fraction = Fraction(nZ * good_f * nP, N)
    block_fraction = Fraction(nZ * block, N)
    cert = P.certificate
    accounting = {
        "(1-delta)^3 > 1-eps": (1 - delta) ** 3 > 1 - eps,
        "F quality > 1-delta": F_quality > 1 - delta,
        "block fraction > 1-delta": block_fraction > 1 - delta,
        "good fraction > (1-delta)^2": good_fraction > (1 - delta) ** 2,
        "P is a (K_G, delta)-action": (cert["identity_moves"] == 0 and cert["mult_defect"] <= delta
                                       and cert["sep_overlap"] <= delta),
    }
    failed = [k for k, ok in accounting.items() if not ok]
    if failed:
        raise WitnessRejected(f"accounting invariant failed: {', '.join(failed)}")

    report = check_witness(M, K, W, workers=workers)
    if not passes(report, eps):
        raise WitnessRejected(
            f"built witness fails at eps={fmt(eps)}: mult {fmt(report.max_mult_defect)}, "
            f"sep {fmt(report.max_sep_overlap)}, identity {report.identity_violations}")

    log = ProvenanceLog(
        epsilon=eps, delta=delta,
        K_in_G=[M.label(k) for k in KG], K_in_S=[M.label(k) for k in KS],
        K2_in_S=[M.label(k) for k in K2S],
        Gbar=Gbar.describe(), Gbar_order=Gbar.order if Gbar.is_finite else None,
        F_size=nF, F_quality=F_quality,
        P_size=nP, P_kind=P.kind, P_certificate=dict(cert),
        Y_size=nY, Z_size=nZ, N=N,
        good_fraction=good_fraction, block_fraction=block_fraction,
        folner_strategy=Gbar.strategy if Kbar else "no unit in K: F is the identity",
        report={"max_mult_defect": fmt(report.max_mult_defect),
                "max_sep_overlap": fmt(report.max_sep_overlap),
                "identity_violations": report.identity_violations},
    )
    return W, log


# -- P/Q decomposition ---------------------------------------------------------------

@dataclass
class PQDecomposition:
    d_class: int
    orbit: list
    Z_set: list
    h_classes: list
    P_subgroup: list
    Q_subgroup: list
    kernel: list
    schutzenberger_order: int
    normal_chain: bool
    injective: bool

    @property
    def index_G_P(self):
        return self._G_order // len(self.P_subgroup)

    @property
    def index_P_Q(self):
        return len(self.P_subgroup) // len(self.Q_subgroup)

    @property
    def divides_power(self):
        return self.schutzenberger_order ** len(self.h_classes) % self.index_P_Q == 0


def _is_normal(M, sub, group):
    r = M.rows
    sub = set(sub)
    return all(r[r[M.unit_inverse(g)][p]][g] in sub for g in group for p in sub)


def compute_pq_decomposition(M, x):
    """Split the unit action on the orbit of x into H-class and within-H parts.

    P fixes every H-class of Z (the union of the H-classes meeting the orbit),
    Q fixes every element of Z.  P/Q maps into the product of the
    Schützenberger groups of those H-classes with kernel exactly Q.
    """
    from .green import green_relations, schutzenberger_group
    if M.is_unit(x):
        raise ValueError("the decomposition is defined for non-units")
    g = green_relations(M)
    r = M.rows
    G = list(M.units)
    orbit = M.orbit(x)
    hids = list(dict.fromkeys(g.h_class[y] for y in orbit))
    Z = [y for h in hids for y in g.members("h_class", h)]
    P = [u for u in G if all(g.h_class[r[z][u]] == g.h_class[z] for z in Z)]
    Q = [u for u in G if all(r[z][u] == z for z in Z)]
    groups = {h: schutzenberger_group(M, h, g) for h in hids}
    ident = {h: tuple(range(len(groups[h].h_class))) for h in hids}

    def image(p):
        out = []
        for h in hids:
            S = groups[h]
            pos = {y: i for i, y in enumerate(S.h_class)}
            perm = tuple(pos[r[y][p]] for y in S.h_class)
            if perm not in S.perms:
                raise AssertionError("unit translation outside the Schützenberger group")
            out.append(perm)
        return tuple(out)

    images = {p: image(p) for p in P}
    kernel = [p for p in P if all(images[p][i] == ident[h] for i, h in enumerate(hids))]
    # injectivity of P/Q -> product: images agree exactly on cosets of Q
    by_image = {}
    for p in P:
        by_image.setdefault(images[p], []).append(p)
    injective = len(by_image) * len(Q) == len(P) and kernel == Q
    orders = {groups[h].order for h in hids}
    normal = (set(Q) <= set(P) and _is_normal(M, P, G) and _is_normal(M, Q, G))
    out = PQDecomposition(
        d_class=g.d_class[x], orbit=orbit, Z_set=Z, h_classes=hids,
        P_subgroup=P, Q_subgroup=Q, kernel=kernel,
        schutzenberger_order=orders.pop() if len(orders) == 1 else max(orders),
        normal_chain=normal, injective=injective)
    out._G_order = len(G)
    return out


# -- bicyclic probe -------------------------------------------------------------------

def _truncation(N):
    def act(m):
        a, b = m
        x = np.arange(N, dtype=np.int64)
        return np.minimum(np.maximum(x - b, 0) + a, N - 1)
    return act


def _cyclic(N):
    def act(m):
        a, b = m
        return (np.arange(N, dtype=np.int64) + a - b) % N
    return act


PROBE_FAMILIES = {"truncation": _truncation, "cyclic": _cyclic}


def bicyclic_defect_probe(N, K, family="truncation", M=None, workers=1):
    """Measure a candidate finite action of the bicyclic monoid.

    ``truncation``: q moves x to min(x + 1, N - 1), p to max(x - 1, 0).
    ``cyclic``: q and p rotate Z/N in opposite directions.
    Diagnostic only; no pass/fail claim is attached.
    """
    M = M or Bicyclic()
    if family not in PROBE_FAMILIES:
        raise ValueError(f"unknown probe family {family!r}")
    W = witness_from_action(M, K, N, PROBE_FAMILIES[family](N))
    return check_witness(M, K, W, workers=workers)
