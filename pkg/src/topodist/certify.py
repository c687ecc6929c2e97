"""Certificates bounding the homotopy-type shift between two filtered complexes.

A certificate (phi, psi, eps, two contiguity chains) witnesses that the
sublevel filtrations of f on X and g on Y are homotopy equivalent up to an
eps shift: phi and psi raise values by at most eps at every vertex, the
chains certify psi.phi ~ id_X and phi.psi ~ id_Y, and the values swept by
those discrete homotopies stay within a controlled multiple of eps.

On lower-star filtrations, checking the shift inequalities at vertices is
enough: the value of a simplex is the max over its vertices, and max
commutes with a uniform shift, so every simplex-level inequality follows
from the vertex-level ones.

A passing certificate is an UPPER bound witness; failure of the search to
find one never means the distance is infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .bottleneck import bottleneck_distance
from .common import ParseError, SizeGuardExceeded, content_lines, fmt_value, parse_int, parse_value
from .complexes import (
    ContiguityChain,
    FilteredComplex,
    Simplex,
    SimplicialComplex,
    SimplicialMap,
    check_contiguity_chain,
    check_simplicial,
    compose,
    homotopy_sup_control,
    identity_map,
    maximal_simplices,
)
from .persistence import compute_diagrams

DEFAULT_CONTROL_FACTOR = 2.0
DEFAULT_MAX_CHAIN_LEN = 4
SEARCH_VERTEX_GUARD = 6
STABILITY_TOLERANCE = 1e-9

#: names of the checkable certificate conditions, in evaluation order
CONDITIONS = (
    "phi_not_simplicial",
    "psi_not_simplicial",
    "chain_x_invalid",
    "chain_y_invalid",
    "chain_x_endpoints",
    "chain_y_endpoints",
    "shift_phi",
    "shift_psi",
    "control_x",
    "control_y",
)


@dataclass(frozen=True)
class ShiftCertificate:
    """Witness that an eps shift makes the two filtered complexes homotopy
    equivalent in the certified sense; see check_certificate."""

    phi: SimplicialMap
    psi: SimplicialMap
    eps: float
    chain_x: ContiguityChain
    chain_y: ContiguityChain
    control_factor: float = DEFAULT_CONTROL_FACTOR

    def __post_init__(self) -> None:
        if math.isnan(self.eps) or math.isinf(self.eps) or self.eps < 0:
            raise ValueError("eps must be finite and non-negative")
        if not self.control_factor > 0 or math.isinf(self.control_factor):
            raise ValueError("control_factor must be positive and finite")
        if self.phi.source != self.psi.target or self.phi.target != self.psi.source:
            raise ValueError("phi and psi must be mutually inverse in shape")
        if self.chain_x.source != self.phi.source or self.chain_x.target != self.phi.source:
            raise ValueError("chain_x must consist of self-maps of phi's source")
        if self.chain_y.source != self.phi.target or self.chain_y.target != self.phi.target:
            raise ValueError("chain_y must consist of self-maps of phi's target")


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    condition: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_certificate(
    fx: FilteredComplex, fy: FilteredComplex, cert: ShiftCertificate
) -> CertificateCheck:
    """Validate every certificate condition; report the first violated one.

    Structural mismatches (maps not between these complexes) raise; semantic
    failures come back as a named condition so corrupted certificates can be
    rejected with a precise reason.
    """
    if cert.phi.source != fx.complex or cert.phi.target != fy.complex:
        raise ValueError("certificate endpoints do not match the filtered complexes")

    if not check_simplicial(cert.phi):
        return CertificateCheck(False, "phi_not_simplicial", "phi maps some simplex outside the target")
    if not check_simplicial(cert.psi):
        return CertificateCheck(False, "psi_not_simplicial", "psi maps some simplex outside the target")
    if not check_contiguity_chain(cert.chain_x):
        return CertificateCheck(False, "chain_x_invalid", "chain_x is not a contiguity chain")
    if not check_contiguity_chain(cert.chain_y):
        return CertificateCheck(False, "chain_y_invalid", "chain_y is not a contiguity chain")

    psi_phi = compose(cert.psi, cert.phi)
    if (
        cert.chain_x.maps[0].vertex_image != psi_phi.vertex_image
        or cert.chain_x.maps[-1].vertex_image != identity_map(fx.complex).vertex_image
    ):
        return CertificateCheck(
            False, "chain_x_endpoints", "chain_x must run from psi.phi to the identity"
        )
    phi_psi = compose(cert.phi, cert.psi)
    if (
        cert.chain_y.maps[0].vertex_image != phi_psi.vertex_image
        or cert.chain_y.maps[-1].vertex_image != identity_map(fy.complex).vertex_image
    ):
        return CertificateCheck(
            False, "chain_y_endpoints", "chain_y must run from phi.psi to the identity"
        )

    f = fx.vertex_values()
    g = fy.vertex_values()
    for v in range(len(f)):
        if g[cert.phi(v)] - f[v] > cert.eps:
            return CertificateCheck(
                False,
                "shift_phi",
                f"vertex {v}: g(phi(v)) = {g[cert.phi(v)]} exceeds f(v) + eps = {f[v]} + {cert.eps}",
            )
    for w in range(len(g)):
        if f[cert.psi(w)] - g[w] > cert.eps:
            return CertificateCheck(
                False,
                "shift_psi",
                f"vertex {w}: f(psi(w)) = {f[cert.psi(w)]} exceeds g(w) + eps = {g[w]} + {cert.eps}",
            )

    allowance = cert.control_factor * cert.eps
    for v, bound in enumerate(homotopy_sup_control(cert.chain_x, fx)):
        if bound - f[v] > allowance:
            return CertificateCheck(
                False,
                "control_x",
                f"vertex {v}: homotopy sweeps {bound} > f(v) + {cert.control_factor}*eps",
            )
    for w, bound in enumerate(homotopy_sup_control(cert.chain_y, fy)):
        if bound - g[w] > allowance:
            return CertificateCheck(
                False,
                "control_y",
                f"vertex {w}: homotopy sweeps {bound} > g(w) + {cert.control_factor}*eps",
            )
    return CertificateCheck(True)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def _facet_completion_order(complex: SimplicialComplex) -> tuple[list[int], list[list[Simplex]]]:
    """A vertex order that completes facets early, plus, per position, the
    facets whose vertices are all assigned exactly there."""
    order: list[int] = []
    seen: set[int] = set()
    facets = sorted(maximal_simplices(complex), key=lambda s: (-len(s), s))
    for facet in facets:
        for v in facet:
            if v not in seen:
                seen.add(v)
                order.append(v)
    for v in range(complex.vertex_count):
        if v not in seen:
            order.append(v)
    position = {v: i for i, v in enumerate(order)}
    complete_at: list[list[Simplex]] = [[] for _ in order]
    for facet in facets:
        complete_at[max(position[v] for v in facet)].append(facet)
    return order, complete_at


def enumerate_simplicial_maps(
    src: SimplicialComplex, dst: SimplicialComplex
) -> list[tuple[int, ...]]:
    """Vertex images of all simplicial maps src -> dst, sorted lexicographically."""
    if src.vertex_count == 0:
        return [()]
    if dst.vertex_count == 0:
        return []
    order, complete_at = _facet_completion_order(src)
    image = [0] * src.vertex_count
    found: list[tuple[int, ...]] = []

    def extend(i: int) -> None:
        if i == len(order):
            found.append(tuple(image))
            return
        v = order[i]
        for w in range(dst.vertex_count):
            image[v] = w
            if all(
                tuple(sorted({image[u] for u in facet})) in dst.simplices
                for facet in complete_at[i]
            ):
                extend(i + 1)

    extend(0)
    return sorted(found)


def _extension_vertices(complex: SimplicialComplex, s: frozenset[int]) -> tuple[int, ...]:
    return tuple(
        w
        for w in range(complex.vertex_count)
        if tuple(sorted(s | {w})) in complex.simplices
    )


def _contiguous_neighbors(
    complex: SimplicialComplex,
    m: tuple[int, ...],
    ext_cache: dict[frozenset[int], tuple[int, ...]],
    order: list[int],
    complete_at: list[list[Simplex]],
) -> list[tuple[int, ...]]:
    """All simplicial self-maps contiguous to m.

    Per-vertex candidates come from a necessary condition: for every facet F
    containing v, the image m'(v) must extend m(F) to a simplex.  The joint
    union condition is then checked exactly when each facet completes, which
    also makes every generated neighbor simplicial (subsets of simplices are
    simplices).
    """
    n = complex.vertex_count
    candidates: list[tuple[int, ...]] = [()] * n
    for v in range(n):
        cand: set[int] | None = None
        for facet in maximal_simplices(complex):
            if v not in facet:
                continue
            key = frozenset(m[u] for u in facet)
            ext = ext_cache.get(key)
            if ext is None:
                ext = _extension_vertices(complex, key)
                ext_cache[key] = ext
            cand = set(ext) if cand is None else cand & set(ext)
            if not cand:
                break
        candidates[v] = tuple(sorted(cand)) if cand is not None else tuple(range(n))

    image = [0] * n
    out: list[tuple[int, ...]] = []

    def extend(i: int) -> None:
        if i == len(order):
            out.append(tuple(image))
            return
        v = order[i]
        for w in candidates[v]:
            image[v] = w
            ok = True
            for facet in complete_at[i]:
                union = {m[u] for u in facet} | {image[u] for u in facet}
                if tuple(sorted(union)) not in complex.simplices:
                    ok = False
                    break
            if ok:
                extend(i + 1)

    extend(0)
    return out


def _chains_to_identity(
    complex: SimplicialComplex, max_steps: int
) -> dict[tuple[int, ...], tuple[int, ...] | None]:
    """BFS from the identity in the contiguity graph of simplicial self-maps.

    Returns predecessor links: for each reachable map, the neighbor one step
    closer to the identity (None for the identity itself).  Reversing the
    links yields a shortest contiguity chain ending at the identity.
    """
    ident = tuple(range(complex.vertex_count))
    prev: dict[tuple[int, ...], tuple[int, ...] | None] = {ident: None}
    frontier = [ident]
    ext_cache: dict[frozenset[int], tuple[int, ...]] = {}
    order, complete_at = _facet_completion_order(complex)
    for _ in range(max_steps):
        new: list[tuple[int, ...]] = []
        for m in sorted(frontier):
            for nb in _contiguous_neighbors(complex, m, ext_cache, order, complete_at):
                if nb not in prev:
                    prev[nb] = m
                    new.append(nb)
        if not new:
            break
        frontier = new
    return prev


def _chain_images(
    prev: dict[tuple[int, ...], tuple[int, ...] | None], start: tuple[int, ...]
) -> list[tuple[int, ...]]:
    chain = [start]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    return chain


def _sweep_excess(
    chain_imgs: list[tuple[int, ...]], fc: FilteredComplex
) -> list[float]:
    """Per vertex: (value swept by the chain through it) - (its own value)."""
    values = fc.filtration
    out: list[float] = []
    for v in range(fc.complex.vertex_count):
        imgs = [m[v] for m in chain_imgs]
        bound = max(values[(w,)] for w in imgs)
        for a, b in zip(imgs, imgs[1:]):
            if a != b:
                bound = max(bound, values[(min(a, b), max(a, b))])
        out.append(bound - values[(v,)])
    return out


def _min_eps(shift_diffs: list[float], control_excess: list[float], factor: float) -> float:
    """Least eps with every shift diff <= eps and every excess <= factor*eps,
    exactly as the checker will recompute them."""
    eps = 0.0
    for d in shift_diffs:
        if d > eps:
            eps = d
    for d in control_excess:
        if d <= factor * eps:
            continue
        e = d / factor
        while factor * e < d:  # guard against a downward-rounded quotient
            e = math.nextafter(e, math.inf)
        if e > eps:
            eps = e
    return eps


def search_certificate(
    fx: FilteredComplex,
    fy: FilteredComplex,
    max_chain_len: int = DEFAULT_MAX_CHAIN_LEN,
    control_factor: float = DEFAULT_CONTROL_FACTOR,
    vertex_guard: int = SEARCH_VERTEX_GUARD,
) -> tuple[float, ShiftCertificate | None]:
    """Enumerate map pairs and certify the best shift found.

    For every simplicial pair (phi, psi) whose round trips reach the identity
    in the contiguity graph within max_chain_len maps, the least certified
    eps is a closed-form max of shift and control violations.  Returns the
    minimum over all pairs and the witnessing certificate, choosing the
    lexicographically smallest (phi, psi) among minimizers; (inf, None) when
    no round trip reaches the identity within the chain budget.
    """
    if max_chain_len < 1:
        raise ValueError("max_chain_len must be at least 1")
    X, Y = fx.complex, fy.complex
    if X.vertex_count > vertex_guard or Y.vertex_count > vertex_guard:
        raise SizeGuardExceeded(
            f"certificate search limited to {vertex_guard} vertices per side"
        )
    f = fx.vertex_values()
    g = fy.vertex_values()
    maps_xy = enumerate_simplicial_maps(X, Y)
    maps_yx = enumerate_simplicial_maps(Y, X)
    if not maps_xy or not maps_yx:
        return math.inf, None
    reach_x = _chains_to_identity(X, max_chain_len - 1)
    reach_y = _chains_to_identity(Y, max_chain_len - 1)

    best: tuple[float, tuple[int, ...], tuple[int, ...]] | None = None
    for phi_img in maps_xy:
        phi_shifts = [g[phi_img[v]] - f[v] for v in range(len(f))]
        if best is not None and max([0.0, *phi_shifts]) > best[0]:
            continue
        for psi_img in maps_yx:
            hx = tuple(psi_img[w] for w in phi_img)
            if hx not in reach_x:
                continue
            hy = tuple(phi_img[v] for v in psi_img)
            if hy not in reach_y:
                continue
            shifts = phi_shifts + [f[psi_img[w]] - g[w] for w in range(len(g))]
            excess = _sweep_excess(_chain_images(reach_x, hx), fx)
            excess += _sweep_excess(_chain_images(reach_y, hy), fy)
            eps = _min_eps(shifts, excess, control_factor)
            key = (eps, phi_img, psi_img)
            if best is None or key < best:
                best = key
    if best is None:
        return math.inf, None

    eps, phi_img, psi_img = best
    phi = SimplicialMap(X, Y, phi_img)
    psi = SimplicialMap(Y, X, psi_img)
    chain_x = ContiguityChain(
        tuple(
            SimplicialMap(X, X, img)
            for img in _chain_images(reach_x, tuple(psi_img[w] for w in phi_img))
        )
    )
    chain_y = ContiguityChain(
        tuple(
            SimplicialMap(Y, Y, img)
            for img in _chain_images(reach_y, tuple(phi_img[v] for v in psi_img))
        )
    )
    cert = ShiftCertificate(phi, psi, eps, chain_x, chain_y, control_factor)
    return eps, cert


# ---------------------------------------------------------------------------
# Stability and the shift-direction probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityEntry:
    degree: int
    bottleneck: float
    slack: float
    ok: bool


@dataclass(frozen=True)
class StabilityReport:
    eps: float
    entries: tuple[StabilityEntry, ...]
    ok: bool


def verify_stability(
    fx: FilteredComplex,
    fy: FilteredComplex,
    cert: ShiftCertificate,
    max_degree: int = 2,
    tolerance: float = STABILITY_TOLERANCE,
) -> StabilityReport:
    """Check d_B <= certified eps in every degree up to max_degree.

    Refuses to run on a failing certificate.  A violation is reported in the
    result (it would falsify the stability theorem, i.e. reveal a bug), not
    raised.
    """
    result = check_certificate(fx, fy, cert)
    if not result.ok:
        raise ValueError(
            f"refusing to verify stability with a failing certificate ({result.condition})"
        )
    dx = compute_diagrams(fx, max_degree)
    dy = compute_diagrams(fy, max_degree)
    entries = []
    for k in range(max_degree + 1):
        db, _ = bottleneck_distance(dx[k], dy[k])
        entries.append(
            StabilityEntry(k, db, cert.eps - db, db <= cert.eps + tolerance)
        )
    return StabilityReport(cert.eps, tuple(entries), all(e.ok for e in entries))


@dataclass(frozen=True)
class ProbeReport:
    delta: float
    up_eps: float
    up: CertificateCheck
    down: CertificateCheck


def upshift_asymmetry_probe(
    fx: FilteredComplex, fy: FilteredComplex, cert: ShiftCertificate, delta: float
) -> ProbeReport:
    """Re-check the same maps after shifting g by +delta and by -delta.

    Raising g by delta must re-certify at eps + delta (one shift condition
    relaxes, the other tightens by exactly delta, control allowances only
    grow).  Lowering g by delta and keeping eps may or may not pass; the
    probe records the observation either way.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    result = check_certificate(fx, fy, cert)
    if not result.ok:
        raise ValueError(f"probe needs a valid certificate ({result.condition})")
    up = check_certificate(fx, fy.shifted(delta), replace(cert, eps=cert.eps + delta))
    down = check_certificate(fx, fy.shifted(-delta), cert)
    return ProbeReport(delta, cert.eps + delta, up, down)


# ---------------------------------------------------------------------------
# Certificate text format
# ---------------------------------------------------------------------------


def format_certificate(cert: ShiftCertificate) -> str:
    out = [f"eps {fmt_value(cert.eps)}", f"factor {fmt_value(cert.control_factor)}"]
    out.append("phi " + " ".join(str(w) for w in cert.phi.vertex_image))
    out.append("psi " + " ".join(str(v) for v in cert.psi.vertex_image))
    out.append(f"chainx {len(cert.chain_x)}")
    out.extend(" ".join(str(w) for w in m.vertex_image) for m in cert.chain_x.maps)
    out.append(f"chainy {len(cert.chain_y)}")
    out.extend(" ".join(str(w) for w in m.vertex_image) for m in cert.chain_y.maps)
    return "\n".join(out) + "\n"


def parse_certificate(
    text: str,
    X: SimplicialComplex,
    Y: SimplicialComplex,
    source: str = "<string>",
) -> ShiftCertificate:
    eps: float | None = None
    factor = DEFAULT_CONTROL_FACTOR
    phi_img: tuple[int, ...] | None = None
    psi_img: tuple[int, ...] | None = None
    chains: dict[str, list[tuple[int, ...]]] = {}
    pending: tuple[str, int] | None = None  # (chain name, maps still expected)

    for lineno, tokens in content_lines(text):
        if pending is not None:
            name, left = pending
            chains[name].append(
                tuple(parse_int(t, source, lineno) for t in tokens)
            )
            pending = (name, left - 1) if left > 1 else None
            continue
        key = tokens[0]
        if key == "eps" and len(tokens) == 2:
            eps = parse_value(tokens[1], source, lineno)
        elif key == "factor" and len(tokens) == 2:
            factor = parse_value(tokens[1], source, lineno)
        elif key == "phi":
            phi_img = tuple(parse_int(t, source, lineno) for t in tokens[1:])
        elif key == "psi":
            psi_img = tuple(parse_int(t, source, lineno) for t in tokens[1:])
        elif key in ("chainx", "chainy") and len(tokens) == 2:
            count = parse_int(tokens[1], source, lineno)
            if count < 1:
                raise ParseError(source, lineno, "a chain needs at least one map")
            chains[key] = []
            pending = (key, count)
        else:
            raise ParseError(source, lineno, f"unrecognized certificate line {key!r}")

    if pending is not None:
        raise ParseError(source, 1, f"truncated {pending[0]} section")
    missing = [
        name
        for name, val in (
            ("eps", eps),
            ("phi", phi_img),
            ("psi", psi_img),
            ("chainx", chains.get("chainx")),
            ("chainy", chains.get("chainy")),
        )
        if val is None
    ]
    if missing:
        raise ParseError(source, 1, f"missing certificate sections: {', '.join(missing)}")

    try:
        return ShiftCertificate(
            SimplicialMap(X, Y, phi_img),
            SimplicialMap(Y, X, psi_img),
            eps,
            ContiguityChain(tuple(SimplicialMap(X, X, img) for img in chains["chainx"])),
            ContiguityChain(tuple(SimplicialMap(Y, Y, img) for img in chains["chainy"])),
            factor,
        )
    except ValueError as exc:
        raise ParseError(source, 1, str(exc)) from None


def load_certificate(
    path: str | Path, X: SimplicialComplex, Y: SimplicialComplex
) -> ShiftCertificate:
    p = Path(path)
    return parse_certificate(p.read_text(encoding="utf-8"), X, Y, source=str(p))


def save_certificate(path: str | Path, cert: ShiftCertificate) -> None:
    Path(path).write_text(format_certificate(cert), encoding="utf-8")
