"""Vectorized evaluation and damped-Newton iteration over element batches.

A batch couples per-element problem data (start/goal rays and radius, each
component a scalar or an (N,) array) with per-element offsets, so the same
machinery serves three workloads: many seeds on one problem (multistart),
one seed on many problems (parameter sweeps), and grid refinement.  Singular
evaluations yield NaN and the owning element is dropped rather than patched.

The formulas duplicate the scalar reference in `residual`; the test suite
pins the two implementations against each other, and every root accepted
downstream is re-verified through the scalar path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .residual import EPS_SING, SolutionType

# Step control: halve the Newton step until the residual norm decreases, at
# most this many times, then give up on the element.
MAX_HALVINGS = 20
# Elements whose residual norm has not improved by 1% over this many
# iterations are abandoned as non-converging (they hug singular ridges).
PLATEAU_WINDOW = 3
PLATEAU_FACTOR = 0.99

Components = tuple[np.ndarray, np.ndarray, np.ndarray]


def _as_components(v, n: int) -> Components:
    arrs = tuple(np.broadcast_to(np.asarray(c, float), (n,)) for c in v)
    return arrs  # type: ignore[return-value]


@dataclass
class RayBatch:
    """Per-element problem data as component arrays of a common length."""

    xi: Components
    vi: Components
    xf: Components
    vf: Components
    r: np.ndarray

    @classmethod
    def build(cls, xi, vi, xf, vf, r, n: int) -> "RayBatch":
        return cls(
            _as_components(xi, n),
            _as_components(vi, n),
            _as_components(xf, n),
            _as_components(vf, n),
            np.broadcast_to(np.asarray(r, float), (n,)),
        )

    def take(self, sel: np.ndarray) -> "RayBatch":
        pick = lambda v: tuple(c[sel] for c in v)
        return RayBatch(pick(self.xi), pick(self.vi), pick(self.xf), pick(self.vf), self.r[sel])

    def __len__(self) -> int:
        return self.r.shape[0]


def eval_residuals(batch: RayBatch, stype: SolutionType, hi: np.ndarray, hf: np.ndarray, jac: bool = False):
    """Residual pair (and optionally Jacobian entries) for every element.

    Returns (p_i, p_f, J) with NaN where the geometry is singular; J is None
    unless requested, else the tuple (dpi_dhi, dpi_dhf, dpf_dhi, dpf_dhf).
    """
    xi, vi, xf, vf, r = batch.xi, batch.vi, batch.xf, batch.vf, batch.r
    hix = xi[0] + hi * vi[0]
    hiy = xi[1] + hi * vi[1]
    hiz = xi[2] + hi * vi[2]
    hfx = xf[0] + hf * vf[0]
    hfy = xf[1] + hf * vf[1]
    hfz = xf[2] + hf * vf[2]
    wx = hfx - hix
    wy = hfy - hiy
    wz = hfz - hiz
    d = np.sqrt(wx * wx + wy * wy + wz * wz)
    bad = d <= EPS_SING
    d = np.where(bad, 1.0, d)
    sgn = -1.0 if stype.switched else 1.0
    gx = sgn * wx / d
    gy = sgn * wy / d
    gz = sgn * wz / d

    ends = []
    for v, h, sign in ((vi, hi, stype.start_sign), (vf, hf, stype.end_sign)):
        cxx = v[1] * gz - v[2] * gy
        cxy = v[2] * gx - v[0] * gz
        cxz = v[0] * gy - v[1] * gx
        n = np.sqrt(cxx * cxx + cxy * cxy + cxz * cxz)
        bad = bad | (n <= EPS_SING)
        n = np.where(n <= EPS_SING, 1.0, n)
        gv = gx * v[0] + gy * v[1] + gz * v[2]
        p = h + sign * (r / n) * (1.0 - gv)
        ends.append((p, n, gv, (cxx, cxy, cxz)))

    p_i = np.where(bad, np.nan, ends[0][0])
    p_f = np.where(bad, np.nan, ends[1][0])
    if not jac:
        return p_i, p_f, None

    # direction derivatives a_i, a_f, reversed for switched types
    hvi = (gx * vi[0] + gy * vi[1] + gz * vi[2]) * sgn  # hdir . v_i
    hvf = (gx * vf[0] + gy * vf[1] + gz * vf[2]) * sgn
    hx, hy, hz = sgn * gx, sgn * gy, sgn * gz
    bix = sgn * (hx * hvi - vi[0]) / d
    biy = sgn * (hy * hvi - vi[1]) / d
    biz = sgn * (hz * hvi - vi[2]) / d
    bfx = sgn * (vf[0] - hx * hvf) / d
    bfy = sgn * (vf[1] - hy * hvf) / d
    bfz = sgn * (vf[2] - hz * hvf) / d

    entries = []
    for (v, sign), (_, n, gv, (cxx, cxy, cxz)) in zip(((vi, stype.start_sign), (vf, stype.end_sign)), ends):
        for bx, by, bz in ((bix, biy, biz), (bfx, bfy, bfz)):
            exx = v[1] * bz - v[2] * by
            exy = v[2] * bx - v[0] * bz
            exz = v[0] * by - v[1] * bx
            dot_cb = cxx * exx + cxy * exy + cxz * exz
            bv = bx * v[0] + by * v[1] + bz * v[2]
            entries.append(sign * r * (-bv / n - (1.0 - gv) * dot_cb / (n * n * n)))
    J = (
        np.where(bad, np.nan, entries[0] + 1.0),
        np.where(bad, np.nan, entries[1]),
        np.where(bad, np.nan, entries[2]),
        np.where(bad, np.nan, entries[3] + 1.0),
    )
    return p_i, p_f, J


def eval_ahead(batch: RayBatch, stype: SolutionType, hi: np.ndarray, hf: np.ndarray) -> np.ndarray:
    """Signed separation (c_f - c_i) . hdir used by directional validity.

    NaN where the geometry is singular.
    """
    xi, vi, xf, vf, r = batch.xi, batch.vi, batch.xf, batch.vf, batch.r
    hpt_i = tuple(xi[k] + hi * vi[k] for k in range(3))
    hpt_f = tuple(xf[k] + hf * vf[k] for k in range(3))
    w = tuple(hpt_f[k] - hpt_i[k] for k in range(3))
    d = np.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    bad = d <= EPS_SING
    d = np.where(bad, 1.0, d)
    h = tuple(w[k] / d for k in range(3))
    sgn = -1.0 if stype.switched else 1.0
    g = tuple(sgn * h[k] for k in range(3))
    centers = []
    for v, off, sign in ((vi, hpt_i, stype.start_sign), (vf, hpt_f, stype.end_sign)):
        cxx = v[1] * g[2] - v[2] * g[1]
        cxy = v[2] * g[0] - v[0] * g[2]
        cxz = v[0] * g[1] - v[1] * g[0]
        n = np.sqrt(cxx * cxx + cxy * cxy + cxz * cxz)
        bad = bad | (n <= EPS_SING)
        n = np.where(n <= EPS_SING, 1.0, n)
        scale = sign * r / n
        centers.append(tuple(off[k] + scale * (v[k] - g[k]) for k in range(3)))
    c_i, c_f = centers
    ahead = sum((c_f[k] - c_i[k]) * h[k] for k in range(3))
    return np.where(bad, np.nan, ahead)


def eval_fd_jacobian(batch: RayBatch, stype: SolutionType, hi: np.ndarray, hf: np.ndarray, step: float = 1e-6):
    """Central finite-difference Jacobian (the gradient-free solver mode)."""
    pi_a, pf_a, _ = eval_residuals(batch, stype, hi + step, hf)
    pi_b, pf_b, _ = eval_residuals(batch, stype, hi - step, hf)
    pi_c, pf_c, _ = eval_residuals(batch, stype, hi, hf + step)
    pi_d, pf_d, _ = eval_residuals(batch, stype, hi, hf - step)
    inv = 0.5 / step
    return ((pi_a - pi_b) * inv, (pi_c - pi_d) * inv, (pf_a - pf_b) * inv, (pf_c - pf_d) * inv)


@dataclass
class NewtonResult:
    h_i: np.ndarray
    h_f: np.ndarray
    p_i: np.ndarray
    p_f: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def newton(
    batch: RayBatch,
    stype: SolutionType,
    hi0: np.ndarray,
    hf0: np.ndarray,
    tol: float,
    max_iters: int = 100,
    use_gradient: bool = True,
    h_limit: float = np.inf,
) -> NewtonResult:
    """Damped Newton iteration on every element of the batch.

    An element converges when max(|p_i|, |p_f|) <= tol.  Elements are dropped
    when the geometry turns singular with no acceptable backtracked step,
    when the Jacobian degenerates, when progress plateaus, or when the
    iterate runs past h_limit.
    """
    n_total = len(hi0)
    hi = np.asarray(hi0, float).copy()
    hf = np.asarray(hf0, float).copy()
    out = NewtonResult(
        h_i=hi.copy(),
        h_f=hf.copy(),
        p_i=np.full(n_total, np.nan),
        p_f=np.full(n_total, np.nan),
        converged=np.zeros(n_total, bool),
        iterations=np.zeros(n_total, np.int64),
    )
    idx = np.arange(n_total)
    cur = batch
    chi, chf = hi, hf
    cpi, cpf, _ = eval_residuals(cur, stype, chi, chf)
    cfn = np.hypot(cpi, cpf)
    alive = np.isfinite(cfn)
    hist: list[np.ndarray] = [cfn]

    def shrink(sel: np.ndarray) -> None:
        nonlocal idx, cur, chi, chf, cpi, cpf, cfn, hist
        idx = idx[sel]
        cur = cur.take(sel)
        chi = chi[sel]
        chf = chf[sel]
        cpi = cpi[sel]
        cpf = cpf[sel]
        cfn = cfn[sel]
        hist = [h[sel] for h in hist]

    shrink(alive)
    for k in range(max_iters + 1):
        if idx.size == 0:
            break
        done = np.fmax(np.abs(cpi), np.abs(cpf)) <= tol
        if done.any():
            sel = idx[done]
            out.converged[sel] = True
            out.h_i[sel] = chi[done]
            out.h_f[sel] = chf[done]
            out.p_i[sel] = cpi[done]
            out.p_f[sel] = cpf[done]
            out.iterations[sel] = k
            shrink(~done)
            if idx.size == 0:
                break
        if k == max_iters:
            break
        if use_gradient:
            _, _, J = eval_residuals(cur, stype, chi, chf, jac=True)
        else:
            J = eval_fd_jacobian(cur, stype, chi, chf)
        jii, jif, jfi, jff = J
        det = jii * jff - jif * jfi
        ok = np.isfinite(det) & (np.abs(det) > 1e-14)
        if not ok.all():
            jii, jif, jfi, jff, det = (a[ok] for a in (jii, jif, jfi, jff, det))
            shrink(ok)
            if idx.size == 0:
                break
        dhi = (-cpi * jff + cpf * jif) / det
        dhf = (-cpf * jii + cpi * jfi) / det

        lam = np.ones(idx.size)
        accepted = np.zeros(idx.size, bool)
        nhi, nhf = chi.copy(), chf.copy()
        npi, npf, nfn = cpi.copy(), cpf.copy(), cfn.copy()
        pend = np.arange(idx.size)
        for _ in range(MAX_HALVINGS):
            if pend.size == 0:
                break
            thi = chi[pend] + lam[pend] * dhi[pend]
            thf = chf[pend] + lam[pend] * dhf[pend]
            tpi, tpf, _ = eval_residuals(cur.take(pend), stype, thi, thf)
            tfn = np.hypot(tpi, tpf)
            good = np.isfinite(tfn) & (tfn < cfn[pend])
            sel = pend[good]
            nhi[sel] = thi[good]
            nhf[sel] = thf[good]
            npi[sel] = tpi[good]
            npf[sel] = tpf[good]
            nfn[sel] = tfn[good]
            accepted[sel] = True
            pend = pend[~good]
            lam[pend] *= 0.5
        keep = accepted
        if len(hist) >= PLATEAU_WINDOW:
            # never plateau-kill an element that just crossed the tolerance
            near = np.fmax(np.abs(npi), np.abs(npf)) <= tol
            keep = keep & ((nfn <= PLATEAU_FACTOR * hist[-PLATEAU_WINDOW]) | near)
        keep = keep & (np.abs(nhi) <= h_limit) & (np.abs(nhf) <= h_limit)
        chi, chf, cpi, cpf, cfn = nhi, nhf, npi, npf, nfn
        hist = (hist + [cfn])[-PLATEAU_WINDOW:]
        shrink(keep)
    return out
