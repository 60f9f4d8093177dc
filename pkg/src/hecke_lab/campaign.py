"""Verification campaigns: the full assertion sweep in one runner.

A campaign lists algebraic grid cells (p, n, optionally one character) and
fixture directories for the operator suites.  Every cell contributes its
assertions to a single report; failures accumulate and never short-circuit
the run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cache import DiskCache
from .characters import PChar
from .hecke import structure_table, verify_relations
from .induced import verify_induced
from .newspace import characterize, placement_checks, qualifying_primes
from .operators import op_U, op_W, w_square_scalar
from .report import Report, check, check_bool, timed
from .spaces import fixture_dir, load_families

DEFAULT_TOLERANCE = {
    "quad": 1e-6,
    "placement": 1e-6,
    "dual_route": 1e-8,
    "w_square": 1e-8,
    "eig_dist": 1e-6,
    "gap_min": 1e3,
}


@dataclass
class Campaign:
    grid: list[dict] = field(default_factory=list)
    fixture_dirs: list[str] = field(default_factory=list)
    tolerance: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCE))
    seed: int = 0

    @classmethod
    def default(cls, seed: int = 0) -> "Campaign":
        grid = [{"p": p, "n": n} for p in (2, 3, 5) for n in (1, 2, 3)]
        return cls(grid=grid, fixture_dirs=[str(fixture_dir())], seed=seed)

    @classmethod
    def from_file(cls, path) -> "Campaign":
        doc = json.loads(Path(path).read_text())
        if not isinstance(doc, dict):
            raise ValueError("campaign file must hold a JSON object")
        tol = dict(DEFAULT_TOLERANCE)
        tol.update(doc.get("tolerance", {}))
        return cls(
            grid=list(doc.get("grid", [])),
            fixture_dirs=list(doc.get("fixture_dirs", [])),
            tolerance=tol,
            seed=int(doc.get("seed", 0)),
        )

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "fixture_dirs": self.fixture_dirs,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


def _grid_characters(cell: dict) -> list[PChar]:
    p, n = int(cell["p"]), int(cell["n"])
    if "conrey" in cell:
        return [PChar.from_conrey(p, n, int(cell["conrey"]))]
    return list(PChar.all_characters(p, n))


def run_verify(campaign: Campaign) -> Report:
    """Execute every campaign cell and return the merged report."""
    rep = Report(seed=campaign.seed, meta={"campaign": campaign.to_dict()})
    cache = DiskCache()
    for cell in campaign.grid:
        p, n = int(cell["p"]), int(cell["n"])
        for chi in _grid_characters(cell):
            rep.extend(verify_relations(p, n, chi).assertions)
            rep.extend(verify_induced(p, n, chi).report.assertions)
            if cache.directory is not None:
                # warm the disk cache; corrupt entries are rebuilt with a warning
                structure_table(p, n, chi, cache=cache)
    for directory in campaign.fixture_dirs:
        _classical_suite(rep, Path(directory), campaign.tolerance)
    return rep


def _classical_suite(rep: Report, base: Path, tol: dict) -> None:
    families = load_families(base)
    for fam in families:
        sp = fam["space"]
        tag = f"classical.{fam['name']}"
        quals = qualifying_primes(sp.level, sp.char)

        with timed() as t:
            res = characterize(sp)
        check(rep, f"{tag}.newdim", res.expected_new, res.new_dim, "oracle",
              t.elapsed, detail=f"gap {res.gap:.3g}, dim {res.dim}")
        check_bool(rep, f"{tag}.gap", res.gap >= tol["gap_min"], "definition",
                   expected=f">= {tol['gap_min']:g}", computed=f"{res.gap:.3g}")

        for op_rep in res.ops:
            check_bool(
                rep, f"{tag}.{op_rep.label}.quad",
                op_rep.quad <= tol["quad"], "formula",
                expected=f"<= {tol['quad']:g}", computed=f"{op_rep.quad:.3g}",
            )
            check_bool(
                rep, f"{tag}.{op_rep.label}.eigset",
                op_rep.eig_dist <= tol["eig_dist"], "formula",
                expected=f"within {tol['eig_dist']:g} of {op_rep.roots}",
                computed=f"{op_rep.eig_dist:.3g}",
            )
            check_bool(
                rep, f"{tag}.{op_rep.label}.healthy",
                not op_rep.poisoned, "definition",
                computed=f"residual {op_rep.residual:.3g}, cond {op_rep.conditioning:.3g}",
            )

        for q in quals:
            p = q["p"]
            if sp.dim == 0:
                continue
            with timed() as t:
                Us = op_U(sp, p, normalized=True, route="sampled")
                Uc = op_U(sp, p, normalized=True, route="coeff")
                dev = float(
                    np.linalg.norm(Us.matrix - Uc.matrix)
                    / max(1.0, float(np.linalg.norm(Uc.matrix)))
                )
            check_bool(
                rep, f"{tag}.U[{p}].routes", dev <= tol["dual_route"], "oracle",
                t.elapsed, expected=f"<= {tol['dual_route']:g}", computed=f"{dev:.3g}",
            )
            W = op_W(sp, p)
            s = w_square_scalar(sp, p)
            dev = float(
                np.linalg.norm(W.matrix @ W.matrix - s * np.eye(sp.dim))
            )
            check_bool(
                rep, f"{tag}.W.square", dev <= tol["w_square"], "formula",
                expected=f"scalar {s:.3g}", computed=f"deviation {dev:.3g}",
            )

        for level, lower in fam["lower"].items():
            for q in quals:
                if sp.level // q["p"] != level:
                    continue
                with timed() as t:
                    checks = placement_checks(sp, q["p"], q["kind"], lower,
                                              tol["placement"])
                worst = max((c.residual for c in checks), default=0.0)
                bad = [c.name for c in checks if not c.ok]
                check_bool(
                    rep, f"{tag}.placement.p{q['p']}",
                    not bad, "formula", t.elapsed,
                    expected=f"{len(checks)} placements <= {tol['placement']:g}",
                    computed=f"worst {worst:.3g}" + (f", failed {bad}" if bad else ""),
                )
