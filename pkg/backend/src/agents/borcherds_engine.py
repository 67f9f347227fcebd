"""Chamber BFS computing representatives and generators of aut_s(Y)."""
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config import settings
from ..exceptions import ChamberBudgetExceeded, SetupValidationError
from ..models.reports import BorcherdsReport, ChamberRecord
from ..services import linalg
from ..services.chambers import (
    Chamber,
    EnriquesSetup,
    adjacent_chamber,
    chamber_of,
    initial_chamber,
    is_in_nef_cone,
    pairing_key,
    semisymplectic_lifts,
    wall_orbit_report,
)
from ..services.isometries import certify_symmetric, matrix_group_order
from ..utils.logger import logger


class BorcherdsEngine:
    """Breadth-first search over induced chambers inside the nef cone.

    Chambers are processed in registration order. For every chamber the
    stabilizer joins the generating set, walls are split into orbits, and
    each inner orbit representative leads to an adjacent chamber that is
    either matched against a known representative (the witness joins the
    generating set) or registered as new.
    """

    def __init__(self, budget: Optional[int] = None):
        """Initialize the engine.

        Args:
            budget: Max chambers registered. Defaults to settings.chamber_budget
        """
        self.budget = budget or settings.chamber_budget

    def run(
        self,
        setup: EnriquesSetup,
        progress_callback: Optional[Callable[[str, Any], None]] = None,
    ) -> BorcherdsReport:
        """Run the search and the mod-2 image computation.

        Args:
            setup: Validated setup
            progress_callback: Optional callback(event_type, data)

        Returns:
            Report with R, G, per-chamber orbit tables and the mod-2 image

        Raises:
            ChamberBudgetExceeded: With the partial report attached
            SetupValidationError: If D0 is not inside the nef cone
        """
        start = initial_chamber(setup)
        if not is_in_nef_cone(setup, start):
            raise SetupValidationError("D0", "the initial chamber is not inside the nef cone")
        representatives: List[Chamber] = [start]
        records: List[ChamberRecord] = []
        generators: Dict[Tuple, np.ndarray] = {}
        self._send_progress(progress_callback, "chamber_registered", {"index": 0})

        i = 0
        while i < len(representatives):
            chamber = representatives[i]
            stabilizer = semisymplectic_lifts(setup, chamber, chamber)
            self._add_generators(generators, stabilizer)
            orbits = wall_orbit_report(setup, chamber, stabilizer)
            records.append(
                ChamberRecord(
                    index=i,
                    tau=[[int(x) for x in row] for row in chamber.tau],
                    stabilizer_order=len(stabilizer),
                    orbits=orbits,
                )
            )
            logger.info(
                f"chamber {i}: |aut_s(Y, D)| = {len(stabilizer)}, {len(orbits)} wall orbits, "
                f"{records[-1].outer_walls} outer walls"
            )
            for orbit in orbits:
                if orbit.outer:
                    continue
                neighbor = adjacent_chamber(setup, chamber, orbit.representative)
                witness = self._match(setup, neighbor, representatives)
                if witness is not None:
                    self._add_generators(generators, [witness])
                    continue
                if len(representatives) >= self.budget:
                    partial = self._report(setup, records, generators, complete=False)
                    logger.warning(f"chamber budget {self.budget} exhausted with {len(records)} chambers processed")
                    raise ChamberBudgetExceeded(self.budget, partial)
                representatives.append(neighbor)
                logger.info(f"chamber {len(representatives) - 1} registered")
                self._send_progress(
                    progress_callback, "chamber_registered", {"index": len(representatives) - 1}
                )
            self._send_progress(progress_callback, "chamber_processed", {"index": i, "total": len(representatives)})
            i += 1

        return self._report(setup, records, generators, complete=True)

    def _match(
        self, setup: EnriquesSetup, chamber: Chamber, representatives: List[Chamber]
    ) -> Optional[np.ndarray]:
        """An element of aut_s(Y) mapping ``chamber`` onto a known representative."""
        key = pairing_key(setup, chamber)
        for rep in representatives:
            if pairing_key(setup, rep) != key:
                continue
            lifts = semisymplectic_lifts(setup, chamber, rep)
            if lifts:
                return lifts[0]
        return None

    def _add_generators(self, generators: Dict[Tuple, np.ndarray], elements: List[np.ndarray]) -> None:
        for g in elements:
            if linalg.key(g) == linalg.key(linalg.identity(g.shape[0])):
                continue
            generators.setdefault(linalg.key(g), g)

    def _report(
        self,
        setup: EnriquesSetup,
        records: List[ChamberRecord],
        generators: Dict[Tuple, np.ndarray],
        complete: bool,
    ) -> BorcherdsReport:
        gens = [generators[k] for k in sorted(generators)]
        report = BorcherdsReport(
            fixture=setup.name,
            chambers=records,
            generators=[[[int(x) for x in row] for row in g] for g in gens],
            complete=complete,
        )
        if not complete:
            return report
        report.mod2_order = matrix_group_order(gens) if gens else 1
        report.extra["generators_preserve_nef"] = all(is_in_nef_cone(setup, chamber_of(setup, g)) for g in gens)
        degree = setup.expected.symmetric_degree
        if degree:
            cert = certify_symmetric(gens, degree)
            report.symmetric_degree = degree if cert.certified else None
            report.extra["natural_orbit"] = list(cert.natural_orbit or ())
        logger.info(f"BFS done: |R| = {report.r_count}, {len(gens)} generators, mod-2 image of order {report.mod2_order}")
        return report

    def _send_progress(
        self,
        callback: Optional[Callable[[str, Any], None]],
        event_type: str,
        data: Any,
    ) -> None:
        """Send progress update via callback.

        Args:
            callback: Progress callback function
            event_type: Type of event
            data: Event data
        """
        if callback:
            try:
                callback(event_type, data)
            except Exception as exc:
                logger.debug(f"progress callback failed: {exc}")


def main_borcherds(
    setup: EnriquesSetup,
    budget: Optional[int] = None,
    progress_callback: Optional[Callable[[str, Any], None]] = None,
) -> BorcherdsReport:
    """Run the chamber BFS with a fresh engine."""
    return BorcherdsEngine(budget).run(setup, progress_callback)
