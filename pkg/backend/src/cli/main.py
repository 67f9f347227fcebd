"""Command-line front end for genus symbols, Phi_n-lattices, Borcherds runs and claim verification."""
import json
from math import lcm
from pathlib import Path
from typing import Any, Callable, List, Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from sympy import totient

from ..config import OutputFormat, settings
from ..exceptions import (
    ChamberBudgetExceeded,
    FixtureError,
    LatticeError,
    SetupValidationError,
)
from ..models.fixtures import FixtureSpec, load_external_facts, load_fixture_spec
from ..models.lattice_file import LatticeFile
from ..models.reports import BorcherdsReport, ClaimStatus, VerificationReport

app = typer.Typer(help="Exact lattice computations for semi-symplectic automorphisms of Enriques surfaces.")
console = Console()

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _configure(
    output_format: Optional[OutputFormat] = None,
    fixture_dir: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    budget: Optional[int] = None,
) -> None:
    """Apply per-invocation overrides to the global settings."""
    update = {
        "output_format": output_format,
        "fixture_dir": fixture_dir,
        "seed": seed,
        "thread_count": threads,
        "chamber_budget": budget,
    }
    update = {k: v for k, v in update.items() if v is not None}
    if not update:
        return
    # validate on a copy, then apply
    checked = settings.model_validate({**settings.model_dump(), **update})
    for key in update:
        setattr(settings, key, getattr(checked, key))


def _fail(message: str, code: int) -> None:
    console.print(f"[red]Error:[/red] {message}")
    raise typer.Exit(code)


def _emit_json(data: Any) -> None:
    console.print_json(json.dumps(data))


def _spinner() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )


def _progress_callback(progress: Progress, task) -> Callable[[str, Any], None]:
    def update(event_type: str, data: Any) -> None:
        if event_type == "chamber_processed":
            progress.update(task, description=f"[cyan]chambers processed: {data['index'] + 1}/{data['total']}")
        elif event_type == "setup_started":
            progress.update(task, description=f"[cyan]Borcherds run for {data['setup']}...")
        elif event_type == "claim_started":
            progress.update(task, description=f"[cyan]verifying {data['claim']}...")

    return update


def _resolve_spec(fixture: str) -> FixtureSpec:
    from ..services.fixture_builder import SETUP_NAMES, spec_path

    path = spec_path(fixture) if fixture in SETUP_NAMES else Path(fixture)
    return load_fixture_spec(path)


# ---------------------------------------------------------------------------
# genus
# ---------------------------------------------------------------------------


@app.command()
def genus(
    lattice_file: Path = typer.Argument(..., help="JSON lattice file with a 'gram' entry"),
    output_format: Optional[OutputFormat] = typer.Option(None, "--format", help="json or text"),
):
    """
    Print the Conway-Sloane genus symbol of an even lattice.

    Examples:

        python -m src.cli.main genus fixtures/a2.json

        python -m src.cli.main genus fixtures/n.json --format json
    """
    from ..services.genus import genus_symbol

    _configure(output_format=output_format)
    try:
        lattice = LatticeFile.load(lattice_file).to_lattice()
        symbol = genus_symbol(lattice)
    except (FixtureError, LatticeError) as exc:
        _fail(str(exc), EXIT_INPUT)

    if settings.output_format == OutputFormat.JSON:
        _emit_json({"name": lattice.name, "signature": list(symbol.signature), "genus": symbol.render()})
    else:
        console.print(symbol.render())


# ---------------------------------------------------------------------------
# phi
# ---------------------------------------------------------------------------


def _parse_signature(text: str) -> tuple:
    try:
        pos, neg = (int(x) for x in text.split(","))
    except ValueError:
        raise typer.BadParameter(f"signature must look like '2,6', got {text!r}")
    return pos, neg


@app.command()
def phi(
    n: int = typer.Option(..., "--n", help="Index of the cyclotomic polynomial (n > 2)"),
    sig: List[str] = typer.Option([], "--sig", help="Allowed signature 'p,q' (repeatable)"),
    n2_min: Optional[int] = typer.Option(None, "--n2-min", help="Min rank of the scale-2 constituent"),
    n2_max: Optional[int] = typer.Option(None, "--n2-max", help="Max rank of the scale-2 constituent"),
    rank: Optional[int] = typer.Option(None, "--rank", help="Expected rank (must equal deg Phi_n)"),
    det: Optional[int] = typer.Option(None, "--det", help="|det| must divide this"),
    bound: Optional[int] = typer.Option(None, "--bound", help="Coordinate box for twist elements"),
    output_format: Optional[OutputFormat] = typer.Option(None, "--format", help="json or text"),
):
    """
    List Phi_n-lattices (twists of the principal lattice) up to isometry.

    Examples:

        python -m src.cli.main phi --n 15 --sig 0,8 --sig 2,6 --n2-min 6 --n2-max 8 --det 1024

        python -m src.cli.main phi --n 3 --rank 2
    """
    from ..services.cyclo import PhiConstraints, enumerate_phi_lattices, principal_phi_lattice
    from ..services.genus import genus_symbol

    _configure(output_format=output_format)
    if n <= 2:
        raise typer.BadParameter("n > 2 required", param_hint="--n")
    degree = int(totient(n))
    if rank is not None and rank != degree:
        raise typer.BadParameter(f"Phi_{n}-lattices have rank {degree}", param_hint="--rank")
    box = bound or settings.twist_coefficient_bound
    if det is None:
        if degree != 2:
            raise typer.BadParameter("--det is required when deg Phi_n > 2", param_hint="--det")
        # rational twists a give |det| = a^2 |det L0|
        det = int(abs(principal_phi_lattice(n).lattice.determinant())) * lcm(*(a * a for a in range(1, box + 1)))
    window = None
    if n2_min is not None or n2_max is not None:
        window = (n2_min or 0, degree if n2_max is None else n2_max)

    constraints = PhiConstraints(
        det_divisor=det,
        signatures=tuple(_parse_signature(s) for s in sig) or None,
        two_rank=window,
        coefficient_bound=box,
    )
    try:
        with _spinner() as progress:
            progress.add_task(f"[cyan]enumerating Phi_{n}-twists...", total=None)
            found = enumerate_phi_lattices(n, constraints)
    except LatticeError as exc:
        _fail(str(exc), EXIT_INPUT)

    rows = [
        {
            "twist": str(p.twist),
            "genus": genus_symbol(p.lattice).render(),
            "determinant": int(p.lattice.determinant()),
            "exact_class": p.exact_class,
            "gram": [[int(x) for x in row] for row in p.lattice.gram],
        }
        for p in found
    ]
    if settings.output_format == OutputFormat.JSON:
        _emit_json({"n": n, "classes": rows})
        return
    table = Table(title=f"Phi_{n}-lattices ({len(rows)} classes)")
    table.add_column("twist a", style="cyan")
    table.add_column("genus", style="white")
    table.add_column("det", justify="right")
    table.add_column("class", style="dim")
    for row in rows:
        table.add_row(row["twist"], row["genus"], str(row["determinant"]),
                      "isometry" if row["exact_class"] else "genus")
    console.print(table)


# ---------------------------------------------------------------------------
# build-fixture / borcherds
# ---------------------------------------------------------------------------


@app.command("build-fixture")
def build_fixture(
    fixture: str = typer.Argument(..., help="Setup name (f7, rho16, rho18) or path to a fixture spec"),
    rebuild: bool = typer.Option(False, help="Ignore a cached build"),
    seed: Optional[int] = typer.Option(None, help="Random seed for the search"),
    fixture_dir: Optional[str] = typer.Option(None, help="Fixture directory"),
):
    """
    Construct the embeddings and initial chamber of a setup and cache them.

    Examples:

        python -m src.cli.main build-fixture f7

        python -m src.cli.main build-fixture rho18 --rebuild --seed 7
    """
    from ..services.fixture_builder import built_path, load_or_build

    _configure(fixture_dir=fixture_dir, seed=seed)
    try:
        spec = _resolve_spec(fixture)
        with _spinner() as progress:
            progress.add_task(f"[cyan]building {spec.name}...", total=None)
            built = load_or_build(spec, rebuild=rebuild)
    except SetupValidationError as exc:
        _fail(f"setup check '{exc.clause}' failed: {exc}", EXIT_INPUT)
    except LatticeError as exc:
        _fail(str(exc), EXIT_INPUT)

    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Field", style="cyan bold", no_wrap=True)
    table.add_column("Value", style="white")
    table.add_row("Fixture", built.name)
    table.add_row("rank S_X", str(len(built.sx_in_l26)))
    table.add_row("walls of D0", str(len(built.walls or [])))
    table.add_row("Cached at", str(built_path(built.name)))
    console.print(Panel(table, title="[green]Fixture built", border_style="green"))


def _write_report(name: str, report: BorcherdsReport) -> Path:
    settings.output_path.mkdir(parents=True, exist_ok=True)
    path = settings.output_path / f"{name}.json"
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    (settings.output_path / f"{name}.txt").write_text(report.render_text() + "\n", encoding="utf-8")
    return path


@app.command()
def borcherds(
    fixture: str = typer.Argument(..., help="Setup name (f7, rho16, rho18) or path to a fixture spec"),
    budget: Optional[int] = typer.Option(None, help="Max chambers registered"),
    threads: Optional[int] = typer.Option(None, help="Worker threads for wall classification"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    rebuild: bool = typer.Option(False, help="Rebuild the fixture before running"),
    output_format: Optional[OutputFormat] = typer.Option(None, "--format", help="json or text"),
):
    """
    Run the chamber BFS and write the report to the output directory.

    Examples:

        python -m src.cli.main borcherds f7

        python -m src.cli.main borcherds rho16 --budget 40 --threads 4
    """
    from ..agents.borcherds_engine import main_borcherds
    from ..services.chambers import load_setup
    from ..services.fixture_builder import load_or_build

    try:
        _configure(output_format=output_format, seed=seed, threads=threads, budget=budget)
    except ValueError as exc:
        _fail(str(exc), EXIT_INPUT)

    try:
        spec = _resolve_spec(fixture)
        with _spinner() as progress:
            task = progress.add_task(f"[cyan]loading {spec.name}...", total=None)
            setup = load_setup(load_or_build(spec, rebuild=rebuild))
            progress.update(task, description="[cyan]chamber BFS...")
            report = main_borcherds(setup, settings.chamber_budget, _progress_callback(progress, task))
    except ChamberBudgetExceeded as exc:
        if exc.partial is not None:
            path = _write_report(f"{spec.name}.partial", exc.partial)
            console.print(f"[yellow]partial report written to {path}[/yellow]")
        _fail(str(exc), EXIT_BUDGET)
    except SetupValidationError as exc:
        _fail(f"setup check '{exc.clause}' failed: {exc}", EXIT_INPUT)
    except LatticeError as exc:
        _fail(str(exc), EXIT_INPUT)

    path = _write_report(spec.name, report)
    if settings.output_format == OutputFormat.JSON:
        _emit_json(json.loads(report.model_dump_json()))
    else:
        console.print(Panel(report.render_text(), title=f"[green]{spec.name}", border_style="green"))
        console.print(f"\n[cyan]Report:[/cyan] {path}")
    expected = spec.expected
    if expected.r_count is not None and expected.r_count != report.r_count:
        console.print(f"[red]|R| = {report.r_count}, expected {expected.r_count}[/red]")
        raise typer.Exit(EXIT_REFUTED)
    if expected.type_counts is not None and expected.type_counts != report.type_counts():
        console.print(f"[red]chamber types {report.type_counts()}, expected {expected.type_counts}[/red]")
        raise typer.Exit(EXIT_REFUTED)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _render_verification(report: VerificationReport) -> None:
    color = {"verified": "green", "refuted": "red", "external-fact": "yellow"}
    table = Table(title=f"claim {report.claim_id}")
    table.add_column("step", style="cyan")
    table.add_column("computed")
    table.add_column("expected")
    table.add_column("status")
    for row in report.trace:
        c = color[row.status.value]
        status = f"[{c}]{row.status.value}[/{c}]"
        if row.citation:
            status += f" [dim]{row.citation}[/dim]"
        table.add_row(row.step, row.computed, row.expected, status)
    console.print(table)
    c = color[report.status.value]
    console.print(f"[{c}]{report.claim_id}: {report.status.value.upper()}[/{c}]\n")


@app.command()
def verify(
    claim: str = typer.Argument(..., help="Claim id (f15, f9, f7, headline) or 'all'"),
    output_format: Optional[OutputFormat] = typer.Option(None, "--format", help="json or text"),
    budget: Optional[int] = typer.Option(None, help="Max chambers for the headline Borcherds runs"),
):
    """
    Replay a claim and print its trace; exits 1 if any step is refuted.

    Examples:

        python -m src.cli.main verify f15

        python -m src.cli.main verify all --format json
    """
    from ..agents.verifier import CLAIMS, ClaimVerifier

    if claim != "all" and claim not in CLAIMS:
        raise typer.BadParameter(f"unknown claim {claim!r}; expected one of {', '.join(CLAIMS)} or 'all'")
    try:
        _configure(output_format=output_format, budget=budget)
    except ValueError as exc:
        _fail(str(exc), EXIT_INPUT)
    claims = CLAIMS if claim == "all" else (claim,)

    verifier = ClaimVerifier()
    reports: List[VerificationReport] = []
    try:
        with _spinner() as progress:
            task = progress.add_task("[cyan]verifying...", total=None)
            for claim_id in claims:
                reports.append(verifier.verify(claim_id, _progress_callback(progress, task)))
    except ChamberBudgetExceeded as exc:
        _fail(str(exc), EXIT_BUDGET)
    except LatticeError as exc:
        _fail(str(exc), EXIT_INPUT)

    if settings.output_format == OutputFormat.JSON:
        _emit_json([json.loads(r.model_dump_json()) for r in reports])
    else:
        for report in reports:
            _render_verification(report)
    if any(r.status == ClaimStatus.REFUTED for r in reports):
        raise typer.Exit(EXIT_REFUTED)


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


@app.command()
def orders(
    output_format: Optional[OutputFormat] = typer.Option(None, "--format", help="json or text"),
):
    """
    Print the admissible orders of semi-symplectic automorphisms.

    Examples:

        python -m src.cli.main orders
    """
    from ..services.cyclo import admissible_orders

    _configure(output_format=output_format)
    try:
        facts = load_external_facts(settings.fixture_path / "external_facts.json")
    except FixtureError as exc:
        _fail(str(exc), EXIT_INPUT)
    with _spinner() as progress:
        progress.add_task("[cyan]filtering characteristic polynomials...", total=None)
        admissible = admissible_orders(facts.inherited_bound, facts.max_factor_degree)
    realized = sorted(o for o in facts.realized_orders if o in admissible)
    still_open = [o for o in admissible if o not in realized]

    if settings.output_format == OutputFormat.JSON:
        _emit_json({"admissible": admissible, "realized": realized, "open": still_open})
        return
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Field", style="cyan bold", no_wrap=True)
    table.add_column("Value", style="white")
    table.add_row(f"admissible ({len(admissible)})", ", ".join(map(str, admissible)))
    table.add_row(f"realized ({len(realized)})", ", ".join(map(str, realized)))
    table.add_row(f"open ({len(still_open)})", ", ".join(map(str, still_open)))
    console.print(Panel(table, title="Orders of semi-symplectic automorphisms", border_style="cyan"))


if __name__ == "__main__":
    app()
