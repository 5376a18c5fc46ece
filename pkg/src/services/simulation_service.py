"""Simulation services: insertion experiments and synthetic genomes."""

from pathlib import Path

from config import RunConfig
from data_handlers import header_lines, load_record, open_output, write_truth
from errors import LateralScanError
from seqio import write_fasta
from services.progress import ProgressCallbackType, print_progress
from services.results import ServiceResult
from simgen import composition_model, fit_markov, generate, make_experiment


class SimulationService:
    """Builds a chimera by inserting a donor fragment into an acceptor."""

    def __init__(self, config: RunConfig, on_progress: ProgressCallbackType = print_progress):
        self.config = config
        self.on_progress = on_progress

    def output_paths(self) -> dict[str, Path]:
        prefix = self.config["out"]
        return {"fasta": Path(f"{prefix}.fasta"), "truth": Path(f"{prefix}.truth.tsv")}

    def run(self) -> ServiceResult:
        try:
            return self._run()
        except LateralScanError as e:
            return ServiceResult.failure(e)

    def _run(self) -> ServiceResult:
        c = self.config
        donor = load_record(c["donor"], c["donor_record"])
        acceptor = load_record(c["acceptor"], c["acceptor_record"])
        bundle = make_experiment(
            donor, acceptor, c["insert_length"], position=c["insert_pos"], seed=c["seed"],
        )
        record = bundle.record
        self.on_progress(
            f"Inserted {record.insert_length} nt of '{record.donor_id}' at {record.insert_position}",
            "success",
        )

        header = header_lines("simulate", c.echo(), {"donor": c["donor"], "acceptor": c["acceptor"]})
        paths = self.output_paths()
        with open_output(paths["fasta"]) as f:
            write_fasta([bundle.chimera], f)
        with open_output(paths["truth"]) as f:
            write_truth(record, f, header)
        return ServiceResult(
            success=True,
            message=f"Chimera '{bundle.chimera.id}' ({bundle.chimera.length} nt)",
            stage="simulate",
            outputs=paths,
            data={"bundle": bundle},
        )


class GenerationService:
    """Draws a synthetic genome from a composition or a template-fitted Markov chain."""

    def __init__(self, config: RunConfig, on_progress: ProgressCallbackType = print_progress):
        self.config = config
        self.on_progress = on_progress

    def run(self) -> ServiceResult:
        try:
            return self._run()
        except LateralScanError as e:
            return ServiceResult.failure(e)

    def _run(self) -> ServiceResult:
        c = self.config
        if c["template"] is not None:
            template = load_record(c["template"], c["record"])
            model = fit_markov(template, c["markov_order"])
            source = f"order-{model.order} chain fitted on '{template.id}'"
        else:
            model = composition_model(c["gc"])
            source = f"GC {c['gc']}"

        seq = generate(model, c["length"], seed=c["seed"], seq_id=c["id"])
        self.on_progress(f"Generated {seq.length} nt from {source}", "success")

        path = Path(c["out"])
        with open_output(path) as f:
            write_fasta([seq], f)
        return ServiceResult(
            success=True,
            message=f"Wrote '{seq.id}' ({seq.length} nt)",
            stage="generate",
            outputs={"fasta": path},
            data={"sequence": seq, "model": model},
        )
