"""Training service: sample, fit and persist a classifier."""

from pathlib import Path

from config import RunConfig
from data_handlers import (
    header_lines,
    load_record,
    open_output,
    save_model,
    write_loss_history,
    write_summary,
)
from errors import LateralScanError
from mlp import TrainConfig
from pipeline import SamplingPlan, train_classifier
from sensors import N_SENSORS
from services.progress import ProgressCallbackType, print_progress
from services.results import ServiceResult


class TrainingService:
    """Trains a donor-vs-acceptor network and writes the model, loss report and summary."""

    def __init__(self, config: RunConfig, on_progress: ProgressCallbackType = print_progress):
        self.config = config
        self.on_progress = on_progress

    def output_paths(self) -> dict[str, Path]:
        prefix = self.config["out"]
        return {
            "model": Path(f"{prefix}.model"),
            "report": Path(f"{prefix}.report.tsv"),
            "summary": Path(f"{prefix}.summary.txt"),
        }

    def run(self) -> ServiceResult:
        try:
            return self._run()
        except LateralScanError as e:
            return ServiceResult.failure(e)

    def _run(self) -> ServiceResult:
        c = self.config
        donor = load_record(c["donor"], c["donor_record"])
        acceptor = load_record(c["acceptor"], c["acceptor_record"])
        self.on_progress(f"Donor '{donor.id}' ({donor.length} nt), acceptor '{acceptor.id}' ({acceptor.length} nt)", "info")

        plan = SamplingPlan(fragments_per_genome=c["fragments"], fragment_length=c["window"], seed=c["seed"])
        train_config = TrainConfig(
            learning_rate=c["lr"],
            momentum=c["momentum"],
            epochs=c["epochs"],
            seed=c["seed"],
            init_scale=c["init_scale"],
            early_stop=c["early_stop"],
            log_every=c["log_every"],
        )
        layer_sizes = (N_SENSORS, *c["hidden"], 1)
        model, report = train_classifier(
            donor,
            acceptor,
            plan,
            layer_sizes=layer_sizes,
            train_config=train_config,
            scan_step=c["step"],
            workers=c["workers"],
            on_progress=self.on_progress,
        )

        header = header_lines("train", c.echo(), {"donor": c["donor"], "acceptor": c["acceptor"]})
        paths = self.output_paths()
        save_model(model, paths["model"], header)
        with open_output(paths["report"]) as f:
            write_loss_history(report.loss_history, f, header)
        with open_output(paths["summary"]) as f:
            write_summary(report, f, header)

        return ServiceResult(
            success=True,
            message=f"Trained {report.architecture} model {model.model_id}",
            stage="train",
            outputs=paths,
            data={"report": report, "model": model},
        )
