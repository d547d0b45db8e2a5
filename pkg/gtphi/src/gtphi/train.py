"""Contrastive training loop with instance-grouped batches and
accuracy-based checkpoint selection."""

from __future__ import annotations

import random
from typing import Dict, List, Optional

import torch

from .data import Graph, Sample, load_dataset, split_instances
from .loss import PairingError, contrastive_loss, ranking_accuracy
from .model import ModelConfig, SolutionScorer, save_checkpoint


class TrainingError(ValueError):
    pass


def _scores(model: SolutionScorer, graphs: Dict[str, Graph], samples: List[Sample]) -> torch.Tensor:
    return torch.stack([model(graphs[s.instance_id], s.solution) for s in samples])


def evaluate(model: SolutionScorer, graphs: Dict[str, Graph], samples: List[Sample]) -> float:
    """Held-out pair-ranking accuracy in inference mode."""
    values = [model.score(graphs[s.instance_id], s.solution) for s in samples]
    return ranking_accuracy(values, samples)


def train(
    dataset_dir: str,
    config: ModelConfig,
    checkpoint_path: str,
    patience: int = 15,
    log=None,
) -> dict:
    """Train on a dataset directory; saves the best-validation-accuracy model
    to `checkpoint_path` and returns the metrics log."""
    graphs, samples = load_dataset(dataset_dir)
    if not samples:
        raise TrainingError("dataset contains no samples")
    train_ids, val_ids = split_instances(list(graphs), config.holdout_frac, config.seed)
    by_instance: Dict[str, List[Sample]] = {}
    for s in samples:
        by_instance.setdefault(s.instance_id, []).append(s)
    train_ids = [i for i in train_ids if i in by_instance]
    val_samples = [s for i in val_ids for s in by_instance.get(i, [])]
    if not train_ids:
        raise TrainingError("no training instances after the split")

    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    model = SolutionScorer(config)
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    epochs_log: List[dict] = []
    best_acc = -1.0
    best_epoch = -1
    for epoch in range(config.epochs):
        model.train()
        order = list(train_ids)
        rng.shuffle(order)
        total, batches = 0.0, 0
        for b in range(0, len(order), config.batch_instances):
            batch = [s for iid in order[b : b + config.batch_instances] for s in by_instance[iid]]
            try:
                loss = contrastive_loss(_scores(model, graphs, batch), batch, config.margin)
            except PairingError:
                continue
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss.detach())
            batches += 1
        if batches == 0:
            raise TrainingError("no batch produced a trainable pair")
        epoch_loss = total / batches
        val_acc = evaluate(model, graphs, val_samples) if val_samples else float("nan")
        epochs_log.append({"epoch": epoch, "loss": epoch_loss, "val_accuracy": val_acc})
        if log:
            log(f"epoch {epoch}: loss {epoch_loss:.4f} val_accuracy {val_acc:.3f}")
        if val_acc == val_acc and val_acc > best_acc:
            best_acc, best_epoch = val_acc, epoch
            save_checkpoint(checkpoint_path, model, {"epochs": epochs_log, "best_epoch": epoch})
        if best_epoch >= 0 and epoch - best_epoch >= patience:
            break
    if best_epoch < 0:  # no validation split: keep the final model
        save_checkpoint(checkpoint_path, model, {"epochs": epochs_log, "best_epoch": None})
    metrics = {
        "epochs": epochs_log,
        "best_epoch": best_epoch if best_epoch >= 0 else None,
        "best_val_accuracy": best_acc if best_epoch >= 0 else None,
        "train_instances": len(train_ids),
        "val_instances": len(val_ids),
        "num_samples": len(samples),
    }
    return metrics
