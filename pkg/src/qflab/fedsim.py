"""In-process federated orchestration: clients share exact batch gradients,
the server aggregates with relative weights and updates the shared parameters.

There is no wire protocol on purpose: the threat model only cares about the
message contents, so rounds are explicit RoundRecord values that serialize to
JSON lines.  That file is exactly the information available to an
honest-but-curious server and is what the attack module consumes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import engine, qmodel
from .errors import ConfigurationError, DivergenceError, ProtocolError
from .optim import Adam
from .qmodel import ModelSpec, Sample
from .seeding import ROLE_BATCH, ROLE_SHUFFLE, derive_rng

TWO_PI = 2.0 * np.pi


@dataclass
class ClientState:
    """One client: a private dataset, a batch size, and a seed for batch draws."""

    client_id: int
    samples: list
    batch_size: int
    rng_seed: int

    def __post_init__(self):
        if not self.samples:
            raise ConfigurationError(f"client {self.client_id} has an empty dataset")
        if not 1 <= self.batch_size <= len(self.samples):
            raise ConfigurationError(
                f"client {self.client_id}: batch size {self.batch_size} must be in "
                f"[1, {len(self.samples)}]"
            )


@dataclass
class ServerState:
    model: ModelSpec
    theta: np.ndarray
    learning_rate: float
    weights: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        # zero is allowed: a null update leaves theta frozen, handy as a control
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning rate must be >= 0, got {self.learning_rate}")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ConfigurationError(
                f"client weights must sum to 1, got {float(np.sum(self.weights))!r}"
            )


def dataset_weights(clients) -> np.ndarray:
    """Default relative impacts p_i = N_i / N."""
    sizes = np.array([len(c.samples) for c in clients], dtype=float)
    return sizes / np.sum(sizes)


@dataclass
class RoundRecord:
    """Everything exchanged in one aggregation round."""

    t: int
    client_gradients: list  # np.ndarray per client, server receive order
    aggregated: np.ndarray
    theta_before: np.ndarray
    theta_after: np.ndarray
    batch_indices: list

    def to_json_lines(self, server: ServerState) -> list:
        """One JSON object per client message, as the attacker would see them."""
        lines = []
        for i, grad in enumerate(self.client_gradients):
            lines.append(json.dumps({
                "t": self.t,
                "client_id": i,
                "gradients": [float(g) for g in grad],
                "theta": [float(v) for v in self.theta_before],
                "eta": server.learning_rate,
                "p": float(server.weights[i]),
            }, sort_keys=True))
        return lines


def draw_batch(client: ClientState, round_index: int) -> np.ndarray:
    """Seeded batch indices, without replacement within a round."""
    rng = derive_rng(client.rng_seed, ROLE_BATCH, round_index)
    return rng.choice(len(client.samples), size=client.batch_size, replace=False)


def client_round(model: ModelSpec, client: ClientState, theta: np.ndarray,
                 round_index: int = 0, batch_indices=None, fast: bool = True) -> np.ndarray:
    """The gradient message a client sends for one round."""
    if batch_indices is None:
        batch_indices = draw_batch(client, round_index)
    batch = [client.samples[i] for i in batch_indices]
    if fast:
        xs = np.stack([s.x for s in batch])
        ys = np.array([s.y for s in batch])
        _, grads = engine.parameter_shift_gradients(model, theta, xs, ys)
        return np.mean(grads, axis=0)
    return qmodel.batch_cost_gradient(model, batch, theta)


def server_aggregate_update(server: ServerState, gradients, t: int = 0,
                            batch_indices=None, optimizer=None):
    """Weighted aggregation and parameter update; theta wraps into [0, 2*pi).

    `optimizer` defaults to the plain rule theta <- theta - eta * sum_i p_i g_i;
    passing an Adam instance applies it to the aggregated gradient instead.
    """
    d = server.theta.shape[0]
    for g in gradients:
        if np.asarray(g).shape != (d,):
            raise ProtocolError(f"gradient message has shape {np.asarray(g).shape}, expected ({d},)")
    aggregated = np.zeros(d)
    for p, g in zip(server.weights, gradients):  # fixed client order for determinism
        aggregated += p * np.asarray(g, dtype=float)
    if optimizer is None:
        new_theta = server.theta - server.learning_rate * aggregated
    else:
        new_theta = optimizer.step(server.theta, aggregated)
    new_theta = np.mod(new_theta, TWO_PI)
    record = RoundRecord(
        t=t,
        client_gradients=[np.array(g, dtype=float) for g in gradients],
        aggregated=aggregated,
        theta_before=np.array(server.theta),
        theta_after=np.array(new_theta),
        batch_indices=list(batch_indices) if batch_indices is not None else [],
    )
    server.theta = new_theta
    return new_theta, record


@dataclass
class TrainingHistory:
    epochs: list = field(default_factory=list)
    train_mse: list = field(default_factory=list)
    theta_snapshots: dict = field(default_factory=dict)
    records: list = field(default_factory=list)


def training_mse(model: ModelSpec, theta: np.ndarray, grid_x: np.ndarray,
                 grid_y: np.ndarray) -> float:
    outputs = engine.model_outputs(model, theta, grid_x[:, None])
    return float(np.mean((outputs - grid_y) ** 2))


def run_training(server: ServerState, clients, epochs: int, grid_x: np.ndarray,
                 grid_y: np.ndarray, optimizer: str = "sgd",
                 snapshot_epochs=(), keep_records: bool = False) -> TrainingHistory:
    """Federated training loop with per-epoch metrics and theta snapshots.

    An epoch is one pass over each client's shuffled dataset in batches of its
    batch size; every batch is one aggregation round.  `grid_x` are inputs in
    data units, `grid_y` the target values; the recorded MSE at epoch index e
    is measured before the e-th epoch runs, so index 0 is the initial model
    and the history always has epochs + 1 entries.
    """
    if epochs < 0:
        raise ConfigurationError(f"epochs must be >= 0, got {epochs}")
    adam = Adam(learning_rate=server.learning_rate) if optimizer == "adam" else None
    if optimizer not in ("sgd", "adam"):
        raise ConfigurationError(f"optimizer must be 'sgd' or 'adam', got {optimizer!r}")
    history = TrainingHistory()
    snapshot_epochs = set(snapshot_epochs)
    rounds_per_epoch = min(len(c.samples) // c.batch_size for c in clients)
    t = 0
    for epoch in range(epochs + 1):
        mse = training_mse(server.model, server.theta, grid_x, grid_y)
        if not np.isfinite(mse):
            raise DivergenceError(f"non-finite training MSE at epoch {epoch}")
        history.epochs.append(epoch)
        history.train_mse.append(mse)
        if epoch in snapshot_epochs or epoch == 0 or epoch == epochs:
            history.theta_snapshots[epoch] = np.array(server.theta)
        if epoch == epochs:
            break
        shuffles = []
        for client in clients:
            rng = derive_rng(client.rng_seed, ROLE_SHUFFLE, epoch)
            shuffles.append(rng.permutation(len(client.samples)))
        for r in range(rounds_per_epoch):
            gradients = []
            batches = []
            for client, order in zip(clients, shuffles):
                idx = order[r * client.batch_size:(r + 1) * client.batch_size]
                batches.append(idx)
                gradients.append(client_round(server.model, client, server.theta,
                                              batch_indices=idx))
            _, record = server_aggregate_update(server, gradients, t=t,
                                                batch_indices=batches, optimizer=adam)
            if keep_records:
                history.records.append(record)
            t += 1
    return history


def write_round_records(path, records, server: ServerState) -> None:
    with open(path, "w") as fh:
        for record in records:
            for line in record.to_json_lines(server):
                fh.write(line + "\n")
