"""Conditional GAN that forecasts congestion maps from placement features.

Generator: U-Net style encoder/decoder with configurable skip wiring
(all levels, only the innermost pair, or none). Encoder blocks are
conv(k4,s2,p1) + batchnorm + leaky_relu(0.2); decoder blocks mirror them
with deconvs and relu, dropout(0.5) in the first three decoder levels, and
a final deconv to 3 channels squashed by tanh then rescaled to [0,1]. The
noise input is realized by train-mode dropout, so inference (dropout off,
batchnorm running stats) is deterministic.

Discriminator: 6 conv layers (stride 2 for the first 4, then stride 1),
batchnorm + leaky_relu on all but the last, a final 1-channel map reduced
by global mean into a sigmoid probability that the (input, image) pair is
genuine.

Training alternates one Adam step on D (real vs generated) with one on G
(fool-D plus weighted L1 against the ground truth) per sample, batch 1.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .arch import canonical_json
from .errors import ArtifactIOError, ValidationError
from .nn import Adam, Tensor
from .nn import functional as F
from .nn.layers import BatchNorm2d, Conv2d, ConvTranspose2d
from .raster import ImagePlane

SKIP_MODES = ("all", "single", "none")
CHECKPOINT_MAGIC = b"RCKP"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class GeneratorConfig:
    in_channels: int = 4
    base_width: int = 64
    depth: int = 6
    skip_mode: str = "all"
    dropout_rate: float = 0.5

    def __post_init__(self):
        if self.depth < 2:
            raise ValidationError(f"depth must be >= 2, got {self.depth}")
        if self.base_width < 8:
            raise ValidationError(f"base_width must be >= 8, got {self.base_width}")
        if self.in_channels < 1:
            raise ValidationError(f"in_channels must be >= 1, got {self.in_channels}")
        if self.skip_mode not in SKIP_MODES:
            raise ValidationError(f"skip_mode must be one of {SKIP_MODES}, got {self.skip_mode!r}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValidationError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")


@dataclass(frozen=True)
class DiscriminatorConfig:
    in_channels: int = 7
    n_layers: int = 6
    base_width: int = 64

    def __post_init__(self):
        if self.in_channels < 1:
            raise ValidationError(f"in_channels must be >= 1, got {self.in_channels}")
        if self.n_layers < 2:
            raise ValidationError(f"n_layers must be >= 2, got {self.n_layers}")
        if self.base_width < 8:
            raise ValidationError(f"base_width must be >= 8, got {self.base_width}")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 250
    batch: int = 1
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8
    l1_weight: float = 50.0
    connect_scale: float = 0.1
    use_l1: bool = True
    grayscale: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch != 1:
            raise ValidationError(f"only batch size 1 is supported, got {self.batch}")
        if self.lr <= 0 or self.eps <= 0 or self.l1_weight < 0 or self.connect_scale < 0:
            raise ValidationError("lr and eps must be > 0; weights must be >= 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValidationError("betas must be in [0, 1)")


def default_configs(
    w: int = 256,
    grayscale: bool = False,
    base_width: int | None = None,
    skip_mode: str = "all",
) -> tuple[GeneratorConfig, DiscriminatorConfig]:
    """Standard model sizing for a w x w image: depth log2(w)-2."""
    depth = int(round(np.log2(w)))
    if 2**depth != w or depth < 4:
        raise ValidationError(f"image size must be a power of two >= 16, got {w}")
    depth -= 2
    base = base_width if base_width is not None else (64 if w >= 256 else 32)
    in_ch = 2 if grayscale else 4
    g = GeneratorConfig(in_channels=in_ch, base_width=base, depth=depth, skip_mode=skip_mode)
    d = DiscriminatorConfig(in_channels=in_ch + 3, base_width=base)
    return g, d


def _enc_widths(cfg: GeneratorConfig) -> list[int]:
    return [min(cfg.base_width * 2**i, 8 * cfg.base_width) for i in range(cfg.depth)]


class Generator:
    def __init__(self, cfg: GeneratorConfig, rng: np.random.Generator):
        self.cfg = cfg
        widths = _enc_widths(cfg)
        self.enc: list[tuple[Conv2d, BatchNorm2d]] = []
        c_in = cfg.in_channels
        for w_out in widths:
            self.enc.append((Conv2d(c_in, w_out, rng=rng), BatchNorm2d(w_out, rng=rng)))
            c_in = w_out
        self.dec: list[tuple[ConvTranspose2d, BatchNorm2d | None, bool]] = []
        for j in range(cfg.depth):
            d_in = widths[cfg.depth - 1] if j == 0 else widths[cfg.depth - 1 - j]
            if j > 0 and self._skip_at(j):
                d_in *= 2
            last = j == cfg.depth - 1
            d_out = 3 if last else widths[cfg.depth - 2 - j]
            bn = None if last else BatchNorm2d(d_out, rng=rng)
            drop = (not last) and j < 3 and cfg.dropout_rate > 0
            self.dec.append((ConvTranspose2d(d_in, d_out, rng=rng), bn, drop))

    def _skip_at(self, j: int) -> bool:
        if self.cfg.skip_mode == "all":
            return j >= 1
        if self.cfg.skip_mode == "single":
            return j == 1
        return False

    def forward(self, x: Tensor, training: bool, rng: np.random.Generator | None = None) -> Tensor:
        n, c, h, w = x.shape
        if c != self.cfg.in_channels:
            raise ValidationError(f"generator expects {self.cfg.in_channels} channels, got {c}")
        if h != w or h % 2**self.cfg.depth != 0 or h < 2**self.cfg.depth:
            raise ValidationError(f"input {h}x{w} incompatible with depth {self.cfg.depth}")
        feats = []
        t = x
        for conv, bn in self.enc:
            t = F.leaky_relu(bn.forward(conv.forward(t), training), 0.2)
            feats.append(t)
        for j, (deconv, bn, drop) in enumerate(self.dec):
            if j > 0 and self._skip_at(j):
                t = F.concat([t, feats[self.cfg.depth - 1 - j]], axis=1)
            t = deconv.forward(t)
            if bn is not None:
                t = bn.forward(t, training)
                if drop:
                    t = F.dropout(t, self.cfg.dropout_rate, rng, training)
                t = F.relu(t)
            else:
                t = (F.tanh(t) + 1.0) * 0.5
        return t

    def named_params(self) -> list[tuple[str, Tensor]]:
        out = []
        for i, (conv, bn) in enumerate(self.enc):
            out.append((f"g.enc{i}.conv.w", conv.w))
            out.extend((f"g.enc{i}.bn.{n}", t) for n, t in bn.parameters())
        for j, (deconv, bn, _) in enumerate(self.dec):
            out.append((f"g.dec{j}.deconv.w", deconv.w))
            if bn is not None:
                out.extend((f"g.dec{j}.bn.{n}", t) for n, t in bn.parameters())
        return out

    def named_state(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, (_, bn) in enumerate(self.enc):
            out.extend((f"g.enc{i}.bn.{n}", a) for n, a in bn.state())
        for j, (_, bn, _) in enumerate(self.dec):
            if bn is not None:
                out.extend((f"g.dec{j}.bn.{n}", a) for n, a in bn.state())
        return out


class Discriminator:
    def __init__(self, cfg: DiscriminatorConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.layers: list[tuple[Conv2d, BatchNorm2d | None]] = []
        c_in = cfg.in_channels
        for i in range(cfg.n_layers):
            last = i == cfg.n_layers - 1
            c_out = 1 if last else min(cfg.base_width * 2**i, 8 * cfg.base_width)
            stride = 2 if i < 4 else 1
            conv = Conv2d(c_in, c_out, stride=stride, rng=rng)
            self.layers.append((conv, None if last else BatchNorm2d(c_out, rng=rng)))
            c_in = c_out

    def forward(self, x: Tensor, training: bool) -> Tensor:
        t = x
        for conv, bn in self.layers:
            t = conv.forward(t)
            if bn is not None:
                t = F.leaky_relu(bn.forward(t, training), 0.2)
        return F.sigmoid(F.mean(t))

    def named_params(self) -> list[tuple[str, Tensor]]:
        out = []
        for i, (conv, bn) in enumerate(self.layers):
            out.append((f"d.layer{i}.conv.w", conv.w))
            if bn is not None:
                out.extend((f"d.layer{i}.bn.{n}", t) for n, t in bn.parameters())
        return out

    def named_state(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, (_, bn) in enumerate(self.layers):
            if bn is not None:
                out.extend((f"d.layer{i}.bn.{n}", a) for n, a in bn.state())
        return out


def build_generator(cfg: GeneratorConfig, seed: int = 0) -> Generator:
    return Generator(cfg, np.random.default_rng(np.random.SeedSequence(seed)))


def build_discriminator(cfg: DiscriminatorConfig, seed: int = 0) -> Discriminator:
    return Discriminator(cfg, np.random.default_rng(np.random.SeedSequence(seed)))


def _as_batch(a: np.ndarray | ImagePlane, channels: int, name: str) -> np.ndarray:
    if isinstance(a, ImagePlane):
        a = a.arr.transpose(2, 0, 1)
    a = np.asarray(a, dtype=np.float32)
    if a.ndim == 3:
        a = a[None]
    if a.ndim != 4 or a.shape[0] != 1:
        raise ValidationError(f"{name} must be a single (C, H, W) sample, got {a.shape}")
    if a.shape[1] != channels:
        raise ValidationError(f"{name} must have {channels} channels, got {a.shape[1]}")
    return a


def gan_step(
    g_net: Generator,
    d_net: Discriminator,
    x: np.ndarray,
    truth: np.ndarray,
    cfg: TrainConfig,
    rng: np.random.Generator,
    g_opt: Adam,
    d_opt: Adam,
) -> dict:
    """One alternating D-then-G update on a single pair. Returns losses."""
    xt = Tensor(_as_batch(x, g_net.cfg.in_channels, "x"))
    gt = Tensor(_as_batch(truth, 3, "truth"))

    fake = g_net.forward(xt, training=True, rng=rng)

    d_opt.zero_grad()
    p_real = d_net.forward(F.concat([xt, gt], axis=1), training=True)
    p_fake_d = d_net.forward(F.concat([xt, fake.detach()], axis=1), training=True)
    d_loss = F.bce_loss(p_real, 1.0) + F.bce_loss(p_fake_d, 0.0)
    d_loss.backward()
    d_opt.step()

    g_opt.zero_grad()
    p_fake_g = d_net.forward(F.concat([xt, fake], axis=1), training=True)
    g_adv = F.bce_loss(p_fake_g, 1.0)
    if cfg.use_l1:
        g_l1 = F.l1_loss(fake, gt)
        total = g_adv + cfg.l1_weight * g_l1
        l1_val = g_l1.item()
    else:
        total = g_adv
        l1_val = 0.0
    total.backward()
    g_opt.step()

    return {
        "d_loss": d_loss.item(),
        "g_adv_loss": g_adv.item(),
        "g_l1_loss": l1_val,
        "p_real": p_real.item(),
        "p_fake": p_fake_d.item(),
    }


@dataclass
class TrainCallbacks:
    on_step: Callable[[int, dict], None] | None = None
    # called as on_epoch(epoch_number, loop); loop.checkpoint() snapshots state
    on_epoch: Callable[[int, "_TrainLoop"], None] | None = None


class _TrainLoop:
    def __init__(
        self,
        pairs: list[tuple[np.ndarray, np.ndarray]],
        g_net: Generator,
        d_net: Discriminator,
        g_opt: Adam,
        d_opt: Adam,
        t_cfg: TrainConfig,
        rng: np.random.Generator,
        w: int,
        manifest_hash: str,
        epoch0: int,
        step0: int = 0,
    ):
        self.pairs = pairs
        self.g_net = g_net
        self.d_net = d_net
        self.g_opt = g_opt
        self.d_opt = d_opt
        self.t_cfg = t_cfg
        self.rng = rng
        self.w = w
        self.manifest_hash = manifest_hash
        self.epoch = epoch0
        self.step = step0
        self.stop = False  # callbacks may set this to end training early

    def run(self, epochs: int, callbacks: TrainCallbacks | None) -> None:
        for _ in range(epochs):
            order = self.rng.permutation(len(self.pairs))
            for idx in order:
                x, truth = self.pairs[int(idx)]
                losses = gan_step(self.g_net, self.d_net, x, truth, self.t_cfg, self.rng, self.g_opt, self.d_opt)
                self.step += 1
                if callbacks and callbacks.on_step:
                    callbacks.on_step(self.step, losses)
            self.epoch += 1
            if callbacks and callbacks.on_epoch:
                callbacks.on_epoch(self.epoch, self)
            if self.stop:
                break

    def checkpoint(self) -> "ModelCheckpoint":
        tensors: dict[str, np.ndarray] = {}
        for name, t in self.g_net.named_params() + self.d_net.named_params():
            tensors[name] = t.data.copy()
        for name, a in self.g_net.named_state() + self.d_net.named_state():
            tensors[name] = a.copy()
        for prefix, opt in (("adam_g", self.g_opt), ("adam_d", self.d_opt)):
            if opt.state.m:
                for pname, m, v in zip(opt.names, opt.state.m, opt.state.v):
                    tensors[f"{prefix}.m.{pname}"] = m.copy()
                    tensors[f"{prefix}.v.{pname}"] = v.copy()
        return ModelCheckpoint(
            version=CHECKPOINT_VERSION,
            w=self.w,
            epoch=self.epoch,
            manifest_hash=self.manifest_hash,
            g_cfg=self.g_net.cfg,
            d_cfg=self.d_net.cfg,
            t_cfg=self.t_cfg,
            adam_g={"lr": self.g_opt.state.lr, "beta1": self.g_opt.state.beta1, "beta2": self.g_opt.state.beta2, "eps": self.g_opt.state.eps, "t": self.g_opt.state.t},
            adam_d={"lr": self.d_opt.state.lr, "beta1": self.d_opt.state.beta1, "beta2": self.d_opt.state.beta2, "eps": self.d_opt.state.eps, "t": self.d_opt.state.t},
            rng_state=self.rng.bit_generator.state,
            tensors=tensors,
        )


def _validate_pairs(dataset, g_cfg: GeneratorConfig) -> tuple[list[tuple[np.ndarray, np.ndarray]], int]:
    if not dataset:
        raise ValidationError("training dataset is empty")
    pairs = []
    w = None
    for i, (x, truth) in enumerate(dataset):
        xb = _as_batch(x, g_cfg.in_channels, f"pair {i} input")
        tb = _as_batch(truth, 3, f"pair {i} truth")
        if xb.shape[2:] != tb.shape[2:]:
            raise ValidationError(f"pair {i}: input {xb.shape[2:]} vs truth {tb.shape[2:]}")
        if w is None:
            w = xb.shape[-1]
        elif xb.shape[-1] != w or xb.shape[-2] != w:
            raise ValidationError(f"pair {i} size {xb.shape[2:]} differs from first pair {w}x{w}")
        pairs.append((xb[0], tb[0]))
    return pairs, int(w)


def train(
    dataset,
    g_cfg: GeneratorConfig,
    d_cfg: DiscriminatorConfig,
    t_cfg: TrainConfig,
    callbacks: TrainCallbacks | None = None,
    manifest_hash: str = "",
) -> "ModelCheckpoint":
    """Train from scratch on (x, truth) pairs; deterministic per seed."""
    if d_cfg.in_channels != g_cfg.in_channels + 3:
        raise ValidationError(
            f"discriminator expects in_channels = {g_cfg.in_channels + 3} (generator input + 3), got {d_cfg.in_channels}"
        )
    pairs, w = _validate_pairs(dataset, g_cfg)
    ss = np.random.SeedSequence(t_cfg.seed)
    k_g, k_d, k_loop = ss.spawn(3)
    g_net = Generator(g_cfg, np.random.default_rng(k_g))
    d_net = Discriminator(d_cfg, np.random.default_rng(k_d))
    g_opt = Adam(g_net.named_params(), t_cfg.lr, t_cfg.beta1, t_cfg.beta2, t_cfg.eps)
    d_opt = Adam(d_net.named_params(), t_cfg.lr, t_cfg.beta1, t_cfg.beta2, t_cfg.eps)
    loop = _TrainLoop(pairs, g_net, d_net, g_opt, d_opt, t_cfg, np.random.default_rng(k_loop), w, manifest_hash, epoch0=0)
    loop.run(t_cfg.epochs, callbacks)
    return loop.checkpoint()


def fine_tune(
    checkpoint: "ModelCheckpoint",
    pairs,
    t_cfg: TrainConfig,
    callbacks: TrainCallbacks | None = None,
) -> "ModelCheckpoint":
    """Continue training a checkpoint on a small pair set.

    Optimizer moments, batchnorm statistics, and the rng stream resume from
    the checkpoint; t_cfg supplies epochs, loss weights, and optimizer
    hyperparameters for the new steps (its seed is ignored).
    """
    if not pairs:
        raise ValidationError("fine_tune needs at least one pair")
    plist, w = _validate_pairs(pairs, checkpoint.g_cfg)
    if w != checkpoint.w:
        raise ValidationError(f"pairs are {w}x{w} but checkpoint was trained at {checkpoint.w}x{checkpoint.w}")
    g_net, d_net, g_opt, d_opt, rng = checkpoint.restore()
    for opt in (g_opt, d_opt):
        opt.state.lr = t_cfg.lr
        opt.state.beta1 = t_cfg.beta1
        opt.state.beta2 = t_cfg.beta2
        opt.state.eps = t_cfg.eps
    loop = _TrainLoop(plist, g_net, d_net, g_opt, d_opt, t_cfg, rng, w, checkpoint.manifest_hash, epoch0=checkpoint.epoch)
    loop.run(t_cfg.epochs, callbacks)
    return loop.checkpoint()


class Predictor:
    """Reusable inference wrapper: restores the generator once."""

    def __init__(self, checkpoint: "ModelCheckpoint"):
        self.checkpoint = checkpoint
        self.g_net = checkpoint.restore_generator()

    def __call__(self, x) -> ImagePlane:
        xb = _as_batch(x, self.g_net.cfg.in_channels, "x")
        if xb.shape[-1] != self.checkpoint.w or xb.shape[-2] != self.checkpoint.w:
            raise ValidationError(f"input is {xb.shape[2:]} but checkpoint expects {self.checkpoint.w}x{self.checkpoint.w}")
        out = self.g_net.forward(Tensor(xb), training=False).data[0]
        return ImagePlane(np.clip(out.transpose(1, 2, 0), 0.0, 1.0))


def infer(checkpoint: "ModelCheckpoint", x) -> ImagePlane:
    """Deterministic forecast for one input; see Predictor for batch reuse."""
    return Predictor(checkpoint)(x)


@dataclass
class ModelCheckpoint:
    version: int
    w: int
    epoch: int
    manifest_hash: str
    g_cfg: GeneratorConfig
    d_cfg: DiscriminatorConfig
    t_cfg: TrainConfig
    adam_g: dict
    adam_d: dict
    rng_state: dict
    tensors: dict[str, np.ndarray]

    # -- reconstruction ------------------------------------------------------

    def _load_into(self, net) -> None:
        for name, t in net.named_params():
            if name not in self.tensors:
                raise ArtifactIOError(f"checkpoint missing tensor {name!r}")
            if self.tensors[name].shape != t.data.shape:
                raise ArtifactIOError(
                    f"checkpoint tensor {name!r} has shape {self.tensors[name].shape}, expected {t.data.shape}"
                )
            t.data[...] = self.tensors[name]
        for name, a in net.named_state():
            if name not in self.tensors:
                raise ArtifactIOError(f"checkpoint missing state {name!r}")
            a[...] = self.tensors[name]

    def restore_generator(self) -> Generator:
        g_net = Generator(self.g_cfg, np.random.default_rng(0))
        self._load_into(g_net)
        return g_net

    def restore(self) -> tuple[Generator, Discriminator, Adam, Adam, np.random.Generator]:
        g_net = self.restore_generator()
        d_net = Discriminator(self.d_cfg, np.random.default_rng(0))
        self._load_into(d_net)
        g_opt = Adam(g_net.named_params(), self.adam_g["lr"], self.adam_g["beta1"], self.adam_g["beta2"], self.adam_g["eps"])
        d_opt = Adam(d_net.named_params(), self.adam_d["lr"], self.adam_d["beta1"], self.adam_d["beta2"], self.adam_d["eps"])
        for prefix, opt in (("adam_g", g_opt), ("adam_d", d_opt)):
            state = opt.state
            state.t = int(self.adam_g["t"] if prefix == "adam_g" else self.adam_d["t"])
            if state.t > 0 or any(f"{prefix}.m.{n}" in self.tensors for n in opt.names):
                state.m = []
                state.v = []
                for n in opt.names:
                    mk, vk = f"{prefix}.m.{n}", f"{prefix}.v.{n}"
                    if mk not in self.tensors or vk not in self.tensors:
                        raise ArtifactIOError(f"checkpoint missing optimizer moment for {n!r}")
                    state.m.append(self.tensors[mk].copy())
                    state.v.append(self.tensors[vk].copy())
        rng = np.random.default_rng(0)
        rng.bit_generator.state = self.rng_state
        return g_net, d_net, g_opt, d_opt, rng

    # -- serialization ---------------------------------------------------------

    def _header(self, order: list[str]) -> dict:
        return {
            "version": self.version,
            "w": self.w,
            "epoch": self.epoch,
            "manifest_hash": self.manifest_hash,
            "g_cfg": asdict(self.g_cfg),
            "d_cfg": asdict(self.d_cfg),
            "t_cfg": asdict(self.t_cfg),
            "adam_g": self.adam_g,
            "adam_d": self.adam_d,
            "rng_state": self.rng_state,
            "tensors": [
                {"name": n, "dtype": "<f4", "shape": list(self.tensors[n].shape)} for n in order
            ],
        }

    def to_bytes(self) -> bytes:
        order = sorted(self.tensors)
        header = canonical_json(self._header(order)).encode("utf-8")
        parts = [CHECKPOINT_MAGIC, struct.pack("<I", self.version), struct.pack("<Q", len(header)), header]
        for n in order:
            a = self.tensors[n]
            if a.dtype != np.float32:
                raise ValidationError(f"tensor {n!r} must be float32, is {a.dtype}")
            parts.append(np.ascontiguousarray(a, dtype="<f4").tobytes())
        return b"".join(parts)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ModelCheckpoint":
        if len(blob) < 16 or blob[:4] != CHECKPOINT_MAGIC:
            raise ArtifactIOError("not a checkpoint file (bad magic)")
        version = struct.unpack("<I", blob[4:8])[0]
        if version != CHECKPOINT_VERSION:
            raise ArtifactIOError(f"unsupported checkpoint version {version}")
        hlen = struct.unpack("<Q", blob[8:16])[0]
        if len(blob) < 16 + hlen:
            raise ArtifactIOError("truncated checkpoint header")
        try:
            header = json.loads(blob[16 : 16 + hlen].decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ArtifactIOError(f"corrupt checkpoint header: {e}") from e
        at = 16 + hlen
        tensors: dict[str, np.ndarray] = {}
        for rec in header["tensors"]:
            n = int(np.prod(rec["shape"])) if rec["shape"] else 1
            nbytes = n * 4
            if len(blob) < at + nbytes:
                raise ArtifactIOError(f"truncated checkpoint payload at tensor {rec['name']!r}")
            tensors[rec["name"]] = (
                np.frombuffer(blob[at : at + nbytes], dtype="<f4").reshape(rec["shape"]).copy()
            )
            at += nbytes
        if at != len(blob):
            raise ArtifactIOError("trailing bytes after checkpoint payload")
        try:
            return cls(
                version=version,
                w=int(header["w"]),
                epoch=int(header["epoch"]),
                manifest_hash=header["manifest_hash"],
                g_cfg=GeneratorConfig(**header["g_cfg"]),
                d_cfg=DiscriminatorConfig(**header["d_cfg"]),
                t_cfg=TrainConfig(**header["t_cfg"]),
                adam_g=header["adam_g"],
                adam_d=header["adam_d"],
                rng_state=header["rng_state"],
                tensors=tensors,
            )
        except (KeyError, TypeError) as e:
            raise ArtifactIOError(f"malformed checkpoint header: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> "ModelCheckpoint":
        p = Path(path)
        if not p.exists():
            raise ArtifactIOError(f"checkpoint file not found: {p}")
        return cls.from_bytes(p.read_bytes())
