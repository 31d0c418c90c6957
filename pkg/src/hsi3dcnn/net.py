"""From-scratch 3D CNN: layers, hand-derived backprop, Adam, training loop.

The architecture family is fixed: four valid (no padding, stride 1) 3D
convolutions with ReLU, then flatten, dense 256, dropout, dense 128,
dropout, dense C with softmax loss.  Internally activations are stored
channel-first, [batch, maps, height, width, depth]; layer summaries print
channel-last shapes to match the usual framework convention.

Convolution has two interchangeable routes: a direct loop nest evaluating
the kernel-window dot product per output element (the reference), and an
im2col lowering to one dense matrix product (the fast path used in
training).  They must agree to float32 tolerance; tests enforce it.

Checkpoint ``.hsim``: magic ``HSIM``, 1-byte version (=1), uint32 LE window
s, bands b, classes c, float32 dropout rate, then every parameter tensor in
architectural order (conv1 w,b ... dense3 w,b) as uint32 rank, uint32
extents, float32 values, all little-endian.
"""

import struct
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    ArchitectureError,
    CheckpointError,
    ConfigError,
    ShapeError,
    StateError,
    TrainingError,
    WindowError,
)
from .rng import STREAM_DROPOUT, STREAM_INIT, STREAM_SHUFFLE, Stream, derive

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# (filters, kh, kw, kd) per conv layer; layer 4 takes the 32 maps layer 3
# produces (its parameter count pins d_in = 32).
CONV_KERNELS = ((8, 3, 3, 7), (16, 3, 3, 5), (32, 3, 3, 3), (64, 3, 3, 3))

_CKPT_MAGIC = b"HSIM"
_CKPT_VERSION = 1


# ---------------------------------------------------------------------------
# convolution routes
# ---------------------------------------------------------------------------

def conv3d_direct(x: np.ndarray, w: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Reference convolution: loop over every output element and take the
    dot product of the kernel with the input window under it.

    x: [N, d_in, H, W, D], w: [d_out, d_in, kh, kw, kd], bias: [d_out].
    """
    n, c, h, wd, d = x.shape
    f, cw, kh, kw, kd = w.shape
    if cw != c:
        raise ShapeError(f"kernel expects {cw} input maps, got {c}")
    if h < kh or wd < kw or d < kd:
        raise ShapeError(f"input extents {(h, wd, d)} underflow kernel {(kh, kw, kd)}")
    out = np.zeros((n, f, h - kh + 1, wd - kw + 1, d - kd + 1), dtype=x.dtype)
    for ni in range(n):
        for fi in range(f):
            wf = w[fi]
            for ox in range(h - kh + 1):
                for oy in range(wd - kw + 1):
                    for oz in range(d - kd + 1):
                        window = x[ni, :, ox : ox + kh, oy : oy + kw, oz : oz + kd]
                        out[ni, fi, ox, oy, oz] = np.sum(wf * window) + bias[fi]
    return out


def _im2col(x: np.ndarray, kh: int, kw: int, kd: int) -> np.ndarray:
    """Lower [N, C, H, W, D] into [N*P, C*kh*kw*kd] patch rows, P = H'*W'*D'."""
    win = sliding_window_view(x, (kh, kw, kd), axis=(2, 3, 4))
    n, c, ho, wo, do = win.shape[:5]
    return win.transpose(0, 2, 3, 4, 1, 5, 6, 7).reshape(n * ho * wo * do, c * kh * kw * kd)


def conv3d_lowered(x: np.ndarray, w: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """im2col convolution: one matrix product against the flattened kernels."""
    n, c, h, wd, d = x.shape
    f, cw, kh, kw, kd = w.shape
    if cw != c:
        raise ShapeError(f"kernel expects {cw} input maps, got {c}")
    if h < kh or wd < kw or d < kd:
        raise ShapeError(f"input extents {(h, wd, d)} underflow kernel {(kh, kw, kd)}")
    ho, wo, do = h - kh + 1, wd - kw + 1, d - kd + 1
    cols = _im2col(x, kh, kw, kd)
    out = cols @ w.reshape(f, -1).T + bias
    return np.ascontiguousarray(out.reshape(n, ho, wo, do, f).transpose(0, 4, 1, 2, 3))


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------

class Conv3D:
    """Valid 3D convolution, stride 1, odd kernel extents."""

    def __init__(self, d_in, d_out, kernel, name="conv", dtype=np.float32, impl="lowered"):
        kh, kw, kd = kernel
        if min(kh, kw, kd) < 1 or kh % 2 == 0 or kw % 2 == 0 or kd % 2 == 0:
            raise ShapeError(f"{name}: kernel extents must be odd positive, got {kernel}")
        if impl not in ("lowered", "direct"):
            raise ConfigError(f"unknown convolution impl {impl!r}")
        self.name = name
        self.impl = impl
        self.w = np.zeros((d_out, d_in, kh, kw, kd), dtype=dtype)
        self.b = np.zeros(d_out, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x = None

    def out_shape(self, in_shape):
        c, h, wd, d = in_shape
        f, cw, kh, kw, kd = self.w.shape
        if cw != c:
            raise ShapeError(f"{self.name}: expects {cw} input maps, got {c}")
        if h < kh or wd < kw or d < kd:
            raise ShapeError(f"{self.name}: extents {(h, wd, d)} underflow kernel {(kh, kw, kd)}")
        return (f, h - kh + 1, wd - kw + 1, d - kd + 1)

    def forward(self, x, train=False):
        squeeze = x.ndim == 4
        if squeeze:
            x = x[None]
        self.out_shape(x.shape[1:])
        self._x = x
        self._squeeze = squeeze
        route = conv3d_direct if self.impl == "direct" else conv3d_lowered
        out = route(x, self.w, self.b)
        return out[0] if squeeze else out

    def backward(self, g):
        if self._x is None:
            raise StateError(f"{self.name}: backward before forward")
        if self._squeeze:
            g = g[None]
        x = self._x
        f, _, kh, kw, kd = self.w.shape
        n = x.shape[0]
        ho, wo, do = self.out_shape(x.shape[1:])[1:]
        if g.shape != (n, f, ho, wo, do):
            raise ShapeError(f"{self.name}: upstream grad {g.shape} != {(n, f, ho, wo, do)}")
        cols = _im2col(x, kh, kw, kd)
        g2 = g.transpose(0, 2, 3, 4, 1).reshape(-1, f)
        self.dw += (g2.T @ cols).reshape(self.w.shape)
        self.db += g2.sum(axis=0)
        dcols = (g2 @ self.w.reshape(f, -1)).reshape(n, ho, wo, do, *self.w.shape[1:])
        dx = np.zeros_like(x)
        for i in range(kh):
            for j in range(kw):
                for k in range(kd):
                    dx[:, :, i : i + ho, j : j + wo, k : k + do] += (
                        dcols[:, :, :, :, :, i, j, k].transpose(0, 4, 1, 2, 3)
                    )
        return dx[0] if self._squeeze else dx

    def parameters(self):
        return [(f"{self.name}.weights", self.w, self.dw), (f"{self.name}.bias", self.b, self.db)]

    def param_count(self):
        return self.w.size + self.b.size


class ReLU:
    """Elementwise max(0, x); backward masks where the input was <= 0."""

    def __init__(self):
        self._mask = None

    def forward(self, x, train=False):
        self._mask = x > 0
        return np.maximum(x, 0)

    def backward(self, g):
        if self._mask is None:
            raise StateError("relu: backward before forward")
        if g.shape != self._mask.shape:
            raise ShapeError(f"relu: upstream grad {g.shape} != {self._mask.shape}")
        return g * self._mask

    def parameters(self):
        return []

    def param_count(self):
        return 0


class Flatten:
    """Row-major flatten of everything past the batch axis; no data movement."""

    def __init__(self):
        self._shape = None

    def forward(self, x, train=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1) if x.ndim > 1 else x.reshape(1, -1)

    def backward(self, g):
        if self._shape is None:
            raise StateError("flatten: backward before forward")
        return g.reshape(self._shape)

    def parameters(self):
        return []

    def param_count(self):
        return 0


class Dense:
    """Affine map y = x W^T + b with weights [d_out, d_in]."""

    def __init__(self, d_in, d_out, name="dense", dtype=np.float32):
        self.name = name
        self.w = np.zeros((d_out, d_in), dtype=dtype)
        self.b = np.zeros(d_out, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x = None

    def forward(self, x, train=False):
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None]
        if x.shape[1] != self.w.shape[1]:
            raise ShapeError(f"{self.name}: input width {x.shape[1]} != {self.w.shape[1]}")
        self._x = x
        self._squeeze = squeeze
        out = x @ self.w.T + self.b
        return out[0] if squeeze else out

    def backward(self, g):
        if self._x is None:
            raise StateError(f"{self.name}: backward before forward")
        if self._squeeze:
            g = g[None]
        if g.shape != (self._x.shape[0], self.w.shape[0]):
            raise ShapeError(f"{self.name}: upstream grad {g.shape} mismatched")
        self.dw += g.T @ self._x
        self.db += g.sum(axis=0)
        dx = g @ self.w
        return dx[0] if self._squeeze else dx

    def parameters(self):
        return [(f"{self.name}.weights", self.w, self.dw), (f"{self.name}.bias", self.b, self.db)]

    def param_count(self):
        return self.w.size + self.b.size


class Dropout:
    """Inverted dropout: train mode zeroes with probability ``rate`` and
    scales survivors by 1/(1-rate); eval mode is the identity."""

    def __init__(self, rate, stream: Stream):
        if not 0.0 <= rate < 1.0:
            raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.stream = stream
        self._scaled_mask = None

    def forward(self, x, train=False):
        if not train or self.rate == 0.0:
            self._scaled_mask = None
            return x
        u = self.stream.uniform(x.size).reshape(x.shape)
        self._scaled_mask = (u >= self.rate).astype(x.dtype) / x.dtype.type(1.0 - self.rate)
        return x * self._scaled_mask

    def backward(self, g):
        if self._scaled_mask is None:
            return g
        return g * self._scaled_mask

    def parameters(self):
        return []

    def param_count(self):
        return 0


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

def softmax_cross_entropy(logits: np.ndarray, label: int):
    """Loss -log softmax(logits)[label] and its gradient softmax - onehot.

    Max-subtraction keeps the exponentials stable for any finite logits.
    """
    logits = np.asarray(logits, dtype=np.float64)
    c = logits.shape[0]
    if not 0 <= label < c:
        raise ConfigError(f"label {label} outside 0..{c - 1}")
    if not np.isfinite(logits).all():
        raise ConfigError("non-finite logits")
    z = logits - logits.max()
    lse = np.log(np.exp(z).sum())
    loss = lse - z[label]
    grad = np.exp(z - lse)
    grad[label] -= 1.0
    return float(loss), grad


def softmax_loss_batch(logits: np.ndarray, labels: np.ndarray):
    """Per-sample losses and the gradient of the batch-mean loss."""
    n = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1))
    losses = lse - z[np.arange(n), labels]
    grad = np.exp(z - lse[:, None])
    grad[np.arange(n), labels] -= 1.0
    return losses, grad / n


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass
class AdamState:
    """First/second moment buffers and step counter for one parameter tensor."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def for_param(cls, param: np.ndarray) -> "AdamState":
        return cls(m=np.zeros_like(param), v=np.zeros_like(param))


def adam_step(param, grad, state: AdamState, lr,
              beta1=ADAM_BETA1, beta2=ADAM_BETA2, eps=ADAM_EPS):
    """One bias-corrected Adam update, in place on ``param``."""
    state.t += 1
    state.m *= beta1
    state.m += (1.0 - beta1) * grad
    state.v *= beta2
    state.v += (1.0 - beta2) * grad * grad
    m_hat = state.m / (1.0 - beta1 ** state.t)
    v_hat = state.v / (1.0 - beta2 ** state.t)
    param -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(param.dtype, copy=False)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

class Model:
    """An ordered layer stack plus per-tensor Adam state."""

    def __init__(self, layers, s, b, c, dropout_rate, dtype=np.float32):
        self.layers = layers
        self.s = s
        self.b = b
        self.c = c
        self.dropout_rate = dropout_rate
        self.dtype = np.dtype(dtype)
        self.adam = {name: AdamState.for_param(p) for name, p, _ in self.parameters()}
        self.summary_rows = []

    def parameters(self):
        """(name, param, grad) triples in fixed architectural order."""
        out = []
        for layer in self.layers:
            out.extend(layer.parameters())
        return out

    def param_count(self):
        return sum(layer.param_count() for layer in self.layers)

    def zero_grads(self):
        for _, _, g in self.parameters():
            g[...] = 0.0

    def forward(self, x, train=False):
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, g):
        for layer in reversed(self.layers):
            g = layer.backward(g)
        return g

    def step(self, lr):
        for name, p, g in self.parameters():
            adam_step(p, g, self.adam[name], lr)


def _largest_odd_at_most(k: int) -> int:
    return k if k % 2 == 1 else k - 1


def build_model(s: int, b: int, c: int, dropout_rate: float = 0.4, seed: int = 0,
                dtype=np.float32, conv_impl: str = "lowered") -> Model:
    """Construct the four-conv architecture for an s x s x b input and c classes.

    Kernel sizes follow the published stack (8x3x3x7, 16x3x3x5, 32x3x3x3,
    64x3x3x3).  A spectral kernel depth larger than the remaining spectral
    extent is reduced to the largest odd value that fits, so small band
    counts stay trainable; spatial extents are never adapted and underflow
    raises naming the offending layer.  Weights are seeded scaled-uniform
    (bound sqrt(6/fan_in)), biases zero.
    """
    if s < 1 or s % 2 == 0:
        raise WindowError(f"window size must be odd and positive, got {s}")
    if b < 1:
        raise ConfigError(f"band count must be >= 1, got {b}")
    if c < 2:
        raise ConfigError(f"need at least 2 classes, got {c}")

    rows = [("Input Layer", (s, s, b, 1), 0)]
    layers = []
    h = wd = s
    d = b
    d_in = 1
    for i, (f, kh, kw, kd) in enumerate(CONV_KERNELS, start=1):
        name = f"Conv3D_{i}"
        if h < kh or wd < kw:
            raise ArchitectureError(
                f"{name}: spatial extent {h}x{wd} underflows its {kh}x{kw} kernel "
                f"(window {s} is too small)"
            )
        kd_eff = min(kd, _largest_odd_at_most(d))
        layers.append(Conv3D(d_in, f, (kh, kw, kd_eff), name=name, dtype=dtype, impl=conv_impl))
        layers.append(ReLU())
        h, wd, d, d_in = h - kh + 1, wd - kw + 1, d - kd_eff + 1, f
        rows.append((f"{name} (Conv3D)", (h, wd, d, f), layers[-2].param_count()))

    flat = h * wd * d * d_in
    rows.append(("Flatten_1 (Flatten)", (flat,), 0))
    layers.append(Flatten())

    drop_ord = 0
    for j, (width, prev) in enumerate(((256, flat), (128, 256)), start=1):
        dense = Dense(prev, width, name=f"Dense_{j}", dtype=dtype)
        layers.append(dense)
        layers.append(ReLU())
        drop_ord += 1
        layers.append(Dropout(dropout_rate, Stream(derive(seed, STREAM_DROPOUT, drop_ord))))
        rows.append((f"Dense_{j} (Dense)", (width,), dense.param_count()))
        rows.append((f"Dropout_{j} (Dropout)", (width,), 0))
    head = Dense(128, c, name="Dense_3", dtype=dtype)
    layers.append(head)
    rows.append(("Dense_3 (Dense)", (c,), head.param_count()))

    model = Model(layers, s=s, b=b, c=c, dropout_rate=dropout_rate, dtype=dtype)
    model.summary_rows = rows

    for idx, (name, p, _) in enumerate(model.parameters()):
        if not name.endswith(".weights"):
            continue  # biases stay zero
        fan_in = p.shape[1] if p.ndim == 2 else int(np.prod(p.shape[1:]))
        bound = np.sqrt(6.0 / fan_in)
        u = Stream(derive(seed, STREAM_INIT, idx)).uniform(p.size)
        p[...] = ((2.0 * u - 1.0) * bound).reshape(p.shape).astype(p.dtype)
    return model


def summary_text(model: Model) -> str:
    """Layer table (name, output shape, parameter count) plus the total."""
    lines = [f"{'Layer':<24} {'Output Shape':<18} {'# of Parameters':>16}"]
    for name, shape, count in model.summary_rows:
        shape_s = "(" + ", ".join(str(v) for v in shape) + ")"
        lines.append(f"{name:<24} {shape_s:<18} {count:>16}")
    lines.append(f"Total trainable parameters: {model.param_count()}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# training / inference
# ---------------------------------------------------------------------------

@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    seconds: float


def _as_net_input(patches: np.ndarray, dtype) -> np.ndarray:
    """[n, s, s, b, 1] patch layout -> [n, 1, s, s, b] network input."""
    return np.moveaxis(patches, 4, 1).astype(dtype, copy=False)


def evaluate_batches(model: Model, patches, labels, batch=256):
    """Mean loss, accuracy, and predictions over a patch array, eval mode."""
    n = patches.shape[0]
    if n == 0:
        return float("nan"), float("nan"), np.zeros(0, dtype=np.int64)
    total, correct = 0.0, 0
    preds = np.zeros(n, dtype=np.int64)
    for start in range(0, n, batch):
        xb = _as_net_input(patches[start : start + batch], model.dtype)
        logits = model.forward(xb, train=False)
        losses, _ = softmax_loss_batch(logits, labels[start : start + batch])
        total += float(losses.sum())
        p = np.argmax(logits, axis=1)
        preds[start : start + batch] = p
        correct += int((p == labels[start : start + batch]).sum())
    return total / n, correct / n, preds


def train(model: Model, train_set, val_set, epochs=50, batch=256, lr=0.001,
          seed=0, select="final", log=None):
    """Mini-batch Adam training with a seeded shuffle per epoch.

    The final partial batch is trained, not dropped.  Per epoch the history
    records the mean train loss/accuracy over the epoch's batches (dropout
    active), the full validation loss/accuracy in eval mode, and wall-clock
    seconds.  ``select="best-val"`` restores the weights of the best
    validation-accuracy epoch at the end; default keeps the final epoch.
    """
    n = len(train_set)
    if n == 0:
        raise TrainingError("training set is empty")
    if batch < 1:
        raise ConfigError(f"batch size must be >= 1, got {batch}")
    if select not in ("final", "best-val"):
        raise ConfigError(f"unknown selection mode {select!r}")
    labels = train_set.labels
    if labels.max() >= model.c:
        raise TrainingError(f"label {int(labels.max())} outside the model's {model.c} classes")

    history = []
    best = (-1.0, None)
    for epoch in range(1, epochs + 1):
        t0 = time.perf_counter()
        perm = Stream(derive(seed, STREAM_SHUFFLE, epoch)).permutation(n)
        loss_sum, correct = 0.0, 0
        for start in range(0, n, batch):
            idx = perm[start : start + batch]
            xb = _as_net_input(train_set.patches[idx], model.dtype)
            yb = labels[idx]
            logits = model.forward(xb, train=True)
            losses, grad = softmax_loss_batch(logits, yb)
            if not np.isfinite(losses).all():
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, batch {start // batch}: "
                    f"lr={lr}, batch_size={len(idx)}"
                )
            loss_sum += float(losses.sum())
            correct += int((np.argmax(logits, axis=1) == yb).sum())
            model.zero_grads()
            model.backward(grad.astype(model.dtype, copy=False))
            model.step(lr)
        val_loss, val_acc, _ = evaluate_batches(model, val_set.patches, val_set.labels, batch)
        stats = EpochStats(
            epoch=epoch,
            train_loss=loss_sum / n,
            train_acc=correct / n,
            val_loss=val_loss,
            val_acc=val_acc,
            seconds=time.perf_counter() - t0,
        )
        history.append(stats)
        if log:
            log(stats)
        if select == "best-val" and (val_acc == val_acc) and val_acc > best[0]:
            best = (val_acc, [p.copy() for _, p, _ in model.parameters()])
    if select == "best-val" and best[1] is not None:
        for (_, p, _), saved in zip(model.parameters(), best[1]):
            p[...] = saved
    return history


def predict(model: Model, patches: np.ndarray, batch=256) -> np.ndarray:
    """Argmax class per patch (0-based); ties resolve to the lowest id."""
    n = patches.shape[0]
    preds = np.zeros(n, dtype=np.int64)
    for start in range(0, n, batch):
        xb = _as_net_input(patches[start : start + batch], model.dtype)
        logits = model.forward(xb, train=False)
        preds[start : start + batch] = np.argmax(logits, axis=1)
    return preds


def predict_full_map(model: Model, reduced: np.ndarray, batch=256) -> np.ndarray:
    """1-based class map for every pixel, via zero-padded patch extraction."""
    from .patches import iter_full_map_batches

    _, m, n = reduced.shape
    out = np.zeros((m, n), dtype=np.int32)
    for coords, block in iter_full_map_batches(reduced, model.s, batch):
        xb = _as_net_input(block, model.dtype)
        logits = model.forward(xb, train=False)
        out[coords[:, 0], coords[:, 1]] = np.argmax(logits, axis=1) + 1
    return out


def format_history(history, deterministic=False) -> str:
    """One CSV line per epoch; deterministic mode zeroes the wall-clock column
    so identical runs produce bitwise-identical files."""
    lines = ["epoch,train_loss,train_acc,val_loss,val_acc,seconds"]
    for h in history:
        secs = 0.0 if deterministic else h.seconds
        lines.append(
            f"{h.epoch},{h.train_loss:.6f},{h.train_acc:.6f},"
            f"{h.val_loss:.6f},{h.val_acc:.6f},{secs:.3f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(model: Model, path) -> None:
    """Serialize (s, b, c, dropout rate) and every parameter tensor."""
    parts = [
        _CKPT_MAGIC,
        bytes([_CKPT_VERSION]),
        struct.pack("<IIIf", model.s, model.b, model.c, model.dropout_rate),
    ]
    for _, p, _ in model.parameters():
        parts.append(struct.pack("<I", p.ndim))
        parts.append(struct.pack(f"<{p.ndim}I", *p.shape))
        parts.append(np.ascontiguousarray(p, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path, conv_impl="lowered") -> Model:
    """Rebuild the architecture from the header and load its parameters."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != _CKPT_MAGIC:
        raise CheckpointError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < 5 or data[4] != _CKPT_VERSION:
        raise CheckpointError(f"{path}: unsupported version")
    if len(data) < 21:
        raise CheckpointError(f"{path}: truncated header")
    s, b, c, rate = struct.unpack_from("<IIIf", data, 5)
    try:
        model = build_model(s, b, c, dropout_rate=float(rate), dtype=np.float32,
                            conv_impl=conv_impl)
    except (ArchitectureError, ConfigError, WindowError) as e:
        raise CheckpointError(f"{path}: header describes an invalid architecture: {e}") from e
    off = 21
    for name, p, _ in model.parameters():
        if off + 4 > len(data):
            raise CheckpointError(f"{path}: truncated before {name}")
        (rank,) = struct.unpack_from("<I", data, off)
        off += 4
        if rank != p.ndim or off + 4 * rank > len(data):
            raise CheckpointError(f"{path}: {name} rank {rank} != {p.ndim}")
        extents = struct.unpack_from(f"<{rank}I", data, off)
        off += 4 * rank
        if extents != p.shape:
            raise CheckpointError(
                f"{path}: architecture mismatch on {name}: file {extents}, model {p.shape}"
            )
        nbytes = 4 * p.size
        if off + nbytes > len(data):
            raise CheckpointError(f"{path}: truncated values for {name}")
        p[...] = np.frombuffer(data, dtype="<f4", count=p.size, offset=off).reshape(p.shape)
        off += nbytes
    if off != len(data):
        raise CheckpointError(f"{path}: {len(data) - off} trailing bytes")
    return model
